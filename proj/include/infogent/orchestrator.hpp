#pragma once

#include <string>

#include "infogent/browser.hpp"
#include "infogent/core.hpp"
#include "infogent/model.hpp"
#include "infogent/trace.hpp"
#include "infogent/web.hpp"

namespace infogent {

/// Non-owning handles to the environment. API mode needs search and
/// scraper, visual mode needs a browser; the model is always required.
struct Backends {
  ModelBackend* model = nullptr;
  SearchProvider* search = nullptr;
  Scraper* scraper = nullptr;
  BrowserDriver* browser = nullptr;
  /// Visual mode opens this page first when non-empty.
  std::string start_url;
};

/// The navigate / extract / aggregate loop for one task. The caller is
/// expected to have validated `config`. Backend errors end the run with
/// termination_reason fatal_error; other component errors are recorded in
/// the trace and the loop continues.
RunResult run_task(const Task& task, const RunConfig& config, const Backends& backends, TraceRecorder& trace);
RunResult run_task(const Task& task, const RunConfig& config, const Backends& backends);

inline constexpr std::string_view kNothingAggregated =
    "No information was aggregated for this question. Answer from what you know, or say that the answer could "
    "not be found.";

std::string render_answer_prompt(const Task& task, const InfoStack& stack);

/// Final answer from the aggregated passages.
std::string answer(const Task& task, const InfoStack& stack, ModelBackend& model, const std::string& model_id);

/// run_task followed by answer. A run that ended in fatal_error carries no
/// answer; a failed answer call leaves `answer` empty and is traced.
RunResult solve(const Task& task, const RunConfig& config, const Backends& backends, TraceRecorder& trace);

}  // namespace infogent
