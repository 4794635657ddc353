#pragma once

#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "infogent/browser.hpp"
#include "infogent/core.hpp"
#include "infogent/metrics.hpp"
#include "infogent/model.hpp"
#include "infogent/orchestrator.hpp"
#include "infogent/web.hpp"

namespace infogent {

struct DatasetExample {
  std::string id;
  std::string question;
  std::string answer;
  std::optional<std::string> reasoning_type;
};

/// One JSON object per line; blank lines are ignored. Throws ConfigError
/// naming the line for malformed rows and duplicate ids.
std::vector<DatasetExample> parse_dataset(std::istream& in);
std::vector<DatasetExample> load_dataset(const std::filesystem::path& path);

struct JudgeVerdict {
  bool decision = false;
  std::string explanation;
};

std::string render_judge_prompt(std::string_view question, std::string_view predicted, std::string_view gold);
/// Decision is true only for the exact string "TRUE" after trimming.
/// Throws JudgeParseFailure.
JudgeVerdict parse_judge_verdict(std::string_view raw);
/// One retry on an unparseable reply, then JudgeParseFailure.
JudgeVerdict llm_judge(std::string_view question, std::string_view predicted, std::string_view gold,
                       ModelBackend& model, const std::string& model_id);

/// Which metrics a dataset is scored with.
enum class ScoringConvention {
  frames,          // LLM judge
  fanoutqa,        // string accuracy and ROUGE
  assistantbench,  // string accuracy
};

std::string_view to_string(ScoringConvention c);
ScoringConvention scoring_convention_from_string(std::string_view s);

/// Everything one example needs, owned so examples stay isolated.
struct ExampleEnvironment {
  std::unique_ptr<ModelBackend> model;
  std::unique_ptr<SearchProvider> search;
  std::unique_ptr<Scraper> scraper;
  std::unique_ptr<BrowserDriver> browser;
  std::string start_url;

  Backends view() const { return {model.get(), search.get(), scraper.get(), browser.get(), start_url}; }
};

using EnvironmentFactory = std::function<ExampleEnvironment(const DatasetExample&)>;

struct EvalOptions {
  AccessMode mode = AccessMode::api;
  ScoringConvention convention = ScoringConvention::fanoutqa;
  int parallel = 1;
  /// When set, each example's trace is written to <dir>/<id>.jsonl.
  std::optional<std::filesystem::path> trace_dir;
};

struct EvalReport {
  json aggregates = json::object();
  json per_type = json::object();
  std::vector<json> examples;
  int failures = 0;

  json to_json() const;
  /// {"id", "answer"} per line, for external scorers.
  std::string predictions_jsonl() const;
};

/// Runs every example (optionally in parallel), scores it by `convention`
/// and merges the results in dataset order. Per-example failures are
/// recorded in the report, never thrown.
EvalReport evaluate_dataset(const std::vector<DatasetExample>& examples, const RunConfig& config,
                            const EnvironmentFactory& factory, const EvalOptions& options);

struct SkippedFile {
  std::filesystem::path path;
  std::string reason;
};

struct ActionStats {
  int run_count = 0;
  std::map<std::string, double> mean_per_action;
  double termination_success_rate = 0.0;
  std::vector<SkippedFile> skipped;

  json to_json() const;
  std::string to_text() const;
};

/// Statistics over already-parsed runs. Navigator events other than
/// warnings count as actions; the run_end event gives the termination
/// reason.
ActionStats trace_stats(const std::vector<std::vector<TraceEvent>>& runs);
/// Reads every *.jsonl file in `dir` (sorted by name). Files that do not
/// parse or lack a run_end event are reported in `skipped`. Throws
/// std::invalid_argument when `dir` is not a directory.
ActionStats trace_stats(const std::filesystem::path& dir);

}  // namespace infogent
