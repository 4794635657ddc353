#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "infogent/core.hpp"
#include "infogent/model.hpp"
#include "infogent/web.hpp"

namespace infogent::testkit {

/// Absolute path of tests/data, baked in at build time.
std::filesystem::path data_dir();
std::shared_ptr<const FixtureWeb> fixture_web();

/// A scripted end-to-end task with its hand-written expectations.
struct Scenario {
  std::string id;
  AccessMode mode = AccessMode::api;
  std::string task;
  std::string start_url;
  RunConfig config;
  json script;
  json expected;
};

Scenario load_scenario(const std::filesystem::path& path);
std::vector<Scenario> load_all_scenarios();

struct ScenarioRun {
  RunResult result;
  std::vector<ScriptedModel::Call> calls;
  /// Trace length at the moment of each call, aligned with `calls`.
  std::vector<std::size_t> trace_size_at_call;
  std::size_t unused_responses = 0;
};

ScenarioRun run_scenario(const Scenario& s, std::shared_ptr<const FixtureWeb> web);

/// Every navigator prompt (API prompt or visual generation prompt) must
/// show the most recent aggregator feedback verbatim, or "None" before the
/// first aggregation. Returns one message per violation.
std::vector<std::string> check_feedback_conditioning(const ScenarioRun& run, const std::string& navigator_model);

/// "t actor kind", with "warning:<reason>" for warnings and a trailing "!"
/// for error outcomes.
std::string signature(const TraceEvent& e);

/// Every difference between the run and the expectations; empty on a match.
std::vector<std::string> check_scenario(const Scenario& s, const ScenarioRun& run);

}  // namespace infogent::testkit
