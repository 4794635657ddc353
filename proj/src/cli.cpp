#include "infogent/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "infogent/evaluation.hpp"
#include "infogent/orchestrator.hpp"
#include "infogent/trace.hpp"

namespace infogent {

namespace {

namespace fs = std::filesystem;

constexpr std::string_view kSynopsis =
    "usage:\n"
    "  infogent run --task TEXT --mode api|visual [--config PATH] [--fixture PATH --script PATH] [--trace PATH]\n"
    "  infogent eval --dataset PATH --mode api|visual --out PATH [--config PATH] [--fixture PATH --script PATH]\n"
    "                [--parallel N] [--convention frames|fanoutqa|assistantbench] [--predictions PATH]\n"
    "                [--trace-dir DIR]\n"
    "  infogent trace-stats DIR [--json]\n"
    "  infogent fixtures-validate PATH\n";

constexpr std::string_view kDefaultLiveStart = "https://duckduckgo.com/";

/// Raised for problems the operator can fix on the command line.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json read_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw UsageError(std::string("cannot open ") + what + " " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(std::string("invalid JSON in ") + what + " " + path + ": " + e.what());
  }
}

struct CommonOptions {
  std::string mode;
  std::string config_path;
  std::string fixture_path;
  std::string script_path;
  std::optional<int> K;
  std::optional<int> N;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--mode", o.mode, "access setting")->required()->check(CLI::IsMember({"api", "visual"}));
  cmd->add_option("--config", o.config_path, "RunConfig JSON");
  cmd->add_option("--fixture", o.fixture_path, "fixture web JSON (replaces live search and browsing)");
  cmd->add_option("--script", o.script_path, "scripted model responses (replaces the live model)");
  cmd->add_option("--K", o.K, "max aggregate invocations (overrides the config file)");
  cmd->add_option("--N", o.N, "max navigator steps (overrides the config file)");
}

RunConfig load_config(const CommonOptions& o, AccessMode mode) {
  RunConfig config = RunConfig::defaults(mode);
  if (!o.config_path.empty()) merge_config_json(read_json_file(o.config_path, "config"), config);
  if (o.K) config.K = *o.K;
  if (o.N) config.N = *o.N;
  return validate_config(config);
}

/// Builds the environment for one run: fixtures when given, live clients
/// otherwise. `script` is the parsed script document, if any.
ExampleEnvironment make_environment(AccessMode mode, const std::shared_ptr<const FixtureWeb>& web,
                                    const std::optional<json>& script) {
  ExampleEnvironment env;
  if (script) {
    env.model = std::make_unique<ScriptedModel>(ScriptedModel::from_json(*script));
  } else {
    env.model = std::make_unique<OpenAiCompatibleModel>(OpenAiCompatibleModel::from_env());
  }
  if (mode == AccessMode::api) {
    if (web) {
      env.search = std::make_unique<FixtureSearch>(web);
      env.scraper = std::make_unique<FixtureScraper>(web);
    } else {
      env.search = std::make_unique<HttpSearch>(HttpSearch::from_env());
      env.scraper = std::make_unique<HttpScraper>();
    }
  } else if (web) {
    env.browser = std::make_unique<FixtureBrowser>(web);
    env.start_url = std::string(FixtureBrowser::kSearchHome);
  } else {
    env.browser = WebDriverBrowser::from_env();
    const char* start = std::getenv("INFOGENT_START_URL");
    env.start_url = start != nullptr && *start != '\0' ? start : std::string(kDefaultLiveStart);
  }
  return env;
}

std::shared_ptr<const FixtureWeb> load_fixture(const std::string& path) {
  if (path.empty()) return nullptr;
  if (!fs::exists(path)) throw UsageError("fixture not found: " + path);
  return std::make_shared<const FixtureWeb>(FixtureWeb::load(path));
}

int cmd_run(const std::string& task_text, const std::string& trace_path, const CommonOptions& o, std::ostream& out,
            std::ostream& err) {
  const AccessMode mode = access_mode_from_string(o.mode);
  const RunConfig config = load_config(o, mode);
  Task task;
  try {
    task = make_task("cli", task_text, mode);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--task: ") + e.what());
  }
  const auto web = load_fixture(o.fixture_path);
  std::optional<json> script;
  if (!o.script_path.empty()) script = read_json_file(o.script_path, "script");

  ExampleEnvironment env = make_environment(mode, web, script);
  std::ofstream trace_file(trace_path);
  if (!trace_file) throw UsageError("cannot write trace " + trace_path);
  TraceRecorder recorder(&trace_file);
  const RunResult result = solve(task, config, env.view(), recorder);

  if (result.termination_reason == TerminationReason::fatal_error || !result.answer) {
    err << "run failed: " << to_string(result.termination_reason) << "\n";
    for (const auto& e : result.trace) {
      if (e.kind == "fatal_error" && e.error_detail) err << *e.error_detail << "\n";
    }
    return kExitFailure;
  }
  out << *result.answer << "\n";
  err << "termination: " << to_string(result.termination_reason) << ", steps " << result.steps_used
      << ", aggregations " << result.aggregations_used << ", trace " << trace_path << "\n";
  return kExitOk;
}

struct EvalFlags {
  std::string dataset;
  std::string out_path;
  std::string predictions_path;
  std::string trace_dir;
  std::string convention = "fanoutqa";
  int parallel = 1;
};

int cmd_eval(const EvalFlags& f, const CommonOptions& o, std::ostream& out, std::ostream& err) {
  if (!fs::exists(f.dataset)) throw UsageError("dataset not found: " + f.dataset);
  const AccessMode mode = access_mode_from_string(o.mode);
  const RunConfig config = load_config(o, mode);
  EvalOptions options;
  options.mode = mode;
  options.parallel = f.parallel;
  try {
    options.convention = scoring_convention_from_string(f.convention);
  } catch (const ConfigError& e) {
    throw UsageError(std::string("--convention: ") + e.what());
  }
  if (!f.trace_dir.empty()) {
    fs::create_directories(f.trace_dir);
    options.trace_dir = f.trace_dir;
  }

  std::vector<DatasetExample> examples;
  try {
    examples = load_dataset(f.dataset);
  } catch (const ConfigError& e) {
    throw UsageError(f.dataset + ": " + e.what());
  }
  const auto web = load_fixture(o.fixture_path);
  std::optional<json> scripts;
  if (!o.script_path.empty()) {
    scripts = read_json_file(o.script_path, "script");
    if (!scripts->is_object()) throw UsageError("eval script must map example ids to scripts");
  }

  const EnvironmentFactory factory = [&](const DatasetExample& ex) {
    std::optional<json> script;
    if (scripts) script = scripts->contains(ex.id) ? (*scripts)[ex.id] : json::array();
    return make_environment(mode, web, script);
  };
  const EvalReport report = evaluate_dataset(examples, config, factory, options);

  std::ofstream report_file(f.out_path);
  if (!report_file) throw UsageError("cannot write report " + f.out_path);
  report_file << report.to_json().dump(2) << "\n";
  if (!f.predictions_path.empty()) {
    std::ofstream pred(f.predictions_path);
    if (!pred) throw UsageError("cannot write predictions " + f.predictions_path);
    pred << report.predictions_jsonl();
  }
  out << report.aggregates.dump() << "\n";
  if (report.failures > 0) err << report.failures << " example(s) failed; see " << f.out_path << "\n";
  return kExitOk;
}

int cmd_trace_stats(const std::string& dir, bool as_json, std::ostream& out) {
  if (!fs::is_directory(dir)) throw UsageError("not a directory: " + dir);
  const ActionStats stats = trace_stats(fs::path(dir));
  if (as_json) {
    out << stats.to_json().dump(2) << "\n";
  } else {
    out << stats.to_text();
  }
  return kExitOk;
}

int cmd_fixtures_validate(const std::string& path, std::ostream& out, std::ostream& err) {
  if (!fs::exists(path)) throw UsageError("fixture not found: " + path);
  FixtureWeb web;
  try {
    web = FixtureWeb::load(path);
  } catch (const std::exception& e) {
    err << path << ": " << e.what() << "\n";
    return kExitFailure;
  }
  const auto problems = web.validate();
  for (const auto& p : problems) err << path << ": " << p << "\n";
  if (!problems.empty()) return kExitFailure;
  out << path << ": " << web.pages.size() << " pages, ok\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Feedback-driven web information aggregation agent", "infogent"};
  app.require_subcommand(1, 1);

  CommonOptions run_opts;
  std::string task_text;
  std::string trace_path = "trace.jsonl";
  auto* run = app.add_subcommand("run", "answer one question");
  run->add_option("--task", task_text, "the question")->required();
  run->add_option("--trace", trace_path, "trace output (JSONL)");
  add_common(run, run_opts);

  CommonOptions eval_opts;
  EvalFlags eval_flags;
  auto* eval = app.add_subcommand("eval", "evaluate a dataset");
  eval->add_option("--dataset", eval_flags.dataset, "dataset JSONL")->required();
  eval->add_option("--out", eval_flags.out_path, "report JSON")->required();
  eval->add_option("--predictions", eval_flags.predictions_path, "predictions JSONL for external scorers");
  eval->add_option("--trace-dir", eval_flags.trace_dir, "directory for per-example traces");
  eval->add_option("--convention", eval_flags.convention, "scoring: frames, fanoutqa or assistantbench");
  eval->add_option("--parallel", eval_flags.parallel, "examples evaluated concurrently")->check(CLI::PositiveNumber);
  add_common(eval, eval_opts);

  std::string stats_dir;
  bool stats_json = false;
  auto* stats = app.add_subcommand("trace-stats", "action statistics over a directory of traces");
  stats->add_option("dir", stats_dir, "trace directory")->required();
  stats->add_flag("--json", stats_json, "print JSON");

  std::string fixture_path;
  auto* validate = app.add_subcommand("fixtures-validate", "check a fixture web");
  validate->add_option("path", fixture_path, "fixture JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << kSynopsis;
    return kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(task_text, trace_path, run_opts, out, err);
    if (eval->parsed()) return cmd_eval(eval_flags, eval_opts, out, err);
    if (stats->parsed()) return cmd_trace_stats(stats_dir, stats_json, out);
    return cmd_fixtures_validate(fixture_path, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << kSynopsis;
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n" << kSynopsis;
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace infogent
