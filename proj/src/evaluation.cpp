#include "infogent/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "infogent/prompts.hpp"
#include "infogent/text_util.hpp"
#include "infogent/trace.hpp"

namespace infogent {

namespace {

constexpr std::string_view kJudgeCorrective =
    "\n\nYour previous response could not be parsed. Respond with only the JSON object described above.";

std::string safe_file_stem(std::string_view id) {
  std::string out;
  for (char c : id) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out.push_back(keep ? c : '_');
  }
  return out.empty() ? "example" : out;
}

json evaluate_one(const DatasetExample& ex, const RunConfig& config, const EnvironmentFactory& factory,
                  const EvalOptions& options) {
  json rec = {{"id", ex.id}, {"question", ex.question}, {"gold", ex.answer}};
  if (ex.reasoning_type) rec["reasoning_type"] = *ex.reasoning_type;
  rec["flags"] = json::array();
  bool failed = false;
  bool correct = false;

  try {
    ExampleEnvironment env = factory(ex);
    const Task task = make_task(ex.id, ex.question, options.mode, ex.answer);

    std::ofstream trace_file;
    if (options.trace_dir) {
      trace_file.open(*options.trace_dir / (safe_file_stem(ex.id) + ".jsonl"));
      if (!trace_file) throw std::runtime_error("cannot write trace for " + ex.id);
    }
    TraceRecorder recorder(options.trace_dir ? &trace_file : nullptr);
    const RunResult run = solve(task, config, env.view(), recorder);

    const std::string answer = run.answer.value_or("");
    rec["answer"] = answer;
    rec["termination_reason"] = to_string(run.termination_reason);
    rec["steps_used"] = run.steps_used;
    rec["aggregations_used"] = run.aggregations_used;
    rec["stack_size"] = run.stack.size();
    if (run.termination_reason == TerminationReason::step_budget) rec["flags"].push_back("budget");
    if (run.stack.empty()) rec["flags"].push_back("closed_book");
    if (run.termination_reason == TerminationReason::fatal_error) {
      failed = true;
      rec["error"] = "run ended with fatal_error";
    } else if (!run.answer) {
      failed = true;
      rec["error"] = "no answer produced";
    }

    json metrics = json::object();
    switch (options.convention) {
      case ScoringConvention::frames:
        if (!failed) {
          try {
            const auto verdict = llm_judge(ex.question, answer, ex.answer, *env.model, config.model_for("judge"));
            metrics["judge"] = verdict.decision;
            metrics["judge_explanation"] = verdict.explanation;
            correct = verdict.decision;
          } catch (const Error& e) {
            failed = true;
            rec["error"] = std::string("judge: ") + e.what();
          }
        }
        break;
      case ScoringConvention::fanoutqa: {
        const auto scores = rouge(answer, ex.answer);
        metrics["string_accuracy"] = correct = string_accuracy(answer, ex.answer);
        metrics["rouge1_f"] = scores.rouge1_f();
        metrics["rouge2_f"] = scores.rouge2_f();
        metrics["rougeL_f"] = scores.rougeL_f();
        break;
      }
      case ScoringConvention::assistantbench:
        metrics["string_accuracy"] = correct = string_accuracy(answer, ex.answer);
        break;
    }
    rec["metrics"] = metrics;
  } catch (const std::exception& e) {
    failed = true;
    rec["error"] = e.what();
    rec["metrics"] = json::object();
  }
  rec["correct"] = correct && !failed;
  rec["failed"] = failed;
  return rec;
}

json aggregate_rows(const std::vector<const json*>& rows, ScoringConvention convention) {
  json agg = {{"count", rows.size()}};
  int failures = 0;
  double correct = 0, r1 = 0, r2 = 0, rl = 0;
  for (const json* r : rows) {
    failures += (*r)["failed"].get<bool>() ? 1 : 0;
    correct += (*r)["correct"].get<bool>() ? 1.0 : 0.0;
    const json& m = (*r)["metrics"];
    r1 += m.value("rouge1_f", 0.0);
    r2 += m.value("rouge2_f", 0.0);
    rl += m.value("rougeL_f", 0.0);
  }
  const double n = rows.empty() ? 1.0 : static_cast<double>(rows.size());
  agg["failures"] = failures;
  agg["accuracy"] = rows.empty() ? 0.0 : correct / n;
  if (convention == ScoringConvention::fanoutqa) {
    agg["rouge1_f"] = rows.empty() ? 0.0 : r1 / n;
    agg["rouge2_f"] = rows.empty() ? 0.0 : r2 / n;
    agg["rougeL_f"] = rows.empty() ? 0.0 : rl / n;
  }
  return agg;
}

}  // namespace

std::vector<DatasetExample> parse_dataset(std::istream& in) {
  std::vector<DatasetExample> out;
  std::set<std::string> ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const std::string where = "dataset line " + std::to_string(line_no) + ": ";
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ConfigError(where + e.what());
    }
    if (!j.is_object()) throw ConfigError(where + "expected an object");
    DatasetExample ex;
    try {
      ex.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
      ex.question = j.at("question").get<std::string>();
      ex.answer = j.at("answer").is_string() ? j.at("answer").get<std::string>() : j.at("answer").dump();
      if (j.contains("reasoning_type") && j["reasoning_type"].is_string()) {
        ex.reasoning_type = j["reasoning_type"].get<std::string>();
      }
    } catch (const json::exception& e) {
      throw ConfigError(where + e.what());
    }
    if (!ids.insert(ex.id).second) throw ConfigError(where + "duplicate id " + ex.id);
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<DatasetExample> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset " + path.string());
  return parse_dataset(in);
}

std::string render_judge_prompt(std::string_view question, std::string_view predicted, std::string_view gold) {
  return prompts::render(prompts::template_text(prompts::kJudge), {{"question", std::string(question)},
                                                                    {"predicted", std::string(predicted)},
                                                                    {"answer", std::string(gold)}});
}

JudgeVerdict parse_judge_verdict(std::string_view raw) {
  const auto obj = text::first_json_object(raw);
  if (!obj) throw JudgeParseFailure("no JSON object in judge response");
  json j;
  try {
    j = json::parse(*obj);
  } catch (const json::exception& e) {
    throw JudgeParseFailure(std::string("invalid JSON in judge response: ") + e.what());
  }
  if (!j.contains("Decision") || !j["Decision"].is_string()) throw JudgeParseFailure("missing \"Decision\"");
  JudgeVerdict v;
  v.decision = text::trim(j["Decision"].get<std::string>()) == "TRUE";
  if (j.contains("Explanation") && j["Explanation"].is_string()) v.explanation = j["Explanation"].get<std::string>();
  return v;
}

JudgeVerdict llm_judge(std::string_view question, std::string_view predicted, std::string_view gold,
                       ModelBackend& model, const std::string& model_id) {
  const Prompt prompt(render_judge_prompt(question, predicted, gold));
  try {
    return parse_judge_verdict(model.complete(model_id, prompt, ResponseMode::json));
  } catch (const JudgeParseFailure&) {
  }
  Prompt retry = prompt;
  retry.parts.push_back(PromptPart::of_text(std::string(kJudgeCorrective)));
  return parse_judge_verdict(model.complete(model_id, retry, ResponseMode::json));
}

std::string_view to_string(ScoringConvention c) {
  switch (c) {
    case ScoringConvention::frames: return "frames";
    case ScoringConvention::fanoutqa: return "fanoutqa";
    case ScoringConvention::assistantbench: return "assistantbench";
  }
  return "fanoutqa";
}

ScoringConvention scoring_convention_from_string(std::string_view s) {
  const std::string v = text::to_lower(text::trim(s));
  if (v == "frames") return ScoringConvention::frames;
  if (v == "fanoutqa") return ScoringConvention::fanoutqa;
  if (v == "assistantbench") return ScoringConvention::assistantbench;
  throw ConfigError("unknown scoring convention \"" + std::string(s) + "\"");
}

json EvalReport::to_json() const {
  return {{"aggregates", aggregates}, {"per_type", per_type}, {"examples", examples}};
}

std::string EvalReport::predictions_jsonl() const {
  std::string out;
  for (const auto& e : examples) {
    out += json{{"id", e.at("id")}, {"answer", e.value("answer", "")}}.dump() + "\n";
  }
  return out;
}

EvalReport evaluate_dataset(const std::vector<DatasetExample>& examples, const RunConfig& config,
                            const EnvironmentFactory& factory, const EvalOptions& options) {
  std::vector<json> records(examples.size());
  const std::size_t workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(options.parallel, 1)), 1, std::max<std::size_t>(examples.size(), 1));

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < examples.size(); i = next++) {
      records[i] = evaluate_one(examples[i], config, factory, options);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  EvalReport report;
  report.examples = std::move(records);
  std::vector<const json*> all;
  std::map<std::string, std::vector<const json*>> by_type;
  for (const auto& r : report.examples) {
    all.push_back(&r);
    if (r.contains("reasoning_type")) by_type[r["reasoning_type"].get<std::string>()].push_back(&r);
    if (r["failed"].get<bool>()) ++report.failures;
  }
  report.aggregates = aggregate_rows(all, options.convention);
  report.aggregates["convention"] = to_string(options.convention);
  for (const auto& [type, rows] : by_type) report.per_type[type] = aggregate_rows(rows, options.convention);
  return report;
}

json ActionStats::to_json() const {
  json skipped_json = json::array();
  for (const auto& s : skipped) skipped_json.push_back({{"path", s.path.string()}, {"reason", s.reason}});
  return {{"run_count", run_count},
          {"mean_per_action", mean_per_action},
          {"termination_success_rate", termination_success_rate},
          {"skipped", skipped_json}};
}

std::string ActionStats::to_text() const {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  out << "runs: " << run_count << "\n";
  for (const auto& [action, mean] : mean_per_action) out << action << " (" << mean << ")\n";
  out << "termination success: " << termination_success_rate * 100 << "%\n";
  for (const auto& s : skipped) out << "skipped " << s.path.string() << ": " << s.reason << "\n";
  return out.str();
}

ActionStats trace_stats(const std::vector<std::vector<TraceEvent>>& runs) {
  ActionStats stats;
  stats.run_count = static_cast<int>(runs.size());
  if (runs.empty()) return stats;
  std::map<std::string, long> totals;
  int terminated = 0;
  for (const auto& run : runs) {
    for (const auto& e : run) {
      if (e.actor == Actor::navigator && e.kind != "warning") ++totals[e.kind];
      if (e.actor == Actor::orchestrator && e.kind == "run_end" &&
          e.payload.value("termination_reason", "") == "navigator_terminate") {
        ++terminated;
      }
    }
  }
  const double n = static_cast<double>(runs.size());
  for (const auto& [kind, total] : totals) stats.mean_per_action[kind] = static_cast<double>(total) / n;
  stats.termination_success_rate = static_cast<double>(terminated) / n;
  return stats;
}

ActionStats trace_stats(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw std::invalid_argument("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<std::vector<TraceEvent>> runs;
  std::vector<SkippedFile> skipped;
  for (const auto& f : files) {
    try {
      auto events = read_trace_file(f);
      const bool has_end = std::any_of(events.begin(), events.end(), [](const TraceEvent& e) {
        return e.actor == Actor::orchestrator && e.kind == "run_end";
      });
      if (!has_end) {
        skipped.push_back({f, "no run_end event"});
        continue;
      }
      runs.push_back(std::move(events));
    } catch (const std::exception& e) {
      skipped.push_back({f, e.what()});
    }
  }
  ActionStats stats = trace_stats(runs);
  stats.skipped = std::move(skipped);
  return stats;
}

}  // namespace infogent
