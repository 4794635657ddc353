// Acceptance checks: one PASS/FAIL/SKIP line per criterion, nonzero exit on
// any FAIL.
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "episodes.hpp"
#include "golden.hpp"
#include "infogent/aggregator.hpp"
#include "infogent/evaluation.hpp"
#include "infogent/metrics.hpp"
#include "infogent/navigator_api.hpp"
#include "infogent/navigator_visual.hpp"
#include "infogent/orchestrator.hpp"
#include "infogent/text_util.hpp"
#include "infogent/trace.hpp"
#include "oracles.hpp"
#include "scenario.hpp"

namespace fs = std::filesystem;
using namespace infogent;

namespace {

enum class Status { pass, fail, skip };

struct Verdict {
  Status status = Status::pass;
  std::string detail;
};

Verdict pass(std::string d) { return {Status::pass, std::move(d)}; }
Verdict fail(std::string d) { return {Status::fail, std::move(d)}; }

/// Joins the first few problems into one line.
Verdict from_problems(const std::vector<std::string>& problems, const std::string& ok_detail) {
  if (problems.empty()) return pass(ok_detail);
  std::string d = std::to_string(problems.size()) + " problem(s): ";
  for (std::size_t i = 0; i < problems.size() && i < 3; ++i) d += (i ? "; " : "") + problems[i];
  return fail(d);
}

std::string json_of_run(const RunResult& r) {
  json events = json::array();
  for (const auto& e : r.trace) events.push_back(to_json(e));
  json stack = json::array();
  for (const auto& p : r.stack.items()) stack.push_back({p.text, p.source_url, p.step_extracted});
  return json{{"events", events}, {"stack", stack}, {"answer", r.answer.value_or("")}}.dump();
}

// 1. Scripted end-to-end suite.
Verdict deterministic_suite() {
  const auto start = std::chrono::steady_clock::now();
  const auto web = testkit::fixture_web();
  const auto scenarios = testkit::load_all_scenarios();
  std::vector<std::string> problems;
  for (const auto& s : scenarios) {
    const auto first = testkit::run_scenario(s, web);
    const auto second = testkit::run_scenario(s, web);
    for (const auto& d : testkit::check_scenario(s, first)) problems.push_back(s.id + ": " + d);
    if (json_of_run(first.result) != json_of_run(second.result)) problems.push_back(s.id + ": reruns differ");
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (web->pages.size() < 20) problems.push_back("fixture web has only " + std::to_string(web->pages.size()) + " pages");
  if (scenarios.size() < 10) problems.push_back("only " + std::to_string(scenarios.size()) + " tasks");
  if (secs >= 10.0) problems.push_back("suite took " + std::to_string(secs) + " s");
  std::ostringstream d;
  d << scenarios.size() << " tasks over " << web->pages.size() << " pages, run twice in " << secs << " s";
  return from_problems(problems, d.str());
}

// 2. Randomized episodes.
Verdict randomized_episodes() {
  const auto web = testkit::fixture_web();
  std::vector<std::string> problems;
  int aggregations = 0;
  for (int i = 0; i < 1000; ++i) {
    const AccessMode mode = i % 2 == 0 ? AccessMode::api : AccessMode::visual;
    const auto s = testkit::random_episode(70000 + static_cast<std::uint64_t>(i), mode);
    const auto run = testkit::run_scenario(s, web);
    aggregations += run.result.aggregations_used;
    for (const auto& p : testkit::check_invariants(s, run)) problems.push_back(s.id + ": " + p);
  }
  return from_problems(problems, "1000 episodes (500 per mode), " + std::to_string(aggregations) + " aggregations");
}

// 3. Random ADD/REPLACE decisions through the aggregator.
Verdict stack_operations() {
  std::mt19937_64 rng(31337);
  std::vector<Passage> pool;
  for (int i = 0; i < 8; ++i) pool.push_back({"fact " + std::to_string(i), "https://wiki.example/P" + std::to_string(i % 3), 1});
  const Task task = make_task("stack", "Collect facts", AccessMode::api);
  std::vector<std::string> problems;
  int skipped_total = 0;
  for (int c = 0; c < 10000 && problems.size() < 10; ++c) {
    const std::size_t capacity = 1 + rng() % 5;
    std::vector<Passage> initial;
    const std::size_t prefill = rng() % (capacity + 1);
    for (std::size_t i = 0; i < prefill; ++i) {
      const Passage& p = pool[rng() % pool.size()];
      if (std::none_of(initial.begin(), initial.end(), [&](const Passage& q) { return q.same_content(p); })) initial.push_back(p);
    }
    std::vector<Passage> provided;
    const std::size_t offered = 1 + rng() % 4;
    for (std::size_t i = 0; i < offered; ++i) provided.push_back(pool[rng() % pool.size()]);
    const bool replace_only = rng() % 4 == 0;
    std::vector<StackAction> actions;
    json action_strings = json::array();
    const std::size_t n_actions = rng() % 6;
    for (std::size_t i = 0; i < n_actions; ++i) {
      const std::size_t pid = rng() % (provided.size() + 1);
      const auto a = (replace_only || rng() % 2) ? StackAction::replace(rng() % (capacity + 1), pid) : StackAction::add(pid);
      actions.push_back(a);
      action_strings.push_back(a.to_string());
    }

    // Independent model of the edit rules.
    std::vector<Passage> model = initial;
    int expected_skips = 0;
    auto dup_except = [&](const Passage& p, std::size_t slot) {
      for (std::size_t i = 0; i < model.size(); ++i) {
        if (i != slot && model[i].same_content(p)) return true;
      }
      return false;
    };
    for (const auto& a : actions) {
      if (a.provided_id >= provided.size()) { ++expected_skips; continue; }
      const Passage& p = provided[a.provided_id];
      if (a.kind == StackAction::Kind::add) {
        if (model.size() >= capacity || dup_except(p, model.size())) { ++expected_skips; continue; }
        model.push_back(p);
      } else {
        if (a.existing_id >= model.size() || dup_except(p, a.existing_id)) { ++expected_skips; continue; }
        model[a.existing_id] = p;
      }
    }

    ScriptedModel scripted({json{{"thoughts", ""}, {"actions", action_strings}, {"feedback", "keep going"}}.dump()});
    TraceRecorder trace;
    AggregatorContext ctx{scripted, "agg", trace, 1, AccessMode::api};
    const InfoStack before(capacity, initial);
    try {
      const auto [after, fb] = update(before, provided, task, 0, 5, ctx);
      int warnings = 0;
      for (const auto& e : trace.events()) warnings += e.kind == "warning" ? 1 : 0;
      const std::string where = "case " + std::to_string(c) + ": ";
      if (after.size() > capacity) problems.push_back(where + "capacity exceeded");
      if (after.size() < before.size()) problems.push_back(where + "stack shrank");
      if (replace_only && after.size() != before.size()) problems.push_back(where + "REPLACE changed size");
      if (after.items() != model) problems.push_back(where + "stack differs from the model");
      if (warnings != expected_skips) {
        problems.push_back(where + std::to_string(warnings) + " warnings for " + std::to_string(expected_skips) + " skips");
      }
      skipped_total += expected_skips;
    } catch (const std::exception& e) {
      problems.push_back("case " + std::to_string(c) + " threw: " + e.what());
    }
  }
  return from_problems(problems, "10000 decisions, " + std::to_string(skipped_total) + " skipped actions warned");
}

// 4. Parser fuzzing and round-trips.
Verdict parser_fuzz() {
  std::mt19937_64 rng(4242);
  std::vector<std::string> problems;
  VisualObservation obs;
  obs.url = "https://site.example/";
  for (int i = 0; i < 6; ++i) obs.candidates.push_back({i, ElementRole::button, "Button " + std::to_string(i), true});

  const std::vector<std::string> seeds = {
      R"j({"thoughts": "t", "actions": ["ADD(0)", "REPLACE(1, 2)"], "feedback": "find the year"})j",
      R"({"thought": "look", "tool": "search", "argument": "harbor marathon"})",
      R"({"tool": "aggregate", "argument": "https://wiki.example/A"})",
      "ELEMENT: 2\nACTION: TYPE\nVALUE: lumen rail",
      "ELEMENT: [1]\nACTION: SELECT\nVALUE: 2019",
      "ELEMENT: None\nACTION: GO BACK\nVALUE: None",
  };
  auto guard = [&](const std::string& name, const std::string& input, const std::function<void()>& f) {
    try {
      f();
    } catch (const MalformedDecision&) {
    } catch (const NavigationParseFailure&) {
    } catch (const GroundingFailure&) {
    } catch (const std::exception& e) {
      if (problems.size() < 10) problems.push_back(name + " threw " + e.what() + " on " + json(input).dump());
    } catch (...) {
      if (problems.size() < 10) problems.push_back(name + " threw a non-std exception");
    }
  };
  for (int i = 0; i < 10000; ++i) {
    const std::string input = i % 5 == 4 ? testkit::random_junk(rng, 80) : testkit::mutate(rng, seeds[rng() % seeds.size()]);
    guard("parse_decision", input, [&] { parse_decision(input); });
    guard("parse_tool_call", input, [&] { parse_tool_call(input); });
    guard("parse_grounding", input, [&] { parse_grounding(input, obs); });
  }

  int round_trips = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<StackAction> actions;
    json strings = json::array();
    const std::size_t n_actions = rng() % 4;
    for (std::size_t a = 0; a < n_actions; ++a) {
      actions.push_back(rng() % 2 ? StackAction::add(rng() % 20) : StackAction::replace(rng() % 20, rng() % 20));
      strings.push_back(actions.back().to_string());
    }
    const std::string feedback = "next: " + testkit::random_phrase(rng, 6);
    const auto d = parse_decision(json{{"thoughts", "x"}, {"actions", strings}, {"feedback", feedback}}.dump());
    if (d.actions != actions || d.feedback_text != feedback) problems.push_back("decision round-trip failed");

    const std::string query = "q " + testkit::random_phrase(rng, 5);
    const auto reply = parse_tool_call(json{{"thought", "t"}, {"tool", "search"}, {"argument", query}}.dump());
    const auto* call = std::get_if<ToolCall>(&reply);
    if (!call || call->tool != "search" || call->argument != text::trim(query)) {
      problems.push_back("tool call round-trip failed for " + query);
    }

    const int element = static_cast<int>(rng() % obs.candidates.size());
    const std::string value = text::trim("v " + testkit::random_phrase(rng, 4));
    VisualNavAction want;
    std::string raw;
    switch (rng() % 4) {
      case 0: want = VisualNavAction::click(element); raw = "ELEMENT: " + std::to_string(element) + "\nACTION: CLICK\nVALUE: None"; break;
      case 1: want = VisualNavAction::type(element, value); raw = "ELEMENT: " + std::to_string(element) + "\nACTION: TYPE\nVALUE: " + value; break;
      case 2: want = VisualNavAction::select(element, value); raw = "ELEMENT: [" + std::to_string(element) + "]\nACTION: SELECT\nVALUE: " + value; break;
      default: want = VisualNavAction::press_enter(); raw = "ELEMENT: None\nACTION: PRESS ENTER\nVALUE: None"; break;
    }
    try {
      if (!(parse_grounding(raw, obs) == want)) problems.push_back("grounding round-trip failed: " + json(raw).dump());
    } catch (const std::exception& e) {
      problems.push_back("grounding round-trip threw: " + std::string(e.what()));
    }
    round_trips += 3;
  }
  return from_problems(problems, "30000 fuzzed parses, " + std::to_string(round_trips) + " round-trips");
}

// 5. ROUGE against the brute-force oracle.
Verdict rouge_oracle() {
  std::vector<std::string> problems;
  const auto ex = rouge("the cat sat", "the cat sat on the mat");
  if (std::abs(ex.rouge1_f() - 0.6667) > 1e-4 || std::abs(ex.rougeL_f() - 0.6667) > 1e-4) {
    problems.push_back("worked example gave " + std::to_string(ex.rouge1_f()) + "/" + std::to_string(ex.rougeL_f()));
  }
  std::mt19937_64 rng(555);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const std::string a = testkit::random_phrase(rng, 12);
    const std::string b = testkit::random_phrase(rng, 12);
    const auto got = rouge(a, b);
    const auto want = testkit::oracle_rouge(a, b);
    worst = std::max({worst, std::abs(got.rouge1_f() - want.r1), std::abs(got.rouge2_f() - want.r2),
                      std::abs(got.rougeL_f() - want.rl)});
    if (std::abs(rouge(b, a).rougeL_f() - got.rougeL_f()) > 1e-12) problems.push_back("asymmetric F on pair " + std::to_string(i));
  }
  if (worst > 1e-9) problems.push_back("max deviation " + std::to_string(worst));
  std::ostringstream d;
  d << "200 pairs, max deviation " << worst;
  return from_problems(problems, d.str());
}

// 6. Golden prompts.
Verdict golden_prompts() {
  return from_problems(testkit::check_golden_prompts(),
                       std::to_string(testkit::golden_prompt_cases().size()) + " prompts byte-identical");
}

// 7. Trace statistics over synthetic trace files.
Verdict trace_statistics() {
  const fs::path root = fs::temp_directory_path() / "infogent_acceptance_stats";
  fs::remove_all(root);
  auto write_run = [](const fs::path& file, int clicks, const std::string& reason) {
    std::ofstream out(file);
    for (int i = 0; i < clicks; ++i) out << to_jsonl_line({i, Actor::navigator, "CLICK"}, "2026-01-01T00:00:00Z") << "\n";
    out << to_jsonl_line({clicks, Actor::orchestrator, "run_end", {{"termination_reason", reason}}}, "2026-01-01T00:00:00Z") << "\n";
  };
  std::vector<std::string> problems;
  fs::create_directories(root / "clicks");
  write_run(root / "clicks/a.jsonl", 3, "navigator_terminate");
  write_run(root / "clicks/b.jsonl", 4, "step_budget");
  fs::create_directories(root / "rate");
  write_run(root / "rate/a.jsonl", 1, "navigator_terminate");
  write_run(root / "rate/b.jsonl", 1, "navigator_terminate");
  write_run(root / "rate/c.jsonl", 1, "aggregate_budget");
  fs::create_directories(root / "empty");

  const auto clicks = trace_stats(root / "clicks");
  if (clicks.mean_per_action.count("CLICK") == 0 || clicks.mean_per_action.at("CLICK") != 3.5) problems.push_back("CLICK mean is not 3.5");
  const auto rate = trace_stats(root / "rate");
  if (std::abs(rate.termination_success_rate - 0.6667) > 1e-4) problems.push_back("termination rate " + std::to_string(rate.termination_success_rate));
  const auto empty = trace_stats(root / "empty");
  if (empty.run_count != 0 || !empty.mean_per_action.empty()) problems.push_back("empty directory reported runs");
  fs::remove_all(root);
  return from_problems(problems, "CLICK mean 3.5, termination rate 0.6667, empty dir 0 runs");
}

// 8. Navigator prompts carry the latest aggregator feedback.
Verdict feedback_conditioning() {
  const auto web = testkit::fixture_web();
  std::vector<std::string> problems;
  int checked[2] = {0, 0};
  for (const auto& s : testkit::load_all_scenarios()) {
    const auto run = testkit::run_scenario(s, web);
    for (const auto& p : testkit::check_feedback_conditioning(run, s.config.model_for("navigator"))) problems.push_back(s.id + ": " + p);
    ++checked[s.mode == AccessMode::api ? 0 : 1];
  }
  for (int i = 0; i < 200; ++i) {
    const AccessMode mode = i % 2 == 0 ? AccessMode::api : AccessMode::visual;
    const auto s = testkit::random_episode(90000 + static_cast<std::uint64_t>(i), mode);
    const auto run = testkit::run_scenario(s, web);
    for (const auto& p : testkit::check_feedback_conditioning(run, s.config.model_for("navigator"))) problems.push_back(s.id + ": " + p);
    ++checked[mode == AccessMode::api ? 0 : 1];
  }
  if (checked[0] == 0 || checked[1] == 0) problems.push_back("a mode had no runs");
  return from_problems(problems, std::to_string(checked[0]) + " api and " + std::to_string(checked[1]) + " visual runs");
}

// 9. Live smoke run, only with credentials.
Verdict live_smoke() {
  const char* model_key = std::getenv("MODEL_API_KEY");
  const char* search_key = std::getenv("SEARCH_API_KEY");
  if (model_key == nullptr || *model_key == '\0' || search_key == nullptr || *search_key == '\0') {
    return {Status::skip, "MODEL_API_KEY and SEARCH_API_KEY not set"};
  }
  const char* model_name = std::getenv("INFOGENT_LIVE_MODEL");
  RunConfig config = RunConfig::defaults(AccessMode::api);
  config.N = 6;
  config.K = 2;
  config.component_models["default"] = model_name != nullptr && *model_name != '\0' ? model_name : "gpt-4o-mini";
  try {
    OpenAiCompatibleModel model = OpenAiCompatibleModel::from_env();
    HttpSearch search = HttpSearch::from_env();
    HttpScraper scraper;
    TraceRecorder trace;
    const Task task = make_task("live", "In which year was the Eiffel Tower completed?", AccessMode::api);
    const auto result = solve(task, validate_config(config), {&model, &search, &scraper, nullptr, {}}, trace);
    if (!result.answer || result.termination_reason == TerminationReason::fatal_error) {
      return fail("live run ended with " + std::string(to_string(result.termination_reason)));
    }
    return pass("answer: " + *result.answer);
  } catch (const std::exception& e) {
    return fail(std::string("live run threw: ") + e.what());
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"deterministic end-to-end suite", deterministic_suite},
      {"randomized episode invariants", randomized_episodes},
      {"stack update invariants", stack_operations},
      {"parser robustness", parser_fuzz},
      {"rouge oracle agreement", rouge_oracle},
      {"golden prompts", golden_prompts},
      {"trace statistics", trace_statistics},
      {"feedback conditioning", feedback_conditioning},
      {"live smoke run", live_smoke},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = fail(std::string("uncaught exception: ") + e.what());
    }
    const char* label = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "SKIP";
    failures += o.status == Status::fail ? 1 : 0;
    std::cout << label << " " << (i + 1) << " " << criteria[i].first << ": " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
