#include "infogent/orchestrator.hpp"

#include "infogent/aggregator.hpp"
#include "infogent/extractor.hpp"
#include "infogent/navigator_api.hpp"
#include "infogent/navigator_visual.hpp"
#include "infogent/prompts.hpp"
#include "infogent/text_util.hpp"

namespace infogent {

namespace {

json result_urls(const std::vector<SearchResult>& results) {
  json urls = json::array();
  for (const auto& r : results) urls.push_back(r.url);
  return urls;
}

/// Mutable loop state shared by both modes.
struct Loop {
  const Task& task;
  const RunConfig& config;
  const Backends& backends;
  TraceRecorder& trace;

  InfoStack stack;
  int t = 0;
  int k = 0;
  bool terminated = false;
  bool turn_recorded = false;  // the navigator event of the current turn was emitted
  int enforce_after = -1;      // turn index after which an aggregator terminate request is enforced

  Loop(const Task& task_, const RunConfig& config_, const Backends& backends_, TraceRecorder& trace_)
      : task(task_),
        config(config_),
        backends(backends_),
        trace(trace_),
        stack(static_cast<std::size_t>(config_.capacity)) {}

  ModelBackend& model() const { return *backends.model; }

  void navigator_event(const std::string& kind, json payload) {
    trace.ok(t, Actor::navigator, kind, std::move(payload));
    turn_recorded = true;
  }

  Feedback aggregate(const std::vector<Passage>& passages) {
    AggregatorContext actx{model(), config.model_for("aggregator"), trace, t, task.access_mode};
    auto [next, feedback] = update(stack, passages, task, k, config.K, actx);
    stack = std::move(next);
    ++k;
    if (feedback.terminate_requested && enforce_after < 0) enforce_after = t + 1;
    return feedback;
  }
};

PageText fetch_with_retry(Loop& loop, const std::string& url) {
  PageText page = loop.backends.scraper->fetch_page(url);
  if (!page.fetched_ok) {
    loop.trace.warning(loop.t, Actor::orchestrator, "fetch_retry", {{"url", url}, {"detail", page.error}});
    page = loop.backends.scraper->fetch_page(url);
  }
  return page;
}

void api_turn(Loop& loop, ApiNavState& state) {
  ApiNavigatorContext nctx{loop.model(), loop.config.model_for("navigator"), loop.trace, loop.t,
                           static_cast<std::size_t>(loop.config.max_page_chars)};
  const ApiNavAction action = next_action(state, nctx);
  loop.navigator_event(action.name(), action.to_json());

  switch (action.kind) {
    case ApiNavAction::Kind::terminate:
      state = observe_terminate(std::move(state), action);
      loop.terminated = true;
      return;

    case ApiNavAction::Kind::search: {
      std::vector<SearchResult> results;
      try {
        try {
          results = loop.backends.search->search(action.argument, loop.config.domain_filter, kDefaultSearchLimit);
        } catch (const SearchFailure& first) {
          loop.trace.warning(loop.t, Actor::orchestrator, "search_retry", {{"detail", first.what()}});
          results = loop.backends.search->search(action.argument, loop.config.domain_filter, kDefaultSearchLimit);
        }
      } catch (const SearchFailure& e) {
        loop.trace.error(loop.t, Actor::orchestrator, "search_failed", e.what(), {{"query", action.argument}});
        state = observe_search_failure(std::move(state), action, e.what());
        return;
      }
      loop.trace.ok(loop.t, Actor::orchestrator, "search_results",
                    {{"query", action.argument}, {"urls", result_urls(results)}});
      state = observe_search(std::move(state), action, std::move(results));
      return;
    }

    case ApiNavAction::Kind::aggregate: {
      std::vector<Passage> passages;
      const PageText page = fetch_with_retry(loop, action.argument);
      if (!page.fetched_ok) {
        loop.trace.error(loop.t, Actor::orchestrator, "fetch_failed", page.error, {{"url", action.argument}});
      } else if (page.text.empty()) {
        loop.trace.warning(loop.t, Actor::orchestrator, "empty_page", {{"url", action.argument}});
      } else {
        ExtractorContext ectx{loop.model(), loop.config.model_for("extractor"), loop.trace, loop.t,
                              static_cast<std::size_t>(loop.config.max_page_chars)};
        ExtractionRequest req{loop.task, action.thought, action.argument, page};
        try {
          passages = extract_from_text(req, static_cast<std::size_t>(loop.config.max_passages_per_page), ectx);
        } catch (const ExtractionParseFailure& e) {
          loop.trace.error(loop.t, Actor::extractor, "extraction_failed", e.what(), {{"url", action.argument}});
        }
      }
      Feedback feedback = loop.aggregate(passages);
      state = observe_aggregate(std::move(state), action, std::move(feedback));
      return;
    }
  }
}

void visual_turn(Loop& loop, std::vector<VisualHistoryEntry>& history, Feedback& feedback) {
  BrowserDriver& browser = *loop.backends.browser;
  VisualObservation obs{browser.current_url(), browser.viewport_screenshot(), browser.extract_candidates()};
  VisualNavigatorContext nctx{loop.model(), loop.config.model_for("navigator"), loop.trace, loop.t};

  const std::string description = generate_action_description(obs, loop.task, feedback, history, nctx);
  VisualNavAction action;
  if (auto direct = direct_action(description)) {
    action = *direct;
  } else {
    try {
      action = ground_action(description, obs, loop.task, nctx);
    } catch (const GroundingFailure& e) {
      loop.trace.error(loop.t, Actor::navigator, "GROUNDING_FAILURE", e.what(), {{"description", description}});
      loop.turn_recorded = true;
      // The turn is spent and the page is unchanged.
      history.push_back({description, std::nullopt, "grounding failed"});
      return;
    }
  }

  json payload = action.to_json();
  payload["description"] = description;
  payload["url"] = obs.url;
  loop.navigator_event(action.name(), payload);

  if (action.kind == VisualNavAction::Kind::terminate) {
    history.push_back({description, action, "ok"});
    loop.terminated = true;
    return;
  }

  if (action.kind == VisualNavAction::Kind::aggregate) {
    std::vector<Passage> passages;
    const ScreenshotCapture capture = browser.capture_page_screenshots(loop.config.max_screenshots);
    if (capture.truncated) {
      loop.trace.warning(loop.t, Actor::orchestrator, "screenshots_truncated", {{"count", capture.shots.size()}});
    }
    if (!capture.shots.empty()) {
      ExtractorContext ectx{loop.model(), loop.config.model_for("extractor"), loop.trace, loop.t};
      ExtractionRequest req{loop.task, description, obs.url, capture.shots};
      try {
        passages = extract_from_screenshots(req, static_cast<std::size_t>(loop.config.max_passages_per_page), ectx);
      } catch (const ExtractionParseFailure& e) {
        loop.trace.error(loop.t, Actor::extractor, "extraction_failed", e.what(), {{"url", obs.url}});
      }
    }
    feedback = loop.aggregate(passages);
    history.push_back({description, action, "ok"});
    return;
  }

  try {
    const std::string url = browser.act(action);
    loop.trace.ok(loop.t, Actor::orchestrator, "page", {{"url", url}});
    history.push_back({description, action, "ok"});
  } catch (const BackendError&) {
    throw;
  } catch (const Error& e) {
    loop.trace.error(loop.t, Actor::orchestrator, "action_failed", e.what(), {{"action", action.to_string()}});
    history.push_back({description, action, std::string("failed: ") + e.what()});
  }
}

}  // namespace

RunResult run_task(const Task& task, const RunConfig& config, const Backends& backends, TraceRecorder& trace) {
  if (backends.model == nullptr) throw std::invalid_argument("a model backend is required");
  const bool visual = task.access_mode == AccessMode::visual;
  if (visual && backends.browser == nullptr) throw std::invalid_argument("visual mode needs a browser");
  if (!visual && (backends.search == nullptr || backends.scraper == nullptr)) {
    throw std::invalid_argument("api mode needs a search provider and a scraper");
  }

  Loop loop(task, config, backends, trace);
  json config_json;
  to_json(config_json, config);
  trace.ok(0, Actor::orchestrator, "run_start",
           {{"task_id", task.id}, {"query", task.query}, {"mode", to_string(task.access_mode)}, {"config", config_json}});

  ApiNavState api_state = initial_api_state(task, config.K);
  std::vector<VisualHistoryEntry> visual_history;
  Feedback visual_feedback = Feedback::initial(config.K);

  bool fatal = false;
  bool enforced = false;
  try {
    if (visual && !backends.start_url.empty()) backends.browser->open(backends.start_url);
    while (!loop.terminated && loop.k < config.K && loop.t < config.N) {
      loop.turn_recorded = false;
      if (visual) {
        visual_turn(loop, visual_history, visual_feedback);
      } else {
        api_turn(loop, api_state);
      }
      ++loop.t;
      if (!loop.terminated && loop.enforce_after >= 0 && loop.t > loop.enforce_after) {
        enforced = true;
        trace.ok(loop.t, Actor::orchestrator, "terminate_enforced", {{"requested_at", loop.enforce_after - 1}});
        break;
      }
    }
  } catch (const BackendError& e) {
    fatal = true;
    if (loop.turn_recorded) ++loop.t;
    trace.error(loop.t, Actor::orchestrator, "fatal_error", e.what());
  }

  RunResult result;
  result.stack = loop.stack;
  result.steps_used = loop.t;
  result.aggregations_used = loop.k;
  if (fatal) {
    result.termination_reason = TerminationReason::fatal_error;
  } else if (loop.terminated || enforced) {
    result.termination_reason = TerminationReason::navigator_terminate;
  } else if (loop.k >= config.K) {
    result.termination_reason = TerminationReason::aggregate_budget;
  } else {
    result.termination_reason = TerminationReason::step_budget;
  }
  trace.ok(loop.t, Actor::orchestrator, "run_end",
           {{"termination_reason", to_string(result.termination_reason)},
            {"enforced", enforced},
            {"steps_used", result.steps_used},
            {"aggregations_used", result.aggregations_used},
            {"stack_size", result.stack.size()}});
  result.trace = trace.events();
  return result;
}

RunResult run_task(const Task& task, const RunConfig& config, const Backends& backends) {
  TraceRecorder trace;
  return run_task(task, config, backends, trace);
}

std::string render_answer_prompt(const Task& task, const InfoStack& stack) {
  std::string passages;
  if (stack.empty()) {
    passages = kNothingAggregated;
  } else {
    for (std::size_t i = 0; i < stack.size(); ++i) {
      if (i > 0) passages += "\n";
      passages += "[" + std::to_string(i) + "] " + stack[i].text + " (source: " + stack[i].source_url + ")";
    }
  }
  return prompts::render(prompts::template_text(prompts::kAnswer),
                         {{"user_task", task.query}, {"aggregated_passages", passages}});
}

std::string answer(const Task& task, const InfoStack& stack, ModelBackend& model, const std::string& model_id) {
  return model.complete(model_id, Prompt(render_answer_prompt(task, stack)), ResponseMode::free_text);
}

RunResult solve(const Task& task, const RunConfig& config, const Backends& backends, TraceRecorder& trace) {
  RunResult result = run_task(task, config, backends, trace);
  if (result.termination_reason == TerminationReason::fatal_error) return result;
  try {
    result.answer = text::trim(answer(task, result.stack, *backends.model, config.model_for("answerer")));
    trace.ok(result.steps_used, Actor::orchestrator, "answer", {{"answer", *result.answer}});
  } catch (const BackendError& e) {
    trace.error(result.steps_used, Actor::orchestrator, "answer_failed", e.what());
  }
  result.trace = trace.events();
  return result;
}

}  // namespace infogent
