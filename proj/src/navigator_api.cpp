#include "infogent/navigator_api.hpp"

#include <algorithm>

#include "infogent/prompts.hpp"
#include "infogent/text_util.hpp"

namespace infogent {

namespace {

constexpr std::string_view kToolProtocol =
    "Tools:\n"
    "- search(query): search the web; returns the top results as (url, snippet) pairs.\n"
    "- aggregate(url): the \"extract\" tool; extracts information from a url taken from the latest search results "
    "and passes it to the aggregator assistant, which replies with feedback.\n"
    "- terminate(message): stop when aggregation is done.\n"
    "\n"
    "Respond with exactly one JSON object and nothing else:\n"
    "{\"thought\": \"<your reasoning>\", \"tool\": \"search\" | \"aggregate\" | \"terminate\", "
    "\"argument\": \"<query, url or final message>\"}";

std::string render_entry(std::size_t n, const ApiHistoryEntry& e) {
  std::string out = "Step " + std::to_string(n) + ":\n";
  if (!e.action.thought.empty()) out += "Thought: " + e.action.thought + "\n";
  out += "Action: " + e.action.to_string() + "\n";
  out += "Observation: " + e.digest + "\n";
  return out;
}

}  // namespace

std::string ApiNavAction::name() const {
  switch (kind) {
    case Kind::search: return "SEARCH";
    case Kind::aggregate: return "AGGREGATE";
    case Kind::terminate: return "TERMINATE";
  }
  return "TERMINATE";
}

std::string ApiNavAction::to_string() const {
  std::string tool = kind == Kind::search ? "search" : kind == Kind::aggregate ? "aggregate" : "terminate";
  return tool + "(" + json(argument).dump() + ")";
}

json ApiNavAction::to_json() const {
  return {{"action", name()}, {"argument", argument}, {"thought", thought}};
}

ApiNavState initial_api_state(Task task, int max_aggregations) {
  ApiNavState s;
  s.task = std::move(task);
  s.feedback = Feedback::initial(max_aggregations);
  return s;
}

NavigatorReply parse_tool_call(std::string_view raw) {
  const std::string trimmed = text::trim(raw);
  if (trimmed.empty()) throw NavigationParseFailure("empty navigator response");
  if (trimmed.find('{') == std::string::npos) return FinalMessage{trimmed};

  const auto obj = text::first_json_object(trimmed);
  if (!obj) throw NavigationParseFailure("unbalanced JSON in navigator response");
  json j;
  try {
    j = json::parse(*obj);
  } catch (const json::exception& e) {
    throw NavigationParseFailure(std::string("invalid JSON in navigator response: ") + e.what());
  }
  if (!j.contains("tool") || !j["tool"].is_string()) throw NavigationParseFailure("missing \"tool\"");
  ToolCall call;
  call.tool = text::to_lower(text::trim(j["tool"].get<std::string>()));
  if (call.tool != "search" && call.tool != "aggregate" && call.tool != "terminate") {
    throw NavigationParseFailure("unknown tool \"" + call.tool + "\"");
  }
  if (j.contains("argument") && j["argument"].is_string()) {
    call.argument = text::trim(j["argument"].get<std::string>());
  } else if (j.contains("argument") && !j["argument"].is_null()) {
    throw NavigationParseFailure("\"argument\" must be a string");
  }
  if (j.contains("thought") && j["thought"].is_string()) call.thought = j["thought"].get<std::string>();
  if (call.tool == "search" && call.argument.empty()) throw NavigationParseFailure("search needs a query");
  if (call.tool == "aggregate" && !text::is_absolute_url(call.argument)) {
    throw NavigationParseFailure("aggregate needs an absolute url, got \"" + call.argument + "\"");
  }
  return call;
}

std::string render_api_navigator_prompt(const ApiNavState& state, std::size_t max_history_chars,
                                        const std::vector<std::string>& notices, std::size_t* omitted_entries) {
  std::string out = prompts::render(prompts::template_text(prompts::kNavigatorApi), {{"user_task", state.task.query}});
  out += "\n\n";
  out += kToolProtocol;

  // Oldest entries are dropped first when the history exceeds the budget.
  std::vector<std::string> rendered;
  for (std::size_t i = 0; i < state.history.size(); ++i) rendered.push_back(render_entry(i + 1, state.history[i]));
  std::size_t first = 0;
  std::size_t total = 0;
  for (const auto& r : rendered) total += r.size();
  while (first < rendered.size() && total > max_history_chars) total -= rendered[first++].size();
  if (omitted_entries != nullptr) *omitted_entries = first;

  out += "\n\nHistory:\n";
  if (rendered.empty()) {
    out += "None\n";
  } else {
    if (first > 0) out += "(" + std::to_string(first) + " earlier steps omitted)\n";
    for (std::size_t i = first; i < rendered.size(); ++i) out += rendered[i];
  }
  if (!state.visited.empty()) {
    out += "\nAlready visited:\n";
    for (const auto& u : state.visited) out += "- " + u + "\n";
  }
  out += "\nAggregator feedback: " + state.feedback.text + "\n";
  out += "Extract iterations left: " + std::to_string(state.feedback.iterations_remaining);
  if (state.feedback.terminate_requested) out += "\nThe aggregator asked to terminate: call terminate now.";
  for (const auto& n : notices) out += "\n\n" + n;
  return out;
}

ApiNavAction next_action(const ApiNavState& state, ApiNavigatorContext& ctx) {
  std::vector<std::string> notices;
  std::set<std::string> used;  // violation types already re-asked this turn

  auto violation = [&](const std::string& type, std::string notice, json detail) -> std::optional<ApiNavAction> {
    ctx.trace.warning(ctx.t, Actor::navigator, type, std::move(detail));
    if (!used.insert(type).second) return ApiNavAction::terminate(type == "parse_failure" ? "parse failure" : type);
    notices.push_back(std::move(notice));
    return std::nullopt;
  };

  for (;;) {
    std::size_t omitted = 0;
    const std::string prompt = render_api_navigator_prompt(state, ctx.max_history_chars, notices, &omitted);
    if (omitted > 0 && notices.empty()) {
      ctx.trace.warning(ctx.t, Actor::navigator, "history_truncated", {{"omitted", omitted}});
    }
    const std::string raw = ctx.model.complete(ctx.model_id, Prompt(prompt), ResponseMode::free_text);

    NavigatorReply reply;
    try {
      reply = parse_tool_call(raw);
    } catch (const NavigationParseFailure& e) {
      if (auto stop = violation("parse_failure",
                                "Notice: your previous response could not be parsed (" + std::string(e.what()) +
                                    "). Reply with exactly one JSON object as described above.",
                                {{"detail", e.what()}})) {
        return *stop;
      }
      continue;
    }

    if (const auto* fin = std::get_if<FinalMessage>(&reply)) return ApiNavAction::terminate(fin->text);
    const auto& call = std::get<ToolCall>(reply);
    if (call.tool == "search") return ApiNavAction::search(call.argument, call.thought);
    if (call.tool == "terminate") return ApiNavAction::terminate(call.argument, call.thought);

    if (state.visited.contains(call.argument)) {
      if (auto stop = violation("already_visited",
                                "Observation: " + call.argument +
                                    " was already visited. Choose a different url from the search results or search "
                                    "again.",
                                {{"url", call.argument}})) {
        return *stop;
      }
      continue;
    }
    const bool in_results = std::any_of(state.last_results.begin(), state.last_results.end(),
                                        [&](const SearchResult& r) { return r.url == call.argument; });
    if (!in_results) {
      if (auto stop = violation("not_in_results",
                                "Observation: " + call.argument +
                                    " is not among the latest search results. Aggregate a url from the latest results "
                                    "or search again.",
                                {{"url", call.argument}})) {
        return *stop;
      }
      continue;
    }
    return ApiNavAction::aggregate(call.argument, call.thought);
  }
}

std::string search_digest(const std::vector<SearchResult>& results, const std::vector<SearchResult>& previous) {
  if (results.empty()) return "no results; revise the query";
  std::string out;
  if (results == previous) out += "same results as the previous search; consider a different query. ";
  out += std::to_string(results.size()) + " results:";
  for (const auto& r : results) out += "\n" + r.url + " — " + r.snippet;
  return out;
}

ApiNavState observe_search(ApiNavState state, const ApiNavAction& action, std::vector<SearchResult> results) {
  state.history.push_back({action, search_digest(results, state.last_results)});
  state.last_results = std::move(results);
  return state;
}

ApiNavState observe_search_failure(ApiNavState state, const ApiNavAction& action, std::string_view error) {
  state.history.push_back({action, "search failed (" + std::string(error) + "); try again or revise the query"});
  return state;
}

ApiNavState observe_aggregate(ApiNavState state, const ApiNavAction& action, Feedback feedback) {
  state.visited.insert(action.argument);
  state.history.push_back({action, "aggregator feedback: " + feedback.text});
  state.feedback = std::move(feedback);
  return state;
}

ApiNavState observe_terminate(ApiNavState state, const ApiNavAction& action) {
  state.history.push_back({action, "navigation terminated"});
  return state;
}

}  // namespace infogent
