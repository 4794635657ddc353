#pragma once

#include <set>
#include <string>
#include <variant>
#include <vector>

#include "infogent/core.hpp"
#include "infogent/model.hpp"
#include "infogent/trace.hpp"
#include "infogent/web.hpp"

namespace infogent {

struct ApiNavAction {
  enum class Kind { search, aggregate, terminate };

  Kind kind = Kind::terminate;
  std::string argument;  // query, url or final message
  std::string thought;

  static ApiNavAction search(std::string q, std::string thought = {}) {
    return {Kind::search, std::move(q), std::move(thought)};
  }
  static ApiNavAction aggregate(std::string url, std::string thought = {}) {
    return {Kind::aggregate, std::move(url), std::move(thought)};
  }
  static ApiNavAction terminate(std::string message, std::string thought = {}) {
    return {Kind::terminate, std::move(message), std::move(thought)};
  }

  /// SEARCH, AGGREGATE or TERMINATE.
  std::string name() const;
  /// e.g. search("fubo ipo year")
  std::string to_string() const;
  json to_json() const;

  friend bool operator==(const ApiNavAction&, const ApiNavAction&) = default;
};

struct ApiHistoryEntry {
  ApiNavAction action;
  std::string digest;
};

struct ApiNavState {
  Task task;
  Feedback feedback;
  std::vector<ApiHistoryEntry> history;
  std::vector<SearchResult> last_results;
  std::set<std::string> visited;
};

ApiNavState initial_api_state(Task task, int max_aggregations);

/// A model turn is either a tool call or a plain closing message.
struct ToolCall {
  std::string thought;
  std::string tool;
  std::string argument;
};
struct FinalMessage {
  std::string text;
};
using NavigatorReply = std::variant<ToolCall, FinalMessage>;

/// Parses a navigator reply. Text without any '{' is a final message; a JSON
/// object must carry "tool" in {search, aggregate, terminate} and a string
/// "argument". Throws NavigationParseFailure otherwise.
NavigatorReply parse_tool_call(std::string_view raw);

struct ApiNavigatorContext {
  ModelBackend& model;
  std::string model_id;
  TraceRecorder& trace;
  int t = 0;
  std::size_t max_history_chars = 24000;
};

/// Full navigator prompt: the system instructions, the tool protocol, the
/// (possibly truncated) history, the latest aggregator feedback and any
/// corrective notices for this turn.
std::string render_api_navigator_prompt(const ApiNavState& state, std::size_t max_history_chars,
                                        const std::vector<std::string>& notices = {},
                                        std::size_t* omitted_entries = nullptr);

/// Asks the model for one tool invocation. AGGREGATE of a visited url or a
/// url outside the latest results is never returned: each violation type
/// gets one corrective re-ask, after which the turn becomes TERMINATE.
ApiNavAction next_action(const ApiNavState& state, ApiNavigatorContext& ctx);

std::string search_digest(const std::vector<SearchResult>& results, const std::vector<SearchResult>& previous);

ApiNavState observe_search(ApiNavState state, const ApiNavAction& action, std::vector<SearchResult> results);
ApiNavState observe_search_failure(ApiNavState state, const ApiNavAction& action, std::string_view error);
/// Records an aggregation turn: the url joins `visited`, the feedback
/// replaces the previous one, and last_results stay untouched.
ApiNavState observe_aggregate(ApiNavState state, const ApiNavAction& action, Feedback feedback);
ApiNavState observe_terminate(ApiNavState state, const ApiNavAction& action);

}  // namespace infogent
