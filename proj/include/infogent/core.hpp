#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace infogent {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Model transport problems. The orchestrator treats any of these as fatal
/// for the current run.
class BackendError : public Error {
 public:
  using Error::Error;
};

class BackendUnavailable : public BackendError {
 public:
  using BackendError::BackendError;
};

class ScriptExhausted : public BackendError {
 public:
  using BackendError::BackendError;
};

class FatalBackendError : public BackendError {
 public:
  using BackendError::BackendError;
};

class SearchFailure : public Error {
 public:
  using Error::Error;
};

class FetchFailure : public Error {
 public:
  using Error::Error;
};

class StaleElement : public Error {
 public:
  using Error::Error;
};

class NavigationTimeout : public Error {
 public:
  using Error::Error;
};

class ExtractionParseFailure : public Error {
 public:
  using Error::Error;
};

class MalformedDecision : public Error {
 public:
  using Error::Error;
};

class NavigationParseFailure : public Error {
 public:
  using Error::Error;
};

class GroundingFailure : public Error {
 public:
  using Error::Error;
};

class JudgeParseFailure : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

enum class AccessMode { api, visual };

std::string_view to_string(AccessMode mode);
AccessMode access_mode_from_string(std::string_view s);

struct Task {
  std::string id;
  std::string query;
  AccessMode access_mode = AccessMode::api;
  std::optional<std::string> gold_answer;
};

/// Builds a task, rejecting a query that is blank after trimming.
Task make_task(std::string id, std::string query, AccessMode mode,
               std::optional<std::string> gold_answer = std::nullopt);

struct Passage {
  std::string text;
  std::string source_url;
  int step_extracted = 0;

  bool same_content(const Passage& other) const {
    return text == other.text && source_url == other.source_url;
  }
  friend bool operator==(const Passage&, const Passage&) = default;
};

/// Throws std::invalid_argument when text is empty, the url is not an
/// absolute url, or the step is negative.
Passage make_passage(std::string text, std::string source_url, int step);

enum class StackEdit { applied, capacity, duplicate, out_of_range };

std::string_view to_string(StackEdit edit);

/// Bounded, ordered store of aggregated passages. Only grows through
/// try_add and is only rewritten in place through try_replace.
class InfoStack {
 public:
  explicit InfoStack(std::size_t capacity);
  InfoStack(std::size_t capacity, std::vector<Passage> items);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  bool full() const { return items_.size() >= capacity_; }
  const std::vector<Passage>& items() const { return items_; }
  const Passage& operator[](std::size_t i) const { return items_.at(i); }

  bool contains(const Passage& p) const;

  StackEdit try_add(const Passage& p);
  StackEdit try_replace(std::size_t slot, const Passage& p);

  friend bool operator==(const InfoStack&, const InfoStack&) = default;

 private:
  std::size_t capacity_;
  std::vector<Passage> items_;
};

inline constexpr std::string_view kNoFeedback = "None";

struct Feedback {
  std::string text{kNoFeedback};
  int iterations_remaining = 0;
  bool terminate_requested = false;

  static Feedback initial(int max_aggregations) {
    return Feedback{std::string(kNoFeedback), max_aggregations, false};
  }
  friend bool operator==(const Feedback&, const Feedback&) = default;
};

struct RunConfig {
  int K = 5;   // max aggregate invocations
  int N = 15;  // max navigator timesteps
  int capacity = 5;
  int max_passages_per_page = 2;
  std::optional<std::string> domain_filter;
  std::map<std::string, std::string> component_models;
  std::int64_t random_seed = 0;
  int max_page_chars = 24000;
  int max_screenshots = 10;

  static RunConfig defaults(AccessMode mode);

  /// Model identifier for a component. "answerer" falls back to the
  /// navigator's model; everything else falls back to "default".
  std::string model_for(std::string_view component) const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

RunConfig validate_config(RunConfig config);

void to_json(json& j, const RunConfig& c);
/// Fields absent from the document keep the values already in `c`.
void merge_config_json(const json& j, RunConfig& c);

// ---------------------------------------------------------------------------
// Trace model
// ---------------------------------------------------------------------------

enum class Actor { navigator, extractor, aggregator, orchestrator };
enum class Outcome { ok, error };

std::string_view to_string(Actor a);
std::string_view to_string(Outcome o);
Actor actor_from_string(std::string_view s);
Outcome outcome_from_string(std::string_view s);

struct TraceEvent {
  int t = 0;
  Actor actor = Actor::orchestrator;
  std::string kind;
  json payload = json::object();
  Outcome outcome = Outcome::ok;
  std::optional<std::string> error_detail;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

enum class TerminationReason { navigator_terminate, aggregate_budget, step_budget, fatal_error };

std::string_view to_string(TerminationReason r);
TerminationReason termination_reason_from_string(std::string_view s);

struct RunResult {
  InfoStack stack{1};
  std::optional<std::string> answer;
  std::vector<TraceEvent> trace;
  int steps_used = 0;
  int aggregations_used = 0;
  TerminationReason termination_reason = TerminationReason::step_budget;
};

}  // namespace infogent
