#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "infogent/core.hpp"
#include "infogent/model.hpp"
#include "infogent/trace.hpp"

namespace infogent {

struct StackAction {
  enum class Kind { add, replace };

  Kind kind = Kind::add;
  std::size_t existing_id = 0;  // REPLACE only
  std::size_t provided_id = 0;

  static StackAction add(std::size_t provided) { return {Kind::add, 0, provided}; }
  static StackAction replace(std::size_t existing, std::size_t provided) { return {Kind::replace, existing, provided}; }

  /// Canonical spelling: ADD(1) or REPLACE(0, 2).
  std::string to_string() const;
  friend bool operator==(const StackAction&, const StackAction&) = default;
};

/// Parses one action string. Accepts ADD(d) and REPLACE(d, d) with optional
/// whitespace around tokens; anything else yields nullopt.
std::optional<StackAction> parse_stack_action(std::string_view s);

struct AggregatorDecision {
  std::string thoughts;
  std::vector<StackAction> actions;
  std::string feedback_text;
};

/// Reads the first balanced JSON object of `raw`. "actions" and a non-empty
/// "feedback" are required; "thoughts" defaults to empty. Action strings that
/// do not match the grammar are dropped and reported through `dropped`.
/// Throws MalformedDecision.
AggregatorDecision parse_decision(std::string_view raw, std::vector<std::string>* dropped = nullptr);

struct SkippedAction {
  StackAction action;
  StackEdit reason;
};

/// Applies actions left to right. Invalid indices, a full stack and
/// duplicate passages skip the action; nothing here throws.
InfoStack apply_actions(InfoStack stack, const std::vector<Passage>& provided,
                        const std::vector<StackAction>& actions, std::vector<SkippedAction>* skipped = nullptr);

/// "[id] text (source: url)" per line; "None" for an empty list.
std::string render_passage_listing(const std::vector<Passage>& passages);

inline constexpr std::string_view kNoRelevantInformation =
    "The page contained no relevant information; try a different source or query.";
inline constexpr std::string_view kAggregatorFailed =
    "The aggregator could not process the passages from this page; continue with a different source.";

struct AggregatorContext {
  ModelBackend& model;
  std::string model_id;
  TraceRecorder& trace;
  int t = 0;
  AccessMode mode = AccessMode::api;
};

std::string render_aggregator_prompt(AccessMode mode, const Task& task, const InfoStack& stack,
                                     const std::vector<Passage>& provided, int k, int max_aggregations);

/// One aggregation step. `k` is the number of aggregations completed before
/// this one and `max_aggregations` is K.
std::pair<InfoStack, Feedback> update(const InfoStack& stack, const std::vector<Passage>& provided, const Task& task,
                                      int k, int max_aggregations, AggregatorContext& ctx);

}  // namespace infogent
