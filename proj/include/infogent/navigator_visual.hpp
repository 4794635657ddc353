#pragma once

#include <optional>
#include <string>
#include <vector>

#include "infogent/browser.hpp"
#include "infogent/core.hpp"
#include "infogent/model.hpp"
#include "infogent/trace.hpp"

namespace infogent {

struct VisualObservation {
  std::string url;
  Screenshot screenshot;
  std::vector<ElementCandidate> candidates;
};

struct VisualHistoryEntry {
  std::string description;
  std::optional<VisualNavAction> action;  // empty when grounding failed
  std::string outcome;                    // "ok" or a short error note
};

struct VisualNavigatorContext {
  ModelBackend& model;
  std::string model_id;
  TraceRecorder& trace;
  int t = 0;
};

/// True when the last `window` actions exist and are all identical. A turn
/// without an action breaks the run.
bool detect_loop(const std::vector<VisualNavAction>& actions, int window = 3);
bool detect_loop(const std::vector<VisualHistoryEntry>& history, int window = 3);

/// Generation prompt: guidance, task, prior actions, the aggregator feedback
/// and (when a loop is detected) a replanning notice, followed by the
/// current screenshot.
Prompt render_generation_prompt(const VisualObservation& obs, const Task& task, const Feedback& feedback,
                                const std::vector<VisualHistoryEntry>& history);

std::string generate_action_description(const VisualObservation& obs, const Task& task, const Feedback& feedback,
                                        const std::vector<VisualHistoryEntry>& history, VisualNavigatorContext& ctx);

/// AGGREGATE, TERMINATE and GO BACK need no grounding: when the last
/// non-empty line of the description names one of them it maps directly.
std::optional<VisualNavAction> direct_action(std::string_view description);

std::string render_grounding_prompt(std::string_view description, const VisualObservation& obs, const Task& task);

/// Reads "ELEMENT: n / ACTION: X / VALUE: v". Only the first action block
/// counts. Throws GroundingFailure when the action is unknown or its element
/// is not among the candidates.
VisualNavAction parse_grounding(std::string_view raw, const VisualObservation& obs);

/// One grounding call plus one corrective retry, then GroundingFailure.
VisualNavAction ground_action(std::string_view description, const VisualObservation& obs, const Task& task,
                              VisualNavigatorContext& ctx);

}  // namespace infogent
