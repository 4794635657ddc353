#include "infogent/navigator_visual.hpp"

#include <charconv>

#include "infogent/prompts.hpp"
#include "infogent/text_util.hpp"

namespace infogent {

namespace {

constexpr std::string_view kActionMenu =
    "Available actions: CLICK, SELECT, TYPE, PRESS ENTER, GO BACK, AGGREGATE INFORMATION, TERMINATE.\n"
    "If your next action is AGGREGATE INFORMATION, GO BACK or TERMINATE, end your response with a final line "
    "containing only that action.";

constexpr std::string_view kGroundingFormat =
    "Choose exactly one action from: CLICK, SELECT, TYPE, PRESS ENTER, GO BACK, AGGREGATE, TERMINATE. "
    "Issue only the first action even if the description mentions several.\n"
    "Reply in this format:\n"
    "ELEMENT: <candidate index, or None>\n"
    "ACTION: <action>\n"
    "VALUE: <text to type or option to select, or None>";

constexpr std::string_view kGroundingCorrective =
    "\n\nYour previous reply could not be used. Pick an ELEMENT index from the candidate list and one ACTION, "
    "in the format above.";

std::string value_of(std::string_view line) {
  const auto colon = line.find(':');
  return text::trim(line.substr(colon + 1));
}

std::optional<int> parse_index(std::string s) {
  s = text::trim(s);
  if (!s.empty() && s.front() == '[') s.erase(0, 1);
  if (!s.empty() && s.back() == ']') s.pop_back();
  s = text::trim(s);
  int v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr == s.data()) return std::nullopt;
  return v;
}

bool is_none(const std::string& v) { return v.empty() || text::to_lower(v) == "none"; }

}  // namespace

bool detect_loop(const std::vector<VisualNavAction>& actions, int window) {
  if (window < 2 || actions.size() < static_cast<std::size_t>(window)) return false;
  const auto& last = actions.back();
  for (std::size_t i = actions.size() - window; i < actions.size(); ++i) {
    if (!(actions[i] == last)) return false;
  }
  return true;
}

bool detect_loop(const std::vector<VisualHistoryEntry>& history, int window) {
  if (window < 2 || history.size() < static_cast<std::size_t>(window)) return false;
  std::vector<VisualNavAction> actions;
  for (auto it = history.end() - window; it != history.end(); ++it) {
    if (!it->action) return false;
    actions.push_back(*it->action);
  }
  return detect_loop(actions, window);
}

Prompt render_generation_prompt(const VisualObservation& obs, const Task& task, const Feedback& feedback,
                                const std::vector<VisualHistoryEntry>& history) {
  std::string out = prompts::template_text(prompts::kNavigatorVisual);
  out += "\n\nTask: " + task.query;
  out += "\nCurrent url: " + obs.url;
  out += "\n\nPrevious actions:\n";
  if (history.empty()) out += "None\n";
  for (std::size_t i = 0; i < history.size(); ++i) {
    out += std::to_string(i + 1) + ". " + (history[i].action ? history[i].action->to_string() : "no action");
    if (history[i].outcome != "ok") out += " (" + history[i].outcome + ")";
    out += "\n";
  }
  out += "\nAggregator feedback: " + feedback.text + "\n";
  out += "Aggregate iterations left: " + std::to_string(feedback.iterations_remaining) + "\n";
  if (feedback.terminate_requested) out += "The aggregator asked to terminate: issue TERMINATE now.\n";
  if (detect_loop(history)) {
    out += "\nReplanning notice: the last 3 actions were identical (" + history.back().action->to_string() +
           "). That approach is not working; choose a different action.\n";
  }
  out += "\n";
  out += kActionMenu;
  Prompt p(std::move(out));
  if (!obs.screenshot.image.empty()) p.parts.push_back(PromptPart::of_image(obs.screenshot.image));
  return p;
}

std::string generate_action_description(const VisualObservation& obs, const Task& task, const Feedback& feedback,
                                        const std::vector<VisualHistoryEntry>& history, VisualNavigatorContext& ctx) {
  if (detect_loop(history)) {
    ctx.trace.warning(ctx.t, Actor::navigator, "loop_detected", {{"action", history.back().action->to_string()}});
  }
  return ctx.model.complete(ctx.model_id, render_generation_prompt(obs, task, feedback, history),
                            ResponseMode::free_text);
}

std::optional<VisualNavAction> direct_action(std::string_view description) {
  const auto lines = text::split_lines(description);
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    std::string n = text::normalize(*it);
    if (n.empty()) continue;
    if (n.starts_with("action ")) n.erase(0, 7);
    if (n == "aggregate" || n == "aggregate information") return VisualNavAction::aggregate();
    if (n == "terminate") return VisualNavAction::terminate();
    if (n == "go back") return VisualNavAction::go_back();
    return std::nullopt;
  }
  return std::nullopt;
}

std::string render_grounding_prompt(std::string_view description, const VisualObservation& obs, const Task& task) {
  std::string out = "Task: " + task.query + "\n\nNext action description:\n" + std::string(description) +
                    "\n\nCandidate elements on the current page:\n";
  if (obs.candidates.empty()) out += "None\n";
  for (const auto& c : obs.candidates) {
    out += "[" + std::to_string(c.index) + "] " + std::string(to_string(c.role)) + ": " + c.label;
    if (!c.in_viewport) out += " (below the visible area)";
    out += "\n";
  }
  out += "\n";
  out += kGroundingFormat;
  return out;
}

VisualNavAction parse_grounding(std::string_view raw, const VisualObservation& obs) {
  std::optional<std::string> element, action, value;
  for (const auto& line : text::split_lines(raw)) {
    const std::string l = text::trim(line);
    if (text::starts_with_icase(l, "ELEMENT:")) {
      if (action) break;  // start of a second block
      element = value_of(l);
    } else if (text::starts_with_icase(l, "ACTION:")) {
      if (action) break;
      action = value_of(l);
    } else if (text::starts_with_icase(l, "VALUE:")) {
      if (action && !value) value = value_of(l);
    }
  }
  if (!action) throw GroundingFailure("no ACTION line in grounding reply");

  // First word group only: "CLICK then TYPE" grounds to CLICK.
  const std::string verb = text::normalize(*action);
  auto word_is = [&](std::string_view w) { return verb == w || verb.starts_with(std::string(w) + " "); };

  VisualNavAction out;
  if (word_is("press enter") || word_is("enter") || word_is("press")) {
    return VisualNavAction::press_enter();
  } else if (word_is("go back") || word_is("back")) {
    return VisualNavAction::go_back();
  } else if (word_is("aggregate")) {
    return VisualNavAction::aggregate();
  } else if (word_is("terminate")) {
    return VisualNavAction::terminate();
  } else if (word_is("click")) {
    out = VisualNavAction::click(-1);
  } else if (word_is("select")) {
    out = VisualNavAction::select(-1, std::nullopt);
  } else if (word_is("type")) {
    out = VisualNavAction::type(-1, {});
  } else if (word_is("scroll")) {
    throw GroundingFailure("scrolling is not an allowed action");
  } else {
    throw GroundingFailure("unknown action \"" + *action + "\"");
  }

  const auto idx = element ? parse_index(*element) : std::nullopt;
  if (!idx) throw GroundingFailure("action " + out.name() + " needs an ELEMENT index");
  bool known = false;
  for (const auto& c : obs.candidates) known = known || c.index == *idx;
  if (!known) throw GroundingFailure("element " + std::to_string(*idx) + " is not a candidate");
  out.element = *idx;

  const std::string v = value ? *value : std::string();
  if (out.kind == VisualNavAction::Kind::type) {
    if (is_none(v)) throw GroundingFailure("TYPE needs a VALUE");
    out.text = v;
  } else if (out.kind == VisualNavAction::Kind::select && !is_none(v)) {
    out.option = v;
  }
  return out;
}

VisualNavAction ground_action(std::string_view description, const VisualObservation& obs, const Task& task,
                              VisualNavigatorContext& ctx) {
  const Prompt prompt(render_grounding_prompt(description, obs, task));
  try {
    return parse_grounding(ctx.model.complete(ctx.model_id, prompt, ResponseMode::free_text), obs);
  } catch (const GroundingFailure& first) {
    ctx.trace.warning(ctx.t, Actor::navigator, "grounding_retry", {{"detail", first.what()}});
  }
  Prompt retry = prompt;
  retry.parts.push_back(PromptPart::of_text(std::string(kGroundingCorrective)));
  return parse_grounding(ctx.model.complete(ctx.model_id, retry, ResponseMode::free_text), obs);
}

}  // namespace infogent
