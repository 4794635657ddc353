#include "infogent/aggregator.hpp"

#include <cctype>

#include "infogent/prompts.hpp"
#include "infogent/text_util.hpp"

namespace infogent {

namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  void skip_ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(std::string_view token) {
    skip_ws();
    if (s_.substr(i_, token.size()) != token) return false;
    i_ += token.size();
    return true;
  }
  std::optional<std::size_t> number() {
    skip_ws();
    const std::size_t start = i_;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
    const std::size_t len = i_ - start;
    if (len == 0 || len > 9) return std::nullopt;
    return static_cast<std::size_t>(std::stoul(std::string(s_.substr(start, len))));
  }
  bool at_end() {
    skip_ws();
    return i_ == s_.size();
  }

 private:
  std::string_view s_;
  std::size_t i_ = 0;
};

constexpr std::string_view kDecisionCorrective =
    "\n\nYour previous response could not be parsed. Respond with only a JSON object with the keys "
    "\"thoughts\", \"actions\" and \"feedback\".";

}  // namespace

std::string StackAction::to_string() const {
  if (kind == Kind::add) return "ADD(" + std::to_string(provided_id) + ")";
  return "REPLACE(" + std::to_string(existing_id) + ", " + std::to_string(provided_id) + ")";
}

std::optional<StackAction> parse_stack_action(std::string_view s) {
  {
    Cursor c(s);
    if (c.eat("ADD") && c.eat("(")) {
      auto id = c.number();
      if (id && c.eat(")") && c.at_end()) return StackAction::add(*id);
      return std::nullopt;
    }
  }
  Cursor c(s);
  if (c.eat("REPLACE") && c.eat("(")) {
    auto existing = c.number();
    if (!existing || !c.eat(",")) return std::nullopt;
    auto provided = c.number();
    if (provided && c.eat(")") && c.at_end()) return StackAction::replace(*existing, *provided);
  }
  return std::nullopt;
}

AggregatorDecision parse_decision(std::string_view raw, std::vector<std::string>* dropped) {
  if (text::trim(raw).empty()) throw MalformedDecision("empty aggregator response");
  const auto obj = text::first_json_object(raw);
  if (!obj) throw MalformedDecision("no JSON object in aggregator response");
  json j;
  try {
    j = json::parse(*obj);
  } catch (const json::exception& e) {
    throw MalformedDecision(std::string("invalid JSON in aggregator response: ") + e.what());
  }
  if (!j.contains("actions") || !j["actions"].is_array()) throw MalformedDecision("missing \"actions\" list");
  if (!j.contains("feedback") || !j["feedback"].is_string()) throw MalformedDecision("missing \"feedback\" text");

  AggregatorDecision d;
  d.feedback_text = j["feedback"].get<std::string>();
  if (text::trim(d.feedback_text).empty()) throw MalformedDecision("empty feedback");
  if (j.contains("thoughts")) d.thoughts = j["thoughts"].is_string() ? j["thoughts"].get<std::string>() : j["thoughts"].dump();
  for (const auto& a : j["actions"]) {
    const std::string s = a.is_string() ? a.get<std::string>() : a.dump();
    if (auto parsed = parse_stack_action(s)) {
      d.actions.push_back(*parsed);
    } else if (dropped != nullptr) {
      dropped->push_back(s);
    }
  }
  return d;
}

InfoStack apply_actions(InfoStack stack, const std::vector<Passage>& provided,
                        const std::vector<StackAction>& actions, std::vector<SkippedAction>* skipped) {
  for (const auto& a : actions) {
    StackEdit result = StackEdit::out_of_range;
    if (a.provided_id < provided.size()) {
      const Passage& p = provided[a.provided_id];
      result = a.kind == StackAction::Kind::add ? stack.try_add(p) : stack.try_replace(a.existing_id, p);
    }
    if (result != StackEdit::applied && skipped != nullptr) skipped->push_back({a, result});
  }
  return stack;
}

std::string render_passage_listing(const std::vector<Passage>& passages) {
  if (passages.empty()) return "None";
  std::string out;
  for (std::size_t i = 0; i < passages.size(); ++i) {
    out += "\n[" + std::to_string(i) + "] " + passages[i].text + " (source: " + passages[i].source_url + ")";
  }
  return out;
}

std::string render_aggregator_prompt(AccessMode mode, const Task& task, const InfoStack& stack,
                                     const std::vector<Passage>& provided, int k, int max_aggregations) {
  const auto& tpl = prompts::template_text(mode == AccessMode::api ? prompts::kAggregatorApi
                                                                    : prompts::kAggregatorVisual);
  return prompts::render(tpl, {{"num_to_aggregate", std::to_string(stack.capacity())},
                               {"num_iterations", std::to_string(max_aggregations)},
                               {"counter", std::to_string(k)},
                               {"user_task", task.query},
                               {"aggregated_list", render_passage_listing(stack.items())},
                               {"provided_list", render_passage_listing(provided)}});
}

std::pair<InfoStack, Feedback> update(const InfoStack& stack, const std::vector<Passage>& provided, const Task& task,
                                      int k, int max_aggregations, AggregatorContext& ctx) {
  const int remaining = max_aggregations - k;
  if (provided.empty()) {
    ctx.trace.ok(ctx.t, Actor::aggregator, "skip_empty", {{"stack_size", stack.size()}});
    return {stack, Feedback{std::string(kNoRelevantInformation), remaining, false}};
  }

  const Prompt prompt(render_aggregator_prompt(ctx.mode, task, stack, provided, k, max_aggregations));
  std::vector<std::string> dropped;
  AggregatorDecision decision;
  try {
    try {
      decision = parse_decision(ctx.model.complete(ctx.model_id, prompt, ResponseMode::json), &dropped);
    } catch (const MalformedDecision& first) {
      ctx.trace.warning(ctx.t, Actor::aggregator, "parse_retry", {{"detail", first.what()}});
      Prompt retry = prompt;
      retry.parts.push_back(PromptPart::of_text(std::string(kDecisionCorrective)));
      dropped.clear();
      decision = parse_decision(ctx.model.complete(ctx.model_id, retry, ResponseMode::json), &dropped);
    }
  } catch (const MalformedDecision& e) {
    ctx.trace.error(ctx.t, Actor::aggregator, "malformed_decision", e.what());
    return {stack, Feedback{std::string(kAggregatorFailed), remaining, false}};
  }

  for (const auto& s : dropped) ctx.trace.warning(ctx.t, Actor::aggregator, "unknown_action", {{"action", s}});

  std::vector<SkippedAction> skipped;
  InfoStack next = apply_actions(stack, provided, decision.actions, &skipped);
  for (const auto& s : skipped) {
    ctx.trace.warning(ctx.t, Actor::aggregator, std::string(to_string(s.reason)), {{"action", s.action.to_string()}});
  }

  const bool terminate = text::contains_word_icase(decision.feedback_text, "terminate") || k + 1 >= max_aggregations;
  json applied = json::array();
  for (const auto& a : decision.actions) applied.push_back(a.to_string());
  ctx.trace.ok(ctx.t, Actor::aggregator, "update",
               {{"actions", applied},
                {"stack_size", next.size()},
                {"feedback", decision.feedback_text},
                {"thoughts", decision.thoughts},
                {"terminate_requested", terminate}});
  return {std::move(next), Feedback{decision.feedback_text, remaining, terminate}};
}

}  // namespace infogent
