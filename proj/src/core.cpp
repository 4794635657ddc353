#include "infogent/core.hpp"

#include <algorithm>

#include "infogent/text_util.hpp"

namespace infogent {

std::string_view to_string(AccessMode mode) {
  return mode == AccessMode::api ? "api" : "visual";
}

AccessMode access_mode_from_string(std::string_view s) {
  if (s == "api") return AccessMode::api;
  if (s == "visual") return AccessMode::visual;
  throw ConfigError("unknown access mode '" + std::string(s) + "' (expected api or visual)");
}

Task make_task(std::string id, std::string query, AccessMode mode, std::optional<std::string> gold_answer) {
  if (text::trim(query).empty()) throw std::invalid_argument("task query is empty");
  return Task{std::move(id), std::move(query), mode, std::move(gold_answer)};
}

Passage make_passage(std::string text, std::string source_url, int step) {
  if (text.empty()) throw std::invalid_argument("passage text is empty");
  if (!text::is_absolute_url(source_url)) {
    throw std::invalid_argument("passage source url is not absolute: " + source_url);
  }
  if (step < 0) throw std::invalid_argument("passage step is negative");
  return Passage{std::move(text), std::move(source_url), step};
}

std::string_view to_string(StackEdit edit) {
  switch (edit) {
    case StackEdit::applied: return "applied";
    case StackEdit::capacity: return "capacity";
    case StackEdit::duplicate: return "duplicate";
    case StackEdit::out_of_range: return "out_of_range";
  }
  return "unknown";
}

InfoStack::InfoStack(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ConfigError("capacity must be positive");
}

InfoStack::InfoStack(std::size_t capacity, std::vector<Passage> items) : InfoStack(capacity) {
  if (items.size() > capacity_) throw std::invalid_argument("stack items exceed capacity");
  for (auto& p : items) {
    if (contains(p)) throw std::invalid_argument("duplicate passage in stack");
    items_.push_back(std::move(p));
  }
}

bool InfoStack::contains(const Passage& p) const {
  return std::any_of(items_.begin(), items_.end(), [&](const Passage& q) { return q.same_content(p); });
}

StackEdit InfoStack::try_add(const Passage& p) {
  if (full()) return StackEdit::capacity;
  if (contains(p)) return StackEdit::duplicate;
  items_.push_back(p);
  return StackEdit::applied;
}

StackEdit InfoStack::try_replace(std::size_t slot, const Passage& p) {
  if (slot >= items_.size()) return StackEdit::out_of_range;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (i != slot && items_[i].same_content(p)) return StackEdit::duplicate;
  }
  items_[slot] = p;
  return StackEdit::applied;
}

RunConfig RunConfig::defaults(AccessMode mode) {
  RunConfig c;
  if (mode == AccessMode::visual) {
    c.N = 20;
    c.max_passages_per_page = 4;
  }
  return c;
}

std::string RunConfig::model_for(std::string_view component) const {
  if (auto it = component_models.find(std::string(component)); it != component_models.end()) {
    return it->second;
  }
  if (component == "answerer") return model_for("navigator");
  if (auto it = component_models.find("default"); it != component_models.end()) return it->second;
  return "default";
}

RunConfig validate_config(RunConfig config) {
  if (config.K <= 0) throw ConfigError("K must be positive");
  if (config.N <= 0) throw ConfigError("N must be positive");
  if (config.K > config.N) throw ConfigError("K exceeds N");
  if (config.capacity <= 0) throw ConfigError("capacity must be positive");
  if (config.max_passages_per_page <= 0) throw ConfigError("max_passages_per_page must be positive");
  if (config.max_page_chars <= 0) throw ConfigError("max_page_chars must be positive");
  if (config.max_screenshots <= 0) throw ConfigError("max_screenshots must be positive");
  if (config.domain_filter && text::trim(*config.domain_filter).empty()) {
    throw ConfigError("domain_filter must not be blank");
  }
  return config;
}

void to_json(json& j, const RunConfig& c) {
  j = json{{"K", c.K},
           {"N", c.N},
           {"capacity", c.capacity},
           {"max_passages_per_page", c.max_passages_per_page},
           {"domain_filter", c.domain_filter ? json(*c.domain_filter) : json(nullptr)},
           {"component_models", c.component_models},
           {"random_seed", c.random_seed},
           {"max_page_chars", c.max_page_chars},
           {"max_screenshots", c.max_screenshots}};
}

void merge_config_json(const json& j, RunConfig& c) {
  if (!j.is_object()) throw ConfigError("config document must be a JSON object");
  auto read_int = [&](const char* key, int& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer()) throw ConfigError(std::string(key) + " must be an integer");
    out = j[key].get<int>();
  };
  read_int("K", c.K);
  read_int("N", c.N);
  read_int("capacity", c.capacity);
  read_int("max_passages_per_page", c.max_passages_per_page);
  read_int("max_page_chars", c.max_page_chars);
  read_int("max_screenshots", c.max_screenshots);
  if (j.contains("random_seed")) {
    if (!j["random_seed"].is_number_integer()) throw ConfigError("random_seed must be an integer");
    c.random_seed = j["random_seed"].get<std::int64_t>();
  }
  if (j.contains("domain_filter")) {
    const auto& d = j["domain_filter"];
    if (d.is_null()) {
      c.domain_filter.reset();
    } else if (d.is_string()) {
      c.domain_filter = d.get<std::string>();
    } else {
      throw ConfigError("domain_filter must be a string or null");
    }
  }
  if (j.contains("component_models")) {
    const auto& m = j["component_models"];
    if (!m.is_object()) throw ConfigError("component_models must be an object");
    for (const auto& [k, v] : m.items()) {
      if (!v.is_string()) throw ConfigError("component_models." + k + " must be a string");
      c.component_models[k] = v.get<std::string>();
    }
  }
}

std::string_view to_string(Actor a) {
  switch (a) {
    case Actor::navigator: return "navigator";
    case Actor::extractor: return "extractor";
    case Actor::aggregator: return "aggregator";
    case Actor::orchestrator: return "orchestrator";
  }
  return "orchestrator";
}

std::string_view to_string(Outcome o) {
  return o == Outcome::ok ? "ok" : "error";
}

Actor actor_from_string(std::string_view s) {
  if (s == "navigator") return Actor::navigator;
  if (s == "extractor") return Actor::extractor;
  if (s == "aggregator") return Actor::aggregator;
  if (s == "orchestrator") return Actor::orchestrator;
  throw std::invalid_argument("unknown actor: " + std::string(s));
}

Outcome outcome_from_string(std::string_view s) {
  if (s == "ok") return Outcome::ok;
  if (s == "error") return Outcome::error;
  throw std::invalid_argument("unknown outcome: " + std::string(s));
}

std::string_view to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::navigator_terminate: return "navigator_terminate";
    case TerminationReason::aggregate_budget: return "aggregate_budget";
    case TerminationReason::step_budget: return "step_budget";
    case TerminationReason::fatal_error: return "fatal_error";
  }
  return "fatal_error";
}

TerminationReason termination_reason_from_string(std::string_view s) {
  if (s == "navigator_terminate") return TerminationReason::navigator_terminate;
  if (s == "aggregate_budget") return TerminationReason::aggregate_budget;
  if (s == "step_budget") return TerminationReason::step_budget;
  if (s == "fatal_error") return TerminationReason::fatal_error;
  throw std::invalid_argument("unknown termination reason: " + std::string(s));
}

}  // namespace infogent
