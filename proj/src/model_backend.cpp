#include <cstdlib>

#include "infogent/http.hpp"
#include "infogent/model.hpp"
#include "infogent/text_util.hpp"

namespace infogent {

bool Prompt::empty() const {
  for (const auto& p : parts) {
    if (p.kind == PromptPart::Kind::image && !p.image.empty()) return false;
    if (p.kind == PromptPart::Kind::text && !p.text.empty()) return false;
  }
  return true;
}

bool Prompt::has_images() const {
  return image_count() > 0;
}

std::size_t Prompt::image_count() const {
  std::size_t n = 0;
  for (const auto& p : parts) n += p.kind == PromptPart::Kind::image ? 1 : 0;
  return n;
}

std::string Prompt::text() const {
  std::string out;
  for (const auto& p : parts) {
    if (p.kind == PromptPart::Kind::text) out += p.text;
  }
  return out;
}

std::string prompt_fingerprint(const Prompt& prompt) {
  std::string material;
  for (const auto& p : prompt.parts) {
    if (p.kind == PromptPart::Kind::text) {
      material += "T:";
      material += p.text;
    } else {
      material += "I:" + p.mime_type + ":";
      material.append(p.image.begin(), p.image.end());
    }
    material.push_back('\x1f');
  }
  return text::hex64(text::fnv1a64(material));
}

void check_model_request(const ModelBackend& backend, const std::string& model, const Prompt& prompt) {
  if (prompt.empty()) throw std::invalid_argument("model prompt is empty");
  if (prompt.has_images() && !backend.supports_images(model)) {
    throw std::invalid_argument("model '" + model + "' does not accept image parts");
  }
}

// ---------------------------------------------------------------------------

ScriptedModel::ScriptedModel(std::vector<std::string> shared_script)
    : shared_(shared_script.begin(), shared_script.end()) {}

ScriptedModel ScriptedModel::from_json(const json& j) {
  ScriptedModel m;
  auto load = [](const json& arr, auto&& sink) {
    if (!arr.is_array()) throw ConfigError("script queue must be an array");
    for (const auto& item : arr) sink(item.is_string() ? item.get<std::string>() : item.dump());
  };
  if (j.is_array()) {
    load(j, [&](std::string s) { m.push(std::move(s)); });
  } else if (j.is_object()) {
    for (const auto& [model, arr] : j.items()) {
      if (model == "*") {
        load(arr, [&](std::string s) { m.push(std::move(s)); });
      } else {
        load(arr, [&, model = model](std::string s) { m.push_for(model, std::move(s)); });
      }
    }
  } else {
    throw ConfigError("script must be a JSON array or object");
  }
  return m;
}

ScriptedModel::ScriptedModel(ScriptedModel&& other) noexcept {
  std::lock_guard lock(other.mu_);
  shared_ = std::move(other.shared_);
  per_model_ = std::move(other.per_model_);
  text_only_ = std::move(other.text_only_);
  calls_ = std::move(other.calls_);
}

void ScriptedModel::push(std::string response) {
  std::lock_guard lock(mu_);
  shared_.push_back(std::move(response));
}

void ScriptedModel::push_for(const std::string& model, std::string response) {
  std::lock_guard lock(mu_);
  per_model_[model].push_back(std::move(response));
}

void ScriptedModel::set_text_only(const std::string& model) {
  std::lock_guard lock(mu_);
  text_only_.insert(model);
}

bool ScriptedModel::supports_images(const std::string& model) const {
  std::lock_guard lock(mu_);
  return !text_only_.contains(model);
}

std::string ScriptedModel::complete(const std::string& model, const Prompt& prompt, ResponseMode mode) {
  check_model_request(*this, model, prompt);
  std::lock_guard lock(mu_);
  std::deque<std::string>* queue = &shared_;
  if (auto it = per_model_.find(model); it != per_model_.end()) queue = &it->second;
  if (queue->empty()) {
    throw ScriptExhausted("script exhausted for model '" + model + "' after " + std::to_string(calls_.size()) +
                          " calls");
  }
  std::string response = std::move(queue->front());
  queue->pop_front();
  calls_.push_back(Call{model, prompt, mode, response});
  return response;
}

std::vector<ScriptedModel::Call> ScriptedModel::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

std::vector<ScriptedModel::Call> ScriptedModel::calls_for(const std::string& model) const {
  std::lock_guard lock(mu_);
  std::vector<Call> out;
  for (const auto& c : calls_) {
    if (c.model == model) out.push_back(c);
  }
  return out;
}

std::size_t ScriptedModel::remaining() const {
  std::lock_guard lock(mu_);
  std::size_t n = shared_.size();
  for (const auto& [k, q] : per_model_) n += q.size();
  return n;
}

// ---------------------------------------------------------------------------

FingerprintModel::FingerprintModel(std::map<std::string, std::string> responses)
    : responses_(std::move(responses)) {}

FingerprintModel FingerprintModel::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("fingerprint table must be a JSON object");
  std::map<std::string, std::string> table;
  for (const auto& [k, v] : j.items()) table[k] = v.is_string() ? v.get<std::string>() : v.dump();
  return FingerprintModel(std::move(table));
}

void FingerprintModel::add(const Prompt& prompt, std::string response) {
  responses_[prompt_fingerprint(prompt)] = std::move(response);
}

std::string FingerprintModel::complete(const std::string& model, const Prompt& prompt, ResponseMode) {
  check_model_request(*this, model, prompt);
  const std::string fp = prompt_fingerprint(prompt);
  auto it = responses_.find(fp);
  if (it == responses_.end()) throw BackendUnavailable("no fixture response for prompt fingerprint " + fp);
  return it->second;
}

// ---------------------------------------------------------------------------

OpenAiCompatibleModel::OpenAiCompatibleModel(std::string base_url, std::string api_key)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

OpenAiCompatibleModel OpenAiCompatibleModel::from_env() {
  const char* key = std::getenv("MODEL_API_KEY");
  if (key == nullptr || *key == '\0') throw ConfigError("MODEL_API_KEY is not set");
  const char* base = std::getenv("MODEL_API_BASE");
  return OpenAiCompatibleModel(base != nullptr && *base != '\0' ? base : "https://api.openai.com/v1", key);
}

json OpenAiCompatibleModel::request_body(const std::string& model, const Prompt& prompt, ResponseMode mode) {
  json content = json::array();
  for (const auto& part : prompt.parts) {
    if (part.kind == PromptPart::Kind::text) {
      content.push_back({{"type", "text"}, {"text", part.text}});
    } else {
      content.push_back(
          {{"type", "image_url"},
           {"image_url", {{"url", "data:" + part.mime_type + ";base64," + text::base64_encode(part.image)}}}});
    }
  }
  json body = {{"model", model}, {"messages", json::array({{{"role", "user"}, {"content", content}}})}};
  if (mode == ResponseMode::json) body["response_format"] = {{"type", "json_object"}};
  return body;
}

std::string OpenAiCompatibleModel::complete(const std::string& model, const Prompt& prompt, ResponseMode mode) {
  check_model_request(*this, model, prompt);
  http::Request req;
  req.method = "POST";
  req.url = base_url_ + "/chat/completions";
  req.headers = {{"Authorization", "Bearer " + api_key_}};
  req.body = request_body(model, prompt, mode).dump();
  req.timeout_seconds = timeout_seconds_;
  const auto res = http::send(req);
  if (!res.transport_ok()) throw BackendUnavailable("model transport failure: " + res.error);
  if (!res.ok()) {
    throw BackendUnavailable("model endpoint returned HTTP " + std::to_string(res.status) + ": " +
                             res.body.substr(0, 300));
  }
  try {
    const json j = json::parse(res.body);
    const auto& content = j.at("choices").at(0).at("message").at("content");
    return content.is_string() ? content.get<std::string>() : std::string{};
  } catch (const std::exception& e) {
    throw BackendUnavailable(std::string("unexpected model response: ") + e.what());
  }
}

}  // namespace infogent
