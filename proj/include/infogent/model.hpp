#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "infogent/core.hpp"

namespace infogent {

enum class ResponseMode { free_text, json };

struct PromptPart {
  enum class Kind { text, image };

  Kind kind = Kind::text;
  std::string text;
  std::vector<std::uint8_t> image;
  std::string mime_type = "image/png";

  static PromptPart of_text(std::string s) { return PromptPart{Kind::text, std::move(s), {}, {}}; }
  static PromptPart of_image(std::vector<std::uint8_t> bytes, std::string mime = "image/png") {
    return PromptPart{Kind::image, {}, std::move(bytes), std::move(mime)};
  }
};

/// A model input: plain text, or text interleaved with images.
struct Prompt {
  std::vector<PromptPart> parts;

  Prompt() = default;
  Prompt(std::string text) { parts.push_back(PromptPart::of_text(std::move(text))); }  // NOLINT
  Prompt(const char* text) : Prompt(std::string(text)) {}                              // NOLINT

  bool empty() const;
  bool has_images() const;
  std::size_t image_count() const;
  /// Concatenation of the text parts.
  std::string text() const;
};

/// Stable identity of a prompt: FNV-1a over the text parts and image bytes.
std::string prompt_fingerprint(const Prompt& prompt);

class ModelBackend {
 public:
  virtual ~ModelBackend() = default;

  virtual std::string complete(const std::string& model, const Prompt& prompt, ResponseMode mode) = 0;
  virtual bool supports_images(const std::string& model) const = 0;
};

/// Shared precondition check for backends: non-empty prompt, and images
/// only for image-capable models.
void check_model_request(const ModelBackend& backend, const std::string& model, const Prompt& prompt);

/// Replays an ordered script of canned responses. Each model identifier
/// can have its own queue; models without one draw from the shared queue.
/// Every call is recorded so tests can inspect the rendered prompts.
class ScriptedModel : public ModelBackend {
 public:
  struct Call {
    std::string model;
    Prompt prompt;
    ResponseMode mode;
    std::string response;
  };

  ScriptedModel() = default;
  explicit ScriptedModel(std::vector<std::string> shared_script);
  ScriptedModel(ScriptedModel&& other) noexcept;
  ScriptedModel& operator=(ScriptedModel&&) = delete;

  /// Accepts either an array (shared queue) or an object mapping model
  /// identifiers to arrays. The key "*" addresses the shared queue.
  static ScriptedModel from_json(const json& j);

  void push(std::string response);
  void push_for(const std::string& model, std::string response);
  void set_text_only(const std::string& model);

  std::string complete(const std::string& model, const Prompt& prompt, ResponseMode mode) override;
  bool supports_images(const std::string& model) const override;

  std::vector<Call> calls() const;
  std::vector<Call> calls_for(const std::string& model) const;
  std::size_t remaining() const;

 private:
  mutable std::mutex mu_;
  std::deque<std::string> shared_;
  std::map<std::string, std::deque<std::string>> per_model_;
  std::set<std::string> text_only_;
  std::vector<Call> calls_;
};

/// Answers by prompt fingerprint. Unknown fingerprints raise
/// BackendUnavailable carrying the fingerprint so fixtures can be authored.
class FingerprintModel : public ModelBackend {
 public:
  FingerprintModel() = default;
  explicit FingerprintModel(std::map<std::string, std::string> responses);
  static FingerprintModel from_json(const json& j);

  void add(const Prompt& prompt, std::string response);

  std::string complete(const std::string& model, const Prompt& prompt, ResponseMode mode) override;
  bool supports_images(const std::string&) const override { return true; }

 private:
  std::map<std::string, std::string> responses_;
};

/// Chat-completions client for OpenAI-compatible endpoints.
class OpenAiCompatibleModel : public ModelBackend {
 public:
  OpenAiCompatibleModel(std::string base_url, std::string api_key);

  /// Reads MODEL_API_BASE and MODEL_API_KEY. Throws ConfigError when the
  /// key is missing.
  static OpenAiCompatibleModel from_env();

  void set_text_only(const std::string& model) { text_only_.insert(model); }
  void set_timeout_seconds(int s) { timeout_seconds_ = s; }

  std::string complete(const std::string& model, const Prompt& prompt, ResponseMode mode) override;
  bool supports_images(const std::string& model) const override { return !text_only_.contains(model); }

  /// Request body sent for a completion; exposed for wire-format tests.
  static json request_body(const std::string& model, const Prompt& prompt, ResponseMode mode);

 private:
  std::string base_url_;
  std::string api_key_;
  std::set<std::string> text_only_;
  int timeout_seconds_ = 120;
};

}  // namespace infogent
