#pragma once

#include <string>
#include <variant>
#include <vector>

#include "infogent/browser.hpp"
#include "infogent/core.hpp"
#include "infogent/model.hpp"
#include "infogent/trace.hpp"
#include "infogent/web.hpp"

namespace infogent {

struct ExtractionRequest {
  Task task;
  std::string motivation;
  std::string source_url;
  std::variant<PageText, std::vector<Screenshot>> content;
};

/// Splits `text` into chunks of at most `max_chars`, cutting after a newline
/// where possible and hard-splitting lines longer than the limit. The chunks
/// concatenate back to `text`. Throws std::invalid_argument when
/// max_chars < 1000.
std::vector<std::string> chunk_page_text(std::string_view text, std::size_t max_chars);

/// Paragraph list from an extractor reply: the first JSON object's
/// "paragraphs" array of strings. Throws ExtractionParseFailure.
std::vector<std::string> parse_paragraphs(std::string_view raw, std::string* thoughts = nullptr);

struct ExtractorContext {
  ModelBackend& model;
  std::string model_id;
  TraceRecorder& trace;
  int t = 0;
  std::size_t max_chunk_chars = 24000;
};

/// Text-mode extraction: one prompt per chunk, paragraphs concatenated in
/// chunk order, then capped.
std::vector<Passage> extract_from_text(const ExtractionRequest& request, std::size_t cap, ExtractorContext& ctx);

/// Screenshot-mode extraction through a multimodal model.
std::vector<Passage> extract_from_screenshots(const ExtractionRequest& request, std::size_t cap,
                                              ExtractorContext& ctx);

/// Extractor prompt for one text chunk.
std::string render_text_extractor_prompt(const Task& task, std::string_view chunk);
/// Visual extractor prompt: the rendered instruction followed by one image
/// part per screenshot.
Prompt render_visual_extractor_prompt(const Task& task, std::string_view motivation,
                                      const std::vector<Screenshot>& shots);

/// Passages whose text is not a contiguous substring of `page_text`.
std::vector<std::size_t> non_attributable(const std::vector<Passage>& passages, std::string_view page_text);

}  // namespace infogent
