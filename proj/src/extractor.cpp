#include "infogent/extractor.hpp"

#include "infogent/prompts.hpp"
#include "infogent/text_util.hpp"

namespace infogent {

namespace {

constexpr std::string_view kCorrective =
    "\n\nYour previous response could not be parsed. Respond with only a JSON object that has a \"paragraphs\" "
    "list of strings.";

std::vector<std::string> ask_for_paragraphs(const Prompt& prompt, ExtractorContext& ctx, std::string* thoughts) {
  std::string raw = ctx.model.complete(ctx.model_id, prompt, ResponseMode::json);
  try {
    return parse_paragraphs(raw, thoughts);
  } catch (const ExtractionParseFailure& first) {
    ctx.trace.warning(ctx.t, Actor::extractor, "parse_retry", {{"detail", first.what()}});
    Prompt retry = prompt;
    retry.parts.push_back(PromptPart::of_text(std::string(kCorrective)));
    raw = ctx.model.complete(ctx.model_id, retry, ResponseMode::json);
    return parse_paragraphs(raw, thoughts);
  }
}

std::vector<Passage> to_passages(const std::vector<std::string>& paragraphs, std::size_t cap,
                                 const ExtractionRequest& request, ExtractorContext& ctx) {
  std::vector<Passage> out;
  for (const auto& p : paragraphs) {
    if (text::trim(p).empty()) continue;
    if (out.size() == cap) {
      ctx.trace.warning(ctx.t, Actor::extractor, "truncated",
                        {{"returned", paragraphs.size()}, {"cap", cap}, {"url", request.source_url}});
      break;
    }
    out.push_back(make_passage(p, request.source_url, ctx.t));
  }
  return out;
}

}  // namespace

std::vector<std::string> chunk_page_text(std::string_view text, std::size_t max_chars) {
  if (max_chars < 1000) throw std::invalid_argument("max_chars must be at least 1000");
  std::vector<std::string> chunks;
  std::string current;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl + 1;
    std::string_view para = text.substr(pos, end - pos);
    pos = end;
    if (current.size() + para.size() <= max_chars) {
      current += para;
      continue;
    }
    if (!current.empty()) {
      chunks.push_back(std::move(current));
      current.clear();
    }
    while (para.size() > max_chars) {
      chunks.emplace_back(para.substr(0, max_chars));
      para.remove_prefix(max_chars);
    }
    current = std::string(para);
  }
  if (!current.empty()) chunks.push_back(std::move(current));
  return chunks;
}

std::vector<std::string> parse_paragraphs(std::string_view raw, std::string* thoughts) {
  const auto obj = text::first_json_object(raw);
  if (!obj) throw ExtractionParseFailure("no JSON object in extractor response");
  json j;
  try {
    j = json::parse(*obj);
  } catch (const json::exception& e) {
    throw ExtractionParseFailure(std::string("invalid JSON in extractor response: ") + e.what());
  }
  if (!j.contains("paragraphs") || !j["paragraphs"].is_array()) {
    throw ExtractionParseFailure("extractor response has no \"paragraphs\" list");
  }
  std::vector<std::string> out;
  for (const auto& p : j["paragraphs"]) {
    if (p.is_string()) {
      out.push_back(p.get<std::string>());
    } else if (!p.is_null()) {
      out.push_back(p.dump());
    }
  }
  if (thoughts != nullptr && j.contains("thoughts") && j["thoughts"].is_string()) {
    *thoughts = j["thoughts"].get<std::string>();
  }
  return out;
}

std::string render_text_extractor_prompt(const Task& task, std::string_view chunk) {
  return prompts::render(prompts::template_text(prompts::kExtractorText),
                         {{"data", std::string(chunk)}, {"user_task", task.query}});
}

Prompt render_visual_extractor_prompt(const Task& task, std::string_view motivation,
                                      const std::vector<Screenshot>& shots) {
  Prompt p(prompts::render(prompts::template_text(prompts::kExtractorVisual),
                           {{"task", task.query}, {"search_motivation", std::string(motivation)}}));
  for (const auto& s : shots) p.parts.push_back(PromptPart::of_image(s.image));
  return p;
}

std::vector<Passage> extract_from_text(const ExtractionRequest& request, std::size_t cap, ExtractorContext& ctx) {
  const auto* page = std::get_if<PageText>(&request.content);
  if (page == nullptr) throw std::invalid_argument("text extraction needs page text");
  if (!page->fetched_ok) throw FetchFailure("page was not fetched: " + request.source_url);
  if (page->text.empty()) throw std::invalid_argument("page text is empty");

  const auto chunks = chunk_page_text(page->text, std::max<std::size_t>(ctx.max_chunk_chars, 1000));
  std::vector<std::string> paragraphs;
  for (const auto& chunk : chunks) {
    auto got = ask_for_paragraphs(render_text_extractor_prompt(request.task, chunk), ctx, nullptr);
    paragraphs.insert(paragraphs.end(), got.begin(), got.end());
  }
  auto out = to_passages(paragraphs, cap, request, ctx);
  json payload = {{"url", request.source_url}, {"chunks", chunks.size()}, {"passages", out.size()}};
  if (const auto bad = non_attributable(out, page->text); !bad.empty()) payload["non_attributable"] = bad;
  ctx.trace.ok(ctx.t, Actor::extractor, "extract_text", payload);
  return out;
}

std::vector<Passage> extract_from_screenshots(const ExtractionRequest& request, std::size_t cap,
                                              ExtractorContext& ctx) {
  const auto* shots = std::get_if<std::vector<Screenshot>>(&request.content);
  if (shots == nullptr || shots->empty()) throw std::invalid_argument("screenshot extraction needs screenshots");

  std::string thoughts;
  const auto paragraphs =
      ask_for_paragraphs(render_visual_extractor_prompt(request.task, request.motivation, *shots), ctx, &thoughts);
  auto out = to_passages(paragraphs, cap, request, ctx);
  ctx.trace.ok(ctx.t, Actor::extractor, "extract_screenshots",
               {{"url", request.source_url},
                {"screenshots", shots->size()},
                {"passages", out.size()},
                {"thoughts", thoughts}});
  return out;
}

std::vector<std::size_t> non_attributable(const std::vector<Passage>& passages, std::string_view page_text) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < passages.size(); ++i) {
    if (page_text.find(passages[i].text) == std::string_view::npos) out.push_back(i);
  }
  return out;
}

}  // namespace infogent
