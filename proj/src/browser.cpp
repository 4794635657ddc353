#include <algorithm>

#include <zlib.h>

#include "infogent/browser.hpp"
#include "infogent/text_util.hpp"

namespace infogent {

std::string_view to_string(ElementRole r) {
  switch (r) {
    case ElementRole::link: return "link";
    case ElementRole::button: return "button";
    case ElementRole::input: return "input";
    case ElementRole::select: return "select";
    case ElementRole::other: return "other";
  }
  return "other";
}

ElementRole element_role_from_string(std::string_view s) {
  if (s == "link") return ElementRole::link;
  if (s == "button") return ElementRole::button;
  if (s == "input") return ElementRole::input;
  if (s == "select") return ElementRole::select;
  return ElementRole::other;
}

std::string VisualNavAction::name() const {
  switch (kind) {
    case Kind::click: return "CLICK";
    case Kind::select: return "SELECT";
    case Kind::type: return "TYPE";
    case Kind::press_enter: return "PRESS_ENTER";
    case Kind::go_back: return "GO_BACK";
    case Kind::aggregate: return "AGGREGATE";
    case Kind::terminate: return "TERMINATE";
  }
  return "TERMINATE";
}

std::string VisualNavAction::to_string() const {
  switch (kind) {
    case Kind::click: return "CLICK(" + std::to_string(element) + ")";
    case Kind::select: return "SELECT(" + std::to_string(element) + (option ? ", \"" + *option + "\"" : "") + ")";
    case Kind::type: return "TYPE(" + std::to_string(element) + ", \"" + text + "\")";
    default: return name();
  }
}

json VisualNavAction::to_json() const {
  json j = {{"action", name()}};
  if (needs_element()) j["element"] = element;
  if (kind == Kind::type) j["text"] = text;
  if (kind == Kind::select && option) j["option"] = *option;
  return j;
}

std::vector<ElementCandidate> select_candidates(const std::vector<RawElement>& raw,
                                                std::vector<std::size_t>* source_positions) {
  std::vector<std::size_t> order;
  for (int pass = 0; pass < 2; ++pass) {
    const bool want_viewport = pass == 0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const auto& e = raw[i];
      if (e.hidden || e.disabled || e.in_viewport != want_viewport) continue;
      if (order.size() < kMaxCandidates) order.push_back(i);
    }
  }
  std::vector<ElementCandidate> out;
  out.reserve(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& e = raw[order[k]];
    out.push_back({static_cast<int>(k), e.role, e.label, e.in_viewport});
  }
  if (source_positions != nullptr) *source_positions = std::move(order);
  return out;
}

CapturePlan plan_capture(int page_height, int viewport_height, int max_screenshots) {
  if (viewport_height <= 0 || max_screenshots <= 0) throw std::invalid_argument("invalid capture geometry");
  CapturePlan plan;
  const int height = std::max(page_height, 1);
  for (int offset = 0; offset < height; offset += viewport_height) {
    if (static_cast<int>(plan.offsets.size()) == max_screenshots) {
      plan.truncated = true;
      break;
    }
    plan.offsets.push_back(offset);
  }
  return plan;
}

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_chunk(std::vector<std::uint8_t>& out, const char* type, const std::vector<std::uint8_t>& data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t type_pos = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const uLong crc = crc32(0L, out.data() + type_pos, static_cast<uInt>(4 + data.size()));
  put_u32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

std::vector<std::uint8_t> encode_png_gray(int width, int height, const std::vector<std::uint8_t>& pixels) {
  if (width <= 0 || height <= 0 || pixels.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("pixel buffer does not match image size");
  }
  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>(height) * (width + 1));
  for (int y = 0; y < height; ++y) {
    raw.push_back(0);  // filter: none
    raw.insert(raw.end(), pixels.begin() + static_cast<std::ptrdiff_t>(y) * width,
               pixels.begin() + static_cast<std::ptrdiff_t>(y + 1) * width);
  }
  uLongf zlen = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> z(zlen);
  if (compress2(z.data(), &zlen, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK) {
    throw std::runtime_error("png deflate failed");
  }
  z.resize(zlen);

  std::vector<std::uint8_t> png = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  std::vector<std::uint8_t> ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(width));
  put_u32(ihdr, static_cast<std::uint32_t>(height));
  ihdr.insert(ihdr.end(), {8, 0, 0, 0, 0});  // 8-bit grayscale
  put_chunk(png, "IHDR", ihdr);
  put_chunk(png, "IDAT", z);
  put_chunk(png, "IEND", {});
  return png;
}

// ---------------------------------------------------------------------------
// FixtureBrowser
// ---------------------------------------------------------------------------

namespace {

constexpr int kResultsPerPage = 5;
constexpr int kCharsPerViewport = 1500;

struct SearchPageQuery {
  std::string q;
  int start = 0;
};

std::optional<SearchPageQuery> parse_search_url(const std::string& url) {
  const std::string prefix = std::string(FixtureBrowser::kSearchHome) + "search?";
  if (!url.starts_with(prefix)) return std::nullopt;
  SearchPageQuery out;
  std::string_view rest = std::string_view(url).substr(prefix.size());
  while (!rest.empty()) {
    const auto amp = rest.find('&');
    const std::string_view kv = rest.substr(0, amp);
    const auto eq = std::find(kv.begin(), kv.end(), '=');
    if (eq != kv.end()) {
      const std::string_view key(kv.begin(), eq);
      const auto value = text::url_decode(std::string_view(eq + 1, kv.end()));
      if (key == "q") out.q = value;
      if (key == "start") out.start = std::max(0, std::atoi(value.c_str()));
    }
    if (amp == std::string_view::npos) break;
    rest = rest.substr(amp + 1);
  }
  return out;
}

std::string search_url(const std::string& q, int start) {
  std::string url = std::string(FixtureBrowser::kSearchHome) + "search?q=" + text::url_encode(q);
  if (start > 0) url += "&start=" + std::to_string(start);
  return url;
}

}  // namespace

FixtureBrowser::FixtureBrowser(std::shared_ptr<const FixtureWeb> web, Viewport viewport)
    : web_(std::move(web)), search_(web_), viewport_(viewport) {
  current_ = build_page(std::string(kSearchHome));
}

FixtureBrowser::PageState FixtureBrowser::build_page(const std::string& url) const {
  PageState page;
  page.url = url;

  auto add_search_form = [&](const std::string& label) {
    Element input;
    input.raw = {ElementRole::input, label, false, false, true};
    input.search_input = true;
    Element button;
    button.raw = {ElementRole::button, "Search", false, false, true};
    button.search_submit = true;
    page.elements.push_back(input);
    page.elements.push_back(button);
  };

  if (url == kSearchHome) {
    page.title = "Search";
    page.text = "Search the web";
    add_search_form("Search the web");
    return page;
  }
  if (auto sq = parse_search_url(url)) {
    page.title = sq->q + " - Search";
    add_search_form("Search the web");
    // Ask for one more than fits on this page to know whether Next exists.
    std::vector<SearchResult> results;
    if (!text::trim(sq->q).empty()) {
      results = search_.search(sq->q, std::nullopt, sq->start + kResultsPerPage + 1);
    }
    std::string body = "Results for " + sq->q;
    const int end = std::min<int>(static_cast<int>(results.size()), sq->start + kResultsPerPage);
    for (int i = sq->start; i < end; ++i) {
      const auto& r = results[static_cast<std::size_t>(i)];
      body += "\n" + r.title + "\n" + r.url + "\n" + r.snippet;
      Element link;
      link.raw = {ElementRole::link, r.title, false, false, true};
      link.target = r.url;
      page.elements.push_back(link);
    }
    if (static_cast<int>(results.size()) > end) {
      Element next;
      next.raw = {ElementRole::link, "Next", false, false, true};
      next.target = search_url(sq->q, end);
      page.elements.push_back(next);
    }
    if (results.empty()) body += "\nNo results found.";
    page.text = body;
    return page;
  }
  const FixturePage* fp = web_->find(url);
  if (fp == nullptr) {
    page.title = "Page not available";
    page.text = "This page could not be loaded.";
    return page;
  }
  page.title = fp->title;
  page.text = fp->body_text;
  for (const auto& fe : fp->elements) {
    Element e;
    e.raw = {element_role_from_string(fe.role), fe.label, fe.hidden, fe.disabled, fe.in_viewport};
    e.target = fe.target;
    e.options = fe.options;
    e.option_targets = fe.option_targets;
    page.elements.push_back(std::move(e));
  }
  for (const auto& link : fp->links) {
    const FixturePage* target = web_->find(link.url);
    Element e;
    e.raw = {ElementRole::link, target != nullptr && !target->title.empty() ? target->title : link.url, false, false,
             true};
    e.target = link.url;
    page.elements.push_back(std::move(e));
  }
  return page;
}

std::string FixtureBrowser::open(const std::string& url) {
  history_.clear();
  current_ = build_page(url);
  last_candidates_.clear();
  last_positions_.clear();
  return current_.url;
}

void FixtureBrowser::navigate(const std::string& url) {
  history_.push_back(current_.url);
  current_ = build_page(url);
  last_candidates_.clear();
  last_positions_.clear();
}

const FixtureBrowser::Element& FixtureBrowser::resolve(int index, std::size_t* raw_pos) {
  if (last_candidates_.empty() && last_positions_.empty()) extract_candidates();
  if (index < 0 || static_cast<std::size_t>(index) >= last_positions_.size()) {
    throw StaleElement("element index " + std::to_string(index) + " is not in the current candidate set");
  }
  *raw_pos = last_positions_[static_cast<std::size_t>(index)];
  return current_.elements[*raw_pos];
}

std::string FixtureBrowser::act(const VisualNavAction& action) {
  using Kind = VisualNavAction::Kind;
  auto submit_search = [&](std::size_t input_pos) {
    const auto it = current_.values.find(input_pos);
    const std::string q = it == current_.values.end() ? std::string{} : text::trim(it->second);
    if (!q.empty()) navigate(search_url(q, 0));
  };
  auto search_input_pos = [&]() -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < current_.elements.size(); ++i) {
      if (current_.elements[i].search_input) return i;
    }
    return std::nullopt;
  };

  switch (action.kind) {
    case Kind::click: {
      std::size_t pos = 0;
      const Element& e = resolve(action.element, &pos);
      if (e.raw.role == ElementRole::input) {
        current_.focused = pos;
      } else if (e.search_submit) {
        if (auto in = search_input_pos()) submit_search(*in);
      } else if (e.target) {
        navigate(*e.target);
      }
      break;
    }
    case Kind::select: {
      std::size_t pos = 0;
      const Element& e = resolve(action.element, &pos);
      if (e.raw.role != ElementRole::select) {
        throw StaleElement("element " + std::to_string(action.element) + " is not a select");
      }
      if (action.option) {
        if (std::find(e.options.begin(), e.options.end(), *action.option) == e.options.end()) {
          throw StaleElement("option '" + *action.option + "' not offered by element " +
                             std::to_string(action.element));
        }
        current_.values[pos] = *action.option;
        if (auto it = e.option_targets.find(*action.option); it != e.option_targets.end()) navigate(it->second);
      }
      break;
    }
    case Kind::type: {
      std::size_t pos = 0;
      const Element& e = resolve(action.element, &pos);
      if (e.raw.role != ElementRole::input) {
        throw StaleElement("element " + std::to_string(action.element) + " does not accept text");
      }
      current_.values[pos] = action.text;
      current_.focused = pos;
      break;
    }
    case Kind::press_enter: {
      if (current_.focused && current_.elements[*current_.focused].search_input) submit_search(*current_.focused);
      break;
    }
    case Kind::go_back: {
      if (!history_.empty()) {
        const std::string previous = history_.back();
        history_.pop_back();
        current_ = build_page(previous);
        last_candidates_.clear();
        last_positions_.clear();
      }
      break;
    }
    case Kind::aggregate:
    case Kind::terminate:
      throw std::invalid_argument(action.name() + " is not a browser primitive");
  }
  return current_.url;
}

std::vector<ElementCandidate> FixtureBrowser::extract_candidates() {
  std::vector<RawElement> raw;
  raw.reserve(current_.elements.size());
  for (const auto& e : current_.elements) raw.push_back(e.raw);
  last_candidates_ = select_candidates(raw, &last_positions_);
  return last_candidates_;
}

std::string FixtureBrowser::page_text() const {
  return current_.text;
}

int FixtureBrowser::page_height() const {
  if (const FixturePage* fp = web_->find(current_.url); fp != nullptr && fp->height_px) return *fp->height_px;
  const int viewports = std::max<int>(1, static_cast<int>((current_.text.size() + kCharsPerViewport - 1) /
                                                          kCharsPerViewport));
  return viewports * viewport_.height;
}

Screenshot FixtureBrowser::render(int offset) const {
  // Quarter-resolution grayscale raster; each row band's shade is derived
  // from the page content so different pages and offsets differ.
  const int w = std::max(1, viewport_.width / 4);
  const int h = std::max(1, viewport_.height / 4);
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h, 255);
  const std::uint64_t seed = text::fnv1a64(current_.url + "#" + std::to_string(offset));
  for (int y = 0; y < h; y += 6) {
    const std::uint64_t row = seed ^ (static_cast<std::uint64_t>(y) * 0x9E3779B97F4A7C15ULL);
    const int len = static_cast<int>(row % static_cast<std::uint64_t>(w));
    for (int yy = y; yy < std::min(h, y + 3); ++yy) {
      for (int x = 0; x < len; ++x) px[static_cast<std::size_t>(yy) * w + x] = 40;
    }
  }
  return Screenshot{encode_png_gray(w, h, px), offset, viewport_};
}

ScreenshotCapture FixtureBrowser::capture_page_screenshots(int max_screenshots) {
  const auto plan = plan_capture(page_height(), viewport_.height, max_screenshots);
  ScreenshotCapture out;
  out.truncated = plan.truncated;
  for (int off : plan.offsets) out.shots.push_back(render(off));
  return out;
}

Screenshot FixtureBrowser::viewport_screenshot() {
  return render(0);
}

}  // namespace infogent
