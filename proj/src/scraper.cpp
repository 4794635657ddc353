#include <array>
#include <cctype>
#include <set>

#include "infogent/http.hpp"
#include "infogent/text_util.hpp"
#include "infogent/web.hpp"

namespace infogent {

namespace {

const std::set<std::string, std::less<>> kSkipped = {"script", "style", "nav",      "footer",
                                                     "aside",  "head",  "noscript", "template"};
const std::set<std::string, std::less<>> kRawText = {"script", "style"};
const std::set<std::string, std::less<>> kBlock = {
    "address", "article", "aside",  "blockquote", "body",   "br",      "caption", "dd",     "details",
    "dialog",  "div",     "dl",     "dt",         "fieldset", "figcaption", "figure", "footer", "form",
    "h1",      "h2",      "h3",     "h4",         "h5",     "h6",      "header",  "hr",     "html",
    "li",      "main",    "nav",    "ol",         "p",      "pre",     "section", "summary", "table",
    "tbody",   "tfoot",   "thead",  "tr",         "ul"};
const std::set<std::string, std::less<>> kCellLike = {"td", "th"};

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x110000) {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string decode_entities(std::string_view s) {
  static const std::array<std::pair<std::string_view, std::string_view>, 6> named = {{
      {"amp", "&"}, {"lt", "<"}, {"gt", ">"}, {"quot", "\""}, {"apos", "'"}, {"nbsp", " "},
  }};
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out.push_back(s[i]);
      continue;
    }
    const auto semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back('&');
      continue;
    }
    const std::string_view ent = s.substr(i + 1, semi - i - 1);
    bool done = false;
    if (!ent.empty() && ent[0] == '#') {
      try {
        const bool hex = ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X');
        const std::string digits(ent.substr(hex ? 2 : 1));
        if (!digits.empty()) {
          append_utf8(out, std::stoul(digits, nullptr, hex ? 16 : 10));
          done = true;
        }
      } catch (const std::exception&) {
      }
    } else {
      for (const auto& [name, value] : named) {
        if (ent == name) {
          out += value;
          done = true;
          break;
        }
      }
    }
    if (done) {
      i = semi;
    } else {
      out.push_back('&');
    }
  }
  return out;
}

class TextBuilder {
 public:
  void text(std::string_view raw) {
    for (char c : decode_entities(raw)) {
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
        pending_space_ = true;
      } else {
        if (pending_space_ && !line_.empty()) line_.push_back(' ');
        pending_space_ = false;
        line_.push_back(c);
      }
    }
  }
  void space() { pending_space_ = true; }
  void break_line() {
    std::string t = text::trim(line_);
    if (!t.empty()) lines_.push_back(std::move(t));
    line_.clear();
    pending_space_ = false;
  }
  std::string finish() {
    break_line();
    std::string out;
    for (std::size_t i = 0; i < lines_.size(); ++i) {
      if (i > 0) out.push_back('\n');
      out += lines_[i];
    }
    return out;
  }

 private:
  std::vector<std::string> lines_;
  std::string line_;
  bool pending_space_ = false;
};

std::size_t find_icase(std::string_view hay, std::string_view needle, std::size_t from) {
  for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
    if (text::starts_with_icase(hay.substr(i), needle)) return i;
  }
  return std::string_view::npos;
}

}  // namespace

HtmlText html_to_text(std::string_view html) {
  HtmlText result;
  TextBuilder builder;
  int skip_depth = 0;
  std::size_t i = 0;
  std::size_t text_start = 0;

  auto flush_text = [&](std::size_t end) {
    if (end > text_start && skip_depth == 0) builder.text(html.substr(text_start, end - text_start));
  };

  while (i < html.size()) {
    if (html[i] != '<') {
      ++i;
      continue;
    }
    // Comments, doctype and processing instructions.
    if (html.substr(i, 4) == "<!--") {
      flush_text(i);
      const auto end = html.find("-->", i + 4);
      i = end == std::string_view::npos ? html.size() : end + 3;
      text_start = i;
      continue;
    }
    if (i + 1 < html.size() && (html[i + 1] == '!' || html[i + 1] == '?')) {
      flush_text(i);
      const auto end = html.find('>', i);
      i = end == std::string_view::npos ? html.size() : end + 1;
      text_start = i;
      continue;
    }
    std::size_t j = i + 1;
    const bool closing = j < html.size() && html[j] == '/';
    if (closing) ++j;
    const std::size_t name_start = j;
    while (j < html.size() && (std::isalnum(static_cast<unsigned char>(html[j])) || html[j] == '-')) ++j;
    if (j == name_start || !std::isalpha(static_cast<unsigned char>(html[name_start]))) {
      ++i;  // a literal '<'
      continue;
    }
    const std::string name = text::to_lower(html.substr(name_start, j - name_start));
    // Attributes, honouring quoted values that may contain '>'.
    char quote = 0;
    while (j < html.size()) {
      const char c = html[j];
      if (quote != 0) {
        if (c == quote) quote = 0;
      } else if (c == '"' || c == '\'') {
        quote = c;
      } else if (c == '>') {
        break;
      }
      ++j;
    }
    const bool self_closing = j > 0 && j < html.size() && html[j - 1] == '/';
    flush_text(i);
    i = j < html.size() ? j + 1 : html.size();
    text_start = i;

    if (!closing && name == "title") {
      const auto end = find_icase(html, "</title", i);
      const std::string_view raw = html.substr(i, (end == std::string_view::npos ? html.size() : end) - i);
      if (result.title.empty()) {
        TextBuilder tb;
        tb.text(raw);
        result.title = tb.finish();
      }
      if (end == std::string_view::npos) {
        i = html.size();
      } else {
        const auto gt = html.find('>', end);
        i = gt == std::string_view::npos ? html.size() : gt + 1;
      }
      text_start = i;
      continue;
    }
    if (!closing && kRawText.contains(name)) {
      const auto end = find_icase(html, "</" + name, i);
      if (end == std::string_view::npos) {
        i = html.size();
      } else {
        const auto gt = html.find('>', end);
        i = gt == std::string_view::npos ? html.size() : gt + 1;
      }
      text_start = i;
      continue;
    }
    if (kSkipped.contains(name)) {
      if (closing) {
        if (skip_depth > 0) --skip_depth;
      } else if (!self_closing) {
        ++skip_depth;
      }
      continue;
    }
    if (skip_depth > 0) continue;
    if (kBlock.contains(name)) {
      builder.break_line();
    } else if (kCellLike.contains(name)) {
      builder.space();
    }
  }
  flush_text(html.size());
  result.text = builder.finish();
  return result;
}

// ---------------------------------------------------------------------------

FixtureScraper::FixtureScraper(std::shared_ptr<const FixtureWeb> web) : web_(std::move(web)) {}

PageText FixtureScraper::fetch_page(const std::string& url) {
  if (!text::is_absolute_url(url)) throw std::invalid_argument("not an absolute url: " + url);
  if (const FixturePage* page = web_->find(url)) return PageText{url, page->title, page->body_text, true, {}};
  return PageText{url, {}, {}, false, "url not present in fixture web"};
}

PageText HttpScraper::fetch_page(const std::string& url) {
  if (!text::is_absolute_url(url)) throw std::invalid_argument("not an absolute url: " + url);
  http::Request req;
  req.url = url;
  req.headers = {{"User-Agent", "Mozilla/5.0 (compatible; infogent/1.0)"}, {"Accept", "text/html,*/*;q=0.8"}};
  req.timeout_seconds = timeout_seconds_;
  const auto res = http::send(req);
  if (!res.transport_ok()) return PageText{url, {}, {}, false, "fetch failed: " + res.error};
  if (!res.ok()) return PageText{url, {}, {}, false, "fetch failed: HTTP " + std::to_string(res.status)};
  const bool looks_html = text::contains_icase(res.content_type, "html") ||
                          text::starts_with_icase(text::trim(res.body.substr(0, 256)), "<");
  if (looks_html) {
    auto converted = html_to_text(res.body);
    return PageText{url, std::move(converted.title), std::move(converted.text), true, {}};
  }
  return PageText{url, {}, text::trim(res.body), true, {}};
}

}  // namespace infogent
