#include <algorithm>
#include <cstdlib>
#include <set>

#include "infogent/http.hpp"
#include "infogent/text_util.hpp"
#include "infogent/web.hpp"

namespace infogent {

namespace {

std::set<std::string> token_set(std::string_view s) {
  auto toks = text::split_whitespace(text::normalize(s));
  return {toks.begin(), toks.end()};
}

void check_search_args(const std::string& query, int limit) {
  if (text::trim(query).empty()) throw std::invalid_argument("search query is empty");
  if (limit < 1) throw std::invalid_argument("search limit must be at least 1");
}

bool passes_filter(const std::string& url, const std::optional<std::string>& filter) {
  return !filter || text::host_matches_suffix(text::hostname(url), *filter);
}

}  // namespace

std::string make_snippet(std::string_view body) {
  if (body.size() <= kSnippetChars) return std::string(body);
  std::size_t n = kSnippetChars;
  // Do not cut inside a multi-byte sequence.
  while (n > 0 && (static_cast<unsigned char>(body[n]) & 0xC0) == 0x80) --n;
  return std::string(body.substr(0, n));
}

FixtureSearch::FixtureSearch(std::shared_ptr<const FixtureWeb> web) : web_(std::move(web)) {}

std::vector<SearchResult> FixtureSearch::search(const std::string& query,
                                                const std::optional<std::string>& domain_filter, int limit) {
  check_search_args(query, limit);
  const auto q = token_set(query);

  std::map<std::string, std::size_t> score;
  for (const auto& [key, urls] : web_->search_index) {
    const auto k = token_set(key);
    std::size_t overlap = 0;
    for (const auto& tok : k) overlap += q.contains(tok) ? 1 : 0;
    if (overlap == 0) continue;
    for (const auto& u : urls) score[u] = std::max(score[u], overlap);
  }

  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (const auto& [url, s] : score) {
    if (passes_filter(url, domain_filter)) ranked.emplace_back(url, s);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > static_cast<std::size_t>(limit)) ranked.resize(static_cast<std::size_t>(limit));

  std::vector<SearchResult> out;
  for (const auto& [url, s] : ranked) {
    const FixturePage* page = web_->find(url);
    out.push_back(page ? SearchResult{url, page->title, make_snippet(page->body_text)} : SearchResult{url, url, ""});
  }
  return out;
}

// ---------------------------------------------------------------------------

HttpSearch::HttpSearch(std::string base_url, std::string api_key)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

HttpSearch HttpSearch::from_env() {
  const char* key = std::getenv("SEARCH_API_KEY");
  if (key == nullptr || *key == '\0') throw ConfigError("SEARCH_API_KEY is not set");
  const char* base = std::getenv("SEARCH_API_BASE");
  return HttpSearch(base != nullptr && *base != '\0' ? base : "https://google.serper.dev", key);
}

std::vector<SearchResult> HttpSearch::parse_response(const json& body, const std::optional<std::string>& domain_filter,
                                                     int limit) {
  std::vector<SearchResult> out;
  std::set<std::string> seen;
  for (const auto& item : body.value("organic", json::array())) {
    const std::string url = item.value("link", std::string{});
    if (!text::is_absolute_url(url) || !passes_filter(url, domain_filter) || !seen.insert(url).second) continue;
    out.push_back({url, item.value("title", std::string{}), item.value("snippet", std::string{})});
    if (out.size() == static_cast<std::size_t>(limit)) break;
  }
  return out;
}

std::vector<SearchResult> HttpSearch::search(const std::string& query, const std::optional<std::string>& domain_filter,
                                             int limit) {
  check_search_args(query, limit);
  std::string q = query;
  if (domain_filter) q += " site:" + *domain_filter;
  http::Request req;
  req.method = "POST";
  req.url = base_url_ + "/search";
  req.headers = {{"X-API-KEY", api_key_}};
  req.body = json{{"q", q}, {"num", std::max(limit, 10)}}.dump();
  const auto res = http::send(req);
  if (!res.transport_ok()) throw SearchFailure("search transport failure: " + res.error);
  if (!res.ok()) throw SearchFailure("search endpoint returned HTTP " + std::to_string(res.status));
  try {
    return parse_response(json::parse(res.body), domain_filter, limit);
  } catch (const json::exception& e) {
    throw SearchFailure(std::string("unparseable search response: ") + e.what());
  }
}

}  // namespace infogent
