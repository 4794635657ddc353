#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "infogent/core.hpp"

namespace infogent {

// ---------------------------------------------------------------------------
// Fixture web
// ---------------------------------------------------------------------------

struct FixtureLink {
  std::string url;
  bool external = false;
};

/// An interactable element declared explicitly on a fixture page.
struct FixtureElement {
  std::string role = "button";  // link | button | input | select | other
  std::string label;
  std::optional<std::string> target;  // navigation target on click/submit
  std::vector<std::string> options;   // select only
  std::map<std::string, std::string> option_targets;
  bool hidden = false;
  bool disabled = false;
  bool in_viewport = true;
};

struct FixturePage {
  std::string title;
  std::string body_text;
  std::vector<FixtureLink> links;
  std::vector<FixtureElement> elements;
  std::optional<int> height_px;
};

/// Deterministic offline web: pages keyed by url plus a search index keyed
/// by space-separated query token sets.
struct FixtureWeb {
  std::map<std::string, FixturePage> pages;
  std::map<std::string, std::vector<std::string>> search_index;

  static FixtureWeb from_json(const json& j);
  static FixtureWeb load(const std::filesystem::path& path);

  const FixturePage* find(const std::string& url) const;

  /// Invariant violations, one message each; empty when valid.
  std::vector<std::string> validate() const;
};

// ---------------------------------------------------------------------------
// Search
// ---------------------------------------------------------------------------

struct SearchResult {
  std::string url;
  std::string title;
  std::string snippet;

  friend bool operator==(const SearchResult&, const SearchResult&) = default;
};

inline constexpr int kDefaultSearchLimit = 5;
inline constexpr std::size_t kSnippetChars = 160;

/// First kSnippetChars bytes of `body`, backed off to a UTF-8 boundary.
std::string make_snippet(std::string_view body);

class SearchProvider {
 public:
  virtual ~SearchProvider() = default;
  virtual std::vector<SearchResult> search(const std::string& query, const std::optional<std::string>& domain_filter,
                                           int limit) = 0;
};

/// Token-overlap ranking over FixtureWeb::search_index. A url scores the
/// largest overlap between the query tokens and any index key listing it;
/// ties are broken by url.
class FixtureSearch : public SearchProvider {
 public:
  explicit FixtureSearch(std::shared_ptr<const FixtureWeb> web);

  std::vector<SearchResult> search(const std::string& query, const std::optional<std::string>& domain_filter,
                                   int limit) override;

 private:
  std::shared_ptr<const FixtureWeb> web_;
};

/// Serper-style JSON search endpoint: POST {base}/search with X-API-KEY.
class HttpSearch : public SearchProvider {
 public:
  HttpSearch(std::string base_url, std::string api_key);
  /// SEARCH_API_KEY (required) and SEARCH_API_BASE (optional).
  static HttpSearch from_env();

  std::vector<SearchResult> search(const std::string& query, const std::optional<std::string>& domain_filter,
                                   int limit) override;

  static std::vector<SearchResult> parse_response(const json& body, const std::optional<std::string>& domain_filter,
                                                  int limit);

 private:
  std::string base_url_;
  std::string api_key_;
};

// ---------------------------------------------------------------------------
// Scraping
// ---------------------------------------------------------------------------

struct PageText {
  std::string url;
  std::string title;
  std::string text;
  bool fetched_ok = false;
  std::string error;
};

struct HtmlText {
  std::string title;
  std::string text;
};

/// Visible text of an HTML document. script/style/nav/footer/aside (and
/// head/noscript/template) subtrees are dropped, whitespace runs collapse
/// to one space, and block-level elements end a line. Blank lines are
/// removed.
HtmlText html_to_text(std::string_view html);

class Scraper {
 public:
  virtual ~Scraper() = default;
  /// Never throws for fetch failures; they come back as fetched_ok=false.
  /// Throws std::invalid_argument for a url that does not parse.
  virtual PageText fetch_page(const std::string& url) = 0;
};

class FixtureScraper : public Scraper {
 public:
  explicit FixtureScraper(std::shared_ptr<const FixtureWeb> web);
  PageText fetch_page(const std::string& url) override;

 private:
  std::shared_ptr<const FixtureWeb> web_;
};

class HttpScraper : public Scraper {
 public:
  explicit HttpScraper(int timeout_seconds = 20) : timeout_seconds_(timeout_seconds) {}
  PageText fetch_page(const std::string& url) override;

 private:
  int timeout_seconds_;
};

}  // namespace infogent
