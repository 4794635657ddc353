#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "infogent/web.hpp"
#include "scenario.hpp"

namespace infogent {
namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class HtmlFixture : public ::testing::TestWithParam<std::string> {};

TEST_P(HtmlFixture, ConvertsToExpectedText) {
  const auto dir = testkit::data_dir() / "html";
  const HtmlText got = html_to_text(slurp(dir / (GetParam() + ".html")));
  EXPECT_EQ(got.text, slurp(dir / (GetParam() + ".expected.txt")));
  EXPECT_EQ(got.title, slurp(dir / (GetParam() + ".title.txt")));
}

INSTANTIATE_TEST_SUITE_P(Html, HtmlFixture, ::testing::Values("basic", "boilerplate", "table", "tricky", "unicode"));

TEST(Html, DegenerateInputs) {
  EXPECT_EQ(html_to_text("").text, "");
  EXPECT_EQ(html_to_text("plain text only").text, "plain text only");
  EXPECT_EQ(html_to_text("<p>unterminated <b").text, "unterminated");
  EXPECT_EQ(html_to_text("<script>never closed").text, "");
}

std::shared_ptr<const FixtureWeb> small_web() {
  return std::make_shared<const FixtureWeb>(FixtureWeb::from_json(json::parse(R"j({
    "pages": {
      "https://a.example/1": {"title": "One", "body_text": "alpha beta"},
      "https://b.example/2": {"title": "Two", "body_text": "beta gamma"},
      "https://sub.a.example/3": {"title": "Three", "body_text": "gamma"}
    },
    "search_index": {
      "alpha beta": ["https://b.example/2", "https://a.example/1"],
      "gamma": ["https://sub.a.example/3", "https://b.example/2"],
      "delta": ["https://missing.example/x"]
    }
  })j")));
}

std::vector<std::string> urls(const std::vector<SearchResult>& rs) {
  std::vector<std::string> out;
  for (const auto& r : rs) out.push_back(r.url);
  return out;
}

TEST(FixtureSearch, RanksByOverlapThenUrl) {
  FixtureSearch s(small_web());
  // a/1 and b/2 score 2, sub.a/3 scores 1.
  EXPECT_EQ(urls(s.search("Alpha, BETA and gamma?", std::nullopt, 5)),
            (std::vector<std::string>{"https://a.example/1", "https://b.example/2", "https://sub.a.example/3"}));
  EXPECT_EQ(urls(s.search("alpha beta gamma", std::nullopt, 1)), (std::vector<std::string>{"https://a.example/1"}));
  EXPECT_EQ(urls(s.search("gamma", "a.example", 5)), (std::vector<std::string>{"https://sub.a.example/3"}));
  EXPECT_TRUE(s.search("zeta", std::nullopt, 5).empty());
  EXPECT_THROW(s.search("  ", std::nullopt, 5), std::invalid_argument);
  EXPECT_THROW(s.search("x", std::nullopt, 0), std::invalid_argument);
}

TEST(FixtureSearch, UnknownPagesStillListed) {
  FixtureSearch s(small_web());
  const auto r = s.search("delta", std::nullopt, 5);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].title, r[0].url);
  EXPECT_EQ(r[0].snippet, "");
}

TEST(Snippet, Utf8Boundary) {
  const std::string body = std::string(159, 'a') + "\xc3\xa9" + "tail";
  EXPECT_EQ(make_snippet(body), std::string(159, 'a'));
  EXPECT_EQ(make_snippet("short"), "short");
  EXPECT_EQ(make_snippet(std::string(300, 'b')).size(), kSnippetChars);
}

TEST(HttpSearchParsing, FiltersDeduplicatesAndLimits) {
  const json body = json::parse(R"j({"organic": [
    {"link": "https://wiki.example/A", "title": "A", "snippet": "a"},
    {"link": "relative/path", "title": "bad"},
    {"link": "https://wiki.example/A", "title": "dup"},
    {"link": "https://other.example/B", "title": "B"},
    {"link": "https://en.wiki.example/C", "title": "C"}
  ]})j");
  EXPECT_EQ(urls(HttpSearch::parse_response(body, std::nullopt, 5)),
            (std::vector<std::string>{"https://wiki.example/A", "https://other.example/B", "https://en.wiki.example/C"}));
  EXPECT_EQ(urls(HttpSearch::parse_response(body, "wiki.example", 5)),
            (std::vector<std::string>{"https://wiki.example/A", "https://en.wiki.example/C"}));
  EXPECT_EQ(HttpSearch::parse_response(body, std::nullopt, 1).size(), 1u);
  EXPECT_TRUE(HttpSearch::parse_response(json::object(), std::nullopt, 5).empty());
}

TEST(FixtureScraper, FetchesKnownPages) {
  FixtureScraper s(small_web());
  const PageText ok = s.fetch_page("https://a.example/1");
  EXPECT_TRUE(ok.fetched_ok);
  EXPECT_EQ(ok.text, "alpha beta");
  const PageText missing = s.fetch_page("https://a.example/404");
  EXPECT_FALSE(missing.fetched_ok);
  EXPECT_FALSE(missing.error.empty());
  EXPECT_THROW(s.fetch_page("not a url"), std::invalid_argument);
}

TEST(FixtureWeb, ValidationFindsProblems) {
  EXPECT_TRUE(testkit::fixture_web()->validate().empty());
  const FixtureWeb bad = FixtureWeb::from_json(json::parse(R"j({
    "pages": {
      "relative": {"title": "r"},
      "https://x.example/": {"links": ["https://nowhere.example/", {"url": "https://ext.example/", "external": true}],
                             "elements": [{"role": "slider", "label": "s"}, {"role": "link", "target": "https://gone/"}],
                             "height_px": 0}
    },
    "search_index": {"...": ["https://x.example/", "https://x.example/"]}
  })j"));
  const auto problems = bad.validate();
  EXPECT_EQ(problems.size(), 7u);
  EXPECT_THROW(FixtureWeb::from_json(json::array()), ConfigError);
  EXPECT_THROW(FixtureWeb::load("/nonexistent/web.json"), ConfigError);
}

}  // namespace
}  // namespace infogent
