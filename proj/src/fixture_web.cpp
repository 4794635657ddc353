#include <fstream>
#include <set>

#include "infogent/text_util.hpp"
#include "infogent/web.hpp"

namespace infogent {

namespace {

FixtureElement element_from_json(const json& j) {
  FixtureElement e;
  e.role = j.value("role", std::string("button"));
  e.label = j.value("label", std::string{});
  if (j.contains("target") && j["target"].is_string()) e.target = j["target"].get<std::string>();
  if (j.contains("options")) e.options = j["options"].get<std::vector<std::string>>();
  if (j.contains("option_targets")) {
    e.option_targets = j["option_targets"].get<std::map<std::string, std::string>>();
  }
  e.hidden = j.value("hidden", false);
  e.disabled = j.value("disabled", false);
  e.in_viewport = j.value("in_viewport", true);
  return e;
}

}  // namespace

FixtureWeb FixtureWeb::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("fixture web must be a JSON object");
  FixtureWeb web;
  const json pages = j.value("pages", json::object());
  const json index = j.value("search_index", json::object());
  for (const auto& [url, pj] : pages.items()) {
    FixturePage page;
    page.title = pj.value("title", std::string{});
    page.body_text = pj.value("body_text", std::string{});
    for (const auto& l : pj.value("links", json::array())) {
      if (l.is_string()) {
        page.links.push_back({l.get<std::string>(), false});
      } else {
        page.links.push_back({l.at("url").get<std::string>(), l.value("external", false)});
      }
    }
    for (const auto& ej : pj.value("elements", json::array())) page.elements.push_back(element_from_json(ej));
    if (pj.contains("height_px")) page.height_px = pj["height_px"].get<int>();
    web.pages.emplace(url, std::move(page));
  }
  for (const auto& [key, urls] : index.items()) {
    web.search_index[key] = urls.get<std::vector<std::string>>();
  }
  return web;
}

FixtureWeb FixtureWeb::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open fixture web " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("fixture web " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

const FixturePage* FixtureWeb::find(const std::string& url) const {
  auto it = pages.find(url);
  return it == pages.end() ? nullptr : &it->second;
}

std::vector<std::string> FixtureWeb::validate() const {
  std::vector<std::string> problems;
  for (const auto& [url, page] : pages) {
    if (!text::is_absolute_url(url)) problems.push_back("page key is not an absolute url: " + url);
    for (const auto& link : page.links) {
      if (!text::is_absolute_url(link.url)) {
        problems.push_back(url + ": link is not an absolute url: " + link.url);
      } else if (!link.external && !pages.contains(link.url)) {
        problems.push_back(url + ": link target neither in pages nor flagged external: " + link.url);
      }
    }
    for (const auto& e : page.elements) {
      static const std::set<std::string> roles = {"link", "button", "input", "select", "other"};
      if (!roles.contains(e.role)) problems.push_back(url + ": element has unknown role: " + e.role);
      if (e.target && !pages.contains(*e.target)) {
        problems.push_back(url + ": element target not in pages: " + *e.target);
      }
      for (const auto& [opt, target] : e.option_targets) {
        if (!pages.contains(target)) problems.push_back(url + ": option target not in pages: " + target);
      }
    }
    if (page.height_px && *page.height_px <= 0) problems.push_back(url + ": height_px must be positive");
  }
  for (const auto& [key, urls] : search_index) {
    if (text::normalize(key).empty()) problems.push_back("search index key has no tokens: '" + key + "'");
    std::set<std::string> seen;
    for (const auto& u : urls) {
      if (!text::is_absolute_url(u)) problems.push_back("search index '" + key + "': not an absolute url: " + u);
      if (!seen.insert(u).second) problems.push_back("search index '" + key + "': duplicate url: " + u);
    }
  }
  return problems;
}

}  // namespace infogent
