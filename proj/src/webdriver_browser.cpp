#include <cstdlib>

#include "infogent/browser.hpp"
#include "infogent/http.hpp"
#include "infogent/text_util.hpp"

namespace infogent {

namespace {

constexpr std::string_view kElementKey = "element-6066-11e4-a52e-4f735466cecf";
constexpr std::string_view kEnterKey = "\xEE\x80\x87";  // U+E007

// Collects interactables in document order and tags each with its raw
// position so later commands can address it by CSS selector.
constexpr std::string_view kCollectScript = R"JS(
const sel = 'a[href], button, input:not([type=hidden]), select, textarea, [role=button], [role=link]';
const out = [];
document.querySelectorAll(sel).forEach((el, i) => {
  el.setAttribute('data-infogent-pos', String(i));
  const r = el.getBoundingClientRect();
  const st = window.getComputedStyle(el);
  const hidden = st.display === 'none' || st.visibility === 'hidden' || (r.width === 0 && r.height === 0);
  const tag = el.tagName.toLowerCase();
  let role = 'other';
  if (tag === 'a' || el.getAttribute('role') === 'link') role = 'link';
  else if (tag === 'button' || el.getAttribute('role') === 'button' ||
           (tag === 'input' && ['submit', 'button', 'reset'].includes(el.type))) role = 'button';
  else if (tag === 'input' || tag === 'textarea') role = 'input';
  else if (tag === 'select') role = 'select';
  const label = (el.getAttribute('aria-label') || el.innerText || el.value || el.placeholder ||
                 el.title || '').trim().replace(/\s+/g, ' ').slice(0, 120);
  const inView = r.bottom > 0 && r.top < window.innerHeight && r.right > 0 && r.left < window.innerWidth;
  out.push({role: role, label: label, hidden: hidden, disabled: !!el.disabled, in_viewport: inView});
});
return out;
)JS";

constexpr std::string_view kGeometryScript = R"JS(
return {height: Math.max(document.body ? document.body.scrollHeight : 0,
                         document.documentElement.scrollHeight),
        vw: window.innerWidth, vh: window.innerHeight};
)JS";

constexpr std::string_view kSelectScript = R"JS(
const el = arguments[0];
const want = arguments[1];
for (const o of el.options) {
  if (o.text.trim() === want || o.value === want) {
    el.value = o.value;
    el.dispatchEvent(new Event('change', {bubbles: true}));
    return true;
  }
}
return false;
)JS";

}  // namespace

WebDriverBrowser::WebDriverBrowser(std::string endpoint, json capabilities, int timeout_seconds)
    : endpoint_(std::move(endpoint)), timeout_seconds_(timeout_seconds) {
  while (!endpoint_.empty() && endpoint_.back() == '/') endpoint_.pop_back();
  const json res = command("POST", "/session", {{"capabilities", {{"alwaysMatch", capabilities}}}});
  session_ = res.value("sessionId", std::string{});
  if (session_.empty()) throw FatalBackendError("webdriver did not return a session id");
}

std::unique_ptr<WebDriverBrowser> WebDriverBrowser::from_env() {
  const char* url = std::getenv("WEBDRIVER_URL");
  if (url == nullptr || *url == '\0') throw ConfigError("WEBDRIVER_URL is not set");
  return std::make_unique<WebDriverBrowser>(url);
}

WebDriverBrowser::~WebDriverBrowser() {
  if (session_.empty()) return;
  try {
    command("DELETE", "/session/" + session_, nullptr);
  } catch (const std::exception&) {
  }
}

json WebDriverBrowser::command(const std::string& method, const std::string& path, const json& body) const {
  http::Request req;
  req.method = method;
  req.url = endpoint_ + path;
  req.body = body.is_null() ? std::string{} : body.dump();
  req.timeout_seconds = timeout_seconds_;
  const auto res = http::send(req);
  if (!res.transport_ok()) {
    if (text::contains_icase(res.error, "timeout")) throw NavigationTimeout("webdriver: " + res.error);
    throw FatalBackendError("webdriver transport failure: " + res.error);
  }
  json j;
  try {
    j = res.body.empty() ? json::object() : json::parse(res.body);
  } catch (const json::exception&) {
    throw FatalBackendError("webdriver returned non-JSON body (HTTP " + std::to_string(res.status) + ")");
  }
  if (!res.ok()) {
    const json value = j.value("value", json::object());
    const std::string error = value.is_object() ? value.value("error", std::string("unknown error")) : "unknown error";
    const std::string message = value.is_object() ? value.value("message", std::string{}) : std::string{};
    if (error == "stale element reference" || error == "no such element" || error == "element not interactable" ||
        error == "invalid element state") {
      throw StaleElement("webdriver: " + error + ": " + message);
    }
    if (error == "timeout" || error == "script timeout") throw NavigationTimeout("webdriver: " + message);
    throw FatalBackendError("webdriver: " + error + ": " + message);
  }
  if (j.contains("sessionId") && !j.contains("value")) return j;
  json value = j.value("value", json());
  if (value.is_object() && !value.contains("sessionId") && j.contains("sessionId")) value["sessionId"] = j["sessionId"];
  return value;
}

json WebDriverBrowser::execute(const std::string& script, const json& args) const {
  return command("POST", "/session/" + session_ + "/execute/sync", {{"script", script}, {"args", args}});
}

std::string WebDriverBrowser::open(const std::string& url) {
  command("POST", "/session/" + session_ + "/url", {{"url", url}});
  positions_.clear();
  return current_url();
}

std::string WebDriverBrowser::current_url() const {
  const json v = command("GET", "/session/" + session_ + "/url", nullptr);
  return v.is_string() ? v.get<std::string>() : std::string{};
}

std::vector<ElementCandidate> WebDriverBrowser::extract_candidates() {
  const json raw_json = execute(std::string(kCollectScript));
  std::vector<RawElement> raw;
  if (raw_json.is_array()) {
    for (const auto& e : raw_json) {
      raw.push_back({element_role_from_string(e.value("role", std::string("other"))), e.value("label", std::string{}),
                     e.value("hidden", false), e.value("disabled", false), e.value("in_viewport", true)});
    }
  }
  return select_candidates(raw, &positions_);
}

std::string WebDriverBrowser::element_id(int index) {
  if (positions_.empty()) extract_candidates();
  if (index < 0 || static_cast<std::size_t>(index) >= positions_.size()) {
    throw StaleElement("element index " + std::to_string(index) + " is not in the current candidate set");
  }
  const std::string selector =
      "[data-infogent-pos=\"" + std::to_string(positions_[static_cast<std::size_t>(index)]) + "\"]";
  const json v = command("POST", "/session/" + session_ + "/element", {{"using", "css selector"}, {"value", selector}});
  if (!v.is_object() || !v.contains(kElementKey)) throw StaleElement("element " + std::to_string(index) + " vanished");
  return v[std::string(kElementKey)].get<std::string>();
}

std::string WebDriverBrowser::act(const VisualNavAction& action) {
  using Kind = VisualNavAction::Kind;
  const std::string base = "/session/" + session_;
  switch (action.kind) {
    case Kind::click:
      command("POST", base + "/element/" + element_id(action.element) + "/click", json::object());
      break;
    case Kind::type: {
      const std::string id = element_id(action.element);
      command("POST", base + "/element/" + id + "/clear", json::object());
      command("POST", base + "/element/" + id + "/value", {{"text", action.text}});
      break;
    }
    case Kind::select: {
      const std::string id = element_id(action.element);
      const json ok = execute(std::string(kSelectScript),
                              json::array({{{std::string(kElementKey), id}}, action.option.value_or("")}));
      if (!ok.is_boolean() || !ok.get<bool>()) throw StaleElement("option not found on element");
      break;
    }
    case Kind::press_enter: {
      const json active = command("GET", base + "/element/active", nullptr);
      if (!active.is_object() || !active.contains(kElementKey)) throw StaleElement("no focused element");
      command("POST", base + "/element/" + active[std::string(kElementKey)].get<std::string>() + "/value",
              {{"text", std::string(kEnterKey)}});
      break;
    }
    case Kind::go_back:
      command("POST", base + "/back", json::object());
      break;
    case Kind::aggregate:
    case Kind::terminate:
      throw std::invalid_argument(action.name() + " is not a browser primitive");
  }
  positions_.clear();
  return current_url();
}

Viewport WebDriverBrowser::viewport_size() const {
  const json g = execute(std::string(kGeometryScript));
  return Viewport{g.value("vw", 1280), g.value("vh", 720)};
}

Screenshot WebDriverBrowser::viewport_screenshot() {
  execute("window.scrollTo(0, 0); return null;");
  const json v = command("GET", "/session/" + session_ + "/screenshot", nullptr);
  return Screenshot{text::base64_decode(v.get<std::string>()), 0, viewport_size()};
}

ScreenshotCapture WebDriverBrowser::capture_page_screenshots(int max_screenshots) {
  const json g = execute(std::string(kGeometryScript));
  const Viewport vp{g.value("vw", 1280), g.value("vh", 720)};
  const auto plan = plan_capture(g.value("height", vp.height), vp.height, max_screenshots);
  ScreenshotCapture out;
  out.truncated = plan.truncated;
  for (int off : plan.offsets) {
    execute("window.scrollTo(0, arguments[0]); return null;", json::array({off}));
    const json v = command("GET", "/session/" + session_ + "/screenshot", nullptr);
    out.shots.push_back(Screenshot{text::base64_decode(v.get<std::string>()), off, vp});
  }
  execute("window.scrollTo(0, 0); return null;");
  return out;
}

}  // namespace infogent
