#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "infogent/core.hpp"
#include "infogent/web.hpp"

namespace infogent {

enum class ElementRole { link, button, input, select, other };

std::string_view to_string(ElementRole r);
ElementRole element_role_from_string(std::string_view s);

struct ElementCandidate {
  int index = 0;
  ElementRole role = ElementRole::other;
  std::string label;
  bool in_viewport = true;

  friend bool operator==(const ElementCandidate&, const ElementCandidate&) = default;
};

struct Viewport {
  int width = 1280;
  int height = 720;
  friend bool operator==(const Viewport&, const Viewport&) = default;
};

struct Screenshot {
  std::vector<std::uint8_t> image;  // PNG
  int scroll_offset_px = 0;
  Viewport viewport;
};

struct ScreenshotCapture {
  std::vector<Screenshot> shots;
  bool truncated = false;
};

/// One navigator decision in the visual setting.
struct VisualNavAction {
  enum class Kind { click, select, type, press_enter, go_back, aggregate, terminate };

  Kind kind = Kind::terminate;
  int element = -1;
  std::optional<std::string> option;  // SELECT
  std::string text;                   // TYPE

  static VisualNavAction click(int e) { return {Kind::click, e, std::nullopt, {}}; }
  static VisualNavAction select(int e, std::optional<std::string> opt) { return {Kind::select, e, std::move(opt), {}}; }
  static VisualNavAction type(int e, std::string t) { return {Kind::type, e, std::nullopt, std::move(t)}; }
  static VisualNavAction press_enter() { return {Kind::press_enter, -1, std::nullopt, {}}; }
  static VisualNavAction go_back() { return {Kind::go_back, -1, std::nullopt, {}}; }
  static VisualNavAction aggregate() { return {Kind::aggregate, -1, std::nullopt, {}}; }
  static VisualNavAction terminate() { return {Kind::terminate, -1, std::nullopt, {}}; }

  bool needs_element() const { return kind == Kind::click || kind == Kind::select || kind == Kind::type; }
  /// Trace name: CLICK, SELECT, TYPE, PRESS_ENTER, GO_BACK, AGGREGATE, TERMINATE.
  std::string name() const;
  std::string to_string() const;
  json to_json() const;

  friend bool operator==(const VisualNavAction&, const VisualNavAction&) = default;
};

/// Raw interactable as found in document order, before filtering.
struct RawElement {
  ElementRole role = ElementRole::other;
  std::string label;
  bool hidden = false;
  bool disabled = false;
  bool in_viewport = true;
};

inline constexpr std::size_t kMaxCandidates = 50;

/// Drops hidden and disabled elements, lists in-viewport elements before
/// off-viewport ones (document order within each group) and caps the list
/// at kMaxCandidates. `source_positions`, when given, receives the raw
/// position of each kept candidate.
std::vector<ElementCandidate> select_candidates(const std::vector<RawElement>& raw,
                                                std::vector<std::size_t>* source_positions = nullptr);

/// Scroll offsets for a top-to-bottom capture at full-viewport strides.
struct CapturePlan {
  std::vector<int> offsets;
  bool truncated = false;
};
CapturePlan plan_capture(int page_height, int viewport_height, int max_screenshots);

/// Minimal 8-bit grayscale PNG encoder.
std::vector<std::uint8_t> encode_png_gray(int width, int height, const std::vector<std::uint8_t>& pixels);

class BrowserDriver {
 public:
  virtual ~BrowserDriver() = default;

  virtual std::string open(const std::string& url) = 0;
  virtual std::string current_url() const = 0;

  /// Executes exactly one primitive (CLICK, SELECT, TYPE, PRESS_ENTER,
  /// GO_BACK) and returns the url afterwards. Throws StaleElement when the
  /// element index is not valid for the action and NavigationTimeout when the
  /// page does not settle.
  virtual std::string act(const VisualNavAction& action) = 0;

  virtual ScreenshotCapture capture_page_screenshots(int max_screenshots) = 0;
  virtual Screenshot viewport_screenshot() = 0;
  virtual std::vector<ElementCandidate> extract_candidates() = 0;
};

/// Simulated browser over a FixtureWeb. The search home has a query input
/// and a Search button; result pages list five links plus a Next link.
class FixtureBrowser : public BrowserDriver {
 public:
  static constexpr std::string_view kSearchHome = "https://search.example/";

  explicit FixtureBrowser(std::shared_ptr<const FixtureWeb> web, Viewport viewport = {});

  std::string open(const std::string& url) override;
  std::string current_url() const override { return current_.url; }
  std::string act(const VisualNavAction& action) override;
  ScreenshotCapture capture_page_screenshots(int max_screenshots) override;
  Screenshot viewport_screenshot() override;
  std::vector<ElementCandidate> extract_candidates() override;

  /// Visible text of the current page (fixture body, or the rendered
  /// search page).
  std::string page_text() const;
  int page_height() const;
  const std::vector<std::string>& history() const { return history_; }

 private:
  struct Element {
    RawElement raw;
    std::optional<std::string> target;
    std::vector<std::string> options;
    std::map<std::string, std::string> option_targets;
    bool search_input = false;
    bool search_submit = false;
  };
  struct PageState {
    std::string url;
    std::string title;
    std::string text;
    std::vector<Element> elements;
    std::map<std::size_t, std::string> values;  // typed text per raw element
    std::optional<std::size_t> focused;
  };

  PageState build_page(const std::string& url) const;
  void navigate(const std::string& url);
  const Element& resolve(int index, std::size_t* raw_pos);
  Screenshot render(int offset) const;

  std::shared_ptr<const FixtureWeb> web_;
  mutable FixtureSearch search_;
  Viewport viewport_;
  PageState current_;
  std::vector<ElementCandidate> last_candidates_;
  std::vector<std::size_t> last_positions_;
  std::vector<std::string> history_;
};

/// W3C WebDriver client (chromedriver, geckodriver, ...). Candidates are
/// collected by an injected script and addressed through a data attribute.
class WebDriverBrowser : public BrowserDriver {
 public:
  /// Creates a session at `endpoint` (e.g. http://localhost:9515).
  explicit WebDriverBrowser(std::string endpoint, json capabilities = json::object(), int timeout_seconds = 30);
  /// Reads WEBDRIVER_URL.
  static std::unique_ptr<WebDriverBrowser> from_env();
  ~WebDriverBrowser() override;

  WebDriverBrowser(const WebDriverBrowser&) = delete;
  WebDriverBrowser& operator=(const WebDriverBrowser&) = delete;

  std::string open(const std::string& url) override;
  std::string current_url() const override;
  std::string act(const VisualNavAction& action) override;
  ScreenshotCapture capture_page_screenshots(int max_screenshots) override;
  Screenshot viewport_screenshot() override;
  std::vector<ElementCandidate> extract_candidates() override;

  const std::string& session_id() const { return session_; }

 private:
  json command(const std::string& method, const std::string& path, const json& body) const;
  json execute(const std::string& script, const json& args = json::array()) const;
  std::string element_id(int index);
  Viewport viewport_size() const;

  std::string endpoint_;
  std::string session_;
  int timeout_seconds_;
  std::vector<std::size_t> positions_;
};

}  // namespace infogent
