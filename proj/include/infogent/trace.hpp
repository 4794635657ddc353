#pragma once

#include <filesystem>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "infogent/core.hpp"

namespace infogent {

/// Serializes one event as a single JSONL line (no trailing newline).
/// The timestamp is written alongside the TraceEvent fields.
std::string to_jsonl_line(const TraceEvent& e, std::string_view timestamp);

/// Parses one JSONL line back into an event. The timestamp is ignored.
TraceEvent parse_trace_line(std::string_view line);

json to_json(const TraceEvent& e);
TraceEvent trace_event_from_json(const json& j);

std::vector<TraceEvent> read_trace_file(const std::filesystem::path& path);

/// Accumulates the events of one run and optionally streams them to a sink,
/// flushing after every line. Events must arrive with non-decreasing t.
class TraceRecorder {
 public:
  using Clock = std::function<std::string()>;

  TraceRecorder();
  explicit TraceRecorder(std::ostream* sink, Clock clock = {});

  void emit(TraceEvent e);

  void ok(int t, Actor actor, std::string kind, json payload = json::object());
  void error(int t, Actor actor, std::string kind, std::string detail, json payload = json::object());
  void warning(int t, Actor actor, std::string reason, json payload = json::object());

  const std::vector<TraceEvent>& events() const { return events_; }
  std::vector<TraceEvent> take() { return std::move(events_); }

 private:
  std::ostream* sink_ = nullptr;
  Clock clock_;
  std::vector<TraceEvent> events_;
};

}  // namespace infogent
