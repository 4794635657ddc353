#include "infogent/trace.hpp"

#include <fstream>

#include "infogent/text_util.hpp"

namespace infogent {

json to_json(const TraceEvent& e) {
  json j = {{"t", e.t},
            {"actor", to_string(e.actor)},
            {"kind", e.kind},
            {"payload", e.payload},
            {"outcome", to_string(e.outcome)}};
  j["error_detail"] = e.error_detail ? json(*e.error_detail) : json(nullptr);
  return j;
}

TraceEvent trace_event_from_json(const json& j) {
  TraceEvent e;
  e.t = j.at("t").get<int>();
  e.actor = actor_from_string(j.at("actor").get<std::string>());
  e.kind = j.at("kind").get<std::string>();
  e.payload = j.value("payload", json::object());
  e.outcome = outcome_from_string(j.at("outcome").get<std::string>());
  if (j.contains("error_detail") && !j["error_detail"].is_null()) {
    e.error_detail = j["error_detail"].get<std::string>();
  }
  return e;
}

std::string to_jsonl_line(const TraceEvent& e, std::string_view timestamp) {
  json j = to_json(e);
  j["timestamp"] = std::string(timestamp);
  return j.dump();
}

TraceEvent parse_trace_line(std::string_view line) {
  return trace_event_from_json(json::parse(line));
}

std::vector<TraceEvent> read_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file " + path.string());
  std::vector<TraceEvent> out;
  std::string line;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    out.push_back(parse_trace_line(line));
  }
  return out;
}

TraceRecorder::TraceRecorder() : TraceRecorder(nullptr) {}

TraceRecorder::TraceRecorder(std::ostream* sink, Clock clock)
    : sink_(sink), clock_(clock ? std::move(clock) : Clock(&text::iso8601_now)) {}

void TraceRecorder::emit(TraceEvent e) {
  if (!events_.empty() && e.t < events_.back().t) {
    throw std::logic_error("trace events must have non-decreasing t");
  }
  if (sink_ != nullptr) {
    *sink_ << to_jsonl_line(e, clock_()) << '\n';
    sink_->flush();
  }
  events_.push_back(std::move(e));
}

void TraceRecorder::ok(int t, Actor actor, std::string kind, json payload) {
  emit(TraceEvent{t, actor, std::move(kind), std::move(payload), Outcome::ok, std::nullopt});
}

void TraceRecorder::error(int t, Actor actor, std::string kind, std::string detail, json payload) {
  emit(TraceEvent{t, actor, std::move(kind), std::move(payload), Outcome::error, std::move(detail)});
}

void TraceRecorder::warning(int t, Actor actor, std::string reason, json payload) {
  payload["reason"] = std::move(reason);
  emit(TraceEvent{t, actor, "warning", std::move(payload), Outcome::ok, std::nullopt});
}

}  // namespace infogent
