#pragma once

// Append-only reasoning trace and its JSON Lines form.

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace bctsim {

using Json = nlohmann::ordered_json;

enum class Layer { world, reactive, deliberative, metacognitive };

inline std::string_view to_string(Layer l) {
  switch (l) {
    case Layer::world: return "world";
    case Layer::reactive: return "reactive";
    case Layer::deliberative: return "deliberative";
    case Layer::metacognitive: return "metacognitive";
  }
  return "world";
}

enum class EventKind {
  WorldEventFired,
  BeliefChange,
  AttentionShift,
  AppraisalChange,
  GoalChange,
  OptionSet,
  OptionSelected,
  TendencyInjected,
  TendencyExpired,
  ActionExecuted,
  InconsistencyDetected,
  CountermeasureApplied,
  DeliberationRequested,
  NoTendency,
};

inline std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::WorldEventFired: return "WorldEventFired";
    case EventKind::BeliefChange: return "BeliefChange";
    case EventKind::AttentionShift: return "AttentionShift";
    case EventKind::AppraisalChange: return "AppraisalChange";
    case EventKind::GoalChange: return "GoalChange";
    case EventKind::OptionSet: return "OptionSet";
    case EventKind::OptionSelected: return "OptionSelected";
    case EventKind::TendencyInjected: return "TendencyInjected";
    case EventKind::TendencyExpired: return "TendencyExpired";
    case EventKind::ActionExecuted: return "ActionExecuted";
    case EventKind::InconsistencyDetected: return "InconsistencyDetected";
    case EventKind::CountermeasureApplied: return "CountermeasureApplied";
    case EventKind::DeliberationRequested: return "DeliberationRequested";
    case EventKind::NoTendency: return "NoTendency";
  }
  return "NoTendency";
}

struct TraceEvent {
  std::int64_t tick = 0;
  std::int64_t seq = 0;
  Layer layer = Layer::world;
  EventKind kind = EventKind::WorldEventFired;
  Json payload = Json::object();
  std::vector<std::string> reasons;
  bool operator==(const TraceEvent&) const = default;
};

struct EventKey {
  std::int64_t tick = 0;
  std::int64_t seq = 0;
  auto operator<=>(const EventKey&) const = default;
};

inline EventKey key_of(const TraceEvent& e) { return {e.tick, e.seq}; }

class OutOfOrder : public std::logic_error {
 public:
  explicit OutOfOrder(const std::string& msg) : std::logic_error(msg) {}
};

using ReasoningTrace = std::vector<TraceEvent>;

/// Appends `event`, assigning its within-tick ordinal. Existing entries are
/// never touched.
inline void record(ReasoningTrace& trace, TraceEvent event) {
  if (!trace.empty() && event.tick < trace.back().tick)
    throw OutOfOrder("event at tick " + std::to_string(event.tick) + " after tick " +
                     std::to_string(trace.back().tick));
  event.seq = (!trace.empty() && trace.back().tick == event.tick) ? trace.back().seq + 1 : 0;
  trace.push_back(std::move(event));
}

inline const TraceEvent* find_event(const ReasoningTrace& trace, EventKey key) {
  for (const auto& e : trace)
    if (key_of(e) == key) return &e;
  return nullptr;
}

inline Json to_json(const TraceEvent& e) {
  Json j;
  j["tick"] = e.tick;
  j["seq"] = e.seq;
  j["layer"] = to_string(e.layer);
  j["kind"] = to_string(e.kind);
  j["payload"] = e.payload;
  j["reasons"] = e.reasons;
  return j;
}

inline void write_jsonl(std::ostream& os, const ReasoningTrace& trace) {
  for (const auto& e : trace) os << to_json(e).dump() << '\n';
}

}  // namespace bctsim
