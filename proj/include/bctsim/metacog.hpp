#pragma once

// Metacognitive monitoring: consistency of appraisals, goal changes and
// tendencies with the commitments implied by the initial goal.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bctsim/affect.hpp"
#include "bctsim/scenario.hpp"
#include "bctsim/trace.hpp"
#include "bctsim/world.hpp"

namespace bctsim {

struct GoalChangeItem {
  std::string process;
  std::vector<std::string> desirable_states;
  bool operator==(const GoalChangeItem&) const = default;
};

/// A tendency together with the single-action what-if facts the check needs.
struct TendencyItem {
  ActionTendency tendency;
  bool abandons = false;
  bool undoes_placement = false;
  bool operator==(const TendencyItem&) const = default;
};

using MonitoredItem = std::variant<Appraisal, GoalChangeItem, TendencyItem>;

struct Inconsistency {
  Commitment commitment;
  ItemKind item_kind = ItemKind::any;
  std::string item_atom;  // evaluation atom, desirable state or action encoding
  std::optional<EventKey> event;
  std::string tendency_id;  // set for tendency findings
  bool operator==(const Inconsistency&) const = default;
};

/// What-if of one action against the strict goal. A pick_up that lifts a
/// correctly placed object counts as undoing a placement.
inline TendencyItem assess_tendency(const ActionTendency& t, const WorldState& world, const GoalSpec& goal) {
  TendencyItem item{t, false, false};
  auto wa = parse_world_action(t.action);
  if (!wa) return item;
  item.abandons = wa->kind == WorldAction::Kind::abandon;
  if (wa->kind == WorldAction::Kind::pick_up) {
    auto it = world.objects.find(wa->target);
    if (it != world.objects.end() && placed_ok(world, it->second, goal.strict)) {
      try {
        WorldState after = apply_action(world, *wa);
        item.undoes_placement = !placed_ok(after, after.objects.at(wa->target), goal.strict);
      } catch (const IllegalAction&) {
      }
    }
  }
  return item;
}

inline std::optional<Inconsistency> check_consistency(const MonitoredItem& item,
                                                      const std::vector<Commitment>& commitments) {
  if (const auto* a = std::get_if<Appraisal>(&item)) {
    for (const auto& c : commitments)
      if (c.atom == a->atom && c.required_valence != a->valence)
        return Inconsistency{c, ItemKind::appraisal, a->atom, std::nullopt, {}};
    return std::nullopt;
  }
  if (const auto* g = std::get_if<GoalChangeItem>(&item)) {
    // Wanting to sustain what the goal rejects, or to relieve what it requires.
    for (const auto& c : commitments) {
      const std::string contrary =
          (c.required_valence == Valence::negative ? "sustain(" : "relieve(") + c.atom + ")";
      for (const auto& s : g->desirable_states)
        if (s == contrary) return Inconsistency{c, ItemKind::goal_change, c.atom, std::nullopt, {}};
    }
    return std::nullopt;
  }
  const auto& t = std::get<TendencyItem>(item);
  if ((t.abandons || t.undoes_placement) && !commitments.empty())
    return Inconsistency{commitments.front(), ItemKind::tendency, t.tendency.action, std::nullopt, t.tendency.id};
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Trace payloads for monitored kinds

inline Json appraisal_payload(const Appraisal& a) {
  Json j;
  j["process"] = a.source_process;
  j["rule"] = a.rule;
  j["atom"] = a.atom;
  j["label"] = a.label;
  j["valence"] = to_string(a.valence);
  j["magnitude"] = a.magnitude;
  return j;
}

inline Json tendency_payload(const TendencyItem& item) {
  Json j;
  j["tendency"] = item.tendency.id;
  j["action"] = item.tendency.action;
  j["process"] = item.tendency.source_process;
  j["base_urgency"] = item.tendency.base_urgency;
  j["origin"] = item.tendency.origin;
  j["from_plan"] = item.tendency.from_plan;
  j["whatif"] = {{"abandons", item.abandons}, {"undoes_placement", item.undoes_placement}};
  return j;
}

/// Rebuilds the monitored item carried by a trace event, if it is of a
/// flagged kind.
inline std::optional<MonitoredItem> item_from_event(const TraceEvent& e) {
  const Json& p = e.payload;
  switch (e.kind) {
    case EventKind::AppraisalChange: {
      Appraisal a;
      a.source_process = p.at("process").get<std::string>();
      a.rule = p.at("rule").get<std::string>();
      a.atom = p.at("atom").get<std::string>();
      a.label = p.at("label").get<std::string>();
      a.valence = p.at("valence").get<std::string>() == "positive" ? Valence::positive : Valence::negative;
      a.magnitude = p.at("magnitude").get<double>();
      a.tick = e.tick;
      return a;
    }
    case EventKind::GoalChange: {
      GoalChangeItem g;
      g.process = p.at("process").get<std::string>();
      g.desirable_states = p.at("desirable_states").get<std::vector<std::string>>();
      return g;
    }
    case EventKind::TendencyInjected: {
      TendencyItem t;
      t.tendency.id = p.at("tendency").get<std::string>();
      t.tendency.action = p.at("action").get<std::string>();
      t.tendency.source_process = p.at("process").get<std::string>();
      t.tendency.base_urgency = p.at("base_urgency").get<double>();
      t.tendency.origin = p.at("origin").get<std::string>();
      t.tendency.from_plan = p.at("from_plan").get<bool>();
      t.tendency.created_tick = e.tick;
      t.abandons = p.at("whatif").at("abandons").get<bool>();
      t.undoes_placement = p.at("whatif").at("undoes_placement").get<bool>();
      return t;
    }
    default:
      return std::nullopt;
  }
}

/// Findings for every flagged event strictly after `since` (all events when
/// `since` is empty), in trace order.
inline std::vector<Inconsistency> monitor(const ReasoningTrace& trace, const std::vector<Commitment>& commitments,
                                          std::optional<EventKey> since) {
  std::vector<Inconsistency> out;
  for (const auto& e : trace) {
    if (since && !(key_of(e) > *since)) continue;
    auto item = item_from_event(e);
    if (!item) continue;
    if (auto f = check_consistency(*item, commitments)) {
      f->event = key_of(e);
      out.push_back(std::move(*f));
    }
  }
  return out;
}

inline Json finding_payload(const Inconsistency& f) {
  Json j;
  j["event"] = {{"tick", f.event ? f.event->tick : -1}, {"seq", f.event ? f.event->seq : -1}};
  j["item_kind"] = to_string(f.item_kind);
  j["item_atom"] = f.item_atom;
  j["commitment"] = {{"atom", f.commitment.atom},
                     {"required_valence", to_string(f.commitment.required_valence)},
                     {"origin", f.commitment.origin}};
  if (!f.tendency_id.empty()) j["tendency"] = f.tendency_id;
  return j;
}

/// First library entry (declaration order) whose pattern matches.
inline const CountermeasureSpec* match_countermeasure(const Inconsistency& f,
                                                      const std::vector<CountermeasureSpec>& library) {
  for (const auto& c : library) {
    if (c.match_kind != ItemKind::any && c.match_kind != f.item_kind) continue;
    if (c.match_atom && *c.match_atom != f.item_atom) continue;
    return &c;
  }
  return nullptr;
}

}  // namespace bctsim
