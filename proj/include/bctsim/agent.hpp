#pragma once

// Three-layer agent: perception, reactive rules, periodic deliberation with
// what-if planning, metacognitive monitoring and control, and force-based
// selection at the moment of action.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "bctsim/affect.hpp"
#include "bctsim/arguments.hpp"
#include "bctsim/metacog.hpp"
#include "bctsim/planner.hpp"
#include "bctsim/state.hpp"
#include "bctsim/trace.hpp"

namespace bctsim {

/// Raised under the ceos profile when an action reaches execution without
/// passing through the tendency pool.
class RoutingViolation : public std::logic_error {
 public:
  explicit RoutingViolation(const std::string& msg) : std::logic_error(msg) {}
};

inline void emit(SimulationState& s, Layer layer, EventKind kind, Json payload, std::vector<std::string> reasons = {}) {
  TraceEvent e;
  e.tick = s.world.tick;
  e.layer = layer;
  e.kind = kind;
  e.payload = std::move(payload);
  e.reasons = std::move(reasons);
  record(s.trace, std::move(e));
}

inline const ProcessDecl* process_decl(const SimulationState& s, std::string_view id) { return s.config.process(id); }

inline int rank_of(const SimulationState& s, const std::string& process) {
  const ProcessDecl* d = process_decl(s, process);
  return d ? d->priority_rank : std::numeric_limits<int>::max();
}

inline EvalContext eval_context(const SimulationState& s) {
  EvalContext ctx;
  ctx.beliefs = &s.beliefs;
  for (const auto& p : s.processes)
    for (const auto& a : p.active_appraisals) ctx.appraisal_labels.insert(a.label);
  for (const auto& c : s.config.commitments) ctx.commitment_atoms.insert(c.atom);
  return ctx;
}

// ---------------------------------------------------------------------------
// Plans

inline bool intention_active(const SimulationState& s) { return s.plan && s.plan_cursor < s.plan->steps.size(); }

inline std::vector<WorldAction> remaining_steps(const SimulationState& s) {
  if (!intention_active(s)) return {};
  return {s.plan->steps.begin() + static_cast<std::ptrdiff_t>(s.plan_cursor), s.plan->steps.end()};
}

/// Next plan step, provided the rest of the plan still replays cleanly.
inline std::optional<WorldAction> plan_next_step(const SimulationState& s) {
  if (!intention_active(s)) return std::nullopt;
  if (!simulate_whatif(s.world, remaining_steps(s), s.goal).reachable) return std::nullopt;
  return s.plan->steps[s.plan_cursor];
}

inline const ProcessDecl* plan_owner_for(const SimulationState& s, GoalVariant v) {
  const ProcessDecl* best = nullptr;
  for (const auto& p : s.config.processes)
    if (p.plans_for == v && (!best || p.priority_rank < best->priority_rank)) best = &p;
  return best;
}

// ---------------------------------------------------------------------------
// Perception

inline std::map<std::string, std::string> percept_atoms(const SimulationState& s) {
  auto flag = [](bool b) { return std::string(b ? "true" : "false"); };
  const WorldState& w = s.world;
  std::map<std::string, std::string> out;
  out["agent_pos"] = std::to_string(w.agent_pos.x) + "," + std::to_string(w.agent_pos.y);
  out["holding"] = w.agent_holding.value_or("none");
  for (const auto& [id, obj] : w.objects) out["loc(" + id + ")"] = to_string(obj.location);
  for (const auto& f : w.fixtures) out["broken(" + f.id + ")"] = flag(w.is_broken(f.id));
  GoalStatus g = evaluate_goal(w, s.goal);
  out["misplaced_count"] = std::to_string(g.misplaced_count);
  out["strict_tidy"] = flag(g.strict);
  out["relaxed_tidy"] = flag(g.relaxed);
  out["goal_variant"] = std::string(to_string(s.active_variant));
  out["goal_blocked"] = flag(!w.abandoned && goal_blocked(w, s.goal, s.active_variant));
  out["intention_active"] = flag(intention_active(s));
  out["abandoned"] = flag(w.abandoned);
  for (const auto& f : w.facts) out[f] = "true";
  return out;
}

inline Json belief_payload(const std::string& atom, const std::optional<std::string>& value,
                           const std::optional<std::string>& previous) {
  Json j;
  j["atom"] = atom;
  j["value"] = value ? Json(*value) : Json(nullptr);
  j["previous"] = previous ? Json(*previous) : Json(nullptr);
  return j;
}

/// Brings perceptual beliefs in line with the world; mental atoms set by
/// action preparation are left alone.
inline void perceive(SimulationState& s) {
  const auto percepts = percept_atoms(s);
  const std::int64_t tick = s.world.tick;
  std::map<std::string, std::pair<std::optional<std::string>, std::optional<std::string>>> changes;
  for (const auto& [atom, value] : percepts) {
    auto it = s.beliefs.find(atom);
    if (it == s.beliefs.end()) {
      changes[atom] = {value, std::nullopt};
    } else if (it->second.value != value) {
      changes[atom] = {value, it->second.value};
    }
  }
  for (const auto& [atom, b] : s.beliefs)
    if (!b.mental && !percepts.count(atom)) changes[atom] = {std::nullopt, b.value};

  for (const auto& [atom, change] : changes) {
    if (change.first) s.beliefs[atom] = Belief{*change.first, tick, false};
    else s.beliefs.erase(atom);
    emit(s, Layer::reactive, EventKind::BeliefChange, belief_payload(atom, change.first, change.second));
  }
}

// ---------------------------------------------------------------------------
// Tendency pool

/// Adds a tendency, or refreshes the existing one with the same action and
/// source. Only genuinely new tendencies are traced.
inline std::string pool_insert(SimulationState& s, ActionTendency t, Layer layer) {
  for (auto& existing : s.tendency_pool) {
    if (existing.action == t.action && existing.source_process == t.source_process) {
      existing.created_tick = t.created_tick;
      existing.base_urgency = t.base_urgency;
      existing.from_plan = existing.from_plan || t.from_plan;
      return existing.id;
    }
  }
  t.id = "t" + std::to_string(s.next_tendency_id++);
  TendencyItem item = assess_tendency(t, s.world, s.goal);
  item.tendency = t;
  emit(s, layer, EventKind::TendencyInjected, tendency_payload(item));
  s.tendency_pool.push_back(std::move(t));
  return s.tendency_pool.back().id;
}

inline void remove_tendency(SimulationState& s, const std::string& id, const std::string& reason) {
  auto it = std::find_if(s.tendency_pool.begin(), s.tendency_pool.end(),
                         [&](const ActionTendency& t) { return t.id == id; });
  if (it == s.tendency_pool.end()) return;
  Json j{{"tendency", it->id}, {"action", it->action}, {"process", it->source_process}, {"reason", reason}};
  s.tendency_pool.erase(it);
  if (!reason.empty()) emit(s, Layer::deliberative, EventKind::TendencyExpired, std::move(j));
}

/// A tendency created at tick c can be selected at ticks c .. c+ttl-1.
inline bool expired(const ActionTendency& t, std::int64_t tick, int ttl) { return tick - t.created_tick >= ttl; }

inline void purge_expired(SimulationState& s) {
  std::vector<std::string> ids;
  for (const auto& t : s.tendency_pool)
    if (expired(t, s.world.tick, s.config.tendency_ttl)) ids.push_back(t.id);
  for (const auto& id : ids) remove_tendency(s, id, "ttl");
}

// ---------------------------------------------------------------------------
// Reactive layer

inline std::vector<ActionTendency> reactive_step(const SimulationState& s) {
  std::vector<ActionTendency> out;
  const EvalContext ctx = eval_context(s);
  for (const auto& r : s.config.reactive_rules) {
    if (!holds(r.when, ctx)) continue;
    ActionTendency t;
    t.source_process = r.process;
    t.base_urgency = r.urgency;
    t.created_tick = s.world.tick;
    t.origin = "reactive:" + r.id;
    if (r.emits == kPlanStep) {
      auto step = plan_next_step(s);
      if (!step) continue;
      t.action = step->encode();
      t.from_plan = true;
      if (!s.plan_owner.empty()) t.source_process = s.plan_owner;
    } else {
      t.action = r.emits;
    }
    out.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Argument case over the current pool

inline std::vector<OptionInfo> pool_options(const SimulationState& s) {
  std::map<std::string, OptionInfo> by_id;
  for (const auto& t : s.tendency_pool) {
    auto& o = by_id[t.action];
    o.id = t.action;
    o.proposers.insert(t.source_process);
    o.from_plan = o.from_plan || t.from_plan;
  }
  std::vector<OptionInfo> out;
  for (auto& [id, o] : by_id) out.push_back(std::move(o));
  return out;
}

inline std::vector<Argument> build_pool_case(const SimulationState& s, const std::vector<OptionInfo>& options) {
  const EvalContext ctx = eval_context(s);
  std::vector<Argument> args = build_case(options, s.config.argument_templates, ctx);
  std::set<std::string> present;
  for (const auto& o : options) present.insert(o.id);
  std::set<std::string> ids;
  for (const auto& a : args) ids.insert(a.id);
  for (const auto& a : s.countermeasure_arguments) {
    if (!present.count(a.option) || ids.count(a.id)) continue;
    Argument c = a;
    if (c.undercuts && !ids.count(*c.undercuts)) c.undercuts.reset();
    args.push_back(std::move(c));
    ids.insert(a.id);
  }
  return args;
}

/// Recomputes every pooled tendency's force against the current case. Done
/// silently each tick right before selection.
inline void refresh_forces(SimulationState& s) {
  const auto options = pool_options(s);
  s.arguments = build_pool_case(s, options);
  const auto active = active_set(s.arguments);
  for (auto& t : s.tendency_pool) {
    t.force = compute_force(t, s.arguments, active);
    t.supporting_arguments.clear();
    for (const auto& a : s.arguments)
      if (a.option == t.action && a.polarity == Polarity::pro && active.count(a.id))
        t.supporting_arguments.push_back(a.id);
  }
}

inline Json case_payload(const CaseReport& r, const std::vector<Argument>& args) {
  Json scores = Json::object();
  for (const auto& [o, v] : r.scores) scores[o] = v;
  Json expl = Json::object();
  for (const auto& [o, entries] : r.explanation) {
    Json arr = Json::array();
    for (const auto& e : entries)
      arr.push_back({{"argument", e.argument}, {"polarity", to_string(e.polarity)}, {"weight", e.weight}, {"active", e.active}});
    expl[o] = arr;
  }
  Json arg_ids = Json::array();
  for (const auto& a : args) arg_ids.push_back(a.id);
  return Json{{"option", r.recommended}, {"ranking", r.ranking}, {"scores", scores}, {"explanation", expl},
              {"arguments", arg_ids}};
}

/// Builds the case over the pooled options and records the option set and,
/// when any argument is active, the recommendation with its reasons.
inline void deliberate_case(SimulationState& s) {
  const auto options = pool_options(s);
  if (options.empty()) return;
  std::vector<std::string> ids;
  for (const auto& o : options) ids.push_back(o.id);
  s.arguments = build_pool_case(s, options);
  emit(s, Layer::deliberative, EventKind::OptionSet,
       Json{{"options", ids}, {"goal_variant", to_string(s.active_variant)}});

  const CaseReport report = aggregate(ids, s.arguments);
  const auto active = active_set(s.arguments);
  std::vector<std::string> reasons;
  for (const auto& a : s.arguments)
    if (a.option == report.recommended && active.count(a.id)) reasons.push_back(a.id);
  if (reasons.empty())
    for (const auto& a : s.arguments)
      if (active.count(a.id)) reasons.push_back(a.id);
  if (reasons.empty()) return;  // nothing to explain the choice with
  emit(s, Layer::deliberative, EventKind::OptionSelected, case_payload(report, s.arguments), reasons);
}

// ---------------------------------------------------------------------------
// Deliberative layer

/// Keeps the current plan while it targets the active goal variant and its
/// remaining steps replay cleanly; otherwise replaces it. Then offers the next
/// step to the pool.
inline void plan_and_inject(SimulationState& s) {
  const ProcessDecl* owner = plan_owner_for(s, s.active_variant);
  if (!owner) return;

  bool keep = intention_active(s) && s.plan->variant == s.active_variant &&
              simulate_whatif(s.world, remaining_steps(s), s.goal).reachable;
  if (!keep) {
    if (s.plan) {
      std::vector<std::string> stale;
      for (const auto& t : s.tendency_pool)
        if (t.from_plan) stale.push_back(t.id);
      for (const auto& id : stale) remove_tendency(s, id, "superseded");
      s.plan.reset();
      s.plan_cursor = 0;
      s.plan_owner.clear();
    }
    auto steps = plan_tidy(s.world, s.goal, s.active_variant);
    if (!steps.empty()) {
      Plan p{"plan" + std::to_string(s.next_plan_id++), owner->goal_ref, s.active_variant, steps, s.world.tick};
      Json sj = Json::array();
      for (const auto& st : steps) sj.push_back(st.encode());
      emit(s, Layer::deliberative, EventKind::GoalChange,
           Json{{"process", owner->id},
                {"plan", p.id},
                {"goal_variant", to_string(p.variant)},
                {"desirable_states", Json::array({"tidy(" + std::string(to_string(p.variant)) + ")"})},
                {"candidate_goals", Json::array()},
                {"steps", sj}});
      s.plan = std::move(p);
      s.plan_cursor = 0;
      s.plan_owner = owner->id;
    }
  }
  if (auto step = plan_next_step(s)) {
    ActionTendency t;
    t.action = step->encode();
    t.source_process = s.plan_owner;
    t.base_urgency = process_decl(s, s.plan_owner)->plan_urgency;
    t.created_tick = s.world.tick;
    t.from_plan = true;
    t.origin = "plan:" + s.plan->id;
    pool_insert(s, std::move(t), Layer::deliberative);
  }
}

/// Steps every affective process one phase (once per tick), then refreshes
/// planning and the argument case. A same-tick request re-runs only the
/// planning and case stages.
inline void deliberative_step(SimulationState& s) {
  const std::int64_t tick = s.world.tick;
  if (s.last_process_step_tick != tick) {
    s.last_process_step_tick = tick;
    const auto& rules = s.config.appraisal_rules;

    std::vector<CycleResult> results;
    std::optional<std::string> current;
    for (auto& proc : s.processes) {
      const EvalContext ectx = eval_context(s);
      AffectContext actx;
      actx.world = &s.world;
      actx.eval = &ectx;
      actx.commitments = &s.config.commitments;
      const std::string owner_id = proc.id;
      actx.planner.next_step = [&s, owner_id]() -> std::optional<WorldAction> {
        if (s.plan_owner != owner_id) return std::nullopt;
        return plan_next_step(s);
      };
      actx.tick = tick;
      CycleResult r = run_affective_cycle(proc, rules, actx);
      proc = r.proc;  // later processes see earlier appraisals and proposals
      if (r.preparation) {
        for (const auto& g : r.preparation->candidate_goals)
          if (!is_world_action(g)) s.beliefs["proposed(" + g + ")"] = Belief{"true", tick, true};
      }
      if (r.advanced && !current) current = proc.id;
      results.push_back(std::move(r));
    }

    if (current && current != s.focus_process) {
      const AffectiveProcess& p =
          *std::find_if(s.processes.begin(), s.processes.end(), [&](const auto& x) { return x.id == *current; });
      emit(s, Layer::deliberative, EventKind::AttentionShift,
           Json{{"process", p.id},
                {"previous", s.focus_process ? Json(*s.focus_process) : Json(nullptr)},
                {"target", p.attention_target},
                {"phase", to_string(p.phase)}});
      s.focus_process = current;
    }
    for (auto& r : results) {
      for (const auto& a : r.appraisals) emit(s, Layer::deliberative, EventKind::AppraisalChange, appraisal_payload(a));
      if (r.preparation) {
        emit(s, Layer::deliberative, EventKind::GoalChange,
             Json{{"process", r.proc.id},
                  {"desirable_states", r.preparation->desirable_states},
                  {"candidate_goals", r.preparation->candidate_goals}});
        for (auto& t : r.tendencies) pool_insert(s, std::move(t), Layer::deliberative);
      }
    }
  }
  plan_and_inject(s);
  deliberate_case(s);
}

inline bool deliberation_due(const SimulationState& s) {
  return s.world.tick % s.config.deliberation_period == 0 || s.deliberation_requested;
}

// ---------------------------------------------------------------------------
// Metacognitive control

inline void control(SimulationState& s, const Inconsistency& finding) {
  Json base;
  base["finding"] = {{"tick", finding.event ? finding.event->tick : -1}, {"seq", finding.event ? finding.event->seq : -1}};
  const CountermeasureSpec* cm = match_countermeasure(finding, s.config.countermeasures);
  if (!cm) {
    base["countermeasure"] = nullptr;
    base["outcome"] = "none";
    emit(s, Layer::metacognitive, EventKind::CountermeasureApplied, base);
    return;
  }
  base["countermeasure"] = cm->id;
  if (cm->type == CountermeasureSpec::Type::redescription) {
    const ArgumentTemplate* tmpl = s.config.argument_template(cm->template_id);
    const std::string option = finding.item_kind == ItemKind::tendency ? finding.item_atom : tmpl->option;
    double weight = finding.commitment.weight;
    if (cm->weight) weight = *cm->weight;
    if (auto it = s.weight_overrides.find(tmpl->id); it != s.weight_overrides.end()) weight = it->second;
    Argument arg;
    arg.id = argument_id(tmpl->id, option);
    arg.option = option;
    arg.polarity = tmpl->polarity;
    arg.weight = weight;
    arg.grounds = {"committed(" + finding.commitment.atom + ")"};
    arg.source_process = tmpl->source_process;
    if (tmpl->undercuts) arg.undercuts = argument_id(*tmpl->undercuts, option);
    auto it = std::find_if(s.countermeasure_arguments.begin(), s.countermeasure_arguments.end(),
                           [&](const Argument& a) { return a.id == arg.id; });
    if (it != s.countermeasure_arguments.end()) *it = arg;
    else s.countermeasure_arguments.push_back(arg);
    base["type"] = "redescription";
    base["argument"] = arg.id;
    base["option"] = option;
    base["weight"] = weight;
    base["outcome"] = "applied";
    ++s.countermeasures_fired;
    emit(s, Layer::metacognitive, EventKind::CountermeasureApplied, base);
    return;
  }
  s.active_variant = cm->goal_variant;
  if (finding.item_kind == ItemKind::tendency) remove_tendency(s, finding.tendency_id, "retracted");
  if (finding.item_kind == ItemKind::goal_change && finding.event) {
    // The rejected goal's own proposals go with it.
    if (const TraceEvent* src = find_event(s.trace, *finding.event); src && src->payload.contains("candidate_goals")) {
      const std::string proc = src->payload.at("process").get<std::string>();
      std::set<std::string> goals;
      for (const auto& g : src->payload.at("candidate_goals")) goals.insert(g.get<std::string>());
      std::vector<std::string> ids;
      for (const auto& t : s.tendency_pool)
        if (t.source_process == proc && goals.count(t.action)) ids.push_back(t.id);
      for (const auto& id : ids) remove_tendency(s, id, "retracted");
    }
  }
  base["type"] = "replanning";
  base["goal_variant"] = to_string(cm->goal_variant);
  base["outcome"] = "applied";
  ++s.countermeasures_fired;
  emit(s, Layer::metacognitive, EventKind::CountermeasureApplied, base);
  emit(s, Layer::metacognitive, EventKind::DeliberationRequested, Json{{"countermeasure", cm->id}});
  s.deliberation_requested = true;
}

inline constexpr int kMaxMetacogRounds = 4;

/// Monitor the new part of the trace, apply countermeasures, and honour any
/// same-tick deliberation request, repeating while new findings appear.
inline void metacognitive_step(SimulationState& s) {
  for (int round = 0; round < kMaxMetacogRounds; ++round) {
    auto findings = monitor(s.trace, s.config.commitments, s.monitor_cursor);
    if (!s.trace.empty()) s.monitor_cursor = key_of(s.trace.back());
    if (findings.empty()) break;
    for (const auto& f : findings) emit(s, Layer::metacognitive, EventKind::InconsistencyDetected, finding_payload(f));
    for (const auto& f : findings) control(s, f);
    if (s.deliberation_requested) {
      deliberative_step(s);
      s.deliberation_requested = false;
    }
  }
}

// ---------------------------------------------------------------------------
// Selection and execution

struct Selection {
  std::optional<ActionTendency> tendency;
  std::map<std::string, double> forces;
};

/// Highest force wins; ties go to the lower priority rank, then the smaller
/// action encoding. A tendency with zero force is not strong enough to act on.
inline Selection select_action(const SimulationState& s) {
  Selection out;
  for (const auto& p : s.config.processes) out.forces[p.id] = 0.0;
  const ActionTendency* best = nullptr;
  for (const auto& t : s.tendency_pool) {
    if (expired(t, s.world.tick, s.config.tendency_ttl)) continue;
    auto& f = out.forces[t.source_process];
    f = std::max(f, t.force);
    if (!(t.force > 0)) continue;
    if (!best) {
      best = &t;
      continue;
    }
    auto kt = net_key(t.force), kb = net_key(best->force);
    if (kt != kb) {
      if (kt > kb) best = &t;
      continue;
    }
    int rt = rank_of(s, t.source_process), rb = rank_of(s, best->source_process);
    if (rt != rb) {
      if (rt < rb) best = &t;
      continue;
    }
    if (t.action < best->action) best = &t;
  }
  if (best) out.tendency = *best;
  return out;
}

/// Executes one tendency as this tick's action. Anything not in the pool is
/// a routing bypass: an error under ceos, a traced warning under prime.
inline void execute_tendency(SimulationState& s, const ActionTendency& t, TickReport& report) {
  const bool pooled = std::any_of(s.tendency_pool.begin(), s.tendency_pool.end(),
                                  [&](const ActionTendency& p) { return p.id == t.id && p.action == t.action; });
  Json j{{"tendency", t.id}, {"action", t.action}, {"process", t.source_process}, {"force", t.force}};
  if (!pooled) {
    if (s.bct_profile == BctProfile::ceos) throw RoutingViolation("action " + t.action + " bypassed the tendency pool");
    j["routing"] = "bypass";
    ++s.routing_warnings;
  }

  std::string outcome = "ok";
  WorldState next;
  auto wa = parse_world_action(t.action);
  try {
    next = apply_action(s.world, wa ? *wa : WorldAction::idle());
  } catch (const IllegalAction& e) {
    outcome = "failed";
    j["reason"] = e.reason();
    next = apply_action(s.world, WorldAction::idle());
  }
  j["kind"] = wa ? "world" : "deliberative";
  j["outcome"] = outcome;

  const bool plan_step = intention_active(s) && s.plan->steps[s.plan_cursor].encode() == t.action;
  emit(s, Layer::reactive, EventKind::ActionExecuted, j);

  if (pooled) {
    remove_tendency(s, t.id, "");
    std::vector<std::string> same;
    for (const auto& p : s.tendency_pool)
      if (p.action == t.action) same.push_back(p.id);
    for (const auto& id : same) remove_tendency(s, id, "satisfied");
  }
  if (plan_step) {
    if (outcome == "ok") {
      if (++s.plan_cursor >= s.plan->steps.size()) {
        s.plan.reset();
        s.plan_cursor = 0;
        s.plan_owner.clear();
      }
    } else {
      s.plan.reset();
      s.plan_cursor = 0;
      s.plan_owner.clear();
    }
  }
  report.action = t.action;
  report.winning_process = t.source_process;
  report.failed = outcome != "ok";
  s.world = std::move(next);
}

/// One full tick: events, perception, reactive layer, deliberation when due,
/// metacognition, then selection and exactly one world action.
inline void advance(SimulationState& s) {
  TickReport report;
  report.tick = s.world.tick;

  auto fired = step_events(s.world, s.events);
  s.world = std::move(fired.world);
  for (const auto& ev : fired.fired)
    emit(s, Layer::world, EventKind::WorldEventFired, Json{{"effect", describe(ev.effect)}, {"fire_tick", ev.fire_tick}});

  perceive(s);
  for (auto& t : reactive_step(s)) pool_insert(s, std::move(t), Layer::reactive);
  if (deliberation_due(s)) {
    deliberative_step(s);
    s.deliberation_requested = false;
  }
  if (s.metacognition) metacognitive_step(s);

  purge_expired(s);
  refresh_forces(s);
  Selection sel = select_action(s);
  report.forces = sel.forces;
  if (sel.tendency) {
    execute_tendency(s, *sel.tendency, report);
  } else {
    emit(s, Layer::reactive, EventKind::NoTendency, Json{{"pool_size", s.tendency_pool.size()}});
    report.no_tendency = true;
    s.world = apply_action(s.world, WorldAction::idle());
  }
  s.last_report = report;
}

inline SimulationState tick(SimulationState s) {
  advance(s);
  return s;
}

}  // namespace bctsim
