#pragma once

// Affective processes: the attend -> evaluate -> prepare cycle that turns
// belief changes into appraisals, candidate goals and action tendencies.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bctsim/arguments.hpp"
#include "bctsim/conditions.hpp"
#include "bctsim/scenario.hpp"
#include "bctsim/world.hpp"

namespace bctsim {

struct Appraisal {
  std::string atom;
  std::string label;
  Valence valence = Valence::negative;
  double magnitude = 0.0;
  std::string source_process;
  std::int64_t tick = 0;
  std::string rule;
  bool operator==(const Appraisal&) const = default;
};

enum class Phase { attending, evaluating, preparing };

inline std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::attending: return "attending";
    case Phase::evaluating: return "evaluating";
    case Phase::preparing: return "preparing";
  }
  return "attending";
}

struct AffectiveProcess {
  std::string id;
  int priority_rank = 0;
  std::string goal_ref;
  Phase phase = Phase::attending;
  std::string attention_target;
  std::optional<std::size_t> focus_rule;  // index into the agent's appraisal rules
  std::int64_t attend_cursor = 0;         // belief changes older than this were already attended to
  std::vector<Appraisal> active_appraisals;
  std::vector<std::string> desirable_states;
  std::vector<std::string> candidate_goals;
  bool operator==(const AffectiveProcess&) const = default;
};

inline AffectiveProcess make_process(const ProcessDecl& d) {
  AffectiveProcess p;
  p.id = d.id;
  p.priority_rank = d.priority_rank;
  p.goal_ref = d.goal_ref;
  return p;
}

/// `action` is a world action encoding or a deliberative act id.
struct ActionTendency {
  std::string id;
  std::string action;
  std::string source_process;
  double base_urgency = 0.0;
  std::vector<std::string> supporting_arguments;
  std::int64_t created_tick = 0;
  double force = 0.0;
  bool from_plan = false;
  std::string origin;  // rule or plan that produced it
  bool operator==(const ActionTendency&) const = default;
};

inline bool is_world_action(std::string_view action) { return parse_world_action(action).has_value(); }

inline double compute_force(const ActionTendency& t, const std::vector<Argument>& args,
                            const std::set<std::string>& active) {
  return std::max(0.0, t.base_urgency + net_support(t.action, args, active));
}

/// Hooks into the deliberative layer used during action preparation.
struct PlanOracle {
  // Next step of the current plan, present only when the rest of the plan
  // is predicted to succeed.
  std::function<std::optional<WorldAction>()> next_step;
};

struct AffectContext {
  const WorldState* world = nullptr;
  const EvalContext* eval = nullptr;
  const std::vector<Commitment>* commitments = nullptr;
  PlanOracle planner;
  std::int64_t tick = 0;
};

struct Preparation {
  std::vector<std::string> desirable_states;
  std::vector<std::string> candidate_goals;
  std::vector<ActionTendency> tendencies;
};

inline std::string desirable_state(const Appraisal& a) {
  return (a.valence == Valence::negative ? "relieve(" : "sustain(") + a.atom + ")";
}

/// Step 1 lists desirable states, step 2 keeps achievable, non-conflicting
/// proposals, step 3 turns each survivor into a tendency.
inline Preparation prepare_action(const AffectiveProcess& proc, const std::vector<AppraisalRule>& rules,
                                  const AffectContext& ctx) {
  Preparation out;
  if (proc.active_appraisals.empty()) return out;

  double base = 0.0;
  for (const auto& a : proc.active_appraisals) {
    out.desirable_states.push_back(desirable_state(a));
    base = std::max(base, a.magnitude);
  }

  auto conflicts = [&](const std::string& option) {
    if (!ctx.commitments) return false;
    return std::any_of(ctx.commitments->begin(), ctx.commitments->end(), [&](const Commitment& c) {
      return c.origin == proc.goal_ref && c.atom == option && c.required_valence == Valence::negative;
    });
  };

  std::set<std::string> seen;
  for (const auto& a : proc.active_appraisals) {
    auto rule = std::find_if(rules.begin(), rules.end(), [&](const AppraisalRule& r) { return r.id == a.rule; });
    if (rule == rules.end()) continue;
    for (const auto& prop : rule->proposes) {
      std::optional<std::string> action;
      bool from_plan = false;
      if (prop.option == kPlanProposal) {
        if (ctx.planner.next_step) {
          if (auto step = ctx.planner.next_step()) action = step->encode();
        }
        from_plan = true;
      } else if (auto wa = parse_world_action(prop.option)) {
        bool legal = true;
        try {
          if (ctx.world) (void)apply_action(*ctx.world, *wa);
        } catch (const IllegalAction&) {
          legal = false;
        }
        if (legal) action = prop.option;
      } else {
        action = prop.option;
      }
      if (!action) continue;
      if (!prop.requires_.empty() && !(ctx.eval && holds(prop.requires_, *ctx.eval))) continue;
      if (conflicts(*action) || !seen.insert(*action).second) continue;
      out.candidate_goals.push_back(*action);
      ActionTendency t;
      t.action = *action;
      t.source_process = proc.id;
      t.base_urgency = base;
      t.created_tick = ctx.tick;
      t.from_plan = from_plan;
      t.origin = "appraisal:" + rule->id;
      out.tendencies.push_back(std::move(t));
    }
  }
  return out;
}

struct CycleResult {
  AffectiveProcess proc;
  std::vector<Appraisal> appraisals;
  std::vector<ActionTendency> tendencies;
  std::optional<Preparation> preparation;
  bool advanced = false;  // phase changed
};

/// Most recent change tick among the belief atoms a condition reads.
inline std::optional<std::int64_t> latest_change(const Condition& cond, const BeliefStore& beliefs) {
  std::optional<std::int64_t> best;
  for (const auto& lit : cond) {
    auto it = beliefs.find(lit.atom);
    if (it == beliefs.end()) continue;
    if (!best || it->second.changed_tick > *best) best = it->second.changed_tick;
  }
  return best;
}

/// One phase step. `rules` is the agent's full appraisal rule list; only the
/// rules owned by this process are considered.
inline CycleResult run_affective_cycle(const AffectiveProcess& proc, const std::vector<AppraisalRule>& rules,
                                       const AffectContext& ctx) {
  CycleResult out{proc, {}, {}, std::nullopt, false};
  AffectiveProcess& p = out.proc;
  const BeliefStore empty;
  const BeliefStore& beliefs = (ctx.eval && ctx.eval->beliefs) ? *ctx.eval->beliefs : empty;

  switch (proc.phase) {
    case Phase::attending: {
      std::optional<std::size_t> best;
      std::int64_t best_recency = 0;
      double best_mag = 0.0;
      for (std::size_t i = 0; i < rules.size(); ++i) {
        const auto& r = rules[i];
        if (r.process != proc.id) continue;
        if (!ctx.eval || !holds(r.when, *ctx.eval)) continue;
        auto recency = latest_change(r.when, beliefs);
        if (!recency || *recency < proc.attend_cursor) continue;
        if (!best || *recency > best_recency || (*recency == best_recency && r.magnitude > best_mag)) {
          best = i;
          best_recency = *recency;
          best_mag = r.magnitude;
        }
      }
      if (!best) return out;
      p.focus_rule = best;
      p.attention_target = rules[*best].atom;
      p.attend_cursor = ctx.tick + 1;
      p.phase = Phase::evaluating;
      out.advanced = true;
      return out;
    }
    case Phase::evaluating: {
      out.advanced = true;
      if (!p.focus_rule || *p.focus_rule >= rules.size() || !ctx.eval ||
          !holds(rules[*p.focus_rule].when, *ctx.eval)) {
        p.phase = Phase::attending;
        p.focus_rule.reset();
        return out;
      }
      const auto& r = rules[*p.focus_rule];
      Appraisal a{r.atom, r.label, r.valence, r.magnitude, proc.id, ctx.tick, r.id};
      p.active_appraisals = {a};
      out.appraisals.push_back(a);
      p.phase = Phase::preparing;
      return out;
    }
    case Phase::preparing: {
      out.advanced = true;
      Preparation prep = prepare_action(p, rules, ctx);
      p.desirable_states = prep.desirable_states;
      p.candidate_goals = prep.candidate_goals;
      out.tendencies = prep.tendencies;
      out.preparation = std::move(prep);
      p.phase = Phase::attending;
      return out;
    }
  }
  return out;
}

}  // namespace bctsim
