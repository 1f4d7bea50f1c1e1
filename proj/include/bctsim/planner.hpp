#pragma once

// Greedy tidy-up planner and hypothetical ("what-if") plan replay.
//
// Decomposition: finish the held object first, otherwise fetch the nearest
// misplaced object that still has a usable target. Paths come from
// breadth-first search with a fixed neighbour order, so plans are
// deterministic. Fixture kinds are tried in the predicate's list order, and
// fixtures of one kind in declaration order.

#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bctsim/world.hpp"

namespace bctsim {

struct Plan {
  std::string id;
  std::string goal_ref;
  GoalVariant variant = GoalVariant::strict;
  std::vector<WorldAction> steps;
  std::int64_t valid_from_tick = 0;
  bool operator==(const Plan&) const = default;
};

struct PredictedOutcome {
  bool reachable = true;
  std::optional<std::size_t> failing_step;
  GoalStatus final_goal_status;
  bool operator==(const PredictedOutcome&) const = default;
};

/// Replays a plan on a private copy of the world. The live world is taken by
/// const reference and is never modified.
inline PredictedOutcome simulate_whatif(const WorldState& world, const std::vector<WorldAction>& steps,
                                        const GoalSpec& goal) {
  WorldState sim = world;
  PredictedOutcome out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    try {
      sim = apply_action(sim, steps[i]);
    } catch (const IllegalAction&) {
      out.reachable = false;
      out.failing_step = i;
      break;
    }
  }
  out.final_goal_status = evaluate_goal(sim, goal);
  return out;
}

inline PredictedOutcome simulate_whatif(const WorldState& world, const Plan& plan, const GoalSpec& goal) {
  return simulate_whatif(world, plan.steps, goal);
}

/// Shortest walk from the agent to any walkable cell within Manhattan
/// distance 1 of `target`. Returns nullopt when unreachable.
inline std::optional<std::vector<Direction>> path_to_adjacent(const WorldState& world, Cell target) {
  auto is_goal = [&](Cell c) { return manhattan(c, target) <= 1; };
  const Cell start = world.agent_pos;
  if (is_goal(start)) return std::vector<Direction>{};

  std::map<Cell, std::pair<Cell, Direction>> parent;
  std::deque<Cell> frontier{start};
  parent.emplace(start, std::make_pair(start, Direction::north));
  while (!frontier.empty()) {
    Cell cur = frontier.front();
    frontier.pop_front();
    for (Direction d : kDirections) {
      Cell nb = step(cur, d);
      if (!world.walkable(nb) || parent.count(nb)) continue;
      parent.emplace(nb, std::make_pair(cur, d));
      if (is_goal(nb)) {
        std::vector<Direction> path;
        for (Cell c = nb; c != start; c = parent.at(c).first) path.push_back(parent.at(c).second);
        return std::vector<Direction>(path.rbegin(), path.rend());
      }
      frontier.push_back(nb);
    }
  }
  return std::nullopt;
}

/// First fixture that can take an object of `kind` right now under `pred`.
inline const Fixture* choose_target(const WorldState& world, ObjectKind kind, const PlacementPredicate& pred) {
  auto it = pred.find(kind);
  if (it == pred.end()) return nullptr;
  for (FixtureKind fk : it->second) {
    for (const auto& f : world.fixtures) {
      if (f.kind != fk || !f.cell) continue;
      if (world.is_broken(f.id) || world.is_full(f)) continue;
      if (!path_to_adjacent(world, *f.cell)) continue;
      return &f;
    }
  }
  return nullptr;
}

/// Full action sequence that tidies every object it can under `variant`.
/// Objects without a usable target are skipped; a held object without one
/// ends the plan. May be empty.
inline std::vector<WorldAction> plan_tidy(const WorldState& world, const GoalSpec& goal, GoalVariant variant) {
  const PlacementPredicate& pred = goal.predicate(variant);
  WorldState sim = world;
  std::vector<WorldAction> steps;
  auto walk = [&](const std::vector<Direction>& path) {
    for (Direction d : path) {
      steps.push_back(WorldAction::move(d));
      sim = apply_action(sim, steps.back());
    }
  };

  if (sim.abandoned) return steps;
  // One pick-up and one place per object, plus a possibly held object.
  for (std::size_t guard = 0; guard <= 2 * world.objects.size() + 1; ++guard) {
    if (sim.agent_holding) {
      const ObjectState& held = sim.objects.at(*sim.agent_holding);
      const Fixture* target = choose_target(sim, held.kind, pred);
      if (!target) break;
      walk(*path_to_adjacent(sim, *target->cell));
      steps.push_back(WorldAction::place(target->id));
      sim = apply_action(sim, steps.back());
      continue;
    }

    std::optional<std::string> best;
    std::size_t best_len = std::numeric_limits<std::size_t>::max();
    for (const auto& [id, obj] : sim.objects) {  // map order gives the id tie-break
      if (placed_ok(sim, obj, pred)) continue;
      if (!choose_target(sim, obj.kind, pred)) continue;
      auto cell = sim.object_cell(obj);
      if (!cell) continue;
      auto path = path_to_adjacent(sim, *cell);
      if (!path) continue;
      if (path->size() < best_len) {
        best_len = path->size();
        best = id;
      }
    }
    if (!best) break;
    walk(*path_to_adjacent(sim, *sim.object_cell(sim.objects.at(*best))));
    steps.push_back(WorldAction::pick_up(*best));
    sim = apply_action(sim, steps.back());
  }
  return steps;
}

/// True when some misplaced object (or the held one) has no usable target
/// under `variant`.
inline bool goal_blocked(const WorldState& world, const GoalSpec& goal, GoalVariant variant) {
  const PlacementPredicate& pred = goal.predicate(variant);
  for (const auto& [id, obj] : world.objects) {
    if (placed_ok(world, obj, pred)) continue;
    if (!choose_target(world, obj.kind, pred)) return true;
  }
  return false;
}

}  // namespace bctsim
