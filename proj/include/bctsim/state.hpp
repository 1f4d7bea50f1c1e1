#pragma once

// Complete simulation state and its construction from a validated scenario.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "bctsim/affect.hpp"
#include "bctsim/arguments.hpp"
#include "bctsim/conditions.hpp"
#include "bctsim/planner.hpp"
#include "bctsim/scenario.hpp"
#include "bctsim/trace.hpp"
#include "bctsim/world.hpp"

namespace bctsim {

class InvalidSpec : public std::runtime_error {
 public:
  explicit InvalidSpec(const std::string& msg, ValidationReport report = {})
      : std::runtime_error(msg), report_(std::move(report)) {}
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

struct AgentOptions {
  bool metacognition = true;
  std::optional<BctProfile> bct_profile;
  std::map<std::string, double> weight_overrides;  // argument template id -> weight
};

/// What the last tick selected and executed; feeds the metrics exporter.
struct TickReport {
  std::int64_t tick = 0;
  std::string action = "idle";
  std::string winning_process;
  std::map<std::string, double> forces;  // per declared process
  bool no_tendency = false;
  bool failed = false;
};

struct SimulationState {
  WorldState world;
  BeliefStore beliefs;
  std::vector<AffectiveProcess> processes;  // priority-rank order
  std::vector<ActionTendency> tendency_pool;
  std::vector<Argument> arguments;               // case used at the last selection or deliberation
  std::vector<Argument> countermeasure_arguments;  // added by redescription, kept for the run
  ReasoningTrace trace;
  AgentConfig config;
  GoalSpec goal;
  std::vector<WorldEvent> events;
  BctProfile bct_profile = BctProfile::prime;
  std::uint64_t rng_seed = 0;
  bool metacognition = true;
  std::map<std::string, double> weight_overrides;

  GoalVariant active_variant = GoalVariant::strict;
  std::optional<Plan> plan;
  std::size_t plan_cursor = 0;
  std::string plan_owner;

  std::optional<std::string> focus_process;
  std::optional<std::int64_t> last_process_step_tick;
  bool deliberation_requested = false;
  std::optional<EventKey> monitor_cursor;

  std::uint64_t next_tendency_id = 0;
  std::uint64_t next_plan_id = 0;
  int countermeasures_fired = 0;
  int routing_warnings = 0;
  std::optional<TickReport> last_report;
};

namespace detail {

/// Fisher-Yates over a fixed engine so placements do not depend on the
/// standard library's distribution implementations.
inline void shuffle_cells(std::vector<Cell>& cells, std::mt19937_64& rng) {
  for (std::size_t i = cells.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(cells[i - 1], cells[j]);
  }
}

}  // namespace detail

inline WorldState initial_world(const ScenarioSpec& spec, std::uint64_t seed) {
  const StartingState& st = spec.starting_state;
  WorldState w;
  w.width = st.width;
  w.height = st.height;
  w.agent_pos = st.agent_pos;
  w.fixtures = spec.ontology.fixtures;
  w.facts.insert(st.facts.begin(), st.facts.end());

  std::set<Cell> taken{st.agent_pos};
  std::vector<const ObjectDecl*> unplaced;
  for (const auto& o : spec.ontology.objects) {
    auto it = st.objects.find(o.id);
    if (it == st.objects.end()) {
      unplaced.push_back(&o);
      continue;
    }
    if (!it->second.location) continue;  // absent until spawned
    w.objects[o.id] = ObjectState{o.id, o.kind, *it->second.location};
    if (it->second.location->kind == Location::Kind::floor) taken.insert(it->second.location->cell);
  }
  if (unplaced.empty()) return w;

  std::vector<Cell> pool;
  auto consider = [&](Cell c) {
    if (w.walkable(c) && !taken.count(c)) pool.push_back(c);
  };
  if (st.scatter_cells.empty()) {
    for (int y = 0; y < st.height; ++y)
      for (int x = 0; x < st.width; ++x) consider({x, y});
  } else {
    for (Cell c : st.scatter_cells) consider(c);
  }
  if (pool.size() < unplaced.size()) throw InvalidSpec("not enough free floor cells to scatter objects");
  std::mt19937_64 rng(seed);
  detail::shuffle_cells(pool, rng);
  for (std::size_t i = 0; i < unplaced.size(); ++i)
    w.objects[unplaced[i]->id] = ObjectState{unplaced[i]->id, unplaced[i]->kind, Location::on_floor(pool[i])};
  return w;
}

inline SimulationState instantiate(const ScenarioSpec& spec, std::uint64_t seed, const AgentOptions& options = {}) {
  ValidationReport rep = validate_scenario(spec);
  if (!rep.ok()) throw InvalidSpec("scenario has validation errors", rep);

  SimulationState s;
  s.config = spec.agent;
  for (const auto& [id, w] : options.weight_overrides) {
    if (w < 0) throw InvalidSpec("weight override for " + id + " is negative");
    bool found = false;
    for (auto& t : s.config.argument_templates) {
      if (t.id == id) {
        t.weight = w;
        found = true;
      }
    }
    if (!found) throw InvalidSpec("weight override names unknown template " + id);
  }
  s.weight_overrides = options.weight_overrides;
  s.world = initial_world(spec, seed);
  s.goal = spec.goal;
  s.events = spec.events;
  s.bct_profile = options.bct_profile.value_or(spec.bct_profile);
  s.rng_seed = seed;
  s.metacognition = options.metacognition;

  std::vector<ProcessDecl> decls = spec.agent.processes;
  std::stable_sort(decls.begin(), decls.end(),
                   [](const ProcessDecl& a, const ProcessDecl& b) { return a.priority_rank < b.priority_rank; });
  for (const auto& d : decls) s.processes.push_back(make_process(d));
  return s;
}

}  // namespace bctsim
