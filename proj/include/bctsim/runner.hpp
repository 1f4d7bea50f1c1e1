#pragma once

// Batch runs: horizon and quiescence handling, metrics rows, summaries and
// weight sweeps. No I/O here beyond writing to caller-supplied streams.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "bctsim/agent.hpp"
#include "bctsim/scenario.hpp"
#include "bctsim/state.hpp"

namespace bctsim {

inline constexpr int kQuiescenceTicks = 5;

struct RunConfig {
  std::string scenario_path;
  int ticks = 60;
  std::uint64_t seed = 1;
  std::optional<BctProfile> bct_profile;
  bool metacognition = true;
  std::map<std::string, double> weight_overrides;
  std::string trace_path;
  std::string metrics_path;

  AgentOptions agent_options() const { return AgentOptions{metacognition, bct_profile, weight_overrides}; }
};

struct MetricsRow {
  std::int64_t tick = 0;
  std::string selected_action;
  std::string winning_process;
  std::vector<double> forces;  // declared process order
  int misplaced_count = 0;
  bool strict_tidy = false;
  bool relaxed_tidy = false;
};

struct RunResult {
  SimulationState state;
  std::vector<MetricsRow> metrics;
  std::vector<std::string> process_ids;
  int ticks_run = 0;
  bool quiescent = false;
  GoalStatus final_status;
};

inline RunResult run_simulation(const ScenarioSpec& spec, const RunConfig& cfg) {
  RunResult r{instantiate(spec, cfg.seed, cfg.agent_options()), {}, {}, 0, false, {}};
  for (const auto& p : spec.agent.processes) r.process_ids.push_back(p.id);
  int idle_streak = 0;
  for (int i = 0; i < cfg.ticks; ++i) {
    advance(r.state);
    ++r.ticks_run;
    const TickReport& rep = *r.state.last_report;
    const GoalStatus g = evaluate_goal(r.state.world, r.state.goal);
    MetricsRow row;
    row.tick = rep.tick;
    row.selected_action = rep.action;
    row.winning_process = rep.winning_process;
    for (const auto& id : r.process_ids) {
      auto it = rep.forces.find(id);
      row.forces.push_back(it == rep.forces.end() ? 0.0 : it->second);
    }
    row.misplaced_count = g.misplaced_count;
    row.strict_tidy = g.strict;
    row.relaxed_tidy = g.relaxed;
    r.metrics.push_back(std::move(row));

    idle_streak = (rep.no_tendency && g.strict) ? idle_streak + 1 : 0;
    if (idle_streak >= kQuiescenceTicks) {
      r.quiescent = true;
      break;
    }
  }
  r.final_status = evaluate_goal(r.state.world, r.state.goal);
  return r;
}

inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline void write_metrics_csv(std::ostream& os, const RunResult& r) {
  os << "tick,selected_action,winning_process";
  for (const auto& id : r.process_ids) os << ",force_" << id;
  os << ",misplaced_count,strict_tidy,relaxed_tidy\n";
  for (const auto& row : r.metrics) {
    os << row.tick << ',' << row.selected_action << ',' << row.winning_process;
    for (double f : row.forces) os << ',' << fixed6(f);
    os << ',' << row.misplaced_count << ',' << (row.strict_tidy ? 1 : 0) << ',' << (row.relaxed_tidy ? 1 : 0) << '\n';
  }
}

inline std::string summary_line(const RunResult& r) {
  std::ostringstream os;
  os << "ticks=" << r.ticks_run << " strict_tidy=" << (r.final_status.strict ? 1 : 0)
     << " relaxed_tidy=" << (r.final_status.relaxed ? 1 : 0) << " abandoned=" << (r.state.world.abandoned ? 1 : 0)
     << " misplaced=" << r.final_status.misplaced_count << " countermeasures=" << r.state.countermeasures_fired;
  if (r.quiescent) os << " (quiescent)";
  return os.str();
}

struct SweepRow {
  double weight = 0.0;
  bool final_strict = false;
  bool final_relaxed = false;
  bool abandoned = false;
  int countermeasures_fired = 0;
};

/// One run per weight with the same seed; rows in input order.
inline std::vector<SweepRow> run_sweep(const ScenarioSpec& spec, const RunConfig& base, const std::string& template_id,
                                       const std::vector<double>& weights) {
  std::vector<SweepRow> rows;
  for (double w : weights) {
    RunConfig cfg = base;
    cfg.weight_overrides[template_id] = w;
    RunResult r = run_simulation(spec, cfg);
    rows.push_back({w, r.final_status.strict, r.final_status.relaxed, r.state.world.abandoned,
                    r.state.countermeasures_fired});
  }
  return rows;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "weight,final_strict,final_relaxed,abandoned,countermeasures_fired\n";
  for (const auto& r : rows)
    os << fixed6(r.weight) << ',' << (r.final_strict ? 1 : 0) << ',' << (r.final_relaxed ? 1 : 0) << ','
       << (r.abandoned ? 1 : 0) << ',' << r.countermeasures_fired << '\n';
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ScenarioSpec load_scenario(const std::string& path) { return parse_scenario(read_file(path)); }

}  // namespace bctsim
