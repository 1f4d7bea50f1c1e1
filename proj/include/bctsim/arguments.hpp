#pragma once

// Weighted pro/con arguments over options, undercut-based defeat, and
// aggregation into a ranked recommendation with a full explanation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "bctsim/conditions.hpp"

namespace bctsim {

enum class Polarity { pro, con };

inline std::string_view to_string(Polarity p) { return p == Polarity::pro ? "pro" : "con"; }

struct Argument {
  std::string id;
  std::string option;
  Polarity polarity = Polarity::pro;
  double weight = 0.0;
  std::vector<std::string> grounds;
  std::string source_process;
  std::optional<std::string> undercuts;
  bool operator==(const Argument&) const = default;
};

/// Option selectors: an exact option id, `*` for every option, `@plan` for
/// options that come from the current plan, or `@<process>` for options
/// proposed by that process.
struct ArgumentTemplate {
  std::string id;
  Condition trigger;
  Polarity polarity = Polarity::pro;
  double weight = 0.0;
  std::string option;
  std::optional<std::string> undercuts;  // template id
  std::string source_process;
  bool library_only = false;  // instantiated only by metacognitive redescription
  bool operator==(const ArgumentTemplate&) const = default;
};

class CyclicUndercut : public std::runtime_error {
 public:
  explicit CyclicUndercut(const std::string& where) : std::runtime_error("cyclic undercut involving " + where) {}
};

inline std::string argument_id(const std::string& template_id, const std::string& option) {
  return template_id + ":" + option;
}

struct OptionInfo {
  std::string id;
  std::set<std::string> proposers;  // process ids
  bool from_plan = false;
};

inline bool selector_matches(const std::string& selector, const OptionInfo& opt) {
  if (selector == "*") return true;
  if (selector == "@plan") return opt.from_plan;
  if (!selector.empty() && selector.front() == '@') return opt.proposers.count(selector.substr(1)) > 0;
  return selector == opt.id;
}

/// One argument per (template, option) pair whose trigger holds, in template
/// order then option order. An undercut is attached only when its target
/// argument (same option, undercut template) was also instantiated.
inline std::vector<Argument> build_case(const std::vector<OptionInfo>& options,
                                        const std::vector<ArgumentTemplate>& templates, const EvalContext& ctx) {
  std::vector<Argument> out;
  for (const auto& t : templates) {
    if (t.library_only || !holds(t.trigger, ctx)) continue;
    for (const auto& opt : options) {
      if (!selector_matches(t.option, opt)) continue;
      Argument a;
      a.id = argument_id(t.id, opt.id);
      a.option = opt.id;
      a.polarity = t.polarity;
      a.weight = t.weight;
      for (const auto& lit : t.trigger) a.grounds.push_back(to_string(lit));
      a.source_process = t.source_process;
      if (t.undercuts) a.undercuts = argument_id(*t.undercuts, opt.id);
      out.push_back(std::move(a));
    }
  }
  std::set<std::string> ids;
  for (const auto& a : out) ids.insert(a.id);
  for (auto& a : out)
    if (a.undercuts && !ids.count(*a.undercuts)) a.undercuts.reset();
  return out;
}

inline std::vector<OptionInfo> plain_options(const std::vector<std::string>& ids) {
  std::vector<OptionInfo> out;
  for (const auto& id : ids) out.push_back({id, {}, false});
  return out;
}

/// Undercut edges are evaluated in topological order: an argument is active
/// iff no active argument undercuts it. Weights play no part in defeat.
inline std::set<std::string> active_set(const std::vector<Argument>& args) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < args.size(); ++i) index.emplace(args[i].id, i);

  std::vector<std::vector<std::size_t>> attackers(args.size());
  std::vector<std::size_t> indegree(args.size(), 0);
  std::vector<std::vector<std::size_t>> targets(args.size());
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (!args[i].undercuts) continue;
    auto it = index.find(*args[i].undercuts);
    if (it == index.end()) continue;
    attackers[it->second].push_back(i);
    targets[i].push_back(it->second);
    ++indegree[it->second];
  }

  std::vector<std::size_t> order;
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < args.size(); ++i)
    if (indegree[i] == 0) ready.push_back(i);
  while (!ready.empty()) {
    std::size_t i = ready.back();
    ready.pop_back();
    order.push_back(i);
    for (std::size_t t : targets[i])
      if (--indegree[t] == 0) ready.push_back(t);
  }
  if (order.size() != args.size()) {
    for (std::size_t i = 0; i < args.size(); ++i)
      if (indegree[i] != 0) throw CyclicUndercut(args[i].id);
  }

  std::vector<bool> active(args.size(), false);
  for (std::size_t i : order) {
    active[i] = std::none_of(attackers[i].begin(), attackers[i].end(), [&](std::size_t a) { return active[a]; });
  }
  std::set<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i)
    if (active[i]) out.insert(args[i].id);
  return out;
}

struct ExplanationEntry {
  std::string argument;
  Polarity polarity = Polarity::pro;
  double weight = 0.0;
  bool active = false;
  bool operator==(const ExplanationEntry&) const = default;
};

struct CaseReport {
  std::map<std::string, double> scores;
  std::vector<std::string> ranking;
  std::string recommended;
  std::map<std::string, std::vector<ExplanationEntry>> explanation;
};

/// Sort key for nets. Sums of decimal weights pick up rounding noise, so nets
/// are compared on a 1e-9 grid; anything closer counts as a tie.
inline std::int64_t net_key(double net) { return std::llround(net * 1e9); }

inline std::vector<std::string> rank_options(const std::map<std::string, double>& scores) {
  std::vector<std::string> ranking;
  for (const auto& [id, s] : scores) ranking.push_back(id);
  std::stable_sort(ranking.begin(), ranking.end(), [&](const std::string& a, const std::string& b) {
    return net_key(scores.at(a)) > net_key(scores.at(b));
  });
  return ranking;
}

inline CaseReport aggregate(const std::vector<std::string>& options, const std::vector<Argument>& args) {
  if (options.empty()) throw std::invalid_argument("aggregate: no options");
  CaseReport r;
  for (const auto& o : options) {
    r.scores[o] = 0.0;
    r.explanation[o];
  }
  for (const auto& a : args)
    if (!r.scores.count(a.option)) throw std::invalid_argument("argument " + a.id + " targets unknown option");

  const auto active = active_set(args);
  for (const auto& a : args) {
    bool on = active.count(a.id) > 0;
    if (on) r.scores[a.option] += a.polarity == Polarity::pro ? a.weight : -a.weight;
    r.explanation[a.option].push_back({a.id, a.polarity, a.weight, on});
  }
  r.ranking = rank_options(r.scores);  // scores is keyed by id, so ties stay lexicographic
  r.recommended = r.ranking.front();
  return r;
}

/// Net weight of active arguments targeting `option`.
inline double net_support(const std::string& option, const std::vector<Argument>& args,
                          const std::set<std::string>& active) {
  double pro = 0.0;
  double con = 0.0;
  for (const auto& a : args) {
    if (a.option != option || !active.count(a.id)) continue;
    (a.polarity == Polarity::pro ? pro : con) += a.weight;
  }
  return pro - con;
}

}  // namespace bctsim
