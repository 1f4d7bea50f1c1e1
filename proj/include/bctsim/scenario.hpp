#pragma once

// Declarative scenario documents: ontology, starting state, event schedule,
// goal, agent configuration and behaviour-change profile.
//
// The file format is a single closed-schema JSON document. Unknown keys are
// rejected; omitted optional fields take the defaults below.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bctsim/arguments.hpp"
#include "bctsim/conditions.hpp"
#include "bctsim/world.hpp"

namespace bctsim {

enum class Valence { positive, negative };

inline std::string_view to_string(Valence v) { return v == Valence::positive ? "positive" : "negative"; }

enum class BctProfile { prime, ceos };

inline std::string_view to_string(BctProfile p) { return p == BctProfile::prime ? "prime" : "ceos"; }

inline std::optional<BctProfile> parse_profile(std::string_view s) {
  if (s == "prime") return BctProfile::prime;
  if (s == "ceos") return BctProfile::ceos;
  return std::nullopt;
}

inline constexpr int kDefaultDeliberationPeriod = 3;
inline constexpr int kDefaultTendencyTtl = 2;
inline constexpr int kDefaultGridSize = 8;

struct ProcessDecl {
  std::string id;
  int priority_rank = 0;
  std::string goal_ref;
  double plan_urgency = 0.5;
  std::optional<GoalVariant> plans_for;  // owns plans for this goal variant
  bool operator==(const ProcessDecl&) const = default;
};

/// `emits` is a world action encoding, a deliberative act id, or `@plan_step`
/// (the next step of the current plan, attributed to the plan's owner).
struct ReactiveRule {
  std::string id;
  std::string process;
  Condition when;
  std::string emits;
  double urgency = 0.0;
  bool operator==(const ReactiveRule&) const = default;
};

inline constexpr std::string_view kPlanStep = "@plan_step";
inline constexpr std::string_view kPlanProposal = "@plan";

struct Proposal {
  std::string option;  // option id, world action encoding, or `@plan`
  Condition requires_;
  bool operator==(const Proposal&) const = default;
};

struct AppraisalRule {
  std::string id;
  std::string process;
  Condition when;
  std::string atom;   // what is evaluated (situation or option)
  std::string label;  // how it is evaluated
  Valence valence = Valence::negative;
  double magnitude = 0.0;
  std::vector<Proposal> proposes;
  bool operator==(const AppraisalRule&) const = default;
};

struct Commitment {
  std::string atom;
  Valence required_valence = Valence::negative;
  std::string origin;
  double weight = 1.0;
  bool operator==(const Commitment&) const = default;
};

enum class ItemKind { any, appraisal, goal_change, tendency };

inline std::string_view to_string(ItemKind k) {
  switch (k) {
    case ItemKind::any: return "any";
    case ItemKind::appraisal: return "appraisal";
    case ItemKind::goal_change: return "goal_change";
    case ItemKind::tendency: return "tendency";
  }
  return "any";
}

inline std::optional<ItemKind> parse_item_kind(std::string_view s) {
  for (ItemKind k : {ItemKind::any, ItemKind::appraisal, ItemKind::goal_change, ItemKind::tendency})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

struct CountermeasureSpec {
  enum class Type { redescription, replanning };
  std::string id;
  ItemKind match_kind = ItemKind::any;
  std::optional<std::string> match_atom;
  Type type = Type::redescription;
  std::string template_id;             // redescription
  std::optional<double> weight;        // redescription; falls back to the commitment weight
  GoalVariant goal_variant = GoalVariant::relaxed;  // replanning
  bool operator==(const CountermeasureSpec&) const = default;
};

struct AgentConfig {
  std::vector<ProcessDecl> processes;
  std::vector<ReactiveRule> reactive_rules;
  std::vector<AppraisalRule> appraisal_rules;
  std::vector<ArgumentTemplate> argument_templates;
  std::vector<CountermeasureSpec> countermeasures;
  std::vector<Commitment> commitments;
  int deliberation_period = kDefaultDeliberationPeriod;
  int tendency_ttl = kDefaultTendencyTtl;
  bool operator==(const AgentConfig&) const = default;

  const ProcessDecl* process(std::string_view id) const {
    for (const auto& p : processes)
      if (p.id == id) return &p;
    return nullptr;
  }
  const ArgumentTemplate* argument_template(std::string_view id) const {
    for (const auto& t : argument_templates)
      if (t.id == id) return &t;
    return nullptr;
  }
};

struct ObjectDecl {
  std::string id;
  ObjectKind kind = ObjectKind::book;
  bool operator==(const ObjectDecl&) const = default;
};

struct Ontology {
  std::vector<ObjectKind> object_kinds{ObjectKind::book, ObjectKind::toy};
  std::vector<ObjectDecl> objects;
  std::vector<Fixture> fixtures;
  std::vector<std::string> relations;
  bool operator==(const Ontology&) const = default;

  const ObjectDecl* object(std::string_view id) const {
    for (const auto& o : objects)
      if (o.id == id) return &o;
    return nullptr;
  }
  const Fixture* fixture(std::string_view id) const {
    for (const auto& f : fixtures)
      if (f.id == id) return &f;
    return nullptr;
  }
};

/// Explicit placement of a declared object; `absent` objects only enter the
/// world through a spawn event.
struct InitialPlacement {
  std::optional<Location> location;  // nullopt = absent
  bool operator==(const InitialPlacement&) const = default;
};

struct StartingState {
  enum class Placement { scattered, fixed };
  int width = kDefaultGridSize;
  int height = kDefaultGridSize;
  Cell agent_pos{0, 0};
  Placement placement = Placement::scattered;
  std::vector<Cell> scatter_cells;  // empty = every free floor cell
  std::map<std::string, InitialPlacement> objects;
  std::vector<std::string> facts;
  bool operator==(const StartingState&) const = default;
};

struct Meta {
  int format_version = 1;
  std::string name;
  std::string description;
  bool operator==(const Meta&) const = default;
};

struct ScenarioSpec {
  Meta meta;
  Ontology ontology;
  StartingState starting_state;
  std::vector<WorldEvent> events;
  GoalSpec goal = GoalSpec::room_default();
  AgentConfig agent;
  BctProfile bct_profile = BctProfile::prime;
  bool operator==(const ScenarioSpec&) const = default;
};

// ---------------------------------------------------------------------------
// Errors

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& msg)
      : std::runtime_error("parse error at " + std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string path, const std::string& msg)
      : std::runtime_error("schema error at " + (path.empty() ? std::string("<root>") : path) + ": " + msg),
        path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

using nlohmann::json;

/// Walks one JSON object, tracking its path and the keys consumed, so that
/// leftover (unknown) keys can be rejected.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw SchemaError(path_, "expected object");
  }

  std::string child(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  bool has(std::string_view key) const { return j_.contains(std::string(key)); }

  const json* get(std::string_view key) {
    seen_.insert(std::string(key));
    auto it = j_.find(std::string(key));
    if (it == j_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  const json& require(std::string_view key) {
    const json* v = get(key);
    if (!v) throw SchemaError(child(key), "missing required key");
    return *v;
  }

  std::string string(std::string_view key, std::optional<std::string> fallback = std::nullopt) {
    const json* v = get(key);
    if (!v) {
      if (fallback) return *fallback;
      throw SchemaError(child(key), "missing required key");
    }
    if (!v->is_string()) throw SchemaError(child(key), "expected string");
    return v->get<std::string>();
  }

  std::optional<std::string> opt_string(std::string_view key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) throw SchemaError(child(key), "expected string");
    return v->get<std::string>();
  }

  double number(std::string_view key, std::optional<double> fallback = std::nullopt) {
    const json* v = get(key);
    if (!v) {
      if (fallback) return *fallback;
      throw SchemaError(child(key), "missing required key");
    }
    if (!v->is_number()) throw SchemaError(child(key), "expected number");
    return v->get<double>();
  }

  std::optional<double> opt_number(std::string_view key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_number()) throw SchemaError(child(key), "expected number");
    return v->get<double>();
  }

  std::int64_t integer(std::string_view key, std::optional<std::int64_t> fallback = std::nullopt) {
    const json* v = get(key);
    if (!v) {
      if (fallback) return *fallback;
      throw SchemaError(child(key), "missing required key");
    }
    if (!v->is_number_integer()) throw SchemaError(child(key), "expected integer");
    return v->get<std::int64_t>();
  }

  std::optional<std::int64_t> opt_integer(std::string_view key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) throw SchemaError(child(key), "expected integer");
    return v->get<std::int64_t>();
  }

  bool boolean(std::string_view key, bool fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw SchemaError(child(key), "expected boolean");
    return v->get<bool>();
  }

  std::vector<std::string> strings(std::string_view key) {
    std::vector<std::string> out;
    const json* v = get(key);
    if (!v) return out;
    if (!v->is_array()) throw SchemaError(child(key), "expected array of strings");
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_string()) throw SchemaError(child(key) + "[" + std::to_string(i) + "]", "expected string");
      out.push_back((*v)[i].get<std::string>());
    }
    return out;
  }

  const json* array(std::string_view key) {
    const json* v = get(key);
    if (v && !v->is_array()) throw SchemaError(child(key), "expected array");
    return v;
  }

  /// Rejects keys that were never asked for.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw SchemaError(child(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline std::string index_path(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

inline Cell parse_cell(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    throw SchemaError(path, "expected [x, y] integer pair");
  return {j[0].get<int>(), j[1].get<int>()};
}

inline json cell_json(Cell c) { return json::array({c.x, c.y}); }

inline Condition parse_cond(ObjectReader& r, std::string_view key) {
  try {
    return parse_condition(r.strings(key));
  } catch (const ConditionError& e) {
    throw SchemaError(r.child(key), e.what());
  }
}

inline json cond_json(const Condition& c) {
  json out = json::array();
  for (const auto& l : c) out.push_back(to_string(l));
  return out;
}

inline Valence parse_valence(const std::string& s, const std::string& path) {
  if (s == "positive") return Valence::positive;
  if (s == "negative") return Valence::negative;
  throw SchemaError(path, "expected positive|negative");
}

inline GoalVariant parse_variant(const std::string& s, const std::string& path) {
  if (s == "strict") return GoalVariant::strict;
  if (s == "relaxed") return GoalVariant::relaxed;
  throw SchemaError(path, "expected strict|relaxed");
}

inline Location parse_location(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  const json* floor = r.get("floor");
  auto fixture = r.opt_string("fixture");
  r.finish();
  if (floor && fixture) throw SchemaError(path, "location has both floor and fixture");
  if (floor) return Location::on_floor(parse_cell(*floor, r.child("floor")));
  if (fixture) return Location::on_fixture(*fixture);
  throw SchemaError(path, "location needs floor or fixture");
}

inline json location_json(const Location& l) {
  if (l.kind == Location::Kind::floor) return json{{"floor", cell_json(l.cell)}};
  return json{{"fixture", l.fixture}};
}

inline PlacementPredicate parse_predicate(const json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected object");
  PlacementPredicate p;
  for (auto it = j.begin(); it != j.end(); ++it) {
    auto kind = parse_object_kind(it.key());
    if (!kind) throw SchemaError(path + "." + it.key(), "unknown object kind");
    if (!it->is_array()) throw SchemaError(path + "." + it.key(), "expected array of fixture kinds");
    std::vector<FixtureKind> kinds;
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto& v = (*it)[i];
      auto fk = v.is_string() ? parse_fixture_kind(v.get<std::string>()) : std::nullopt;
      if (!fk) throw SchemaError(index_path(path + "." + it.key(), i), "unknown fixture kind");
      kinds.push_back(*fk);
    }
    p[*kind] = std::move(kinds);
  }
  return p;
}

inline json predicate_json(const PlacementPredicate& p) {
  json out = json::object();
  for (const auto& [kind, fks] : p) {
    json arr = json::array();
    for (auto fk : fks) arr.push_back(to_string(fk));
    out[std::string(to_string(kind))] = arr;
  }
  return out;
}

inline Meta parse_meta(const json& j) {
  ObjectReader r(j, "meta");
  Meta m;
  m.format_version = static_cast<int>(r.integer("format_version"));
  if (m.format_version != 1) throw SchemaError("meta.format_version", "unsupported format version");
  m.name = r.string("name");
  m.description = r.string("description", std::string());
  r.finish();
  return m;
}

inline Ontology parse_ontology(const json& j) {
  ObjectReader r(j, "ontology");
  Ontology o;
  if (r.has("object_kinds")) {
    o.object_kinds.clear();
    auto kinds = r.strings("object_kinds");
    for (std::size_t i = 0; i < kinds.size(); ++i) {
      auto k = parse_object_kind(kinds[i]);
      if (!k) throw SchemaError(index_path("ontology.object_kinds", i), "unknown object kind " + kinds[i]);
      o.object_kinds.push_back(*k);
    }
  } else {
    r.get("object_kinds");
  }
  if (const json* objs = r.array("objects")) {
    for (std::size_t i = 0; i < objs->size(); ++i) {
      const std::string path = index_path("ontology.objects", i);
      ObjectReader orr((*objs)[i], path);
      ObjectDecl d;
      d.id = orr.string("id");
      auto kind = orr.string("kind");
      auto k = parse_object_kind(kind);
      if (!k) throw SchemaError(orr.child("kind"), "unknown object kind " + kind);
      d.kind = *k;
      orr.finish();
      o.objects.push_back(std::move(d));
    }
  }
  if (const json* fx = r.array("fixtures")) {
    for (std::size_t i = 0; i < fx->size(); ++i) {
      const std::string path = index_path("ontology.fixtures", i);
      ObjectReader fr((*fx)[i], path);
      Fixture f;
      f.id = fr.string("id");
      auto kind = fr.string("kind");
      auto k = parse_fixture_kind(kind);
      if (!k) throw SchemaError(fr.child("kind"), "unknown fixture kind " + kind);
      f.kind = *k;
      if (const json* c = fr.get("cell")) f.cell = parse_cell(*c, fr.child("cell"));
      f.parent = fr.opt_string("parent");
      f.capacity = static_cast<int>(fr.integer("capacity", default_capacity(f.kind)));
      if (f.capacity < 0) throw SchemaError(fr.child("capacity"), "capacity must be >= 0");
      fr.finish();
      o.fixtures.push_back(std::move(f));
    }
  }
  o.relations = r.strings("relations");
  r.finish();
  return o;
}

inline StartingState parse_starting_state(const json* j) {
  StartingState s;
  if (!j) return s;
  ObjectReader r(*j, "starting_state");
  if (const json* g = r.get("grid")) {
    ObjectReader gr(*g, "starting_state.grid");
    s.width = static_cast<int>(gr.integer("width", kDefaultGridSize));
    s.height = static_cast<int>(gr.integer("height", kDefaultGridSize));
    gr.finish();
  }
  if (const json* a = r.get("agent_pos")) s.agent_pos = parse_cell(*a, "starting_state.agent_pos");
  auto placement = r.string("placement", std::string("scattered"));
  if (placement == "scattered") s.placement = StartingState::Placement::scattered;
  else if (placement == "fixed") s.placement = StartingState::Placement::fixed;
  else throw SchemaError("starting_state.placement", "expected scattered|fixed");
  if (const json* cells = r.array("scatter_cells")) {
    for (std::size_t i = 0; i < cells->size(); ++i)
      s.scatter_cells.push_back(parse_cell((*cells)[i], index_path("starting_state.scatter_cells", i)));
  }
  if (const json* objs = r.get("objects")) {
    if (!objs->is_object()) throw SchemaError("starting_state.objects", "expected object");
    for (auto it = objs->begin(); it != objs->end(); ++it) {
      const std::string path = "starting_state.objects." + it.key();
      InitialPlacement p;
      if (it->is_string()) {
        if (it->get<std::string>() != "absent") throw SchemaError(path, "expected location or \"absent\"");
      } else {
        p.location = parse_location(*it, path);
      }
      s.objects[it.key()] = p;
    }
  }
  s.facts = r.strings("facts");
  r.finish();
  return s;
}

inline WorldEvent parse_event(const json& j, std::size_t i, const Ontology& onto) {
  const std::string path = index_path("events", i);
  ObjectReader r(j, path);
  WorldEvent ev;
  ev.fire_tick = r.integer("fire_tick");
  if (ev.fire_tick < 0) throw SchemaError(r.child("fire_tick"), "must be >= 0");
  const std::string epath = r.child("effect");
  ObjectReader er(r.require("effect"), epath);
  auto type = er.string("type");
  if (type == "break_fixture") {
    auto id = er.string("fixture");
    if (!onto.fixture(id)) throw SchemaError(epath, "undeclared fixture " + id);
    ev.effect = BreakFixture{id};
  } else if (type == "spawn_object") {
    auto id = er.string("object");
    const ObjectDecl* d = onto.object(id);
    if (!d) throw SchemaError(epath, "undeclared object " + id);
    Location loc = parse_location(er.require("location"), er.child("location"));
    if (loc.kind == Location::Kind::fixture && !onto.fixture(loc.fixture))
      throw SchemaError(epath, "undeclared fixture " + loc.fixture);
    ev.effect = SpawnObject{ObjectState{id, d->kind, loc}};
  } else if (type == "remove_object") {
    auto id = er.string("object");
    if (!onto.object(id)) throw SchemaError(epath, "undeclared object " + id);
    ev.effect = RemoveObject{id};
  } else {
    throw SchemaError(er.child("type"), "unknown effect type " + type);
  }
  er.finish();
  r.finish();
  return ev;
}

inline json event_json(const WorldEvent& ev) {
  json eff = std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, BreakFixture>) return json{{"type", "break_fixture"}, {"fixture", x.fixture}};
        else if constexpr (std::is_same_v<T, SpawnObject>)
          return json{{"type", "spawn_object"}, {"object", x.object.id}, {"location", location_json(x.object.location)}};
        else return json{{"type", "remove_object"}, {"object", x.object}};
      },
      ev.effect);
  return json{{"fire_tick", ev.fire_tick}, {"effect", eff}};
}

inline GoalSpec parse_goal(const json* j) {
  GoalSpec g = GoalSpec::room_default();
  if (!j) return g;
  ObjectReader r(*j, "goal");
  if (const json* s = r.get("strict")) g.strict = parse_predicate(*s, "goal.strict");
  if (const json* s = r.get("relaxed")) g.relaxed = parse_predicate(*s, "goal.relaxed");
  g.deadline_tick = r.opt_integer("deadline_tick");
  r.finish();
  return g;
}

inline AgentConfig parse_agent(const json* j) {
  AgentConfig a;
  if (!j) return a;
  ObjectReader r(*j, "agent");

  if (const json* arr = r.array("processes")) {
    for (std::size_t i = 0; i < arr->size(); ++i) {
      ObjectReader pr((*arr)[i], index_path("agent.processes", i));
      ProcessDecl p;
      p.id = pr.string("id");
      p.priority_rank = static_cast<int>(pr.integer("priority_rank"));
      p.goal_ref = pr.string("goal_ref", std::string());
      p.plan_urgency = pr.number("plan_urgency", 0.5);
      if (auto v = pr.opt_string("plans_for")) p.plans_for = parse_variant(*v, pr.child("plans_for"));
      pr.finish();
      a.processes.push_back(std::move(p));
    }
  }
  if (const json* arr = r.array("reactive_rules")) {
    for (std::size_t i = 0; i < arr->size(); ++i) {
      ObjectReader rr((*arr)[i], index_path("agent.reactive_rules", i));
      ReactiveRule rule;
      rule.id = rr.string("id");
      rule.process = rr.string("process", std::string());
      rule.when = parse_cond(rr, "when");
      rule.emits = rr.string("emits");
      rule.urgency = rr.number("urgency");
      rr.finish();
      a.reactive_rules.push_back(std::move(rule));
    }
  }
  if (const json* arr = r.array("appraisal_rules")) {
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const std::string path = index_path("agent.appraisal_rules", i);
      ObjectReader ar((*arr)[i], path);
      AppraisalRule rule;
      rule.id = ar.string("id");
      rule.process = ar.string("process");
      rule.when = parse_cond(ar, "when");
      rule.atom = ar.string("atom");
      rule.label = ar.string("label");
      rule.valence = parse_valence(ar.string("valence"), ar.child("valence"));
      rule.magnitude = ar.number("magnitude");
      if (const json* props = ar.array("proposes")) {
        for (std::size_t k = 0; k < props->size(); ++k) {
          const json& pj = (*props)[k];
          const std::string ppath = index_path(ar.child("proposes"), k);
          Proposal p;
          if (pj.is_string()) {
            p.option = pj.get<std::string>();
          } else {
            ObjectReader prr(pj, ppath);
            p.option = prr.string("option");
            p.requires_ = parse_cond(prr, "requires");
            prr.finish();
          }
          rule.proposes.push_back(std::move(p));
        }
      }
      ar.finish();
      a.appraisal_rules.push_back(std::move(rule));
    }
  }
  if (const json* arr = r.array("argument_templates")) {
    for (std::size_t i = 0; i < arr->size(); ++i) {
      ObjectReader tr((*arr)[i], index_path("agent.argument_templates", i));
      ArgumentTemplate t;
      t.id = tr.string("id");
      t.trigger = parse_cond(tr, "when");
      auto pol = tr.string("polarity");
      if (pol == "pro") t.polarity = Polarity::pro;
      else if (pol == "con") t.polarity = Polarity::con;
      else throw SchemaError(tr.child("polarity"), "expected pro|con");
      t.weight = tr.number("weight");
      t.option = tr.string("option");
      t.undercuts = tr.opt_string("undercuts");
      t.source_process = tr.string("process", std::string());
      t.library_only = tr.boolean("library_only", false);
      tr.finish();
      a.argument_templates.push_back(std::move(t));
    }
  }
  if (const json* arr = r.array("countermeasures")) {
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const std::string path = index_path("agent.countermeasures", i);
      ObjectReader cr((*arr)[i], path);
      CountermeasureSpec c;
      c.id = cr.string("id");
      {
        ObjectReader mr(cr.require("matches"), cr.child("matches"));
        auto kind = mr.string("kind", std::string("any"));
        auto k = parse_item_kind(kind);
        if (!k) throw SchemaError(mr.child("kind"), "expected any|appraisal|goal_change|tendency");
        c.match_kind = *k;
        c.match_atom = mr.opt_string("atom");
        mr.finish();
      }
      {
        ObjectReader xr(cr.require("action"), cr.child("action"));
        auto type = xr.string("type");
        if (type == "redescription") {
          c.type = CountermeasureSpec::Type::redescription;
          c.template_id = xr.string("template");
          c.weight = xr.opt_number("weight");
        } else if (type == "replanning") {
          c.type = CountermeasureSpec::Type::replanning;
          c.goal_variant = parse_variant(xr.string("goal_variant", std::string("relaxed")), xr.child("goal_variant"));
        } else {
          throw SchemaError(xr.child("type"), "expected redescription|replanning");
        }
        xr.finish();
      }
      cr.finish();
      a.countermeasures.push_back(std::move(c));
    }
  }
  if (const json* arr = r.array("commitments")) {
    for (std::size_t i = 0; i < arr->size(); ++i) {
      ObjectReader cr((*arr)[i], index_path("agent.commitments", i));
      Commitment c;
      c.atom = cr.string("atom");
      c.required_valence = parse_valence(cr.string("required_valence"), cr.child("required_valence"));
      c.origin = cr.string("origin", std::string());
      c.weight = cr.number("weight", 1.0);
      cr.finish();
      a.commitments.push_back(std::move(c));
    }
  }
  a.deliberation_period = static_cast<int>(r.integer("deliberation_period", kDefaultDeliberationPeriod));
  a.tendency_ttl = static_cast<int>(r.integer("tendency_ttl", kDefaultTendencyTtl));
  r.finish();
  return a;
}

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace detail

inline ScenarioSpec parse_scenario(std::string_view document) {
  using detail::json;
  json root;
  try {
    root = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    auto [line, col] = detail::line_column(document, e.byte);
    throw ParseError(line, col, e.what());
  }
  detail::ObjectReader r(root, "");
  ScenarioSpec spec;
  spec.meta = detail::parse_meta(r.require("meta"));
  spec.ontology = detail::parse_ontology(r.require("ontology"));
  spec.starting_state = detail::parse_starting_state(r.get("starting_state"));
  if (const json* evs = r.array("events")) {
    for (std::size_t i = 0; i < evs->size(); ++i) spec.events.push_back(detail::parse_event((*evs)[i], i, spec.ontology));
  }
  spec.goal = detail::parse_goal(r.get("goal"));
  spec.agent = detail::parse_agent(r.get("agent"));
  auto profile = r.string("bct_profile", std::string("prime"));
  auto p = parse_profile(profile);
  if (!p) throw SchemaError("bct_profile", "expected prime|ceos");
  spec.bct_profile = *p;
  r.finish();
  return spec;
}

/// Canonical JSON form with every default written out.
inline nlohmann::json to_json(const ScenarioSpec& s) {
  using detail::json;
  json j;
  j["meta"] = {{"format_version", s.meta.format_version}, {"name", s.meta.name}, {"description", s.meta.description}};

  json onto;
  onto["object_kinds"] = json::array();
  for (auto k : s.ontology.object_kinds) onto["object_kinds"].push_back(to_string(k));
  onto["objects"] = json::array();
  for (const auto& o : s.ontology.objects) onto["objects"].push_back({{"id", o.id}, {"kind", to_string(o.kind)}});
  onto["fixtures"] = json::array();
  for (const auto& f : s.ontology.fixtures) {
    json fj{{"id", f.id}, {"kind", to_string(f.kind)}, {"capacity", f.capacity}};
    if (f.cell) fj["cell"] = detail::cell_json(*f.cell);
    if (f.parent) fj["parent"] = *f.parent;
    onto["fixtures"].push_back(fj);
  }
  onto["relations"] = s.ontology.relations;
  j["ontology"] = onto;

  json st;
  st["grid"] = {{"width", s.starting_state.width}, {"height", s.starting_state.height}};
  st["agent_pos"] = detail::cell_json(s.starting_state.agent_pos);
  st["placement"] = s.starting_state.placement == StartingState::Placement::scattered ? "scattered" : "fixed";
  st["scatter_cells"] = json::array();
  for (auto c : s.starting_state.scatter_cells) st["scatter_cells"].push_back(detail::cell_json(c));
  st["objects"] = json::object();
  for (const auto& [id, p] : s.starting_state.objects)
    st["objects"][id] = p.location ? detail::location_json(*p.location) : json("absent");
  st["facts"] = s.starting_state.facts;
  j["starting_state"] = st;

  j["events"] = json::array();
  for (const auto& ev : s.events) j["events"].push_back(detail::event_json(ev));

  json goal{{"strict", detail::predicate_json(s.goal.strict)}, {"relaxed", detail::predicate_json(s.goal.relaxed)}};
  if (s.goal.deadline_tick) goal["deadline_tick"] = *s.goal.deadline_tick;
  j["goal"] = goal;

  const AgentConfig& a = s.agent;
  json aj;
  aj["processes"] = json::array();
  for (const auto& p : a.processes) {
    json pj{{"id", p.id}, {"priority_rank", p.priority_rank}, {"goal_ref", p.goal_ref}, {"plan_urgency", p.plan_urgency}};
    if (p.plans_for) pj["plans_for"] = to_string(*p.plans_for);
    aj["processes"].push_back(pj);
  }
  aj["reactive_rules"] = json::array();
  for (const auto& r : a.reactive_rules)
    aj["reactive_rules"].push_back({{"id", r.id},
                                    {"process", r.process},
                                    {"when", detail::cond_json(r.when)},
                                    {"emits", r.emits},
                                    {"urgency", r.urgency}});
  aj["appraisal_rules"] = json::array();
  for (const auto& r : a.appraisal_rules) {
    json props = json::array();
    for (const auto& p : r.proposes) {
      if (p.requires_.empty()) props.push_back(p.option);
      else props.push_back({{"option", p.option}, {"requires", detail::cond_json(p.requires_)}});
    }
    aj["appraisal_rules"].push_back({{"id", r.id},
                                     {"process", r.process},
                                     {"when", detail::cond_json(r.when)},
                                     {"atom", r.atom},
                                     {"label", r.label},
                                     {"valence", to_string(r.valence)},
                                     {"magnitude", r.magnitude},
                                     {"proposes", props}});
  }
  aj["argument_templates"] = json::array();
  for (const auto& t : a.argument_templates) {
    json tj{{"id", t.id},
            {"when", detail::cond_json(t.trigger)},
            {"polarity", to_string(t.polarity)},
            {"weight", t.weight},
            {"option", t.option},
            {"process", t.source_process},
            {"library_only", t.library_only}};
    if (t.undercuts) tj["undercuts"] = *t.undercuts;
    aj["argument_templates"].push_back(tj);
  }
  aj["countermeasures"] = json::array();
  for (const auto& c : a.countermeasures) {
    json m{{"kind", to_string(c.match_kind)}};
    if (c.match_atom) m["atom"] = *c.match_atom;
    json act;
    if (c.type == CountermeasureSpec::Type::redescription) {
      act = {{"type", "redescription"}, {"template", c.template_id}};
      if (c.weight) act["weight"] = *c.weight;
    } else {
      act = {{"type", "replanning"}, {"goal_variant", to_string(c.goal_variant)}};
    }
    aj["countermeasures"].push_back({{"id", c.id}, {"matches", m}, {"action", act}});
  }
  aj["commitments"] = json::array();
  for (const auto& c : a.commitments)
    aj["commitments"].push_back({{"atom", c.atom},
                                 {"required_valence", to_string(c.required_valence)},
                                 {"origin", c.origin},
                                 {"weight", c.weight}});
  aj["deliberation_period"] = a.deliberation_period;
  aj["tendency_ttl"] = a.tendency_ttl;
  j["agent"] = aj;
  j["bct_profile"] = to_string(s.bct_profile);
  return j;
}

inline std::string serialize_scenario(const ScenarioSpec& s) { return to_json(s).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Validation

struct Finding {
  std::string code;
  std::string location;
  std::string message;
  bool operator==(const Finding&) const = default;
};

struct ValidationReport {
  std::vector<Finding> errors;
  std::vector<Finding> warnings;
  bool ok() const { return errors.empty(); }
  bool has_error(std::string_view code) const {
    return std::any_of(errors.begin(), errors.end(), [&](const Finding& f) { return f.code == code; });
  }
  bool has_warning(std::string_view code) const {
    return std::any_of(warnings.begin(), warnings.end(), [&](const Finding& f) { return f.code == code; });
  }
};

inline bool is_snake_id(std::string_view id) {
  if (id.empty() || !(id.front() >= 'a' && id.front() <= 'z')) return false;
  return std::all_of(id.begin(), id.end(), [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_'; });
}

/// Template ids that take part in an undercut cycle (empty when acyclic).
inline std::vector<std::string> undercut_cycle(const std::vector<ArgumentTemplate>& templates) {
  std::map<std::string, std::string> edge;
  for (const auto& t : templates)
    if (t.undercuts) edge[t.id] = *t.undercuts;
  // Each template has at most one outgoing edge, so walking successors finds any cycle.
  for (const auto& t : templates) {
    std::vector<std::string> path;
    std::set<std::string> seen;
    std::string cur = t.id;
    while (edge.count(cur) && !seen.count(cur)) {
      seen.insert(cur);
      path.push_back(cur);
      cur = edge[cur];
    }
    if (seen.count(cur)) {
      auto it = std::find(path.begin(), path.end(), cur);
      return std::vector<std::string>(it, path.end());
    }
  }
  return {};
}

inline ValidationReport validate_scenario(const ScenarioSpec& s) {
  ValidationReport rep;
  auto error = [&](std::string code, std::string loc, std::string msg) {
    rep.errors.push_back({std::move(code), std::move(loc), std::move(msg)});
  };
  auto warn = [&](std::string code, std::string loc, std::string msg) {
    rep.warnings.push_back({std::move(code), std::move(loc), std::move(msg)});
  };
  auto check_id = [&](const std::string& id, const std::string& loc) {
    if (!is_snake_id(id)) error("INVALID_ID", loc, "id '" + id + "' is not lowercase snake-case");
  };
  auto idx = [](const std::string& base, std::size_t i) { return detail::index_path(base, i); };

  const Ontology& onto = s.ontology;
  const AgentConfig& agent = s.agent;

  if (s.meta.format_version != 1) error("FORMAT_VERSION", "meta.format_version", "format_version must be 1");

  // Ontology
  std::set<std::string> entity_ids;
  for (std::size_t i = 0; i < onto.objects.size(); ++i) {
    const auto& o = onto.objects[i];
    check_id(o.id, idx("ontology.objects", i));
    if (!entity_ids.insert(o.id).second) error("DUPLICATE_ID", idx("ontology.objects", i), "duplicate id " + o.id);
    if (std::find(onto.object_kinds.begin(), onto.object_kinds.end(), o.kind) == onto.object_kinds.end())
      error("DANGLING_REFERENCE", idx("ontology.objects", i), "object kind not declared");
  }
  std::set<Cell> fixture_cells;
  for (std::size_t i = 0; i < onto.fixtures.size(); ++i) {
    const auto& f = onto.fixtures[i];
    const std::string loc = idx("ontology.fixtures", i);
    check_id(f.id, loc);
    if (!entity_ids.insert(f.id).second) error("DUPLICATE_ID", loc, "duplicate id " + f.id);
    if (f.parent && !onto.fixture(*f.parent)) error("DANGLING_REFERENCE", loc + ".parent", "undeclared fixture " + *f.parent);
    if (f.cell) {
      if (f.cell->x < 0 || f.cell->y < 0 || f.cell->x >= s.starting_state.width || f.cell->y >= s.starting_state.height)
        error("INVALID_STARTING_STATE", loc + ".cell", "fixture outside grid");
      if (!fixture_cells.insert(*f.cell).second) error("INVALID_STARTING_STATE", loc + ".cell", "two fixtures share a cell");
    }
  }

  // Starting state
  const StartingState& st = s.starting_state;
  if (st.width < 1 || st.height < 1) error("INVALID_STARTING_STATE", "starting_state.grid", "grid must be at least 1x1");
  auto in_grid = [&](Cell c) { return c.x >= 0 && c.y >= 0 && c.x < st.width && c.y < st.height; };
  if (!in_grid(st.agent_pos)) error("INVALID_STARTING_STATE", "starting_state.agent_pos", "agent outside grid");
  if (fixture_cells.count(st.agent_pos)) error("INVALID_STARTING_STATE", "starting_state.agent_pos", "agent on a fixture cell");
  std::map<std::string, int> load;
  for (const auto& [id, p] : st.objects) {
    const std::string loc = "starting_state.objects." + id;
    if (!onto.object(id)) {
      error("DANGLING_REFERENCE", loc, "undeclared object " + id);
      continue;
    }
    if (!p.location) continue;
    if (p.location->kind == Location::Kind::floor) {
      if (!in_grid(p.location->cell) || fixture_cells.count(p.location->cell))
        error("INVALID_STARTING_STATE", loc, "floor cell outside grid or on a fixture");
    } else if (p.location->kind == Location::Kind::fixture) {
      const Fixture* f = onto.fixture(p.location->fixture);
      if (!f) error("DANGLING_REFERENCE", loc, "undeclared fixture " + p.location->fixture);
      else if (!f->cell) error("INVALID_STARTING_STATE", loc, "fixture " + f->id + " cannot hold objects");
      else if (f->capacity > 0 && ++load[f->id] > f->capacity)
        error("INVALID_STARTING_STATE", loc, "fixture " + f->id + " over capacity");
    } else {
      error("INVALID_STARTING_STATE", loc, "objects cannot start held");
    }
  }
  std::size_t unplaced = 0;
  for (const auto& o : onto.objects)
    if (!st.objects.count(o.id)) ++unplaced;
  if (st.placement == StartingState::Placement::fixed && unplaced > 0)
    error("INVALID_STARTING_STATE", "starting_state.objects", "fixed placement needs a location for every object");
  if (st.placement == StartingState::Placement::scattered) {
    std::set<Cell> pool;
    if (st.scatter_cells.empty()) {
      for (int y = 0; y < st.height; ++y)
        for (int x = 0; x < st.width; ++x)
          if (!fixture_cells.count({x, y})) pool.insert({x, y});
    } else {
      for (std::size_t i = 0; i < st.scatter_cells.size(); ++i) {
        Cell c = st.scatter_cells[i];
        if (!in_grid(c) || fixture_cells.count(c))
          error("INVALID_STARTING_STATE", idx("starting_state.scatter_cells", i), "not a floor cell");
        pool.insert(c);
      }
    }
    if (pool.size() < unplaced)
      error("INVALID_STARTING_STATE", "starting_state.scatter_cells", "not enough floor cells to scatter objects");
  }

  // Events
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    const auto& ev = s.events[i];
    const std::string loc = idx("events", i) + ".effect";
    if (i > 0 && ev.fire_tick < s.events[i - 1].fire_tick) error("UNSORTED_EVENTS", idx("events", i), "events must be sorted by fire_tick");
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, BreakFixture>) {
            if (!onto.fixture(x.fixture)) error("DANGLING_REFERENCE", loc, "undeclared fixture " + x.fixture);
          } else if constexpr (std::is_same_v<T, SpawnObject>) {
            if (!onto.object(x.object.id)) error("DANGLING_REFERENCE", loc, "undeclared object " + x.object.id);
            if (x.object.location.kind == Location::Kind::fixture && !onto.fixture(x.object.location.fixture))
              error("DANGLING_REFERENCE", loc, "undeclared fixture " + x.object.location.fixture);
          } else {
            if (!onto.object(x.object)) error("DANGLING_REFERENCE", loc, "undeclared object " + x.object);
          }
        },
        ev.effect);
    if (s.goal.deadline_tick && ev.fire_tick > *s.goal.deadline_tick)
      warn("UNREACHABLE_EVENT", idx("events", i), "fires after the goal deadline");
  }

  // Goal
  if (!entails(s.goal.strict, s.goal.relaxed))
    error("GOAL_ENTAILMENT", "goal", "a placement accepted by the strict predicate is rejected by the relaxed one");

  // Agent
  std::set<std::string> proc_ids;
  std::set<int> ranks;
  for (std::size_t i = 0; i < agent.processes.size(); ++i) {
    const auto& p = agent.processes[i];
    const std::string loc = idx("agent.processes", i);
    check_id(p.id, loc + ".id");
    if (!proc_ids.insert(p.id).second) error("DUPLICATE_PROCESS", loc, "duplicate process id " + p.id);
    if (!ranks.insert(p.priority_rank).second) error("DUPLICATE_PRIORITY", loc, "duplicate priority rank");
    if (p.plan_urgency < 0) error("NEGATIVE_WEIGHT", loc + ".plan_urgency", "must be >= 0");
  }
  auto check_process = [&](const std::string& id, const std::string& loc) {
    if (!proc_ids.count(id)) error("DANGLING_REFERENCE", loc, "undeclared process " + id);
  };
  if (agent.deliberation_period < 1) error("INVALID_PERIOD", "agent.deliberation_period", "must be >= 1");
  if (agent.tendency_ttl < 1) error("INVALID_TTL", "agent.tendency_ttl", "must be >= 1");

  std::set<std::string> rule_ids;
  for (std::size_t i = 0; i < agent.reactive_rules.size(); ++i) {
    const auto& r = agent.reactive_rules[i];
    const std::string loc = idx("agent.reactive_rules", i);
    check_id(r.id, loc + ".id");
    if (!rule_ids.insert(r.id).second) error("DUPLICATE_ID", loc, "duplicate rule id " + r.id);
    if (r.emits == kPlanStep) {
      if (!r.process.empty()) check_process(r.process, loc + ".process");
    } else {
      check_process(r.process, loc + ".process");
    }
    if (r.urgency < 0) error("NEGATIVE_WEIGHT", loc + ".urgency", "must be >= 0");
    for (const auto& lit : r.when) {
      if (pseudo_arg(lit.atom, "appraised") || pseudo_arg(lit.atom, "committed"))
        error("REACTIVE_HYPOTHETICAL", loc + ".when", "reactive conditions may only read current beliefs");
    }
  }
  std::set<std::string> evaluation_atoms;
  for (std::size_t i = 0; i < agent.appraisal_rules.size(); ++i) {
    const auto& r = agent.appraisal_rules[i];
    const std::string loc = idx("agent.appraisal_rules", i);
    check_id(r.id, loc + ".id");
    if (!rule_ids.insert(r.id).second) error("DUPLICATE_ID", loc, "duplicate rule id " + r.id);
    check_process(r.process, loc + ".process");
    if (!(r.magnitude > 0)) error("INVALID_MAGNITUDE", loc + ".magnitude", "appraisal magnitude must be > 0");
    evaluation_atoms.insert(r.atom);
  }

  std::set<std::string> template_ids;
  for (std::size_t i = 0; i < agent.argument_templates.size(); ++i) {
    const auto& t = agent.argument_templates[i];
    const std::string loc = idx("agent.argument_templates", i);
    check_id(t.id, loc + ".id");
    if (!template_ids.insert(t.id).second) error("DUPLICATE_ID", loc, "duplicate template id " + t.id);
    if (t.weight < 0) error("NEGATIVE_WEIGHT", loc + ".weight", "must be >= 0");
    if (!t.source_process.empty()) check_process(t.source_process, loc + ".process");
    if (t.option.size() > 1 && t.option.front() == '@' && t.option != "@plan") check_process(t.option.substr(1), loc + ".option");
  }
  for (std::size_t i = 0; i < agent.argument_templates.size(); ++i) {
    const auto& t = agent.argument_templates[i];
    if (t.undercuts && !template_ids.count(*t.undercuts))
      error("DANGLING_REFERENCE", idx("agent.argument_templates", i) + ".undercuts", "undeclared template " + *t.undercuts);
  }
  if (auto cycle = undercut_cycle(agent.argument_templates); !cycle.empty()) {
    std::string path;
    for (const auto& id : cycle) path += id + " -> ";
    error("CYCLIC_UNDERCUT", "agent.argument_templates", "undercut cycle: " + path + cycle.front());
  }

  for (std::size_t i = 0; i < agent.countermeasures.size(); ++i) {
    const auto& c = agent.countermeasures[i];
    const std::string loc = idx("agent.countermeasures", i);
    check_id(c.id, loc + ".id");
    if (c.type == CountermeasureSpec::Type::redescription) {
      if (!template_ids.count(c.template_id))
        error("DANGLING_REFERENCE", loc + ".action.template", "undeclared template " + c.template_id);
      if (c.weight && *c.weight < 0) error("NEGATIVE_WEIGHT", loc + ".action.weight", "must be >= 0");
    } else if (c.goal_variant != GoalVariant::relaxed) {
      error("UNKNOWN_GOAL_VARIANT", loc + ".action.goal_variant", "replanning must target the relaxed goal variant");
    }
  }

  for (std::size_t i = 0; i < agent.commitments.size(); ++i) {
    const auto& c = agent.commitments[i];
    const std::string loc = idx("agent.commitments", i);
    if (!evaluation_atoms.count(c.atom))
      error("COMMITMENT_UNKNOWN_ATOM", loc + ".atom", "no appraisal rule evaluates " + c.atom);
    if (c.weight < 0) error("NEGATIVE_WEIGHT", loc + ".weight", "must be >= 0");
  }

  // A process "has" templates when some template can select one of its options.
  for (const auto& p : agent.processes) {
    std::set<std::string> options;
    for (const auto& r : agent.appraisal_rules)
      if (r.process == p.id)
        for (const auto& prop : r.proposes) options.insert(prop.option);
    for (const auto& r : agent.reactive_rules)
      if (r.process == p.id) options.insert(r.emits);
    bool covered = std::any_of(agent.argument_templates.begin(), agent.argument_templates.end(), [&](const ArgumentTemplate& t) {
      if (t.library_only) return false;
      if (t.option == "*" || t.option == "@" + p.id) return true;
      if (t.option == "@plan" && p.plans_for) return true;
      return options.count(t.option) > 0;
    });
    if (!covered) warn("PROCESS_WITHOUT_TEMPLATES", "agent.processes." + p.id, "no argument template addresses this process");
  }
  return rep;
}

inline std::string format_report(const ValidationReport& rep) {
  std::string out;
  for (const auto& e : rep.errors) out += "error   " + e.code + " at " + e.location + ": " + e.message + "\n";
  for (const auto& w : rep.warnings) out += "warning " + w.code + " at " + w.location + ": " + w.message + "\n";
  out += std::to_string(rep.errors.size()) + " error(s), " + std::to_string(rep.warnings.size()) + " warning(s)\n";
  return out;
}

}  // namespace bctsim
