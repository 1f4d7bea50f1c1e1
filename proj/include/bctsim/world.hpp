#pragma once

// Room-tidying gridworld: placements, action semantics, scheduled events and
// goal evaluation. Every operation is a pure function of its arguments.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace bctsim {

struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell&) const = default;
};

inline int manhattan(Cell a, Cell b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

inline std::string to_string(Cell c) {
  return "cell(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
}

enum class ObjectKind { book, toy };

inline std::string_view to_string(ObjectKind k) { return k == ObjectKind::book ? "book" : "toy"; }

inline std::optional<ObjectKind> parse_object_kind(std::string_view s) {
  if (s == "book") return ObjectKind::book;
  if (s == "toy") return ObjectKind::toy;
  return std::nullopt;
}

enum class FixtureKind { shelf, shelf_slot, table, box };

inline std::string_view to_string(FixtureKind k) {
  switch (k) {
    case FixtureKind::shelf: return "shelf";
    case FixtureKind::shelf_slot: return "shelf_slot";
    case FixtureKind::table: return "table";
    case FixtureKind::box: return "box";
  }
  return "shelf";
}

inline std::optional<FixtureKind> parse_fixture_kind(std::string_view s) {
  if (s == "shelf") return FixtureKind::shelf;
  if (s == "shelf_slot") return FixtureKind::shelf_slot;
  if (s == "table") return FixtureKind::table;
  if (s == "box") return FixtureKind::box;
  return std::nullopt;
}

/// Capacity 0 means unlimited. A fixture without a cell (e.g. a whole shelf)
/// only groups its slots and cannot receive objects directly.
struct Fixture {
  std::string id;
  FixtureKind kind = FixtureKind::table;
  std::optional<Cell> cell;
  std::optional<std::string> parent;
  int capacity = 0;
  bool operator==(const Fixture&) const = default;
};

inline int default_capacity(FixtureKind k) { return k == FixtureKind::shelf_slot ? 1 : 0; }

struct Location {
  enum class Kind { floor, fixture, held };
  Kind kind = Kind::floor;
  Cell cell{};
  std::string fixture;

  static Location on_floor(Cell c) { return {Kind::floor, c, {}}; }
  static Location on_fixture(std::string id) { return {Kind::fixture, {}, std::move(id)}; }
  static Location held() { return {Kind::held, {}, {}}; }

  bool operator==(const Location& o) const {
    if (kind != o.kind) return false;
    if (kind == Kind::floor) return cell == o.cell;
    if (kind == Kind::fixture) return fixture == o.fixture;
    return true;
  }
};

inline std::string to_string(const Location& l) {
  switch (l.kind) {
    case Location::Kind::floor: return to_string(l.cell);
    case Location::Kind::fixture: return l.fixture;
    case Location::Kind::held: return "held";
  }
  return "held";
}

struct ObjectState {
  std::string id;
  ObjectKind kind = ObjectKind::book;
  Location location;
  bool operator==(const ObjectState&) const = default;
};

struct WorldState {
  std::int64_t tick = 0;
  int width = 8;
  int height = 8;
  Cell agent_pos{};
  std::optional<std::string> agent_holding;
  std::map<std::string, ObjectState> objects;
  std::vector<Fixture> fixtures;
  std::set<std::string> broken_fixtures;
  std::set<std::string> facts;
  bool abandoned = false;

  bool operator==(const WorldState&) const = default;

  const Fixture* fixture(std::string_view id) const {
    for (const auto& f : fixtures)
      if (f.id == id) return &f;
    return nullptr;
  }

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }

  bool is_fixture_cell(Cell c) const {
    return std::any_of(fixtures.begin(), fixtures.end(),
                       [&](const Fixture& f) { return f.cell && *f.cell == c; });
  }

  bool walkable(Cell c) const { return in_bounds(c) && !is_fixture_cell(c); }

  /// A slot counts as broken when it or any ancestor fixture is broken.
  bool is_broken(std::string_view fixture_id) const {
    std::string cur(fixture_id);
    for (int depth = 0; depth < 16; ++depth) {
      if (broken_fixtures.count(cur)) return true;
      const Fixture* f = fixture(cur);
      if (!f || !f->parent) return false;
      cur = *f->parent;
    }
    return false;
  }

  int occupancy(std::string_view fixture_id) const {
    return static_cast<int>(std::count_if(objects.begin(), objects.end(), [&](const auto& kv) {
      return kv.second.location.kind == Location::Kind::fixture && kv.second.location.fixture == fixture_id;
    }));
  }

  bool is_full(const Fixture& f) const { return f.capacity > 0 && occupancy(f.id) >= f.capacity; }

  /// Cell where an object physically sits, if it is not being carried.
  std::optional<Cell> object_cell(const ObjectState& o) const {
    if (o.location.kind == Location::Kind::floor) return o.location.cell;
    if (o.location.kind == Location::Kind::fixture) {
      if (const Fixture* f = fixture(o.location.fixture)) return f->cell;
    }
    return std::nullopt;
  }
};

// ---------------------------------------------------------------------------
// Actions

enum class Direction { north, south, east, west };

inline std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::north: return "north";
    case Direction::south: return "south";
    case Direction::east: return "east";
    case Direction::west: return "west";
  }
  return "north";
}

inline Cell step(Cell c, Direction d) {
  switch (d) {
    case Direction::north: return {c.x, c.y - 1};
    case Direction::south: return {c.x, c.y + 1};
    case Direction::east: return {c.x + 1, c.y};
    case Direction::west: return {c.x - 1, c.y};
  }
  return c;
}

inline constexpr Direction kDirections[] = {Direction::north, Direction::south, Direction::east,
                                            Direction::west};

struct WorldAction {
  enum class Kind { move, pick_up, place, idle, abandon };
  Kind kind = Kind::idle;
  Direction direction = Direction::north;
  std::string target;

  static WorldAction move(Direction d) { return {Kind::move, d, {}}; }
  static WorldAction pick_up(std::string object) { return {Kind::pick_up, Direction::north, std::move(object)}; }
  static WorldAction place(std::string fixture) { return {Kind::place, Direction::north, std::move(fixture)}; }
  static WorldAction idle() { return {}; }
  static WorldAction abandon() { return {Kind::abandon, Direction::north, {}}; }

  bool operator==(const WorldAction& o) const { return encode() == o.encode(); }

  /// Canonical text form, also used as the option id in argument cases.
  std::string encode() const {
    switch (kind) {
      case Kind::move: return "move(" + std::string(to_string(direction)) + ")";
      case Kind::pick_up: return "pick_up(" + target + ")";
      case Kind::place: return "place(" + target + ")";
      case Kind::idle: return "idle";
      case Kind::abandon: return "abandon";
    }
    return "idle";
  }
};

inline std::optional<WorldAction> parse_world_action(std::string_view s) {
  if (s == "idle") return WorldAction::idle();
  if (s == "abandon") return WorldAction::abandon();
  auto arg = [&](std::string_view head) -> std::optional<std::string> {
    if (s.size() > head.size() + 2 && s.substr(0, head.size()) == head && s[head.size()] == '(' &&
        s.back() == ')')
      return std::string(s.substr(head.size() + 1, s.size() - head.size() - 2));
    return std::nullopt;
  };
  if (auto a = arg("move")) {
    for (Direction d : kDirections)
      if (*a == to_string(d)) return WorldAction::move(d);
    return std::nullopt;
  }
  if (auto a = arg("pick_up")) return WorldAction::pick_up(*a);
  if (auto a = arg("place")) return WorldAction::place(*a);
  return std::nullopt;
}

class IllegalAction : public std::runtime_error {
 public:
  explicit IllegalAction(const std::string& reason) : std::runtime_error(reason) {}
  std::string reason() const { return what(); }
};

class UnknownEntity : public std::runtime_error {
 public:
  explicit UnknownEntity(const std::string& id) : std::runtime_error("unknown entity: " + id), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

/// Applies one action and advances the tick. Throws IllegalAction instead of
/// coercing anything.
inline WorldState apply_action(const WorldState& world, const WorldAction& action) {
  WorldState next = world;
  if (world.abandoned && action.kind != WorldAction::Kind::idle) throw IllegalAction("action after abandon");

  switch (action.kind) {
    case WorldAction::Kind::idle:
      break;
    case WorldAction::Kind::abandon:
      next.abandoned = true;
      break;
    case WorldAction::Kind::move: {
      Cell to = step(world.agent_pos, action.direction);
      if (!world.in_bounds(to)) throw IllegalAction("out of bounds");
      if (world.is_fixture_cell(to)) throw IllegalAction("cell blocked by fixture");
      next.agent_pos = to;
      break;
    }
    case WorldAction::Kind::pick_up: {
      if (world.agent_holding) throw IllegalAction("already holding " + *world.agent_holding);
      auto it = world.objects.find(action.target);
      if (it == world.objects.end()) throw IllegalAction("no such object " + action.target);
      auto cell = world.object_cell(it->second);
      if (!cell || manhattan(*cell, world.agent_pos) > 1) throw IllegalAction("object not adjacent");
      next.agent_holding = action.target;
      next.objects[action.target].location = Location::held();
      break;
    }
    case WorldAction::Kind::place: {
      if (!world.agent_holding) throw IllegalAction("holding nothing");
      const Fixture* f = world.fixture(action.target);
      if (!f || !f->cell) throw IllegalAction("no such placement target " + action.target);
      if (manhattan(*f->cell, world.agent_pos) > 1) throw IllegalAction("fixture not adjacent");
      if (world.is_broken(f->id)) throw IllegalAction("fixture broken");
      if (world.is_full(*f)) throw IllegalAction("fixture full");
      next.objects[*world.agent_holding].location = Location::on_fixture(f->id);
      next.agent_holding.reset();
      break;
    }
  }
  next.tick = world.tick + 1;
  return next;
}

// ---------------------------------------------------------------------------
// Events

struct BreakFixture {
  std::string fixture;
  bool operator==(const BreakFixture&) const = default;
};
struct SpawnObject {
  ObjectState object;
  bool operator==(const SpawnObject&) const = default;
};
struct RemoveObject {
  std::string object;
  bool operator==(const RemoveObject&) const = default;
};

using EventEffect = std::variant<BreakFixture, SpawnObject, RemoveObject>;

struct WorldEvent {
  std::int64_t fire_tick = 0;
  EventEffect effect;
  bool operator==(const WorldEvent&) const = default;
};

inline std::string describe(const EventEffect& e) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, BreakFixture>) return "break_fixture(" + x.fixture + ")";
        else if constexpr (std::is_same_v<T, SpawnObject>) return "spawn_object(" + x.object.id + ")";
        else return "remove_object(" + x.object + ")";
      },
      e);
}

inline WorldState apply_effect(WorldState world, const EventEffect& effect) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, BreakFixture>) {
          if (!world.fixture(x.fixture)) throw UnknownEntity(x.fixture);
          world.broken_fixtures.insert(x.fixture);
        } else if constexpr (std::is_same_v<T, SpawnObject>) {
          if (world.objects.count(x.object.id)) throw UnknownEntity(x.object.id + " (already present)");
          if (x.object.location.kind == Location::Kind::held) throw UnknownEntity(x.object.id + " (spawned held)");
          if (x.object.location.kind == Location::Kind::fixture && !world.fixture(x.object.location.fixture))
            throw UnknownEntity(x.object.location.fixture);
          if (x.object.location.kind == Location::Kind::floor && !world.in_bounds(x.object.location.cell))
            throw UnknownEntity(to_string(x.object.location.cell));
          world.objects[x.object.id] = x.object;
        } else {
          auto it = world.objects.find(x.object);
          if (it == world.objects.end()) throw UnknownEntity(x.object);
          if (world.agent_holding == x.object) world.agent_holding.reset();
          world.objects.erase(it);
        }
      },
      effect);
  return world;
}

struct EventStepResult {
  WorldState world;
  std::vector<WorldEvent> fired;
};

/// Applies every event scheduled for the world's current tick, in schedule
/// order. Events for other ticks are ignored, so each fires exactly once as
/// the tick advances.
inline EventStepResult step_events(const WorldState& world, const std::vector<WorldEvent>& schedule) {
  EventStepResult out{world, {}};
  for (const auto& ev : schedule) {
    if (ev.fire_tick != world.tick) continue;
    out.world = apply_effect(std::move(out.world), ev.effect);
    out.fired.push_back(ev);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Goal

enum class GoalVariant { strict, relaxed };

inline std::string_view to_string(GoalVariant v) { return v == GoalVariant::strict ? "strict" : "relaxed"; }

/// Acceptable fixture kinds per object kind. A kind without an entry is
/// unconstrained. Order matters: the planner tries fixture kinds in list order.
using PlacementPredicate = std::map<ObjectKind, std::vector<FixtureKind>>;

struct GoalSpec {
  PlacementPredicate strict;
  PlacementPredicate relaxed;
  std::optional<std::int64_t> deadline_tick;
  bool operator==(const GoalSpec&) const = default;

  const PlacementPredicate& predicate(GoalVariant v) const { return v == GoalVariant::strict ? strict : relaxed; }

  static GoalSpec room_default() {
    GoalSpec g;
    g.strict = {{ObjectKind::book, {FixtureKind::shelf_slot}}, {ObjectKind::toy, {FixtureKind::box}}};
    g.relaxed = {{ObjectKind::book, {FixtureKind::shelf_slot, FixtureKind::table}},
                 {ObjectKind::toy, {FixtureKind::box}}};
    return g;
  }
};

/// Every placement accepted by `strict` must be accepted by `relaxed`.
inline bool entails(const PlacementPredicate& strict, const PlacementPredicate& relaxed) {
  for (const auto& [kind, relaxed_kinds] : relaxed) {
    auto it = strict.find(kind);
    if (it == strict.end()) return false;  // strict unconstrained, relaxed constrained
    for (FixtureKind fk : it->second)
      if (std::find(relaxed_kinds.begin(), relaxed_kinds.end(), fk) == relaxed_kinds.end()) return false;
  }
  return true;
}

inline bool placed_ok(const WorldState& world, const ObjectState& obj, const PlacementPredicate& pred) {
  auto it = pred.find(obj.kind);
  if (it == pred.end()) return true;
  if (obj.location.kind != Location::Kind::fixture) return false;
  const Fixture* f = world.fixture(obj.location.fixture);
  if (!f) return false;
  return std::find(it->second.begin(), it->second.end(), f->kind) != it->second.end();
}

struct GoalStatus {
  bool strict = false;
  bool relaxed = false;
  int misplaced_count = 0;
  bool operator==(const GoalStatus&) const = default;
};

inline GoalStatus evaluate_goal(const WorldState& world, const GoalSpec& goal) {
  GoalStatus s{true, true, 0};
  for (const auto& [id, obj] : world.objects) {
    if (!placed_ok(world, obj, goal.strict)) {
      s.strict = false;
      ++s.misplaced_count;
    }
    if (!placed_ok(world, obj, goal.relaxed)) s.relaxed = false;
  }
  return s;
}

inline int misplaced_under(const WorldState& world, const PlacementPredicate& pred) {
  int n = 0;
  for (const auto& [id, obj] : world.objects)
    if (!placed_ok(world, obj, pred)) ++n;
  return n;
}

}  // namespace bctsim
