#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "bctsim/state.hpp"
#include "test_support.hpp"

using namespace bctsim;
using testing_support::load;
using testing_support::scenario_path;

namespace {

using Doc = nlohmann::ordered_json;

Doc doc(const std::string& name) { return Doc::parse(read_file(scenario_path(name))); }

ValidationReport check(const Doc& d) { return validate_scenario(parse_scenario(d.dump())); }

std::string schema_path(const Doc& d) {
  try {
    (void)parse_scenario(d.dump());
  } catch (const SchemaError& e) {
    return e.path();
  }
  return "<no error>";
}

const char* kScenarios[] = {"room_tidy.json", "room_tidy_redescription.json", "non_smoking.json", "office_cake.json"};

}  // namespace

TEST(Scenario, ShippedScenariosAreClean) {
  for (const char* name : kScenarios) {
    auto rep = validate_scenario(load(name));
    EXPECT_TRUE(rep.errors.empty()) << name << "\n" << format_report(rep);
    EXPECT_TRUE(rep.warnings.empty()) << name << "\n" << format_report(rep);
  }
}

TEST(Scenario, RoundTripIsIdentity) {
  for (const char* name : kScenarios) {
    ScenarioSpec spec = load(name);
    std::string text = serialize_scenario(spec);
    ScenarioSpec again = parse_scenario(text);
    EXPECT_EQ(again, spec) << name;
    EXPECT_EQ(serialize_scenario(again), text) << name;
  }
}

TEST(Scenario, RoundTripOfRandomVariants) {
  std::mt19937_64 rng(42);
  const ScenarioSpec base = load("room_tidy.json");
  for (int trial = 0; trial < 200; ++trial) {
    ScenarioSpec s = base;
    s.starting_state.scatter_cells.clear();
    for (int i = 0; i < static_cast<int>(rng() % 10); ++i)
      s.starting_state.scatter_cells.push_back({static_cast<int>(rng() % 8), 1 + static_cast<int>(rng() % 7)});
    for (auto& t : s.agent.argument_templates) t.weight = static_cast<double>(rng() % 1000) / 7.0;
    s.agent.deliberation_period = 1 + static_cast<int>(rng() % 5);
    s.agent.tendency_ttl = 1 + static_cast<int>(rng() % 5);
    if (rng() % 2) s.goal.deadline_tick = static_cast<std::int64_t>(rng() % 100);
    if (rng() % 2) s.starting_state.facts.push_back("fact_" + std::to_string(rng() % 9));
    s.events.clear();
    std::int64_t t = 0;
    for (int i = 0; i < static_cast<int>(rng() % 4); ++i) {
      t += static_cast<std::int64_t>(rng() % 6);
      if (rng() % 2) s.events.push_back({t, BreakFixture{"table_1"}});
      else s.events.push_back({t, RemoveObject{"toy_1"}});
    }
    s.bct_profile = rng() % 2 ? BctProfile::prime : BctProfile::ceos;
    EXPECT_EQ(parse_scenario(serialize_scenario(s)), s);
  }
}

// Every object node of the document rejects a key it does not know.
TEST(Scenario, SchemaIsClosedEverywhere) {
  for (const char* name : kScenarios) {
    const Doc original = doc(name);
    std::vector<std::string> pointers;
    std::function<void(const Doc&, const std::string&)> walk = [&](const Doc& node, const std::string& ptr) {
      if (node.is_object()) {
        pointers.push_back(ptr);
        for (auto it = node.begin(); it != node.end(); ++it) walk(it.value(), ptr + "/" + it.key());
      } else if (node.is_array()) {
        for (std::size_t i = 0; i < node.size(); ++i) walk(node[i], ptr + "/" + std::to_string(i));
      }
    };
    walk(original, "");
    ASSERT_GE(pointers.size(), 15u);
    for (const auto& ptr : pointers) {
      Doc d = original;
      d[Doc::json_pointer(ptr)]["zz_unexpected"] = 1;
      EXPECT_THROW((void)parse_scenario(d.dump()), SchemaError) << name << " at " << ptr;
    }
  }
}

TEST(Scenario, SyntaxErrorsCarryPosition) {
  try {
    (void)parse_scenario("{\n  \"meta\": {\n    \"format_version\": 1,,\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_GT(e.column(), 1u);
  }
}

TEST(Scenario, TypeErrorsCarryPath) {
  Doc d = doc("room_tidy.json");
  d["meta"]["format_version"] = "one";
  EXPECT_EQ(schema_path(d), "meta.format_version");

  d = doc("room_tidy.json");
  d["agent"]["processes"][1]["priority_rank"] = 1.5;
  EXPECT_EQ(schema_path(d), "agent.processes[1].priority_rank");

  d = doc("room_tidy.json");
  d["events"][0]["effect"]["fixture"] = "shelf_9";
  EXPECT_EQ(schema_path(d), "events[0].effect");

  d = doc("room_tidy.json");
  d.erase("meta");
  EXPECT_EQ(schema_path(d), "meta");
}

struct Mutation {
  std::string code;
  std::function<void(Doc&)> apply;
};

TEST(Validate, EachRuleFires) {
  const std::vector<Mutation> mutations{
      {"DUPLICATE_ID", [](Doc& d) { d["ontology"]["objects"][1]["id"] = "book_1"; }},
      {"DANGLING_REFERENCE", [](Doc& d) { d["agent"]["argument_templates"][0]["undercuts"] = "nothing_here"; }},
      {"DANGLING_REFERENCE", [](Doc& d) { d["agent"]["reactive_rules"][1]["process"] = "proc9"; }},
      {"INVALID_STARTING_STATE", [](Doc& d) { d["starting_state"]["agent_pos"] = Doc::array({1, 0}); }},
      {"INVALID_STARTING_STATE", [](Doc& d) { d["starting_state"]["scatter_cells"] = Doc::array({Doc::array({0, 4})}); }},
      {"UNSORTED_EVENTS",
       [](Doc& d) { d["events"].push_back({{"fire_tick", 5}, {"effect", {{"type", "break_fixture"}, {"fixture", "table_1"}}}}); }},
      {"GOAL_ENTAILMENT", [](Doc& d) { d["goal"]["relaxed"]["book"] = Doc::array({"table"}); }},
      {"DUPLICATE_PROCESS", [](Doc& d) { d["agent"]["processes"][2]["id"] = "proc0"; }},
      {"DUPLICATE_PRIORITY", [](Doc& d) { d["agent"]["processes"][2]["priority_rank"] = 0; }},
      {"NEGATIVE_WEIGHT", [](Doc& d) { d["agent"]["argument_templates"][0]["weight"] = -0.5; }},
      {"NEGATIVE_WEIGHT", [](Doc& d) { d["agent"]["commitments"][0]["weight"] = -1; }},
      {"INVALID_PERIOD", [](Doc& d) { d["agent"]["deliberation_period"] = 0; }},
      {"INVALID_TTL", [](Doc& d) { d["agent"]["tendency_ttl"] = 0; }},
      {"REACTIVE_HYPOTHETICAL", [](Doc& d) { d["agent"]["reactive_rules"][1]["when"].push_back("appraised(hopeless)"); }},
      {"INVALID_MAGNITUDE", [](Doc& d) { d["agent"]["appraisal_rules"][0]["magnitude"] = 0; }},
      {"CYCLIC_UNDERCUT",
       [](Doc& d) {
         d["agent"]["argument_templates"][0]["undercuts"] = "relief_of_leaving";
         d["agent"]["argument_templates"][1]["undercuts"] = "tidy_satisfying";
       }},
      {"UNKNOWN_GOAL_VARIANT", [](Doc& d) { d["agent"]["countermeasures"][0]["action"]["goal_variant"] = "strict"; }},
      {"COMMITMENT_UNKNOWN_ATOM", [](Doc& d) { d["agent"]["commitments"][0]["atom"] = "weather"; }},
      {"INVALID_ID", [](Doc& d) { d["agent"]["countermeasures"][0]["id"] = "Replan-Now"; }},
  };
  for (const auto& m : mutations) {
    Doc d = doc("room_tidy.json");
    m.apply(d);
    auto rep = check(d);
    EXPECT_TRUE(rep.has_error(m.code)) << m.code << "\n" << format_report(rep);
  }
}

TEST(Validate, FormatVersion) {
  Doc d = doc("room_tidy.json");
  d["meta"]["format_version"] = 2;
  EXPECT_EQ(schema_path(d), "meta.format_version");
  ScenarioSpec spec = load("room_tidy.json");
  spec.meta.format_version = 2;
  EXPECT_TRUE(validate_scenario(spec).has_error("FORMAT_VERSION"));
}

TEST(Validate, Warnings) {
  Doc d = doc("room_tidy.json");
  d["goal"]["deadline_tick"] = 5;
  auto rep = check(d);
  EXPECT_TRUE(rep.ok());
  EXPECT_TRUE(rep.has_warning("UNREACHABLE_EVENT"));

  d = doc("room_tidy.json");
  d["agent"]["argument_templates"].erase(1);
  rep = check(d);
  EXPECT_TRUE(rep.ok());
  EXPECT_TRUE(rep.has_warning("PROCESS_WITHOUT_TEMPLATES"));
}

TEST(Validate, CycleReportNamesEveryMember) {
  Doc d = doc("room_tidy.json");
  d["agent"]["argument_templates"][0]["undercuts"] = "relief_of_leaving";
  d["agent"]["argument_templates"][1]["undercuts"] = "tidy_commitment";
  d["agent"]["argument_templates"][2]["undercuts"] = "tidy_satisfying";
  auto spec = parse_scenario(d.dump());
  auto cycle = undercut_cycle(spec.agent.argument_templates);
  EXPECT_EQ(std::set<std::string>(cycle.begin(), cycle.end()),
            (std::set<std::string>{"tidy_satisfying", "relief_of_leaving", "tidy_commitment"}));
}

TEST(InitialWorld, SameSeedSamePlacement) {
  const ScenarioSpec spec = load("room_tidy.json");
  bool any_difference = false;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    EXPECT_EQ(initial_world(spec, seed), initial_world(spec, seed));
    if (!(initial_world(spec, seed) == initial_world(spec, seed + 1))) any_difference = true;
  }
  EXPECT_TRUE(any_difference);
}

TEST(InitialWorld, ScatterRespectsPoolAndFixedObjects) {
  const ScenarioSpec spec = load("room_tidy.json");
  const std::set<Cell> pool(spec.starting_state.scatter_cells.begin(), spec.starting_state.scatter_cells.end());
  std::map<Cell, int> hits;
  const int seeds = 3000;
  for (int seed = 0; seed < seeds; ++seed) {
    WorldState w = initial_world(spec, static_cast<std::uint64_t>(seed));
    EXPECT_EQ(w.objects.at("toy_1").location, Location::on_floor({3, 4}));
    EXPECT_EQ(w.objects.at("toy_2").location, Location::on_floor({6, 2}));
    std::set<Cell> used;
    for (const char* id : {"book_1", "book_2", "book_3"}) {
      const auto& loc = w.objects.at(id).location;
      ASSERT_EQ(loc.kind, Location::Kind::floor);
      EXPECT_TRUE(pool.count(loc.cell));
      EXPECT_TRUE(used.insert(loc.cell).second);
      ++hits[loc.cell];
    }
  }
  // 3 books over 15 cells: each cell should be used about a fifth of the time.
  ASSERT_EQ(hits.size(), pool.size());
  for (const auto& [cell, n] : hits) EXPECT_NEAR(static_cast<double>(n) / seeds, 0.2, 0.035) << to_string(cell);
}

TEST(InitialWorld, AbsentObjectsWaitForSpawn) {
  Doc d = doc("room_tidy.json");
  d["starting_state"]["objects"]["book_3"] = "absent";
  d["events"].push_back({{"fire_tick", 20},
                         {"effect", {{"type", "spawn_object"}, {"object", "book_3"}, {"location", {{"floor", {0, 7}}}}}}});
  auto spec = parse_scenario(d.dump());
  ASSERT_TRUE(validate_scenario(spec).ok());
  WorldState w = initial_world(spec, 1);
  EXPECT_FALSE(w.objects.count("book_3"));
  w.tick = 20;
  EXPECT_TRUE(step_events(w, spec.events).world.objects.count("book_3"));
}

TEST(Instantiate, OverridesAndProcessOrder) {
  ScenarioSpec spec = load("non_smoking.json");
  AgentOptions opts;
  opts.weight_overrides[spec.agent.argument_templates.front().id] = 0.75;
  SimulationState s = instantiate(spec, 3, opts);
  EXPECT_DOUBLE_EQ(s.config.argument_templates.front().weight, 0.75);
  for (std::size_t i = 1; i < s.processes.size(); ++i)
    EXPECT_LT(s.processes[i - 1].priority_rank, s.processes[i].priority_rank);

  AgentOptions bad;
  bad.weight_overrides["no_such_template"] = 1.0;
  EXPECT_THROW(instantiate(spec, 3, bad), InvalidSpec);
  AgentOptions negative;
  negative.weight_overrides[spec.agent.argument_templates.front().id] = -1.0;
  EXPECT_THROW(instantiate(spec, 3, negative), InvalidSpec);

  spec.agent.tendency_ttl = 0;
  try {
    (void)instantiate(spec, 3);
    FAIL();
  } catch (const InvalidSpec& e) {
    EXPECT_TRUE(e.report().has_error("INVALID_TTL"));
  }
}
