#include <gtest/gtest.h>

#include <random>

#include "bctsim/arguments.hpp"

using namespace bctsim;

namespace {

Argument arg(std::string id, std::string option, Polarity p, double w, std::optional<std::string> undercuts = {}) {
  Argument a;
  a.id = std::move(id);
  a.option = std::move(option);
  a.polarity = p;
  a.weight = w;
  a.undercuts = std::move(undercuts);
  return a;
}

struct RandomCase {
  std::vector<std::string> options;
  std::vector<Argument> args;
};

// Acyclic by construction: an argument may only undercut an earlier one.
RandomCase random_case(std::mt19937_64& rng) {
  RandomCase c;
  const int n_opt = 1 + static_cast<int>(rng() % 6);
  for (int i = 0; i < n_opt; ++i) c.options.push_back("opt_" + std::to_string(i));
  const int n_arg = static_cast<int>(rng() % 13);
  for (int i = 0; i < n_arg; ++i) {
    std::optional<std::string> uc;
    if (i > 0 && rng() % 3 == 0) uc = "a" + std::to_string(rng() % i);
    c.args.push_back(arg("a" + std::to_string(i), c.options[rng() % c.options.size()],
                         rng() % 2 ? Polarity::pro : Polarity::con, static_cast<double>(rng() % 41) * 0.05, uc));
  }
  return c;
}

// Exhaustive oracle: the subsets S with "a in S iff no attacker of a is in S".
std::vector<std::set<std::string>> brute_force_extensions(const std::vector<Argument>& args) {
  std::vector<std::set<std::string>> out;
  const std::size_t n = args.size();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      bool attacked = false;
      for (std::size_t j = 0; j < n; ++j)
        if ((mask >> j & 1u) && args[j].undercuts == args[i].id) attacked = true;
      const bool in = mask >> i & 1u;
      if (in == attacked) ok = false;
    }
    if (!ok) continue;
    std::set<std::string> s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1u) s.insert(args[i].id);
    out.push_back(s);
  }
  return out;
}

// Straight-line ranking oracle: net descending, then option id ascending.
std::vector<std::string> oracle_ranking(const std::vector<std::string>& options, const std::vector<Argument>& args,
                                        const std::set<std::string>& active) {
  std::vector<std::pair<long long, std::string>> keyed;
  for (const auto& o : options) {
    long long net = 0;  // weights are multiples of 0.05, so count in twentieths
    for (const auto& a : args)
      if (a.option == o && active.count(a.id)) {
        long long w = std::llround(a.weight * 20);
        net += a.polarity == Polarity::pro ? w : -w;
      }
    keyed.push_back({-net, o});
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::string> out;
  for (const auto& [k, o] : keyed) out.push_back(o);
  return out;
}

}  // namespace

TEST(Aggregate, SingleProWins) {
  auto r = aggregate({"stay", "leave"}, {arg("p", "stay", Polarity::pro, 0.6), arg("c", "leave", Polarity::con, 0.2)});
  EXPECT_EQ(r.recommended, "stay");
  EXPECT_DOUBLE_EQ(r.scores["leave"], -0.2);
}

TEST(Aggregate, UndercutDeactivatesTarget) {
  std::vector<Argument> args{arg("p", "smoke", Polarity::pro, 0.8), arg("u", "smoke", Polarity::pro, 0.1, "p"),
                             arg("q", "abstain", Polarity::pro, 0.3)};
  auto r = aggregate({"smoke", "abstain"}, args);
  EXPECT_EQ(r.recommended, "abstain");
  EXPECT_DOUBLE_EQ(r.scores["smoke"], 0.1);
  auto& ex = r.explanation["smoke"];
  ASSERT_EQ(ex.size(), 2u);
  EXPECT_FALSE(ex[0].active);
  EXPECT_TRUE(ex[1].active);
}

TEST(Aggregate, ReinstatementThroughChain) {
  std::vector<Argument> args{arg("a", "o", Polarity::pro, 1.0), arg("b", "o", Polarity::con, 1.0, "a"),
                             arg("c", "o", Polarity::con, 1.0, "b")};
  EXPECT_EQ(active_set(args), (std::set<std::string>{"a", "c"}));
}

TEST(Aggregate, TieBreaksLexicographically) {
  auto r = aggregate({"b", "a", "c"}, {arg("x", "b", Polarity::pro, 0.1 + 0.2), arg("y", "a", Polarity::pro, 0.3)});
  EXPECT_EQ(r.ranking, (std::vector<std::string>{"a", "b", "c"}));
}

TEST(Aggregate, EmptyCaseAndBadInputs) {
  auto r = aggregate({"z", "y"}, {});
  EXPECT_EQ(r.recommended, "y");
  EXPECT_THROW(aggregate({}, {}), std::invalid_argument);
  EXPECT_THROW(aggregate({"a"}, {arg("x", "b", Polarity::pro, 1)}), std::invalid_argument);
}

TEST(ActiveSet, CycleIsRejected) {
  std::vector<Argument> args{arg("a", "o", Polarity::pro, 1, "b"), arg("b", "o", Polarity::pro, 1, "a")};
  EXPECT_THROW(active_set(args), CyclicUndercut);
}

TEST(BuildCase, SelectorsAndUndercutAttachment) {
  BeliefStore beliefs{{"craving", Belief{"true", 0, false}}};
  EvalContext ctx{&beliefs, {}, {}};
  std::vector<OptionInfo> opts{{"smoke", {"proc1"}, false}, {"walk", {"proc2"}, true}};
  std::vector<ArgumentTemplate> templates{
      {"t_all", {}, Polarity::pro, 0.1, "*", std::nullopt, "proc0", false},
      {"t_plan", parse_condition({"craving"}), Polarity::pro, 0.2, "@plan", std::nullopt, "proc0", false},
      {"t_p1", {}, Polarity::pro, 0.3, "@proc1", std::nullopt, "proc1", false},
      {"t_off", parse_condition({"!craving"}), Polarity::con, 0.4, "smoke", std::nullopt, "proc0", false},
      {"t_uc", {}, Polarity::con, 0.5, "walk", std::string("t_p1"), "proc0", false},
      {"t_lib", {}, Polarity::con, 0.6, "*", std::nullopt, "proc0", true},
  };
  auto args = build_case(opts, templates, ctx);
  std::vector<std::string> ids;
  for (const auto& a : args) ids.push_back(a.id);
  EXPECT_EQ(ids, (std::vector<std::string>{"t_all:smoke", "t_all:walk", "t_plan:walk", "t_p1:smoke", "t_uc:walk"}));
  // t_p1 produced no argument for walk, so the undercut is dropped.
  EXPECT_FALSE(args.back().undercuts);
  EXPECT_EQ(args[2].grounds, (std::vector<std::string>{"craving"}));
}

TEST(ArgumentProperties, ActiveSetMatchesBruteForce) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    auto c = random_case(rng);
    auto ext = brute_force_extensions(c.args);
    ASSERT_EQ(ext.size(), 1u);
    EXPECT_EQ(active_set(c.args), ext.front());
  }
}

TEST(ArgumentProperties, AggregateMatchesOracle) {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 500; ++trial) {
    auto c = random_case(rng);
    auto r = aggregate(c.options, c.args);
    auto active = brute_force_extensions(c.args).front();
    EXPECT_EQ(r.ranking, oracle_ranking(c.options, c.args, active));
    EXPECT_EQ(r.recommended, r.ranking.front());
    for (const auto& o : c.options) EXPECT_NEAR(r.scores[o], net_support(o, c.args, active), 1e-12);
  }
}

TEST(ArgumentProperties, RankingInvariantUnderPositiveScaling) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    auto c = random_case(rng);
    auto base = aggregate(c.options, c.args).ranking;
    for (double k : {0.5, 2.0, 4.0}) {
      auto scaled = c.args;
      for (auto& a : scaled) a.weight *= k;
      EXPECT_EQ(aggregate(c.options, scaled).ranking, base);
    }
  }
}

TEST(ArgumentProperties, UnattackedArgumentAddsItsWeight) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    auto c = random_case(rng);
    auto before = aggregate(c.options, c.args);
    const std::string& o = c.options[rng() % c.options.size()];
    const double w = static_cast<double>(rng() % 21) * 0.05;
    const Polarity p = rng() % 2 ? Polarity::pro : Polarity::con;
    auto more = c.args;
    more.push_back(arg("extra", o, p, w));
    auto after = aggregate(c.options, more);
    for (const auto& other : c.options) {
      double expect = before.scores[other] + (other == o ? (p == Polarity::pro ? w : -w) : 0.0);
      EXPECT_NEAR(after.scores[other], expect, 1e-9);
    }
  }
}

TEST(ArgumentProperties, ExplanationListsEveryArgumentOnce) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    auto c = random_case(rng);
    auto r = aggregate(c.options, c.args);
    auto active = active_set(c.args);
    std::multiset<std::string> seen;
    for (const auto& [opt, entries] : r.explanation) {
      for (const auto& e : entries) {
        seen.insert(e.argument);
        auto it = std::find_if(c.args.begin(), c.args.end(), [&](const Argument& a) { return a.id == e.argument; });
        ASSERT_NE(it, c.args.end());
        EXPECT_EQ(it->option, opt);
        EXPECT_EQ(e.active, active.count(e.argument) > 0);
        EXPECT_EQ(e.weight, it->weight);
      }
    }
    EXPECT_EQ(seen.size(), c.args.size());
    for (const auto& a : c.args) EXPECT_EQ(seen.count(a.id), 1u);
  }
}
