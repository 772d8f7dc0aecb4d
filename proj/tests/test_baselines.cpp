#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "rearrange/baselines.hpp"
#include "rearrange/scenario.hpp"

using namespace rearr;

namespace {
const TableSpec kTable{2.0, 1.0};
constexpr double kR = 0.05;
const CostModel kCm{1.0, kTable};
}  // namespace

TEST_CASE("reference planner produces valid single-shot plans") {
  for (uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    const Scenario sc = gen_scenario(6, kTable, kR, seed);
    std::mt19937_64 rng(seed);
    const PlanResult res =
        trlb_plan(kTable, sc.start_state(), sc.goal, kCm, rng);
    REQUIRE(res.success);
    CHECK(res.events.size() == 1);
    const SimResult sim =
        simulate(kTable, sc.start_state(), res.plan.sequence, sc.reach());
    REQUIRE(sim.ok);
    CHECK(is_goal(sim.state, sc.goal));
    CHECK(sequence_cost(res.plan.sequence, sc.robot_start, kCm) ==
          doctest::Approx(res.plan.total_cost).epsilon(1e-12));
  }
}

TEST_CASE("tree-search baseline improves over time and stays valid") {
  const Scenario sc = gen_scenario(5, kTable, kR, 11);
  PlannerConfig cfg;
  cfg.timeout_s = 1.0;
  cfg.seed = 11;
  cfg.strategy = Strategy::Single;
  const PlanResult res = mcts_plan(kTable, sc.start_state(), sc.goal, cfg, kCm);
  REQUIRE(res.success);
  REQUIRE_FALSE(res.events.empty());
  for (size_t i = 1; i < res.events.size(); ++i) {
    CHECK(res.events[i].best_cost < res.events[i - 1].best_cost);
  }
  const SimResult sim =
      simulate(kTable, sc.start_state(), res.plan.sequence, sc.reach());
  REQUIRE(sim.ok);
  CHECK(is_goal(sim.state, sc.goal));
  CHECK(res.plan.total_cost ==
        doctest::Approx(res.events.back().best_cost).epsilon(1e-12));
}

TEST_CASE("tree-search baseline works with batched expansion too") {
  const Scenario sc = gen_scenario(4, kTable, kR, 13);
  PlannerConfig cfg;
  cfg.timeout_s = 1.0;
  cfg.seed = 13;
  cfg.strategy = Strategy::Multiple;
  const PlanResult res = mcts_plan(kTable, sc.start_state(), sc.goal, cfg, kCm);
  REQUIRE(res.success);
  const SimResult sim =
      simulate(kTable, sc.start_state(), res.plan.sequence, sc.reach());
  REQUIRE(sim.ok);
  CHECK(is_goal(sim.state, sc.goal));
}
