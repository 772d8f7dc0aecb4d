#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "rearrange/scenario.hpp"

using namespace rearr;

namespace {
const TableSpec kTable{2.0, 1.0};
constexpr double kR = 0.05;
}  // namespace

TEST_CASE("generated scenarios are valid, fully misplaced, and reproducible") {
  for (uint64_t seed : {0u, 5u, 123u}) {
    const Scenario a = gen_scenario(8, kTable, kR, seed);
    CHECK(a.start.valid(kTable));
    CHECK(a.goal.valid(kTable));
    for (int k = 0; k < 8; ++k) {
      CHECK(dist(a.start.poses[k], a.goal.poses[k]) > kPoseTol);
    }
    const Scenario b = gen_scenario(8, kTable, kR, seed);
    for (int k = 0; k < 8; ++k) {
      CHECK(dist(a.start.poses[k], b.start.poses[k]) == doctest::Approx(0.0));
      CHECK(dist(a.goal.poses[k], b.goal.poses[k]) == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("overpacked tables are rejected instead of spinning") {
  CHECK_THROWS_AS(gen_scenario(40, TableSpec{0.5, 0.5}, 0.05, 1),
                  std::runtime_error);
}

TEST_CASE("scenario JSON round trip") {
  const Scenario a = gen_scenario(5, kTable, kR, 9);
  const Scenario b = scenario_from_json(scenario_to_json(a));
  CHECK(b.table.width == doctest::Approx(a.table.width));
  CHECK(b.table.height == doctest::Approx(a.table.height));
  CHECK(b.radius == doctest::Approx(a.radius));
  CHECK(b.robot_start == doctest::Approx(a.robot_start));
  CHECK(b.seed == a.seed);
  REQUIRE(b.start.poses.size() == a.start.poses.size());
  for (size_t k = 0; k < a.start.poses.size(); ++k) {
    CHECK(dist(a.start.poses[k], b.start.poses[k]) < 1e-12);
    CHECK(dist(a.goal.poses[k], b.goal.poses[k]) < 1e-12);
  }
}

TEST_CASE("plan JSON round trip") {
  Plan p;
  p.total_cost = 7.25;
  p.sequence = {{OpType::Pick, 2, {0.5, 0.25}, 0.5},
                {OpType::Place, 2, {1.5, 0.25}, 1.5}};
  const Plan q = plan_from_json(plan_to_json(p));
  CHECK(q.total_cost == doctest::Approx(p.total_cost));
  REQUIRE(q.sequence.size() == 2);
  CHECK(q.sequence[0].type == OpType::Pick);
  CHECK(q.sequence[1].type == OpType::Place);
  CHECK(q.sequence[0].object == 2);
  CHECK(q.sequence[1].standing == doctest::Approx(1.5));
  CHECK(dist(q.sequence[1].pose, p.sequence[1].pose) < 1e-12);
}

TEST_CASE("plan validation accepts good plans and pinpoints bad ones") {
  const Scenario sc = gen_scenario(4, kTable, kR, 31);
  PlannerConfig cfg;
  cfg.timeout_s = 0.5;
  cfg.seed = 31;
  const PlanResult res = run_planner("strapv2", sc, cfg, 1.0);
  REQUIRE(res.success);

  CHECK(validate_plan(sc, res.plan).pass);

  SUBCASE("tampered cost") {
    Plan bad = res.plan;
    bad.total_cost += 0.5;
    const ValidationReport rep = validate_plan(sc, bad);
    CHECK_FALSE(rep.pass);
    CHECK(rep.message.find("cost mismatch") != std::string::npos);
  }
  SUBCASE("truncated plan misses the goal") {
    Plan bad = res.plan;
    bad.sequence.resize(bad.sequence.size() - 2);
    CHECK_FALSE(validate_plan(sc, bad).pass);
  }
  SUBCASE("corrupted operation fails simulation") {
    Plan bad = res.plan;
    bad.sequence[0].pose.x += 0.2;  // pick no longer matches the start pose
    const ValidationReport rep = validate_plan(sc, bad);
    CHECK_FALSE(rep.pass);
    CHECK(rep.message.find("simulation failed") != std::string::npos);
  }
}

TEST_CASE("planner registry covers the five names and rejects others") {
  const Scenario sc = gen_scenario(3, kTable, kR, 17);
  PlannerConfig cfg;
  cfg.timeout_s = 0.3;
  cfg.seed = 17;
  for (const char* name : {"strapv2", "strap", "orla", "trlb", "mcts"}) {
    const PlanResult res = run_planner(name, sc, cfg, 1.0);
    REQUIRE(res.success);
    CHECK(validate_plan(sc, res.plan).pass);
  }
  CHECK_THROWS_AS(run_planner("dijkstra", sc, cfg, 1.0),
                  std::invalid_argument);
}

TEST_CASE("anytime events serialize to CSV") {
  std::ostringstream os;
  write_events_csv(os, {{0.0101, 12.5}, {0.2, 10.0}});
  CHECK(os.str() ==
        "elapsed_ms,best_cost\n"
        "10.100,12.5\n"
        "200.000,10\n");
}

TEST_CASE("bench grid emits carry-forward buckets for every cell") {
  BenchParams bp;
  bp.n_list = {3};
  bp.planners = {"trlb", "strapv2"};
  bp.mc_list = {1.0};
  bp.trials = 2;
  bp.timeout_s = 0.3;
  bp.seed = 5;
  const auto rows = run_bench(bp);
  const int buckets = 3;  // ceil(300 ms / 100 ms)
  CHECK(rows.size() == static_cast<size_t>(2 * 2 * buckets));

  // per (planner, seed) group: NaN prefix then non-increasing carried costs
  for (size_t i = 0; i < rows.size(); i += buckets) {
    bool seen_value = false;
    double last = 0.0;
    for (int b = 0; b < buckets; ++b) {
      const BenchRow& r = rows[i + b];
      CHECK(r.bucket_ms == doctest::Approx((b + 1) * 100.0));
      if (std::isnan(r.best_cost)) {
        CHECK_FALSE(seen_value);  // once solved, stays solved
      } else {
        if (seen_value) CHECK(r.best_cost <= last + 1e-12);
        seen_value = true;
        last = r.best_cost;
      }
    }
    CHECK(seen_value);  // trivial instances solve within the budget
  }

  std::ostringstream os;
  write_bench_csv(os, rows);
  const std::string csv = os.str();
  CHECK(csv.rfind("planner,n,mc,seed,bucket_ms,best_cost\n", 0) == 0);
  CHECK(csv.find("strapv2-multiple") != std::string::npos);
  CHECK(csv.find("trlb,") != std::string::npos);
}
