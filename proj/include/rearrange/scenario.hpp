#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rearrange/baselines.hpp"

namespace rearr {

struct Scenario {
  TableSpec table{2.0, 1.0};
  double radius = 0.05;
  double rho = 0.0;  // 0: default_reach(table)
  PerimeterCoord robot_start = 0.0;
  Arrangement start;
  Arrangement goal;
  uint64_t seed = 0;

  double reach() const { return rho > 0 ? rho : default_reach(table); }
  State start_state() const { return {robot_start, start}; }
};

// Rejection-samples valid start and goal arrangements with every object
// misplaced; throws std::runtime_error("DensityTooHigh") when packing fails.
Scenario gen_scenario(int n, const TableSpec& table, double radius,
                      uint64_t seed);

std::string scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const std::string& text);

std::string plan_to_json(const Plan& plan);
Plan plan_from_json(const std::string& text);

void write_events_csv(std::ostream& os, const std::vector<AnytimeEvent>& ev);

struct ValidationReport {
  bool pass = false;
  std::string message;
};

// Re-simulates and re-costs a plan against its scenario.
ValidationReport validate_plan(const Scenario& scenario, const Plan& plan,
                               double mc = 1.0, double cost_tol = 1e-9);

// Planner registry: "strapv2", "strap", "orla", "trlb", "mcts".
// The strategy suffix is appended by the bench harness in CSV rows.
PlanResult run_planner(const std::string& name, const Scenario& scenario,
                       PlannerConfig config, double mc);

struct BenchParams {
  std::vector<int> n_list{5};
  std::vector<std::string> planners{"strapv2"};
  std::vector<double> mc_list{1.0};
  int trials = 10;
  double timeout_s = 10.0;
  uint64_t seed = 0;
  Strategy strategy = Strategy::Multiple;
  bool region_reduction = true;
  double re_explore_prob = 0.3;
  int buffer_samples = 0;
  double bucket_ms = 100.0;
};

struct BenchRow {
  std::string planner;
  int n = 0;
  double mc = 0.0;
  uint64_t seed = 0;
  double bucket_ms = 0.0;
  double best_cost = 0.0;  // NaN when the trial produced no solution
};

// Runs the trials x planners x n x mc grid and aggregates best-cost per time
// bucket with carry-forward of the last improvement.
std::vector<BenchRow> run_bench(const BenchParams& params);

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows);

}  // namespace rearr
