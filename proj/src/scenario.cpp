#include "rearrange/scenario.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace rearr {

using nlohmann::json;

Scenario gen_scenario(int n, const TableSpec& table, double radius,
                      uint64_t seed) {
  Scenario s;
  s.table = table;
  s.radius = radius;
  s.seed = seed;
  s.robot_start = 0.0;
  s.start.radius = radius;
  s.goal.radius = radius;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(radius, table.width - radius);
  std::uniform_real_distribution<double> uy(radius, table.height - radius);
  constexpr int kMaxAttempts = 10000;

  auto sample_arrangement = [&](const std::vector<Point2>* avoid_same_index) {
    std::vector<Point2> poses;
    int attempts = 0;
    while (static_cast<int>(poses.size()) < n) {
      if (++attempts > kMaxAttempts) throw std::runtime_error("DensityTooHigh");
      const Point2 c{ux(rng), uy(rng)};
      if (!pose_valid(table, poses, c, radius)) continue;
      if (avoid_same_index &&
          dist((*avoid_same_index)[poses.size()], c) <= kPoseTol)
        continue;  // every object must start misplaced
      poses.push_back(c);
    }
    return poses;
  };

  s.start.poses = sample_arrangement(nullptr);
  s.goal.poses = sample_arrangement(&s.start.poses);
  return s;
}

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["table"] = {{"width", s.table.width}, {"height", s.table.height}};
  j["radius"] = s.radius;
  j["rho"] = s.rho;
  j["robot_start"] = s.robot_start;
  j["seed"] = s.seed;
  auto poses = [](const Arrangement& a) {
    json arr = json::array();
    for (const Point2& p : a.poses) arr.push_back({p.x, p.y});
    return arr;
  };
  j["start"] = poses(s.start);
  j["goal"] = poses(s.goal);
  return j.dump(2);
}

Scenario scenario_from_json(const std::string& text) {
  const json j = json::parse(text);
  Scenario s;
  s.table.width = j.at("table").at("width").get<double>();
  s.table.height = j.at("table").at("height").get<double>();
  s.radius = j.at("radius").get<double>();
  s.rho = j.value("rho", 0.0);
  s.robot_start = j.value("robot_start", 0.0);
  s.seed = j.value("seed", uint64_t{0});
  auto poses = [](const json& arr) {
    std::vector<Point2> out;
    for (const auto& p : arr) out.push_back({p.at(0), p.at(1)});
    return out;
  };
  s.start.poses = poses(j.at("start"));
  s.goal.poses = poses(j.at("goal"));
  s.start.radius = s.radius;
  s.goal.radius = s.radius;
  return s;
}

std::string plan_to_json(const Plan& plan) {
  json ops = json::array();
  for (const Operation& op : plan.sequence) {
    ops.push_back({{"type", op.type == OpType::Pick ? "pick" : "place"},
                   {"object", op.object},
                   {"pose", {op.pose.x, op.pose.y}},
                   {"standing", op.standing}});
  }
  json j;
  j["total_cost"] = plan.total_cost;
  j["operations"] = std::move(ops);
  return j.dump(2);
}

Plan plan_from_json(const std::string& text) {
  const json j = json::parse(text);
  Plan plan;
  plan.total_cost = j.at("total_cost").get<double>();
  for (const auto& o : j.at("operations")) {
    Operation op;
    op.type = o.at("type").get<std::string>() == "pick" ? OpType::Pick
                                                        : OpType::Place;
    op.object = o.at("object").get<int>();
    op.pose = {o.at("pose").at(0), o.at("pose").at(1)};
    op.standing = o.at("standing").get<double>();
    plan.sequence.push_back(op);
  }
  return plan;
}

void write_events_csv(std::ostream& os, const std::vector<AnytimeEvent>& ev) {
  os << "elapsed_ms,best_cost\n";
  char buf[64];
  for (const AnytimeEvent& e : ev) {
    std::snprintf(buf, sizeof(buf), "%.3f,%.9g\n", e.elapsed_s * 1000.0,
                  e.best_cost);
    os << buf;
  }
}

ValidationReport validate_plan(const Scenario& scenario, const Plan& plan,
                               double mc, double cost_tol) {
  ValidationReport rep;
  const State start = scenario.start_state();
  const SimResult sim =
      simulate(scenario.table, start, plan.sequence, scenario.reach());
  if (!sim.ok) {
    rep.message = std::string("simulation failed: ") +
                  sim_error_name(sim.error) + " at operation " +
                  std::to_string(sim.op_index);
    return rep;
  }
  if (!is_goal(sim.state, scenario.goal)) {
    rep.message = "plan does not reach the goal arrangement";
    return rep;
  }
  const CostModel cm{mc, scenario.table};
  const double cost = sequence_cost(plan.sequence, start.robot, cm);
  if (std::fabs(cost - plan.total_cost) > cost_tol) {
    rep.message = "cost mismatch: recomputed " + std::to_string(cost) +
                  " vs reported " + std::to_string(plan.total_cost);
    return rep;
  }
  rep.pass = true;
  rep.message = "PASS";
  return rep;
}

PlanResult run_planner(const std::string& name, const Scenario& scenario,
                       PlannerConfig config, double mc) {
  const CostModel cm{mc, scenario.table};
  const State start = scenario.start_state();
  config.rho = scenario.reach();

  if (name == "strapv2") {
    return plan(scenario.table, start, scenario.goal, config, cm);
  }
  if (name == "strap") {
    config.re_explore_prob = 0.0;
    return plan(scenario.table, start, scenario.goal, config, cm);
  }
  if (name == "orla") {
    config.re_explore_prob = 0.0;
    config.goal_attempt = false;
    config.arrangement_only_keys = true;
    config.strategy = Strategy::Single;
    return plan(scenario.table, start, scenario.goal, config, cm);
  }
  if (name == "trlb") {
    std::mt19937_64 rng(config.seed);
    return trlb_plan(scenario.table, start, scenario.goal, cm, rng,
                     config.rho, config.tol);
  }
  if (name == "mcts") {
    return mcts_plan(scenario.table, start, scenario.goal, config, cm);
  }
  throw std::invalid_argument("unknown planner: " + name);
}

std::vector<BenchRow> run_bench(const BenchParams& params) {
  std::vector<BenchRow> rows;
  for (int n : params.n_list) {
    for (int trial = 0; trial < params.trials; ++trial) {
      const uint64_t seed =
          params.seed + 10007ull * trial + 1000003ull * n;
      const Scenario scenario = gen_scenario(n, TableSpec{2.0, 1.0}, 0.05,
                                             seed);
      for (double mc : params.mc_list) {
        for (const std::string& name : params.planners) {
          PlannerConfig config;
          config.strategy = params.strategy;
          config.region_reduction = params.region_reduction;
          config.re_explore_prob = params.re_explore_prob;
          config.buffer_samples = params.buffer_samples;
          config.timeout_s = params.timeout_s;
          config.seed = seed;

          PlanResult res;
          try {
            res = run_planner(name, scenario, config, mc);
          } catch (const std::exception&) {
            // recorded below as all-NaN buckets; the run continues
          }

          std::string label = name;
          if (name != "trlb" && name != "orla") {
            label += params.strategy == Strategy::Single ? "-single"
                                                         : "-multiple";
          }
          const int buckets = static_cast<int>(
              std::ceil(params.timeout_s * 1000.0 / params.bucket_ms));
          size_t next = 0;
          double best = std::nan("");
          for (int b = 1; b <= buckets; ++b) {
            const double t_ms = b * params.bucket_ms;
            while (next < res.events.size() &&
                   res.events[next].elapsed_s * 1000.0 <= t_ms) {
              best = res.events[next].best_cost;
              ++next;
            }
            rows.push_back({label, n, mc, seed, t_ms, best});
          }
        }
      }
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "planner,n,mc,seed,bucket_ms,best_cost\n";
  char buf[128];
  for (const BenchRow& r : rows) {
    std::snprintf(buf, sizeof(buf), ",%d,%.9g,%llu,%.1f,", r.n, r.mc,
                  static_cast<unsigned long long>(r.seed), r.bucket_ms);
    os << r.planner << buf;
    if (std::isnan(r.best_cost))
      os << "nan";
    else {
      std::snprintf(buf, sizeof(buf), "%.9g", r.best_cost);
      os << buf;
    }
    os << "\n";
  }
}

}  // namespace rearr
