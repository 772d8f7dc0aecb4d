#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "rearrange/scenario.hpp"

namespace {

uint64_t seed_from_env() {
  if (const char* env = std::getenv("REARRANGE_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 0;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw CLI::ValidationError("cannot write " + path);
  out << text;
}

rearr::Strategy parse_strategy(const std::string& s) {
  if (s == "single") return rearr::Strategy::Single;
  if (s == "multiple") return rearr::Strategy::Multiple;
  throw CLI::ValidationError("strategy must be 'single' or 'multiple'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tabletop rearrangement planning toolkit"};
  app.require_subcommand(1);

  // --- gen ---
  auto* gen = app.add_subcommand("gen", "generate a random scenario");
  int gen_n = 5;
  double gen_w = 2.0, gen_h = 1.0, gen_r = 0.05;
  uint64_t gen_seed = seed_from_env();
  std::string gen_out = "-";
  gen->add_option("--n", gen_n, "number of objects");
  gen->add_option("--width", gen_w, "table width");
  gen->add_option("--height", gen_h, "table height");
  gen->add_option("--radius", gen_r, "object radius");
  gen->add_option("--seed", gen_seed, "rng seed (default: $REARRANGE_SEED)");
  gen->add_option("-o,--output", gen_out, "scenario JSON path ('-' = stdout)");

  // --- solve ---
  auto* solve = app.add_subcommand("solve", "plan on a scenario file");
  std::string solve_in, solve_out = "-", solve_events;
  std::string solve_planner = "strapv2", solve_strategy = "multiple";
  double solve_timeout = 10.0, solve_mc = 1.0, solve_rep = 0.3;
  int solve_bs = 0;
  bool solve_no_rr = false;
  uint64_t solve_seed = seed_from_env();
  solve->add_option("scenario", solve_in, "scenario JSON file")->required();
  solve->add_option("--planner", solve_planner,
                    "strapv2 | strap | orla | trlb | mcts");
  solve->add_option("--strategy", solve_strategy, "single | multiple");
  solve->add_option("--timeout", solve_timeout, "planning budget, seconds");
  solve->add_option("--mc", solve_mc, "manipulation cost per operation");
  solve->add_option("--seed", solve_seed, "rng seed (default: $REARRANGE_SEED)");
  solve->add_option("--re-explore-prob", solve_rep,
                    "closed-list re-exploration probability");
  solve->add_option("--buffer-samples", solve_bs,
                    "buffer poses sampled per relocation (0 = default)");
  solve->add_flag("--no-region-reduction", solve_no_rr,
                  "keep dominated standing regions");
  solve->add_option("-o,--output", solve_out, "plan JSON path ('-' = stdout)");
  solve->add_option("--events", solve_events,
                    "anytime cost-vs-time CSV output path");

  // --- validate ---
  auto* validate = app.add_subcommand("validate", "check a plan on a scenario");
  std::string val_scen, val_plan;
  double val_mc = 1.0;
  validate->add_option("scenario", val_scen, "scenario JSON file")->required();
  validate->add_option("plan", val_plan, "plan JSON file")->required();
  validate->add_option("--mc", val_mc, "manipulation cost per operation");

  // --- bench ---
  auto* bench = app.add_subcommand("bench", "anytime benchmark grid");
  rearr::BenchParams bp;
  bp.seed = seed_from_env();
  std::string bench_strategy = "multiple", bench_out = "-";
  bool bench_no_rr = false;
  bench->add_option("--planner", bp.planners,
                    "planners to run (repeatable)");
  bench->add_option("--n", bp.n_list, "object counts (repeatable)");
  bench->add_option("--mc", bp.mc_list, "manipulation costs (repeatable)");
  bench->add_option("--trials", bp.trials, "random trials per cell");
  bench->add_option("--timeout", bp.timeout_s, "per-run budget, seconds");
  bench->add_option("--seed", bp.seed, "base rng seed");
  bench->add_option("--strategy", bench_strategy, "single | multiple");
  bench->add_option("--re-explore-prob", bp.re_explore_prob,
                    "closed-list re-exploration probability");
  bench->add_option("--buffer-samples", bp.buffer_samples,
                    "buffer poses sampled per relocation (0 = default)");
  bench->add_flag("--no-region-reduction", bench_no_rr,
                  "keep dominated standing regions");
  bench->add_option("-o,--output", bench_out, "CSV path ('-' = stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const rearr::Scenario s = rearr::gen_scenario(
          gen_n, rearr::TableSpec{gen_w, gen_h}, gen_r, gen_seed);
      write_file(gen_out, rearr::scenario_to_json(s) + "\n");
      return 0;
    }

    if (*solve) {
      const rearr::Scenario s = rearr::scenario_from_json(read_file(solve_in));
      rearr::PlannerConfig cfg;
      cfg.strategy = parse_strategy(solve_strategy);
      cfg.timeout_s = solve_timeout;
      cfg.seed = solve_seed;
      cfg.re_explore_prob = solve_rep;
      cfg.buffer_samples = solve_bs;
      cfg.region_reduction = !solve_no_rr;
      const rearr::PlanResult res =
          rearr::run_planner(solve_planner, s, cfg, solve_mc);
      if (!solve_events.empty()) {
        std::ofstream ev(solve_events);
        if (!ev) throw CLI::ValidationError("cannot write " + solve_events);
        rearr::write_events_csv(ev, res.events);
      }
      if (!res.success) {
        std::cerr << "no solution within " << solve_timeout << "s\n";
        return 2;
      }
      write_file(solve_out, rearr::plan_to_json(res.plan) + "\n");
      return 0;
    }

    if (*validate) {
      const rearr::Scenario s = rearr::scenario_from_json(read_file(val_scen));
      const rearr::Plan p = rearr::plan_from_json(read_file(val_plan));
      const rearr::ValidationReport rep = rearr::validate_plan(s, p, val_mc);
      std::cout << rep.message << "\n";
      return rep.pass ? 0 : 3;
    }

    if (*bench) {
      bp.strategy = parse_strategy(bench_strategy);
      bp.region_reduction = !bench_no_rr;
      const std::vector<rearr::BenchRow> rows = rearr::run_bench(bp);
      std::ostringstream csv;
      rearr::write_bench_csv(csv, rows);
      write_file(bench_out, csv.str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
