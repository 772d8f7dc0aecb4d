// End-to-end acceptance checks. Each check prints exactly one PASS/FAIL line;
// the process exits non-zero if any fails. Budgets are sized for one core.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "rearrange/baselines.hpp"
#include "rearrange/scenario.hpp"

using namespace rearr;

namespace {

const TableSpec kTable{2.0, 1.0};
constexpr double kR = 0.05;
constexpr double kRho = 0.5;

int g_failures = 0;

void report(int idx, bool pass, const std::string& detail) {
  std::printf("[%2d] %s  %s\n", idx, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double now_s() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

bool events_monotone(const std::vector<AnytimeEvent>& ev) {
  for (size_t i = 1; i < ev.size(); ++i) {
    if (ev[i].best_cost > ev[i - 1].best_cost + 1e-12) return false;
    if (ev[i].elapsed_s + 1e-9 < ev[i - 1].elapsed_s) return false;
  }
  return true;
}

size_t g_event_series = 0;
size_t g_event_violations = 0;

void collect_events(const PlanResult& res) {
  ++g_event_series;
  if (!events_monotone(res.events)) ++g_event_violations;
}

// ---------------------------------------------------------------------------
// 1. Validity: plans from every planner re-simulate and re-cost.

void check_validity() {
  const double t_start = now_s();
  const std::vector<std::string> planners{"strapv2", "strap", "orla", "trlb",
                                          "mcts"};
  int produced = 0, valid = 0, runs = 0;
  for (int n : {5, 7, 9}) {
    for (int seed = 0; seed < 100; ++seed) {
      const Scenario sc = gen_scenario(n, kTable, kR, 40000 + 100 * n + seed);
      for (const std::string& name : planners) {
        PlannerConfig cfg;
        cfg.timeout_s = name == "orla" ? 0.5 : 0.1;
        cfg.seed = 40000 + 100 * n + seed;
        ++runs;
        const PlanResult res = run_planner(name, sc, cfg, 1.0);
        collect_events(res);
        if (!res.success) continue;
        ++produced;
        if (validate_plan(sc, res.plan, 1.0, 1e-9).pass) ++valid;
      }
    }
  }
  const double dt = now_s() - t_start;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "validity: %d/%d produced plans valid (%d/%d runs solved, "
                "%.0f s, budget 600 s)",
                valid, produced, produced, runs, dt);
  report(1, valid == produced && produced > 0 && dt < 600.0, buf);
}

// ---------------------------------------------------------------------------
// 2. Cost model equals the closed-form expansions.

void check_cost_closed_forms() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> us(0.0, 6.0);
  std::uniform_int_distribution<int> um(1, 8), ug(1, 5), uo(1, 4);
  const CostModel cm{1.0, kTable};
  int bad = 0;

  for (int trial = 0; trial < 1000; ++trial) {
    // per-relocation standing points
    const int m = um(rng);
    const double r0 = us(rng);
    OperationSequence seq;
    double closed = 2.0 * cm.mc * m;
    double prev = r0;
    for (int i = 0; i < m; ++i) {
      const double lp = us(rng), lq = us(rng);
      seq.push_back({OpType::Pick, i, {0.5, 0.5}, lp});
      seq.push_back({OpType::Place, i, {0.5, 0.5}, lq});
      closed += travel_cost(kTable, prev, lp) + travel_cost(kTable, lp, lq);
      prev = lq;
    }
    if (std::fabs(sequence_cost(seq, r0, cm) - closed) > 1e-9) ++bad;
  }

  for (int trial = 0; trial < 1000; ++trial) {
    // grouped same-location batches
    const int groups = ug(rng);
    const double r0 = us(rng);
    OperationSequence seq;
    double closed = 0.0;
    double prev = r0;
    for (int gidx = 0; gidx < groups; ++gidx) {
      const double l = us(rng);
      const int ops = 2 * uo(rng);
      for (int i = 0; i < ops; ++i) {
        seq.push_back({i % 2 == 0 ? OpType::Pick : OpType::Place, gidx,
                       {0.5, 0.5}, l});
      }
      closed += travel_cost(kTable, prev, l) + cm.mc * ops;
      prev = l;
    }
    if (std::fabs(sequence_cost(seq, r0, cm) - closed) > 1e-9) ++bad;
  }

  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "cost closed forms: %d/2000 mismatches (tol 1e-9)", bad);
  report(2, bad == 0, buf);
}

// ---------------------------------------------------------------------------
// 3. Running-buffer plan equals exhaustive order enumeration.

void check_buffer_oracle() {
  const double t_start = now_s();
  std::mt19937_64 rng(333);
  std::uniform_real_distribution<double> ux(0.15, 1.85), uy(0.15, 0.85);
  std::uniform_int_distribution<int> un(2, 6);
  const double r = 0.15;
  int bad = 0;

  for (int trial = 0; trial < 200; ++trial) {
    const int n = un(rng);
    auto sample = [&] {
      std::vector<Point2> v;
      while (static_cast<int>(v.size()) < n) {
        const Point2 p{ux(rng), uy(rng)};
        if (pose_valid(kTable, v, p, r)) v.push_back(p);
      }
      return v;
    };
    const std::vector<Point2> cur = sample();
    const std::vector<Point2> goal = sample();
    auto overlaps = [&](const Point2& a, const Point2& b) {
      return dist(a, b) < 2.0 * r - 1e-9;
    };

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    int best_peak = n + 1;
    do {
      uint32_t placed = 0, buffered = 0;
      int peak = 0;
      for (int k : order) {
        for (int j = 0; j < n; ++j) {
          if (j == k || ((placed >> j) & 1u) || ((buffered >> j) & 1u))
            continue;
          if (overlaps(goal[k], cur[j])) buffered |= 1u << j;
        }
        peak = std::max(peak, std::popcount(buffered));
        buffered &= ~(1u << k);
        placed |= 1u << k;
      }
      best_peak = std::min(best_peak, peak);
    } while (std::next_permutation(order.begin(), order.end()));

    PoseMap cm_cur, cm_goal;
    for (int k = 0; k < n; ++k) {
      cm_cur[k] = cur[k];
      cm_goal[k] = goal[k];
    }
    const AbstractPlan plan =
        minimal_running_buffer_plan(cm_cur, cm_goal, kTable, r);
    if (plan.max_running != best_peak) ++bad;
  }
  const double dt = now_s() - t_start;
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "buffer plan vs permutation oracle: %d/200 mismatches "
                "(%.1f s, budget 60 s)",
                bad, dt);
  report(3, bad == 0 && dt < 60.0, buf);
}

// ---------------------------------------------------------------------------
// 4. Near-optimality on tiny instances against a discretized brute force.

// Brute force over relocation orders, optional parking on a 5x5 grid, and
// per-operation nearest standing points.
double brute_force_cost(const Scenario& sc, double mc) {
  const int n = sc.start.size();
  const CostModel cm{mc, kTable};
  std::vector<Point2> grid;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      grid.push_back(
          {(i + 0.5) * kTable.width / 5.0, (j + 0.5) * kTable.height / 5.0});
    }
  }

  double best = 1e300;
  // moves: 2*k = park object k, 2*k+1 = finish object k
  for (uint32_t parked = 0; parked < (1u << n); ++parked) {
    std::vector<int> moves;
    for (int k = 0; k < n; ++k) {
      if ((parked >> k) & 1u) moves.push_back(2 * k);
      moves.push_back(2 * k + 1);
    }
    std::sort(moves.begin(), moves.end());
    do {
      bool order_ok = true;
      for (int k = 0; k < n; ++k) {
        if (!((parked >> k) & 1u)) continue;
        const auto pi = std::find(moves.begin(), moves.end(), 2 * k);
        const auto gi = std::find(moves.begin(), moves.end(), 2 * k + 1);
        if (pi > gi) order_ok = false;
      }
      if (!order_ok) continue;

      // assign grid cells to parked objects
      std::vector<int> park_ids;
      for (int k = 0; k < n; ++k)
        if ((parked >> k) & 1u) park_ids.push_back(k);
      std::vector<size_t> choice(park_ids.size(), 0);
      while (true) {
        std::vector<Point2> poses = sc.start.poses;
        double robot = sc.robot_start, cost = 0.0;
        bool ok = true;
        for (int mv : moves) {
          const int k = mv / 2;
          Point2 target;
          if (mv % 2 == 0) {
            const size_t slot =
                std::find(park_ids.begin(), park_ids.end(), k) -
                park_ids.begin();
            target = grid[choice[slot]];
          } else {
            target = sc.goal.poses[k];
          }
          const int ignore[] = {k};
          if (!pose_valid(kTable, poses, target, kR, ignore)) {
            ok = false;
            break;
          }
          const double lp = nearest_perimeter_coord(kTable, poses[k]);
          const double lq = nearest_perimeter_coord(kTable, target);
          cost += 2.0 * cm.mc + travel_cost(kTable, robot, lp) +
                  travel_cost(kTable, lp, lq);
          robot = lq;
          poses[k] = target;
        }
        if (ok) best = std::min(best, cost);

        // next grid assignment
        size_t d = 0;
        while (d < choice.size() && ++choice[d] == grid.size()) {
          choice[d++] = 0;
        }
        if (d == choice.size()) break;
        if (choice.empty()) break;
      }
    } while (std::next_permutation(moves.begin(), moves.end()));
  }
  return best;
}

void check_tiny_optimality() {
  int within = 0, total = 0, h_bad = 0;
  const CostModel cm{1.0, kTable};
  for (int n : {1, 2}) {
    for (int seed = 0; seed < 25; ++seed) {
      const Scenario sc = gen_scenario(n, kTable, kR, 7000 + 25 * n + seed);
      const double brute = brute_force_cost(sc, 1.0);
      if (brute >= 1e300) continue;
      if (brute + 1e-9 < heuristic(sc.start_state(), sc.goal, cm)) ++h_bad;

      PlannerConfig cfg;
      cfg.timeout_s = 5.0;
      cfg.seed = seed;
      const PlanResult res = run_planner("strapv2", sc, cfg, 1.0);
      collect_events(res);
      ++total;
      if (res.success && res.plan.total_cost <= 1.05 * brute + 1e-9) ++within;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "tiny instances: %d/%d within 5%% of brute force "
                "(need >= 90%%), %d heuristic bound violations",
                within, total, h_bad);
  report(4, total > 0 && within * 10 >= total * 9 && h_bad == 0, buf);
}

// ---------------------------------------------------------------------------
// 5. Batched strategy beats one-object relocations on average.

struct StrategyStats {
  std::vector<double> single_final, multi_final, multi_first;
};

StrategyStats run_strategy_pair(int n, int seeds, double timeout,
                                uint64_t base_seed, double mc) {
  StrategyStats st;
  for (int seed = 0; seed < seeds; ++seed) {
    const Scenario sc = gen_scenario(n, kTable, kR, base_seed + seed);
    for (Strategy strat : {Strategy::Single, Strategy::Multiple}) {
      PlannerConfig cfg;
      cfg.strategy = strat;
      cfg.timeout_s = timeout;
      cfg.seed = base_seed + seed;
      const PlanResult res = run_planner("strapv2", sc, cfg, mc);
      collect_events(res);
      if (!res.success) continue;
      if (strat == Strategy::Single) {
        st.single_final.push_back(res.plan.total_cost);
      } else {
        st.multi_final.push_back(res.plan.total_cost);
        st.multi_first.push_back(res.events.front().elapsed_s);
      }
    }
  }
  return st;
}

void check_strategy_trend() {
  const StrategyStats st = run_strategy_pair(5, 20, 10.0, 50000, 1.0);
  const bool complete = st.single_final.size() == 20 &&
                        st.multi_final.size() == 20;
  const double ms = complete ? mean(st.single_final) : 0.0;
  const double mm = complete ? mean(st.multi_final) : 0.0;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "strategy trend (n=5, 20 seeds): mean final multiple %.3f vs "
                "single %.3f; median first solution (multiple) %.0f ms",
                mm, ms,
                complete ? 1000.0 * median(st.multi_first) : -1.0);
  report(5, complete && mm <= ms, buf);
}

// ---------------------------------------------------------------------------
// 6. Closed-list re-exploration does not hurt final quality.

void check_re_exploration_trend() {
  std::vector<double> with, without;
  for (int seed = 0; seed < 20; ++seed) {
    const Scenario sc = gen_scenario(7, kTable, kR, 60000 + seed);
    for (const char* name : {"strapv2", "strap"}) {
      PlannerConfig cfg;
      cfg.timeout_s = 20.0;
      cfg.seed = 60000 + seed;
      const PlanResult res = run_planner(name, sc, cfg, 1.0);
      collect_events(res);
      if (!res.success) continue;
      (std::string(name) == "strapv2" ? with : without)
          .push_back(res.plan.total_cost);
    }
  }
  const bool complete = with.size() == 20 && without.size() == 20;
  const double mw = complete ? mean(with) : 0.0;
  const double mo = complete ? mean(without) : 0.0;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "re-exploration trend (n=7, 20 seeds): mean final %.3f (on) "
                "vs %.3f (off), tolerance 1%%",
                mw, mo);
  report(6, complete && mw <= mo * 1.01, buf);
}

// ---------------------------------------------------------------------------
// 7. Region reduction speeds up the first solution at high object counts.

void check_region_reduction_trend() {
  std::vector<double> first_on, first_off, final_on, final_off;
  for (int seed = 0; seed < 10; ++seed) {
    const Scenario sc = gen_scenario(15, kTable, kR, 70000 + seed);
    for (bool reduce : {true, false}) {
      PlannerConfig cfg;
      cfg.timeout_s = 10.0;
      cfg.seed = 70000 + seed;
      cfg.region_reduction = reduce;
      const PlanResult res = run_planner("strapv2", sc, cfg, 1.0);
      collect_events(res);
      if (!res.success) continue;
      (reduce ? first_on : first_off).push_back(res.events.front().elapsed_s);
      (reduce ? final_on : final_off).push_back(res.plan.total_cost);
    }
  }
  const bool complete = first_on.size() == 10 && first_off.size() == 10;
  const double med_on = complete ? median(first_on) : 0.0;
  const double med_off = complete ? median(first_off) : 0.0;
  const double fm_on = complete ? mean(final_on) : 0.0;
  const double fm_off = complete ? mean(final_off) : 0.0;
  const bool cost_close =
      complete &&
      std::fabs(fm_on - fm_off) <= 0.05 * std::max(fm_on, fm_off);
  char buf[220];
  std::snprintf(buf, sizeof(buf),
                "region reduction (n=15, 10 seeds): median first solution "
                "%.1f ms (on) vs %.1f ms (off); mean final %.2f vs %.2f",
                1000.0 * med_on, 1000.0 * med_off, fm_on, fm_off);
  report(7, complete && med_on < med_off && cost_close, buf);
}

// ---------------------------------------------------------------------------
// 8. Anytime monotonicity plus shortening soundness at volume.

void check_shorten_and_monotonicity() {
  std::mt19937_64 rng(888);
  const CostModel cm{1.0, kTable};
  ExpandParams params;
  params.rho = kRho;
  int cases = 0, unsound = 0;
  for (int trial = 0; cases < 10000 && trial < 2000; ++trial) {
    const Scenario sc = gen_scenario(5, kTable, kR, 80000 + trial);
    const State st = sc.start_state();
    const auto first = successors_multiple(kTable, st, sc.goal, rng, params);
    for (size_t i = 0; i < first.size() && cases < 10000; ++i) {
      const auto second =
          successors_multiple(kTable, first[i].state, sc.goal, rng, params);
      for (size_t j = 0; j < second.size() && cases < 10000; ++j) {
        ++cases;
        const auto out =
            shorten(kTable, first[i].seq, second[j].seq, st, cm, kRho);
        if (!out) continue;
        OperationSequence naive = first[i].seq;
        naive.insert(naive.end(), second[j].seq.begin(), second[j].seq.end());
        const SimResult nsim = simulate(kTable, st, naive, kRho);
        const SimResult ssim = simulate(kTable, st, *out, kRho);
        if (!nsim.ok || !ssim.ok ||
            !is_goal(ssim.state, nsim.state.arrangement, 1e-9) ||
            sequence_cost(*out, st.robot, cm) >
                sequence_cost(naive, st.robot, cm) - 1e-12) {
          ++unsound;
        }
      }
    }
  }
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "shorten soundness: %d/%d junction cases unsound; anytime "
                "series: %zu/%zu non-monotone",
                unsound, cases, g_event_violations, g_event_series);
  report(8, cases == 10000 && unsound == 0 && g_event_violations == 0, buf);
}

// ---------------------------------------------------------------------------
// 9. Tree consistency under randomized expansion/rewrite interleavings.

void check_rewrite_consistency() {
  int bad = 0;
  const CostModel cm{1.0, kTable};
  for (int episode = 0; episode < 500; ++episode) {
    const Scenario sc =
        gen_scenario(4 + episode % 4, kTable, kR, 90000 + episode);
    PlannerConfig cfg;
    cfg.strategy = episode % 2 == 0 ? Strategy::Multiple : Strategy::Single;
    cfg.re_explore_prob = 0.5;
    cfg.seed = episode;
    Planner p(kTable, sc.start_state(), sc.goal, cfg, cm);
    for (int i = 0; i < 100 && p.step(); ++i) {
    }
    std::string why;
    if (!p.audit(&why)) {
      ++bad;
      if (bad == 1) std::printf("     first audit failure: %s\n", why.c_str());
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "rewrite consistency: %d/500 episodes failed the tree audit",
                bad);
  report(9, bad == 0, buf);
}

// ---------------------------------------------------------------------------
// 10. Manipulation-cost ablation preserves the strategy ordering.

void check_mc_ablation() {
  bool all_ok = true;
  std::string detail = "mc ablation (n=5, 10 seeds):";
  for (double mc : {1.0, 3.0, 5.0}) {
    const StrategyStats st =
        run_strategy_pair(5, 10, 5.0, 100000 + 1000 * (int)mc, mc);
    const bool complete =
        st.single_final.size() == 10 && st.multi_final.size() == 10;
    const double ms = complete ? mean(st.single_final) : 0.0;
    const double mm = complete ? mean(st.multi_final) : 0.0;
    const bool ok = complete && mm <= ms;
    all_ok = all_ok && ok;
    char buf[96];
    std::snprintf(buf, sizeof(buf), " mc=%.0f multiple %.2f vs single %.2f%s",
                  mc, mm, ms, ok ? "" : " (!)");
    detail += buf;
  }
  report(10, all_ok, detail);
}

}  // namespace

int main() {
  std::printf("acceptance checks (single-threaded)\n");
  check_validity();
  check_cost_closed_forms();
  check_buffer_oracle();
  check_tiny_optimality();
  check_strategy_trend();
  check_re_exploration_trend();
  check_region_reduction_trend();
  check_shorten_and_monotonicity();
  check_rewrite_consistency();
  check_mc_ablation();
  std::printf("%d/10 passed\n", 10 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
