#include "rearrange/buffers.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <limits>

namespace rearr {

namespace {
constexpr double kEps = 1e-9;

bool footprints_overlap(const Point2& a, const Point2& b, double radius) {
  return dist(a, b) < 2.0 * radius - kEps;
}
}  // namespace

AbstractPlan minimal_running_buffer_plan(const PoseMap& current,
                                         const PoseMap& goal,
                                         const TableSpec& table,
                                         double radius) {
  (void)table;
  std::vector<ObjectId> ids;
  for (const auto& [k, _] : goal) {
    if (current.count(k)) ids.push_back(k);
  }
  const int n = static_cast<int>(ids.size());
  AbstractPlan plan;
  if (n == 0) return plan;
  assert(n <= 20 && "subset DP limited to small instances");

  // need[i]: objects whose current footprint overlaps goal(ids[i]).
  std::vector<uint32_t> need(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (footprints_overlap(goal.at(ids[i]), current.at(ids[j]), radius))
        need[i] |= 1u << j;
    }
  }

  const uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1);
  // uni[S]: union of need masks over placed set S. Buffered set after S is
  // uni[S] & ~S (evictions are lazy and permanent until placement).
  std::vector<uint32_t> uni(full + 1, 0);
  for (uint32_t s = 1; s <= full; ++s) {
    const int low = std::countr_zero(s);
    uni[s] = uni[s & (s - 1)] | need[low];
  }

  auto peak = [&](uint32_t s, int k) {
    const uint32_t s2 = s | (1u << k);
    const uint32_t buffered = (uni[s] | need[k]) & ~s2;
    // k itself occupies a buffer slot during the transition if it was
    // evicted earlier (it is carried by hand only while being placed).
    const int k_buffered = ((uni[s] >> k) & 1u) ? 1 : 0;
    return static_cast<int>(std::popcount(buffered)) + k_buffered;
  };
  auto new_evictions = [&](uint32_t s, int k) {
    return need[k] & ~(1u << k) & ~s & ~uni[s];
  };

  // Phase 1: minimal peak running-buffer count.
  constexpr int kInf = std::numeric_limits<int>::max() / 2;
  std::vector<int> best(full + 1, kInf);
  best[0] = 0;
  for (uint32_t s = 1; s <= full; ++s) {
    for (int k = 0; k < n; ++k) {
      if (!((s >> k) & 1u)) continue;
      const uint32_t prev = s & ~(1u << k);
      if (best[prev] == kInf) continue;
      best[s] = std::min(best[s], std::max(best[prev], peak(prev, k)));
    }
  }
  const int opt_peak = best[full];

  // Phase 2: among peak-optimal plans, minimize the ToBuffer count.
  std::vector<int> tb(full + 1, kInf);
  tb[full] = 0;
  for (uint32_t s = full; s-- > 0;) {
    for (int k = 0; k < n; ++k) {
      if ((s >> k) & 1u) continue;
      if (peak(s, k) > opt_peak) continue;
      const uint32_t s2 = s | (1u << k);
      if (tb[s2] == kInf) continue;
      const int cand =
          static_cast<int>(std::popcount(new_evictions(s, k))) + tb[s2];
      tb[s] = std::min(tb[s], cand);
    }
  }

  // Reconstruct lexicographically.
  uint32_t s = 0;
  while (s != full) {
    for (int k = 0; k < n; ++k) {
      if ((s >> k) & 1u) continue;
      if (peak(s, k) > opt_peak) continue;
      const uint32_t s2 = s | (1u << k);
      if (tb[s2] == kInf) continue;
      const int add = static_cast<int>(std::popcount(new_evictions(s, k)));
      if (add + tb[s2] != tb[s]) continue;
      for (uint32_t ev = new_evictions(s, k); ev; ev &= ev - 1) {
        plan.actions.push_back(
            {ids[std::countr_zero(ev)], AbstractTarget::ToBuffer});
      }
      plan.actions.push_back({ids[k], AbstractTarget::ToGoal});
      s = s2;
      break;
    }
  }
  plan.max_running = opt_peak;
  return plan;
}

AbstractPlan insert_explicit_evictions(const AbstractPlan& plan,
                                       const PoseMap& implicit_goals,
                                       const PoseMap& explicit_poses,
                                       double radius) {
  AbstractPlan out;
  out.max_running = plan.max_running;
  std::vector<ObjectId> evicted;
  for (const AbstractAction& a : plan.actions) {
    if (a.target == AbstractTarget::ToGoal && implicit_goals.count(a.object)) {
      const Point2& g = implicit_goals.at(a.object);
      for (const auto& [e, pose] : explicit_poses) {
        if (std::find(evicted.begin(), evicted.end(), e) != evicted.end())
          continue;
        if (footprints_overlap(pose, g, radius)) {
          out.actions.push_back({e, AbstractTarget::ToBuffer});
          evicted.push_back(e);
        }
      }
    }
    out.actions.push_back(a);
  }
  return out;
}

AllocationResult allocate_buffers(const AbstractPlan& plan,
                                  const TableSpec& table,
                                  const Arrangement& start, const PoseMap& goal,
                                  std::optional<ReachConstraint> reach,
                                  std::mt19937_64& rng) {
  AllocationResult res;
  std::vector<Point2> cur = start.poses;
  const double r = start.radius;

  std::vector<ObjectId> pending;
  for (const AbstractAction& a : plan.actions) {
    if (a.target == AbstractTarget::ToGoal) pending.push_back(a.object);
  }

  for (size_t i = 0; i < plan.actions.size(); ++i) {
    const AbstractAction& a = plan.actions[i];
    const ObjectId k = a.object;
    if (a.target == AbstractTarget::ToGoal) {
      const Point2 g = goal.at(k);
      const int ignore[] = {k};
      if (!pose_valid(table, cur, g, r, ignore)) {
        res.failed_index = i;
        return res;
      }
      res.triples.push_back({k, cur[k], g});
      cur[k] = g;
      pending.erase(std::find(pending.begin(), pending.end(), k));
    } else {
      std::vector<Point2> others;
      for (size_t j = 0; j < cur.size(); ++j) {
        if (static_cast<ObjectId>(j) != k) others.push_back(cur[j]);
      }
      std::vector<Point2> forbidden;
      for (ObjectId p : pending) {
        if (goal.count(p)) forbidden.push_back(goal.at(p));
      }
      auto b = sample_free_pose(table, others, r, forbidden, reach, &rng);
      if (!b) {
        res.failed_index = i;
        return res;
      }
      res.triples.push_back({k, cur[k], *b});
      cur[k] = *b;
    }
  }
  res.ok = true;
  return res;
}

std::optional<std::vector<RearrTriple>> trlb_local_solve(
    const TableSpec& table, const Arrangement& start, const Arrangement& goal,
    std::mt19937_64& rng, int retries, double tol) {
  PoseMap cur, tgt;
  for (ObjectId k : misplaced_objects(start, goal, tol)) {
    cur[k] = start.poses[k];
    tgt[k] = goal.poses[k];
  }
  if (cur.empty()) return std::vector<RearrTriple>{};
  const AbstractPlan plan =
      minimal_running_buffer_plan(cur, tgt, table, start.radius);
  for (int attempt = 0; attempt < retries; ++attempt) {
    AllocationResult res =
        allocate_buffers(plan, table, start, tgt, std::nullopt, rng);
    if (res.ok) return res.triples;
  }
  return std::nullopt;
}

}  // namespace rearr
