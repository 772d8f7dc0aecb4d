#include "rearrange/expand.hpp"

#include <algorithm>
#include <cassert>

namespace rearr {

namespace {
constexpr double kEps = 1e-9;

bool same_standing(const TableSpec& table, PerimeterCoord a, PerimeterCoord b) {
  return travel_cost(table, a, b) <= kEps;
}

bool within_reach(const TableSpec& table, PerimeterCoord s, const Point2& p,
                  double rho) {
  return dist(coord_to_point(table, s), p) <= rho + kEps;
}
}  // namespace

bool ObjectOpDict::proper_subset_of(const ObjectOpDict& other) const {
  bool proper = false;
  for (const auto& [k, ops] : entries) {
    auto it = other.entries.find(k);
    if (it == other.entries.end() || (ops & ~it->second) != 0) return false;
    if (ops != it->second) proper = true;
  }
  return proper || pair_count() < other.pair_count();
}

int ObjectOpDict::pair_count() const {
  int n = 0;
  for (const auto& [k, ops] : entries) {
    n += (ops & kCanPick ? 1 : 0) + (ops & kCanPlace ? 1 : 0);
  }
  return n;
}

std::map<ObjectId, std::vector<PerimeterInterval>> picking_regions(
    const TableSpec& table, const State& state, const Arrangement& goal,
    double rho, double tol) {
  std::map<ObjectId, std::vector<PerimeterInterval>> out;
  for (ObjectId k : misplaced_objects(state.arrangement, goal, tol)) {
    auto ivs = reach_intervals(table, state.arrangement.poses[k], rho);
    if (!ivs.empty()) out[k] = std::move(ivs);
  }
  return out;
}

std::map<ObjectId, std::vector<PerimeterInterval>> placing_regions(
    const TableSpec& table, const State& state, const Arrangement& goal,
    double rho, double tol) {
  std::map<ObjectId, std::vector<PerimeterInterval>> out;
  for (ObjectId k : misplaced_objects(state.arrangement, goal, tol)) {
    auto ivs = reach_intervals(table, goal.poses[k], rho);
    if (!ivs.empty()) out[k] = std::move(ivs);
  }
  return out;
}

std::vector<ManipRegion> manipulation_regions(const TableSpec& table,
                                              const State& state,
                                              const Arrangement& goal,
                                              double rho, double tol) {
  struct Labeled {
    PerimeterInterval iv;
    ObjectId object;
    unsigned op;
  };
  std::vector<Labeled> labeled;
  for (const auto& [k, ivs] : picking_regions(table, state, goal, rho, tol)) {
    for (const auto& iv : ivs) labeled.push_back({iv, k, kCanPick});
  }
  for (const auto& [k, ivs] : placing_regions(table, state, goal, rho, tol)) {
    for (const auto& iv : ivs) labeled.push_back({iv, k, kCanPlace});
  }
  if (labeled.empty()) return {};

  const double per = perimeter_length(table);
  std::vector<double> cuts;
  for (const Labeled& l : labeled) {
    cuts.push_back(wrap_coord(table, l.iv.start));
    cuts.push_back(wrap_coord(table, l.iv.start + l.iv.length));
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return b - a <= kEps; }),
             cuts.end());
  if (cuts.size() > 1 && (cuts.back() - cuts.front()) >= per - kEps)
    cuts.pop_back();

  // Disjoint cells between consecutive cut points, each labeled with the
  // (object, op) pairs whose interval covers its midpoint.
  std::vector<ManipRegion> cells;
  for (size_t i = 0; i < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = (i + 1 < cuts.size()) ? cuts[i + 1] : cuts[0] + per;
    const double len = hi - lo;
    if (len <= kEps) continue;
    const double mid = wrap_coord(table, lo + 0.5 * len);
    ObjectOpDict dict;
    for (const Labeled& l : labeled) {
      if (interval_contains(table, l.iv, mid)) dict.entries[l.object] |= l.op;
    }
    // place-only objects are not manipulable here
    for (auto it = dict.entries.begin(); it != dict.entries.end();) {
      if (!(it->second & kCanPick))
        it = dict.entries.erase(it);
      else
        ++it;
    }
    if (dict.entries.empty()) continue;
    cells.push_back({{wrap_coord(table, lo), len}, std::move(dict)});
  }
  if (cells.empty()) return {};

  // Merge adjacent equal-dict cells, including across the wrap point.
  std::vector<ManipRegion> merged;
  for (ManipRegion& c : cells) {
    if (!merged.empty() && merged.back().dict == c.dict &&
        same_standing(table, merged.back().interval.start +
                                 merged.back().interval.length,
                      c.interval.start)) {
      merged.back().interval.length += c.interval.length;
    } else {
      merged.push_back(std::move(c));
    }
  }
  if (merged.size() > 1 && merged.front().dict == merged.back().dict &&
      same_standing(table,
                    merged.back().interval.start + merged.back().interval.length,
                    merged.front().interval.start)) {
    merged.back().interval.length += merged.front().interval.length;
    merged.erase(merged.begin());
  }
  for (ManipRegion& r : merged) {
    if (r.interval.length >= per - kEps) r.interval.length = per;
    r.interval.start = wrap_coord(table, r.interval.start);
  }
  return merged;
}

std::vector<ManipRegion> reduce_regions(std::vector<ManipRegion> regions) {
  std::stable_sort(regions.begin(), regions.end(),
                   [](const ManipRegion& a, const ManipRegion& b) {
                     const int pa = a.dict.pair_count(), pb = b.dict.pair_count();
                     if (pa != pb) return pa > pb;
                     return a.interval.start < b.interval.start;
                   });
  std::vector<ManipRegion> kept;
  for (ManipRegion& r : regions) {
    bool dominated = false;
    for (const ManipRegion& s : kept) {
      if (r.dict.proper_subset_of(s.dict)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) kept.push_back(std::move(r));
  }
  return kept;
}

std::vector<StandingCandidate> efficient_standing_locations(
    const TableSpec& table, const State& state,
    const std::vector<ManipRegion>& regions) {
  const double per = perimeter_length(table);
  std::vector<StandingCandidate> out;
  for (size_t i = 0; i < regions.size(); ++i) {
    const PerimeterInterval& iv = regions[i].interval;
    const bool full = iv.length >= per - kEps;
    if (interval_contains(table, iv, state.robot)) {
      out.push_back({state.robot, i});
      if (full) continue;
    }
    const double e1 = wrap_coord(table, iv.start);
    const double e2 = wrap_coord(table, iv.start + iv.length);
    if (travel_cost(table, e1, e2) <= kEps) {
      if (!interval_contains(table, iv, state.robot)) out.push_back({e1, i});
      continue;
    }
    // An endpoint whose shortest path from the robot crosses the sibling
    // endpoint is never worth standing at.
    if (!path_passes_through(table, state.robot, e1, e2) ||
        travel_cost(table, state.robot, e2) <= kEps)
      out.push_back({e1, i});
    if (!path_passes_through(table, state.robot, e2, e1) ||
        travel_cost(table, state.robot, e1) <= kEps)
      out.push_back({e2, i});
  }
  return out;
}

ImplicitSplit classify_and_verify(const TableSpec& table, const State& state,
                                  const Arrangement& goal,
                                  const ObjectOpDict& dict,
                                  PerimeterCoord location, double rho,
                                  std::mt19937_64& rng, double tol) {
  const double radius = state.arrangement.radius;
  std::vector<ObjectId> potential, explicit_set;
  for (const auto& [k, ops] : dict.entries) {
    if ((ops & kCanPick) && (ops & kCanPlace))
      potential.push_back(k);
    else if (ops & kCanPick)
      explicit_set.push_back(k);
  }

  const ReachConstraint reach{location, rho};
  while (!potential.empty()) {
    PoseMap cur, tgt;
    for (ObjectId k : potential) {
      cur[k] = state.arrangement.poses[k];
      tgt[k] = goal.poses[k];
    }
    AbstractPlan plan = minimal_running_buffer_plan(cur, tgt, table, radius);
    PoseMap expl;
    for (ObjectId k : explicit_set) expl[k] = state.arrangement.poses[k];
    plan = insert_explicit_evictions(plan, tgt, expl, radius);

    AllocationResult alloc =
        allocate_buffers(plan, table, state.arrangement, tgt, reach, rng);
    if (alloc.ok) {
      ImplicitSplit split;
      split.implicit = potential;
      split.explicit_set = explicit_set;
      for (const RearrTriple& t : alloc.triples) {
        split.implicit_seq.push_back(
            {OpType::Pick, t.object, t.pick_pose, location});
        split.implicit_seq.push_back(
            {OpType::Place, t.object, t.place_pose, location});
      }
      std::sort(split.explicit_set.begin(), split.explicit_set.end());
      return split;
    }

    // Reclassify the implicit object behind the first failing action; when
    // an inserted eviction fails, the blocked ToGoal right after it is the
    // cause.
    ObjectId culprit = plan.actions[alloc.failed_index].object;
    auto is_potential = [&](ObjectId k) {
      return std::find(potential.begin(), potential.end(), k) !=
             potential.end();
    };
    if (!is_potential(culprit)) {
      culprit = -1;
      for (size_t i = alloc.failed_index; i < plan.actions.size(); ++i) {
        if (plan.actions[i].target == AbstractTarget::ToGoal &&
            is_potential(plan.actions[i].object)) {
          culprit = plan.actions[i].object;
          break;
        }
      }
      if (culprit < 0) culprit = potential.front();
    }
    potential.erase(std::find(potential.begin(), potential.end(), culprit));
    explicit_set.push_back(culprit);
  }

  ImplicitSplit split;
  split.explicit_set = explicit_set;
  std::sort(split.explicit_set.begin(), split.explicit_set.end());
  return split;
}

std::vector<Successor> successors_single(const TableSpec& table,
                                         const State& state,
                                         const Arrangement& goal,
                                         std::mt19937_64& rng,
                                         int buffer_samples, double rho,
                                         double tol) {
  std::vector<Successor> out;
  const double radius = state.arrangement.radius;
  for (ObjectId k : misplaced_objects(state.arrangement, goal, tol)) {
    const Point2 cur = state.arrangement.poses[k];
    const PerimeterCoord l_pick = nearest_perimeter_coord(table, cur);
    if (!within_reach(table, l_pick, cur, rho)) continue;

    std::vector<Point2> targets;
    const int ignore[] = {k};
    if (pose_valid(table, state.arrangement.poses, goal.poses[k], radius,
                   ignore)) {
      targets.push_back(goal.poses[k]);
    } else {
      std::vector<Point2> others;
      for (int j = 0; j < state.arrangement.size(); ++j) {
        if (j != k) others.push_back(state.arrangement.poses[j]);
      }
      for (int i = 0; i < buffer_samples; ++i) {
        if (auto b = sample_free_pose(table, others, radius, {}, std::nullopt,
                                      &rng)) {
          targets.push_back(*b);
        }
      }
    }
    for (const Point2& tgt : targets) {
      const PerimeterCoord l_place = nearest_perimeter_coord(table, tgt);
      if (!within_reach(table, l_place, tgt, rho)) continue;
      OperationSequence seq{{OpType::Pick, k, cur, l_pick},
                            {OpType::Place, k, tgt, l_place}};
      SimResult sim = simulate(table, state, seq, rho, tol);
      if (!sim.ok) continue;
      if (dist(sim.state.arrangement.poses[k], cur) <= tol) continue;
      out.push_back({std::move(seq), std::move(sim.state)});
    }
  }
  return out;
}

namespace {

// Placing standing points for a pose held in hand: the current location if
// it already reaches, otherwise interval endpoints whose shortest path from
// the current location does not cross the sibling endpoint.
std::vector<PerimeterCoord> placing_points(const TableSpec& table,
                                           PerimeterCoord from,
                                           const Point2& pose, double rho) {
  std::vector<PerimeterCoord> out;
  const double per = perimeter_length(table);
  for (const PerimeterInterval& iv : reach_intervals(table, pose, rho)) {
    if (interval_contains(table, iv, from)) return {from};
    if (iv.length >= per - kEps) return {from};
    const double e1 = wrap_coord(table, iv.start);
    const double e2 = wrap_coord(table, iv.start + iv.length);
    if (travel_cost(table, e1, e2) <= kEps) {
      out.push_back(e1);
      continue;
    }
    if (!path_passes_through(table, from, e1, e2)) out.push_back(e1);
    if (!path_passes_through(table, from, e2, e1)) out.push_back(e2);
  }
  return out;
}

}  // namespace

std::vector<Successor> successors_multiple(const TableSpec& table,
                                           const State& state,
                                           const Arrangement& goal,
                                           std::mt19937_64& rng,
                                           const ExpandParams& params) {
  const double rho = params.rho;
  const double radius = state.arrangement.radius;
  std::vector<ManipRegion> regions =
      manipulation_regions(table, state, goal, rho, params.tol);
  if (params.region_reduction) regions = reduce_regions(std::move(regions));
  const std::vector<StandingCandidate> cands =
      efficient_standing_locations(table, state, regions);

  std::vector<Successor> out;
  auto emit = [&](OperationSequence seq) {
    SimResult sim = simulate(table, state, seq, rho, params.tol);
    if (!sim.ok) return;
    if (misplaced_count(sim.state, state.arrangement, params.tol) == 0 &&
        travel_cost(table, sim.state.robot, state.robot) <= kEps)
      return;  // no progress
    out.push_back({std::move(seq), std::move(sim.state)});
  };

  for (const StandingCandidate& cand : cands) {
    const ImplicitSplit split =
        classify_and_verify(table, state, goal, regions[cand.region].dict,
                            cand.location, rho, rng, params.tol);

    State after = state;
    if (!split.implicit_seq.empty()) {
      SimResult sim = simulate(table, state, split.implicit_seq, rho,
                               params.tol);
      if (!sim.ok) continue;
      after = sim.state;
      emit(split.implicit_seq);  // the "no explicit object" branch
    }

    for (ObjectId k : split.explicit_set) {
      const Point2 cur = after.arrangement.poses[k];
      if (!within_reach(table, cand.location, cur, rho)) continue;

      std::vector<Point2> targets;
      const int ignore[] = {k};
      if (pose_valid(table, after.arrangement.poses, goal.poses[k], radius,
                     ignore)) {
        targets.push_back(goal.poses[k]);
      } else {
        std::vector<Point2> others;
        for (int j = 0; j < after.arrangement.size(); ++j) {
          if (j != k) others.push_back(after.arrangement.poses[j]);
        }
        for (int i = 0; i < params.buffer_samples; ++i) {
          if (auto b = sample_free_pose(table, others, radius, {},
                                        std::nullopt, &rng)) {
            targets.push_back(*b);
          }
        }
      }
      for (const Point2& tgt : targets) {
        for (PerimeterCoord lp :
             placing_points(table, cand.location, tgt, rho)) {
          OperationSequence seq = split.implicit_seq;
          seq.push_back({OpType::Pick, k, cur, cand.location});
          seq.push_back({OpType::Place, k, tgt, lp});
          emit(std::move(seq));
        }
      }
    }
  }
  return out;
}

namespace {

bool is_paired(const OperationSequence& seq) {
  if (seq.size() % 2 != 0) return false;
  for (size_t i = 0; i < seq.size(); i += 2) {
    if (seq[i].type != OpType::Pick || seq[i + 1].type != OpType::Place ||
        seq[i].object != seq[i + 1].object)
      return false;
  }
  return true;
}

// Index of the pick of the last pick-place pair on k whose both operations
// stand at the last operation's location; -1 if none.
int last_pair_on(const TableSpec& table, const OperationSequence& seq,
                 ObjectId k) {
  if (seq.empty()) return -1;
  const PerimeterCoord loc = seq.back().standing;
  for (int i = static_cast<int>(seq.size()) - 2; i >= 0; i -= 2) {
    if (!same_standing(table, seq[i].standing, loc) ||
        !same_standing(table, seq[i + 1].standing, loc))
      return -1;
    if (seq[i].object == k) return i;
  }
  return -1;
}

int first_pair_on(const TableSpec& table, const OperationSequence& seq,
                  ObjectId k) {
  if (seq.empty()) return -1;
  const PerimeterCoord loc = seq.front().standing;
  for (size_t i = 0; i + 1 < seq.size(); i += 2) {
    if (!same_standing(table, seq[i].standing, loc) ||
        !same_standing(table, seq[i + 1].standing, loc))
      return -1;
    if (seq[i].object == k) return static_cast<int>(i);
  }
  return -1;
}

OperationSequence move_pair_to_back(OperationSequence seq, int i) {
  const Operation a = seq[i], b = seq[i + 1];
  seq.erase(seq.begin() + i, seq.begin() + i + 2);
  seq.push_back(a);
  seq.push_back(b);
  return seq;
}

OperationSequence move_pair_to_front(OperationSequence seq, int i) {
  const Operation a = seq[i], b = seq[i + 1];
  seq.erase(seq.begin() + i, seq.begin() + i + 2);
  seq.insert(seq.begin(), {a, b});
  return seq;
}

}  // namespace

std::optional<OperationSequence> shorten(const TableSpec& table,
                                         const OperationSequence& a,
                                         const OperationSequence& b,
                                         const State& parent_state,
                                         const CostModel& cm, double rho,
                                         double tol) {
  if (a.size() < 2 || b.size() < 2) return std::nullopt;
  if (!is_paired(a) || !is_paired(b)) return std::nullopt;

  const SimResult sim_a = simulate(table, parent_state, a, rho, tol);
  if (!sim_a.ok) return std::nullopt;
  const State& current = sim_a.state;

  OperationSequence naive = a;
  naive.insert(naive.end(), b.begin(), b.end());
  const SimResult sim_naive = simulate(table, parent_state, naive, rho, tol);
  if (!sim_naive.ok) return std::nullopt;
  const double naive_cost = sequence_cost(naive, parent_state.robot, cm);

  auto validate = [&](const OperationSequence& cand)
      -> std::optional<OperationSequence> {
    const SimResult sim = simulate(table, parent_state, cand, rho, tol);
    if (!sim.ok) return std::nullopt;
    if (travel_cost(table, sim.state.robot, sim_naive.state.robot) > kEps)
      return std::nullopt;
    for (int i = 0; i < sim.state.arrangement.size(); ++i) {
      if (dist(sim.state.arrangement.poses[i],
               sim_naive.state.arrangement.poses[i]) > tol)
        return std::nullopt;
    }
    if (sequence_cost(cand, parent_state.robot, cm) >= naive_cost - 1e-12)
      return std::nullopt;
    return cand;
  };

  const Operation& op1 = a[a.size() - 2];
  const Operation& op2 = a.back();
  const Operation& op3 = b[0];
  const Operation& op4 = b[1];
  const bool a_moves = !same_standing(table, op1.standing, op2.standing);
  const bool b_moves = !same_standing(table, op3.standing, op4.standing);

  auto cancel_at_junction = [&](const OperationSequence& left,
                                const OperationSequence& right)
      -> std::optional<OperationSequence> {
    if (left.back().object != right.front().object) return std::nullopt;
    OperationSequence cand(left.begin(), left.end() - 1);
    cand.insert(cand.end(), right.begin() + 1, right.end());
    return validate(cand);
  };

  if (a_moves && b_moves) {
    if (op1.object == op3.object) {
      if (auto r = cancel_at_junction(a, b)) return r;
    }
  } else if (a_moves && !b_moves) {
    const int i = first_pair_on(table, b, op2.object);
    if (i > 0) {
      OperationSequence b2 = move_pair_to_front(b, i);
      if (simulate(table, current, b2, rho, tol).ok) {
        if (auto r = cancel_at_junction(a, b2)) return r;
      }
    } else if (i == 0) {
      if (auto r = cancel_at_junction(a, b)) return r;
    }
  } else if (!a_moves && b_moves) {
    const int i = last_pair_on(table, a, op3.object);
    if (i >= 0 && i + 2 < static_cast<int>(a.size())) {
      OperationSequence a2 = move_pair_to_back(a, i);
      if (simulate(table, parent_state, a2, rho, tol).ok) {
        if (auto r = cancel_at_junction(a2, b)) return r;
      }
    } else if (i >= 0) {
      if (auto r = cancel_at_junction(a, b)) return r;
    }
  } else {
    // both junction blocks are single-location: try every common object
    std::vector<ObjectId> common;
    for (size_t i = 0; i + 1 < a.size(); i += 2) {
      if (!same_standing(table, a[i].standing, op2.standing)) continue;
      if (first_pair_on(table, b, a[i].object) >= 0)
        common.push_back(a[i].object);
    }
    std::sort(common.begin(), common.end());
    common.erase(std::unique(common.begin(), common.end()), common.end());
    for (ObjectId k : common) {
      const int ia = last_pair_on(table, a, k);
      const int ib = first_pair_on(table, b, k);
      if (ia < 0 || ib < 0) continue;
      OperationSequence a2 =
          (ia + 2 < static_cast<int>(a.size())) ? move_pair_to_back(a, ia) : a;
      OperationSequence b2 = (ib > 0) ? move_pair_to_front(b, ib) : b;
      const SimResult sa = simulate(table, parent_state, a2, rho, tol);
      if (!sa.ok) continue;
      if (!simulate(table, sa.state, b2, rho, tol).ok) continue;
      if (auto r = cancel_at_junction(a2, b2)) return r;
    }
  }

  // Operation merging: re-home one junction block to the other's location.
  size_t a_tail = a.size();
  while (a_tail > 0 &&
         same_standing(table, a[a_tail - 1].standing, a.back().standing))
    --a_tail;
  size_t b_head = 0;
  while (b_head < b.size() &&
         same_standing(table, b[b_head].standing, b.front().standing))
    ++b_head;
  const PerimeterCoord la = a.back().standing;
  const PerimeterCoord lb = b.front().standing;
  const Point2 pa = coord_to_point(table, la);
  const Point2 pb = coord_to_point(table, lb);

  bool b_reachable_from_la = true;
  for (size_t i = 0; i < b_head; ++i) {
    if (dist(pa, b[i].pose) > rho + kEps) b_reachable_from_la = false;
  }
  if (b_reachable_from_la) {
    OperationSequence cand = a;
    for (size_t i = 0; i < b.size(); ++i) {
      Operation op = b[i];
      if (i < b_head) op.standing = la;
      cand.push_back(op);
    }
    if (auto r = validate(cand)) return r;
  }

  bool a_reachable_from_lb = true;
  for (size_t i = a_tail; i < a.size(); ++i) {
    if (dist(pb, a[i].pose) > rho + kEps) a_reachable_from_lb = false;
  }
  if (a_reachable_from_lb) {
    OperationSequence cand(a.begin(), a.begin() + a_tail);
    for (size_t i = a_tail; i < a.size(); ++i) {
      Operation op = a[i];
      op.standing = lb;
      cand.push_back(op);
    }
    cand.insert(cand.end(), b.begin(), b.end());
    if (auto r = validate(cand)) return r;
  }

  return std::nullopt;
}

}  // namespace rearr
