#include "rearrange/search.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace rearr {

namespace {
constexpr double kEps = 1e-9;
}

double heuristic(const State& state, const Arrangement& goal,
                 const CostModel& cm, double tol) {
  // Each misplaced object needs at least one pick and one place; travel is
  // lower-bounded by zero.
  return 2.0 * cm.mc * misplaced_count(state, goal, tol);
}

namespace {

std::optional<OperationSequence> goal_attempt_single(
    const TableSpec& table, const State& state,
    const std::vector<RearrTriple>& triples, double rho, double tol) {
  OperationSequence seq;
  for (const RearrTriple& t : triples) {
    const PerimeterCoord lp = nearest_perimeter_coord(table, t.pick_pose);
    const PerimeterCoord lq = nearest_perimeter_coord(table, t.place_pose);
    seq.push_back({OpType::Pick, t.object, t.pick_pose, lp});
    seq.push_back({OpType::Place, t.object, t.place_pose, lq});
  }
  if (!simulate(table, state, seq, rho, tol).ok) return std::nullopt;
  return seq;
}

std::optional<OperationSequence> goal_attempt_multiple(
    const TableSpec& table, const State& state,
    const std::vector<RearrTriple>& triples, double rho, double tol) {
  State cur = state;
  std::vector<RearrTriple> rem = triples;
  OperationSequence seq;
  size_t guard = 4 * triples.size() + 4;

  while (!rem.empty() && guard-- > 0) {
    // Maximal prefix whose placements stay collision-free in order.
    size_t prefix = 0;
    {
      std::vector<Point2> poses = cur.arrangement.poses;
      const double r = cur.arrangement.radius;
      for (; prefix < rem.size(); ++prefix) {
        const RearrTriple& t = rem[prefix];
        const int ignore[] = {t.object};
        if (!pose_valid(table, poses, t.place_pose, r, ignore)) break;
        poses[t.object] = t.place_pose;
      }
    }
    if (prefix == 0) {
      // Blocked plan head; fall back to one nearest-point relocation.
      const RearrTriple& t = rem.front();
      seq.push_back({OpType::Pick, t.object, t.pick_pose,
                     nearest_perimeter_coord(table, t.pick_pose)});
      const PerimeterCoord lq = nearest_perimeter_coord(table, t.place_pose);
      seq.push_back({OpType::Place, t.object, t.place_pose, lq});
      cur.arrangement.poses[t.object] = t.place_pose;
      cur.robot = lq;
      rem.erase(rem.begin());
      continue;
    }

    // Candidate standing points: reach-interval endpoints of every prefix
    // pick/place pose, plus the current robot location.
    std::vector<PerimeterCoord> cands{cur.robot};
    for (size_t i = 0; i < prefix; ++i) {
      for (const Point2* p : {&rem[i].pick_pose, &rem[i].place_pose}) {
        for (const PerimeterInterval& iv : reach_intervals(table, *p, rho)) {
          cands.push_back(wrap_coord(table, iv.start));
          cands.push_back(wrap_coord(table, iv.start + iv.length));
        }
      }
    }

    auto reach = [&](PerimeterCoord l, const Point2& p) {
      return dist(coord_to_point(table, l), p) <= rho + kEps;
    };
    // Operations executable as an in-order run from l, a trailing lone pick
    // allowed.
    auto count_ops = [&](PerimeterCoord l) {
      int ops = 0;
      for (size_t i = 0; i < prefix; ++i) {
        if (!reach(l, rem[i].pick_pose)) break;
        ++ops;
        if (!reach(l, rem[i].place_pose)) break;
        ++ops;
      }
      return ops;
    };

    int best_ops = 0;
    double best_travel = 0.0;
    PerimeterCoord best_l = cur.robot;
    bool have = false;
    for (PerimeterCoord l : cands) {
      const int ops = count_ops(l);
      if (ops == 0) continue;
      const double travel = travel_cost(table, cur.robot, l);
      if (!have || ops > best_ops ||
          (ops == best_ops && travel < best_travel - kEps) ||
          (ops == best_ops && std::fabs(travel - best_travel) <= kEps &&
           l < best_l)) {
        best_ops = ops;
        best_travel = travel;
        best_l = l;
        have = true;
      }
    }
    if (!have) {
      const RearrTriple& t = rem.front();
      seq.push_back({OpType::Pick, t.object, t.pick_pose,
                     nearest_perimeter_coord(table, t.pick_pose)});
      const PerimeterCoord lq = nearest_perimeter_coord(table, t.place_pose);
      seq.push_back({OpType::Place, t.object, t.place_pose, lq});
      cur.arrangement.poses[t.object] = t.place_pose;
      cur.robot = lq;
      rem.erase(rem.begin());
      continue;
    }

    const size_t full = best_ops / 2;
    for (size_t i = 0; i < full; ++i) {
      const RearrTriple& t = rem[i];
      seq.push_back({OpType::Pick, t.object, t.pick_pose, best_l});
      seq.push_back({OpType::Place, t.object, t.place_pose, best_l});
      cur.arrangement.poses[t.object] = t.place_pose;
    }
    cur.robot = best_l;
    if (best_ops % 2 == 1) {
      // Trailing pick: carry the object to the nearest placing point.
      const RearrTriple& t = rem[full];
      seq.push_back({OpType::Pick, t.object, t.pick_pose, best_l});
      const PerimeterCoord lq = nearest_perimeter_coord(table, t.place_pose);
      seq.push_back({OpType::Place, t.object, t.place_pose, lq});
      cur.arrangement.poses[t.object] = t.place_pose;
      cur.robot = lq;
      rem.erase(rem.begin(), rem.begin() + full + 1);
    } else {
      rem.erase(rem.begin(), rem.begin() + full);
    }
  }
  if (!rem.empty()) return std::nullopt;
  if (!simulate(table, state, seq, rho, tol).ok) return std::nullopt;
  return seq;
}

}  // namespace

std::optional<OperationSequence> goal_attempt(const TableSpec& table,
                                              const State& state,
                                              const Arrangement& goal,
                                              Strategy strategy, double rho,
                                              std::mt19937_64& rng,
                                              double tol) {
  auto triples = trlb_local_solve(table, state.arrangement, goal, rng, 10, tol);
  if (!triples) return std::nullopt;
  if (triples->empty()) return OperationSequence{};
  if (strategy == Strategy::Single)
    return goal_attempt_single(table, state, *triples, rho, tol);
  return goal_attempt_multiple(table, state, *triples, rho, tol);
}

Planner::Planner(const TableSpec& table, const State& start,
                 const Arrangement& goal, const PlannerConfig& config,
                 const CostModel& cm)
    : table_(table), goal_(goal), cfg_(config), cm_(cm) {
  rho_ = cfg_.rho > 0 ? cfg_.rho : default_reach(table);
  buffer_samples_ = cfg_.buffer_samples > 0
                        ? cfg_.buffer_samples
                        : (cfg_.strategy == Strategy::Single ? 3 : 1);
  rng_.seed(cfg_.seed);
  t0_ = std::chrono::steady_clock::now();

  for (size_t i = 0; i < goal.poses.size(); ++i) {
    if (dist(start.arrangement.poses[i], goal.poses[i]) <= cfg_.tol)
      throw std::invalid_argument(
          "object " + std::to_string(i) + " already at its goal pose");
  }
  new_node(start, -1, {}, 0.0);
  push_open(0);
}

std::string Planner::state_key(const State& s) const {
  std::string key;
  key.reserve(16 * (s.arrangement.poses.size() + 1));
  auto put = [&](double v) {
    const int64_t q = static_cast<int64_t>(std::llround(v / cfg_.quantum));
    key.append(reinterpret_cast<const char*>(&q), sizeof(q));
  };
  if (!cfg_.arrangement_only_keys) put(s.robot);
  for (const Point2& p : s.arrangement.poses) {
    put(p.x);
    put(p.y);
  }
  return key;
}

bool Planner::states_equal(const State& a, const State& b) const {
  if (!cfg_.arrangement_only_keys &&
      travel_cost(table_, a.robot, b.robot) > cfg_.tol)
    return false;
  for (size_t i = 0; i < a.arrangement.poses.size(); ++i) {
    if (dist(a.arrangement.poses[i], b.arrangement.poses[i]) > cfg_.tol)
      return false;
  }
  return true;
}

void Planner::push_open(int id) {
  const SearchNode& n = nodes_[id];
  open_.push({n.g + n.h, n.h, order_counter_++, id, n.g});
}

int Planner::pop_open() {
  while (!open_.empty()) {
    const OpenEntry e = open_.top();
    open_.pop();
    const SearchNode& n = nodes_[e.node];
    if (n.discarded || n.expanded) continue;
    if (std::fabs(n.g - e.g_snapshot) > 1e-12) continue;  // stale priority
    return e.node;
  }
  return -1;
}

int Planner::new_node(State state, int parent, OperationSequence edge,
                      double g) {
  SearchNode n;
  n.state = std::move(state);
  n.g = g;
  n.h = heuristic(n.state, goal_, cm_, cfg_.tol);
  n.parent = parent;
  n.edge = std::move(edge);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

double Planner::elapsed() const {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_)
      .count();
}

OperationSequence Planner::path_sequence(int id) const {
  std::vector<int> chain;
  for (int i = id; i >= 0; i = nodes_[i].parent) chain.push_back(i);
  OperationSequence seq;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    seq.insert(seq.end(), nodes_[*it].edge.begin(), nodes_[*it].edge.end());
  }
  return seq;
}

void Planner::note_goal_node(int id) {
  goal_nodes_.push_back(id);
  if (nodes_[id].g < best_cost_ - 1e-12) {
    best_cost_ = nodes_[id].g;
    best_seq_ = path_sequence(id);
    events_.push_back({elapsed(), best_cost_});
  }
}

void Planner::refresh_best_from_goal_nodes() {
  for (int id : goal_nodes_) {
    if (!nodes_[id].discarded && nodes_[id].g < best_cost_ - 1e-12) {
      best_cost_ = nodes_[id].g;
      best_seq_ = path_sequence(id);
      events_.push_back({elapsed(), best_cost_});
    }
  }
}

void Planner::try_goal_attempt(int id) {
  const SearchNode& n = nodes_[id];
  auto seq = goal_attempt(table_, n.state, goal_, cfg_.strategy, rho_, rng_,
                          cfg_.tol);
  if (!seq) return;
  const double total =
      n.g + sequence_cost(*seq, n.state.robot, cm_);
  if (total >= best_cost_ - 1e-12) return;
  OperationSequence full = path_sequence(id);
  full.insert(full.end(), seq->begin(), seq->end());
  // paranoia: only accept completions that actually reach the goal
  const SimResult sim =
      simulate(table_, nodes_[0].state, full, rho_, cfg_.tol);
  if (!sim.ok || !is_goal(sim.state, goal_, cfg_.tol)) return;
  best_cost_ = total;
  best_seq_ = std::move(full);
  events_.push_back({elapsed(), best_cost_});
}

void Planner::update_subtree(int id) {
  const SearchNode& parent = nodes_[nodes_[id].parent];
  nodes_[id].g =
      parent.g + sequence_cost(nodes_[id].edge, parent.state.robot, cm_);
  if (!nodes_[id].expanded && !nodes_[id].discarded) push_open(id);
  for (int c : nodes_[id].children) update_subtree(c);
}

void Planner::rewrite(int new_parent, int explored,
                      const OperationSequence& edge) {
  SearchNode& m = nodes_[explored];
  if (m.parent >= 0) {
    auto& sib = nodes_[m.parent].children;
    sib.erase(std::find(sib.begin(), sib.end(), explored));
  }
  m.parent = new_parent;
  m.edge = edge;
  nodes_[new_parent].children.push_back(explored);
  update_subtree(explored);

  // Reconnect children achievable directly from the new parent.
  const std::vector<int> kids = nodes_[explored].children;
  for (int c : kids) {
    std::optional<OperationSequence> direct;
    if (cfg_.strategy == Strategy::Single) {
      const OperationSequence& ce = nodes_[c].edge;
      if (edge.size() >= 2 && ce.size() == 2 &&
          edge.back().object == ce.back().object) {
        const ObjectId k = ce.back().object;
        const Point2 from = nodes_[new_parent].state.arrangement.poses[k];
        const Point2 to = nodes_[c].state.arrangement.poses[k];
        OperationSequence seq{
            {OpType::Pick, k, from, nearest_perimeter_coord(table_, from)},
            {OpType::Place, k, to, nearest_perimeter_coord(table_, to)}};
        const SimResult sim =
            simulate(table_, nodes_[new_parent].state, seq, rho_, cfg_.tol);
        if (sim.ok && states_equal(sim.state, nodes_[c].state))
          direct = std::move(seq);
      }
    } else {
      direct = shorten(table_, edge, nodes_[c].edge,
                       nodes_[new_parent].state, cm_, rho_, cfg_.tol);
    }
    if (!direct) continue;
    const double g2 =
        nodes_[new_parent].g +
        sequence_cost(*direct, nodes_[new_parent].state.robot, cm_);
    if (g2 >= nodes_[c].g - 1e-12) continue;
    auto& sib = nodes_[explored].children;
    sib.erase(std::find(sib.begin(), sib.end(), c));
    nodes_[c].parent = new_parent;
    nodes_[c].edge = std::move(*direct);
    nodes_[new_parent].children.push_back(c);
    update_subtree(c);
  }
  refresh_best_from_goal_nodes();
}

void Planner::expand(int id) {
  // new_node below may reallocate nodes_, so keep a copy, not a reference
  const State s = nodes_[id].state;
  std::vector<Successor> succs;
  if (cfg_.strategy == Strategy::Single) {
    succs = successors_single(table_, s, goal_, rng_, buffer_samples_, rho_,
                              cfg_.tol);
  } else {
    ExpandParams params;
    params.rho = rho_;
    params.buffer_samples = buffer_samples_;
    params.region_reduction = cfg_.region_reduction;
    params.tol = cfg_.tol;
    succs = successors_multiple(table_, s, goal_, rng_, params);
  }
  for (Successor& suc : succs) {
    const double ec = sequence_cost(suc.seq, s.robot, cm_);
    const double g2 = nodes_[id].g + ec;
    // Skip duplicates that cannot trigger a rewrite.
    const std::string key = state_key(suc.state);
    bool skip = false;
    if (auto it = closed_.find(key); it != closed_.end()) {
      for (int m : it->second) {
        if (states_equal(nodes_[m].state, suc.state) &&
            nodes_[m].g <= g2 + 1e-12) {
          skip = true;
          break;
        }
      }
    }
    if (skip) continue;
    const int c = new_node(std::move(suc.state), id, std::move(suc.seq), g2);
    nodes_[id].children.push_back(c);
    push_open(c);
    if (is_goal(nodes_[c].state, goal_, cfg_.tol)) note_goal_node(c);
  }
  ++expansions_;
  if (cfg_.goal_attempt) try_goal_attempt(id);
}

bool Planner::step() {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const bool re_explore = solution_found() && !closed_list_.empty() &&
                          coin(rng_) < cfg_.re_explore_prob;
  if (re_explore) {
    std::uniform_int_distribution<size_t> pick(0, closed_list_.size() - 1);
    expand(closed_list_[pick(rng_)]);
    return true;
  }

  const int id = pop_open();
  if (id < 0) {
    if (solution_found() && cfg_.re_explore_prob > 0 &&
        !closed_list_.empty()) {
      std::uniform_int_distribution<size_t> pick(0, closed_list_.size() - 1);
      expand(closed_list_[pick(rng_)]);
      return true;
    }
    return false;
  }

  const std::string key = state_key(nodes_[id].state);
  auto& bucket = closed_[key];
  for (int m : bucket) {
    if (!states_equal(nodes_[m].state, nodes_[id].state)) continue;
    // Duplicate of an explored state: rewrite on a strictly better path,
    // then skip expansion either way. Re-parenting under a descendant of m
    // would cycle (possible only with zero-cost edges).
    bool m_is_ancestor = false;
    for (int a = nodes_[id].parent; a >= 0; a = nodes_[a].parent) {
      if (a == m) {
        m_is_ancestor = true;
        break;
      }
    }
    if (!m_is_ancestor && nodes_[id].g + 1e-12 < nodes_[m].g)
      rewrite(nodes_[id].parent, m, nodes_[id].edge);
    if (nodes_[id].parent >= 0) {
      auto& sib = nodes_[nodes_[id].parent].children;
      sib.erase(std::find(sib.begin(), sib.end(), id));
    }
    nodes_[id].parent = -2;
    nodes_[id].discarded = true;
    return true;
  }
  bucket.push_back(id);
  closed_list_.push_back(id);
  nodes_[id].expanded = true;
  expand(id);
  return true;
}

std::optional<Plan> Planner::best_plan() const {
  if (!solution_found()) return std::nullopt;
  return Plan{best_seq_, best_cost_};
}

bool Planner::audit(std::string* why) const {
  std::vector<int> seen(nodes_.size(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    const SearchNode& n = nodes_[id];
    for (int c : n.children) {
      if (seen[c]) return fail("cycle or shared child at node " +
                               std::to_string(c));
      seen[c] = 1;
      const SearchNode& ch = nodes_[c];
      if (ch.parent != id) return fail("parent pointer mismatch");
      const double g = n.g + sequence_cost(ch.edge, n.state.robot, cm_);
      if (std::fabs(g - ch.g) > 1e-9) return fail("g is not the path sum");
      const SimResult sim = simulate(table_, n.state, ch.edge, rho_, cfg_.tol);
      if (!sim.ok) return fail("edge does not simulate");
      if (!states_equal(sim.state, ch.state))
        return fail("edge end state mismatch");
      stack.push_back(c);
    }
  }
  return true;
}

PlanResult Planner::run() {
  t0_ = std::chrono::steady_clock::now();
  while (elapsed() < cfg_.timeout_s) {
    if (!step()) break;
  }
  PlanResult res;
  res.events = events_;
  res.expansions = expansions_;
  if (solution_found()) {
    res.success = true;
    res.plan = {best_seq_, best_cost_};
  }
  return res;
}

PlanResult plan(const TableSpec& table, const State& start,
                const Arrangement& goal, const PlannerConfig& config,
                const CostModel& cm) {
  Planner p(table, start, goal, config, cm);
  return p.run();
}

}  // namespace rearr
