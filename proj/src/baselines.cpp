#include "rearrange/baselines.hpp"

#include <chrono>
#include <cmath>

namespace rearr {

PlanResult trlb_plan(const TableSpec& table, const State& start,
                     const Arrangement& goal, const CostModel& cm,
                     std::mt19937_64& rng, double rho, double tol) {
  const auto t0 = std::chrono::steady_clock::now();
  if (rho <= 0) rho = default_reach(table);
  PlanResult res;
  auto seq = goal_attempt(table, start, goal, Strategy::Single, rho, rng, tol);
  if (!seq) return res;
  res.success = true;
  res.plan.sequence = std::move(*seq);
  res.plan.total_cost = sequence_cost(res.plan.sequence, start.robot, cm);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  res.events.push_back({elapsed, res.plan.total_cost});
  return res;
}

namespace {

struct MctsNode {
  State state;
  int visits = 0;
  double total_reward = 0.0;
  double g = 0.0;  // path cost from the root
  int parent = -1;
  OperationSequence edge;
  std::vector<int> children;
  bool expanded_once = false;  // untried successors generated
  std::vector<Successor> untried;
  bool terminal = false;
};

}  // namespace

PlanResult mcts_plan(const TableSpec& table, const State& start,
                     const Arrangement& goal, const PlannerConfig& config,
                     const CostModel& cm) {
  const double rho = config.rho > 0 ? config.rho : default_reach(table);
  const int buffer_samples =
      config.buffer_samples > 0
          ? config.buffer_samples
          : (config.strategy == Strategy::Single ? 3 : 1);
  const double c_ref = 2.0 * cm.mc * goal.poses.size();
  const double uct_c = std::sqrt(2.0);
  std::mt19937_64 rng(config.seed);

  std::vector<MctsNode> nodes;
  {
    MctsNode root;
    root.state = start;
    nodes.push_back(std::move(root));
  }

  PlanResult res;
  double best_cost = 1e300;
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  auto gen_untried = [&](int id) {
    MctsNode& n = nodes[id];
    n.expanded_once = true;
    if (config.strategy == Strategy::Single) {
      n.untried = successors_single(table, n.state, goal, rng, buffer_samples,
                                    rho, config.tol);
    } else {
      ExpandParams params;
      params.rho = rho;
      params.buffer_samples = buffer_samples;
      params.region_reduction = config.region_reduction;
      params.tol = config.tol;
      n.untried = successors_multiple(table, n.state, goal, rng, params);
    }
  };

  auto path_sequence = [&](int id) {
    std::vector<int> chain;
    for (int i = id; i >= 0; i = nodes[i].parent) chain.push_back(i);
    OperationSequence seq;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      seq.insert(seq.end(), nodes[*it].edge.begin(), nodes[*it].edge.end());
    }
    return seq;
  };

  auto offer_plan = [&](OperationSequence seq, double cost) {
    if (cost >= best_cost - 1e-12) return;
    const SimResult sim = simulate(table, start, seq, rho, config.tol);
    if (!sim.ok || !is_goal(sim.state, goal, config.tol)) return;
    best_cost = cost;
    res.plan = {std::move(seq), cost};
    res.success = true;
    res.events.push_back({elapsed(), cost});
  };

  while (elapsed() < config.timeout_s) {
    // Selection by UCB1 down to a node with untried successors.
    int id = 0;
    while (true) {
      MctsNode& n = nodes[id];
      if (n.terminal) break;
      if (!n.expanded_once) gen_untried(id);
      if (!nodes[id].untried.empty() || nodes[id].children.empty()) break;
      double best_u = -1.0;
      int best_c = nodes[id].children.front();
      for (int c : nodes[id].children) {
        const MctsNode& ch = nodes[c];
        const double u =
            ch.total_reward / std::max(1, ch.visits) +
            uct_c * std::sqrt(std::log(std::max(2, nodes[id].visits)) /
                              std::max(1, ch.visits));
        if (u > best_u) {
          best_u = u;
          best_c = c;
        }
      }
      id = best_c;
    }

    // Expansion.
    if (!nodes[id].terminal && !nodes[id].untried.empty()) {
      std::uniform_int_distribution<size_t> pick(0,
                                                 nodes[id].untried.size() - 1);
      const size_t j = pick(rng);
      Successor suc = std::move(nodes[id].untried[j]);
      nodes[id].untried.erase(nodes[id].untried.begin() + j);
      MctsNode child;
      child.state = std::move(suc.state);
      child.parent = id;
      child.edge = std::move(suc.seq);
      child.g = nodes[id].g +
                sequence_cost(child.edge, nodes[id].state.robot, cm);
      child.terminal = is_goal(child.state, goal, config.tol);
      nodes.push_back(std::move(child));
      const int cid = static_cast<int>(nodes.size()) - 1;
      nodes[id].children.push_back(cid);
      id = cid;
    }

    // Rollout: complete via the single-strategy goal attempt.
    double reward = 0.0;
    if (nodes[id].terminal) {
      reward = c_ref / (c_ref + nodes[id].g);
      offer_plan(path_sequence(id), nodes[id].g);
    } else {
      auto ga = goal_attempt(table, nodes[id].state, goal, Strategy::Single,
                             rho, rng, config.tol);
      if (ga) {
        const double total =
            nodes[id].g + sequence_cost(*ga, nodes[id].state.robot, cm);
        reward = c_ref / (c_ref + total);
        OperationSequence full = path_sequence(id);
        full.insert(full.end(), ga->begin(), ga->end());
        offer_plan(std::move(full), total);
      }
    }

    // Backup.
    for (int i = id; i >= 0; i = nodes[i].parent) {
      nodes[i].visits += 1;
      nodes[i].total_reward += reward;
    }
  }
  return res;
}

}  // namespace rearr
