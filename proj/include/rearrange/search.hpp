#pragma once

#include <chrono>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "rearrange/expand.hpp"

namespace rearr {

enum class Strategy { Single, Multiple };

struct PlannerConfig {
  Strategy strategy = Strategy::Multiple;
  double re_explore_prob = 0.3;  // closed-list re-exploration after a solution
  bool goal_attempt = true;
  bool region_reduction = true;
  int buffer_samples = 0;  // 0: strategy default (single 3, multiple 1)
  double timeout_s = 10.0;
  uint64_t seed = 0;
  bool arrangement_only_keys = false;  // state identity ignores the robot
  double rho = 0.0;                    // 0: default_reach(table)
  double tol = kPoseTol;
  double quantum = 1e-4;  // closed-list state quantization
};

struct AnytimeEvent {
  double elapsed_s = 0.0;
  double best_cost = 0.0;
};

struct PlanResult {
  bool success = false;
  Plan plan;
  std::vector<AnytimeEvent> events;
  size_t expansions = 0;
};

double heuristic(const State& state, const Arrangement& goal,
                 const CostModel& cm, double tol = kPoseTol);

// Greedy feasible completion: local-solver triples executed either with
// per-operation nearest standing points (Single) or batched at standing
// points that maximize operations per stop (Multiple).
std::optional<OperationSequence> goal_attempt(const TableSpec& table,
                                              const State& state,
                                              const Arrangement& goal,
                                              Strategy strategy, double rho,
                                              std::mt19937_64& rng,
                                              double tol = kPoseTol);

struct SearchNode {
  State state;
  double g = 0.0;
  double h = 0.0;
  int parent = -1;  // -1 root, -2 discarded duplicate
  OperationSequence edge;  // from parent
  std::vector<int> children;
  bool expanded = false;
  bool discarded = false;
};

class Planner {
 public:
  Planner(const TableSpec& table, const State& start, const Arrangement& goal,
          const PlannerConfig& config, const CostModel& cm);

  // Runs iterations until timeout or exhaustion; throws std::invalid_argument
  // when an object already starts at its goal.
  PlanResult run();

  // One select/expand (or rewrite) iteration. Returns false when nothing is
  // left to do. Exposed for tests driving expansion/rewrite interleavings.
  bool step();

  const std::vector<SearchNode>& nodes() const { return nodes_; }
  bool solution_found() const { return best_cost_ < kInf; }
  const std::vector<AnytimeEvent>& events() const { return events_; }
  std::optional<Plan> best_plan() const;
  size_t expansions() const { return expansions_; }

  // Tree consistency audit: acyclic, g equals path-sum, every edge simulates
  // from its parent's state to its own state.
  bool audit(std::string* why = nullptr) const;

 private:
  static constexpr double kInf = 1e300;

  struct OpenEntry {
    double f, h;
    uint64_t order;
    int node;
    double g_snapshot;
    bool operator<(const OpenEntry& o) const {
      if (f != o.f) return f > o.f;
      if (h != o.h) return h > o.h;
      return order > o.order;
    }
  };

  std::string state_key(const State& s) const;
  bool states_equal(const State& a, const State& b) const;
  void push_open(int id);
  int pop_open();
  int new_node(State state, int parent, OperationSequence edge, double g);
  void expand(int id);
  void update_subtree(int id);
  void rewrite(int new_parent, int explored, const OperationSequence& edge);
  void try_goal_attempt(int id);
  void note_goal_node(int id);
  void refresh_best_from_goal_nodes();
  OperationSequence path_sequence(int id) const;
  double elapsed() const;

  TableSpec table_;
  Arrangement goal_;
  PlannerConfig cfg_;
  CostModel cm_;
  double rho_;
  int buffer_samples_;
  std::mt19937_64 rng_;

  std::vector<SearchNode> nodes_;
  std::priority_queue<OpenEntry> open_;
  uint64_t order_counter_ = 0;
  std::unordered_map<std::string, std::vector<int>> closed_;
  std::vector<int> closed_list_;  // expanded nodes, re-exploration pool
  std::vector<int> goal_nodes_;

  double best_cost_ = kInf;
  OperationSequence best_seq_;
  std::vector<AnytimeEvent> events_;
  size_t expansions_ = 0;
  std::chrono::steady_clock::time_point t0_;
};

PlanResult plan(const TableSpec& table, const State& start,
                const Arrangement& goal, const PlannerConfig& config,
                const CostModel& cm);

}  // namespace rearr
