#pragma once

#include "rearrange/search.hpp"

namespace rearr {

// Fast feasible reference planner: local-solver triples executed with
// per-operation nearest standing points. Non-anytime (single event).
PlanResult trlb_plan(const TableSpec& table, const State& start,
                     const Arrangement& goal, const CostModel& cm,
                     std::mt19937_64& rng, double rho = 0.0,
                     double tol = kPoseTol);

// Anytime UCT baseline. Expansion uses the configured strategy's successor
// generator; rollouts complete states with the single-strategy goal attempt
// and score reward = C_ref / (C_ref + cost) with C_ref = 2*MC*n
// (cost-ratio stand-in reward, see README).
PlanResult mcts_plan(const TableSpec& table, const State& start,
                     const Arrangement& goal, const PlannerConfig& config,
                     const CostModel& cm);

}  // namespace rearr
