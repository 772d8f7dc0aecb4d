#pragma once

#include <map>
#include <optional>
#include <random>
#include <vector>

#include "rearrange/domain.hpp"

namespace rearr {

enum class AbstractTarget { ToGoal, ToBuffer };

struct AbstractAction {
  ObjectId object = 0;
  AbstractTarget target = AbstractTarget::ToGoal;
};

struct AbstractPlan {
  std::vector<AbstractAction> actions;
  int max_running = 0;  // peak number of simultaneously buffered objects
};

using PoseMap = std::map<ObjectId, Point2>;

// Exact minimal-running-buffer abstract plan via DP over subsets of placed
// objects. Object a depends on b when goal(a) overlaps current(b). Ties are
// broken by fewest ToBuffer actions, then lexicographic object order.
AbstractPlan minimal_running_buffer_plan(const PoseMap& current,
                                         const PoseMap& goal,
                                         const TableSpec& table, double radius);

// Before each ToGoal whose footprint overlaps an explicit object's pose,
// insert a ToBuffer eviction of that explicit object (once per object).
AbstractPlan insert_explicit_evictions(const AbstractPlan& plan,
                                       const PoseMap& implicit_goals,
                                       const PoseMap& explicit_poses,
                                       double radius);

struct AllocationResult {
  bool ok = false;
  std::vector<RearrTriple> triples;
  size_t failed_index = 0;  // first abstract action that could not be realized
};

// Lazy buffer allocation: walks the plan over the evolving arrangement,
// sampling buffer poses that avoid current footprints, pending goal
// footprints, and (when constrained) out-of-reach placements.
AllocationResult allocate_buffers(const AbstractPlan& plan,
                                  const TableSpec& table,
                                  const Arrangement& start, const PoseMap& goal,
                                  std::optional<ReachConstraint> reach,
                                  std::mt19937_64& rng);

// Feasible local solver: minimal-running-buffer plan + lazy allocation with
// retries. Only misplaced objects are planned; empty on exhaustion.
std::optional<std::vector<RearrTriple>> trlb_local_solve(
    const TableSpec& table, const Arrangement& start, const Arrangement& goal,
    std::mt19937_64& rng, int retries = 10, double tol = kPoseTol);

}  // namespace rearr
