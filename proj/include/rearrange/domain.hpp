#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "rearrange/geometry.hpp"

namespace rearr {

using ObjectId = int;

constexpr double kPoseTol = 1e-6;

struct Arrangement {
  std::vector<Point2> poses;  // one per object, index = ObjectId
  double radius = 0.0;

  bool valid(const TableSpec& table) const;
  int size() const { return static_cast<int>(poses.size()); }
};

// Search node payload: robot standing location plus a full arrangement.
// The hand is implicitly empty in every state.
struct State {
  PerimeterCoord robot = 0.0;
  Arrangement arrangement;
};

enum class OpType { Pick, Place };

struct Operation {
  OpType type = OpType::Pick;
  ObjectId object = 0;
  Point2 pose;
  PerimeterCoord standing = 0.0;
};

using OperationSequence = std::vector<Operation>;

struct CostModel {
  double mc = 1.0;  // manipulation cost per pick or place
  TableSpec table;
};

struct Plan {
  OperationSequence sequence;
  double total_cost = 0.0;
};

// One relocation of the goal-attempt local solver: object, where it is
// picked, and where it ends up (goal or buffer).
struct RearrTriple {
  ObjectId object = 0;
  Point2 pick_pose;
  Point2 place_pose;
};

enum class SimError {
  None,
  HandOccupied,
  HandEmpty,
  ObjectNotAtPose,
  OutOfReach,
  CollisionAtPlace,
  OutOfBounds,
};

const char* sim_error_name(SimError e);

struct SimResult {
  bool ok = false;
  State state;
  SimError error = SimError::None;
  size_t op_index = 0;  // offending operation, seq.size() for a dangling hold
};

// Applies the sequence in order, enforcing hand capacity 1, pick-at-pose,
// reach, bounds, and collision at place. The held object is exempt from
// collision checks until placed.
SimResult simulate(const TableSpec& table, const State& start,
                   const OperationSequence& seq, double rho,
                   double tol = kPoseTol);

// mc per operation plus travel whenever the standing location changes
// (walk initialized at start_robot). Reproduces both closed-form costs.
double sequence_cost(const OperationSequence& seq, PerimeterCoord start_robot,
                     const CostModel& cm);

bool is_goal(const State& state, const Arrangement& goal, double tol = kPoseTol);

int misplaced_count(const State& state, const Arrangement& goal,
                    double tol = kPoseTol);

std::vector<ObjectId> misplaced_objects(const Arrangement& current,
                                        const Arrangement& goal,
                                        double tol = kPoseTol);

}  // namespace rearr
