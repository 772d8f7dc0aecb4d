#include "rearrange/domain.hpp"

namespace rearr {

namespace {
constexpr double kEps = 1e-9;
}

bool Arrangement::valid(const TableSpec& table) const {
  for (size_t i = 0; i < poses.size(); ++i) {
    const Point2& p = poses[i];
    if (p.x < radius - kEps || p.x > table.width - radius + kEps ||
        p.y < radius - kEps || p.y > table.height - radius + kEps)
      return false;
    for (size_t j = i + 1; j < poses.size(); ++j) {
      if (dist(p, poses[j]) < 2.0 * radius - kEps) return false;
    }
  }
  return true;
}

const char* sim_error_name(SimError e) {
  switch (e) {
    case SimError::None: return "None";
    case SimError::HandOccupied: return "HandOccupied";
    case SimError::HandEmpty: return "HandEmpty";
    case SimError::ObjectNotAtPose: return "ObjectNotAtPose";
    case SimError::OutOfReach: return "OutOfReach";
    case SimError::CollisionAtPlace: return "CollisionAtPlace";
    case SimError::OutOfBounds: return "OutOfBounds";
  }
  return "?";
}

SimResult simulate(const TableSpec& table, const State& start,
                   const OperationSequence& seq, double rho, double tol) {
  State cur = start;
  ObjectId held = -1;
  const double r = cur.arrangement.radius;

  auto fail = [&](SimError e, size_t idx) {
    SimResult res;
    res.ok = false;
    res.error = e;
    res.op_index = idx;
    res.state = cur;
    return res;
  };

  for (size_t i = 0; i < seq.size(); ++i) {
    const Operation& op = seq[i];
    const Point2 stand = coord_to_point(table, op.standing);
    if (dist(stand, op.pose) > rho + kEps) return fail(SimError::OutOfReach, i);
    if (op.type == OpType::Pick) {
      if (held >= 0) return fail(SimError::HandOccupied, i);
      if (op.object < 0 || op.object >= cur.arrangement.size())
        return fail(SimError::ObjectNotAtPose, i);
      if (dist(cur.arrangement.poses[op.object], op.pose) > tol)
        return fail(SimError::ObjectNotAtPose, i);
      held = op.object;
    } else {
      if (held != op.object) return fail(SimError::HandEmpty, i);
      if (op.pose.x < r - kEps || op.pose.x > table.width - r + kEps ||
          op.pose.y < r - kEps || op.pose.y > table.height - r + kEps)
        return fail(SimError::OutOfBounds, i);
      for (int k = 0; k < cur.arrangement.size(); ++k) {
        if (k == held) continue;
        if (dist(cur.arrangement.poses[k], op.pose) < 2.0 * r - kEps)
          return fail(SimError::CollisionAtPlace, i);
      }
      cur.arrangement.poses[held] = op.pose;
      held = -1;
    }
    cur.robot = op.standing;
  }
  if (held >= 0) return fail(SimError::HandOccupied, seq.size());
  SimResult res;
  res.ok = true;
  res.state = cur;
  return res;
}

double sequence_cost(const OperationSequence& seq, PerimeterCoord start_robot,
                     const CostModel& cm) {
  double total = 0.0;
  PerimeterCoord prev = start_robot;
  for (const Operation& op : seq) {
    total += travel_cost(cm.table, prev, op.standing);
    total += cm.mc;
    prev = op.standing;
  }
  return total;
}

bool is_goal(const State& state, const Arrangement& goal, double tol) {
  return misplaced_count(state, goal, tol) == 0;
}

int misplaced_count(const State& state, const Arrangement& goal, double tol) {
  int n = 0;
  for (size_t i = 0; i < goal.poses.size(); ++i) {
    if (dist(state.arrangement.poses[i], goal.poses[i]) > tol) ++n;
  }
  return n;
}

std::vector<ObjectId> misplaced_objects(const Arrangement& current,
                                        const Arrangement& goal, double tol) {
  std::vector<ObjectId> out;
  for (size_t i = 0; i < goal.poses.size(); ++i) {
    if (dist(current.poses[i], goal.poses[i]) > tol)
      out.push_back(static_cast<ObjectId>(i));
  }
  return out;
}

}  // namespace rearr
