#pragma once

#include <map>
#include <optional>
#include <random>
#include <vector>

#include "rearrange/buffers.hpp"
#include "rearrange/domain.hpp"

namespace rearr {

// Operation capability flags for an object within a region.
constexpr unsigned kCanPick = 1u;
constexpr unsigned kCanPlace = 2u;

struct ObjectOpDict {
  std::map<ObjectId, unsigned> entries;  // no zero-flag entries stored

  bool operator==(const ObjectOpDict&) const = default;
  // Proper-subset dominance on the flattened (object, op) pair set.
  bool proper_subset_of(const ObjectOpDict& other) const;
  int pair_count() const;
};

// Maximal perimeter arc over which a fixed set of (object, operation)
// capabilities holds.
struct ManipRegion {
  PerimeterInterval interval;
  ObjectOpDict dict;
};

struct StandingCandidate {
  PerimeterCoord location = 0.0;
  size_t region = 0;  // index into the region list it came from
};

struct ImplicitSplit {
  std::vector<ObjectId> implicit;
  std::vector<ObjectId> explicit_set;
  OperationSequence implicit_seq;  // all operations at the standing location
};

struct ExpandParams {
  double rho = 0.0;
  int buffer_samples = 1;
  bool region_reduction = true;
  double tol = kPoseTol;
};

struct Successor {
  OperationSequence seq;
  State state;
};

// Reach intervals of each misplaced object's current pose.
std::map<ObjectId, std::vector<PerimeterInterval>> picking_regions(
    const TableSpec& table, const State& state, const Arrangement& goal,
    double rho, double tol = kPoseTol);

// Reach intervals of each misplaced object's goal pose.
std::map<ObjectId, std::vector<PerimeterInterval>> placing_regions(
    const TableSpec& table, const State& state, const Arrangement& goal,
    double rho, double tol = kPoseTol);

// Overlay all picking/placing intervals into disjoint cells, drop objects
// that cannot be picked, drop empty cells, merge equal-dict neighbors.
std::vector<ManipRegion> manipulation_regions(const TableSpec& table,
                                              const State& state,
                                              const Arrangement& goal,
                                              double rho,
                                              double tol = kPoseTol);

// Drop regions whose dict is a proper subset of a surviving region's dict.
std::vector<ManipRegion> reduce_regions(std::vector<ManipRegion> regions);

// Region endpoints, minus endpoints whose shortest path from the robot
// passes through the sibling endpoint; the robot location itself is a
// candidate when it lies inside a region.
std::vector<StandingCandidate> efficient_standing_locations(
    const TableSpec& table, const State& state,
    const std::vector<ManipRegion>& regions);

// Splits a region's objects into implicit (pick-and-place in place, verified
// by buffer allocation under the reach constraint) and explicit, emitting
// the single-location sequence that rearranges the implicit set.
ImplicitSplit classify_and_verify(const TableSpec& table, const State& state,
                                  const Arrangement& goal,
                                  const ObjectOpDict& dict,
                                  PerimeterCoord location, double rho,
                                  std::mt19937_64& rng, double tol = kPoseTol);

std::vector<Successor> successors_single(const TableSpec& table,
                                         const State& state,
                                         const Arrangement& goal,
                                         std::mt19937_64& rng,
                                         int buffer_samples, double rho,
                                         double tol = kPoseTol);

std::vector<Successor> successors_multiple(const TableSpec& table,
                                           const State& state,
                                           const Arrangement& goal,
                                           std::mt19937_64& rng,
                                           const ExpandParams& params);

// Attempts switch-and-cancel, then operation merging, on the two edge
// sequences. Returns a combined sequence only when it simulates from
// parent_state to the same end state as plain concatenation at strictly
// lower cost.
std::optional<OperationSequence> shorten(const TableSpec& table,
                                         const OperationSequence& parent_to_cur,
                                         const OperationSequence& cur_to_child,
                                         const State& parent_state,
                                         const CostModel& cm, double rho,
                                         double tol = kPoseTol);

}  // namespace rearr
