#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace rearr {

struct TableSpec {
  double width = 0.0;
  double height = 0.0;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline double dist(const Point2& a, const Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Arc-length coordinate along the table boundary, counter-clockwise from the
// (0,0) corner: bottom edge, then right, top, left. Always in [0, P).
using PerimeterCoord = double;

// Arc on the boundary circle; wraps modulo the perimeter length.
struct PerimeterInterval {
  PerimeterCoord start = 0.0;
  double length = 0.0;
};

struct ReachSpec {
  double rho = 0.0;
};

inline double default_reach(const TableSpec& t) {
  return 0.5 * std::min(t.width, t.height);
}

double perimeter_length(const TableSpec& table);

double wrap_coord(const TableSpec& table, double s);

Point2 coord_to_point(const TableSpec& table, PerimeterCoord s);

// Shortest around-the-table distance between two standing locations.
double travel_cost(const TableSpec& table, PerimeterCoord s1, PerimeterCoord s2);

// True iff s_via lies on the shortest boundary path from s_from to s_to.
// An exact half-perimeter tie takes the counter-clockwise path.
bool path_passes_through(const TableSpec& table, PerimeterCoord s_from,
                         PerimeterCoord s_to, PerimeterCoord s_via);

bool interval_contains(const TableSpec& table, const PerimeterInterval& iv,
                       PerimeterCoord s, double eps = 1e-9);

// Boundary arcs whose points are within rho of p, stitched across corners
// into maximal wrapped intervals. Zero-length tangencies are dropped.
std::vector<PerimeterInterval> reach_intervals(const TableSpec& table, Point2 p,
                                               double rho);

// Boundary point closest to p; ties broken by smallest coordinate.
PerimeterCoord nearest_perimeter_coord(const TableSpec& table, Point2 p);

// Candidate disk center is valid when in bounds and at center distance
// >= 2*radius from every non-ignored pose (tangency allowed).
bool pose_valid(const TableSpec& table, std::span<const Point2> poses,
                Point2 candidate, double radius,
                std::span<const int> ignore = {});

struct ReachConstraint {
  PerimeterCoord standing = 0.0;
  double rho = 0.0;
};

// Uniform rejection sampling over the in-bounds box; gives up after 100
// attempts. forbidden poses are excluded like object footprints.
std::optional<Point2> sample_free_pose(
    const TableSpec& table, std::span<const Point2> poses, double radius,
    std::span<const Point2> forbidden = {},
    std::optional<ReachConstraint> within = std::nullopt,
    std::mt19937_64* rng = nullptr);

}  // namespace rearr
