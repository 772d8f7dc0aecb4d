#include "rearrange/geometry.hpp"

#include <algorithm>
#include <array>
#include <cassert>

namespace rearr {

namespace {
constexpr double kEps = 1e-9;
constexpr int kMaxSampleAttempts = 100;

struct Edge {
  Point2 origin;
  Point2 dir;  // unit
  double len;
  double s_begin;  // arc-length coordinate at origin
};

std::array<Edge, 4> table_edges(const TableSpec& t) {
  const double w = t.width, h = t.height;
  return {{
      {{0, 0}, {1, 0}, w, 0},
      {{w, 0}, {0, 1}, h, w},
      {{w, h}, {-1, 0}, w, w + h},
      {{0, h}, {0, -1}, h, 2 * w + h},
  }};
}
}  // namespace

double perimeter_length(const TableSpec& table) {
  return 2.0 * (table.width + table.height);
}

double wrap_coord(const TableSpec& table, double s) {
  const double p = perimeter_length(table);
  s = std::fmod(s, p);
  if (s < 0) s += p;
  return s;
}

Point2 coord_to_point(const TableSpec& table, PerimeterCoord s) {
  s = wrap_coord(table, s);
  for (const Edge& e : table_edges(table)) {
    const double t = s - e.s_begin;
    if (t <= e.len + kEps) {
      return {e.origin.x + e.dir.x * t, e.origin.y + e.dir.y * t};
    }
  }
  return {0, 0};  // unreachable for valid tables
}

double travel_cost(const TableSpec& table, PerimeterCoord s1,
                   PerimeterCoord s2) {
  const double p = perimeter_length(table);
  double d = std::fabs(wrap_coord(table, s1) - wrap_coord(table, s2));
  return std::min(d, p - d);
}

bool path_passes_through(const TableSpec& table, PerimeterCoord s_from,
                         PerimeterCoord s_to, PerimeterCoord s_via) {
  const double p = perimeter_length(table);
  const double ccw = wrap_coord(table, s_to - s_from);
  if (ccw <= p - ccw + kEps) {
    // counter-clockwise path, also taken on an exact half-perimeter tie
    return wrap_coord(table, s_via - s_from) <= ccw + kEps;
  }
  return wrap_coord(table, s_from - s_via) <= (p - ccw) + kEps;
}

bool interval_contains(const TableSpec& table, const PerimeterInterval& iv,
                       PerimeterCoord s, double eps) {
  if (iv.length >= perimeter_length(table) - eps) return true;
  return wrap_coord(table, s - iv.start) <= iv.length + eps;
}

std::vector<PerimeterInterval> reach_intervals(const TableSpec& table,
                                               Point2 p, double rho) {
  const double per = perimeter_length(table);
  // Per-edge circle-segment intersection, expressed in arc-length.
  struct Arc {
    double lo, hi;
  };
  std::vector<Arc> arcs;
  for (const Edge& e : table_edges(table)) {
    const double px = p.x - e.origin.x, py = p.y - e.origin.y;
    const double t0 = px * e.dir.x + py * e.dir.y;  // projection parameter
    const double perp2 = (px * px + py * py) - t0 * t0;
    const double disc = rho * rho - perp2;
    if (disc < 0) continue;
    const double dt = std::sqrt(disc);
    const double lo = std::max(0.0, t0 - dt);
    const double hi = std::min(e.len, t0 + dt);
    if (hi - lo > kEps) arcs.push_back({e.s_begin + lo, e.s_begin + hi});
  }
  if (arcs.empty()) return {};

  std::sort(arcs.begin(), arcs.end(),
            [](const Arc& a, const Arc& b) { return a.lo < b.lo; });
  std::vector<Arc> merged;
  for (const Arc& a : arcs) {
    if (!merged.empty() && a.lo <= merged.back().hi + kEps) {
      merged.back().hi = std::max(merged.back().hi, a.hi);
    } else {
      merged.push_back(a);
    }
  }
  // Stitch across the s = 0 corner.
  bool wrapped = false;
  if (merged.size() > 1 && merged.front().lo <= kEps &&
      merged.back().hi >= per - kEps) {
    merged.back().hi = per + merged.front().hi;
    merged.erase(merged.begin());
    wrapped = true;
  }
  std::vector<PerimeterInterval> out;
  for (const Arc& a : merged) {
    double len = a.hi - a.lo;
    if (len >= per - kEps) len = per;  // full circle
    out.push_back({wrap_coord(table, a.lo), len});
  }
  (void)wrapped;
  return out;
}

PerimeterCoord nearest_perimeter_coord(const TableSpec& table, Point2 p) {
  double best_d = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  for (const Edge& e : table_edges(table)) {
    const double px = p.x - e.origin.x, py = p.y - e.origin.y;
    const double t = std::clamp(px * e.dir.x + py * e.dir.y, 0.0, e.len);
    const Point2 q{e.origin.x + e.dir.x * t, e.origin.y + e.dir.y * t};
    const double d = dist(p, q);
    // Edges iterate in increasing s, so strict improvement breaks ties
    // toward the smallest coordinate.
    if (d < best_d - 1e-12) {
      best_d = d;
      best_s = wrap_coord(table, e.s_begin + t);
    }
  }
  return best_s;
}

bool pose_valid(const TableSpec& table, std::span<const Point2> poses,
                Point2 candidate, double radius, std::span<const int> ignore) {
  if (candidate.x < radius - kEps || candidate.x > table.width - radius + kEps ||
      candidate.y < radius - kEps || candidate.y > table.height - radius + kEps)
    return false;
  for (size_t i = 0; i < poses.size(); ++i) {
    if (std::find(ignore.begin(), ignore.end(), static_cast<int>(i)) !=
        ignore.end())
      continue;
    if (dist(poses[i], candidate) < 2.0 * radius - kEps) return false;
  }
  return true;
}

std::optional<Point2> sample_free_pose(const TableSpec& table,
                                       std::span<const Point2> poses,
                                       double radius,
                                       std::span<const Point2> forbidden,
                                       std::optional<ReachConstraint> within,
                                       std::mt19937_64* rng) {
  assert(rng != nullptr);
  if (table.width < 2 * radius || table.height < 2 * radius) return std::nullopt;
  std::uniform_real_distribution<double> ux(radius, table.width - radius);
  std::uniform_real_distribution<double> uy(radius, table.height - radius);
  const Point2 standing = within ? coord_to_point(table, within->standing)
                                 : Point2{};
  for (int attempt = 0; attempt < kMaxSampleAttempts; ++attempt) {
    const Point2 c{ux(*rng), uy(*rng)};
    if (!pose_valid(table, poses, c, radius)) continue;
    bool bad = false;
    for (const Point2& f : forbidden) {
      if (dist(f, c) < 2.0 * radius - kEps) {
        bad = true;
        break;
      }
    }
    if (bad) continue;
    if (within && dist(standing, c) > within->rho + kEps) continue;
    return c;
  }
  return std::nullopt;
}

}  // namespace rearr
