#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <variant>
#include <vector>

#include "hullpeel/error.hpp"

namespace hullpeel {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point operator+(Point a, Point b) noexcept { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point operator-(Point a, Point b) noexcept { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point operator*(double c, Point a) noexcept { return {c * a.x, c * a.y}; }
  friend constexpr bool operator==(Point a, Point b) noexcept = default;
  friend constexpr bool operator<(Point a, Point b) noexcept {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  }
};

constexpr double dot(Point a, Point b) noexcept { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point a, Point b) noexcept { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) noexcept { return std::hypot(a.x, a.y); }

/// Relative tolerance of the orientation predicate.
inline constexpr double orientation_eps = 1e-12;

/// Signed orientation of c relative to the directed line a→b, with a
/// relative dead band: +1 strictly left, -1 strictly right, 0 near-collinear.
inline int orientation(Point a, Point b, Point c) noexcept {
  const Point u = b - a;
  const Point v = c - a;
  const double cr = cross(u, v);
  const double scale = orientation_eps * std::sqrt(dot(u, u) * dot(v, v));
  if (cr > scale) return 1;
  if (cr < -scale) return -1;
  return 0;
}

inline double segment_distance(Point p, Point a, Point b) noexcept {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

inline void require_finite(std::span<const Point> points) {
  for (const Point& p : points)
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw Error(ErrorKind::InvalidCoordinate, "point coordinates must be finite");
}

/// Strictly convex polygon, vertices counter-clockwise.
class ConvexPolygon {
 public:
  /// Validates orientation and strict convexity.
  explicit ConvexPolygon(std::vector<Point> ccw_vertices) : vertices_(std::move(ccw_vertices)) {
    require_finite(vertices_);
    if (vertices_.size() < 3) throw Error(ErrorKind::InvalidArgument, "polygon needs at least 3 vertices");
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i)
      if (orientation(vertices_[i], vertices_[(i + 1) % n], vertices_[(i + 2) % n]) <= 0)
        throw Error(ErrorKind::InvalidArgument, "vertices are not strictly convex in CCW order");
  }

  [[nodiscard]] std::span<const Point> vertices() const noexcept { return vertices_; }
  [[nodiscard]] std::size_t size() const noexcept { return vertices_.size(); }
  [[nodiscard]] Point operator[](std::size_t i) const noexcept { return vertices_[i]; }
  [[nodiscard]] Point edge_start(std::size_t i) const noexcept { return vertices_[i]; }
  [[nodiscard]] Point edge_end(std::size_t i) const noexcept { return vertices_[(i + 1) % vertices_.size()]; }

 private:
  struct Unchecked {};
  ConvexPolygon(Unchecked, std::vector<Point> v) : vertices_(std::move(v)) {}
  friend ConvexPolygon scale(const ConvexPolygon&, double);
  friend ConvexPolygon rotate(const ConvexPolygon&, double);

  std::vector<Point> vertices_;
};

/// Hull of collinear input or of fewer than three points: the extreme
/// points only (one or two of them).
struct Degenerate {
  std::vector<Point> extremes;
};

using Hull = std::variant<ConvexPolygon, Degenerate>;

namespace detail {

// Monotone chain over index order `order` (lexicographically sorted by
// point).  Near-collinear points are popped, so they never become vertices.
inline std::vector<std::size_t> monotone_chain(std::span<const Point> pts,
                                               std::span<const std::size_t> order) {
  const std::size_t n = order.size();
  if (n < 3) {
    std::vector<std::size_t> out(order.begin(), order.end());
    if (n == 2 && pts[out[0]] == pts[out[1]]) out.pop_back();
    return out;
  }
  std::vector<std::size_t> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && orientation(pts[hull[k - 2]], pts[hull[k - 1]], pts[order[i]]) <= 0) --k;
    hull[k++] = order[i];
  }
  for (std::size_t i = n - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && orientation(pts[hull[k - 2]], pts[hull[k - 1]], pts[order[i]]) <= 0) --k;
    hull[k++] = order[i];
  }
  hull.resize(k - 1);
  return hull;
}

}  // namespace detail

/// Indices of hull vertices in CCW order, assuming `pts` is already sorted
/// lexicographically.  Fewer than 3 indices means the hull is degenerate.
inline std::vector<std::size_t> hull_indices_presorted(std::span<const Point> pts) {
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  return detail::monotone_chain(pts, order);
}

/// Indices of hull vertices in CCW order.  Fewer than 3 means degenerate.
inline std::vector<std::size_t> hull_indices(std::span<const Point> pts) {
  require_finite(pts);
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pts[a] < pts[b]; });
  return detail::monotone_chain(pts, order);
}

inline Hull make_hull(std::span<const Point> pts, std::span<const std::size_t> idx) {
  std::vector<Point> v;
  v.reserve(idx.size());
  for (std::size_t i : idx) v.push_back(pts[i]);
  if (v.size() < 3) return Degenerate{std::move(v)};
  return ConvexPolygon(std::move(v));
}

inline Hull convex_hull(std::span<const Point> points) {
  const auto idx = hull_indices(points);
  return make_hull(points, idx);
}

/// True iff every input point is a vertex of the hull of the set.
inline bool is_extreme_set(std::span<const Point> points) {
  return hull_indices(points).size() == points.size() && points.size() >= 3;
}

inline double perimeter(const ConvexPolygon& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += norm(p.edge_end(i) - p.edge_start(i));
  return s;
}

inline double area(const ConvexPolygon& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += cross(p.edge_start(i), p.edge_end(i));
  return 0.5 * s;
}

inline double max_norm(const ConvexPolygon& p) {
  double m = 0.0;
  for (Point v : p.vertices()) m = std::max(m, norm(v));
  return m;
}

/// Origin strictly left of every edge (outside the orientation dead band).
inline bool origin_interior(const ConvexPolygon& p) {
  for (std::size_t i = 0; i < p.size(); ++i)
    if (orientation(p.edge_start(i), p.edge_end(i), Point{}) <= 0) return false;
  return true;
}

/// Distance from the origin to the boundary; the origin must be interior.
inline double min_boundary_distance(const ConvexPolygon& p) {
  if (!origin_interior(p)) throw Error(ErrorKind::OriginNotInterior, "origin is not strictly inside the polygon");
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i) m = std::min(m, segment_distance(Point{}, p.edge_start(i), p.edge_end(i)));
  return m;
}

/// Closed containment with a relative tolerance on the edge test.
inline bool contains(const ConvexPolygon& poly, Point q, double rel_tol = 1e-9) {
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point a = poly.edge_start(i);
    const Point u = poly.edge_end(i) - a;
    const Point v = q - a;
    if (cross(u, v) < -rel_tol * std::sqrt(dot(u, u) * dot(v, v))) return false;
  }
  return true;
}

inline bool contains(const ConvexPolygon& outer, const ConvexPolygon& inner, double rel_tol = 1e-9) {
  return std::all_of(inner.vertices().begin(), inner.vertices().end(),
                     [&](Point v) { return contains(outer, v, rel_tol); });
}

/// Distance from q to the filled polygon (0 inside).
inline double distance(const ConvexPolygon& poly, Point q) {
  if (contains(poly, q, 0.0)) return 0.0;
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) m = std::min(m, segment_distance(q, poly.edge_start(i), poly.edge_end(i)));
  return m;
}

/// max over vertices of `from` of the distance to `to`.  Exact for convex
/// bodies because distance to a convex set is a convex function.
inline double directed_hausdorff(const ConvexPolygon& from, const ConvexPolygon& to) {
  double m = 0.0;
  for (Point v : from.vertices()) m = std::max(m, distance(to, v));
  return m;
}

inline double hausdorff(const ConvexPolygon& p, const ConvexPolygon& q) {
  return std::max(directed_hausdorff(p, q), directed_hausdorff(q, p));
}

inline ConvexPolygon scale(const ConvexPolygon& p, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorKind::NonPositiveScale, "scale factor must be positive");
  std::vector<Point> v(p.vertices().begin(), p.vertices().end());
  for (Point& q : v) q = c * q;
  return ConvexPolygon(ConvexPolygon::Unchecked{}, std::move(v));
}

inline ConvexPolygon rotate(const ConvexPolygon& p, double radians) {
  const double c = std::cos(radians);
  const double s = std::sin(radians);
  std::vector<Point> v(p.vertices().begin(), p.vertices().end());
  for (Point& q : v) q = {c * q.x - s * q.y, s * q.x + c * q.y};
  return ConvexPolygon(ConvexPolygon::Unchecked{}, std::move(v));
}

/// Regular n-gon inscribed in the circle of radius r.
inline ConvexPolygon regular_polygon(std::size_t n, double r = 1.0, double phase = 0.0) {
  std::vector<Point> v;
  v.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = phase + 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    v.push_back({r * std::cos(t), r * std::sin(t)});
  }
  return ConvexPolygon(std::move(v));
}

}  // namespace hullpeel
