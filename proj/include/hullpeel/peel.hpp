#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hullpeel/error.hpp"
#include "hullpeel/geom.hpp"
#include "hullpeel/ppp.hpp"

namespace hullpeel {

struct LayerRecord {
  std::size_t k;                      ///< 1-based layer index
  ConvexPolygon polygon;
  std::vector<std::size_t> vertex_ids;  ///< input index (finite) or 0-based sequence index (stream), CCW
  std::size_t n_vertices;
  double perimeter;
  double area;
  double rho;
  std::optional<double> kappa;        ///< empty when the origin is not interior
  std::size_t n_points_consumed;
};

inline LayerRecord make_layer(std::size_t k, ConvexPolygon poly, std::vector<std::size_t> ids,
                              std::size_t consumed) {
  std::optional<double> kappa;
  if (origin_interior(poly)) kappa = min_boundary_distance(poly);
  const double per = perimeter(poly);
  const double ar = area(poly);
  const double rho = max_norm(poly);
  const std::size_t nv = poly.size();
  return LayerRecord{k, std::move(poly), std::move(ids), nv, per, ar, rho, kappa, consumed};
}

struct FinitePeeling {
  std::vector<LayerRecord> layers;
  std::vector<std::size_t> residue;  ///< input indices never on a layer
};

/// Convex layers of a finite set.  Stops once fewer than three points remain
/// or the remaining points are collinear; those form the residue.
inline FinitePeeling peel_layers(std::span<const Point> points) {
  require_finite(points);
  std::vector<std::size_t> alive(points.size());
  std::iota(alive.begin(), alive.end(), std::size_t{0});
  std::sort(alive.begin(), alive.end(), [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });

  FinitePeeling out;
  std::vector<char> removed(points.size(), 0);
  while (alive.size() >= 3) {
    auto hull = detail::monotone_chain(points, alive);
    if (hull.size() < 3) break;
    std::vector<Point> v;
    for (std::size_t i : hull) {
      v.push_back(points[i]);
      removed[i] = 1;
    }
    out.layers.push_back(make_layer(out.layers.size() + 1, ConvexPolygon(std::move(v)), std::move(hull),
                                    points.size()));
    std::erase_if(alive, [&](std::size_t i) { return removed[i] != 0; });
  }
  std::sort(alive.begin(), alive.end());
  out.residue = std::move(alive);
  return out;
}

inline std::vector<LayerRecord> peel_finite(std::span<const Point> points) {
  return peel_layers(points).layers;
}

struct StreamOptions {
  std::size_t buffer_cap = 10'000'000;
};

/// Convex layers of the infinite process, finalised one at a time.
///
/// A candidate hull over the generated prefix is final once the origin is
/// interior and its boundary distance κ strictly exceeds the norm of the
/// next ungenerated point: every later point then falls strictly inside.
/// The same test is re-applied after each layer is removed.
class StreamPeeler {
 public:
  explicit StreamPeeler(PointSeq& seq, StreamOptions options = {}) : seq_(seq), options_(options) {}

  [[nodiscard]] std::size_t consumed() const noexcept { return cursor_; }
  [[nodiscard]] std::size_t buffer_size() const noexcept { return buffer_.size() + pending_.size(); }

  LayerRecord next_layer() {
    merge_pending();
    rebuild_from_buffer();
    for (;;) {
      const ProcessPoint& next = seq_.at(cursor_);
      if (kappa_ && *kappa_ > next.norm) break;
      Entry e{next.pos, cursor_};
      ++cursor_;
      pending_.push_back(e);
      if (buffer_size() > options_.buffer_cap)
        throw Error(ErrorKind::BufferExplosion,
                    "active buffer exceeded " + std::to_string(options_.buffer_cap) + " points before layer " +
                        std::to_string(layers_done_ + 1) + " could be finalised");
      if (hull_.size() < 3) {
        merge_pending();
        rebuild_from_buffer();
      } else if (!strictly_inside(e.p)) {
        absorb(e);
      }
    }

    std::vector<Point> v;
    std::vector<std::size_t> ids;
    for (const Entry& e : hull_) {
      v.push_back(e.p);
      ids.push_back(e.j);
    }
    std::vector<std::size_t> sorted_ids = ids;
    std::sort(sorted_ids.begin(), sorted_ids.end());
    merge_pending();
    std::erase_if(buffer_, [&](const Entry& e) { return std::binary_search(sorted_ids.begin(), sorted_ids.end(), e.j); });
    ++layers_done_;
    return make_layer(layers_done_, ConvexPolygon(std::move(v)), std::move(ids), cursor_);
  }

 private:
  struct Entry {
    Point p;
    std::size_t j;
  };

  static bool entry_less(const Entry& a, const Entry& b) { return a.p < b.p; }

  void merge_pending() {
    if (pending_.empty()) return;
    std::sort(pending_.begin(), pending_.end(), entry_less);
    const auto mid = static_cast<std::ptrdiff_t>(buffer_.size());
    buffer_.insert(buffer_.end(), pending_.begin(), pending_.end());
    std::inplace_merge(buffer_.begin(), buffer_.begin() + mid, buffer_.end(), entry_less);
    pending_.clear();
  }

  void set_hull(std::vector<Entry> h) {
    hull_ = std::move(h);
    kappa_.reset();
    if (hull_.size() < 3) return;
    for (std::size_t i = 0; i < hull_.size(); ++i)
      if (orientation(hull_[i].p, hull_[(i + 1) % hull_.size()].p, Point{}) <= 0) return;
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < hull_.size(); ++i)
      m = std::min(m, segment_distance(Point{}, hull_[i].p, hull_[(i + 1) % hull_.size()].p));
    kappa_ = m;
  }

  void rebuild_from_buffer() {
    scratch_.clear();
    for (const Entry& e : buffer_) scratch_.push_back(e.p);
    const auto idx = hull_indices_presorted(scratch_);
    std::vector<Entry> h;
    for (std::size_t i : idx) h.push_back(buffer_[i]);
    set_hull(std::move(h));
  }

  bool strictly_inside(Point p) const {
    for (std::size_t i = 0; i < hull_.size(); ++i)
      if (orientation(hull_[i].p, hull_[(i + 1) % hull_.size()].p, p) <= 0) return false;
    return true;
  }

  // Interior points of the current hull stay interior, so the new hull is
  // the hull of the current vertices plus the new point.
  void absorb(const Entry& e) {
    std::vector<Entry> cand = hull_;
    cand.push_back(e);
    std::sort(cand.begin(), cand.end(), entry_less);
    scratch_.clear();
    for (const Entry& c : cand) scratch_.push_back(c.p);
    const auto idx = hull_indices_presorted(scratch_);
    std::vector<Entry> h;
    for (std::size_t i : idx) h.push_back(cand[i]);
    set_hull(std::move(h));
  }

  PointSeq& seq_;
  StreamOptions options_;
  std::vector<Entry> buffer_;   // sorted lexicographically by point
  std::vector<Entry> pending_;  // generated since the last merge, unsorted
  std::vector<Entry> hull_;
  std::vector<Point> scratch_;
  std::optional<double> kappa_;
  std::size_t cursor_ = 0;
  std::size_t layers_done_ = 0;
};

/// First `k_max` layers of the infinite process behind `seq`.
inline std::vector<LayerRecord> peel_stream(PointSeq& seq, std::size_t k_max, StreamOptions options = {}) {
  if (k_max == 0) throw Error(ErrorKind::InvalidArgument, "k_max must be positive");
  if (!seq.config().measure.is_non_unilateral())
    throw Error(ErrorKind::InvalidArgument, "streaming peeling needs a non-unilateral measure");
  StreamPeeler peeler(seq, options);
  std::vector<LayerRecord> out;
  out.reserve(k_max);
  for (std::size_t k = 0; k < k_max; ++k) out.push_back(peeler.next_layer());
  return out;
}

// ---------------------------------------------------------------------------
// Structural properties of peeling on finite sets.

namespace detail {

inline std::vector<std::size_t> sorted_set_index(std::span<const Point> sub, std::span<const Point> super) {
  std::vector<Point> s(super.begin(), super.end());
  std::sort(s.begin(), s.end());
  std::vector<std::size_t> idx;
  for (Point p : sub) {
    auto it = std::lower_bound(s.begin(), s.end(), p);
    if (it == s.end() || !(*it == p)) throw Error(ErrorKind::NotASubset, "point set is not a subset");
    idx.push_back(static_cast<std::size_t>(it - s.begin()));
  }
  return idx;
}

// layer_k(a) ⊆ layer_k(b) for all k with a layer in `a`.
inline bool layers_nested(const std::vector<LayerRecord>& inner, std::size_t inner_offset,
                          const std::vector<LayerRecord>& outer) {
  for (std::size_t k = inner_offset; k < inner.size(); ++k) {
    const std::size_t ko = k - inner_offset;
    if (ko >= outer.size()) return false;
    if (!contains(outer[ko].polygon, inner[k].polygon)) return false;
  }
  return true;
}

}  // namespace detail

/// C_k(small) ⊆ C_k(large) for every k where small has a layer.
inline bool check_monotonicity(std::span<const Point> small, std::span<const Point> large) {
  detail::sorted_set_index(small, large);
  return detail::layers_nested(peel_finite(small), 0, peel_finite(large));
}

/// C_{k+m}(S) ⊆ C_k(S \ removed) ⊆ C_k(S), m = |removed|.
inline bool check_sandwich(std::span<const Point> set, std::span<const Point> removed) {
  detail::sorted_set_index(removed, set);
  std::vector<Point> sorted_removed(removed.begin(), removed.end());
  std::sort(sorted_removed.begin(), sorted_removed.end());
  if (std::adjacent_find(sorted_removed.begin(), sorted_removed.end()) != sorted_removed.end())
    throw Error(ErrorKind::InvalidArgument, "removed points must be distinct");
  std::vector<Point> reduced;
  for (Point p : set)
    if (!std::binary_search(sorted_removed.begin(), sorted_removed.end(), p)) reduced.push_back(p);

  const auto full = peel_finite(set);
  const auto part = peel_finite(reduced);
  return detail::layers_nested(full, removed.size(), part) && detail::layers_nested(part, 0, full);
}

/// n i.i.d. points with Pareto(α) norms (P(|ξ|>r) = r^{-α}, r ≥ 1) and
/// directions from `measure`, divided by n^{1/α}.  Qualitative companion
/// to the exact process sampler.
inline std::vector<Point> sample_binomial_comparison(double alpha, std::size_t n, const SpectralMeasure& measure,
                                                    RngStream& rng, std::vector<double>* raw_norms = nullptr) {
  if (!(alpha >= min_alpha && alpha <= max_alpha)) throw Error(ErrorKind::InvalidArgument, "alpha outside [0.3, 3.0]");
  if (n < 10) throw Error(ErrorKind::InvalidArgument, "binomial comparison needs n >= 10");
  const double bn = std::pow(static_cast<double>(n), 1.0 / alpha);
  std::vector<Point> out;
  out.reserve(n);
  if (raw_norms) raw_norms->clear();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::exp(rng.exponential() / alpha);  // U^{-1/α}
    const UnitVector e = measure.sample_direction(rng);
    if (raw_norms) raw_norms->push_back(r);
    out.push_back({r / bn * e.x, r / bn * e.y});
  }
  return out;
}

}  // namespace hullpeel
