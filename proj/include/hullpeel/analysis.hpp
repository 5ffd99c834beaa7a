#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "hullpeel/error.hpp"
#include "hullpeel/geom.hpp"
#include "hullpeel/parallel.hpp"
#include "hullpeel/peel.hpp"
#include "hullpeel/ppp.hpp"
#include "hullpeel/spectral.hpp"
#include "hullpeel/stats.hpp"

namespace hullpeel {

/// Layers below this index are excluded from slope fits.
inline constexpr std::size_t default_burn_in = 20;

// ---------------------------------------------------------------------------
// Atomic measures: deterministic limit polytope and convergence towards it.

struct LimitPolytope {
  ConvexPolygon polygon;
  bool is_extreme_input;
  std::vector<Point> scaled_atoms;  ///< ν_i^{1/α} e_i, in atom order
};

inline LimitPolytope limit_polytope(const SpectralMeasure& measure, double alpha) {
  if (!measure.is_atomic()) throw Error(ErrorKind::NotAtomic, "limit polytope needs an atomic measure");
  if (!measure.is_non_unilateral()) throw Error(ErrorKind::InvalidArgument, "limit polytope needs a non-unilateral measure");
  std::vector<Point> a;
  for (std::size_t i = 0; i < measure.size(); ++i) {
    const double t = std::pow(measure.weights()[i], 1.0 / alpha);
    a.push_back({t * measure.directions()[i].x, t * measure.directions()[i].y});
  }
  const auto idx = hull_indices(a);
  std::vector<Point> v;
  for (std::size_t i : idx) v.push_back(a[i]);
  const bool extreme = idx.size() == a.size();
  return LimitPolytope{ConvexPolygon(std::move(v)), extreme, std::move(a)};
}

enum class Sampler { Series, PerRay };

inline PointSeq make_sequence(const ProcessConfig& config, std::uint64_t stream, Sampler sampler) {
  return sampler == Sampler::PerRay ? PointSeq::per_ray(config, stream) : PointSeq(config, stream);
}

struct LimitRow {
  std::size_t k;
  double hausdorff;        ///< d_H(k^{1/α} C_k, C_∞)
  double perimeter_ratio;  ///< k^{1/α} L(C_k) / L(C_∞)
  double area_ratio;       ///< k^{2/α} A(C_k) / A(C_∞)
  std::size_t n_vertices;
  double rho;
};

inline std::vector<LimitRow> limit_rows(const std::vector<LayerRecord>& layers, const LimitPolytope& limit,
                                        double alpha) {
  const double l_inf = perimeter(limit.polygon);
  const double a_inf = area(limit.polygon);
  std::vector<LimitRow> rows;
  rows.reserve(layers.size());
  for (const LayerRecord& layer : layers) {
    const double s = std::pow(static_cast<double>(layer.k), 1.0 / alpha);
    rows.push_back({layer.k, hausdorff(scale(layer.polygon, s), limit.polygon), s * layer.perimeter / l_inf,
                    s * s * layer.area / a_inf, layer.n_vertices, layer.rho});
  }
  return rows;
}

inline std::vector<LimitRow> limit_trajectory(const ProcessConfig& config, std::size_t k_max, std::uint64_t stream,
                                              Sampler sampler = Sampler::Series,
                                              std::vector<LayerRecord>* layers_out = nullptr) {
  const LimitPolytope limit = limit_polytope(config.measure, config.alpha);
  PointSeq seq = make_sequence(config, stream, sampler);
  auto layers = peel_stream(seq, k_max);
  auto rows = limit_rows(layers, limit, config.alpha);
  if (layers_out) *layers_out = std::move(layers);
  return rows;
}

/// OLS of ln y against ln k for k in [k_min, k_max].
template <class Proj>
stats::LineFit loglog_fit(std::span<const LimitRow> rows, std::size_t k_min, std::size_t k_max, Proj proj) {
  std::vector<double> x, y;
  for (const LimitRow& r : rows) {
    if (r.k < k_min || r.k > k_max) continue;
    const double v = proj(r);
    if (!(v > 0.0)) continue;
    x.push_back(std::log(static_cast<double>(r.k)));
    y.push_back(std::log(v));
  }
  return stats::ols(x, y);
}

struct RateCheck {
  std::vector<LimitRow> rows;
  stats::LineFit tail_fit;  ///< ln d_H vs ln k over [burn_in, k_max]
  bool is_extreme;
  bool converging;          ///< late windowed median of d_H below the early one
};

/// Median over each consecutive block of `window` values.
inline std::vector<double> windowed_medians(std::span<const double> values, std::size_t window) {
  std::vector<double> out;
  for (std::size_t i = 0; i + window <= values.size(); i += window)
    out.push_back(stats::median(std::vector<double>(values.begin() + static_cast<std::ptrdiff_t>(i),
                                                    values.begin() + static_cast<std::ptrdiff_t>(i + window))));
  return out;
}

inline RateCheck rate_from_rows(std::vector<LimitRow> rows, bool is_extreme, std::size_t burn_in = default_burn_in) {
  const std::size_t k_max = rows.empty() ? 0 : rows.back().k;
  if (k_max < burn_in + 2)
    throw Error(ErrorKind::InsufficientLayers, "rate check needs more layers than the burn-in");
  RateCheck rc{std::move(rows), {}, is_extreme, false};
  rc.tail_fit = loglog_fit(rc.rows, burn_in, k_max, [](const LimitRow& r) { return r.hausdorff; });
  std::vector<double> tail;
  for (const LimitRow& r : rc.rows)
    if (r.k >= burn_in) tail.push_back(r.hausdorff);
  const std::size_t window = std::max<std::size_t>(1, tail.size() / 10);
  const auto med = windowed_medians(tail, window);
  rc.converging = med.size() >= 2 && med.back() < med.front();
  return rc;
}

inline RateCheck rate_check(const ProcessConfig& config, std::size_t k_max, std::uint64_t stream = 0,
                            std::size_t burn_in = default_burn_in, Sampler sampler = Sampler::Series) {
  const bool extreme = limit_polytope(config.measure, config.alpha).is_extreme_input;
  return rate_from_rows(limit_trajectory(config, k_max, stream, sampler), extreme, burn_in);
}

struct FunctionalScaling {
  std::size_t k;
  double perimeter_rel_err;  ///< |k^{1/α} L(C_k)/L(C_∞) - 1|
  double area_rel_err;       ///< |k^{2/α} A(C_k)/A(C_∞) - 1|
};

inline FunctionalScaling functional_scaling_from(std::span<const LimitRow> rows) {
  if (rows.empty()) throw Error(ErrorKind::InsufficientLayers, "no layers");
  const LimitRow& r = rows.back();
  return {r.k, std::abs(r.perimeter_ratio - 1.0), std::abs(r.area_ratio - 1.0)};
}

inline FunctionalScaling functional_scaling_check(const ProcessConfig& config, std::size_t k_max,
                                                  std::uint64_t stream = 0) {
  return functional_scaling_from(limit_trajectory(config, k_max, stream));
}

// ---------------------------------------------------------------------------
// Deleted points and the radius of the k-th layer.

struct DeletedPointsCheck {
  stats::LineFit cumulative_fit;  ///< ln Σ_{j≤k} N(C_j) vs ln k
  stats::LineFit rho_fit;         ///< ln ρ_k vs ln k
  double expected_cumulative_slope;
  double expected_rho_slope;
  std::vector<std::size_t> cumulative;
};

inline DeletedPointsCheck deleted_points_check(std::span<const LayerRecord> layers, double alpha,
                                               std::size_t burn_in = default_burn_in) {
  std::vector<double> x, yc, yr;
  std::vector<std::size_t> cum;
  std::size_t total = 0;
  for (const LayerRecord& l : layers) {
    total += l.n_vertices;
    cum.push_back(total);
    if (l.k < burn_in) continue;
    x.push_back(std::log(static_cast<double>(l.k)));
    yc.push_back(std::log(static_cast<double>(total)));
    yr.push_back(std::log(l.rho));
  }
  return {stats::ols(x, yc), stats::ols(x, yr), 1.5, -1.5 / alpha, std::move(cum)};
}

// ---------------------------------------------------------------------------
// Scaling exponents of perimeter, area and vertex count.

struct KRange {
  std::size_t k_min = default_burn_in;
  std::size_t k_max = 500;
};

struct ReplicationExponents {
  double gamma_l, gamma_a, gamma_n;
  double se_l, se_a, se_n;  ///< OLS slope standard errors within the replication
};

struct ExponentEstimate {
  double alpha;
  double gamma_l, gamma_a, gamma_n;
  double stderr_l, stderr_a, stderr_n;
  KRange k_range;
  std::size_t replications;
  std::vector<ReplicationExponents> per_replication;
};

inline ReplicationExponents fit_exponents(std::span<const LayerRecord> layers, KRange range) {
  std::vector<double> x, yl, ya, yn;
  for (const LayerRecord& l : layers) {
    if (l.k < range.k_min || l.k > range.k_max) continue;
    x.push_back(std::log(static_cast<double>(l.k)));
    yl.push_back(std::log(l.perimeter));
    ya.push_back(std::log(l.area));
    yn.push_back(std::log(static_cast<double>(l.n_vertices)));
  }
  const auto fl = stats::ols(x, yl), fa = stats::ols(x, ya), fn = stats::ols(x, yn);
  return {-fl.slope, -fa.slope, fn.slope, fl.slope_stderr, fa.slope_stderr, fn.slope_stderr};
}

/// Mean of per-replication log-log slopes; replication r uses stream r.
inline ExponentEstimate estimate_exponents(double alpha, const SpectralMeasure& measure, KRange range,
                                           std::size_t replications, std::uint64_t seed, unsigned threads = 1,
                                           StreamOptions options = {}) {
  if (replications == 0) throw Error(ErrorKind::InvalidArgument, "replications must be >= 1");
  if (range.k_min < 1 || range.k_max < range.k_min + 2)
    throw Error(ErrorKind::InvalidArgument, "k range must span at least 3 layers");
  const ProcessConfig config = ProcessConfig::make(alpha, measure, seed);
  auto per = replicate(replications, threads, [&](std::size_t r) {
    PointSeq seq(config, r);
    const auto layers = peel_stream(seq, range.k_max, options);
    if (layers.size() < range.k_max) throw Error(ErrorKind::InsufficientLayers, "peeling ended early");
    return fit_exponents(layers, range);
  });

  ExponentEstimate est{alpha, 0, 0, 0, 0, 0, 0, range, replications, std::move(per)};
  std::vector<double> gl, ga, gn;
  for (const auto& p : est.per_replication) {
    gl.push_back(p.gamma_l);
    ga.push_back(p.gamma_a);
    gn.push_back(p.gamma_n);
  }
  est.gamma_l = stats::mean(gl);
  est.gamma_a = stats::mean(ga);
  est.gamma_n = stats::mean(gn);
  if (replications > 1) {
    est.stderr_l = stats::standard_error(gl);
    est.stderr_a = stats::standard_error(ga);
    est.stderr_n = stats::standard_error(gn);
  } else {
    const auto& p = est.per_replication.front();
    est.stderr_l = p.se_l;
    est.stderr_a = p.se_a;
    est.stderr_n = p.se_n;
  }
  return est;
}

struct PowerLawFit {
  double slope;       ///< d ln γ̂ / d ln α
  double intercept;
  double multiplier;  ///< exp(intercept), the γ̂ value at α = 1
};

struct AlphaRegression {
  PowerLawFit perimeter, area, vertices;
};

/// ln γ̂ against ln α for each functional.
inline AlphaRegression exponent_alpha_regression(std::span<const ExponentEstimate> estimates) {
  std::vector<double> alphas;
  for (const auto& e : estimates) alphas.push_back(e.alpha);
  std::sort(alphas.begin(), alphas.end());
  if (std::unique(alphas.begin(), alphas.end()) - alphas.begin() < 3)
    throw Error(ErrorKind::DegenerateRegression, "need at least 3 distinct alpha values");
  std::vector<double> x, yl, ya, yn;
  for (const auto& e : estimates) {
    if (!(e.gamma_l > 0 && e.gamma_a > 0 && e.gamma_n > 0))
      throw Error(ErrorKind::DegenerateRegression, "exponent estimates must be positive to take logs");
    x.push_back(std::log(e.alpha));
    yl.push_back(std::log(e.gamma_l));
    ya.push_back(std::log(e.gamma_a));
    yn.push_back(std::log(e.gamma_n));
  }
  auto fit = [&](const std::vector<double>& y) {
    const auto f = stats::ols(x, y);
    return PowerLawFit{f.slope, f.intercept, std::exp(f.intercept)};
  };
  return {fit(yl), fit(ya), fit(yn)};
}

// ---------------------------------------------------------------------------
// Uniform measure: normalised layers against the unit disc.

inline constexpr std::size_t disc_polygon_vertices = 4096;

/// Hausdorff gap between the reference polygon and the true unit disc.
inline double disc_polygon_gap() {
  return 1.0 - std::cos(std::numbers::pi / static_cast<double>(disc_polygon_vertices));
}

inline const ConvexPolygon& unit_disc_polygon() {
  static const ConvexPolygon disc = regular_polygon(disc_polygon_vertices);
  return disc;
}

/// d_H(ρ_k^{-1} C_k, disc).
inline double normalized_disc_distance(const LayerRecord& layer) {
  return hausdorff(scale(layer.polygon, 1.0 / layer.rho), unit_disc_polygon());
}

struct ShapeRow {
  std::size_t k;
  double median;
  std::vector<double> values;  ///< one per replication
};

inline std::vector<ShapeRow> uniform_shape_check(double alpha, std::span<const std::size_t> k_list,
                                                 std::size_t replications, std::uint64_t seed,
                                                 unsigned threads = 1) {
  if (k_list.empty() || replications == 0) throw Error(ErrorKind::InvalidArgument, "empty k list or no replications");
  const ProcessConfig config = ProcessConfig::make(alpha, SpectralMeasure::uniform(), seed);
  const std::size_t k_max = *std::max_element(k_list.begin(), k_list.end());
  auto per = replicate(replications, threads, [&](std::size_t r) {
    PointSeq seq(config, r);
    const auto layers = peel_stream(seq, k_max);
    std::vector<double> d;
    for (std::size_t k : k_list) d.push_back(normalized_disc_distance(layers.at(k - 1)));
    return d;
  });
  std::vector<ShapeRow> rows;
  for (std::size_t i = 0; i < k_list.size(); ++i) {
    ShapeRow row{k_list[i], 0.0, {}};
    for (const auto& d : per) row.values.push_back(d[i]);
    row.median = stats::median(row.values);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace hullpeel
