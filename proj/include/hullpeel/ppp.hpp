#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hullpeel/error.hpp"
#include "hullpeel/geom.hpp"
#include "hullpeel/rng.hpp"
#include "hullpeel/spectral.hpp"

namespace hullpeel {

inline constexpr double min_alpha = 0.3;
inline constexpr double max_alpha = 3.0;
inline constexpr double max_norm_allowed = 1e300;

/// One Poisson process with intensity α r^{-α-1} dr × ν(de).
struct ProcessConfig {
  double alpha;
  SpectralMeasure measure;
  std::uint64_t seed;

  static ProcessConfig make(double alpha, SpectralMeasure measure, std::uint64_t seed) {
    if (!(alpha >= min_alpha && alpha <= max_alpha))
      throw Error(ErrorKind::InvalidArgument,
                  "alpha=" + std::to_string(alpha) + " outside [0.3, 3.0]");
    if (!measure.is_non_unilateral())
      throw Error(ErrorKind::InvalidArgument, "spectral measure is unilateral (cone does not cover the plane)");
    return ProcessConfig{alpha, std::move(measure), seed};
  }
};

struct ProcessPoint {
  double gamma;     ///< Γ_j, so that norm = Γ_j^{-1/α}
  double norm;
  UnitVector direction;
  Point pos;
  std::size_t ray;  ///< atom index for atomic measures, 0 for uniform
};

/// Γ_1 < ... < Γ_n, partial sums of standard exponentials.
inline std::vector<double> sample_gamma_sums(std::size_t n, RngStream& rng) {
  std::vector<double> out;
  out.reserve(n);
  double g = 0.0;
  for (std::size_t i = 0; i < n; ++i) out.push_back(g += rng.exponential());
  return out;
}

/// exp(-ln(Γ)/α), the norm for a gamma sum.
inline double norm_from_gamma(double gamma, double alpha) { return std::exp(-std::log(gamma) / alpha); }

/// Points of the process in strictly decreasing norm order, generated on
/// demand.  Two generation schemes share the type:
///  - Series: x_j = Γ_j^{-1/α} ε_j with ε_j ~ ν (any measure).
///  - PerRay: one independent gamma-sum stream per atom, merged by norm.
/// Both depend only on (config.seed, stream) and the cursor position.
class PointSeq {
 public:
  enum class Mode { Series, PerRay };

  explicit PointSeq(ProcessConfig config, std::uint64_t stream = 0)
      : config_(std::move(config)), mode_(Mode::Series), rng_(config_.seed, {stream}) {}

  static PointSeq per_ray(ProcessConfig config, std::uint64_t stream = 0) {
    if (!config.measure.is_atomic()) throw Error(ErrorKind::NotAtomic, "per-ray sampling needs an atomic measure");
    PointSeq seq(std::move(config), stream);
    seq.mode_ = Mode::PerRay;
    const std::size_t l = seq.config_.measure.size();
    for (std::size_t i = 0; i < l; ++i) {
      seq.rays_.push_back(RayState{RngStream(seq.config_.seed, {stream, i + 1}), 0.0,
                                   std::log(seq.config_.measure.weights()[i]), 0.0, 0});
      seq.advance_ray(i);
    }
    return seq;
  }

  [[nodiscard]] const ProcessConfig& config() const noexcept { return config_; }
  [[nodiscard]] Mode mode() const noexcept { return mode_; }
  [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
  [[nodiscard]] std::span<const ProcessPoint> points() const noexcept { return points_; }
  [[nodiscard]] const ProcessPoint& operator[](std::size_t j) const { return points_[j]; }

  /// Point j (0-based), generating as far as needed.
  const ProcessPoint& at(std::size_t j) {
    if (j >= points_.size()) extend(j + 1 - points_.size());
    return points_[j];
  }

  /// Points emitted so far on a given ray (PerRay mode).
  [[nodiscard]] std::size_t ray_count(std::size_t ray) const { return rays_.at(ray).emitted; }

  void extend(std::size_t count) {
    if (count > 1) points_.reserve(points_.size() + count);
    for (std::size_t c = 0; c < count; ++c) mode_ == Mode::Series ? push_series() : push_per_ray();
  }

 private:
  struct RayState {
    RngStream rng;
    double gamma;      // current Γ on this ray
    double log_weight;
    double next_norm;  // norm of the ray's next unemitted point
    std::size_t emitted;
  };

  void check_norm(double r) const {
    if (!(r <= max_norm_allowed))
      throw Error(ErrorKind::OverflowRisk, "point norm exceeds 1e300 (gamma sum too small for this alpha)");
  }

  void push_series() {
    gamma_ += rng_.exponential();
    std::size_t ray = 0;
    const UnitVector e = config_.measure.sample_direction(rng_, &ray);
    const double r = norm_from_gamma(gamma_, config_.alpha);
    check_norm(r);
    points_.push_back({gamma_, r, e, {r * e.x, r * e.y}, ray});
  }

  void advance_ray(std::size_t i) {
    RayState& s = rays_[i];
    s.gamma += s.rng.exponential();
    s.next_norm = std::exp(-(std::log(s.gamma) - s.log_weight) / config_.alpha);
  }

  void push_per_ray() {
    // Largest pending norm wins; ties go to the smaller ray index.
    std::size_t best = 0;
    for (std::size_t i = 1; i < rays_.size(); ++i)
      if (rays_[i].next_norm > rays_[best].next_norm) best = i;
    RayState& s = rays_[best];
    const double r = s.next_norm;
    check_norm(r);
    const UnitVector e = config_.measure.directions()[best];
    points_.push_back({s.gamma / std::exp(s.log_weight), r, e, {r * e.x, r * e.y}, best});
    ++s.emitted;
    advance_ray(best);
  }

  ProcessConfig config_;
  Mode mode_;
  RngStream rng_;
  double gamma_ = 0.0;
  std::vector<RayState> rays_;
  std::vector<ProcessPoint> points_;
};

/// Appends `count` points (free-function form of PointSeq::extend).
inline PointSeq& extend(PointSeq& seq, std::size_t count) {
  seq.extend(count);
  return seq;
}

/// Per-ray realisation, extended until every ray has produced at least
/// `n_per_ray` points.  The result is always a norm-ordered prefix of the
/// process, so some rays carry more than `n_per_ray` points.
inline PointSeq sample_per_ray(const ProcessConfig& config, std::size_t n_per_ray, std::uint64_t stream = 0) {
  PointSeq seq = PointSeq::per_ray(config, stream);
  const std::size_t l = config.measure.size();
  for (;;) {
    bool done = true;
    for (std::size_t i = 0; i < l; ++i) done = done && seq.ray_count(i) >= n_per_ray;
    if (done) break;
    seq.extend(1);
  }
  return seq;
}

}  // namespace hullpeel
