#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "hullpeel/error.hpp"
#include "hullpeel/rng.hpp"

namespace hullpeel {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Wraps an angle into [0, 2π).
inline double wrap_angle(double angle) {
  double a = std::fmod(angle, two_pi);
  if (a < 0.0) a += two_pi;
  if (a >= two_pi) a = 0.0;
  return a;
}

struct UnitVector {
  double angle = 0.0;
  double x = 1.0;
  double y = 0.0;

  static UnitVector from_angle(double radians) {
    const double a = wrap_angle(radians);
    return {a, std::cos(a), std::sin(a)};
  }
};

struct Atom {
  double angle;
  double weight;
};

/// Distribution of directions on the unit circle: either finitely many atoms
/// or the uniform law.  Immutable once built.
class SpectralMeasure {
 public:
  static constexpr double weight_sum_tolerance = 1e-9;
  static constexpr double min_separation = 1e-9;

  static SpectralMeasure uniform() { return SpectralMeasure{}; }

  /// Validates and builds an atomic measure.  Weights summing to 1 within
  /// 1e-9 are renormalized (left as given when the sum is off by rounding
  /// only); anything else is rejected.
  static SpectralMeasure atomic(std::span<const Atom> atoms) {
    if (atoms.empty()) throw Error(ErrorKind::InvalidArgument, "atomic measure needs at least one atom");
    double sum = 0.0;
    for (const Atom& a : atoms) {
      if (!std::isfinite(a.angle)) throw Error(ErrorKind::InvalidArgument, "atom angle must be finite");
      if (!std::isfinite(a.weight) || a.weight <= 0.0)
        throw Error(ErrorKind::InvalidArgument, "atom weights must be strictly positive");
      sum += a.weight;
    }
    if (std::abs(sum - 1.0) > weight_sum_tolerance)
      throw Error(ErrorKind::InvalidArgument,
                  "atom weights sum to " + std::to_string(sum) + ", expected 1");

    SpectralMeasure m;
    m.atomic_ = true;
    m.directions_.reserve(atoms.size());
    m.weights_.reserve(atoms.size());
    if (std::abs(sum - 1.0) <= 64 * std::numeric_limits<double>::epsilon()) sum = 1.0;
    for (const Atom& a : atoms) {
      m.directions_.push_back(UnitVector::from_angle(a.angle));
      m.weights_.push_back(a.weight / sum);
    }
    const auto sorted = m.sorted_angles();
    for (std::size_t i = 0; i < sorted.size() && sorted.size() > 1; ++i) {
      const double next = i + 1 < sorted.size() ? sorted[i + 1] : sorted[0] + two_pi;
      if (next - sorted[i] <= min_separation)
        throw Error(ErrorKind::InvalidArgument, "atom directions must be pairwise distinct");
    }
    double acc = 0.0;
    for (double w : m.weights_) m.cumulative_.push_back(acc += w);
    return m;
  }

  static SpectralMeasure atomic(std::initializer_list<Atom> atoms) {
    return atomic(std::span<const Atom>(atoms.begin(), atoms.size()));
  }

  /// l atoms at angles offset + 2πi/l with weight 1/l each.
  static SpectralMeasure regular(std::size_t l, double offset = 0.0) {
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < l; ++i)
      atoms.push_back({offset + two_pi * static_cast<double>(i) / static_cast<double>(l),
                       1.0 / static_cast<double>(l)});
    return atomic(atoms);
  }

  [[nodiscard]] bool is_atomic() const noexcept { return atomic_; }
  [[nodiscard]] std::size_t size() const noexcept { return directions_.size(); }
  [[nodiscard]] std::span<const UnitVector> directions() const noexcept { return directions_; }
  [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }

  /// True iff the support generates the whole plane as a cone: for atoms,
  /// the largest cyclic gap between directions is strictly below π.
  [[nodiscard]] bool is_non_unilateral() const {
    if (!atomic_) return true;
    if (directions_.size() < 3) return false;
    const auto sorted = sorted_angles();
    double max_gap = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      const double next = i + 1 < sorted.size() ? sorted[i + 1] : sorted[0] + two_pi;
      max_gap = std::max(max_gap, next - sorted[i]);
    }
    return max_gap < std::numbers::pi;
  }

  /// Draws a direction; also reports the atom index (or size() for uniform).
  UnitVector sample_direction(RngStream& rng, std::size_t* atom_index = nullptr) const {
    if (!atomic_) {
      if (atom_index) *atom_index = 0;
      return UnitVector::from_angle(two_pi * rng.uniform());
    }
    const double u = rng.uniform();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    std::size_t i = static_cast<std::size_t>(it - cumulative_.begin());
    if (i >= directions_.size()) i = directions_.size() - 1;
    if (atom_index) *atom_index = i;
    return directions_[i];
  }

  /// Same weights, every direction rotated by `radians`.
  [[nodiscard]] SpectralMeasure rotated(double radians) const {
    if (!atomic_) return *this;
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < size(); ++i) atoms.push_back({directions_[i].angle + radians, weights_[i]});
    return atomic(atoms);
  }

  [[nodiscard]] std::string describe() const {
    if (!atomic_) return "uniform";
    return "atomic(" + std::to_string(size()) + ")";
  }

 private:
  SpectralMeasure() = default;

  [[nodiscard]] std::vector<double> sorted_angles() const {
    std::vector<double> a;
    for (const auto& d : directions_) a.push_back(d.angle);
    std::sort(a.begin(), a.end());
    return a;
  }

  bool atomic_ = false;
  std::vector<UnitVector> directions_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
};

}  // namespace hullpeel
