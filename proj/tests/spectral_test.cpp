#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "hullpeel/spectral.hpp"

using namespace hullpeel;
using std::numbers::pi;

TEST(SpectralMeasure, NonUnilateralExamples) {
  EXPECT_TRUE(SpectralMeasure::atomic({{0.0, 1.0 / 3}, {2 * pi / 3, 1.0 / 3}, {4 * pi / 3, 1.0 / 3}}).is_non_unilateral());
  EXPECT_FALSE(SpectralMeasure::atomic({{0.0, 0.2}, {pi / 4, 0.3}, {pi / 2, 0.5}}).is_non_unilateral());
  EXPECT_TRUE(SpectralMeasure::uniform().is_non_unilateral());
}

TEST(SpectralMeasure, GapOfExactlyPiIsRejected) {
  EXPECT_FALSE(SpectralMeasure::atomic({{0.0, 0.25}, {pi / 2, 0.5}, {pi, 0.25}}).is_non_unilateral());
  EXPECT_FALSE(SpectralMeasure::atomic({{0.0, 0.5}, {pi, 0.5}}).is_non_unilateral());
  EXPECT_TRUE(SpectralMeasure::atomic({{0.0, 0.25}, {pi / 2, 0.25}, {pi, 0.25}, {3 * pi / 2, 0.25}}).is_non_unilateral());
}

TEST(SpectralMeasure, ConstructionValidation) {
  EXPECT_THROW(SpectralMeasure::atomic({{0.0, 0.5}, {1.0, -0.5}, {2.0, 1.0}}), Error);
  EXPECT_THROW(SpectralMeasure::atomic({{0.0, 0.5}, {1.0, 0.4}}), Error);
  EXPECT_THROW(SpectralMeasure::atomic({{0.0, 0.5}, {2 * pi, 0.5}}), Error);  // same direction
  EXPECT_THROW(SpectralMeasure::atomic(std::vector<Atom>{}), Error);

  const auto m = SpectralMeasure::atomic({{0.0, 0.5 + 5e-10}, {2.0, 0.25}, {4.0, 0.25}});
  double sum = 0.0;
  for (double w : m.weights()) sum += w;
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(SpectralMeasure, DirectionsAreUnitVectors) {
  const auto m = SpectralMeasure::regular(7, 0.3);
  for (const auto& d : m.directions()) {
    EXPECT_NEAR(std::hypot(d.x, d.y), 1.0, 1e-12);
    EXPECT_GE(d.angle, 0.0);
    EXPECT_LT(d.angle, 2 * pi);
  }
}

TEST(SpectralMeasure, RotationDoesNotChangeNonUnilaterality) {
  RngStream rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t l = 3 + static_cast<std::size_t>(rng.uniform() * 6);
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < l; ++i) atoms.push_back({2 * pi * rng.uniform(), 1.0 / static_cast<double>(l)});
    std::vector<double> a;
    for (auto& x : atoms) a.push_back(x.angle);
    std::sort(a.begin(), a.end());
    double gap = a.front() + 2 * pi - a.back();
    bool close = false;
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
      gap = std::max(gap, a[i + 1] - a[i]);
      close = close || a[i + 1] - a[i] < 1e-6;
    }
    if (close || std::abs(gap - pi) < 1e-6) continue;  // boundary cases are float-sensitive
    const auto m = SpectralMeasure::atomic(atoms);
    const double theta = 2 * pi * rng.uniform();
    EXPECT_EQ(m.is_non_unilateral(), m.rotated(theta).is_non_unilateral());
    EXPECT_EQ(m.is_non_unilateral(), gap < pi);
    ++checked;
  }
  EXPECT_GT(checked, 1900);
}

TEST(SampleDirection, SingleAtomAlwaysReturnsIt) {
  const auto m = SpectralMeasure::atomic({{1.25, 1.0}});
  RngStream rng(5);
  for (int i = 0; i < 1000; ++i) EXPECT_DOUBLE_EQ(m.sample_direction(rng).angle, 1.25);
}

TEST(SampleDirection, TwoOppositeAtomsHalfAndHalf) {
  const auto m = SpectralMeasure::atomic({{0.0, 0.5}, {pi, 0.5}});
  RngStream rng(11);
  const int n = 100000;
  int zero = 0;
  for (int i = 0; i < n; ++i) zero += m.sample_direction(rng).angle == 0.0 ? 1 : 0;
  EXPECT_NEAR(static_cast<double>(zero) / n, 0.5, 0.01);
}

TEST(SampleDirection, UniformMeanCosineIsZero) {
  const auto m = SpectralMeasure::uniform();
  RngStream rng(12);
  const int n = 100000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += m.sample_direction(rng).x;
  EXPECT_NEAR(s / n, 0.0, 0.01);
}

TEST(SampleDirection, FrequenciesMatchWeightsWithinFourSigma) {
  const auto m = SpectralMeasure::atomic({{0.1, 0.1}, {1.9, 0.2}, {3.3, 0.3}, {4.8, 0.4}});
  const int n = 100000;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    RngStream rng(seed);
    std::vector<int> counts(m.size(), 0);
    for (int i = 0; i < n; ++i) {
      std::size_t idx = 0;
      m.sample_direction(rng, &idx);
      ++counts[idx];
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double p = m.weights()[i];
      EXPECT_LE(std::abs(counts[i] / static_cast<double>(n) - p), 4 * std::sqrt(p * (1 - p) / n)) << "atom " << i;
    }
  }
}
