#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <gtest/gtest.h>

#include "hullpeel/ppp.hpp"
#include "hullpeel/stats.hpp"

using namespace hullpeel;
using std::numbers::pi;

namespace {

ProcessConfig uniform_config(double alpha, std::uint64_t seed = 7) {
  return ProcessConfig::make(alpha, SpectralMeasure::uniform(), seed);
}

/// Pearson statistic of counts against Poisson(mean), last bin pooled.
/// Returns {statistic, 99% critical value}.
std::pair<double, double> poisson_chi_square(const std::vector<std::size_t>& counts, double mean) {
  const std::size_t bins = 6;
  std::vector<double> observed(bins, 0.0);
  for (std::size_t c : counts) observed[std::min(c, bins - 1)] += 1.0;
  boost::math::poisson_distribution<> pois(mean);
  const double n = static_cast<double>(counts.size());
  double chi = 0.0, tail = 1.0;
  for (std::size_t b = 0; b < bins; ++b) {
    const double p = b + 1 < bins ? boost::math::pdf(pois, static_cast<double>(b)) : tail;
    tail -= p;
    const double e = n * p;
    chi += (observed[b] - e) * (observed[b] - e) / e;
  }
  boost::math::chi_squared_distribution<> chi2(static_cast<double>(bins - 1));
  return {chi, boost::math::quantile(chi2, 0.99)};
}

}  // namespace

TEST(GammaSums, StrictlyIncreasingAndMeanOne) {
  RngStream rng(3);
  const auto g = sample_gamma_sums(1000, rng);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_GT(g[i] - g[i - 1], 0.0);

  double s = 0.0;
  const int reps = 100000;
  for (int r = 0; r < reps; ++r) s += sample_gamma_sums(1, rng).front();
  EXPECT_NEAR(s / reps, 1.0, 0.02);
}

TEST(GammaSums, IteratedLogarithmEnvelopeDiagnostic) {
  const std::size_t n = 10000;
  const double bound = 2.0 * std::sqrt(std::log(std::log(static_cast<double>(n))) / static_cast<double>(n));
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RngStream rng(seed);
    const auto g = sample_gamma_sums(n, rng);
    inside += std::abs(g.back() / static_cast<double>(n) - 1.0) < bound ? 1 : 0;
  }
  EXPECT_GE(inside, 45);
}

TEST(ProcessConfig, Validation) {
  EXPECT_THROW(uniform_config(5.0), Error);
  EXPECT_THROW(uniform_config(0.2), Error);
  EXPECT_NO_THROW(uniform_config(0.3));
  EXPECT_NO_THROW(uniform_config(3.0));
  EXPECT_THROW(ProcessConfig::make(1.0, SpectralMeasure::atomic({{0.0, 0.5}, {pi, 0.5}}), 1), Error);
}

TEST(PointSeq, InvariantsAfterExtend) {
  for (double alpha : {0.3, 1.0, 3.0}) {
    PointSeq seq(uniform_config(alpha));
    extend(seq, 5000);
    ASSERT_EQ(seq.size(), 5000u);
    for (std::size_t j = 0; j < seq.size(); ++j) {
      EXPECT_EQ(seq[j].norm, norm_from_gamma(seq[j].gamma, alpha));
      EXPECT_NEAR(std::hypot(seq[j].pos.x, seq[j].pos.y), seq[j].norm, 1e-12 * seq[j].norm);
      if (j > 0) {
        EXPECT_GT(seq[j].gamma, seq[j - 1].gamma);
        EXPECT_LT(seq[j].norm, seq[j - 1].norm);
      }
    }
  }
}

TEST(PointSeq, DeterministicGivenSeedAndStream) {
  PointSeq a(uniform_config(1.0, 99), 4), b(uniform_config(1.0, 99), 4), c(uniform_config(1.0, 99), 5);
  a.extend(100);
  for (int i = 0; i < 10; ++i) b.extend(10);  // cursor-driven growth gives the same points
  c.extend(100);
  for (std::size_t j = 0; j < 100; ++j) {
    EXPECT_EQ(a[j].gamma, b[j].gamma);
    EXPECT_EQ(a[j].pos, b[j].pos);
  }
  EXPECT_NE(a[0].gamma, c[0].gamma);
}

TEST(PointSeq, LargestNormBelowOneWithProbabilityOneOverE) {
  const auto config = uniform_config(1.0, 17);
  const int reps = 100000;
  int below = 0;
  for (int r = 0; r < reps; ++r) {
    PointSeq seq(config, static_cast<std::uint64_t>(r));
    below += seq.at(0).norm <= 1.0 ? 1 : 0;
  }
  EXPECT_NEAR(static_cast<double>(below) / reps, std::exp(-1.0), 0.006);
}

TEST(PointSeq, LargestNormFollowsFrechetLaw) {
  for (double alpha : {0.5, 1.0, 1.5}) {
    const auto config = uniform_config(alpha, 23);
    const std::size_t n = 10000;
    std::vector<double> first;
    for (std::size_t r = 0; r < n; ++r) first.push_back(PointSeq(config, r).at(0).norm);
    const double d = stats::ks_statistic(first, [&](double r) { return std::exp(-std::pow(r, -alpha)); });
    EXPECT_LT(d, stats::ks_critical_99(n)) << "alpha=" << alpha;

    // Scaling the norms by c maps the law to exp(-(r/c)^{-alpha}).
    const double c = 2.5;
    for (double& v : first) v *= c;
    const double ds = stats::ks_statistic(first, [&](double r) { return std::exp(-std::pow(r / c, -alpha)); });
    EXPECT_LT(ds, stats::ks_critical_99(n)) << "scaled, alpha=" << alpha;
  }
}

TEST(PointSeq, CountsOutsideRadiusArePoisson) {
  struct Case {
    double alpha, radius;
  };
  for (Case c : {Case{2.0, 1.0}, Case{1.0, 0.5}, Case{1.0, 1.0}, Case{1.0, 2.0}}) {
    const auto config = uniform_config(c.alpha, 31);
    std::vector<std::size_t> counts;
    for (std::size_t r = 0; r < 10000; ++r) {
      PointSeq seq(config, r);
      std::size_t k = 0;
      while (seq.at(k).norm > c.radius) ++k;
      counts.push_back(k);
    }
    const double mean = std::pow(c.radius, -c.alpha);
    double avg = 0.0;
    for (auto k : counts) avg += static_cast<double>(k);
    avg /= static_cast<double>(counts.size());
    EXPECT_NEAR(avg, mean, 4 * std::sqrt(mean / 10000.0));
    const auto [chi, crit] = poisson_chi_square(counts, mean);
    EXPECT_LT(chi, crit) << "alpha=" << c.alpha << " r=" << c.radius;
  }
}

TEST(PointSeq, OverflowRiskWhenNormsExplode) {
  // Below the validated alpha window, tiny exponents blow up Γ_1^{-1/α}.
  ProcessConfig wild{0.001, SpectralMeasure::uniform(), 1};
  bool thrown = false;
  for (std::uint64_t s = 0; s < 50 && !thrown; ++s) {
    PointSeq seq(wild, s);
    try {
      seq.extend(1);
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::OverflowRisk);
      thrown = true;
    }
  }
  EXPECT_TRUE(thrown);
}

TEST(PerRay, RequiresAtomicMeasure) {
  EXPECT_THROW(PointSeq::per_ray(uniform_config(1.0)), Error);
}

TEST(PerRay, MergesRaysInDescendingNormOrder) {
  const auto config = ProcessConfig::make(1.3, SpectralMeasure::atomic({{0.0, 0.5}, {2.0, 0.3}, {4.0, 0.2}}), 8);
  const PointSeq seq = sample_per_ray(config, 200);
  std::vector<std::size_t> seen(3, 0);
  std::vector<double> last(3, INFINITY);
  for (std::size_t j = 0; j < seq.size(); ++j) {
    if (j > 0) {
      EXPECT_LT(seq[j].norm, seq[j - 1].norm);
      EXPECT_GT(seq[j].gamma, seq[j - 1].gamma);
    }
    const auto ray = seq[j].ray;
    EXPECT_LT(seq[j].norm, last[ray]);
    last[ray] = seq[j].norm;
    ++seen[ray];
    EXPECT_DOUBLE_EQ(seq[j].direction.angle, config.measure.directions()[ray].angle);
  }
  for (std::size_t i = 0; i < 3; ++i) EXPECT_GE(seen[i], 200u);
}

TEST(PerRay, MedianOfFirstNormOnARay) {
  const auto config = ProcessConfig::make(1.0, SpectralMeasure::regular(4), 41);
  std::vector<double> first;
  for (std::size_t r = 0; r < 100000; ++r) {
    PointSeq seq = PointSeq::per_ray(config, r);
    std::size_t j = 0;
    while (seq.at(j).ray != 0) ++j;
    first.push_back(seq[j].norm);
  }
  EXPECT_NEAR(stats::median(first), 0.25 / std::log(2.0), 0.01);
}

TEST(PerRay, LargestNormMatchesSeriesSampler) {
  const auto config = ProcessConfig::make(1.0, SpectralMeasure::regular(4), 43);
  std::vector<double> a, b;
  const std::size_t n = 10000;
  for (std::size_t r = 0; r < n; ++r) {
    a.push_back(PointSeq::per_ray(config, r).at(0).norm);
    b.push_back(PointSeq(config, r).at(0).norm);
  }
  EXPECT_LT(stats::ks_two_sample(a, b), stats::ks_two_sample_critical_99(n, n));
}
