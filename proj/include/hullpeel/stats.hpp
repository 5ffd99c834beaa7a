#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "hullpeel/error.hpp"

namespace hullpeel::stats {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  std::size_t n = 0;
};

/// Unweighted least squares y = intercept + slope·x.
inline LineFit ols(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::InvalidArgument, "ols: x and y differ in length");
  const std::size_t n = x.size();
  if (n < 2) throw Error(ErrorKind::DegenerateRegression, "ols needs at least 2 points");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorKind::DegenerateRegression, "ols: x values are all equal");
  LineFit f;
  f.n = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - (f.intercept + f.slope * x[i]);
      sse += r * r;
    }
    f.slope_stderr = std::sqrt(sse / static_cast<double>(n - 2) / sxx);
  }
  return f;
}

inline double mean(std::span<const double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Sample standard deviation (n-1 denominator); 0 for fewer than 2 values.
inline double stddev(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline double standard_error(std::span<const double> v) {
  return v.size() < 2 ? 0.0 : stddev(v) / std::sqrt(static_cast<double>(v.size()));
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// sup |F_n - F| against a continuous CDF.
inline double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// sup |F_a - F_b| between two empirical CDFs.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

/// Asymptotic 99% critical values of the Kolmogorov–Smirnov statistic.
inline double ks_critical_99(std::size_t n) { return 1.63 / std::sqrt(static_cast<double>(n)); }
inline double ks_two_sample_critical_99(std::size_t n, std::size_t m) {
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return 1.63 * std::sqrt((nn + mm) / (nn * mm));
}

}  // namespace hullpeel::stats
