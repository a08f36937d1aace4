#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace testing_stats {

struct Summary {
  double mean = 0.0;
  double var = 0.0;  // population
  double m4 = 0.0;   // central fourth moment
};

inline Summary summarize(std::span<const double> x) {
  Summary s;
  const double n = static_cast<double>(x.size());
  for (double v : x) s.mean += v;
  s.mean /= n;
  for (double v : x) {
    const double d = v - s.mean;
    s.var += d * d;
    s.m4 += d * d * d * d;
  }
  s.var /= n;
  s.m4 /= n;
  return s;
}

inline double mean_se(std::span<const double> x, double* se) {
  const Summary s = summarize(x);
  *se = std::sqrt(s.var / static_cast<double>(x.size()));
  return s.mean;
}

// Two-sample KS statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

// 1% critical value of the two-sample KS statistic.
inline double ks_two_sample_critical(std::size_t n, std::size_t m) {
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return 1.63 * std::sqrt((nn + mm) / (nn * mm));
}

}  // namespace testing_stats
