#include "widelab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "widelab/errors.hpp"
#include "widelab/normal.hpp"

namespace widelab {

std::string_view to_string(Metric m) noexcept {
  switch (m) {
    case Metric::kolmogorov: return "kolmogorov";
    case Metric::w1: return "w1";
    case Metric::w2: return "w2";
  }
  return "w2";
}

Metric parse_metric(std::string_view name) {
  for (auto m : {Metric::kolmogorov, Metric::w1, Metric::w2}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("metric", "unknown metric '" + std::string(name) + "'");
}

double DistanceReport::value(Metric m) const noexcept {
  switch (m) {
    case Metric::kolmogorov: return kolmogorov;
    case Metric::w1: return w1;
    case Metric::w2: return w2;
  }
  return 0.0;
}

double DistanceReport::std_dev(Metric m) const noexcept {
  switch (m) {
    case Metric::kolmogorov: return kolmogorov_std;
    case Metric::w1: return w1_std;
    case Metric::w2: return w2_std;
  }
  return 0.0;
}

namespace {

std::vector<double> sorted_copy(std::span<const double> x) {
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  return s;
}

void check_p(int p) {
  if (p != 1 && p != 2) throw std::invalid_argument("wasserstein: p must be 1 or 2");
}

double pth_root_mean(double sum, std::size_t n, int p) {
  const double mean = sum / static_cast<double>(n);
  return p == 1 ? mean : std::sqrt(mean);
}

}  // namespace

double kolmogorov_distance(std::span<const double> samples, double limit_variance) {
  if (!(limit_variance > 0.0)) {
    throw std::invalid_argument("kolmogorov_distance: variance must be positive");
  }
  if (samples.size() < 2) {
    throw std::invalid_argument("kolmogorov_distance: need at least 2 samples");
  }
  const auto s = sorted_copy(samples);
  const double n = static_cast<double>(s.size());
  const double scale = 1.0 / std::sqrt(limit_variance);
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double cdf = normal_cdf(s[i] * scale);
    const double above = static_cast<double>(i + 1) / n - cdf;
    const double below = cdf - static_cast<double>(i) / n;
    d = std::max({d, above, below});
  }
  return d;
}

double wasserstein_p_empirical(std::span<const double> a, std::span<const double> b,
                               int p) {
  check_p(p);
  if (a.size() != b.size()) {
    throw std::invalid_argument("wasserstein_p_empirical: sample sizes differ (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw std::invalid_argument("wasserstein_p_empirical: empty samples");
  const auto sa = sorted_copy(a);
  const auto sb = sorted_copy(b);
  double sum = 0.0;
  for (std::size_t i = 0; i < sa.size(); ++i) {
    const double d = std::abs(sa[i] - sb[i]);
    sum += p == 1 ? d : d * d;
  }
  return pth_root_mean(sum, sa.size(), p);
}

double wasserstein_p_vs_gaussian(std::span<const double> samples, double variance,
                                 int p) {
  check_p(p);
  if (!(variance > 0.0)) {
    throw std::invalid_argument("wasserstein_p_vs_gaussian: variance must be positive");
  }
  if (samples.size() < 2) {
    throw std::invalid_argument("wasserstein_p_vs_gaussian: need at least 2 samples");
  }
  const auto s = sorted_copy(samples);
  const double n = static_cast<double>(s.size());
  const double scale = std::sqrt(variance);
  double sum = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double q = scale * normal_quantile((static_cast<double>(i) + 0.5) / n);
    const double d = std::abs(s[i] - q);
    sum += p == 1 ? d : d * d;
  }
  return pth_root_mean(sum, s.size(), p);
}

ConditionalCovariance conditional_variance(std::span<const double> z, double c_w,
                                           ActivationKind activation,
                                           std::size_t dim) {
  if (z.empty()) return {0.0, dim};
  double sum = 0.0;
  for (double zi : z) {
    const double a = activate(activation, zi);
    sum += a * a;
  }
  return {c_w * sum / static_cast<double>(z.size()), dim};
}

HsMomentEstimate estimate_hs_moments(std::span<const double> v_samples,
                                     std::size_t dim, double k_limit, int p) {
  if (p != 2 && p != 4) throw std::invalid_argument("estimate_hs_moments: p must be 2 or 4");
  if (v_samples.size() < 2) {
    throw std::invalid_argument("estimate_hs_moments: need at least 2 samples");
  }
  const double d = static_cast<double>(dim);
  const double n = static_cast<double>(v_samples.size());
  double sum = 0.0, sum_sq = 0.0;
  for (double v : v_samples) {
    const double sq = d * (v - k_limit) * (v - k_limit);  // ||A - K||_HS^2
    const double term = p == 2 ? sq : sq * sq;
    sum += term;
    sum_sq += term * term;
  }
  const double mean = sum / n;
  const double var = std::max(sum_sq / n - mean * mean, 0.0) * n / (n - 1.0);
  return {p, mean, std::sqrt(var / n)};
}

double entropic_w2_bound(double k_limit, std::size_t dim, const HsMomentEstimate& m2,
                         const HsMomentEstimate& m4) {
  if (!(k_limit > 0.0)) {
    throw DegenerateKernel(-1, k_limit);
  }
  if (m2.p != 2 || m4.p != 4) {
    throw std::invalid_argument("entropic_w2_bound: expected p = 2 and p = 4 moments");
  }
  const double first = std::sqrt(std::max(m2.value, 0.0)) / std::sqrt(k_limit);
  const double second = 2.0 * std::sqrt(2.0) * std::pow(static_cast<double>(dim), 0.25) /
                        (k_limit * std::sqrt(k_limit)) * std::sqrt(std::max(m4.value, 0.0));
  return first + second;
}

}  // namespace widelab
