#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "widelab/activation.hpp"

namespace widelab {

enum class Metric { kolmogorov, w1, w2 };

std::string_view to_string(Metric m) noexcept;
Metric parse_metric(std::string_view name);

/// Distances of one width, averaged over repetitions; `*_std` is the sample
/// standard deviation across repetitions (0 for a single repetition).
struct DistanceReport {
  double kolmogorov = 0.0;
  double w1 = 0.0;
  double w2 = 0.0;
  double kolmogorov_std = 0.0;
  double w1_std = 0.0;
  double w2_std = 0.0;
  std::size_t sample_count = 0;
  std::size_t repetitions = 0;

  double value(Metric m) const noexcept;
  double std_dev(Metric m) const noexcept;
};

/// sup_x |F_n(x) - Phi(x / sqrt(limit_variance))|, checking both one-sided
/// empirical CDF values at every order statistic.
double kolmogorov_distance(std::span<const double> samples, double limit_variance);

/// Exact W_p (p = 1 or 2) between two equal-size empirical measures via the
/// sorted coupling.
double wasserstein_p_empirical(std::span<const double> a, std::span<const double> b,
                               int p);

/// W_p between the empirical measure and the Gaussian quantiles
/// sqrt(variance) * Phi^{-1}((i - 0.5) / n), i = 1..n.
double wasserstein_p_vs_gaussian(std::span<const double> samples, double variance,
                                 int p);

/// Scalar conditional variance v = (c_w / n) sum sigma(z_i)^2 of the next
/// layer given the current pre-activations; the covariance is v * I_dim.
struct ConditionalCovariance {
  double v = 0.0;
  std::size_t dim = 1;
};

ConditionalCovariance conditional_variance(std::span<const double> z, double c_w,
                                           ActivationKind activation,
                                           std::size_t dim = 1);

/// Monte Carlo estimate of E ||A - K||_HS^p with A = v I_d, K = k I_d, i.e.
/// the mean of (sqrt(d) |v_i - k|)^p.
struct HsMomentEstimate {
  int p = 2;
  double value = 0.0;
  double standard_error = 0.0;
};

HsMomentEstimate estimate_hs_moments(std::span<const double> v_samples,
                                     std::size_t dim, double k_limit, int p);

/// Upper bound on W_2(sqrt(A) N, sqrt(K) N) for K = k_limit * I_dim:
///   sqrt(m2) / sqrt(k) + 2^{3/2} dim^{1/4} k^{-3/2} sqrt(m4),
/// with m2 = E||A-K||^2 and m4 = E||A-K||^4.
double entropic_w2_bound(double k_limit, std::size_t dim,
                         const HsMomentEstimate& m2, const HsMomentEstimate& m4);

}  // namespace widelab
