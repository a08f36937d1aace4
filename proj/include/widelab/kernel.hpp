#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "widelab/network.hpp"
#include "widelab/quadrature.hpp"

namespace widelab {

/// Infinite-width covariances at layers 1..L+1 (index 0 is layer 1).
/// `cross` and `cross_diag_y` are filled only by kernel_cross_sequence.
struct KernelSequence {
  std::vector<double> diag;
  std::optional<std::vector<double>> cross;
  std::optional<std::vector<double>> cross_diag_y;

  double output_variance() const { return diag.back(); }
};

/// K(1) = c_b + c_w |x|^2 / n_0 and
/// K(l+1) = c_b + c_w E[sigma(sqrt(K(l)) U)^2], the expectation taken with
/// `rule`. Throws DegenerateKernel when some K(l) <= 0 and the activation is
/// not constant.
KernelSequence kernel_diag_sequence(const NetworkConfig& config,
                                    std::span<const double> input,
                                    const QuadratureRule& rule);

/// Propagates (K(x,x), K(x,y), K(y,y)). The cross expectation is a tensor
/// rule after a Cholesky factorization of the 2x2 covariance; when its
/// determinant is below 1e-12 * K(x,x) K(y,y) the pair is treated as
/// perfectly (anti)correlated and a one-dimensional rule is used.
KernelSequence kernel_cross_sequence(const NetworkConfig& config,
                                     std::span<const double> x,
                                     std::span<const double> y,
                                     const QuadratureRule& rule);

struct OracleEstimate {
  std::vector<double> estimate;
  std::vector<double> standard_error;
};

/// Monte Carlo version of the diagonal recursion: each layer's expectation
/// is a sample mean over `sample_count` fresh Gaussian draws evaluated at
/// the previous *estimate*. The standard error combines the sampling error
/// of the layer with the previous layer's error pushed through a
/// common-random-number derivative of the layer map. Test oracle only.
OracleEstimate kernel_mc_oracle(const NetworkConfig& config,
                                std::span<const double> input,
                                std::size_t sample_count,
                                std::uint64_t master_seed);

/// `count` rows of i.i.d. N(0, variance)^dim; row m uses stream {seed, m}.
SampleBatch limit_gaussian_sampler(double variance, std::size_t dim,
                                   std::size_t count, std::uint64_t master_seed);

}  // namespace widelab
