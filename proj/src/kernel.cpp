#include "widelab/kernel.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "widelab/errors.hpp"

namespace widelab {

DegenerateKernel::DegenerateKernel(int layer, double value)
    : std::domain_error(
          (layer > 0 ? "degenerate kernel: K(" + std::to_string(layer) + ") = "
                     : std::string("degenerate kernel: limit variance ")) +
          std::to_string(value) +
          " is not positive, the limit covariance is not invertible"),
      layer_(layer),
      value_(value) {}

namespace {

constexpr double kDegenerateDeterminant = 1e-12;

double base_kernel(const NetworkConfig& config, std::span<const double> x,
                   std::span<const double> y) {
  if (x.size() != config.input_dim() || y.size() != config.input_dim()) {
    throw std::invalid_argument("kernel: input length must equal n_0");
  }
  const double dot = std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
  return config.c_b + config.c_w * dot / static_cast<double>(config.input_dim());
}

void require_positive(const NetworkConfig& config, int layer, double k) {
  if (config.activation != ActivationKind::constant_zero && !(k > 0.0)) {
    throw DegenerateKernel(layer, k);
  }
}

// E[sigma(sqrt(k) U)^2]
double second_moment(const NetworkConfig& config, const QuadratureRule& rule,
                     double k) {
  const double s = std::sqrt(std::max(k, 0.0));
  return rule.expect([&](double u) {
    const double v = activate(config.activation, s * u);
    return v * v;
  });
}

// E[sigma(X) sigma(Y)] for (X, Y) centered Gaussian with covariance
// [[kxx, kxy], [kxy, kyy]].
double cross_moment(const NetworkConfig& config, const QuadratureRule& rule,
                    double kxx, double kxy, double kyy) {
  const auto act = config.activation;
  const double det = kxx * kyy - kxy * kxy;
  if (det < kDegenerateDeterminant * kxx * kyy) {
    const double sx = std::sqrt(kxx);
    const double sy = std::copysign(std::sqrt(kyy), kxy);
    return rule.expect([&](double u) { return activate(act, sx * u) * activate(act, sy * u); });
  }
  const double l11 = std::sqrt(kxx);
  const double l21 = kxy / l11;
  const double l22 = std::sqrt(kyy - l21 * l21);
  double total = 0.0;
  for (int i = 0; i < rule.order; ++i) {
    const double ui = rule.nodes[i];
    const double sx = activate(act, l11 * ui);
    double inner = 0.0;
    for (int j = 0; j < rule.order; ++j) {
      inner += rule.weights[j] * activate(act, l21 * ui + l22 * rule.nodes[j]);
    }
    total += rule.weights[i] * sx * inner;
  }
  return total;
}

}  // namespace

KernelSequence kernel_diag_sequence(const NetworkConfig& config,
                                    std::span<const double> input,
                                    const QuadratureRule& rule) {
  config.validate();
  KernelSequence seq;
  double k = base_kernel(config, input, input);
  seq.diag.push_back(k);
  for (int l = 1; l <= config.depth; ++l) {
    require_positive(config, l, k);
    k = config.c_b + config.c_w * second_moment(config, rule, k);
    seq.diag.push_back(k);
  }
  require_positive(config, config.depth + 1, k);
  return seq;
}

KernelSequence kernel_cross_sequence(const NetworkConfig& config,
                                     std::span<const double> x,
                                     std::span<const double> y,
                                     const QuadratureRule& rule) {
  config.validate();
  double kxx = base_kernel(config, x, x);
  double kyy = base_kernel(config, y, y);
  double kxy = base_kernel(config, x, y);
  KernelSequence seq;
  seq.cross.emplace();
  seq.cross_diag_y.emplace();
  auto record = [&] {
    seq.diag.push_back(kxx);
    seq.cross->push_back(kxy);
    seq.cross_diag_y->push_back(kyy);
  };
  record();
  for (int l = 1; l <= config.depth; ++l) {
    require_positive(config, l, kxx);
    require_positive(config, l, kyy);
    const double next_xy =
        config.activation == ActivationKind::constant_zero
            ? config.c_b
            : config.c_b + config.c_w * cross_moment(config, rule, kxx, kxy, kyy);
    kxx = config.c_b + config.c_w * second_moment(config, rule, kxx);
    kyy = config.c_b + config.c_w * second_moment(config, rule, kyy);
    kxy = next_xy;
    record();
  }
  require_positive(config, config.depth + 1, kxx);
  require_positive(config, config.depth + 1, kyy);
  return seq;
}

OracleEstimate kernel_mc_oracle(const NetworkConfig& config,
                                std::span<const double> input,
                                std::size_t sample_count,
                                std::uint64_t master_seed) {
  config.validate();
  if (sample_count < 100) {
    throw std::invalid_argument("kernel_mc_oracle: sample_count must be >= 100");
  }
  OracleEstimate out;
  double k = base_kernel(config, input, input);
  double se = 0.0;
  out.estimate.push_back(k);
  out.standard_error.push_back(se);
  const auto act = config.activation;
  const double n = static_cast<double>(sample_count);
  for (int l = 1; l <= config.depth; ++l) {
    require_positive(config, l, k);
    const double h = 1e-3 * std::max(k, 1e-300);
    const double s = std::sqrt(k), s_hi = std::sqrt(k + h),
                 s_lo = std::sqrt(std::max(k - h, 0.0));
    auto eng = RandomStream{master_seed, static_cast<std::uint64_t>(l)}.engine();
    double sum = 0.0, sum_sq = 0.0, sum_hi = 0.0, sum_lo = 0.0;
    for (std::size_t i = 0; i < sample_count; ++i) {
      const double u = standard_normal(eng);
      const double v = activate(act, s * u);
      const double v2 = v * v;
      sum += v2;
      sum_sq += v2 * v2;
      const double hi = activate(act, s_hi * u), lo = activate(act, s_lo * u);
      sum_hi += hi * hi;
      sum_lo += lo * lo;
    }
    const double mean = sum / n;
    const double var = std::max(sum_sq / n - mean * mean, 0.0) * n / (n - 1.0);
    const double direct_se = config.c_w * std::sqrt(var / n);
    const double slope = config.c_w * (sum_hi - sum_lo) / n / (s_hi * s_hi - s_lo * s_lo);
    k = config.c_b + config.c_w * mean;
    se = std::sqrt(direct_se * direct_se + slope * slope * se * se);
    out.estimate.push_back(k);
    out.standard_error.push_back(se);
  }
  return out;
}

SampleBatch limit_gaussian_sampler(double variance, std::size_t dim,
                                   std::size_t count, std::uint64_t master_seed) {
  if (!(variance > 0.0)) {
    throw std::invalid_argument("limit_gaussian_sampler: variance must be positive");
  }
  if (dim == 0) throw std::invalid_argument("limit_gaussian_sampler: dim must be >= 1");
  if (count == 0) throw std::invalid_argument("limit_gaussian_sampler: count must be >= 1");
  SampleBatch batch;
  batch.config_digest = "limit-gaussian";
  batch.master_seed = master_seed;
  batch.projection.resize(dim);
  std::iota(batch.projection.begin(), batch.projection.end(), std::size_t{0});
  batch.values = Matrix(count, dim);
  const double scale = std::sqrt(variance);
  for (std::size_t m = 0; m < count; ++m) {
    auto eng = RandomStream{master_seed, m}.engine();
    for (double& v : batch.values.row(m)) v = scale * standard_normal(eng);
  }
  return batch;
}

}  // namespace widelab
