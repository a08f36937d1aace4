#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "widelab/random.hpp"

namespace widelab {

/// Standardized weight laws: every kind has mean 0 and variance 1.
///   gaussian   N(0, 1)
///   laplace    density exp(-sqrt(2)|x|)/sqrt(2), scale 1/sqrt(2)
///   rademacher +-1 with probability 1/2
///   uniform    on [-sqrt(3), sqrt(3)]
enum class WeightLaw { gaussian, laplace, rademacher, uniform };

std::string_view to_string(WeightLaw law) noexcept;
/// Accepts the lowercase names above; throws ConfigError("hidden_law") otherwise.
WeightLaw parse_weight_law(std::string_view name);

struct MomentSummary {
  double mean = 0.0;
  double variance = 0.0;
  double abs_third_moment = 0.0;
};

/// Exact analytic moments of the standardized law.
MomentSummary law_moments(WeightLaw law) noexcept;

/// E|Y|^p for Y ~ N(0, variance): 2^{p/2} Gamma((p+1)/2) / sqrt(pi) * variance^{p/2}.
double gaussian_abs_moment(double p, double variance = 1.0);

/// One draw from the standardized law.
template <WeightLaw Law>
inline double draw(Xoshiro256pp& eng) noexcept {
  if constexpr (Law == WeightLaw::gaussian) {
    return standard_normal(eng);
  } else if constexpr (Law == WeightLaw::laplace) {
    return symmetric_exponential(eng) * 0.70710678118654752440;
  } else if constexpr (Law == WeightLaw::rademacher) {
    return (eng() >> 63) ? 1.0 : -1.0;
  } else {
    return (uniform_open01(eng()) - 0.5) * 3.46410161513775458705;
  }
}

/// Calls `fn(std::integral_constant<WeightLaw, law>{})` so hot loops can be
/// instantiated per law instead of branching per draw.
template <class Fn>
decltype(auto) visit_law(WeightLaw law, Fn&& fn) {
  switch (law) {
    case WeightLaw::gaussian:
      return fn(std::integral_constant<WeightLaw, WeightLaw::gaussian>{});
    case WeightLaw::laplace:
      return fn(std::integral_constant<WeightLaw, WeightLaw::laplace>{});
    case WeightLaw::rademacher:
      return fn(std::integral_constant<WeightLaw, WeightLaw::rademacher>{});
    case WeightLaw::uniform:
      break;
  }
  return fn(std::integral_constant<WeightLaw, WeightLaw::uniform>{});
}

/// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

/// rows x cols i.i.d. entries sqrt(variance) * law. Row i is filled from
/// its own engine `stream.child(i)`.
Matrix sample_matrix(WeightLaw law, std::size_t rows, std::size_t cols,
                     double variance, const RandomStream& stream);

/// i.i.d. N(0, c_b) entries; exactly zero when c_b == 0.
std::vector<double> sample_bias(std::size_t dim, double c_b,
                                const RandomStream& stream);

}  // namespace widelab
