#include "widelab/distributions.hpp"

#include <cmath>
#include <numbers>

#include "widelab/errors.hpp"

namespace widelab {

std::string_view to_string(WeightLaw law) noexcept {
  switch (law) {
    case WeightLaw::gaussian: return "gaussian";
    case WeightLaw::laplace: return "laplace";
    case WeightLaw::rademacher: return "rademacher";
    case WeightLaw::uniform: return "uniform";
  }
  return "gaussian";
}

WeightLaw parse_weight_law(std::string_view name) {
  for (auto law : {WeightLaw::gaussian, WeightLaw::laplace,
                   WeightLaw::rademacher, WeightLaw::uniform}) {
    if (to_string(law) == name) return law;
  }
  throw ConfigError("hidden_law", "unknown weight law '" + std::string(name) + "'");
}

double gaussian_abs_moment(double p, double variance) {
  return std::pow(2.0, p / 2.0) * std::tgamma((p + 1.0) / 2.0) /
         std::sqrt(std::numbers::pi) * std::pow(variance, p / 2.0);
}

MomentSummary law_moments(WeightLaw law) noexcept {
  switch (law) {
    case WeightLaw::gaussian:
      return {0.0, 1.0, 2.0 * std::numbers::sqrt2 / std::sqrt(std::numbers::pi)};
    case WeightLaw::laplace:
      // scale b = 1/sqrt(2): E|X|^3 = 6 b^3
      return {0.0, 1.0, 3.0 / std::numbers::sqrt2};
    case WeightLaw::rademacher:
      return {0.0, 1.0, 1.0};
    case WeightLaw::uniform:
      // E|X|^3 = a^3 / 4 with a = sqrt(3)
      return {0.0, 1.0, 3.0 * std::numbers::sqrt3 / 4.0};
  }
  return {};
}

Matrix sample_matrix(WeightLaw law, std::size_t rows, std::size_t cols,
                     double variance, const RandomStream& stream) {
  if (rows == 0 || cols == 0) {
    throw std::invalid_argument("sample_matrix: rows and cols must be positive");
  }
  if (!(variance > 0.0)) {
    throw std::invalid_argument("sample_matrix: variance must be positive");
  }
  Matrix m(rows, cols);
  const double scale = std::sqrt(variance);
  visit_law(law, [&](auto tag) {
    for (std::size_t i = 0; i < rows; ++i) {
      auto eng = stream.child(i).engine();
      for (double& v : m.row(i)) v = scale * draw<decltype(tag)::value>(eng);
    }
  });
  return m;
}

std::vector<double> sample_bias(std::size_t dim, double c_b,
                                const RandomStream& stream) {
  if (dim == 0) throw std::invalid_argument("sample_bias: dim must be positive");
  if (!(c_b >= 0.0)) throw std::invalid_argument("sample_bias: c_b must be >= 0");
  std::vector<double> b(dim, 0.0);
  if (c_b == 0.0) return b;
  const double scale = std::sqrt(c_b);
  auto eng = stream.engine();
  for (double& v : b) v = scale * standard_normal(eng);
  return b;
}

}  // namespace widelab
