#pragma once

#include <vector>

namespace widelab {

/// Gauss-Hermite rule normalized to the standard Gaussian measure:
/// sum_i weights[i] * f(nodes[i]) ~ E f(U), U ~ N(0, 1). Exact for
/// polynomials of degree <= 2 * order - 1.
struct QuadratureRule {
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> weights;

  template <class F>
  double expect(F&& f) const {
    double s = 0.0;
    for (int i = 0; i < order; ++i) s += weights[i] * f(nodes[i]);
    return s;
  }
};

inline constexpr int kDefaultQuadratureOrder = 256;
inline constexpr int kMaxQuadratureOrder = 512;

/// Nodes by Newton iteration on the orthonormal Hermite recurrence.
QuadratureRule gauss_hermite(int order = kDefaultQuadratureOrder);

}  // namespace widelab
