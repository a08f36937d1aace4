#include "widelab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace widelab {

QuadratureRule gauss_hermite(int order) {
  if (order < 1 || order > kMaxQuadratureOrder) {
    throw std::invalid_argument("gauss_hermite: order must be in [1, " +
                                std::to_string(kMaxQuadratureOrder) + "]");
  }
  const int n = order;
  // Physicists' rule for weight exp(-x^2) first, then rescaled.
  std::vector<double> x(n), w(n);
  const double pi_m4 = 1.0 / std::pow(std::numbers::pi, 0.25);
  const int half = (n + 1) / 2;
  // Golub-Welsch eigenvalues as starting points, polished by Newton below.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 1));
  for (int j = 0; j + 1 < n; ++j) sub[j] = std::sqrt((j + 1) / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& guess = eig.eigenvalues();  // ascending
  for (int i = 0; i < half; ++i) {
    double z = guess[n - 1 - i];
    double prev = 0.0;  // psi_{n-1}(z)
    for (int iter = 0; iter < 100; ++iter) {
      // orthonormal Hermite functions psi_j = p_j * exp(-z^2 / 2)
      double p1 = pi_m4 * std::exp(-0.5 * z * z), p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      prev = p2;
      const double step = p1 / (std::sqrt(2.0 * n) * p2);
      z -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = w[n - 1 - i] = std::exp(-z * z - 2.0 * std::log(std::abs(prev))) / n;
  }
  if (n % 2 == 1) x[half - 1] = 0.0;

  QuadratureRule rule;
  rule.order = n;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // ascending order
    rule.nodes[i] = std::numbers::sqrt2 * x[n - 1 - i];
    rule.weights[i] = w[n - 1 - i] / std::sqrt(std::numbers::pi);
  }
  return rule;
}

}  // namespace widelab
