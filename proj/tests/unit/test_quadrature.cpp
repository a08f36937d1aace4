#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "widelab/quadrature.hpp"

using namespace widelab;

TEST_CASE("Gauss-Hermite rules: weights, symmetry, polynomial exactness") {
  for (int order : {1, 2, 5, 32, 64, 128, 256, 512}) {
    CAPTURE(order);
    const auto rule = gauss_hermite(order);
    REQUIRE(rule.order == order);
    double sum = 0;
    for (int i = 0; i < order; ++i) {
      CHECK(rule.weights[i] >= 0.0);
      sum += rule.weights[i];
      if (i > 0) CHECK(rule.nodes[i] > rule.nodes[i - 1]);
      CHECK(rule.nodes[i] == doctest::Approx(-rule.nodes[order - 1 - i]).epsilon(1e-14));
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));

    // E U^{2k} = (2k - 1)!!, exact for 2k <= 2 order - 1
    double dfact = 1.0;
    for (int k = 1; 2 * k <= std::min(2 * order - 1, 40); ++k) {
      dfact *= 2 * k - 1;
      const double m = rule.expect([k](double u) { return std::pow(u, 2 * k); });
      CAPTURE(k);
      CHECK(m == doctest::Approx(dfact).epsilon(1e-12));
      const double odd = rule.expect([k](double u) { return std::pow(u, 2 * k - 1); });
      CHECK(std::abs(odd) < 1e-12 * dfact);
    }
  }
}

TEST_CASE("known small rules") {
  const auto r2 = gauss_hermite(2);
  CHECK(r2.nodes[1] == doctest::Approx(1.0));
  CHECK(r2.weights[0] == doctest::Approx(0.5));
  const auto r3 = gauss_hermite(3);
  CHECK(r3.nodes[1] == doctest::Approx(0.0));
  CHECK(r3.nodes[2] == doctest::Approx(std::sqrt(3.0)));
  CHECK(r3.weights[1] == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("order bounds") {
  CHECK_THROWS_AS(gauss_hermite(0), std::invalid_argument);
  CHECK_THROWS_AS(gauss_hermite(kMaxQuadratureOrder + 1), std::invalid_argument);
}
