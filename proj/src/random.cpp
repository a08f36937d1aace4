#include "widelab/random.hpp"

#include <cmath>

namespace widelab::detail {

namespace {

// Marsaglia & Tsang (2000), 256 layers of common area `area`.
template <class Density, class Inverse>
ZigguratTable build_table(double r, double area, Density f, Inverse f_inv) {
  ZigguratTable t;
  t.x[0] = area / f(r);
  t.x[1] = r;
  for (int i = 2; i < 256; ++i) {
    t.x[i] = f_inv(f(t.x[i - 1]) + area / t.x[i - 1]);
  }
  t.x[256] = 0.0;
  for (int i = 0; i < 257; ++i) t.y[i] = f(t.x[i]);
  return t;
}

double normal_density(double x) { return std::exp(-0.5 * x * x); }
double exponential_density(double x) { return std::exp(-x); }

}  // namespace

const ZigguratTable kNormalTable = build_table(
    kNormalR, 0.00492867323399, normal_density,
    [](double y) { return std::sqrt(-2.0 * std::log(y)); });

const ZigguratTable kExponentialTable = build_table(
    kExponentialR, 0.0039496598225815571993, exponential_density,
    [](double y) { return -std::log(y); });

double normal_tail(Xoshiro256pp& eng) noexcept {
  for (;;) {
    const double a = -std::log(uniform_open01(eng())) / kNormalR;
    const double b = -std::log(uniform_open01(eng()));
    if (2.0 * b >= a * a) return kNormalR + a;
  }
}

// Returns x when the wedge test accepts, -1 otherwise.
double normal_wedge(Xoshiro256pp& eng, double x, int layer) noexcept {
  const auto& t = kNormalTable;
  const double u = uniform_open01(eng());
  const double y = t.y[layer] + (t.y[layer + 1] - t.y[layer]) * u;
  return y < normal_density(x) ? x : -1.0;
}

double exponential_wedge(Xoshiro256pp& eng, double x, int layer) noexcept {
  const auto& t = kExponentialTable;
  const double u = uniform_open01(eng());
  const double y = t.y[layer] + (t.y[layer + 1] - t.y[layer]) * u;
  return y < exponential_density(x) ? x : -1.0;
}

}  // namespace widelab::detail
