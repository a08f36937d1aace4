#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "stats.hpp"
#include "widelab/normal.hpp"
#include "widelab/random.hpp"

using namespace widelab;

// Reference values computed with an independent Python transcription of
// splitmix64 / xoshiro256++.
TEST_CASE("mix64 matches the splitmix64 reference sequence") {
  CHECK(mix64(kGoldenGamma) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("xoshiro256++ reference outputs") {
  Xoshiro256pp a(0);
  CHECK(a() == 0x53175d61490b23dfULL);
  CHECK(a() == 0x61da6f3dc380d507ULL);
  CHECK(a() == 0x5c0fdf91ec9a7bfcULL);
  Xoshiro256pp b(0x123456789abcdefULL);
  CHECK(b() == 0xb2f2a310e96bd1c5ULL);
  CHECK(b() == 0xb54062465b950493ULL);
  CHECK(b() == 0x87aca4a9668814b0ULL);
}

TEST_CASE("stream key, child and derive_seed formulas") {
  const RandomStream s{42, 7};
  CHECK(s.key() == 0xd56fd4491d82a4ddULL);
  auto eng = s.engine();
  CHECK(eng() == 0x2475e1f038bdb8b3ULL);
  CHECK(s.child(3) == RandomStream{42, 0x53ca5535a13d70baULL});
  CHECK(derive_seed(20240611, 64, 2) == 0x84d5f18d31ff7bc7ULL);
}

TEST_CASE("streams are values") {
  const RandomStream s{1, 2};
  auto e1 = s.engine();
  auto e2 = s.engine();
  for (int i = 0; i < 100; ++i) CHECK(e1() == e2());
  CHECK_FALSE(s.child(0) == s.child(1));
  CHECK_FALSE(s.child(0) == s);
  CHECK_FALSE(RandomStream{1, 2} == RandomStream{2, 2});
}

TEST_CASE("uniform_open01 stays inside (0, 1)") {
  CHECK(uniform_open01(0) > 0.0);
  CHECK(uniform_open01(~0ULL) < 1.0);
  CHECK(uniform_open01(~0ULL) == 1.0 - 0x1.0p-53);
  CHECK(uniform_open01(1ULL << 63) == 0.5 + 0x1.0p-53);
}

namespace {

std::vector<double> draw_normals(std::size_t n, std::uint64_t seed) {
  auto eng = RandomStream{seed, 0}.engine();
  std::vector<double> x(n);
  for (auto& v : x) v = standard_normal(eng);
  return x;
}

double ks_one_sample(std::vector<double> x, double (*cdf)(double)) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double laplace_cdf(double x) {
  // two-sided unit exponential
  return x < 0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x);
}

}  // namespace

TEST_CASE("ziggurat normal: moments, KS and tail mass over 1e6 draws") {
  const std::size_t n = 1'000'000;
  const auto x = draw_normals(n, 11);
  const auto s = testing_stats::summarize(x);
  const double rn = std::sqrt(static_cast<double>(n));
  CHECK(std::abs(s.mean) < 4.0 / rn);
  CHECK(std::abs(s.var - 1.0) < 4.0 * std::sqrt(2.0) / rn);
  CHECK(ks_one_sample(x, normal_cdf) < 1.63 / rn);

  // beyond the base-strip edge r the tail sampler takes over
  const double r = detail::kNormalR;
  const double p_tail = 2.0 * normal_cdf(-r);
  const auto tail = static_cast<double>(
      std::count_if(x.begin(), x.end(), [&](double v) { return std::abs(v) > r; }));
  CHECK(std::abs(tail - n * p_tail) < 4.0 * std::sqrt(n * p_tail));
  const auto pos = static_cast<double>(std::count_if(x.begin(), x.end(), [](double v) { return v > 0; }));
  CHECK(std::abs(pos - n / 2.0) < 4.0 * std::sqrt(n / 4.0));
}

TEST_CASE("ziggurat two-sided exponential matches the Laplace(1) law") {
  const std::size_t n = 1'000'000;
  auto eng = RandomStream{12, 0}.engine();
  std::vector<double> x(n);
  for (auto& v : x) v = symmetric_exponential(eng);
  const auto s = testing_stats::summarize(x);
  const double rn = std::sqrt(static_cast<double>(n));
  // Laplace(1): variance 2, fourth central moment 24
  CHECK(std::abs(s.mean) < 4.0 * std::sqrt(2.0) / rn);
  CHECK(std::abs(s.var - 2.0) < 4.0 * std::sqrt(24.0 - 4.0) / rn);
  CHECK(ks_one_sample(x, laplace_cdf) < 1.63 / rn);
  const double r = detail::kExponentialR;
  const auto tail = static_cast<double>(
      std::count_if(x.begin(), x.end(), [&](double v) { return std::abs(v) > r; }));
  const double p_tail = std::exp(-r);
  CHECK(std::abs(tail - n * p_tail) < 4.0 * std::sqrt(n * p_tail) + 1.0);
}

TEST_CASE("distinct streams are uncorrelated") {
  const std::size_t n = 100'000;
  const auto a = draw_normals(n, 5);
  auto eng = RandomStream{5, 0}.child(1).engine();
  double sab = 0, saa = 0, sbb = 0;
  for (double va : a) {
    const double vb = standard_normal(eng);
    sab += va * vb;
    saa += va * va;
    sbb += vb * vb;
  }
  CHECK(std::abs(sab / std::sqrt(saa * sbb)) < 0.02);

  // adjacent realization ids and adjacent master seeds
  const auto b = draw_normals(n, 6);
  double c = 0;
  for (std::size_t i = 0; i < n; ++i) c += a[i] * b[i];
  CHECK(std::abs(c / n) < 0.02);
}
