#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "stats.hpp"
#include "widelab/activation.hpp"
#include "widelab/errors.hpp"
#include "widelab/network.hpp"

using namespace widelab;

namespace {

std::string config_error_key(const NetworkConfig& c) {
  try {
    c.validate();
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

}  // namespace

TEST_CASE("validation names the offending key") {
  NetworkConfig c;
  CHECK(config_error_key(c).empty());
  c.widths = {4, 16, 1};
  CHECK(config_error_key(c) == "widths");
  c = {};
  c.widths[2] = 0;
  CHECK(config_error_key(c) == "widths");
  c = {};
  c.c_w = 0.0;
  CHECK(config_error_key(c) == "c_w");
  c = {};
  c.c_b = -0.1;
  CHECK(config_error_key(c) == "c_b");
  c = {};
  c.switch_index = 3;
  CHECK(config_error_key(c) == "switch_index");
  c.switch_index = -2;
  CHECK(config_error_key(c) == "switch_index");
  c = {};
  c.input = std::vector<double>{1.0, 2.0};
  CHECK(config_error_key(c) == "input");
  c = {};
  c.depth = 0;
  CHECK(config_error_key(c) == "depth");
}

TEST_CASE("layer laws follow the switching rule") {
  NetworkConfig c;  // depth 3, layers 1..4
  for (int l = 1; l <= 4; ++l) CHECK(c.layer_law(l) == (l == 1 ? WeightLaw::gaussian : WeightLaw::laplace));
  for (int l = 1; l <= 4; ++l) CHECK_FALSE(c.layer_switched(l));
  c.switch_index = -1;
  for (int l = 1; l <= 4; ++l) CHECK_FALSE(c.layer_switched(l));
  c.switch_index = 0;
  CHECK(c.layer_switched(4));
  CHECK_FALSE(c.layer_switched(3));
  c.switch_index = 1;
  CHECK(c.layer_switched(3));
  CHECK_FALSE(c.layer_switched(2));
  c.switch_index = 2;
  CHECK(c.layer_switched(2));
  CHECK_FALSE(c.layer_switched(1));
  CHECK(c.layer_law(2) == WeightLaw::gaussian);
}

TEST_CASE("JSON round trip and canonical digest") {
  NetworkConfig c;
  c.c_b = 0.25;
  c.activation = ActivationKind::tanh;
  c.switch_index = 1;
  c.input = std::vector<double>{1.0, -2.0, 0.5, 0.0};
  const NetworkConfig back = network_config_from_json(to_json(c));
  CHECK(canonical_json(back) == canonical_json(c));
  CHECK(config_digest(back) == config_digest(c));
  CHECK(config_digest(NetworkConfig{}) != config_digest(c));
  CHECK(config_digest(NetworkConfig{}).size() == 16);

  const auto j = to_json(NetworkConfig{});
  CHECK(j.at("input") == "ones");
  CHECK(j.at("switch_index").is_null());

  auto bad = to_json(NetworkConfig{});
  bad["learning_rate"] = 0.1;
  CHECK_THROWS_AS(network_config_from_json(bad), ConfigError);
  auto bad_law = to_json(NetworkConfig{});
  bad_law["hidden_law"] = "cauchy";
  CHECK_THROWS_AS(network_config_from_json(bad_law), ConfigError);
  auto bad_type = to_json(NetworkConfig{});
  bad_type["c_w"] = "big";
  try {
    network_config_from_json(bad_type);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "c_w");
  }
}

TEST_CASE("forward shapes and dimension checks") {
  NetworkConfig c;
  c.widths = {4, 5, 6, 7, 3};
  const auto x = resolve_input(c);
  CHECK(x == std::vector<double>(4, 1.0));
  const auto out = forward(c, x, RandomStream{1, 0});
  REQUIRE(out.z.size() == 4);
  for (std::size_t l = 0; l < 4; ++l) CHECK(out.z[l].size() == c.widths[l + 1]);
  const std::vector<double> wrong(3, 1.0);
  CHECK_THROWS_AS(forward(c, wrong, RandomStream{1, 0}), std::invalid_argument);
}

TEST_CASE("forward reproduces the layer recursion from sample_matrix draws") {
  NetworkConfig c;
  c.widths = {4, 5, 6, 7, 2};
  c.c_b = 0.3;
  c.c_w = 1.7;
  c.switch_index = 0;
  const RandomStream real{9, 3};
  const auto x = resolve_input(c);
  const auto out = forward(c, x, real);

  std::vector<double> prev = x;
  for (int l = 1; l <= 4; ++l) {
    const std::size_t rows = c.widths[l], cols = c.widths[l - 1];
    const double var = c.c_w / static_cast<double>(cols);
    const RandomStream ws = c.layer_switched(l) ? real.child(3 * l + 1) : real.child(3 * l);
    const Matrix w = sample_matrix(c.layer_law(l), rows, cols, var, ws);
    const auto b = sample_bias(rows, c.c_b, real.child(3 * l + 2));
    std::vector<double> z(rows);
    for (std::size_t i = 0; i < rows; ++i) {
      double acc = 0;
      for (std::size_t j = 0; j < cols; ++j) {
        const double in = l == 1 ? prev[j] : activate(c.activation, prev[j]);
        acc += w(i, j) * in;
      }
      z[i] = acc + b[i];
      CHECK(z[i] == doctest::Approx(out.z[l - 1][i]).epsilon(1e-12));
    }
    prev = z;
  }
}

TEST_CASE("constant_zero with zero bias kills propagation") {
  NetworkConfig c;
  c.activation = ActivationKind::constant_zero;
  const auto out = forward(c, resolve_input(c), RandomStream{3, 1});
  for (std::size_t l = 1; l < out.z.size(); ++l) {
    for (double v : out.z[l]) CHECK(v == 0.0);
  }
}

TEST_CASE("identity activation: E z^2 = C_W^l when |x|^2 = n_0") {
  NetworkConfig c;
  c.activation = ActivationKind::identity;
  c.c_w = 1.5;
  c.widths = {4, 6, 6, 6, 2};
  const auto x = resolve_input(c);
  const std::size_t m = 40000;
  std::vector<std::vector<double>> sq(4);
  for (std::size_t r = 0; r < m; ++r) {
    const auto out = forward(c, x, RandomStream{17, r});
    for (std::size_t l = 0; l < 4; ++l) sq[l].push_back(out.z[l][0] * out.z[l][0]);
  }
  for (std::size_t l = 0; l < 4; ++l) {
    double se = 0;
    const double mean = testing_stats::mean_se(sq[l], &se);
    CAPTURE(l);
    CHECK(std::abs(mean - std::pow(c.c_w, static_cast<double>(l + 1))) < 4.0 * se);
  }
}

TEST_CASE("finite-width second-moment identity for a bounded activation") {
  NetworkConfig c;
  c.c_b = 0.2;
  c.c_w = 2.0;
  c.widths = {4, 8, 8, 8, 1};
  const auto x = resolve_input(c);
  const std::size_t m = 40000;
  for (std::size_t l = 1; l <= 3; ++l) {
    std::vector<double> d;
    for (std::size_t r = 0; r < m; ++r) {
      const auto out = forward(c, x, RandomStream{23, r});
      double s = 0;
      for (double v : out.z[l - 1]) s += std::pow(activate(c.activation, v), 2);
      const double rhs = c.c_b + c.c_w * s / static_cast<double>(out.z[l - 1].size());
      d.push_back(out.z[l][0] * out.z[l][0] - rhs);
    }
    double se = 0;
    const double mean = testing_stats::mean_se(d, &se);
    CAPTURE(l);
    CHECK(std::abs(mean) < 4.0 * se);
  }
}

TEST_CASE("all-Gaussian switch equals the Gaussian hidden law in distribution") {
  NetworkConfig a;
  a.switch_index = 2;  // L - 1
  NetworkConfig b;
  b.hidden_law = WeightLaw::gaussian;
  const std::size_t idx[] = {0};
  const auto x = resolve_input(a);
  const auto sa = sample_outputs(a, x, 20000, idx, 1);
  const auto sb = sample_outputs(b, x, 20000, idx, 2);
  CHECK(testing_stats::ks_two_sample(sa.values.data, sb.values.data) <
        testing_stats::ks_two_sample_critical(20000, 20000));
}

TEST_CASE("forward_projected") {
  NetworkConfig c;
  c.widths = {4, 8, 8, 8, 5};
  const auto x = resolve_input(c);
  const RandomStream s{31, 4};
  const auto layers = forward(c, x, s);
  const auto full = layers.output();
  std::vector<std::size_t> all(5);
  std::iota(all.begin(), all.end(), 0);
  const auto proj = forward_projected(c, x, all, s);
  for (std::size_t i = 0; i < 5; ++i) CHECK(proj[i] == full[i]);
  const std::size_t some[] = {3, 1};
  const auto p2 = forward_projected(c, x, some, s);
  CHECK(p2[0] == full[3]);
  CHECK(p2[1] == full[1]);
  const std::size_t repeated[] = {1, 1};
  CHECK_THROWS_AS(forward_projected(c, x, repeated, s), std::invalid_argument);
  const std::size_t out_of_range[] = {5};
  CHECK_THROWS_AS(forward_projected(c, x, out_of_range, s), std::out_of_range);

  NetworkConfig scalar;
  const std::size_t first[] = {0};
  CHECK(forward_projected(scalar, x, first, s)[0] == forward(scalar, x, s).output()[0]);
}

TEST_CASE("sample_outputs: stream layout, determinism, thread independence") {
  NetworkConfig c;
  c.widths = {4, 32, 32, 32, 3};
  const auto x = resolve_input(c);
  const std::size_t idx[] = {0, 2};
  const auto one = sample_outputs(c, x, 1, idx, 99);
  const auto ref = forward_projected(c, x, idx, RandomStream{99, 0});
  CHECK(one.values(0, 0) == ref[0]);
  CHECK(one.values(0, 1) == ref[1]);
  CHECK(one.config_digest == config_digest(c));
  CHECK(one.master_seed == 99);

  const auto a = sample_outputs(c, x, 300, idx, 5, 1);
  const auto b = sample_outputs(c, x, 300, idx, 5, 4);
  const auto d = sample_outputs(c, x, 300, idx, 5, 3);
  CHECK(a.values == b.values);
  CHECK(a.values == d.values);
  CHECK_THROWS_AS(sample_outputs(c, x, 0, idx, 5), std::invalid_argument);
}

TEST_CASE("batches with different seeds agree in distribution") {
  NetworkConfig c;
  const auto x = resolve_input(c);
  const std::size_t idx[] = {0};
  const auto a = sample_outputs(c, x, 20000, idx, 100);
  const auto b = sample_outputs(c, x, 20000, idx, 200);
  CHECK(a.values != b.values);
  CHECK(testing_stats::ks_two_sample(a.values.data, b.values.data) <
        testing_stats::ks_two_sample_critical(20000, 20000));
}

TEST_CASE("output coordinates are exchangeable") {
  NetworkConfig c;
  c.widths = {4, 16, 16, 16, 4};
  c.activation = ActivationKind::tanh;
  const auto x = resolve_input(c);
  const std::size_t idx[] = {0, 1, 2, 3};
  const auto batch = sample_outputs(c, x, 20000, idx, 7);
  std::vector<std::vector<double>> col(4);
  for (std::size_t m = 0; m < batch.values.rows; ++m) {
    for (std::size_t i = 0; i < 4; ++i) col[i].push_back(batch.values(m, i));
  }
  for (std::size_t i = 1; i < 4; ++i) {
    CHECK(testing_stats::ks_two_sample(col[0], col[i]) <
          testing_stats::ks_two_sample_critical(20000, 20000));
    // second moments differ by less than 4 SE of the paired difference
    std::vector<double> diff;
    for (std::size_t m = 0; m < col[0].size(); ++m) {
      diff.push_back(col[0][m] * col[0][m] - col[i][m] * col[i][m]);
    }
    double se = 0;
    const double mean = testing_stats::mean_se(diff, &se);
    CHECK(std::abs(mean) < 4.0 * se);
  }
}

TEST_CASE("conditional on z(L), Gaussian output coordinates are N(0, v)") {
  NetworkConfig c;
  c.widths = {4, 64, 64, 64, 3};
  c.switch_index = 0;
  const auto x = resolve_input(c);
  const auto hidden = forward_hidden(c, x, RandomStream{41, 0});
  REQUIRE(hidden.z.size() == 3);
  const auto& zl = hidden.z.back();
  std::vector<double> a(zl.size());
  double v = 0;
  for (std::size_t j = 0; j < zl.size(); ++j) {
    a[j] = activate(c.activation, zl[j]);
    v += a[j] * a[j];
  }
  v *= c.c_w / static_cast<double>(zl.size());

  const std::size_t m = 20000;
  std::vector<std::vector<double>> coords(3);
  std::vector<double> out(3);
  for (std::size_t r = 0; r < m; ++r) {
    const RandomStream s{41, 1000 + r};
    dense_layer(a, out, WeightLaw::gaussian, c.c_w / 64.0, c.c_b, LayerStreams{s.child(0), s.child(1)});
    for (std::size_t i = 0; i < 3; ++i) coords[i].push_back(out[i] / std::sqrt(v));
  }
  for (auto& col : coords) {
    std::sort(col.begin(), col.end());
    double d = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const double f = 0.5 * std::erfc(-col[i] / std::sqrt(2.0));
      d = std::max({d, (i + 1.0) / m - f, f - static_cast<double>(i) / m});
    }
    CHECK(d < 1.63 / std::sqrt(static_cast<double>(m)));
  }
}

TEST_CASE("with_hidden_width") {
  const NetworkConfig c = NetworkConfig{}.with_hidden_width(128);
  CHECK(c.widths == std::vector<std::size_t>{4, 128, 128, 128, 1});
}
