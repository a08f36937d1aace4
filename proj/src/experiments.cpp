#include "widelab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "widelab/errors.hpp"
#include "widelab/kernel.hpp"
#include "widelab/parallel.hpp"

namespace widelab {

std::size_t SamplesRule::count(std::size_t width) const {
  if (!proportional) return std::max<std::size_t>(base, 2);
  return std::max<std::size_t>(base * width / n_min, 2);
}

namespace {

double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Sample standard deviation; 0 for fewer than two values.
double std_of(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean_of(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

void add_warning(std::vector<std::string>& warnings, ActivationKind kind,
                 std::string_view context) {
  if (auto w = regularity_warning(kind, context)) warnings.push_back(*w);
}

}  // namespace

ConvergenceTable run_convergence_study(const StudyConfig& study) {
  study.validate();
  ConvergenceTable table;
  table.study = study;
  table.config_digest = config_digest(study.network);
  add_warning(table.warnings, study.network.activation, "the W2 convergence study");

  const auto input = resolve_input(study.network);
  table.limit_variance =
      kernel_diag_sequence(study.network, input, gauss_hermite()).output_variance();

  const std::size_t projection[] = {0};
  const std::size_t reps = study.repetitions;
  for (std::size_t width : study.widths_schedule) {
    const NetworkConfig config = study.network.with_hidden_width(width);
    const std::size_t count = study.samples.count(width);
    std::vector<double> ks(reps), w1(reps), w2(reps);
    double sum_sq = 0.0, sum_quad = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      const auto batch = sample_outputs(config, input, count, projection,
                                        derive_seed(study.seed, width, r), study.threads);
      const auto& z = batch.values.data;
      for (const Metric m : study.metrics) {
        switch (m) {
          case Metric::kolmogorov: ks[r] = kolmogorov_distance(z, table.limit_variance); break;
          case Metric::w1: w1[r] = wasserstein_p_vs_gaussian(z, table.limit_variance, 1); break;
          case Metric::w2: w2[r] = wasserstein_p_vs_gaussian(z, table.limit_variance, 2); break;
        }
      }
      for (double v : z) {
        sum_sq += v * v;
        sum_quad += v * v * v * v;
      }
    }
    ConvergenceRow row;
    row.width = width;
    row.report = {mean_of(ks), mean_of(w1), mean_of(w2), std_of(ks), std_of(w1),
                  std_of(w2), count, reps};
    const double total = static_cast<double>(count * reps);
    row.output_second_moment = sum_sq / total;
    const double var_sq = std::max(sum_quad / total - row.output_second_moment *
                                                          row.output_second_moment, 0.0);
    row.output_second_moment_se = std::sqrt(var_sq / (total - 1.0));
    table.rows.push_back(row);
  }
  return table;
}

std::string_view to_string(Observable f) noexcept {
  switch (f) {
    case Observable::tanh: return "tanh";
    case Observable::cos: return "cos";
    case Observable::one: return "one";
  }
  return "one";
}

Observable parse_observable(std::string_view name) {
  for (auto f : {Observable::tanh, Observable::cos, Observable::one}) {
    if (to_string(f) == name) return f;
  }
  throw ConfigError("observable", "unknown observable '" + std::string(name) + "'");
}

double evaluate(Observable f, double z) noexcept {
  switch (f) {
    case Observable::tanh: return std::tanh(z);
    case Observable::cos: return std::cos(z);
    case Observable::one: return 1.0;
  }
  return 1.0;
}

SwitchDecayTable run_switch_ablation(const AblationConfig& ablation) {
  const NetworkConfig& base = ablation.network;
  base.validate();
  const int depth = base.depth;
  if (ablation.k_list.empty()) throw ConfigError("k_list", "must not be empty");
  for (int k : ablation.k_list) {
    if (k < -1 || k > depth - 2) {
      throw ConfigError("k_list", "K = " + std::to_string(k) + " outside [-1, depth - 2]");
    }
  }
  if (ablation.samples < 2) throw ConfigError("samples", "must be >= 2");

  SwitchDecayTable table;
  table.config_digest = config_digest(base);
  add_warning(table.warnings, base.activation, "the Lindeberg switching estimate");

  // switch levels needed by the requested differences
  std::set<int> level_set;
  for (int k : ablation.k_list) {
    level_set.insert(k);
    level_set.insert(k + 1);
  }
  const std::vector<int> levels(level_set.begin(), level_set.end());
  std::vector<NetworkConfig> configs;
  for (int level : levels) {
    NetworkConfig c = base;
    c.switch_index = level;
    configs.push_back(c);
  }
  auto level_pos = [&](int level) {
    return static_cast<std::size_t>(std::find(levels.begin(), levels.end(), level) -
                                    levels.begin());
  };

  const auto input = resolve_input(base);
  const std::size_t projection[] = {0};
  const std::size_t n = ablation.samples;
  // values[level][m] on the primary family, and on the independent family
  // used as the second network of each pair when unpaired
  const std::uint64_t second_seed =
      ablation.paired ? ablation.seed : derive_seed(ablation.seed, 0x756e706169726564ULL);
  Matrix primary(levels.size(), n), secondary(levels.size(), n);
  parallel_for(n, ablation.threads, [&](std::size_t m) {
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const double z =
          forward_projected(configs[i], input, projection, RandomStream{ablation.seed, m})[0];
      primary(i, m) = evaluate(ablation.observable, z);
      if (!ablation.paired) {
        const double z2 = forward_projected(configs[i], input, projection,
                                            RandomStream{second_seed, m})[0];
        secondary(i, m) = evaluate(ablation.observable, z2);
      }
    }
  });
  const Matrix& second = ablation.paired ? primary : secondary;

  for (int k : ablation.k_list) {
    const auto a = primary.row(level_pos(k));
    const auto b = second.row(level_pos(k + 1));
    std::vector<double> diff(n);
    for (std::size_t m = 0; m < n; ++m) diff[m] = a[m] - b[m];
    SwitchDecayRow row;
    row.k = k;
    row.width = base.widths[static_cast<std::size_t>(depth - k - 1)];
    row.difference = mean_of(diff);
    row.abs_difference = std::abs(row.difference);
    row.standard_error = std_of(diff) / std::sqrt(static_cast<double>(n));
    row.samples = n;
    table.rows.push_back(row);
  }
  return table;
}

LastLayerTable run_last_layer_check(const LastLayerConfig& check) {
  check.network.validate();
  if (check.network.output_dim() != 1) {
    throw ConfigError("widths", "the last-layer check needs a scalar output");
  }
  if (check.widths.empty()) throw ConfigError("widths", "no n_L values given");
  LastLayerTable table;
  table.config_digest = config_digest(check.network);
  add_warning(table.warnings, check.network.activation, "the last-layer W2 rate");

  const auto input = resolve_input(check.network);
  const std::size_t depth = static_cast<std::size_t>(check.network.depth);
  const int out_layer = check.network.depth + 1;
  const std::size_t row0[] = {0};
  for (std::size_t n_last : check.widths) {
    if (n_last == 0) throw ConfigError("widths", "n_L must be >= 1");
    NetworkConfig original = check.network;
    original.switch_index.reset();
    original.widths[depth] = n_last;
    NetworkConfig switched = original;
    switched.switch_index = 0;
    const std::size_t count = check.samples.count(n_last);
    const std::uint64_t seed = derive_seed(check.seed, n_last);
    std::vector<double> a(count), b(count);
    parallel_for(count, check.threads, [&](std::size_t m) {
      const RandomStream stream{seed, m};
      const auto hidden = forward_hidden(original, input, stream);
      std::vector<double> act(hidden.z.back().size());
      for (std::size_t j = 0; j < act.size(); ++j) {
        act[j] = activate(original.activation, hidden.z.back()[j]);
      }
      const double variance = original.c_w / static_cast<double>(n_last);
      double out_a = 0.0, out_b = 0.0;
      dense_layer(act, std::span<double>(&out_a, 1), original.layer_law(out_layer), variance,
                  original.c_b, layer_streams(original, stream, out_layer), row0);
      dense_layer(act, std::span<double>(&out_b, 1), switched.layer_law(out_layer), variance,
                  switched.c_b, layer_streams(switched, stream, out_layer), row0);
      a[m] = out_a;
      b[m] = out_b;
    });
    table.rows.push_back({n_last, wasserstein_p_empirical(a, b, 2), count});
  }
  return table;
}

RateFit fit_rate(std::span<const RatePoint> points, std::size_t min_width) {
  std::vector<double> lx, ly;
  RateFit fit;
  fit.min_width = std::numeric_limits<std::size_t>::max();
  for (const auto& p : points) {
    if (p.width < static_cast<double>(min_width)) continue;
    if (!(p.value > 0.0) || !(p.width > 0.0)) {
      throw std::invalid_argument("fit_rate: widths and values must be positive");
    }
    lx.push_back(std::log(p.width));
    ly.push_back(std::log(p.value));
    fit.min_width = std::min(fit.min_width, static_cast<std::size_t>(p.width));
    fit.max_width = std::max(fit.max_width, static_cast<std::size_t>(p.width));
  }
  if (lx.size() < 3) {
    throw std::invalid_argument("fit_rate: need at least 3 points with width >= " +
                                std::to_string(min_width) + ", got " +
                                std::to_string(lx.size()));
  }
  const double n = static_cast<double>(lx.size());
  const double mx = mean_of(lx), my = mean_of(ly);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_rate: widths must not all be equal");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - fit.intercept - fit.slope * lx[i];
    ssr += r * r;
  }
  fit.stderr_slope = std::sqrt(ssr / (n - 2.0) / sxx);
  fit.points = lx.size();
  return fit;
}

RateFit fit_rate(const ConvergenceTable& table, Metric metric, std::size_t min_width) {
  std::vector<RatePoint> points;
  for (const auto& row : table.rows) {
    points.push_back({static_cast<double>(row.width), row.report.value(metric)});
  }
  RateFit fit = fit_rate(points, min_width);
  fit.metric = std::string(to_string(metric));
  return fit;
}

RateFit fit_rate(const LastLayerTable& table, std::size_t min_width) {
  std::vector<RatePoint> points;
  for (const auto& row : table.rows) points.push_back({static_cast<double>(row.width), row.w2});
  RateFit fit = fit_rate(points, min_width);
  fit.metric = "w2";
  return fit;
}

}  // namespace widelab
