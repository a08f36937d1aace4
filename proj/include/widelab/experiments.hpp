#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "widelab/metrics.hpp"
#include "widelab/network.hpp"

namespace widelab {

inline constexpr std::uint64_t kDefaultSeed = 20240611;

/// Realizations per width: base * n / n_min when proportional (integer
/// division, at least 2), otherwise base for every width.
struct SamplesRule {
  std::size_t base = 200;
  std::size_t n_min = 16;
  bool proportional = true;

  std::size_t count(std::size_t width) const;
};

struct StudyConfig {
  NetworkConfig network;
  std::vector<std::size_t> widths_schedule{16, 32, 64, 128, 256, 512, 1024};
  SamplesRule samples;
  std::size_t repetitions = 3;
  std::uint64_t seed = kDefaultSeed;
  std::vector<Metric> metrics{Metric::kolmogorov, Metric::w1, Metric::w2};
  /// Worker cap; never affects results.
  unsigned threads = 1;

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

nlohmann::json to_json(const StudyConfig& study);
StudyConfig study_config_from_json(const nlohmann::json& j);

/// Embedded study presets: "appendix-a" and "appendix-a-desk".
StudyConfig study_preset(std::string_view name);
std::vector<std::string> preset_names();

struct ConvergenceRow {
  std::size_t width = 0;
  DistanceReport report;
  /// Mean of z^2 over all realizations of this width and its standard error;
  /// in-memory and JSON only.
  double output_second_moment = 0.0;
  double output_second_moment_se = 0.0;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  std::size_t min_width = 0;
  std::size_t max_width = 0;
  std::size_t points = 0;
  std::string metric;
};

struct ConvergenceTable {
  StudyConfig study;
  std::string config_digest;
  double limit_variance = 0.0;
  std::vector<ConvergenceRow> rows;
  std::vector<RateFit> fits;
  std::vector<std::string> warnings;
};

/// For every scheduled width n and repetition r, draws M(n) scalar outputs
/// with master seed derive_seed(seed, n, r) and measures them against
/// N(0, K(L+1)) from the quadrature kernel.
ConvergenceTable run_convergence_study(const StudyConfig& study);

/// Bounded smooth observables of the first output coordinate.
enum class Observable { tanh, cos, one };
std::string_view to_string(Observable f) noexcept;
Observable parse_observable(std::string_view name);
double evaluate(Observable f, double z) noexcept;

struct AblationConfig {
  NetworkConfig network;
  std::vector<int> k_list{-1, 0, 1};
  Observable observable = Observable::tanh;
  std::size_t samples = 10000;
  std::uint64_t seed = kDefaultSeed;
  /// Common random numbers: both networks of a pair use realization stream
  /// {seed, m}. When false the second network uses an independent family.
  bool paired = true;
  unsigned threads = 1;
};

struct SwitchDecayRow {
  int k = 0;
  /// n_{L-K-1}: width of the layer feeding the switched one.
  std::size_t width = 0;
  /// E F(z^{(L+1;L-K)}) - E F(z^{(L+1;L-K-1)})
  double difference = 0.0;
  double abs_difference = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

struct SwitchDecayTable {
  std::string config_digest;
  std::vector<SwitchDecayRow> rows;
  std::vector<std::string> warnings;
};

/// Paired Monte Carlo estimate, for each K, of the change in E F when the
/// weights of layer L-K are switched to Gaussian (switch_index K vs K+1).
SwitchDecayTable run_switch_ablation(const AblationConfig& ablation);

struct LastLayerConfig {
  NetworkConfig network;
  /// Values of n_L; the other widths come from `network`.
  std::vector<std::size_t> widths{64, 128, 256, 512};
  SamplesRule samples{800, 64, true};
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 1;
};

struct LastLayerRow {
  std::size_t width = 0;
  double w2 = 0.0;
  std::size_t samples = 0;
};

struct LastLayerTable {
  std::string config_digest;
  std::vector<LastLayerRow> rows;
  std::vector<std::string> warnings;
};

/// For each n_L: M realizations share z(L) between the original network and
/// the one with a Gaussian output layer (independent G, same biases); reports
/// the empirical W2 between the two output samples.
LastLayerTable run_last_layer_check(const LastLayerConfig& check);

struct RatePoint {
  double width = 0.0;
  double value = 0.0;
};

/// OLS of log(value) on log(width) over points with width >= min_width.
/// Throws std::invalid_argument with fewer than 3 usable points or a
/// nonpositive value.
RateFit fit_rate(std::span<const RatePoint> points, std::size_t min_width);
RateFit fit_rate(const ConvergenceTable& table, Metric metric, std::size_t min_width);
RateFit fit_rate(const LastLayerTable& table, std::size_t min_width);

nlohmann::json to_json(const RateFit& fit);

enum class OutputFormat { csv, json };
OutputFormat parse_format(std::string_view name);

/// CSV: '#'-prefixed metadata lines (study JSON, limit variance, digest),
/// then `width,metric,value,std,sample_count,repetitions,seed`, one row per
/// width and requested metric. JSON: {config, limit_variance, rows, fits}.
/// Numbers use the shortest round-trip representation.
std::string format_results(const ConvergenceTable& table, OutputFormat format);
void emit_results(const ConvergenceTable& table, OutputFormat format,
                  const std::filesystem::path& path);

/// Inverse of the JSON format.
ConvergenceTable table_from_json(const nlohmann::json& j);
/// Reads the CSV format back (metadata lines are parsed when present).
ConvergenceTable read_results_csv(const std::filesystem::path& path);
ConvergenceTable read_results(const std::filesystem::path& path);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

}  // namespace widelab
