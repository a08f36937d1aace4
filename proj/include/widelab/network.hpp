#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "widelab/activation.hpp"
#include "widelab/distributions.hpp"
#include "widelab/random.hpp"

namespace widelab {

/// Architecture of a random fully connected network with `depth` hidden
/// layers. widths = n_0 .. n_{L+1}. Layer l (1-based) has an n_l x n_{l-1}
/// weight matrix with entries sqrt(c_w / n_{l-1}) * law and N(0, c_b) biases.
///
/// Layer 1 is always Gaussian. With switch_index = K the layers
/// L-K+1 .. L+1 use fresh Gaussian weights (drawn from a stream separate from
/// the hidden-law stream) and layers 2 .. L-K use hidden_law. K = -1 and
/// "no switch" describe the same network.
struct NetworkConfig {
  int depth = 3;
  std::vector<std::size_t> widths{4, 16, 16, 16, 1};
  double c_w = 1.0;
  double c_b = 0.0;
  ActivationKind activation = ActivationKind::sigmoid;
  WeightLaw hidden_law = WeightLaw::laplace;
  std::optional<int> switch_index;
  /// Explicit input point; nullopt means (1, ..., 1) in R^{n_0}.
  std::optional<std::vector<double>> input;

  std::size_t input_dim() const { return widths.front(); }
  std::size_t output_dim() const { return widths.back(); }

  /// Throws ConfigError naming the offending key.
  void validate() const;

  /// Law used by layer l in 1..L+1.
  WeightLaw layer_law(int layer) const;
  /// True when layer l draws from the Gaussian replacement stream.
  bool layer_switched(int layer) const;

  /// Same architecture with every hidden width set to n.
  NetworkConfig with_hidden_width(std::size_t n) const;
};

nlohmann::json to_json(const NetworkConfig& config);
/// Missing keys keep their defaults; type or range errors throw ConfigError.
NetworkConfig network_config_from_json(const nlohmann::json& j);
/// Sorted-key compact JSON dump; the basis of the digest.
std::string canonical_json(const NetworkConfig& config);
/// 16 hex digits of FNV-1a/64 over canonical_json.
std::string config_digest(const NetworkConfig& config);

std::vector<double> resolve_input(const NetworkConfig& config);

/// z(1) .. z(L+1); z[l-1] has length n_l.
struct LayerOutputs {
  std::vector<std::vector<double>> z;

  std::span<const double> output() const { return z.back(); }
};

/// Stream layout of one realization:
///   weights of layer l      realization.child(3l)
///   Gaussian replacement    realization.child(3l + 1)
///   biases of layer l       realization.child(3l + 2)
/// Row i of a weight matrix uses its own child stream `.child(i)`, matching
/// sample_matrix, so single rows can be evaluated without the rest.
struct LayerStreams {
  RandomStream weights;
  RandomStream bias;
};
LayerStreams layer_streams(const NetworkConfig& config,
                           const RandomStream& realization, int layer);

/// out = W in + b with W ~ sqrt(variance) * law (rows = out.size()) and
/// b ~ N(0, c_b). Only rows listed in `rows` are computed when given; the
/// rest of `out` is left untouched. Each row accumulates sequentially.
void dense_layer(std::span<const double> in, std::span<double> out,
                 WeightLaw law, double variance, double c_b,
                 const LayerStreams& streams,
                 std::optional<std::span<const std::size_t>> rows = std::nullopt);

/// One realization of every layer, with fresh weights and biases drawn from
/// `stream`.
LayerOutputs forward(const NetworkConfig& config, std::span<const double> input,
                     const RandomStream& stream);

/// Hidden layers z(1) .. z(L) only; the output layer is not drawn.
LayerOutputs forward_hidden(const NetworkConfig& config,
                            std::span<const double> input,
                            const RandomStream& stream);

/// Selected output coordinates only (0-based indices, no repeats). The last
/// layer evaluates just those rows; the values equal the full forward output.
std::vector<double> forward_projected(const NetworkConfig& config,
                                      std::span<const double> input,
                                      std::span<const std::size_t> indices,
                                      const RandomStream& stream);

struct SampleBatch {
  std::string config_digest;
  std::vector<double> input;
  std::vector<std::size_t> projection;
  std::uint64_t master_seed = 0;
  Matrix values;  // count x projection.size()
};

/// `count` independent realizations; realization m uses stream
/// {master_seed, m}, so the batch does not depend on `threads`.
SampleBatch sample_outputs(const NetworkConfig& config,
                           std::span<const double> input, std::size_t count,
                           std::span<const std::size_t> indices,
                           std::uint64_t master_seed, unsigned threads = 1);

}  // namespace widelab
