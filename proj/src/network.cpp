#include "widelab/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "widelab/errors.hpp"
#include "widelab/parallel.hpp"

namespace widelab {

void NetworkConfig::validate() const {
  if (depth < 1) throw ConfigError("depth", "must be a positive integer");
  if (widths.size() != static_cast<std::size_t>(depth) + 2) {
    throw ConfigError("widths", "expected depth + 2 = " +
                                    std::to_string(depth + 2) + " entries, got " +
                                    std::to_string(widths.size()));
  }
  for (std::size_t w : widths) {
    if (w == 0) throw ConfigError("widths", "every width must be >= 1");
  }
  if (!(c_w > 0.0) || !std::isfinite(c_w)) {
    throw ConfigError("c_w", "must be a positive finite number");
  }
  if (!(c_b >= 0.0) || !std::isfinite(c_b)) {
    throw ConfigError("c_b", "must be a nonnegative finite number");
  }
  if (switch_index && (*switch_index < -1 || *switch_index > depth - 1)) {
    throw ConfigError("switch_index", "must lie in [-1, depth - 1]");
  }
  if (input && input->size() != widths.front()) {
    throw ConfigError("input", "length must equal widths[0] = " +
                                   std::to_string(widths.front()));
  }
}

bool NetworkConfig::layer_switched(int layer) const {
  if (!switch_index || layer < 2) return false;
  return layer >= depth - *switch_index + 1;
}

WeightLaw NetworkConfig::layer_law(int layer) const {
  if (layer <= 1 || layer_switched(layer)) return WeightLaw::gaussian;
  return hidden_law;
}

NetworkConfig NetworkConfig::with_hidden_width(std::size_t n) const {
  NetworkConfig c = *this;
  for (std::size_t l = 1; l + 1 < c.widths.size(); ++l) c.widths[l] = n;
  return c;
}

nlohmann::json to_json(const NetworkConfig& config) {
  nlohmann::json j;
  j["depth"] = config.depth;
  j["widths"] = config.widths;
  j["c_w"] = config.c_w;
  j["c_b"] = config.c_b;
  j["activation"] = std::string(to_string(config.activation));
  j["hidden_law"] = std::string(to_string(config.hidden_law));
  j["switch_index"] = config.switch_index ? nlohmann::json(*config.switch_index)
                                          : nlohmann::json(nullptr);
  j["input"] = config.input ? nlohmann::json(*config.input) : nlohmann::json("ones");
  return j;
}

namespace {

template <class T>
T get_as(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(key, std::string("invalid value (") + e.what() + ")");
  }
}

}  // namespace

NetworkConfig network_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("network", "expected a JSON object");
  NetworkConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "depth") {
      c.depth = get_as<int>(j, "depth");
    } else if (key == "widths") {
      const auto raw = get_as<std::vector<long long>>(j, "widths");
      c.widths.clear();
      for (long long w : raw) {
        if (w <= 0) throw ConfigError("widths", "every width must be >= 1");
        c.widths.push_back(static_cast<std::size_t>(w));
      }
    } else if (key == "c_w") {
      c.c_w = get_as<double>(j, "c_w");
    } else if (key == "c_b") {
      c.c_b = get_as<double>(j, "c_b");
    } else if (key == "activation") {
      c.activation = parse_activation(get_as<std::string>(j, "activation"));
    } else if (key == "hidden_law") {
      c.hidden_law = parse_weight_law(get_as<std::string>(j, "hidden_law"));
    } else if (key == "switch_index") {
      if (value.is_null()) {
        c.switch_index.reset();
      } else {
        c.switch_index = get_as<int>(j, "switch_index");
      }
    } else if (key == "input") {
      if (value.is_string()) {
        if (value.get<std::string>() != "ones") {
          throw ConfigError("input", "expected a vector or the token \"ones\"");
        }
        c.input.reset();
      } else {
        c.input = get_as<std::vector<double>>(j, "input");
      }
    } else {
      throw ConfigError(key, "unknown network key");
    }
  }
  c.validate();
  return c;
}

std::string canonical_json(const NetworkConfig& config) {
  return to_json(config).dump();
}

std::string config_digest(const NetworkConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_json(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<double> resolve_input(const NetworkConfig& config) {
  if (config.input) return *config.input;
  return std::vector<double>(config.input_dim(), 1.0);
}

LayerStreams layer_streams(const NetworkConfig& config,
                           const RandomStream& realization, int layer) {
  const auto l = static_cast<std::uint64_t>(layer);
  const bool switched = config.layer_switched(layer);
  return {realization.child(3 * l + (switched ? 1 : 0)),
          realization.child(3 * l + 2)};
}

void dense_layer(std::span<const double> in, std::span<double> out,
                 WeightLaw law, double variance, double c_b,
                 const LayerStreams& streams,
                 std::optional<std::span<const std::size_t>> rows) {
  const double scale = std::sqrt(variance);
  // biases are drawn for every row so that a row's bias does not depend on
  // which other rows are requested
  const std::vector<double> bias = sample_bias(out.size(), c_b, streams.bias);
  visit_law(law, [&](auto tag) {
    constexpr WeightLaw kLaw = decltype(tag)::value;
    // Rows are independent sequential sums; four are interleaved to give
    // the CPU independent dependency chains. Results match row-by-row
    // evaluation bit for bit.
    constexpr std::size_t kLanes = 4;
    auto compute_rows = [&](std::span<const std::size_t> idx) {
      std::size_t k = 0;
      for (; k + kLanes <= idx.size(); k += kLanes) {
        Xoshiro256pp eng[kLanes] = {
            streams.weights.child(idx[k]).engine(),
            streams.weights.child(idx[k + 1]).engine(),
            streams.weights.child(idx[k + 2]).engine(),
            streams.weights.child(idx[k + 3]).engine()};
        double acc[kLanes] = {0.0, 0.0, 0.0, 0.0};
        for (double a : in) {
          for (std::size_t lane = 0; lane < kLanes; ++lane) {
            acc[lane] += draw<kLaw>(eng[lane]) * a;
          }
        }
        for (std::size_t lane = 0; lane < kLanes; ++lane) {
          out[idx[k + lane]] = scale * acc[lane] + bias[idx[k + lane]];
        }
      }
      for (; k < idx.size(); ++k) {
        auto eng = streams.weights.child(idx[k]).engine();
        double acc = 0.0;
        for (double a : in) acc += draw<kLaw>(eng) * a;
        out[idx[k]] = scale * acc + bias[idx[k]];
      }
    };
    if (rows) {
      compute_rows(*rows);
    } else {
      std::vector<std::size_t> all(out.size());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
      compute_rows(all);
    }
  });
}

namespace {

void check_input(const NetworkConfig& config, std::span<const double> input) {
  config.validate();
  if (input.size() != config.input_dim()) {
    throw std::invalid_argument("forward: input length " +
                                std::to_string(input.size()) + " != n_0 = " +
                                std::to_string(config.input_dim()));
  }
}

// Runs layers 1..last into `z`, reusing activation storage.
void forward_layers(const NetworkConfig& config, std::span<const double> input,
                    const RandomStream& stream, int last, LayerOutputs& outputs) {
  outputs.z.resize(static_cast<std::size_t>(last));
  std::vector<double> activated;
  for (int l = 1; l <= last; ++l) {
    const std::size_t fan_in = config.widths[static_cast<std::size_t>(l - 1)];
    auto& z = outputs.z[static_cast<std::size_t>(l - 1)];
    z.assign(config.widths[static_cast<std::size_t>(l)], 0.0);
    std::span<const double> layer_in = input;
    if (l > 1) {
      const auto& prev = outputs.z[static_cast<std::size_t>(l - 2)];
      activated.resize(prev.size());
      for (std::size_t j = 0; j < prev.size(); ++j) {
        activated[j] = activate(config.activation, prev[j]);
      }
      layer_in = activated;
    }
    dense_layer(layer_in, z, config.layer_law(l),
                config.c_w / static_cast<double>(fan_in), config.c_b,
                layer_streams(config, stream, l));
  }
}

}  // namespace

LayerOutputs forward(const NetworkConfig& config, std::span<const double> input,
                     const RandomStream& stream) {
  check_input(config, input);
  LayerOutputs outputs;
  forward_layers(config, input, stream, config.depth + 1, outputs);
  return outputs;
}

LayerOutputs forward_hidden(const NetworkConfig& config,
                            std::span<const double> input,
                            const RandomStream& stream) {
  check_input(config, input);
  LayerOutputs outputs;
  forward_layers(config, input, stream, config.depth, outputs);
  return outputs;
}

std::vector<double> forward_projected(const NetworkConfig& config,
                                      std::span<const double> input,
                                      std::span<const std::size_t> indices,
                                      const RandomStream& stream) {
  check_input(config, input);
  const std::size_t n_out = config.output_dim();
  if (indices.empty()) throw std::invalid_argument("forward_projected: no indices");
  std::vector<bool> seen(n_out, false);
  for (std::size_t i : indices) {
    if (i >= n_out) {
      throw std::out_of_range("forward_projected: index " + std::to_string(i) +
                              " >= n_{L+1} = " + std::to_string(n_out));
    }
    if (seen[i]) {
      throw std::invalid_argument("forward_projected: repeated index " +
                                  std::to_string(i));
    }
    seen[i] = true;
  }
  LayerOutputs hidden;
  forward_layers(config, input, stream, config.depth, hidden);
  const auto& last = hidden.z.back();
  std::vector<double> activated(last.size());
  for (std::size_t j = 0; j < last.size(); ++j) {
    activated[j] = activate(config.activation, last[j]);
  }
  const int out_layer = config.depth + 1;
  std::vector<double> full(n_out, 0.0);
  dense_layer(activated, full, config.layer_law(out_layer),
              config.c_w / static_cast<double>(last.size()), config.c_b,
              layer_streams(config, stream, out_layer), indices);
  std::vector<double> result;
  result.reserve(indices.size());
  for (std::size_t i : indices) result.push_back(full[i]);
  return result;
}

SampleBatch sample_outputs(const NetworkConfig& config,
                           std::span<const double> input, std::size_t count,
                           std::span<const std::size_t> indices,
                           std::uint64_t master_seed, unsigned threads) {
  if (count == 0) throw std::invalid_argument("sample_outputs: count must be >= 1");
  check_input(config, input);
  SampleBatch batch;
  batch.config_digest = config_digest(config);
  batch.input.assign(input.begin(), input.end());
  batch.projection.assign(indices.begin(), indices.end());
  batch.master_seed = master_seed;
  batch.values = Matrix(count, indices.size());
  parallel_for(count, threads, [&](std::size_t m) {
    const auto row = forward_projected(config, input, indices,
                                       RandomStream{master_seed, m});
    std::copy(row.begin(), row.end(), batch.values.row(m).begin());
  });
  return batch;
}

}  // namespace widelab
