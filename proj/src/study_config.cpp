#include <algorithm>

#include "widelab/errors.hpp"
#include "widelab/experiments.hpp"

namespace widelab {

void StudyConfig::validate() const {
  network.validate();
  if (network.output_dim() != 1) {
    throw ConfigError("widths", "the convergence study needs a scalar output (n_{L+1} = 1)");
  }
  if (widths_schedule.empty()) throw ConfigError("schedule", "must not be empty");
  for (std::size_t i = 0; i < widths_schedule.size(); ++i) {
    if (widths_schedule[i] == 0) throw ConfigError("schedule", "widths must be >= 1");
    if (i > 0 && widths_schedule[i] <= widths_schedule[i - 1]) {
      throw ConfigError("schedule", "widths must be strictly increasing");
    }
  }
  if (samples.base == 0) throw ConfigError("samples", "base must be >= 1");
  if (samples.proportional && samples.n_min == 0) {
    throw ConfigError("samples", "n_min must be >= 1");
  }
  for (std::size_t w : widths_schedule) {
    if (samples.count(w) < 2) throw ConfigError("samples", "M(n) must be >= 2");
  }
  if (repetitions == 0) throw ConfigError("repetitions", "must be >= 1");
  if (metrics.empty()) throw ConfigError("metrics", "must not be empty");
}

nlohmann::json to_json(const StudyConfig& study) {
  nlohmann::json j;
  j["network"] = to_json(study.network);
  j["schedule"] = study.widths_schedule;
  j["samples"] = {{"base", study.samples.base},
                  {"n_min", study.samples.n_min},
                  {"proportional", study.samples.proportional}};
  j["repetitions"] = study.repetitions;
  j["seed"] = study.seed;
  auto metrics = nlohmann::json::array();
  for (Metric m : study.metrics) metrics.push_back(std::string(to_string(m)));
  j["metrics"] = metrics;
  return j;
}

namespace {

template <class T>
T field(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(key, std::string("invalid value (") + e.what() + ")");
  }
}

}  // namespace

StudyConfig study_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("study", "expected a JSON object");
  StudyConfig s;
  for (const auto& [key, value] : j.items()) {
    if (key == "network") {
      s.network = network_config_from_json(value);
    } else if (key == "schedule") {
      s.widths_schedule = field<std::vector<std::size_t>>(j, "schedule");
    } else if (key == "samples") {
      if (!value.is_object()) throw ConfigError("samples", "expected an object");
      for (const auto& [k, v] : value.items()) {
        if (k == "base") {
          s.samples.base = field<std::size_t>(value, "base");
        } else if (k == "n_min") {
          s.samples.n_min = field<std::size_t>(value, "n_min");
        } else if (k == "proportional") {
          s.samples.proportional = field<bool>(value, "proportional");
        } else {
          throw ConfigError("samples." + k, "unknown key");
        }
      }
    } else if (key == "repetitions") {
      s.repetitions = field<std::size_t>(j, "repetitions");
    } else if (key == "seed") {
      s.seed = field<std::uint64_t>(j, "seed");
    } else if (key == "metrics") {
      s.metrics.clear();
      for (const auto& name : field<std::vector<std::string>>(j, "metrics")) {
        s.metrics.push_back(parse_metric(name));
      }
    } else {
      throw ConfigError(key, "unknown study key");
    }
  }
  s.validate();
  return s;
}

namespace {

// L = 3, scalar output, sigmoid, zero biases, Laplace hidden weights,
// Gaussian first layer, x = (1, 1, 1, 1), c_w = 1.
constexpr const char* kAppendixA = R"({
  "network": {"depth": 3, "widths": [4, 16, 16, 16, 1], "c_w": 1.0, "c_b": 0.0,
              "activation": "sigmoid", "hidden_law": "laplace",
              "switch_index": null, "input": "ones"},
  "schedule": [16, 32, 64, 128, 256, 512, 1024, 2048, 4096, 8192],
  "samples": {"base": 800, "n_min": 16, "proportional": true},
  "repetitions": 6,
  "seed": 20240611,
  "metrics": ["kolmogorov", "w1", "w2"]
})";

constexpr const char* kAppendixADesk = R"({
  "network": {"depth": 3, "widths": [4, 16, 16, 16, 1], "c_w": 1.0, "c_b": 0.0,
              "activation": "sigmoid", "hidden_law": "laplace",
              "switch_index": null, "input": "ones"},
  "schedule": [16, 32, 64, 128, 256, 512, 1024],
  "samples": {"base": 200, "n_min": 16, "proportional": true},
  "repetitions": 3,
  "seed": 20240611,
  "metrics": ["kolmogorov", "w1", "w2"]
})";

}  // namespace

std::vector<std::string> preset_names() { return {"appendix-a", "appendix-a-desk"}; }

StudyConfig study_preset(std::string_view name) {
  if (name == "appendix-a") return study_config_from_json(nlohmann::json::parse(kAppendixA));
  if (name == "appendix-a-desk") {
    return study_config_from_json(nlohmann::json::parse(kAppendixADesk));
  }
  throw ConfigError("preset", "unknown preset '" + std::string(name) + "'");
}

}  // namespace widelab
