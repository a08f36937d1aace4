#include "widelab/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "widelab/errors.hpp"
#include "widelab/experiments.hpp"
#include "widelab/kernel.hpp"
#include "widelab/quadrature.hpp"

namespace widelab {
namespace {

struct Common {
  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  // Network overrides, raw flag text keyed by config key.
  std::map<std::string, std::string> network_flags;
};

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config", "'" + path + "' is not valid JSON: " + e.what());
  }
}

nlohmann::json parse_flag_value(const std::string& key, const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    throw ConfigError(key, "cannot parse '" + text + "'");
  }
}

// Flag text to JSON for one network key.
nlohmann::json network_flag_json(const std::string& key, const std::string& text) {
  if (key == "activation" || key == "hidden_law") return text;
  if (key == "switch_index" && (text == "none" || text == "null")) return nullptr;
  if (key == "input" && text == "ones") return text;
  if (key == "widths" || key == "input") return parse_flag_value(key, "[" + text + "]");
  return parse_flag_value(key, text);
}

void apply_network_flags(nlohmann::json& network, const Common& c) {
  for (const auto& [key, text] : c.network_flags) network[key] = network_flag_json(key, text);
}

// A config file holds either a network object or a study object with a
// "network" member.
nlohmann::json network_json_from(const Common& c) {
  nlohmann::json net = nlohmann::json::object();
  if (!c.config_path.empty()) {
    nlohmann::json doc = load_json(c.config_path);
    net = doc.contains("network") ? doc.at("network") : doc;
  }
  apply_network_flags(net, c);
  return net;
}

NetworkConfig network_from(const Common& c) {
  return network_config_from_json(network_json_from(c));
}

void add_common(CLI::App* sub, Common& c, bool with_format) {
  sub->add_option("--config", c.config_path, "JSON config file");
  sub->add_option("--out", c.out_path, "Output file (default: stdout)");
  sub->add_option("--seed", c.seed, "Master seed");
  sub->add_option("--threads", c.threads, "Worker cap (0 = all cores)");
  if (with_format) {
    sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  }
  for (const char* key : {"depth", "widths", "c_w", "c_b", "activation", "hidden_law",
                          "switch_index", "input"}) {
    const std::string k = key;
    sub->add_option_function<std::string>(
        "--" + k, [&c, k](const std::string& v) { c.network_flags[k] = v; },
        "Override network." + k);
  }
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : fallback_(fallback), path_(path) {}

  std::ostream& stream() { return path_.empty() ? fallback_ : buffer_; }

  void commit() {
    if (path_.empty()) return;
    std::ofstream file(path_, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot open '" + path_ + "' for writing");
    file << buffer_.str();
    if (!file) throw std::runtime_error("failed writing '" + path_ + "'");
  }

 private:
  std::ostream& fallback_;
  std::string path_;
  std::ostringstream buffer_;
};

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << "\n";
}

// ---- kernel ----

struct KernelArgs {
  std::string y;
  std::size_t order = kDefaultQuadratureOrder;
};

void run_kernel(const Common& c, const KernelArgs& a, std::ostream& out, std::ostream& err) {
  const NetworkConfig net = network_from(c);
  if (auto w = regularity_warning(net.activation, "kernel recursion")) print_warnings({*w}, err);
  const auto x = resolve_input(net);
  std::vector<double> y = x;
  if (!a.y.empty()) {
    y = parse_flag_value("y", "[" + a.y + "]").get<std::vector<double>>();
    if (y.size() != x.size()) throw ConfigError("y", "length must equal widths[0]");
  }
  const auto rule = gauss_hermite(a.order);
  const KernelSequence seq = kernel_cross_sequence(net, x, y, rule);
  auto records = nlohmann::ordered_json::array();
  for (std::size_t l = 0; l < seq.diag.size(); ++l) {
    records.push_back(nlohmann::ordered_json{{"layer", l + 1},
                       {"k_xx", seq.diag[l]},
                       {"k_xy", (*seq.cross)[l]},
                       {"k_yy", (*seq.cross_diag_y)[l]}});
  }
  Output o(c.out_path, out);
  o.stream() << records.dump(2) << "\n";
  o.commit();
}

// ---- sample ----

struct SampleArgs {
  std::size_t count = 1000;
  std::size_t coordinate = 0;
  bool limit = false;
};

void run_sample(const Common& c, const SampleArgs& a, std::ostream& out, std::ostream& err) {
  const NetworkConfig net = network_from(c);
  if (auto w = regularity_warning(net.activation, "sampling")) print_warnings({*w}, err);
  if (a.count == 0) throw ConfigError("count", "must be >= 1");
  const std::uint64_t seed = c.seed.value_or(kDefaultSeed);
  const auto input = resolve_input(net);
  SampleBatch batch;
  if (a.limit) {
    const double v = kernel_diag_sequence(net, input, gauss_hermite(kDefaultQuadratureOrder))
                         .output_variance();
    batch = limit_gaussian_sampler(v, 1, a.count, seed);
  } else {
    const std::size_t idx[] = {a.coordinate};
    if (a.coordinate >= net.output_dim()) throw ConfigError("coordinate", "out of range");
    batch = sample_outputs(net, input, a.count, idx, seed, c.threads);
  }
  Output o(c.out_path, out);
  auto& s = o.stream();
  s << "# config_digest: " << batch.config_digest << "\n";
  s << "# seed: " << seed << "\n";
  s << "index,value\n";
  for (std::size_t m = 0; m < batch.values.rows; ++m) {
    s << m << ',' << format_double(batch.values.row(m)[0]) << '\n';
  }
  o.commit();
}

// ---- convergence ----

struct ConvergenceArgs {
  std::string preset;
  std::optional<std::string> schedule;
  std::optional<std::size_t> samples_base;
  std::optional<std::size_t> samples_n_min;
  bool samples_fixed = false;
  std::optional<std::size_t> repetitions;
  std::optional<std::string> metrics;
};

StudyConfig study_from(const Common& c, const ConvergenceArgs& a) {
  nlohmann::json doc;
  if (!a.preset.empty()) {
    doc = to_json(study_preset(a.preset));
  } else if (!c.config_path.empty()) {
    doc = load_json(c.config_path);
  } else {
    doc = to_json(StudyConfig{});
  }
  if (!doc.is_object()) throw ConfigError("config", "expected a JSON object");
  if (!c.network_flags.empty()) {
    if (!doc.contains("network")) doc["network"] = nlohmann::json::object();
    apply_network_flags(doc["network"], c);
  }
  if (a.schedule) doc["schedule"] = parse_flag_value("schedule", "[" + *a.schedule + "]");
  if (a.samples_base) doc["samples"]["base"] = *a.samples_base;
  if (a.samples_n_min) doc["samples"]["n_min"] = *a.samples_n_min;
  if (a.samples_fixed) doc["samples"]["proportional"] = false;
  if (a.repetitions) doc["repetitions"] = *a.repetitions;
  if (c.seed) doc["seed"] = *c.seed;
  if (a.metrics) {
    auto list = nlohmann::json::array();
    std::stringstream ss(*a.metrics);
    std::string name;
    while (std::getline(ss, name, ',')) list.push_back(name);
    doc["metrics"] = list;
  }
  StudyConfig study = study_config_from_json(doc);
  study.threads = c.threads;
  return study;
}

void run_convergence(const Common& c, const ConvergenceArgs& a, std::ostream& out,
                     std::ostream& err) {
  const StudyConfig study = study_from(c, a);
  const OutputFormat format = parse_format(c.format);
  const ConvergenceTable table = run_convergence_study(study);
  print_warnings(table.warnings, err);
  if (c.out_path.empty()) {
    out << format_results(table, format);
  } else {
    emit_results(table, format, c.out_path);
  }
}

// ---- ablation ----

struct AblationArgs {
  std::optional<std::string> k_list;
  std::string observable = "tanh";
  std::size_t samples = 10000;
  bool unpaired = false;
};

void run_ablation_cmd(const Common& c, const AblationArgs& a, std::ostream& out,
                      std::ostream& err) {
  AblationConfig cfg;
  cfg.network = network_from(c);
  if (a.k_list) cfg.k_list = parse_flag_value("k_list", "[" + *a.k_list + "]").get<std::vector<int>>();
  cfg.observable = parse_observable(a.observable);
  cfg.samples = a.samples;
  cfg.seed = c.seed.value_or(kDefaultSeed);
  cfg.paired = !a.unpaired;
  cfg.threads = c.threads;
  const SwitchDecayTable table = run_switch_ablation(cfg);
  print_warnings(table.warnings, err);
  Output o(c.out_path, out);
  auto& s = o.stream();
  if (c.format == "json") {
    auto rows = nlohmann::json::array();
    for (const auto& r : table.rows) {
      rows.push_back({{"k", r.k}, {"width", r.width}, {"difference", r.difference},
                      {"abs_difference", r.abs_difference},
                      {"standard_error", r.standard_error}, {"samples", r.samples}});
    }
    s << nlohmann::json{{"config_digest", table.config_digest}, {"rows", rows}}.dump(2) << "\n";
  } else {
    s << "# config_digest: " << table.config_digest << "\n";
    s << "k,width,difference,abs_difference,standard_error,samples\n";
    for (const auto& r : table.rows) {
      s << r.k << ',' << r.width << ',' << format_double(r.difference) << ','
        << format_double(r.abs_difference) << ',' << format_double(r.standard_error) << ','
        << r.samples << '\n';
    }
  }
  o.commit();
}

// ---- last-layer ----

struct LastLayerArgs {
  std::optional<std::string> last_widths;
  std::optional<std::size_t> samples_base;
  std::optional<std::size_t> samples_n_min;
  std::size_t min_width = 64;
};

void run_last_layer_cmd(const Common& c, const LastLayerArgs& a, std::ostream& out,
                        std::ostream& err) {
  LastLayerConfig cfg;
  cfg.network = network_from(c);
  if (a.last_widths) {
    cfg.widths = parse_flag_value("last_widths", "[" + *a.last_widths + "]")
                     .get<std::vector<std::size_t>>();
  }
  if (a.samples_base) cfg.samples.base = *a.samples_base;
  if (a.samples_n_min) cfg.samples.n_min = *a.samples_n_min;
  cfg.seed = c.seed.value_or(kDefaultSeed);
  cfg.threads = c.threads;
  const LastLayerTable table = run_last_layer_check(cfg);
  print_warnings(table.warnings, err);
  std::optional<RateFit> fit;
  try {
    fit = fit_rate(table, a.min_width);
  } catch (const std::invalid_argument& e) {
    err << "warning: no rate fit: " << e.what() << "\n";
  }
  Output o(c.out_path, out);
  auto& s = o.stream();
  if (c.format == "json") {
    auto rows = nlohmann::json::array();
    for (const auto& r : table.rows) {
      rows.push_back({{"width", r.width}, {"w2", r.w2}, {"samples", r.samples}});
    }
    nlohmann::json doc{{"config_digest", table.config_digest}, {"rows", rows}};
    doc["fit"] = fit ? to_json(*fit) : nlohmann::json(nullptr);
    s << doc.dump(2) << "\n";
  } else {
    s << "# config_digest: " << table.config_digest << "\n";
    if (fit) s << "# fit: " << to_json(*fit).dump() << "\n";
    s << "width,w2,samples\n";
    for (const auto& r : table.rows) {
      s << r.width << ',' << format_double(r.w2) << ',' << r.samples << '\n';
    }
  }
  o.commit();
}

// ---- fit ----

struct FitArgs {
  std::string in_path;
  std::string metric = "w1";
  std::size_t min_width = 64;
};

void run_fit(const Common& c, const FitArgs& a, std::ostream& out) {
  if (!std::filesystem::exists(a.in_path)) {
    throw ConfigError("in", "cannot open '" + a.in_path + "'");
  }
  const ConvergenceTable table = read_results(a.in_path);
  const RateFit fit = fit_rate(table, parse_metric(a.metric), a.min_width);
  Output o(c.out_path, out);
  o.stream() << to_json(fit).dump(2) << "\n";
  o.commit();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-width versus Gaussian-limit experiments for random networks", "widelab"};
  app.require_subcommand(1);

  Common common;

  KernelArgs kernel_args;
  auto* kernel = app.add_subcommand("kernel", "Print the limit kernel recursion as JSON");
  add_common(kernel, common, false);
  kernel->add_option("--y", kernel_args.y, "Second input point, comma separated");
  kernel->add_option("--order", kernel_args.order, "Gauss-Hermite order");

  SampleArgs sample_args;
  auto* sample = app.add_subcommand("sample", "Draw network outputs as index,value CSV");
  add_common(sample, common, false);
  sample->add_option("--count", sample_args.count, "Number of realizations");
  sample->add_option("--coordinate", sample_args.coordinate, "Output coordinate");
  sample->add_flag("--limit", sample_args.limit, "Draw from the Gaussian limit instead");

  ConvergenceArgs conv_args;
  auto* conv = app.add_subcommand("convergence", "Distance-to-limit study over widths");
  add_common(conv, common, true);
  auto* preset_opt = conv->add_option("--preset", conv_args.preset, "Embedded study preset")
                         ->check(CLI::IsMember(preset_names()));
  conv->get_option("--config")->excludes(preset_opt);
  conv->add_option("--schedule", conv_args.schedule, "Hidden widths, comma separated");
  conv->add_option("--samples-base", conv_args.samples_base, "samples.base");
  conv->add_option("--samples-n-min", conv_args.samples_n_min, "samples.n_min");
  conv->add_flag("--samples-fixed", conv_args.samples_fixed, "samples.proportional = false");
  conv->add_option("--repetitions", conv_args.repetitions, "Repetitions per width");
  conv->add_option("--metrics", conv_args.metrics, "Metrics, comma separated");

  AblationArgs abl_args;
  auto* abl = app.add_subcommand("ablation", "Layer-by-layer Gaussian switching estimates");
  add_common(abl, common, true);
  abl->add_option("--k-list", abl_args.k_list, "Switch indices K, comma separated");
  abl->add_option("--observable", abl_args.observable, "tanh, cos or one");
  abl->add_option("--samples", abl_args.samples, "Paired realizations");
  abl->add_flag("--unpaired", abl_args.unpaired, "Independent randomness per network");

  LastLayerArgs ll_args;
  auto* ll = app.add_subcommand("last-layer", "W2 between original and Gaussian output layer");
  add_common(ll, common, true);
  ll->add_option("--last-widths", ll_args.last_widths, "Values of n_L, comma separated");
  ll->add_option("--samples-base", ll_args.samples_base, "Realizations at the smallest n_L");
  ll->add_option("--samples-n-min", ll_args.samples_n_min, "Reference n_L for samples-base");
  ll->add_option("--min-width", ll_args.min_width, "Smallest n_L in the rate fit");

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "Log-log rate fit of a convergence results file");
  fit->add_option("--in", fit_args.in_path, "Results file (csv or json)")->required();
  fit->add_option("--metric", fit_args.metric, "kolmogorov, w1 or w2");
  fit->add_option("--min-width", fit_args.min_width, "Smallest width in the fit");
  fit->add_option("--out", common.out_path, "Output file (default: stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const auto* active = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << active->help();
    return 2;
  }

  try {
    if (kernel->parsed()) run_kernel(common, kernel_args, out, err);
    if (sample->parsed()) run_sample(common, sample_args, out, err);
    if (conv->parsed()) run_convergence(common, conv_args, out, err);
    if (abl->parsed()) run_ablation_cmd(common, abl_args, out, err);
    if (ll->parsed()) run_last_layer_cmd(common, ll_args, out, err);
    if (fit->parsed()) run_fit(common, fit_args, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace widelab
