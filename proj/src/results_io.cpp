#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include "widelab/errors.hpp"
#include "widelab/experiments.hpp"

namespace widelab {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

OutputFormat parse_format(std::string_view name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw ConfigError("format", "expected csv or json, got '" + std::string(name) + "'");
}

nlohmann::json to_json(const RateFit& fit) {
  return {{"metric", fit.metric},       {"slope", fit.slope},
          {"intercept", fit.intercept}, {"stderr", fit.stderr_slope},
          {"min_width", fit.min_width}, {"max_width", fit.max_width},
          {"points", fit.points}};
}

namespace {

constexpr const char* kCsvHeader = "width,metric,value,std,sample_count,repetitions,seed";

RateFit fit_from_json(const nlohmann::json& j) {
  RateFit f;
  f.metric = j.at("metric").get<std::string>();
  f.slope = j.at("slope").get<double>();
  f.intercept = j.at("intercept").get<double>();
  f.stderr_slope = j.at("stderr").get<double>();
  f.min_width = j.at("min_width").get<std::size_t>();
  f.max_width = j.at("max_width").get<std::size_t>();
  f.points = j.at("points").get<std::size_t>();
  return f;
}

std::string to_csv(const ConvergenceTable& table) {
  std::ostringstream out;
  out << "# widelab convergence study\n";
  out << "# config: " << to_json(table.study).dump() << "\n";
  out << "# config_digest: " << table.config_digest << "\n";
  out << "# limit_variance: " << format_double(table.limit_variance) << "\n";
  out << kCsvHeader << "\n";
  for (const auto& row : table.rows) {
    for (Metric m : table.study.metrics) {
      out << row.width << ',' << to_string(m) << ',' << format_double(row.report.value(m))
          << ',' << format_double(row.report.std_dev(m)) << ',' << row.report.sample_count
          << ',' << row.report.repetitions << ',' << table.study.seed << '\n';
    }
  }
  return out.str();
}

nlohmann::json to_json_doc(const ConvergenceTable& table) {
  nlohmann::json doc;
  doc["config"] = to_json(table.study);
  doc["config_digest"] = table.config_digest;
  doc["limit_variance"] = table.limit_variance;
  auto rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json r;
    r["width"] = row.width;
    for (Metric m : {Metric::kolmogorov, Metric::w1, Metric::w2}) {
      r[std::string(to_string(m))] = {{"value", row.report.value(m)},
                                      {"std", row.report.std_dev(m)}};
    }
    r["sample_count"] = row.report.sample_count;
    r["repetitions"] = row.report.repetitions;
    r["output_second_moment"] = row.output_second_moment;
    r["output_second_moment_se"] = row.output_second_moment_se;
    rows.push_back(r);
  }
  doc["rows"] = rows;
  auto fits = nlohmann::json::array();
  for (const auto& f : table.fits) fits.push_back(to_json(f));
  doc["fits"] = fits;
  doc["warnings"] = table.warnings;
  return doc;
}

void set_metric(DistanceReport& r, Metric m, double value, double std_dev) {
  switch (m) {
    case Metric::kolmogorov: r.kolmogorov = value; r.kolmogorov_std = std_dev; break;
    case Metric::w1: r.w1 = value; r.w1_std = std_dev; break;
    case Metric::w2: r.w2 = value; r.w2_std = std_dev; break;
  }
}

double parse_number(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error(where + ": not a number: '" + s + "'");
  }
  return v;
}

}  // namespace

std::string format_results(const ConvergenceTable& table, OutputFormat format) {
  if (format == OutputFormat::csv) return to_csv(table);
  return to_json_doc(table).dump(2) + "\n";
}

void emit_results(const ConvergenceTable& table, OutputFormat format,
                  const std::filesystem::path& path) {
  const std::string text = format_results(table, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  out.close();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

ConvergenceTable table_from_json(const nlohmann::json& doc) {
  ConvergenceTable t;
  t.study = study_config_from_json(doc.at("config"));
  t.config_digest = doc.at("config_digest").get<std::string>();
  t.limit_variance = doc.at("limit_variance").get<double>();
  for (const auto& r : doc.at("rows")) {
    ConvergenceRow row;
    row.width = r.at("width").get<std::size_t>();
    for (Metric m : {Metric::kolmogorov, Metric::w1, Metric::w2}) {
      const auto& cell = r.at(std::string(to_string(m)));
      set_metric(row.report, m, cell.at("value").get<double>(), cell.at("std").get<double>());
    }
    row.report.sample_count = r.at("sample_count").get<std::size_t>();
    row.report.repetitions = r.at("repetitions").get<std::size_t>();
    row.output_second_moment = r.at("output_second_moment").get<double>();
    row.output_second_moment_se = r.at("output_second_moment_se").get<double>();
    t.rows.push_back(row);
  }
  for (const auto& f : doc.at("fits")) t.fits.push_back(fit_from_json(f));
  if (doc.contains("warnings")) t.warnings = doc.at("warnings").get<std::vector<std::string>>();
  return t;
}

ConvergenceTable read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("in", "cannot open '" + path.string() + "'");
  ConvergenceTable t;
  std::map<std::size_t, ConvergenceRow> rows;
  std::vector<Metric> seen_metrics;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = line.substr(1);
      auto value_of = [&](std::string_view key) -> std::optional<std::string> {
        const std::string prefix = " " + std::string(key) + ": ";
        if (body.rfind(prefix, 0) == 0) return body.substr(prefix.size());
        return std::nullopt;
      };
      if (auto v = value_of("config")) {
        t.study = study_config_from_json(nlohmann::json::parse(*v));
      } else if (auto d = value_of("config_digest")) {
        t.config_digest = *d;
      } else if (auto lv = value_of("limit_variance")) {
        t.limit_variance = parse_number(*lv, where);
      }
      continue;
    }
    if (!header_seen) {
      if (line != kCsvHeader) throw std::runtime_error(where + ": unexpected CSV header");
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) throw std::runtime_error(where + ": expected 7 columns");
    const auto width = static_cast<std::size_t>(parse_number(cells[0], where));
    const Metric m = parse_metric(cells[1]);
    auto& row = rows[width];
    row.width = width;
    set_metric(row.report, m, parse_number(cells[2], where), parse_number(cells[3], where));
    row.report.sample_count = static_cast<std::size_t>(parse_number(cells[4], where));
    row.report.repetitions = static_cast<std::size_t>(parse_number(cells[5], where));
    t.study.seed = static_cast<std::uint64_t>(std::stoull(cells[6]));
    if (std::find(seen_metrics.begin(), seen_metrics.end(), m) == seen_metrics.end()) {
      seen_metrics.push_back(m);
    }
  }
  if (!header_seen) throw std::runtime_error(path.string() + ": missing CSV header");
  for (auto& [w, row] : rows) t.rows.push_back(row);
  if (!seen_metrics.empty()) t.study.metrics = seen_metrics;
  return t;
}

ConvergenceTable read_results(const std::filesystem::path& path) {
  if (path.extension() == ".json") {
    std::ifstream in(path);
    if (!in) throw ConfigError("in", "cannot open '" + path.string() + "'");
    return table_from_json(nlohmann::json::parse(in));
  }
  return read_results_csv(path);
}

}  // namespace widelab
