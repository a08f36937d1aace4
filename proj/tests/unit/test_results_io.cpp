#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "widelab/experiments.hpp"

using namespace widelab;

namespace {

std::filesystem::path tmp(const std::string& name) {
  return std::filesystem::path(WIDELAB_TEST_TMP) / ("results_io_" + name);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ConvergenceTable sample_table() {
  StudyConfig s;
  s.widths_schedule = {16, 32, 64, 128};
  s.samples = {40, 16, true};
  s.repetitions = 2;
  auto t = run_convergence_study(s);
  t.fits.push_back(fit_rate(t, Metric::w1, 16));
  return t;
}

}  // namespace

TEST_CASE("format_double is shortest round-trip") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 123456789.0, -2.5e-7, 0.0}) {
    const auto s = format_double(x);
    CHECK(std::stod(s) == x);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("format names") {
  CHECK(parse_format("csv") == OutputFormat::csv);
  CHECK(parse_format("json") == OutputFormat::json);
  CHECK_THROWS(parse_format("xml"));
}

TEST_CASE("empty table writes a header-only CSV") {
  ConvergenceTable t;
  const auto csv = format_results(t, OutputFormat::csv);
  std::istringstream in(csv);
  std::string line, last;
  while (std::getline(in, line)) {
    if (line[0] != '#') last = line;
  }
  CHECK(last == "width,metric,value,std,sample_count,repetitions,seed");
  emit_results(t, OutputFormat::csv, tmp("empty.csv"));
  CHECK(read_results_csv(tmp("empty.csv")).rows.empty());
}

TEST_CASE("CSV layout and round trip") {
  const auto t = sample_table();
  const auto csv = format_results(t, OutputFormat::csv);
  CHECK(csv.rfind("# widelab convergence study\n# config: {", 0) == 0);
  CHECK(csv.find("\nwidth,metric,value,std,sample_count,repetitions,seed\n16,kolmogorov,") !=
        std::string::npos);

  emit_results(t, OutputFormat::csv, tmp("t.csv"));
  CHECK(slurp(tmp("t.csv")) == csv);
  const auto back = read_results_csv(tmp("t.csv"));
  CHECK(to_json(back.study) == to_json(t.study));
  CHECK(back.limit_variance == t.limit_variance);
  CHECK(back.config_digest == t.config_digest);
  REQUIRE(back.rows.size() == t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    CHECK(back.rows[i].width == t.rows[i].width);
    for (Metric m : t.study.metrics) {
      CHECK(back.rows[i].report.value(m) == t.rows[i].report.value(m));
      CHECK(back.rows[i].report.std_dev(m) == t.rows[i].report.std_dev(m));
    }
  }
  // re-emitting the parsed CSV reproduces the bytes
  CHECK(format_results(back, OutputFormat::csv) == csv);
}

TEST_CASE("JSON round trip reconstructs the table exactly") {
  const auto t = sample_table();
  emit_results(t, OutputFormat::json, tmp("t.json"));
  const auto back = read_results(tmp("t.json"));
  CHECK(format_results(back, OutputFormat::json) == format_results(t, OutputFormat::json));
  REQUIRE(back.rows.size() == t.rows.size());
  CHECK(back.rows[2].output_second_moment == t.rows[2].output_second_moment);
  REQUIRE(back.fits.size() == 1);
  CHECK(back.fits[0].slope == t.fits[0].slope);
  const auto doc = nlohmann::json::parse(slurp(tmp("t.json")));
  for (const char* key : {"config", "limit_variance", "rows", "fits"}) CHECK(doc.contains(key));
}

TEST_CASE("I/O failures name the path") {
  const ConvergenceTable t;
  const std::string bad = "/nonexistent-dir/x.csv";
  try {
    emit_results(t, OutputFormat::csv, bad);
    FAIL("expected failure");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find(bad) != std::string::npos);
  }
  try {
    read_results(bad);
    FAIL("expected failure");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find(bad) != std::string::npos);
  }
}

TEST_CASE("malformed CSV reports the row number") {
  {
    std::ofstream out(tmp("bad.csv"));
    out << "width,metric,value,std,sample_count,repetitions,seed\n16,w1,0.1,0.01,10,1,5\n32,w1,abc,0.1,10,1,5\n";
  }
  try {
    read_results_csv(tmp("bad.csv"));
    FAIL("expected failure");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find(":3") != std::string::npos);
  }
  {
    std::ofstream out(tmp("blank.csv"));
  }
  CHECK_THROWS(read_results_csv(tmp("blank.csv")));
}
