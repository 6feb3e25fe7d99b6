#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cpb/io.hpp"
#include "cpb/rng.hpp"
#include "test_support.hpp"

using namespace cpb;

namespace {

// Deterministic synthetic daily flows: seasonal base plus seeded noise, one
// value per calendar day (Feb 29 included unless told otherwise).
std::string daily_fixture(int first_year, int last_year, std::uint64_t seed,
                          bool include_leap_days = true,
                          const std::string& skip_date = "") {
  RngStream rng(seed);
  std::ostringstream out;
  out << "date,flow\n";
  CalendarDate date{first_year, 1, 1};
  while (date.year <= last_year) {
    const bool leap_day = date.month == 2 && date.day == 29;
    const std::string text = format_date(date);
    if ((include_leap_days || !leap_day) && text != skip_date) {
      const double seasonal =
          10.0 + 5.0 * std::sin(6.28318 * (date.month - 1) / 12.0);
      const double flow = seasonal + std::abs(rng.next_gaussian());
      out << text << ',' << flow << '\n';
    }
    date = next_day(date);
  }
  return out.str();
}

std::string annual_fixture(int first_year, int count, std::uint64_t seed) {
  RngStream rng(seed);
  std::ostringstream out;
  out << "year,value\n";
  for (int i = 0; i < count; ++i) {
    out << (first_year + i) << ',' << (1500.0 + 400.0 * rng.next_gaussian()) << '\n';
  }
  return out.str();
}

}  // namespace

TEST_CASE("daily flows parse into 365-point annual curves") {
  std::istringstream in(daily_fixture(1911, 1913, 1));  // 1912 is a leap year
  const AnnualCurves curves = parse_daily_flows(in, "fixture");
  CHECK(curves.years == std::vector<int>{1911, 1912, 1913});
  CHECK(curves.sample.size() == 3);
  CHECK(curves.sample.grid()->size() == 365);
  CHECK(curves.sample.grid()->quad_weights.sum() ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("a leap day row is dropped silently, and may be absent") {
  std::istringstream with_leap(daily_fixture(1911, 1913, 2, true));
  std::istringstream without_leap(daily_fixture(1911, 1913, 2, false));
  const AnnualCurves a = parse_daily_flows(with_leap, "with");
  const AnnualCurves b = parse_daily_flows(without_leap, "without");
  CHECK(a.sample.grid()->size() == 365);
  CHECK(b.sample.grid()->size() == 365);
  // identical fixtures except the leap day produce slightly different noise
  // sequences, so only shape is compared here
  CHECK(a.years == b.years);
}

TEST_CASE("ingestion is lossless for the days that are kept") {
  const std::string text = daily_fixture(1911, 1912, 3);
  std::istringstream in(text);
  const AnnualCurves curves = parse_daily_flows(in, "fixture");

  // re-read the raw rows and compare a handful of (date -> value) pairs
  std::istringstream raw(text);
  std::string line;
  std::getline(raw, line);  // header
  int row = 0;
  while (std::getline(raw, line)) {
    ++row;
    const auto comma = line.find(',');
    const std::string date_text = line.substr(0, comma);
    const double value = std::stod(line.substr(comma + 1));
    if (date_text == "1911-01-01") CHECK(curves.sample.values()(0, 0) == value);
    if (date_text == "1911-12-31") CHECK(curves.sample.values()(364, 0) == value);
    if (date_text == "1912-03-01") CHECK(curves.sample.values()(59, 1) == value);
    if (date_text == "1912-12-31") CHECK(curves.sample.values()(364, 1) == value);
  }
  CHECK(row == 365 + 366);
}

TEST_CASE("a missing day is reported with its date") {
  std::istringstream in(daily_fixture(1910, 1912, 4, true, "1911-07-04"));
  CHECK_THROWS_WITH_AS(parse_daily_flows(in, "fixture"),
                       doctest::Contains("1911-07-04"), ParseError);
}

TEST_CASE("non-monotone dates are rejected") {
  std::string text = "date,flow\n1911-01-01,1\n1911-01-02,1\n1911-01-02,1\n";
  std::istringstream in(text);
  CHECK_THROWS_WITH_AS(parse_daily_flows(in, "fixture"),
                       doctest::Contains("not increasing"), ParseError);
}

TEST_CASE("partial years at either end are rejected") {
  std::istringstream late_start("date,flow\n1911-03-01,1\n1911-03-02,1\n");
  CHECK_THROWS_WITH_AS(parse_daily_flows(late_start, "fixture"),
                       doctest::Contains("1911-01-01"), ParseError);

  std::string truncated = daily_fixture(1911, 1912, 5);
  truncated.resize(truncated.rfind("1912-12-31"));
  std::istringstream in(truncated);
  CHECK_THROWS_WITH_AS(parse_daily_flows(in, "fixture"),
                       doctest::Contains("1912-12-31"), ParseError);
}

TEST_CASE("fewer than two complete years is an argument error") {
  std::istringstream in(daily_fixture(1911, 1911, 6));
  CHECK_THROWS_AS(parse_daily_flows(in, "fixture"), std::invalid_argument);
}

TEST_CASE("negative flows and malformed rows are rejected with locations") {
  std::istringstream negative("date,flow\n1911-01-01,-3.0\n");
  CHECK_THROWS_WITH_AS(parse_daily_flows(negative, "fixture"),
                       doctest::Contains("nonnegative"), ParseError);
  std::istringstream malformed("date,flow\n1911-01-01\n");
  CHECK_THROWS_WITH_AS(parse_daily_flows(malformed, "fixture"),
                       doctest::Contains("fixture:2"), ParseError);
  std::istringstream bad_header("time,discharge\n");
  CHECK_THROWS_AS(parse_daily_flows(bad_header, "fixture"), ParseError);
}

TEST_CASE("annual series parse with year labels") {
  std::istringstream in(annual_fixture(1850, 163, 7));
  const AnnualSeries series = parse_annual_series(in, "fixture");
  CHECK(series.values.size() == 163);
  CHECK(series.years.front() == 1850);
  CHECK(series.years.back() == 2012);
}

TEST_CASE("annual series labeling maps split index 50 to change year 1900") {
  std::istringstream in(annual_fixture(1850, 163, 8));
  const AnnualSeries series = parse_annual_series(in, "fixture");
  CHECK(argmax_year_label(series.years, 50) == 1899);
  CHECK(change_year_label(series.years, 50) == 1900);
}

TEST_CASE("annual series with duplicate or decreasing years fails") {
  std::istringstream dup("year,value\n1900,1\n1900,2\n");
  CHECK_THROWS_WITH_AS(parse_annual_series(dup, "fixture"),
                       doctest::Contains("strictly increasing"), ParseError);
  std::istringstream single("year,value\n1900,1\n");
  CHECK_THROWS_AS(parse_annual_series(single, "fixture"), std::invalid_argument);
}

TEST_CASE("curve CSV round trip preserves grids and values exactly") {
  RngStream rng(9);
  const auto grid = Grid::uniform(40);
  const FunctionalSample sample(grid, cpb::testing::random_matrix(40, 7, rng));
  std::ostringstream out;
  write_curves_csv(out, sample);
  std::istringstream in(out.str());
  const FunctionalSample parsed = parse_curves_csv(in, "roundtrip");
  CHECK(parsed.size() == 7);
  CHECK((parsed.grid()->points.array() == grid->points.array()).all());
  // weights are rebuilt from the points, identical up to one rounding step
  CHECK((parsed.grid()->quad_weights - grid->quad_weights).lpNorm<Eigen::Infinity>() <
        1e-15);
  CHECK((parsed.values().array() == sample.values().array()).all());
}

TEST_CASE("curve CSV rejects inconsistent grids") {
  std::istringstream in(
      "curve,t,value\n1,0,1\n1,1,2\n2,0,3\n2,0.5,4\n");
  CHECK_THROWS_WITH_AS(parse_curves_csv(in, "fixture"),
                       doctest::Contains("identical grid"), ParseError);
}

TEST_CASE("test report JSON round trips losslessly") {
  TestReportDoc report_doc;
  report_doc.statistic_kind = "cvm";
  report_doc.report.statistic = 0.123456789012345678;
  report_doc.report.argmax_m = 55;
  report_doc.report.quantile = 0.1;
  report_doc.report.p_value = 0.013;
  report_doc.report.reject = true;
  report_doc.report.alpha = 0.05;
  report_doc.report.plan = block_partition(103, 8);
  report_doc.report.seed = 42;
  Eigen::VectorXd reps(3);
  reps << 0.1, 0.01 + 0.02, std::exp(1.0);
  report_doc.report.replicates = reps;
  report_doc.argmax_year = 1964;
  report_doc.change_year = 1965;

  ReportDocument doc;
  doc.kind = ReportDocument::Kind::test_report;
  doc.input_digest = content_digest("example");
  doc.seed = 42;
  doc.payload = report_doc;

  const std::string json = emit_report(doc, ReportFormat::json);
  const ReportDocument parsed = parse_report(json);
  CHECK(parsed == doc);
  // serialization is deterministic
  CHECK(emit_report(parsed, ReportFormat::json) == json);
}

TEST_CASE("process trace documents round trip and serialize to CSV") {
  ProcessTraceDoc trace;
  trace.labels = {"1910", "1911", "1912"};
  Eigen::VectorXd values(3);
  values << 0.0, 0.25, 0.5;
  trace.values = values;
  trace.threshold = 0.4;

  ReportDocument doc;
  doc.kind = ReportDocument::Kind::process_trace;
  doc.input_digest = content_digest("trace");
  doc.seed = 7;
  doc.payload = trace;

  CHECK(parse_report(emit_report(doc, ReportFormat::json)) == doc);

  const std::string csv = emit_report(doc, ReportFormat::csv);
  CHECK(csv.find("index,label,value,threshold\n") == 0);
  CHECK(csv.find("1,1910,0,0.40000000000000002\n") != std::string::npos);
  CHECK(csv.find("3,1912,0.5,") != std::string::npos);
}

TEST_CASE("a trace of constant data is all zeros with a zero threshold") {
  const FunctionalSample s = cpb::testing::scalar_like({2.0, 2.0, 2.0, 2.0});
  BootstrapConfig config;
  config.block_rule = BlockRule::fixed(2);
  config.replicates = 19;
  config.seed = 1;
  config.alpha = 0.05;
  const TestReport report = run_test(s, config);

  ProcessTraceDoc trace;
  trace.values = cusum_process(s);
  trace.threshold = report.quantile;
  for (Eigen::Index m = 1; m <= 3; ++m) trace.labels.push_back(std::to_string(m));

  ReportDocument doc;
  doc.kind = ReportDocument::Kind::process_trace;
  doc.payload = trace;
  const std::string csv = emit_report(doc, ReportFormat::csv);
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    CHECK(line.find(",0,0") != std::string::npos);
  }
}

TEST_CASE("experiment table documents round trip, CSV carries no timings") {
  TableCellResult row;
  row.cell = table_cells(5).front();
  row.scale = "desk";
  row.runs = 500;
  row.replicates = 499;
  row.rejection_rate = 0.322;
  row.ci_halfwidth = 0.0627;
  row.abs_diff = 0.001;
  row.seconds = 123.0;  // not serialized
  row.master_seed = 99;

  ExperimentTableDoc table;
  table.table_id = 5;
  table.scale = "desk";
  table.rows = {row};

  ReportDocument doc;
  doc.kind = ReportDocument::Kind::experiment_table;
  doc.input_digest = content_digest("table");
  doc.seed = 99;
  doc.payload = table;

  const ReportDocument parsed = parse_report(emit_report(doc, ReportFormat::json));
  CHECK(parsed == doc);

  const std::string csv = emit_report(doc, ReportFormat::csv);
  CHECK(csv.find("rejection_rate") != std::string::npos);
  CHECK(csv.find("123") == std::string::npos);
  CHECK(csv.find("0.322") != std::string::npos);
}

TEST_CASE("test reports refuse CSV serialization") {
  ReportDocument doc;
  doc.kind = ReportDocument::Kind::test_report;
  doc.payload = TestReportDoc{};
  CHECK_THROWS_AS(emit_report(doc, ReportFormat::csv), std::invalid_argument);
}

TEST_CASE("content digest is the FNV-1a of the bytes") {
  CHECK(content_digest("") == "cbf29ce484222325");
  CHECK(content_digest("a") != content_digest("b"));
}
