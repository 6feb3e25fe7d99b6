#include "cpb/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace cpb {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& source, std::size_t row,
                       const std::string& message) {
  std::ostringstream out;
  out << source << ":" << row << ": " << message;
  throw ParseError(out.str());
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_number(const std::string& text, const std::string& source,
                    std::size_t row, const char* what) {
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &consumed);
  } catch (const std::exception&) {
    fail(source, row, std::string("could not parse ") + what + " '" + text + "'");
  }
  if (consumed != text.size() || !std::isfinite(value)) {
    fail(source, row, std::string("invalid ") + what + " '" + text + "'");
  }
  return value;
}

long parse_integer(const std::string& text, const std::string& source,
                   std::size_t row, const char* what) {
  std::size_t consumed = 0;
  long value = 0;
  try {
    value = std::stol(text, &consumed);
  } catch (const std::exception&) {
    fail(source, row, std::string("could not parse ") + what + " '" + text + "'");
  }
  if (consumed != text.size()) {
    fail(source, row, std::string("invalid ") + what + " '" + text + "'");
  }
  return value;
}

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

constexpr int kDaysInMonth[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};

int days_in_month(int year, int month) {
  if (month == 2 && is_leap_year(year)) return 29;
  return kDaysInMonth[month - 1];
}

bool date_equal(const CalendarDate& a, const CalendarDate& b) {
  return a.year == b.year && a.month == b.month && a.day == b.day;
}

bool date_less(const CalendarDate& a, const CalendarDate& b) {
  if (a.year != b.year) return a.year < b.year;
  if (a.month != b.month) return a.month < b.month;
  return a.day < b.day;
}

CalendarDate parse_iso_date(const std::string& text, const std::string& source,
                            std::size_t row) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    fail(source, row, "expected ISO date YYYY-MM-DD, got '" + text + "'");
  }
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
    if (text[i] < '0' || text[i] > '9') {
      fail(source, row, "expected ISO date YYYY-MM-DD, got '" + text + "'");
    }
  }
  CalendarDate date;
  date.year = std::stoi(text.substr(0, 4));
  date.month = std::stoi(text.substr(5, 2));
  date.day = std::stoi(text.substr(8, 2));
  if (date.month < 1 || date.month > 12 || date.day < 1 ||
      date.day > days_in_month(date.year, date.month)) {
    fail(source, row, "invalid calendar date '" + text + "'");
  }
  return date;
}

// Day-of-year index with Feb 29 removed: every year maps onto 0..364.
int day_index_365(const CalendarDate& date) {
  static constexpr int kCumulative[] = {0,   31,  59,  90,  120, 151,
                                        181, 212, 243, 273, 304, 334};
  int index = kCumulative[date.month - 1] + date.day - 1;
  return index;
}

void expect_header(std::istream& in, const std::string& source,
                   const std::string& expected) {
  std::string line;
  if (!std::getline(in, line)) fail(source, 1, "empty input");
  if (strip_cr(line) != expected) {
    fail(source, 1, "expected header '" + expected + "', got '" + strip_cr(line) + "'");
  }
}

std::ifstream open_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  return in;
}

}  // namespace

bool is_leap_year(int year) {
  return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

CalendarDate next_day(CalendarDate date) {
  if (date.day < days_in_month(date.year, date.month)) {
    ++date.day;
    return date;
  }
  date.day = 1;
  if (date.month < 12) {
    ++date.month;
    return date;
  }
  date.month = 1;
  ++date.year;
  return date;
}

std::string format_date(const CalendarDate& date) {
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "%04d-%02d-%02d", date.year, date.month,
                date.day);
  return buffer;
}

AnnualCurves parse_daily_flows(std::istream& in, const std::string& source) {
  expect_header(in, source, "date,flow");
  std::vector<int> years;
  std::vector<Eigen::VectorXd> columns;
  CalendarDate expected{};
  bool first = true;
  std::size_t row = 1;
  std::string line;
  while (std::getline(in, line)) {
    ++row;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 2) fail(source, row, "expected 2 fields `date,flow`");
    const CalendarDate date = parse_iso_date(fields[0], source, row);
    const double flow = parse_number(fields[1], source, row, "flow");
    if (flow < 0.0) fail(source, row, "flow must be nonnegative");

    if (first) {
      if (date.month != 1 || date.day != 1) {
        fail(source, row,
             "missing day " + format_date({date.year, 1, 1}) +
                 " (years must be complete)");
      }
      expected = date;
      first = false;
    }
    // Feb 29 is optional in the input; curves are 365 days either way.
    if (expected.month == 2 && expected.day == 29 && !date_equal(date, expected)) {
      expected = next_day(expected);
    }
    if (!date_equal(date, expected)) {
      if (date_less(date, expected)) {
        fail(source, row,
             "dates not increasing at " + format_date(date));
      }
      fail(source, row, "missing day " + format_date(expected));
    }
    if (date.month == 1 && date.day == 1) {
      years.push_back(date.year);
      columns.emplace_back(Eigen::VectorXd::Zero(365));
    }
    if (!(date.month == 2 && date.day == 29)) {
      columns.back()[day_index_365(date)] = flow;
    }
    expected = next_day(date);
  }
  if (first) fail(source, row, "no data rows");
  if (expected.month != 1 || expected.day != 1) {
    fail(source, row, "missing day " + format_date(expected));
  }
  if (years.size() < 2) {
    throw std::invalid_argument(source + ": need at least 2 complete years, got " +
                                std::to_string(years.size()));
  }
  Eigen::MatrixXd values(365, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t i = 0; i < columns.size(); ++i) {
    values.col(static_cast<Eigen::Index>(i)) = columns[i];
  }
  return AnnualCurves{FunctionalSample(Grid::indexed_mean(365), std::move(values)),
                      std::move(years)};
}

AnnualCurves parse_daily_flows_file(const std::string& path) {
  auto in = open_file(path);
  return parse_daily_flows(in, path);
}

AnnualSeries parse_annual_series(std::istream& in, const std::string& source) {
  expect_header(in, source, "year,value");
  std::vector<int> years;
  std::vector<double> values;
  std::size_t row = 1;
  std::string line;
  while (std::getline(in, line)) {
    ++row;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 2) fail(source, row, "expected 2 fields `year,value`");
    const long year = parse_integer(fields[0], source, row, "year");
    const double value = parse_number(fields[1], source, row, "value");
    if (!years.empty() && year <= years.back()) {
      fail(source, row,
           "years must be strictly increasing (saw " + std::to_string(year) +
               " after " + std::to_string(years.back()) + ")");
    }
    years.push_back(static_cast<int>(year));
    values.push_back(value);
  }
  if (values.size() < 2) {
    throw std::invalid_argument(source + ": need at least 2 observations, got " +
                                std::to_string(values.size()));
  }
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(values.size()), 1);
  for (std::size_t i = 0; i < values.size(); ++i) {
    rows(static_cast<Eigen::Index>(i), 0) = values[i];
  }
  return AnnualSeries{VectorSample(std::move(rows)), std::move(years)};
}

AnnualSeries parse_annual_series_file(const std::string& path) {
  auto in = open_file(path);
  return parse_annual_series(in, path);
}

FunctionalSample parse_curves_csv(std::istream& in, const std::string& source) {
  expect_header(in, source, "curve,t,value");
  std::vector<double> points;
  std::vector<std::vector<double>> curves;
  long current_curve = 0;
  std::size_t row = 1;
  std::string line;
  while (std::getline(in, line)) {
    ++row;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 3) fail(source, row, "expected 3 fields `curve,t,value`");
    const long curve_id = parse_integer(fields[0], source, row, "curve id");
    const double t = parse_number(fields[1], source, row, "t");
    const double value = parse_number(fields[2], source, row, "value");
    if (curve_id == current_curve + 1) {
      ++current_curve;
      curves.emplace_back();
    } else if (curve_id != current_curve) {
      fail(source, row,
           "curve ids must be 1..n in order, got " + std::to_string(curve_id));
    }
    const std::size_t position = curves.back().size();
    if (current_curve == 1) {
      if (!points.empty() && t <= points.back()) {
        fail(source, row, "grid points must be strictly increasing");
      }
      points.push_back(t);
    } else {
      if (position >= points.size() || points[position] != t) {
        fail(source, row, "curves must share the identical grid");
      }
    }
    curves.back().push_back(value);
  }
  if (curves.size() < 2) {
    throw std::invalid_argument(source + ": need at least 2 curves");
  }
  for (const auto& curve : curves) {
    if (curve.size() != points.size()) {
      throw ParseError(source + ": curve with " + std::to_string(curve.size()) +
                       " points, expected " + std::to_string(points.size()));
    }
  }
  Eigen::VectorXd grid_points(static_cast<Eigen::Index>(points.size()));
  for (std::size_t j = 0; j < points.size(); ++j) {
    grid_points[static_cast<Eigen::Index>(j)] = points[j];
  }
  Eigen::MatrixXd values(grid_points.size(),
                         static_cast<Eigen::Index>(curves.size()));
  for (std::size_t i = 0; i < curves.size(); ++i) {
    for (std::size_t j = 0; j < points.size(); ++j) {
      values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
          curves[i][j];
    }
  }
  return FunctionalSample(Grid::from_points(std::move(grid_points)),
                          std::move(values));
}

FunctionalSample parse_curves_csv_file(const std::string& path) {
  auto in = open_file(path);
  return parse_curves_csv(in, path);
}

void write_curves_csv(std::ostream& out, const FunctionalSample& sample) {
  out << "curve,t,value\n";
  for (Eigen::Index i = 0; i < sample.size(); ++i) {
    for (Eigen::Index j = 0; j < sample.grid()->size(); ++j) {
      out << (i + 1) << ',' << format_double(sample.grid()->points[j]) << ','
          << format_double(sample.values()(j, i)) << '\n';
    }
  }
}

void write_series_csv(std::ostream& out, const std::vector<int>& years,
                      const Eigen::VectorXd& values) {
  out << "year,value\n";
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    out << years[static_cast<std::size_t>(i)] << ','
        << format_double(values[i]) << '\n';
  }
}

namespace {

const char* kind_name(ReportDocument::Kind kind) {
  switch (kind) {
    case ReportDocument::Kind::test_report: return "test_report";
    case ReportDocument::Kind::process_trace: return "process_trace";
    case ReportDocument::Kind::experiment_table: return "experiment_table";
  }
  return "";
}

ordered_json test_report_payload(const TestReportDoc& doc) {
  ordered_json block{{"n", doc.report.plan.n},
                     {"p", doc.report.plan.p},
                     {"k", doc.report.plan.k},
                     {"used", doc.report.plan.used},
                     {"discarded_tail", doc.report.plan.discarded_tail}};
  ordered_json payload;
  payload["statistic_kind"] = doc.statistic_kind;
  payload["statistic"] = doc.report.statistic;
  payload["argmax_m"] = doc.report.argmax_m;
  payload["argmax_year"] =
      doc.argmax_year ? ordered_json(*doc.argmax_year) : ordered_json(nullptr);
  payload["change_year"] =
      doc.change_year ? ordered_json(*doc.change_year) : ordered_json(nullptr);
  payload["quantile"] = doc.report.quantile;
  payload["p_value"] = doc.report.p_value;
  payload["reject"] = doc.report.reject;
  payload["alpha"] = doc.report.alpha;
  payload["block"] = block;
  payload["replicates"] = std::vector<double>(
      doc.report.replicates.data(),
      doc.report.replicates.data() + doc.report.replicates.size());
  return payload;
}

ordered_json table_row_json(const TableCellResult& row) {
  ordered_json out;
  out["table"] = row.cell.table_id;
  out["n"] = row.cell.n;
  out["p"] = row.cell.p;
  out["param"] = row.cell.param;
  out["kernel"] =
      row.cell.kernel == KernelSpec::Kind::gaussian ? "gaussian" : "wiener";
  out["statistic"] =
      row.cell.statistic == ExperimentSpec::Statistic::cusum ? "cusum" : "cvm";
  out["shift"] = row.cell.shift;
  out["alpha"] = row.cell.alpha;
  out["runs"] = row.runs;
  out["boot_replicates"] = row.replicates;
  out["rejection_rate"] = row.rejection_rate;
  out["ci_halfwidth"] = row.ci_halfwidth;
  out["published_value"] = row.cell.reference;
  out["abs_diff"] = row.abs_diff;
  out["seed"] = row.master_seed;
  return out;
}

std::string emit_json(const ReportDocument& doc) {
  ordered_json out;
  out["schema"] = kSchema;
  out["kind"] = kind_name(doc.kind);
  out["metadata"] = ordered_json{{"input_digest", doc.input_digest},
                                 {"seed", doc.seed},
                                 {"version", doc.version}};
  switch (doc.kind) {
    case ReportDocument::Kind::test_report:
      out["payload"] = test_report_payload(std::get<TestReportDoc>(doc.payload));
      break;
    case ReportDocument::Kind::process_trace: {
      const auto& trace = std::get<ProcessTraceDoc>(doc.payload);
      ordered_json payload;
      payload["labels"] = trace.labels;
      payload["values"] = std::vector<double>(
          trace.values.data(), trace.values.data() + trace.values.size());
      payload["threshold"] = trace.threshold;
      out["payload"] = payload;
      break;
    }
    case ReportDocument::Kind::experiment_table: {
      const auto& table = std::get<ExperimentTableDoc>(doc.payload);
      ordered_json payload;
      payload["table_id"] = table.table_id;
      payload["scale"] = table.scale;
      payload["rows"] = ordered_json::array();
      for (const auto& row : table.rows) payload["rows"].push_back(table_row_json(row));
      out["payload"] = payload;
      break;
    }
  }
  return out.dump(2) + "\n";
}

std::string emit_csv(const ReportDocument& doc) {
  std::ostringstream out;
  switch (doc.kind) {
    case ReportDocument::Kind::process_trace: {
      const auto& trace = std::get<ProcessTraceDoc>(doc.payload);
      out << "index,label,value,threshold\n";
      for (Eigen::Index m = 0; m < trace.values.size(); ++m) {
        out << (m + 1) << ',' << trace.labels[static_cast<std::size_t>(m)] << ','
            << format_double(trace.values[m]) << ','
            << format_double(trace.threshold) << '\n';
      }
      return out.str();
    }
    case ReportDocument::Kind::experiment_table: {
      const auto& table = std::get<ExperimentTableDoc>(doc.payload);
      out << "table,scale,n,p,param,kernel,statistic,shift,alpha,runs,"
             "boot_replicates,rejection_rate,ci_halfwidth,published_value,abs_diff,"
             "seed\n";
      for (const auto& row : table.rows) {
        out << row.cell.table_id << ',' << table.scale << ',' << row.cell.n << ','
            << row.cell.p << ',' << format_double(row.cell.param) << ','
            << (row.cell.kernel == KernelSpec::Kind::gaussian ? "gaussian"
                                                              : "wiener")
            << ','
            << (row.cell.statistic == ExperimentSpec::Statistic::cusum ? "cusum"
                                                                       : "cvm")
            << ',' << format_double(row.cell.shift) << ','
            << format_double(row.cell.alpha) << ',' << row.runs << ','
            << row.replicates << ',' << format_double(row.rejection_rate) << ','
            << format_double(row.ci_halfwidth) << ','
            << format_double(row.cell.reference) << ','
            << format_double(row.abs_diff) << ',' << row.master_seed << '\n';
      }
      return out.str();
    }
    case ReportDocument::Kind::test_report:
      throw std::invalid_argument(
          "emit_report: test reports serialize as JSON, not CSV");
  }
  throw std::invalid_argument("emit_report: unknown document kind");
}

}  // namespace

std::string emit_report(const ReportDocument& doc, ReportFormat format) {
  return format == ReportFormat::json ? emit_json(doc) : emit_csv(doc);
}

ReportDocument parse_report(const std::string& json_text) {
  const ordered_json in = ordered_json::parse(json_text);
  if (in.at("schema").get<std::string>() != kSchema) {
    throw ParseError("parse_report: unsupported schema");
  }
  ReportDocument doc;
  doc.input_digest = in.at("metadata").at("input_digest").get<std::string>();
  doc.seed = in.at("metadata").at("seed").get<std::uint64_t>();
  doc.version = in.at("metadata").at("version").get<std::string>();
  const std::string kind = in.at("kind").get<std::string>();
  const ordered_json& payload = in.at("payload");
  if (kind == "test_report") {
    doc.kind = ReportDocument::Kind::test_report;
    TestReportDoc report;
    report.statistic_kind = payload.at("statistic_kind").get<std::string>();
    report.report.statistic = payload.at("statistic").get<double>();
    report.report.argmax_m = payload.at("argmax_m").get<Eigen::Index>();
    if (!payload.at("argmax_year").is_null()) {
      report.argmax_year = payload.at("argmax_year").get<int>();
    }
    if (!payload.at("change_year").is_null()) {
      report.change_year = payload.at("change_year").get<int>();
    }
    report.report.quantile = payload.at("quantile").get<double>();
    report.report.p_value = payload.at("p_value").get<double>();
    report.report.reject = payload.at("reject").get<bool>();
    report.report.alpha = payload.at("alpha").get<double>();
    const ordered_json& block = payload.at("block");
    report.report.plan.n = block.at("n").get<Eigen::Index>();
    report.report.plan.p = block.at("p").get<Eigen::Index>();
    report.report.plan.k = block.at("k").get<Eigen::Index>();
    report.report.plan.used = block.at("used").get<Eigen::Index>();
    report.report.plan.discarded_tail = block.at("discarded_tail").get<Eigen::Index>();
    const auto replicates = payload.at("replicates").get<std::vector<double>>();
    report.report.replicates =
        Eigen::Map<const Eigen::VectorXd>(replicates.data(),
                                          static_cast<Eigen::Index>(replicates.size()));
    report.report.seed = doc.seed;
    report.report.alpha = payload.at("alpha").get<double>();
    doc.payload = std::move(report);
  } else if (kind == "process_trace") {
    doc.kind = ReportDocument::Kind::process_trace;
    ProcessTraceDoc trace;
    trace.labels = payload.at("labels").get<std::vector<std::string>>();
    const auto values = payload.at("values").get<std::vector<double>>();
    trace.values = Eigen::Map<const Eigen::VectorXd>(
        values.data(), static_cast<Eigen::Index>(values.size()));
    trace.threshold = payload.at("threshold").get<double>();
    doc.payload = std::move(trace);
  } else if (kind == "experiment_table") {
    doc.kind = ReportDocument::Kind::experiment_table;
    ExperimentTableDoc table;
    table.table_id = payload.at("table_id").get<int>();
    table.scale = payload.at("scale").get<std::string>();
    for (const ordered_json& row_json : payload.at("rows")) {
      TableCellResult row;
      row.cell.table_id = row_json.at("table").get<int>();
      row.cell.n = row_json.at("n").get<Eigen::Index>();
      row.cell.p = row_json.at("p").get<Eigen::Index>();
      row.cell.param = row_json.at("param").get<double>();
      row.cell.kernel = row_json.at("kernel").get<std::string>() == "gaussian"
                            ? KernelSpec::Kind::gaussian
                            : KernelSpec::Kind::wiener;
      row.cell.statistic = row_json.at("statistic").get<std::string>() == "cusum"
                               ? ExperimentSpec::Statistic::cusum
                               : ExperimentSpec::Statistic::cvm;
      row.cell.shift = row_json.at("shift").get<double>();
      row.cell.alpha = row_json.at("alpha").get<double>();
      row.cell.reference = row_json.at("published_value").get<double>();
      row.scale = table.scale;
      row.runs = row_json.at("runs").get<int>();
      row.replicates = row_json.at("boot_replicates").get<int>();
      row.rejection_rate = row_json.at("rejection_rate").get<double>();
      row.ci_halfwidth = row_json.at("ci_halfwidth").get<double>();
      row.abs_diff = row_json.at("abs_diff").get<double>();
      row.master_seed = row_json.at("seed").get<std::uint64_t>();
      table.rows.push_back(std::move(row));
    }
    doc.payload = std::move(table);
  } else {
    throw ParseError("parse_report: unknown kind '" + kind + "'");
  }
  return doc;
}

namespace {

bool plans_equal(const BlockPlan& a, const BlockPlan& b) {
  return a.n == b.n && a.p == b.p && a.k == b.k && a.used == b.used &&
         a.discarded_tail == b.discarded_tail;
}

bool vectors_equal(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

bool rows_equal(const TableCellResult& a, const TableCellResult& b) {
  // wall-clock seconds are not part of the serialized document
  return a.cell.table_id == b.cell.table_id && a.cell.n == b.cell.n &&
         a.cell.p == b.cell.p && a.cell.param == b.cell.param &&
         a.cell.kernel == b.cell.kernel && a.cell.statistic == b.cell.statistic &&
         a.cell.shift == b.cell.shift && a.cell.alpha == b.cell.alpha &&
         a.cell.reference == b.cell.reference && a.runs == b.runs &&
         a.replicates == b.replicates && a.rejection_rate == b.rejection_rate &&
         a.ci_halfwidth == b.ci_halfwidth && a.abs_diff == b.abs_diff &&
         a.master_seed == b.master_seed;
}

}  // namespace

bool operator==(const ReportDocument& a, const ReportDocument& b) {
  if (a.kind != b.kind || a.input_digest != b.input_digest || a.seed != b.seed ||
      a.version != b.version) {
    return false;
  }
  switch (a.kind) {
    case ReportDocument::Kind::test_report: {
      const auto& lhs = std::get<TestReportDoc>(a.payload);
      const auto& rhs = std::get<TestReportDoc>(b.payload);
      return lhs.statistic_kind == rhs.statistic_kind &&
             lhs.argmax_year == rhs.argmax_year &&
             lhs.change_year == rhs.change_year &&
             lhs.report.statistic == rhs.report.statistic &&
             lhs.report.argmax_m == rhs.report.argmax_m &&
             lhs.report.quantile == rhs.report.quantile &&
             lhs.report.p_value == rhs.report.p_value &&
             lhs.report.reject == rhs.report.reject &&
             lhs.report.alpha == rhs.report.alpha &&
             plans_equal(lhs.report.plan, rhs.report.plan) &&
             vectors_equal(lhs.report.replicates, rhs.report.replicates);
    }
    case ReportDocument::Kind::process_trace: {
      const auto& lhs = std::get<ProcessTraceDoc>(a.payload);
      const auto& rhs = std::get<ProcessTraceDoc>(b.payload);
      return lhs.labels == rhs.labels && vectors_equal(lhs.values, rhs.values) &&
             lhs.threshold == rhs.threshold;
    }
    case ReportDocument::Kind::experiment_table: {
      const auto& lhs = std::get<ExperimentTableDoc>(a.payload);
      const auto& rhs = std::get<ExperimentTableDoc>(b.payload);
      if (lhs.table_id != rhs.table_id || lhs.scale != rhs.scale ||
          lhs.rows.size() != rhs.rows.size()) {
        return false;
      }
      for (std::size_t i = 0; i < lhs.rows.size(); ++i) {
        if (!rows_equal(lhs.rows[i], rhs.rows[i])) return false;
      }
      return true;
    }
  }
  return false;
}

int argmax_year_label(const std::vector<int>& years, Eigen::Index argmax_m) {
  if (argmax_m < 1 || static_cast<std::size_t>(argmax_m) >= years.size()) {
    throw std::invalid_argument("argmax_year_label: split index out of range");
  }
  return years[static_cast<std::size_t>(argmax_m - 1)];
}

int change_year_label(const std::vector<int>& years, Eigen::Index argmax_m) {
  if (argmax_m < 1 || static_cast<std::size_t>(argmax_m) >= years.size()) {
    throw std::invalid_argument("change_year_label: split index out of range");
  }
  return years[static_cast<std::size_t>(argmax_m)];
}

std::string content_digest(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  char buffer[20];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(hash));
  return buffer;
}

}  // namespace cpb
