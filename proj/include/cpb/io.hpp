#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cpb/bootstrap.hpp"
#include "cpb/experiments.hpp"
#include "cpb/hilbert.hpp"
#include "cpb/statistics.hpp"

namespace cpb {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kSchema = "cpb/1";

// Data error with source location (file/stream name and row or date).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& message) : std::runtime_error(message) {}
};

struct CalendarDate {
  int year = 0;
  int month = 0;
  int day = 0;
};

bool is_leap_year(int year);
CalendarDate next_day(CalendarDate date);
std::string format_date(const CalendarDate& date);

struct DailyFlowRecord {
  CalendarDate date;
  double flow = 0.0;
};

struct AnnualCurves {
  FunctionalSample sample;  // 365-point curves, weights 1/365
  std::vector<int> years;   // label of curve i
};

struct AnnualSeries {
  VectorSample values;  // d = 1, ordered by year
  std::vector<int> years;
};

// Daily flows (header `date,flow`, ISO dates, one row per day) to annual
// curves. Every calendar year must be complete from Jan 1 to Dec 31; Feb 29
// rows are dropped (and may be absent) so every curve has 365 points. A gap
// raises a ParseError naming the first missing date.
AnnualCurves parse_daily_flows(std::istream& in, const std::string& source_name);
AnnualCurves parse_daily_flows_file(const std::string& path);

// Annual series (header `year,value`, strictly increasing years).
AnnualSeries parse_annual_series(std::istream& in, const std::string& source_name);
AnnualSeries parse_annual_series_file(const std::string& path);

// Long-format curve file (header `curve,t,value`): curve ids 1..n in order,
// every curve on the identical point sequence; quadrature weights are rebuilt
// by the trapezoidal rule.
FunctionalSample parse_curves_csv(std::istream& in, const std::string& source_name);
FunctionalSample parse_curves_csv_file(const std::string& path);
void write_curves_csv(std::ostream& out, const FunctionalSample& sample);

void write_series_csv(std::ostream& out, const std::vector<int>& years,
                      const Eigen::VectorXd& values);

// --- reports ----------------------------------------------------------------

struct TestReportDoc {
  std::string statistic_kind;  // "cusum" | "cvm"
  TestReport report;
  std::optional<int> argmax_year;  // year of observation argmax_m
  std::optional<int> change_year;  // year of observation argmax_m + 1
};

struct ProcessTraceDoc {
  std::vector<std::string> labels;  // one per split index m = 1..n-1
  Eigen::VectorXd values;
  double threshold = 0.0;  // bootstrap quantile (the dashed significance line)
};

struct ExperimentTableDoc {
  int table_id = 0;
  std::string scale;
  std::vector<TableCellResult> rows;
};

struct ReportDocument {
  enum class Kind { test_report, process_trace, experiment_table };
  Kind kind = Kind::test_report;
  std::string input_digest;
  std::uint64_t seed = 0;
  std::string version = kVersion;
  std::variant<TestReportDoc, ProcessTraceDoc, ExperimentTableDoc> payload;
};

enum class ReportFormat { json, csv };

// JSON (schema cpb/1, stable field order, lossless doubles) for every kind;
// CSV for process traces (`index,label,value,threshold`) and experiment
// tables. Emitted bytes are a pure function of the document: timings never
// enter the serialized form, so fixed-seed reruns are byte-identical.
std::string emit_report(const ReportDocument& doc, ReportFormat format);

// Inverse of emit_report(..., json).
ReportDocument parse_report(const std::string& json_text);

bool operator==(const ReportDocument& a, const ReportDocument& b);

// FNV-1a 64 over raw bytes, as a fixed-width hex string.
std::string content_digest(std::string_view bytes);

// Year labels for a split at argmax_m (1-based): the year of observation
// argmax_m (last pre-change year) and of observation argmax_m + 1 (first
// post-change year, the reported change year).
int argmax_year_label(const std::vector<int>& years, Eigen::Index argmax_m);
int change_year_label(const std::vector<int>& years, Eigen::Index argmax_m);

}  // namespace cpb
