// cpb: change-point tests for functional and vector-valued time series with
// block-bootstrap critical values.
//
// Exit codes: 0 success, 1 data error (unreadable/malformed input), 2 usage
// error (bad flags). Fixed --seed reruns write byte-identical output files.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "cpb/bootstrap.hpp"
#include "cpb/experiments.hpp"
#include "cpb/io.hpp"
#include "cpb/parallel.hpp"
#include "cpb/simulation.hpp"

namespace {

using namespace cpb;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

BlockRule parse_block_rule(const std::string& text) {
  if (text.rfind("dyadic:", 0) == 0) {
    const std::string args = text.substr(7);
    const auto comma = args.find(',');
    if (comma == std::string::npos) {
      throw UsageError("--block-length dyadic form is dyadic:<constant>,<exponent>");
    }
    try {
      return BlockRule::dyadic(std::stod(args.substr(0, comma)),
                               std::stod(args.substr(comma + 1)));
    } catch (const std::exception&) {
      throw UsageError("--block-length dyadic form is dyadic:<constant>,<exponent>");
    }
  }
  try {
    std::size_t consumed = 0;
    const long p = std::stol(text, &consumed);
    if (consumed != text.size() || p < 1) throw std::invalid_argument(text);
    return BlockRule::fixed(p);
  } catch (const std::exception&) {
    throw UsageError("--block-length expects an integer or dyadic:<c>,<e>");
  }
}

WeightSpec parse_weight(const std::string& text) {
  auto parse_pair = [&](const std::string& args, const char* form) {
    const auto comma = args.find(',');
    if (comma == std::string::npos) throw UsageError(form);
    try {
      return std::pair<double, double>(std::stod(args.substr(0, comma)),
                                       std::stod(args.substr(comma + 1)));
    } catch (const std::exception&) {
      throw UsageError(form);
    }
  };
  if (text.rfind("gaussian:", 0) == 0) {
    const auto [mean, sd] = parse_pair(text.substr(9), "--weight gaussian:<mean>,<sd>");
    if (sd <= 0.0) throw UsageError("--weight gaussian needs sd > 0");
    return WeightSpec::gaussian_product(Eigen::VectorXd::Constant(1, mean),
                                        Eigen::VectorXd::Constant(1, sd));
  }
  if (text.rfind("uniform:", 0) == 0) {
    const auto [lo, hi] = parse_pair(text.substr(8), "--weight uniform:<lo>,<hi>");
    if (lo >= hi) throw UsageError("--weight uniform needs lo < hi");
    return WeightSpec::uniform_box(Eigen::VectorXd::Constant(1, lo),
                                   Eigen::VectorXd::Constant(1, hi));
  }
  throw UsageError("--weight expects gaussian:<mean>,<sd> or uniform:<lo>,<hi>");
}

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << bytes;
}

std::string first_line(const std::string& bytes) {
  const auto newline = bytes.find('\n');
  std::string line = bytes.substr(0, newline);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

struct TestFlags {
  std::string input;
  std::string block_length;
  int boot = 999;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::string out;
  std::string emit_process;
  unsigned threads = default_thread_count();
};

void add_test_flags(CLI::App* cmd, TestFlags& flags) {
  cmd->add_option("--input", flags.input, "input CSV")->required();
  cmd->add_option("--block-length", flags.block_length,
                  "block length p, or dyadic:<c>,<e>")
      ->required();
  cmd->add_option("--boot", flags.boot, "bootstrap replicates J")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--alpha", flags.alpha, "test level in (0,1)");
  cmd->add_option("--seed", flags.seed, "RNG seed");
  cmd->add_option("--out", flags.out, "report JSON path")->required();
  cmd->add_option("--emit-process", flags.emit_process,
                  "write the test process as plot-ready CSV");
  cmd->add_option("--threads", flags.threads, "bootstrap worker threads");
}

BootstrapConfig config_from(const TestFlags& flags) {
  BootstrapConfig config;
  config.block_rule = parse_block_rule(flags.block_length);
  config.replicates = flags.boot;
  config.seed = flags.seed;
  config.alpha = flags.alpha;
  return config;
}

ReportDocument base_document(ReportDocument::Kind kind, const std::string& digest,
                             std::uint64_t seed) {
  ReportDocument doc;
  doc.kind = kind;
  doc.input_digest = digest;
  doc.seed = seed;
  return doc;
}

void emit_process_trace(const std::string& path, const Eigen::VectorXd& process,
                        double threshold, const std::vector<int>* years,
                        const std::string& digest, std::uint64_t seed) {
  ProcessTraceDoc trace;
  trace.values = process;
  trace.threshold = threshold;
  for (Eigen::Index m = 1; m <= process.size(); ++m) {
    trace.labels.push_back(
        years ? std::to_string((*years)[static_cast<std::size_t>(m - 1)])
              : std::to_string(m));
  }
  ReportDocument doc =
      base_document(ReportDocument::Kind::process_trace, digest, seed);
  doc.payload = trace;
  write_file(path, emit_report(doc, ReportFormat::csv));
}

int run_cusum(const TestFlags& flags) {
  const BootstrapConfig config = config_from(flags);  // flag errors before I/O
  const std::string bytes = read_file_bytes(flags.input);
  const std::string digest = content_digest(bytes);
  std::istringstream in(bytes);

  std::optional<std::vector<int>> years;
  std::optional<FunctionalSample> sample;
  const std::string header = first_line(bytes);
  if (header == "date,flow") {
    AnnualCurves curves = parse_daily_flows(in, flags.input);
    years = std::move(curves.years);
    sample.emplace(std::move(curves.sample));
  } else if (header == "curve,t,value") {
    sample.emplace(parse_curves_csv(in, flags.input));
  } else {
    throw ParseError(flags.input +
                     ": expected header `date,flow` or `curve,t,value`");
  }

  const TestReport report = run_test(*sample, config, flags.threads);

  TestReportDoc report_doc;
  report_doc.statistic_kind = "cusum";
  report_doc.report = report;
  if (years) {
    report_doc.argmax_year = argmax_year_label(*years, report.argmax_m);
    report_doc.change_year = change_year_label(*years, report.argmax_m);
  }
  ReportDocument doc =
      base_document(ReportDocument::Kind::test_report, digest, flags.seed);
  doc.payload = report_doc;
  write_file(flags.out, emit_report(doc, ReportFormat::json));

  if (!flags.emit_process.empty()) {
    emit_process_trace(flags.emit_process, cusum_process(*sample), report.quantile,
                       years ? &*years : nullptr, digest, flags.seed);
  }
  std::cout << "cusum: statistic " << report.statistic << ", quantile("
            << (1.0 - flags.alpha) << ") " << report.quantile << ", p-value "
            << report.p_value << (report.reject ? ", change detected" : "")
            << "\n";
  return 0;
}

int run_cvm(const TestFlags& flags, const std::string& weight_text) {
  const BootstrapConfig config = config_from(flags);  // flag errors before I/O
  const WeightSpec weight = parse_weight(weight_text);
  const std::string bytes = read_file_bytes(flags.input);
  const std::string digest = content_digest(bytes);
  std::istringstream in(bytes);
  const AnnualSeries series = parse_annual_series(in, flags.input);

  const TestReport report =
      run_test(series.values, weight, config, flags.threads);

  TestReportDoc report_doc;
  report_doc.statistic_kind = "cvm";
  report_doc.report = report;
  report_doc.argmax_year = argmax_year_label(series.years, report.argmax_m);
  report_doc.change_year = change_year_label(series.years, report.argmax_m);
  ReportDocument doc =
      base_document(ReportDocument::Kind::test_report, digest, flags.seed);
  doc.payload = report_doc;
  write_file(flags.out, emit_report(doc, ReportFormat::json));

  if (!flags.emit_process.empty()) {
    emit_process_trace(flags.emit_process, cvm_process(series.values, weight),
                       report.quantile, &series.years, digest, flags.seed);
  }
  std::cout << "cvm: statistic " << report.statistic << ", quantile("
            << (1.0 - flags.alpha) << ") " << report.quantile << ", p-value "
            << report.p_value;
  if (report.reject) {
    std::cout << ", change detected at " << *report_doc.change_year;
  }
  std::cout << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Change-point tests with sequential block-bootstrap critical values"};
  app.require_subcommand(1);

  TestFlags cusum_flags;
  CLI::App* cusum = app.add_subcommand(
      "cusum", "functional CUSUM mean-change test on annual curves");
  add_test_flags(cusum, cusum_flags);

  TestFlags cvm_flags;
  std::string weight_text = "gaussian:2000,2000";
  CLI::App* cvm = app.add_subcommand(
      "cvm", "Cramér-von Mises distribution-change test on a scalar series");
  add_test_flags(cvm, cvm_flags);
  cvm->add_option("--weight", weight_text,
                  "weight: gaussian:<mean>,<sd> or uniform:<lo>,<hi>");

  CLI::App* simulate = app.add_subcommand("simulate", "generate synthetic data");
  simulate->require_subcommand(1);

  std::string far1_kernel = "gaussian";
  double far1_norm = 0.0;
  Eigen::Index far1_n = 100;
  Eigen::Index far1_grid = 100;
  int far1_burn_in = 100;
  std::uint64_t far1_seed = 0;
  std::string far1_out;
  CLI::App* far1 = simulate->add_subcommand("far1", "functional AR(1) curves");
  far1->add_option("--psi-kernel", far1_kernel, "gaussian|wiener")
      ->check(CLI::IsMember({"gaussian", "wiener"}));
  far1->add_option("--psi-norm", far1_norm, "L2 norm of the kernel, in [0,1)")
      ->required();
  far1->add_option("--n", far1_n, "number of curves")->required();
  far1->add_option("--grid", far1_grid, "grid points per curve");
  far1->add_option("--burn-in", far1_burn_in, "discarded start-up steps");
  far1->add_option("--seed", far1_seed, "RNG seed");
  far1->add_option("--out", far1_out, "curves CSV path")->required();

  double ar1_a1 = 0.0;
  Eigen::Index ar1_n = 100;
  std::uint64_t ar1_seed = 0;
  double ar1_shift = 0.0;
  bool ar1_skewness = false;
  Eigen::Index ar1_at = 0;
  std::string ar1_out;
  CLI::App* ar1 = simulate->add_subcommand("ar1", "scalar AR(1) series");
  ar1->add_option("--a1", ar1_a1, "AR coefficient, |a1| < 1")->required();
  ar1->add_option("--n", ar1_n, "series length")->required();
  ar1->add_option("--seed", ar1_seed, "RNG seed");
  CLI::Option* shift_opt =
      ar1->add_option("--shift", ar1_shift, "level shift after --at");
  CLI::Option* skew_opt =
      ar1->add_flag("--skewness", ar1_skewness, "flip the skewness after --at");
  shift_opt->excludes(skew_opt);
  ar1->add_option("--at", ar1_at, "1-based change index k (change after k)");
  ar1->add_option("--out", ar1_out, "series CSV path")->required();

  int table_id = 1;
  std::string table_scale = "desk";
  std::uint64_t table_seed = 0;
  std::string table_out;
  unsigned table_threads = default_thread_count();
  int table_runs_override = 0;
  int table_boot_override = 0;
  CLI::App* table =
      app.add_subcommand("table", "reproduce a published simulation table");
  table->add_option("--id", table_id, "table 1..5")->required()->check(CLI::Range(1, 5));
  table->add_option("--scale", table_scale, "desk|full")
      ->check(CLI::IsMember({"desk", "full"}));
  table->add_option("--seed", table_seed, "master seed");
  table->add_option("--out", table_out, "output path (.csv or .json)")->required();
  table->add_option("--threads", table_threads, "worker threads");
  table->add_option("--runs", table_runs_override,
                    "override Monte Carlo runs per cell (smoke testing)");
  table->add_option("--boot", table_boot_override,
                    "override bootstrap replicates per run (smoke testing)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (cusum->parsed()) return run_cusum(cusum_flags);
    if (cvm->parsed()) return run_cvm(cvm_flags, weight_text);
    if (far1->parsed()) {
      Far1Spec spec;
      spec.kernel = calibrate_kernel(far1_kernel == "gaussian"
                                         ? KernelSpec::Kind::gaussian
                                         : KernelSpec::Kind::wiener,
                                     far1_norm);
      spec.grid = Grid::uniform(far1_grid);
      spec.burn_in = far1_burn_in;
      RngStream rng(far1_seed);
      const FunctionalSample sample = far1_generate(spec, far1_n, rng);
      std::ostringstream out;
      write_curves_csv(out, sample);
      write_file(far1_out, out.str());
      std::cout << "wrote " << far1_n << " curves to " << far1_out << "\n";
      return 0;
    }
    if (ar1->parsed()) {
      RngStream rng(ar1_seed);
      VectorSample series = ar1_generate(ar1_a1, ar1_n, rng);
      if (shift_opt->count() > 0) {
        series = apply_alternative(series,
                                   AlternativeSpec::mean_shift(ar1_shift, ar1_at));
      } else if (ar1_skewness) {
        RngStream second = RngStream(ar1_seed).fork(1);
        const VectorSample other = ar1_generate(ar1_a1, ar1_n, second);
        Eigen::MatrixXd both(ar1_n, 2);
        both.col(0) = series.rows().col(0);
        both.col(1) = other.rows().col(0);
        series = apply_alternative(VectorSample(both),
                                   AlternativeSpec::skewness_change(ar1_at));
      }
      std::vector<int> years(static_cast<std::size_t>(ar1_n));
      for (Eigen::Index i = 0; i < ar1_n; ++i) {
        years[static_cast<std::size_t>(i)] = static_cast<int>(i + 1);
      }
      std::ostringstream out;
      write_series_csv(out, years, series.rows().col(0));
      write_file(ar1_out, out.str());
      std::cout << "wrote " << ar1_n << " observations to " << ar1_out << "\n";
      return 0;
    }
    if (table->parsed()) {
      const Scale scale = table_scale == "desk" ? Scale::desk : Scale::full;
      std::vector<TableCellResult> rows;
      for (const TableCell& cell : table_cells(table_id)) {
        ExperimentSpec spec = experiment_for_cell(cell, scale, table_seed);
        if (table_runs_override > 0) spec.runs = table_runs_override;
        if (table_boot_override > 0) spec.replicates = table_boot_override;
        const ExperimentReport report = run_experiment(spec, table_threads);
        TableCellResult row;
        row.cell = cell;
        row.scale = table_scale;
        row.runs = spec.runs;
        row.replicates = spec.replicates;
        row.rejection_rate = report.rejection_rate;
        row.ci_halfwidth = report.ci_halfwidth;
        row.abs_diff = std::abs(report.rejection_rate - cell.reference);
        row.master_seed = spec.master_seed;
        rows.push_back(row);
        std::cerr << "table " << table_id << " n=" << cell.n << " p=" << cell.p
                  << " param=" << cell.param << " "
                  << (cell.statistic == ExperimentSpec::Statistic::cusum ? "cusum"
                                                                         : "cvm")
                  << ": rate " << report.rejection_rate << " (published "
                  << cell.reference << ", " << report.wall_time_seconds << "s)\n";
      }
      ExperimentTableDoc doc_payload;
      doc_payload.table_id = table_id;
      doc_payload.scale = table_scale;
      doc_payload.rows = std::move(rows);
      std::ostringstream params;
      params << "table:" << table_id << ":" << table_scale << ":" << table_seed;
      ReportDocument doc = base_document(ReportDocument::Kind::experiment_table,
                                         content_digest(params.str()), table_seed);
      doc.payload = doc_payload;
      const bool json = table_out.size() >= 5 &&
                        table_out.compare(table_out.size() - 5, 5, ".json") == 0;
      write_file(table_out,
                 emit_report(doc, json ? ReportFormat::json : ReportFormat::csv));
      std::cout << "wrote table " << table_id << " (" << table_scale << ") to "
                << table_out << "\n";
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
