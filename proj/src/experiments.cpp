#include "cpb/experiments.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "cpb/parallel.hpp"

namespace cpb {

FunctionalSample scalar_as_functional(const VectorSample& v) {
  if (v.dim() != 1) {
    throw std::invalid_argument("scalar_as_functional: need a d=1 sample");
  }
  static const std::shared_ptr<const Grid> two_point = Grid::uniform(2);
  Eigen::MatrixXd values(2, v.size());
  values.row(0) = v.rows().col(0).transpose();
  values.row(1) = v.rows().col(0).transpose();
  return FunctionalSample(two_point, std::move(values));
}

namespace {

VectorSample generate_vector_data(const ExperimentSpec& spec,
                                  const RngStream& run_root) {
  RngStream primary = run_root.fork(1);
  if (spec.alternative.kind == AlternativeSpec::Kind::skewness_change) {
    RngStream secondary = run_root.fork(2);
    const VectorSample first = ar1_generate(spec.a1, spec.n, primary);
    const VectorSample second = ar1_generate(spec.a1, spec.n, secondary);
    Eigen::MatrixXd both(spec.n, 2);
    both.col(0) = first.rows().col(0);
    both.col(1) = second.rows().col(0);
    return apply_alternative(VectorSample(std::move(both)), spec.alternative);
  }
  return apply_alternative(ar1_generate(spec.a1, spec.n, primary), spec.alternative);
}

bool run_once(const ExperimentSpec& spec, std::uint64_t run_index) {
  const RngStream run_root = RngStream(spec.master_seed).fork(run_index + 1);
  BootstrapConfig config;
  config.block_rule = spec.block;
  config.replicates = spec.replicates;
  config.alpha = spec.alpha;
  config.seed = run_root.derive_key(3);

  if (spec.model == ExperimentSpec::Model::far1) {
    if (spec.statistic != ExperimentSpec::Statistic::cusum) {
      throw std::invalid_argument(
          "run_experiment: the functional model pairs with the CUSUM statistic");
    }
    Far1Spec far1;
    far1.kernel = spec.kernel;
    far1.grid = Grid::uniform(spec.grid_size);
    far1.burn_in = spec.burn_in;
    RngStream gen = run_root.fork(1);
    const FunctionalSample data =
        apply_alternative(far1_generate(far1, spec.n, gen), spec.alternative);
    return run_test(data, config).reject;
  }

  const VectorSample data = generate_vector_data(spec, run_root);
  if (spec.statistic == ExperimentSpec::Statistic::cusum) {
    return run_test(scalar_as_functional(data), config).reject;
  }
  if (!spec.weight.has_value()) {
    throw std::invalid_argument("run_experiment: CvM statistic needs a weight");
  }
  return run_test(data, *spec.weight, config).reject;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentSpec& spec, unsigned threads) {
  if (spec.runs < 1) throw std::invalid_argument("run_experiment: need runs >= 1");
  const auto started = std::chrono::steady_clock::now();
  std::vector<char> rejected(static_cast<std::size_t>(spec.runs), 0);
  parallel_for(static_cast<std::size_t>(spec.runs), threads, [&](std::size_t i) {
    rejected[i] = run_once(spec, static_cast<std::uint64_t>(i)) ? 1 : 0;
  });
  ExperimentReport report;
  report.runs = spec.runs;
  report.master_seed = spec.master_seed;
  for (const char flag : rejected) report.reject_count += flag;
  report.rejection_rate =
      static_cast<double>(report.reject_count) / static_cast<double>(spec.runs);
  report.ci_halfwidth =
      3.0 * std::sqrt(report.rejection_rate * (1.0 - report.rejection_rate) /
                      static_cast<double>(spec.runs));
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  return report;
}

namespace {

constexpr double kPsiNorms[] = {0.0, 0.1, 0.2, 0.4, 0.6};
constexpr double kArCoefficients[] = {0.2, 0.5, 0.8};

struct FunctionalRow {
  Eigen::Index n;
  Eigen::Index p;
  // gaussian/wiener pairs per psi norm column
  double gaussian[5];
  double wiener[5];
};

// Published empirical size, functional CUSUM, alpha = 0.1.
constexpr FunctionalRow kTable1[] = {
    {50, 4, {0.110, 0.118, 0.138, 0.171, 0.274}, {0.106, 0.122, 0.154, 0.189, 0.263}},
    {50, 5, {0.098, 0.106, 0.131, 0.159, 0.214}, {0.117, 0.124, 0.099, 0.149, 0.235}},
    {50, 6, {0.138, 0.120, 0.143, 0.151, 0.193}, {0.111, 0.133, 0.120, 0.168, 0.216}},
    {50, 7, {0.121, 0.117, 0.149, 0.153, 0.209}, {0.110, 0.110, 0.116, 0.142, 0.203}},
    {50, 8, {0.104, 0.139, 0.157, 0.164, 0.195}, {0.111, 0.125, 0.144, 0.146, 0.211}},
    {100, 6, {0.107, 0.102, 0.139, 0.157, 0.236}, {0.107, 0.123, 0.131, 0.177, 0.222}},
    {100, 8, {0.121, 0.118, 0.117, 0.162, 0.199}, {0.097, 0.119, 0.133, 0.136, 0.187}},
    {100, 10, {0.105, 0.107, 0.114, 0.123, 0.151}, {0.111, 0.113, 0.116, 0.128, 0.170}},
    {100, 11, {0.112, 0.128, 0.104, 0.135, 0.170}, {0.089, 0.114, 0.131, 0.120, 0.169}},
    {100, 13, {0.123, 0.138, 0.146, 0.178, 0.204}, {0.132, 0.132, 0.133, 0.183, 0.201}},
};

// Published empirical power, functional CUSUM, sin(t) shift at 50%, alpha = 0.1.
constexpr FunctionalRow kTable2[] = {
    {50, 4, {1.000, 1.000, 0.997, 0.988, 0.927}, {1.000, 1.000, 1.000, 0.986, 0.894}},
    {50, 5, {1.000, 0.999, 0.998, 0.975, 0.861}, {1.000, 0.999, 0.999, 0.972, 0.850}},
    {50, 6, {1.000, 1.000, 0.996, 0.968, 0.859}, {1.000, 0.999, 0.998, 0.971, 0.830}},
    {50, 7, {1.000, 1.000, 0.996, 0.969, 0.858}, {1.000, 1.000, 0.999, 0.957, 0.828}},
    {50, 8, {0.998, 0.998, 0.989, 0.961, 0.808}, {0.998, 0.998, 0.990, 0.949, 0.808}},
};

struct ScalarSizeRow {
  Eigen::Index n;
  Eigen::Index p;
  double cvm[3];    // per AR coefficient column
  double cusum[3];
};

// Published empirical size, CvM / CUSUM on AR(1), alpha = 0.05. The published
// CUSUM entry for (n=200, p=12, a1=0.8) is printed as 0.0140; it is stored as
// 0.140, consistent with the surrounding column.
constexpr ScalarSizeRow kTable3[] = {
    {50, 4, {0.050, 0.127, 0.230}, {0.064, 0.140, 0.318}},
    {50, 5, {0.044, 0.085, 0.212}, {0.063, 0.097, 0.226}},
    {50, 7, {0.046, 0.076, 0.155}, {0.051, 0.075, 0.145}},
    {100, 6, {0.035, 0.082, 0.254}, {0.078, 0.111, 0.225}},
    {100, 8, {0.056, 0.059, 0.171}, {0.062, 0.079, 0.173}},
    {100, 10, {0.047, 0.072, 0.131}, {0.048, 0.054, 0.123}},
    {100, 12, {0.056, 0.074, 0.122}, {0.064, 0.085, 0.126}},
    {200, 8, {0.061, 0.091, 0.201}, {0.078, 0.061, 0.208}},
    {200, 10, {0.040, 0.064, 0.149}, {0.061, 0.085, 0.156}},
    {200, 12, {0.055, 0.067, 0.137}, {0.061, 0.057, 0.140}},
    {200, 15, {0.042, 0.066, 0.100}, {0.057, 0.063, 0.104}},
};

struct ScalarPowerRow {
  Eigen::Index n;
  Eigen::Index p[3];  // block length chosen per AR coefficient column
  double cvm[3];
  double cusum[3];
};

// Published empirical power, level shift after 50%, alpha = 0.05.
constexpr ScalarPowerRow kTable4Mu05[] = {
    {50, {4, 7, 7}, {0.230, 0.161, 0.207}, {0.233, 0.156, 0.194}},
    {100, {10, 8, 12}, {0.302, 0.280, 0.206}, {0.315, 0.262, 0.206}},
    {200, {12, 12, 15}, {0.669, 0.456, 0.258}, {0.700, 0.462, 0.295}},
};
constexpr ScalarPowerRow kTable4Mu1[] = {
    {50, {4, 7, 7}, {0.686, 0.313, 0.351}, {0.678, 0.431, 0.335}},
    {100, {10, 8, 12}, {0.847, 0.695, 0.419}, {0.851, 0.708, 0.373}},
    {200, {12, 12, 15}, {0.995, 0.937, 0.640}, {0.998, 0.945, 0.630}},
};

// Published empirical power, skewness flip after 50%, alpha = 0.05.
constexpr ScalarPowerRow kTable5[] = {
    {50, {4, 7, 7}, {0.323, 0.244, 0.196}, {0.047, 0.062, 0.080}},
    {100, {10, 8, 12}, {0.546, 0.461, 0.223}, {0.033, 0.045, 0.076}},
    {200, {12, 12, 15}, {0.945, 0.846, 0.375}, {0.040, 0.045, 0.065}},
};

void append_functional_cells(std::vector<TableCell>& cells, int table_id,
                             const FunctionalRow* rows, std::size_t row_count) {
  for (std::size_t r = 0; r < row_count; ++r) {
    for (int c = 0; c < 5; ++c) {
      for (const auto kernel :
           {KernelSpec::Kind::gaussian, KernelSpec::Kind::wiener}) {
        TableCell cell;
        cell.table_id = table_id;
        cell.n = rows[r].n;
        cell.p = rows[r].p;
        cell.param = kPsiNorms[c];
        cell.kernel = kernel;
        cell.statistic = ExperimentSpec::Statistic::cusum;
        cell.alpha = 0.1;
        cell.reference = kernel == KernelSpec::Kind::gaussian ? rows[r].gaussian[c]
                                                              : rows[r].wiener[c];
        cells.push_back(cell);
      }
    }
  }
}

void append_scalar_power_cells(std::vector<TableCell>& cells, int table_id,
                               double shift, const ScalarPowerRow* rows,
                               std::size_t row_count) {
  for (std::size_t r = 0; r < row_count; ++r) {
    for (int c = 0; c < 3; ++c) {
      for (const auto statistic :
           {ExperimentSpec::Statistic::cvm, ExperimentSpec::Statistic::cusum}) {
        TableCell cell;
        cell.table_id = table_id;
        cell.n = rows[r].n;
        cell.p = rows[r].p[c];
        cell.param = kArCoefficients[c];
        cell.shift = shift;
        cell.statistic = statistic;
        cell.alpha = 0.05;
        cell.reference = statistic == ExperimentSpec::Statistic::cvm
                             ? rows[r].cvm[c]
                             : rows[r].cusum[c];
        cells.push_back(cell);
      }
    }
  }
}

}  // namespace

std::vector<TableCell> table_cells(int table_id) {
  std::vector<TableCell> cells;
  switch (table_id) {
    case 1:
      append_functional_cells(cells, 1, kTable1, std::size(kTable1));
      break;
    case 2:
      append_functional_cells(cells, 2, kTable2, std::size(kTable2));
      break;
    case 3:
      for (const auto& row : kTable3) {
        for (int c = 0; c < 3; ++c) {
          for (const auto statistic : {ExperimentSpec::Statistic::cvm,
                                       ExperimentSpec::Statistic::cusum}) {
            TableCell cell;
            cell.table_id = 3;
            cell.n = row.n;
            cell.p = row.p;
            cell.param = kArCoefficients[c];
            cell.statistic = statistic;
            cell.alpha = 0.05;
            cell.reference = statistic == ExperimentSpec::Statistic::cvm
                                 ? row.cvm[c]
                                 : row.cusum[c];
            cells.push_back(cell);
          }
        }
      }
      break;
    case 4:
      append_scalar_power_cells(cells, 4, 0.5, kTable4Mu05, std::size(kTable4Mu05));
      append_scalar_power_cells(cells, 4, 1.0, kTable4Mu1, std::size(kTable4Mu1));
      break;
    case 5:
      append_scalar_power_cells(cells, 5, 0.0, kTable5, std::size(kTable5));
      break;
    default:
      throw std::invalid_argument("table_cells: table id must be 1..5");
  }
  return cells;
}

ExperimentSpec experiment_for_cell(const TableCell& cell, Scale scale,
                                   std::uint64_t master_seed) {
  ExperimentSpec spec;
  spec.n = cell.n;
  spec.block = BlockRule::fixed(cell.p);
  spec.alpha = cell.alpha;
  spec.statistic = cell.statistic;
  if (scale == Scale::desk) {
    spec.runs = 500;
    spec.replicates = 499;
  } else {
    spec.runs = 1000;
    spec.replicates = (cell.table_id <= 2) ? 499 : 999;
  }

  const Eigen::Index change_at = cell.n / 2;
  if (cell.table_id <= 2) {
    spec.model = ExperimentSpec::Model::far1;
    spec.kernel = calibrate_kernel(cell.kernel, cell.param);
    spec.grid_size = 100;
    spec.burn_in = 100;
    if (cell.table_id == 2) {
      spec.alternative = AlternativeSpec::mean_shift(
          sine_curve(Grid::uniform(spec.grid_size)).values, change_at);
    }
  } else {
    spec.model = ExperimentSpec::Model::ar1;
    spec.a1 = cell.param;
    spec.weight = WeightSpec::gaussian_product(Eigen::VectorXd::Zero(1),
                                               Eigen::VectorXd::Ones(1));
    if (cell.table_id == 4) {
      spec.alternative = AlternativeSpec::mean_shift(cell.shift, change_at);
    } else if (cell.table_id == 5) {
      spec.alternative = AlternativeSpec::skewness_change(change_at);
    }
  }

  // Paired cvm/cusum (and gaussian/wiener) cells intentionally share a data
  // seed derived from the cell coordinates, mirroring "both tests applied to
  // the same series"; the statistic is not part of the derivation.
  RngStream derivation(master_seed);
  derivation = derivation.fork(static_cast<std::uint64_t>(cell.table_id));
  derivation = derivation.fork(static_cast<std::uint64_t>(cell.n));
  derivation = derivation.fork(static_cast<std::uint64_t>(cell.p));
  derivation = derivation.fork(static_cast<std::uint64_t>(cell.param * 1000.0 + 0.5));
  derivation = derivation.fork(static_cast<std::uint64_t>(cell.shift * 1000.0 + 0.5));
  spec.master_seed =
      derivation.derive_key(cell.kernel == KernelSpec::Kind::gaussian ? 1 : 2);
  return spec;
}

std::vector<TableCellResult> reproduce_table(int table_id, Scale scale,
                                             std::uint64_t master_seed,
                                             unsigned threads) {
  std::vector<TableCellResult> results;
  for (const TableCell& cell : table_cells(table_id)) {
    const ExperimentSpec spec = experiment_for_cell(cell, scale, master_seed);
    const ExperimentReport report = run_experiment(spec, threads);
    TableCellResult result;
    result.cell = cell;
    result.scale = scale == Scale::desk ? "desk" : "full";
    result.runs = report.runs;
    result.replicates = spec.replicates;
    result.rejection_rate = report.rejection_rate;
    result.ci_halfwidth = report.ci_halfwidth;
    result.abs_diff = std::abs(report.rejection_rate - cell.reference);
    result.seconds = report.wall_time_seconds;
    result.master_seed = spec.master_seed;
    results.push_back(result);
  }
  return results;
}

}  // namespace cpb
