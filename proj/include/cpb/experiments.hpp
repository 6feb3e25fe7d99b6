#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpb/bootstrap.hpp"
#include "cpb/simulation.hpp"
#include "cpb/statistics.hpp"

namespace cpb {

// One Monte Carlo experiment: generate a series, optionally plant a change,
// run the bootstrap test, repeat `runs` times, report the rejection rate.
struct ExperimentSpec {
  enum class Model { far1, ar1 };
  enum class Statistic { cusum, cvm };

  Model model = Model::ar1;
  KernelSpec kernel;               // far1 only
  Eigen::Index grid_size = 100;
  int burn_in = 100;
  double a1 = 0.0;                 // ar1 only
  AlternativeSpec alternative;
  Eigen::Index n = 100;
  BlockRule block = BlockRule::fixed(10);
  int replicates = 499;            // bootstrap J per run
  double alpha = 0.05;
  int runs = 500;
  std::uint64_t master_seed = 0;
  Statistic statistic = Statistic::cusum;
  std::optional<WeightSpec> weight;  // required for cvm
};

struct ExperimentReport {
  double rejection_rate = 0.0;
  int reject_count = 0;
  int runs = 0;
  double ci_halfwidth = 0.0;  // 3 sqrt(r(1-r)/runs)
  double wall_time_seconds = 0.0;
  std::uint64_t master_seed = 0;
};

// Run i draws every stream from (master_seed, i), so the report is identical
// for any thread count and any execution order. Each run's bootstrap is
// sequential; parallelism is across runs.
ExperimentReport run_experiment(const ExperimentSpec& spec, unsigned threads = 1);

// Scalar series as degenerate functional data: each value becomes a constant
// curve on a two-point grid with total weight 1, so the Hilbert norm is the
// absolute value and the functional CUSUM reduces to the classical one.
FunctionalSample scalar_as_functional(const VectorSample& v);

// --- published table reproduction -----------------------------------------

enum class Scale { desk, full };

// Coordinates and reference value of one published cell. `param` is the
// kernel norm for tables 1-2 and the AR coefficient for tables 3-5; `shift`
// is the table 4 level shift (tables 2/5 encode their alternative by id).
struct TableCell {
  int table_id = 1;
  Eigen::Index n = 0;
  Eigen::Index p = 0;
  double param = 0.0;
  KernelSpec::Kind kernel = KernelSpec::Kind::gaussian;
  double shift = 0.0;
  ExperimentSpec::Statistic statistic = ExperimentSpec::Statistic::cusum;
  double alpha = 0.1;
  double reference = 0.0;  // published rate, comparison only
};

std::vector<TableCell> table_cells(int table_id);

// Desk scale: runs=500, J=499. Full scale: runs=1000 with the published
// replicate counts (J=499 for the functional tables, J=999 for the rest).
ExperimentSpec experiment_for_cell(const TableCell& cell, Scale scale,
                                   std::uint64_t master_seed);

struct TableCellResult {
  TableCell cell;
  std::string scale;
  int runs = 0;
  int replicates = 0;
  double rejection_rate = 0.0;
  double ci_halfwidth = 0.0;
  double abs_diff = 0.0;  // |rejection_rate - cell.reference|
  double seconds = 0.0;
  std::uint64_t master_seed = 0;
};

std::vector<TableCellResult> reproduce_table(int table_id, Scale scale,
                                             std::uint64_t master_seed,
                                             unsigned threads = 1);

}  // namespace cpb
