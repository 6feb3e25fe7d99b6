#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "cpb/hilbert.hpp"
#include "cpb/rng.hpp"
#include "cpb/statistics.hpp"

namespace cpb {

// Non-overlapping block partition: k = floor(n/p) blocks of length p; block i
// covers 1-based indices ((i-1)p, ip]. Observations past k*p are never
// resampled (the observed statistic still uses all n).
struct BlockPlan {
  Eigen::Index n = 0;
  Eigen::Index p = 0;
  Eigen::Index k = 0;
  Eigen::Index used = 0;
  Eigen::Index discarded_tail = 0;
};

// Rejects k < 2: with a single block the bootstrap statistic is identically 0.
BlockPlan block_partition(Eigen::Index n, Eigen::Index p);

// Block length held constant on dyadic ranges (2^{l-1}, 2^l]:
// ceil(base_constant * (2^l)^exponent) with l = ceil(log2 n). Nondecreasing in
// n; exponent must lie in (0,1) so that p(n) = O(n^{1-eps}).
Eigen::Index dyadic_block_length(Eigen::Index n, double base_constant,
                                 double exponent);

struct BlockRule {
  enum class Kind { fixed, dyadic };
  Kind kind = Kind::fixed;
  Eigen::Index fixed_p = 1;
  double base_constant = 1.0;
  double exponent = 1.0 / 3.0;

  static BlockRule fixed(Eigen::Index p);
  static BlockRule dyadic(double base_constant, double exponent);
  Eigen::Index block_length_for(Eigen::Index n) const;
};

struct BootstrapConfig {
  BlockRule block_rule;
  int replicates = 499;      // J
  std::uint64_t seed = 0;
  double alpha = 0.05;
};

struct TestReport {
  double statistic = 0.0;
  Eigen::Index argmax_m = 1;
  double quantile = 0.0;
  double p_value = 1.0;
  bool reject = false;
  Eigen::VectorXd replicates;  // length J, in replicate order
  BlockPlan plan;
  std::uint64_t seed = 0;
  double alpha = 0.05;
};

// Draws k blocks uniformly with replacement and returns the source index (into
// the original sample, 0-based) of each of the k*p resampled observations.
std::vector<int> resample_indices(const BlockPlan& plan, RngStream& rng);

// Bootstrap CUSUM statistic: the CUSUM statistic of the resampled length-k*p
// sequence (normalization uses k*p).
double bootstrap_cusum_statistic(const FunctionalSample& s, const BlockPlan& plan,
                                 RngStream& rng);

// Bootstrap Cramér-von Mises statistic, evaluated by remapping the original
// Gram matrix through the resampled indices (no Gram rebuild).
double bootstrap_cvm_statistic(const VectorSample& v, const WeightSpec& w,
                               const Eigen::MatrixXd& gram, const BlockPlan& plan,
                               RngStream& rng);

// Bootstrapped partial sum process W*(t) = (kp)^{-1/2} sum_{i<=floor(kp t)}
// (X*_i - E*X*_i), where E*X*_i is the position-wise conditional mean (the
// average of the original blocks at the same within-block offset). Diagnostic;
// one curve per requested t in [0,1].
std::vector<Curve> bootstrap_partial_sum_process(const FunctionalSample& s,
                                                 const BlockPlan& plan,
                                                 RngStream& rng,
                                                 const Eigen::VectorXd& t_grid);

// r-th order statistic with r = ceil((1-alpha)(J+1)), clamped to [1, J].
double empirical_quantile(const Eigen::VectorXd& replicates, double alpha);

// Complete bootstrap test: observed statistic, J replicates on streams
// (seed, 1..J), the empirical (1-alpha)-quantile, the add-one p-value
// (1 + #{T*_j >= T_n}) / (J+1), and the strict rejection rule T_n > quantile.
// Replicates may run on several threads; the report never depends on the
// schedule.
TestReport run_test(const FunctionalSample& s, const BootstrapConfig& config,
                    unsigned threads = 1);
TestReport run_test(const VectorSample& v, const WeightSpec& w,
                    const BootstrapConfig& config, unsigned threads = 1);

// Estimates <S h, h> (long-run variance in direction h) by the empirical
// variance of normalized block sums.
double long_run_variance_diagnostic(const FunctionalSample& s,
                                    const BlockPlan& plan, const Curve& h);

}  // namespace cpb
