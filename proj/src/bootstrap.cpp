#include "cpb/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cpb/parallel.hpp"

namespace cpb {

BlockPlan block_partition(Eigen::Index n, Eigen::Index p) {
  if (p < 1 || p > n) {
    std::ostringstream msg;
    msg << "block_partition: block length p=" << p
        << " must satisfy 1 <= p <= n=" << n;
    throw std::invalid_argument(msg.str());
  }
  const Eigen::Index k = n / p;
  if (k < 2) {
    std::ostringstream msg;
    msg << "block_partition: k = floor(" << n << "/" << p << ") = " << k
        << " blocks; need k >= 2 (a single block makes the bootstrap "
           "statistic degenerate)";
    throw std::invalid_argument(msg.str());
  }
  BlockPlan plan;
  plan.n = n;
  plan.p = p;
  plan.k = k;
  plan.used = k * p;
  plan.discarded_tail = n - plan.used;
  return plan;
}

Eigen::Index dyadic_block_length(Eigen::Index n, double base_constant,
                                 double exponent) {
  if (n < 2) throw std::invalid_argument("dyadic_block_length: need n >= 2");
  if (!(exponent > 0.0 && exponent < 1.0)) {
    throw std::invalid_argument(
        "dyadic_block_length: exponent must lie in (0,1) so p(n) = O(n^{1-eps})");
  }
  if (!(base_constant > 0.0)) {
    throw std::invalid_argument("dyadic_block_length: base constant must be > 0");
  }
  int l = 0;
  while ((Eigen::Index{1} << l) < n) ++l;  // l = ceil(log2 n)
  const double x = base_constant * std::pow(2.0, l * exponent);
  // ceil with a guard for exact integers hit up to rounding (e.g. 64^{1/3})
  const double nearest = std::round(x);
  double p = (std::abs(x - nearest) < 1e-9 * std::max(1.0, x)) ? nearest
                                                               : std::ceil(x);
  return static_cast<Eigen::Index>(std::max(1.0, p));
}

BlockRule BlockRule::fixed(Eigen::Index p) {
  BlockRule rule;
  rule.kind = Kind::fixed;
  rule.fixed_p = p;
  return rule;
}

BlockRule BlockRule::dyadic(double base_constant, double exponent) {
  BlockRule rule;
  rule.kind = Kind::dyadic;
  rule.base_constant = base_constant;
  rule.exponent = exponent;
  return rule;
}

Eigen::Index BlockRule::block_length_for(Eigen::Index n) const {
  return kind == Kind::fixed ? fixed_p
                             : dyadic_block_length(n, base_constant, exponent);
}

std::vector<int> resample_indices(const BlockPlan& plan, RngStream& rng) {
  std::vector<int> indices(static_cast<std::size_t>(plan.used));
  for (Eigen::Index j = 0; j < plan.k; ++j) {
    const auto block =
        static_cast<Eigen::Index>(rng.uniform_below(static_cast<std::uint64_t>(plan.k)));
    for (Eigen::Index r = 0; r < plan.p; ++r) {
      indices[static_cast<std::size_t>(j * plan.p + r)] =
          static_cast<int>(block * plan.p + r);
    }
  }
  return indices;
}

namespace {

Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& values,
                               const std::vector<int>& indices) {
  Eigen::MatrixXd out(values.rows(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    out.col(static_cast<Eigen::Index>(i)) = values.col(indices[i]);
  }
  return out;
}

double max_entry(const Eigen::VectorXd& process) {
  return process.maxCoeff();
}

}  // namespace

double bootstrap_cusum_statistic(const FunctionalSample& s, const BlockPlan& plan,
                                 RngStream& rng) {
  if (plan.n != s.size()) {
    throw std::invalid_argument("bootstrap_cusum_statistic: plan does not match sample");
  }
  const std::vector<int> indices = resample_indices(plan, rng);
  const Eigen::MatrixXd resampled = gather_columns(s.values(), indices);
  return max_entry(cusum_process(resampled, s.grid()->quad_weights));
}

double bootstrap_cvm_statistic(const VectorSample& v, const WeightSpec& w,
                               const Eigen::MatrixXd& gram, const BlockPlan& plan,
                               RngStream& rng) {
  if (gram.rows() != v.size() || gram.cols() != v.size()) {
    throw std::invalid_argument("bootstrap_cvm_statistic: gram shape mismatch");
  }
  if (v.dim() != w.dim()) {
    throw std::invalid_argument("bootstrap_cvm_statistic: weight dimension mismatch");
  }
  if (plan.n != v.size()) {
    throw std::invalid_argument("bootstrap_cvm_statistic: plan does not match sample");
  }
  const std::vector<int> indices = resample_indices(plan, rng);
  return max_entry(cvm_process_remapped(gram, indices));
}

std::vector<Curve> bootstrap_partial_sum_process(const FunctionalSample& s,
                                                 const BlockPlan& plan,
                                                 RngStream& rng,
                                                 const Eigen::VectorXd& t_grid) {
  if (plan.n != s.size()) {
    throw std::invalid_argument("bootstrap_partial_sum_process: plan mismatch");
  }
  for (Eigen::Index i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] >= 0.0 && t_grid[i] <= 1.0)) {
      throw std::invalid_argument("bootstrap_partial_sum_process: t outside [0,1]");
    }
  }
  const Eigen::Index g = s.grid()->size();
  const Eigen::Index kp = plan.used;

  // Position-wise conditional mean: offset r averages the original blocks at r.
  Eigen::MatrixXd offset_mean = Eigen::MatrixXd::Zero(g, plan.p);
  for (Eigen::Index i = 0; i < plan.k; ++i) {
    offset_mean += s.values().middleCols(i * plan.p, plan.p);
  }
  offset_mean /= static_cast<double>(plan.k);

  const std::vector<int> indices = resample_indices(plan, rng);
  Eigen::MatrixXd prefix(g, kp + 1);
  prefix.col(0).setZero();
  for (Eigen::Index i = 0; i < kp; ++i) {
    prefix.col(i + 1) =
        prefix.col(i) + s.values().col(indices[static_cast<std::size_t>(i)]) -
        offset_mean.col(i % plan.p);
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(kp));
  std::vector<Curve> curves;
  curves.reserve(static_cast<std::size_t>(t_grid.size()));
  for (Eigen::Index i = 0; i < t_grid.size(); ++i) {
    const auto cut = static_cast<Eigen::Index>(
        std::floor(static_cast<double>(kp) * t_grid[i]));
    curves.emplace_back(s.grid(), scale * prefix.col(std::min(cut, kp)));
  }
  return curves;
}

double empirical_quantile(const Eigen::VectorXd& replicates, double alpha) {
  const Eigen::Index j = replicates.size();
  if (j < 1) throw std::invalid_argument("empirical_quantile: need J >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("empirical_quantile: alpha must lie in (0,1)");
  }
  auto rank = static_cast<Eigen::Index>(
      std::ceil((1.0 - alpha) * static_cast<double>(j + 1)));
  rank = std::clamp<Eigen::Index>(rank, 1, j);
  std::vector<double> sorted(replicates.data(), replicates.data() + j);
  std::nth_element(sorted.begin(), sorted.begin() + (rank - 1), sorted.end());
  return sorted[static_cast<std::size_t>(rank - 1)];
}

namespace {

// Steps (ii)-(iv) of the bootstrap test, shared by both statistics: replicate
// j draws from stream (seed, j), so reports are schedule-independent.
template <typename ReplicateFn>
TestReport finish_test(const CusumResult& observed, const BlockPlan& plan,
                       const BootstrapConfig& config, unsigned threads,
                       ReplicateFn&& replicate) {
  if (config.replicates < 1) {
    throw std::invalid_argument("run_test: need at least one bootstrap replicate");
  }
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    throw std::invalid_argument("run_test: alpha must lie in (0,1)");
  }
  TestReport report;
  report.statistic = observed.statistic;
  report.argmax_m = observed.argmax_m;
  report.plan = plan;
  report.seed = config.seed;
  report.alpha = config.alpha;
  report.replicates.resize(config.replicates);
  const RngStream root(config.seed);
  parallel_for(static_cast<std::size_t>(config.replicates), threads,
               [&](std::size_t j) {
                 RngStream stream = root.fork(static_cast<std::uint64_t>(j) + 1);
                 report.replicates[static_cast<Eigen::Index>(j)] = replicate(stream);
               });
  report.quantile = empirical_quantile(report.replicates, config.alpha);
  const auto above =
      (report.replicates.array() >= report.statistic).count();
  report.p_value = (1.0 + static_cast<double>(above)) /
                   static_cast<double>(config.replicates + 1);
  report.reject = report.statistic > report.quantile;
  return report;
}

}  // namespace

TestReport run_test(const FunctionalSample& s, const BootstrapConfig& config,
                    unsigned threads) {
  const BlockPlan plan =
      block_partition(s.size(), config.block_rule.block_length_for(s.size()));
  const CusumResult observed = cusum_statistic(s);
  return finish_test(observed, plan, config, threads, [&](RngStream& stream) {
    return bootstrap_cusum_statistic(s, plan, stream);
  });
}

TestReport run_test(const VectorSample& v, const WeightSpec& w,
                    const BootstrapConfig& config, unsigned threads) {
  const BlockPlan plan =
      block_partition(v.size(), config.block_rule.block_length_for(v.size()));
  const Eigen::MatrixXd gram = indicator_gram(v, w);
  std::vector<int> identity(static_cast<std::size_t>(v.size()));
  for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = static_cast<int>(i);
  const CusumResult observed =
      detail::max_with_first_argmax(cvm_process_remapped(gram, identity));
  return finish_test(observed, plan, config, threads, [&](RngStream& stream) {
    return bootstrap_cvm_statistic(v, w, gram, plan, stream);
  });
}

double long_run_variance_diagnostic(const FunctionalSample& s,
                                    const BlockPlan& plan, const Curve& h) {
  if (plan.n != s.size()) {
    throw std::invalid_argument("long_run_variance_diagnostic: plan mismatch");
  }
  if (!same_grid(*s.grid(), *h.grid)) {
    throw std::invalid_argument("long_run_variance_diagnostic: direction on wrong grid");
  }
  if (!(norm(h) > 0.0)) {
    throw std::invalid_argument("long_run_variance_diagnostic: direction must be nonzero");
  }
  // scores y_i = <X_i, h>; variance of block sums of the centered scores
  const Eigen::VectorXd weighted = h.values.array() * h.grid->quad_weights.array();
  const Eigen::VectorXd scores = s.values().transpose() * weighted;
  const double used_mean = scores.head(plan.used).mean();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < plan.k; ++i) {
    const double block_sum = scores.segment(i * plan.p, plan.p).sum() -
                             static_cast<double>(plan.p) * used_mean;
    acc += (block_sum * block_sum) / static_cast<double>(plan.p);
  }
  return acc / static_cast<double>(plan.k);
}

}  // namespace cpb
