#pragma once

#include <Eigen/Dense>

#include <span>

#include "cpb/hilbert.hpp"

namespace cpb {

// n observations in R^d, one per matrix row.
class VectorSample {
 public:
  explicit VectorSample(Eigen::MatrixXd rows);

  Eigen::Index size() const { return rows_.rows(); }
  Eigen::Index dim() const { return rows_.cols(); }
  const Eigen::MatrixXd& rows() const { return rows_; }

 private:
  Eigen::MatrixXd rows_;
};

// Weight function w on R^d for the weighted indicator inner product
//   <f,g>_w = ∫ f(t) g(t) w(t) dt.
// gaussian_product and uniform_box are normalized product densities
// (total mass 1) with analytic coordinate CDFs; tabulated is a piecewise
// linear density on a grid (d = 1) integrated exactly cell by cell.
class WeightSpec {
 public:
  enum class Kind { gaussian_product, uniform_box, tabulated };

  static WeightSpec gaussian_product(Eigen::VectorXd means, Eigen::VectorXd sds);
  static WeightSpec uniform_box(Eigen::VectorXd lo, Eigen::VectorXd hi);
  static WeightSpec tabulated(Eigen::VectorXd points, Eigen::VectorXd density);

  Kind kind() const { return kind_; }
  Eigen::Index dim() const { return dim_; }
  double total_mass() const { return total_mass_; }

  // Mass-normalized coordinate CDF, in [0,1].
  double coordinate_cdf(Eigen::Index r, double x) const;

  // ∫ 1{t >= x componentwise} w(t) dt = total_mass * prod_r (1 - F_r(x_r)).
  double upper_tail_mass(const Eigen::VectorXd& x) const;

 private:
  WeightSpec() = default;

  Kind kind_ = Kind::uniform_box;
  Eigen::Index dim_ = 0;
  double total_mass_ = 1.0;
  Eigen::VectorXd means_, sds_;       // gaussian_product
  Eigen::VectorXd lo_, hi_;           // uniform_box
  Eigen::VectorXd tab_points_;        // tabulated (d = 1)
  Eigen::VectorXd tab_density_;
  Eigen::VectorXd tab_cumulative_;    // trapezoid integral up to each point
};

// Test statistic value with the estimated change location. argmax_m is the
// 1-based split index m in [1, n-1]; statistic == process[argmax_m - 1], and
// ties resolve to the smallest m.
struct CusumResult {
  double statistic = 0.0;
  Eigen::Index argmax_m = 1;
  Eigen::VectorXd process;  // length n-1
};

// CUSUM trajectory: entry m-1 is n^{-1/2} || sum_{i<=m} X_i - (m/n) sum X_i ||.
Eigen::VectorXd cusum_process(const FunctionalSample& s);

// Low-level overload shared with the bootstrap analogue: columns of `values`
// are the observations, `quad_weights` defines the squared norm.
Eigen::VectorXd cusum_process(const Eigen::MatrixXd& values,
                              const Eigen::VectorXd& quad_weights);

CusumResult cusum_statistic(const FunctionalSample& s);

// Gram matrix of indicator embeddings, K_ij = ∫ 1{X_i <= t} 1{X_j <= t} w(t) dt
// = w.upper_tail_mass(componentwise max of X_i, X_j). Symmetric, entries in
// [0, total_mass], K_ij <= min(K_ii, K_jj).
Eigen::MatrixXd indicator_gram(const VectorSample& v, const WeightSpec& w);

// Cramér-von Mises trajectory: entry m-1 is (1/n) a' K a with
// a_i = 1 - m/n for i <= m and -m/n otherwise.
Eigen::VectorXd cvm_process(const VectorSample& v, const WeightSpec& w);

// Same trajectory evaluated on a resampled view of the original data:
// indices[i] names the source row of resampled observation i+1, and Gram
// lookups go through the index map instead of rebuilding K. Identity indices
// reproduce cvm_process exactly.
Eigen::VectorXd cvm_process_remapped(const Eigen::MatrixXd& gram,
                                     std::span<const int> indices);

CusumResult cvm_statistic(const VectorSample& v, const WeightSpec& w);

// Local-alternative drift: t (1-tau) for t <= tau, (1-t) tau above; peaks at
// t = tau with value tau (1-tau).
double phi_tau(double t, double tau);

namespace detail {
double standard_normal_cdf(double z);
CusumResult max_with_first_argmax(Eigen::VectorXd process);
}

}  // namespace cpb
