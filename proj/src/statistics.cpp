#include "cpb/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace cpb {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

VectorSample::VectorSample(Eigen::MatrixXd rows) : rows_(std::move(rows)) {
  require(rows_.rows() >= 2, "VectorSample: need at least 2 observations");
  require(rows_.cols() >= 1, "VectorSample: dimension must be positive");
  require(rows_.allFinite(), "VectorSample: observations must be finite");
}

WeightSpec WeightSpec::gaussian_product(Eigen::VectorXd means, Eigen::VectorXd sds) {
  require(means.size() >= 1 && means.size() == sds.size(),
          "WeightSpec: means/sds length mismatch");
  require((sds.array() > 0.0).all(), "WeightSpec: all sds must be positive");
  WeightSpec w;
  w.kind_ = Kind::gaussian_product;
  w.dim_ = means.size();
  w.total_mass_ = 1.0;
  w.means_ = std::move(means);
  w.sds_ = std::move(sds);
  return w;
}

WeightSpec WeightSpec::uniform_box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
  require(lo.size() >= 1 && lo.size() == hi.size(),
          "WeightSpec: lo/hi length mismatch");
  require((lo.array() < hi.array()).all(),
          "WeightSpec: need lo < hi componentwise");
  WeightSpec w;
  w.kind_ = Kind::uniform_box;
  w.dim_ = lo.size();
  w.total_mass_ = 1.0;
  w.lo_ = std::move(lo);
  w.hi_ = std::move(hi);
  return w;
}

WeightSpec WeightSpec::tabulated(Eigen::VectorXd points, Eigen::VectorXd density) {
  require(points.size() >= 2, "WeightSpec: tabulated weight needs >= 2 points");
  require(points.size() == density.size(),
          "WeightSpec: points/density length mismatch");
  for (Eigen::Index j = 0; j + 1 < points.size(); ++j) {
    require(points[j] < points[j + 1],
            "WeightSpec: tabulated points must be strictly increasing");
  }
  require((density.array() >= 0.0).all(),
          "WeightSpec: density values must be nonnegative");
  WeightSpec w;
  w.kind_ = Kind::tabulated;
  w.dim_ = 1;
  w.tab_points_ = std::move(points);
  w.tab_density_ = std::move(density);
  const Eigen::Index g = w.tab_points_.size();
  w.tab_cumulative_.resize(g);
  w.tab_cumulative_[0] = 0.0;
  for (Eigen::Index j = 1; j < g; ++j) {
    const double cell = 0.5 * (w.tab_density_[j - 1] + w.tab_density_[j]) *
                        (w.tab_points_[j] - w.tab_points_[j - 1]);
    w.tab_cumulative_[j] = w.tab_cumulative_[j - 1] + cell;
  }
  w.total_mass_ = w.tab_cumulative_[g - 1];
  require(w.total_mass_ > 0.0 && std::isfinite(w.total_mass_),
          "WeightSpec: tabulated weight must have positive finite mass");
  return w;
}

double WeightSpec::coordinate_cdf(Eigen::Index r, double x) const {
  require(r >= 0 && r < dim_, "WeightSpec: coordinate out of range");
  switch (kind_) {
    case Kind::gaussian_product:
      return detail::standard_normal_cdf((x - means_[r]) / sds_[r]);
    case Kind::uniform_box: {
      const double u = (x - lo_[r]) / (hi_[r] - lo_[r]);
      return u <= 0.0 ? 0.0 : (u >= 1.0 ? 1.0 : u);
    }
    case Kind::tabulated: {
      const Eigen::Index g = tab_points_.size();
      if (x <= tab_points_[0]) return 0.0;
      if (x >= tab_points_[g - 1]) return 1.0;
      // cell containing x; integral of the linear interpolant up to x
      Eigen::Index hi = 1;
      {
        const double* begin = tab_points_.data();
        const double* pos = std::upper_bound(begin, begin + g, x);
        hi = pos - begin;
      }
      const Eigen::Index lo = hi - 1;
      const double t0 = tab_points_[lo], t1 = tab_points_[hi];
      const double d0 = tab_density_[lo], d1 = tab_density_[hi];
      const double frac = (x - t0) / (t1 - t0);
      const double dx_density = d0 + frac * (d1 - d0);
      const double partial = 0.5 * (d0 + dx_density) * (x - t0);
      return (tab_cumulative_[lo] + partial) / total_mass_;
    }
  }
  return 0.0;
}

double WeightSpec::upper_tail_mass(const Eigen::VectorXd& x) const {
  require(x.size() == dim_, "WeightSpec: point dimension mismatch");
  double tail = total_mass_;
  for (Eigen::Index r = 0; r < dim_; ++r) {
    tail *= 1.0 - coordinate_cdf(r, x[r]);
  }
  return tail;
}

Eigen::VectorXd cusum_process(const Eigen::MatrixXd& values,
                              const Eigen::VectorXd& quad_weights) {
  const Eigen::Index n = values.cols();
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  const Eigen::VectorXd total = values.rowwise().sum();
  Eigen::VectorXd running = Eigen::VectorXd::Zero(values.rows());
  Eigen::VectorXd process(n - 1);
  for (Eigen::Index m = 1; m <= n - 1; ++m) {
    running += values.col(m - 1);
    const double frac = static_cast<double>(m) / static_cast<double>(n);
    const double sq =
        ((running - frac * total).array().square() * quad_weights.array()).sum();
    process[m - 1] = inv_sqrt_n * std::sqrt(sq);
  }
  return process;
}

Eigen::VectorXd cusum_process(const FunctionalSample& s) {
  return cusum_process(s.values(), s.grid()->quad_weights);
}

CusumResult cusum_statistic(const FunctionalSample& s) {
  return detail::max_with_first_argmax(cusum_process(s));
}

Eigen::MatrixXd indicator_gram(const VectorSample& v, const WeightSpec& w) {
  if (v.dim() != w.dim()) {
    throw std::invalid_argument("indicator_gram: sample/weight dimension mismatch");
  }
  const Eigen::Index n = v.size();
  const Eigen::Index d = v.dim();
  // F is monotone, so F(max(a,b)) = max(F(a), F(b)): precompute CDF values
  // once per observation and coordinate.
  Eigen::MatrixXd cdf(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index r = 0; r < d; ++r) {
      cdf(i, r) = w.coordinate_cdf(r, v.rows()(i, r));
    }
  }
  const double mass = w.total_mass();
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      double tail = mass;
      for (Eigen::Index r = 0; r < d; ++r) {
        tail *= 1.0 - std::max(cdf(i, r), cdf(j, r));
      }
      gram(i, j) = tail;
      gram(j, i) = tail;
    }
  }
  return gram;
}

Eigen::VectorXd cvm_process_remapped(const Eigen::MatrixXd& gram,
                                     std::span<const int> indices) {
  const Eigen::Index n = static_cast<Eigen::Index>(indices.size());
  if (n < 2) throw std::invalid_argument("cvm_process_remapped: need n >= 2");
  for (const int idx : indices) {
    if (idx < 0 || idx >= gram.rows()) {
      throw std::invalid_argument("cvm_process_remapped: index out of range");
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);

  // Row sums of the remapped Gram.
  Eigen::VectorXd row_sum(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const double* col = gram.col(indices[a]).data();
    double acc = 0.0;
    for (Eigen::Index b = 0; b < n; ++b) acc += col[indices[b]];
    row_sum[a] = acc;
  }

  // prefix_cols[a] = sum_{b <= m} K*_{ab}, maintained incrementally in m.
  Eigen::VectorXd prefix_cols = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd process(n - 1);
  for (Eigen::Index m = 1; m <= n - 1; ++m) {
    const double* col = gram.col(indices[m - 1]).data();
    const double frac = static_cast<double>(m) * inv_n;
    double v_prefix = 0.0;  // sum_{a <= m} v_a with v = K* a(m)
    double v_total = 0.0;
    for (Eigen::Index a = 0; a < n; ++a) {
      prefix_cols[a] += col[indices[a]];
      const double v_a = prefix_cols[a] - frac * row_sum[a];
      v_total += v_a;
      if (a < m) v_prefix += v_a;
    }
    const double quad = v_prefix - frac * v_total;
    process[m - 1] = std::max(quad, 0.0) * inv_n;
  }
  return process;
}

Eigen::VectorXd cvm_process(const VectorSample& v, const WeightSpec& w) {
  const Eigen::MatrixXd gram = indicator_gram(v, w);
  std::vector<int> identity(static_cast<std::size_t>(v.size()));
  for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = static_cast<int>(i);
  return cvm_process_remapped(gram, identity);
}

CusumResult cvm_statistic(const VectorSample& v, const WeightSpec& w) {
  return detail::max_with_first_argmax(cvm_process(v, w));
}

double phi_tau(double t, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw std::invalid_argument("phi_tau: tau must lie in (0,1)");
  }
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::invalid_argument("phi_tau: t must lie in [0,1]");
  }
  return t <= tau ? t * (1.0 - tau) : (1.0 - t) * tau;
}

namespace detail {

double standard_normal_cdf(double z) {
  return 0.5 * std::erfc(-z / 1.4142135623730950488);
}

CusumResult max_with_first_argmax(Eigen::VectorXd process) {
  CusumResult result;
  result.statistic = process[0];
  result.argmax_m = 1;
  for (Eigen::Index m = 2; m <= process.size(); ++m) {
    if (process[m - 1] > result.statistic) {
      result.statistic = process[m - 1];
      result.argmax_m = m;
    }
  }
  result.process = std::move(process);
  return result;
}

}  // namespace detail

}  // namespace cpb
