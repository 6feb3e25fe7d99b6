#include "cpb/simulation.hpp"

#include <cmath>
#include <stdexcept>

namespace cpb {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

// int_0^1 exp(s^2) ds = (sqrt(pi)/2) erfi(1); the gaussian kernel norm is the
// constant times this in each coordinate.
constexpr double kIntExpSquared = 1.4626517459071815;

}  // namespace

KernelSpec calibrate_kernel(KernelSpec::Kind kind, double target_norm) {
  require(target_norm >= 0.0 && target_norm < 1.0,
          "calibrate_kernel: target norm must lie in [0,1) for stationarity");
  KernelSpec spec;
  spec.kind = kind;
  spec.target_norm = target_norm;
  spec.constant = kind == KernelSpec::Kind::gaussian
                      ? target_norm / kIntExpSquared
                      : target_norm * std::sqrt(6.0);
  return spec;
}

double kernel_value(const KernelSpec& kernel, double s, double t) {
  return kernel.kind == KernelSpec::Kind::gaussian
             ? kernel.constant * std::exp((s * s + t * t) / 2.0)
             : kernel.constant * std::min(s, t);
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& kernel, const Grid& grid) {
  const Eigen::Index g = grid.size();
  Eigen::MatrixXd op(g, g);
  for (Eigen::Index row = 0; row < g; ++row) {
    for (Eigen::Index col = 0; col < g; ++col) {
      op(row, col) = kernel_value(kernel, grid.points[row], grid.points[col]) *
                     grid.quad_weights[col];
    }
  }
  return op;
}

Curve brownian_bridge(const std::shared_ptr<const Grid>& grid, RngStream& rng) {
  const Grid& g = *grid;
  require(g.points[0] >= 0.0 && g.points[g.size() - 1] <= 1.0,
          "brownian_bridge: grid must lie in [0,1]");
  Eigen::VectorXd wiener(g.size());
  wiener[0] = g.points[0] > 0.0 ? std::sqrt(g.points[0]) * rng.next_gaussian() : 0.0;
  for (Eigen::Index j = 1; j < g.size(); ++j) {
    wiener[j] = wiener[j - 1] +
                std::sqrt(g.points[j] - g.points[j - 1]) * rng.next_gaussian();
  }
  const double terminal = wiener[g.size() - 1];
  Eigen::VectorXd bridge(g.size());
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    bridge[j] = wiener[j] - g.points[j] * terminal;
  }
  return Curve(grid, std::move(bridge));
}

FunctionalSample far1_generate(const Far1Spec& spec, Eigen::Index n, RngStream& rng) {
  require(n >= 2, "far1_generate: need n >= 2");
  require(spec.burn_in >= 0, "far1_generate: burn-in must be nonnegative");
  require(spec.grid != nullptr, "far1_generate: null grid");
  const Eigen::Index g = spec.grid->size();
  const bool autoregress = spec.kernel.constant != 0.0;
  Eigen::MatrixXd op;
  if (autoregress) op = kernel_matrix(spec.kernel, *spec.grid);

  Eigen::MatrixXd out(g, n);
  Eigen::VectorXd state(g);
  const Eigen::Index total = spec.burn_in + n;
  for (Eigen::Index step = 0; step < total; ++step) {
    Eigen::VectorXd innovation =
        spec.innovation_scale * brownian_bridge(spec.grid, rng).values;
    if (step == 0) {
      state = std::move(innovation);
    } else if (autoregress) {
      state = op * state + innovation;
    } else {
      state = std::move(innovation);
    }
    if (step >= spec.burn_in) out.col(step - spec.burn_in) = state;
  }
  return FunctionalSample(spec.grid, std::move(out));
}

VectorSample ar1_generate(double a1, Eigen::Index n, RngStream& rng) {
  require(std::abs(a1) < 1.0, "ar1_generate: need |a1| < 1");
  require(n >= 2, "ar1_generate: need n >= 2");
  const double innovation_sd = std::sqrt(1.0 - a1 * a1);
  Eigen::MatrixXd rows(n, 1);
  double state = rng.next_gaussian();  // stationary start, N(0,1)
  rows(0, 0) = state;
  for (Eigen::Index i = 1; i < n; ++i) {
    state = a1 * state + innovation_sd * rng.next_gaussian();
    rows(i, 0) = state;
  }
  return VectorSample(std::move(rows));
}

AlternativeSpec AlternativeSpec::none() { return AlternativeSpec{}; }

AlternativeSpec AlternativeSpec::mean_shift(Eigen::VectorXd shift, Eigen::Index k) {
  AlternativeSpec alt;
  alt.kind = Kind::mean_shift;
  alt.change_index = k;
  alt.shift = std::move(shift);
  return alt;
}

AlternativeSpec AlternativeSpec::mean_shift(double mu, Eigen::Index k) {
  Eigen::VectorXd shift(1);
  shift[0] = mu;
  return mean_shift(std::move(shift), k);
}

AlternativeSpec AlternativeSpec::skewness_change(Eigen::Index k) {
  AlternativeSpec alt;
  alt.kind = Kind::skewness_change;
  alt.change_index = k;
  return alt;
}

namespace {

void check_change_index(Eigen::Index k, Eigen::Index n) {
  if (k < 1 || k > n - 1) {
    throw std::invalid_argument(
        "apply_alternative: change index must satisfy 1 <= k <= n-1");
  }
}

}  // namespace

FunctionalSample apply_alternative(const FunctionalSample& s,
                                   const AlternativeSpec& alt) {
  switch (alt.kind) {
    case AlternativeSpec::Kind::none:
      return s;
    case AlternativeSpec::Kind::mean_shift: {
      check_change_index(alt.change_index, s.size());
      require(alt.shift.size() == s.grid()->size(),
              "apply_alternative: shift length != grid size");
      Eigen::MatrixXd values = s.values();
      for (Eigen::Index i = alt.change_index; i < s.size(); ++i) {
        values.col(i) += alt.shift;
      }
      return FunctionalSample(s.grid(), std::move(values));
    }
    case AlternativeSpec::Kind::skewness_change:
      throw std::invalid_argument(
          "apply_alternative: skewness change is defined for vector samples");
  }
  throw std::invalid_argument("apply_alternative: unknown alternative");
}

VectorSample apply_alternative(const VectorSample& v, const AlternativeSpec& alt) {
  switch (alt.kind) {
    case AlternativeSpec::Kind::none:
      return v;
    case AlternativeSpec::Kind::mean_shift: {
      check_change_index(alt.change_index, v.size());
      require(alt.shift.size() == v.dim(),
              "apply_alternative: shift length != sample dimension");
      Eigen::MatrixXd rows = v.rows();
      for (Eigen::Index i = alt.change_index; i < v.size(); ++i) {
        rows.row(i) += alt.shift.transpose();
      }
      return VectorSample(std::move(rows));
    }
    case AlternativeSpec::Kind::skewness_change: {
      check_change_index(alt.change_index, v.size());
      require(v.dim() == 2,
              "apply_alternative: skewness change needs two independent series "
              "(d = 2 input)");
      Eigen::MatrixXd rows(v.size(), 1);
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double sum_of_squares =
            v.rows()(i, 0) * v.rows()(i, 0) + v.rows()(i, 1) * v.rows()(i, 1);
        rows(i, 0) = i < alt.change_index ? sum_of_squares : 4.0 - sum_of_squares;
      }
      return VectorSample(std::move(rows));
    }
  }
  throw std::invalid_argument("apply_alternative: unknown alternative");
}

Curve sine_curve(const std::shared_ptr<const Grid>& grid) {
  return Curve(grid, grid->points.array().sin());
}

}  // namespace cpb
