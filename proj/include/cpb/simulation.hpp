#pragma once

#include <Eigen/Dense>

#include <memory>

#include "cpb/hilbert.hpp"
#include "cpb/rng.hpp"
#include "cpb/statistics.hpp"

namespace cpb {

// Autoregression kernel psi on [0,1]^2, scaled so its L^2 norm equals
// target_norm (< 1 keeps the FAR(1) process stationary):
//   gaussian: psi(s,t) = C exp((s^2 + t^2)/2)
//   wiener:   psi(s,t) = C min(s,t)
struct KernelSpec {
  enum class Kind { gaussian, wiener };
  Kind kind = Kind::gaussian;
  double constant = 0.0;
  double target_norm = 0.0;
};

// Solves for the constant from the norm relations ||psi_gaussian|| =
// C * (int_0^1 exp(s^2) ds) and ||psi_wiener|| = C / sqrt(6).
KernelSpec calibrate_kernel(KernelSpec::Kind kind, double target_norm);

double kernel_value(const KernelSpec& kernel, double s, double t);

// Discretized integral operator: row t, column s scaled by the quadrature
// weight, so applying it to grid values approximates ∫ psi(t,s) x(s) ds.
Eigen::MatrixXd kernel_matrix(const KernelSpec& kernel, const Grid& grid);

struct Far1Spec {
  KernelSpec kernel;
  std::shared_ptr<const Grid> grid;
  int burn_in = 100;
  double innovation_scale = 1.0;
};

// Brownian bridge B(t) = W(t) - t W(1) from cumulative Gaussian increments on
// the grid; exactly 0 at grid points 0 and 1.
Curve brownian_bridge(const std::shared_ptr<const Grid>& grid, RngStream& rng);

// FAR(1): X_i = Psi(X_{i-1}) + eps_i with Brownian-bridge innovations, started
// from a bare innovation and run through `burn_in` discarded steps.
FunctionalSample far1_generate(const Far1Spec& spec, Eigen::Index n, RngStream& rng);

// Stationary Gaussian AR(1) with unit marginal variance: X_0 ~ N(0,1),
// X_i = a1 X_{i-1} + eps_i, eps_i iid N(0, 1-a1^2).
VectorSample ar1_generate(double a1, Eigen::Index n, RngStream& rng);

// Structural-change alternatives applied after generation. change_index k is
// 1-based; the change affects observations with index > k.
struct AlternativeSpec {
  enum class Kind { none, mean_shift, skewness_change };
  Kind kind = Kind::none;
  Eigen::Index change_index = 0;
  Eigen::VectorXd shift;  // grid values (functional) or a d-vector (vector data)

  static AlternativeSpec none();
  static AlternativeSpec mean_shift(Eigen::VectorXd shift, Eigen::Index k);
  static AlternativeSpec mean_shift(double mu, Eigen::Index k);
  static AlternativeSpec skewness_change(Eigen::Index k);
};

FunctionalSample apply_alternative(const FunctionalSample& s,
                                   const AlternativeSpec& alt);

// mean_shift adds the shift vector to rows past k. skewness_change expects a
// d=2 sample carrying two independent series (X, X') and emits the d=1 series
// X^2 + X'^2 up to k and 4 - (X^2 + X'^2) after: the marginal mean stays 2
// while the skewness flips sign.
VectorSample apply_alternative(const VectorSample& v, const AlternativeSpec& alt);

// mu(t) = sin(t) on the grid (the shift used in the functional power study).
Curve sine_curve(const std::shared_ptr<const Grid>& grid);

}  // namespace cpb
