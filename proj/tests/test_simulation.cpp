#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cpb/simulation.hpp"
#include "cpb/statistics.hpp"
#include "test_support.hpp"

using namespace cpb;

namespace {

// 2-D trapezoid quadrature of psi^2 over [0,1]^2: the independent calibration
// oracle (never reads KernelSpec.target_norm back).
double kernel_squared_integral(const KernelSpec& kernel, Eigen::Index g) {
  const auto grid = Grid::uniform(g);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < g; ++i) {
    for (Eigen::Index j = 0; j < g; ++j) {
      const double value = kernel_value(kernel, grid->points[i], grid->points[j]);
      acc += value * value * grid->quad_weights[i] * grid->quad_weights[j];
    }
  }
  return acc;
}

double lag1_correlation(const std::vector<double>& series) {
  const std::size_t n = series.size();
  double mean = 0.0;
  for (const double x : series) mean += x;
  mean /= static_cast<double>(n);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    den += (series[i] - mean) * (series[i] - mean);
    if (i + 1 < n) num += (series[i] - mean) * (series[i + 1] - mean);
  }
  return num / den;
}

}  // namespace

TEST_CASE("brownian bridge endpoints are exactly zero") {
  const auto grid = Grid::uniform(101);
  RngStream rng(1);
  for (int i = 0; i < 50; ++i) {
    const Curve bridge = brownian_bridge(grid, rng);
    CHECK(bridge.values[0] == 0.0);
    CHECK(bridge.values[100] == 0.0);
  }
}

TEST_CASE("brownian bridge covariance matches min(s,t) - st") {
  const auto grid = Grid::uniform(5);  // 0, .25, .5, .75, 1
  RngStream rng(2);
  const int draws = 100000;
  Eigen::MatrixXd sum_outer = Eigen::MatrixXd::Zero(3, 3);  // interior points
  for (int i = 0; i < draws; ++i) {
    const Curve bridge = brownian_bridge(grid, rng);
    const Eigen::Vector3d interior(bridge.values[1], bridge.values[2],
                                   bridge.values[3]);
    sum_outer += interior * interior.transpose();
  }
  sum_outer /= draws;
  const double points[3] = {0.25, 0.5, 0.75};
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const double expected = std::min(points[a], points[b]) - points[a] * points[b];
      // gaussian fourth moments give Var(B_a B_b) = Va Vb + Cov^2
      const double va = points[a] * (1 - points[a]);
      const double vb = points[b] * (1 - points[b]);
      const double sigma =
          std::sqrt((va * vb + expected * expected) / static_cast<double>(draws));
      CHECK(std::abs(sum_outer(a, b) - expected) < 3.0 * sigma + 1e-6);
    }
  }
  // the two values called out explicitly: Var B(1/2) = 1/4 and
  // Cov(B(1/4), B(3/4)) = 1/16
  CHECK(sum_outer(1, 1) == doctest::Approx(0.25).epsilon(0.02));
  CHECK(sum_outer(0, 2) == doctest::Approx(0.0625).epsilon(0.1));
}

TEST_CASE("kernel calibration hits the requested L2 norm") {
  for (const auto kind : {KernelSpec::Kind::gaussian, KernelSpec::Kind::wiener}) {
    for (const double target : {0.1, 0.2, 0.4, 0.6}) {
      const KernelSpec kernel = calibrate_kernel(kind, target);
      const double ratio = kernel_squared_integral(kernel, 801) / (target * target);
      CHECK(ratio > 0.999);
      CHECK(ratio < 1.001);
    }
  }
}

TEST_CASE("kernel calibration constants match the published relations") {
  const KernelSpec zero = calibrate_kernel(KernelSpec::Kind::gaussian, 0.0);
  CHECK(zero.constant == 0.0);

  const KernelSpec wiener = calibrate_kernel(KernelSpec::Kind::wiener, 0.6);
  CHECK(wiener.constant == doctest::Approx(0.6 * std::sqrt(6.0)).epsilon(1e-12));
  CHECK(kernel_squared_integral(wiener, 801) == doctest::Approx(0.36).epsilon(1e-3));

  const KernelSpec gaussian = calibrate_kernel(KernelSpec::Kind::gaussian, 0.4);
  CHECK(gaussian.constant == doctest::Approx(0.27328).epsilon(1e-3));
  CHECK(kernel_squared_integral(gaussian, 801) ==
        doctest::Approx(0.16).epsilon(1e-3));
}

TEST_CASE("kernel calibration rejects nonstationary norms") {
  CHECK_THROWS_AS(calibrate_kernel(KernelSpec::Kind::gaussian, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(calibrate_kernel(KernelSpec::Kind::wiener, -0.1),
                  std::invalid_argument);
}

TEST_CASE("far1 with zero kernel emits independent bridges") {
  Far1Spec spec;
  spec.kernel = calibrate_kernel(KernelSpec::Kind::gaussian, 0.0);
  spec.grid = Grid::uniform(50);
  spec.burn_in = 100;
  RngStream rng(77);
  const Eigen::Index n = 10000;
  const FunctionalSample sample = far1_generate(spec, n, rng);

  const Curve direction(spec.grid, Eigen::VectorXd::Ones(50));
  std::vector<double> scores(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    scores[static_cast<std::size_t>(i)] = inner_product(sample.curve(i), direction);
  }
  CHECK(std::abs(lag1_correlation(scores)) < 3.5 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("far1 with a wiener kernel of norm 0.6 is positively dependent") {
  Far1Spec spec;
  spec.kernel = calibrate_kernel(KernelSpec::Kind::wiener, 0.6);
  spec.grid = Grid::uniform(50);
  RngStream rng(78);
  const Eigen::Index n = 10000;
  const FunctionalSample sample = far1_generate(spec, n, rng);

  const Curve direction(spec.grid, Eigen::VectorXd::Ones(50));
  std::vector<double> scores(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    scores[static_cast<std::size_t>(i)] = inner_product(sample.curve(i), direction);
  }
  CHECK(lag1_correlation(scores) > 0.2);
}

TEST_CASE("far1 generation is deterministic for a fixed seed") {
  Far1Spec spec;
  spec.kernel = calibrate_kernel(KernelSpec::Kind::wiener, 0.3);
  spec.grid = Grid::uniform(20);
  RngStream a(5);
  RngStream b(5);
  const FunctionalSample first = far1_generate(spec, 30, a);
  const FunctionalSample second = far1_generate(spec, 30, b);
  CHECK((first.values().array() == second.values().array()).all());
}

TEST_CASE("ar1 with a1=0 is iid with unit variance") {
  RngStream rng(90);
  const Eigen::Index n = 100000;
  const VectorSample sample = ar1_generate(0.0, n, rng);
  const double mean = sample.rows().col(0).mean();
  const double variance =
      (sample.rows().col(0).array() - mean).square().sum() / (n - 1);
  CHECK(std::abs(variance - 1.0) < 0.014);  // 3 sigma of the sample variance
}

TEST_CASE("ar1 with a1=0.8 has the right lag-1 autocorrelation and variance") {
  RngStream rng(91);
  const Eigen::Index n = 100000;
  const VectorSample sample = ar1_generate(0.8, n, rng);
  std::vector<double> values(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = sample.rows()(i, 0);
  CHECK(std::abs(lag1_correlation(values) - 0.8) < 0.01);
  const double mean = sample.rows().col(0).mean();
  const double variance =
      (sample.rows().col(0).array() - mean).square().sum() / (n - 1);
  // marginal variance stays 1 regardless of a1 (3 sigma, dependent data)
  CHECK(std::abs(variance - 1.0) < 0.05);
}

TEST_CASE("ar1 is deterministic for a fixed seed and rejects |a1| >= 1") {
  RngStream a(6), b(6);
  const VectorSample first = ar1_generate(0.5, 100, a);
  const VectorSample second = ar1_generate(0.5, 100, b);
  CHECK((first.rows().array() == second.rows().array()).all());
  RngStream c(6);
  CHECK_THROWS_AS(ar1_generate(1.0, 10, c), std::invalid_argument);
}

TEST_CASE("alternative none returns the input unchanged") {
  RngStream rng(40);
  const VectorSample v = ar1_generate(0.2, 50, rng);
  const VectorSample same = apply_alternative(v, AlternativeSpec::none());
  CHECK((v.rows().array() == same.rows().array()).all());
}

TEST_CASE("scalar mean shift moves the post-change segment mean by mu") {
  RngStream rng(41);
  const Eigen::Index n = 20000;
  const VectorSample base = ar1_generate(0.2, n, rng);
  const VectorSample shifted =
      apply_alternative(base, AlternativeSpec::mean_shift(1.0, n / 2));
  const double before = shifted.rows().col(0).head(n / 2).mean();
  const double after = shifted.rows().col(0).tail(n / 2).mean();
  CHECK(std::abs(after - before - 1.0) < 0.06);
  // pre-change segment untouched
  CHECK((shifted.rows().col(0).head(n / 2).array() ==
         base.rows().col(0).head(n / 2).array())
            .all());
}

TEST_CASE("skewness change keeps both segment means near 2") {
  RngStream rng_a(42), rng_b(43);
  const Eigen::Index n = 20000;
  const VectorSample x = ar1_generate(0.2, n, rng_a);
  const VectorSample x_prime = ar1_generate(0.2, n, rng_b);
  Eigen::MatrixXd both(n, 2);
  both.col(0) = x.rows().col(0);
  both.col(1) = x_prime.rows().col(0);
  const VectorSample transformed =
      apply_alternative(VectorSample(both), AlternativeSpec::skewness_change(n / 2));
  REQUIRE(transformed.dim() == 1);
  const double before = transformed.rows().col(0).head(n / 2).mean();
  const double after = transformed.rows().col(0).tail(n / 2).mean();
  CHECK(std::abs(before - 2.0) < 0.07);
  CHECK(std::abs(after - 2.0) < 0.07);
  // the skewness itself flips sign across the change
  auto skewness = [](const Eigen::VectorXd& segment) {
    const double mean = segment.mean();
    const double sd = std::sqrt((segment.array() - mean).square().mean());
    return ((segment.array() - mean) / sd).cube().mean();
  };
  const double skew_before = skewness(transformed.rows().col(0).head(n / 2));
  const double skew_after = skewness(transformed.rows().col(0).tail(n / 2));
  CHECK(skew_before > 0.5);
  CHECK(skew_after < -0.5);
}

TEST_CASE("functional mean shift adds the curve only past the change index") {
  RngStream rng(44);
  Far1Spec spec;
  spec.kernel = calibrate_kernel(KernelSpec::Kind::gaussian, 0.0);
  spec.grid = Grid::uniform(30);
  spec.burn_in = 10;
  const FunctionalSample base = far1_generate(spec, 12, rng);
  const Curve shift = sine_curve(spec.grid);
  const FunctionalSample shifted =
      apply_alternative(base, AlternativeSpec::mean_shift(shift.values, 5));
  for (Eigen::Index i = 0; i < 12; ++i) {
    const Eigen::VectorXd delta = shifted.values().col(i) - base.values().col(i);
    if (i < 5) {
      CHECK(delta.lpNorm<Eigen::Infinity>() == 0.0);
    } else {
      CHECK((delta - shift.values).lpNorm<Eigen::Infinity>() < 1e-15);
    }
  }
}

TEST_CASE("alternatives validate the change index and input shape") {
  RngStream rng(45);
  const VectorSample v = ar1_generate(0.2, 10, rng);
  CHECK_THROWS_AS(apply_alternative(v, AlternativeSpec::mean_shift(1.0, 0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(apply_alternative(v, AlternativeSpec::mean_shift(1.0, 10)),
                  std::invalid_argument);
  CHECK_THROWS_AS(apply_alternative(v, AlternativeSpec::skewness_change(5)),
                  std::invalid_argument);  // needs d = 2
}

TEST_CASE("a planted suffix shift raises the statistic at a fixed seed") {
  RngStream rng(46);
  Far1Spec spec;
  spec.kernel = calibrate_kernel(KernelSpec::Kind::gaussian, 0.2);
  spec.grid = Grid::uniform(50);
  const FunctionalSample base = far1_generate(spec, 50, rng);
  const Curve shift = sine_curve(spec.grid);
  const FunctionalSample shifted =
      apply_alternative(base, AlternativeSpec::mean_shift(shift.values, 25));
  CHECK(cusum_statistic(shifted).statistic > cusum_statistic(base).statistic);
}
