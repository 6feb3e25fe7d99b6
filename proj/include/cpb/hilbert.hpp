#pragma once

#include <Eigen/Dense>

#include <memory>

namespace cpb {

// Discretization of L^2-type function spaces: a curve is a vector of values
// on a fixed grid, and integrals are quadrature sums against the grid's
// weights. Two curves interoperate only if they share a grid (same object or
// exactly equal points); there is no interpolation between grids.

struct Grid {
  Eigen::VectorXd points;        // strictly increasing, size G >= 2
  Eigen::VectorXd quad_weights;  // nonnegative, same size

  Grid(Eigen::VectorXd pts, Eigen::VectorXd weights);

  Eigen::Index size() const { return points.size(); }

  // Uniform grid on [a,b] with trapezoidal weights (h inside, h/2 at ends).
  static std::shared_ptr<const Grid> uniform(Eigen::Index size, double a = 0.0,
                                             double b = 1.0);

  // Points 1..size with constant weights 1/size: the discrete mean-type inner
  // product used for fixed-length index-valued curves (e.g. day-of-year).
  static std::shared_ptr<const Grid> indexed_mean(Eigen::Index size);

  // Trapezoidal weights for arbitrary strictly increasing points.
  static std::shared_ptr<const Grid> from_points(Eigen::VectorXd pts);
};

bool same_grid(const Grid& a, const Grid& b);

struct Curve {
  std::shared_ptr<const Grid> grid;
  Eigen::VectorXd values;  // size == grid->size(), all finite

  Curve(std::shared_ptr<const Grid> g, Eigen::VectorXd vals);
};

// n curves on a shared grid, stored as a G x n matrix (column i = curve i).
class FunctionalSample {
 public:
  FunctionalSample(std::shared_ptr<const Grid> grid, Eigen::MatrixXd values);

  Eigen::Index size() const { return values_.cols(); }
  const std::shared_ptr<const Grid>& grid() const { return grid_; }
  const Eigen::MatrixXd& values() const { return values_; }
  Curve curve(Eigen::Index i) const { return Curve(grid_, values_.col(i)); }

 private:
  std::shared_ptr<const Grid> grid_;
  Eigen::MatrixXd values_;
};

// Quadrature inner product sum_j f(t_j) g(t_j) w_j. Symmetric exactly
// (identical elementwise products, identical summation order).
double inner_product(const Curve& f, const Curve& g);

double norm(const Curve& f);

Curve sample_mean(const FunctionalSample& s);

// Partial-sum deviation sum_{i<=m} X_i - (m/n) sum_{i<=n} X_i, unnormalized.
// Requires 1 <= m <= n-1.
Curve cusum_deviation(const FunctionalSample& s, Eigen::Index m);

namespace detail {
double weighted_squared_norm(const Eigen::VectorXd& values, const Grid& grid);
}

}  // namespace cpb
