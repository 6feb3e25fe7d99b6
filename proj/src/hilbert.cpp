#include "cpb/hilbert.hpp"

#include <cmath>
#include <stdexcept>

namespace cpb {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

Grid::Grid(Eigen::VectorXd pts, Eigen::VectorXd weights)
    : points(std::move(pts)), quad_weights(std::move(weights)) {
  require(points.size() >= 2, "Grid: need at least 2 points");
  require(points.size() == quad_weights.size(),
          "Grid: points/quad_weights length mismatch");
  for (Eigen::Index j = 0; j + 1 < points.size(); ++j) {
    require(points[j] < points[j + 1], "Grid: points must be strictly increasing");
  }
  require((quad_weights.array() >= 0.0).all(),
          "Grid: quadrature weights must be nonnegative");
  require(points.allFinite() && quad_weights.allFinite(),
          "Grid: points and weights must be finite");
}

std::shared_ptr<const Grid> Grid::uniform(Eigen::Index size, double a, double b) {
  require(size >= 2, "Grid::uniform: need at least 2 points");
  require(a < b, "Grid::uniform: need a < b");
  Eigen::VectorXd pts(size);
  for (Eigen::Index j = 0; j < size; ++j) {
    // j/(size-1) hits 0 and 1 exactly at the endpoints
    pts[j] = a + (b - a) * (static_cast<double>(j) / static_cast<double>(size - 1));
  }
  pts[size - 1] = b;
  const double h = (b - a) / static_cast<double>(size - 1);
  Eigen::VectorXd w = Eigen::VectorXd::Constant(size, h);
  w[0] = h / 2.0;
  w[size - 1] = h / 2.0;
  return std::make_shared<Grid>(std::move(pts), std::move(w));
}

std::shared_ptr<const Grid> Grid::indexed_mean(Eigen::Index size) {
  require(size >= 2, "Grid::indexed_mean: need at least 2 points");
  Eigen::VectorXd pts(size);
  for (Eigen::Index j = 0; j < size; ++j) pts[j] = static_cast<double>(j + 1);
  Eigen::VectorXd w =
      Eigen::VectorXd::Constant(size, 1.0 / static_cast<double>(size));
  return std::make_shared<Grid>(std::move(pts), std::move(w));
}

std::shared_ptr<const Grid> Grid::from_points(Eigen::VectorXd pts) {
  const Eigen::Index size = pts.size();
  require(size >= 2, "Grid::from_points: need at least 2 points");
  Eigen::VectorXd w(size);
  w[0] = (pts[1] - pts[0]) / 2.0;
  for (Eigen::Index j = 1; j + 1 < size; ++j) w[j] = (pts[j + 1] - pts[j - 1]) / 2.0;
  w[size - 1] = (pts[size - 1] - pts[size - 2]) / 2.0;
  return std::make_shared<Grid>(std::move(pts), std::move(w));
}

bool same_grid(const Grid& a, const Grid& b) {
  if (&a == &b) return true;
  return a.points.size() == b.points.size() && a.points == b.points;
}

Curve::Curve(std::shared_ptr<const Grid> g, Eigen::VectorXd vals)
    : grid(std::move(g)), values(std::move(vals)) {
  require(grid != nullptr, "Curve: null grid");
  require(values.size() == grid->size(), "Curve: values length != grid size");
  require(values.allFinite(), "Curve: values must be finite");
}

FunctionalSample::FunctionalSample(std::shared_ptr<const Grid> grid,
                                   Eigen::MatrixXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  require(grid_ != nullptr, "FunctionalSample: null grid");
  require(values_.rows() == grid_->size(),
          "FunctionalSample: value rows != grid size");
  require(values_.cols() >= 2, "FunctionalSample: need at least 2 curves");
  require(values_.allFinite(), "FunctionalSample: values must be finite");
}

double inner_product(const Curve& f, const Curve& g) {
  if (!same_grid(*f.grid, *g.grid)) {
    throw std::invalid_argument("inner_product: curves on different grids");
  }
  return (f.values.array() * g.values.array() * f.grid->quad_weights.array()).sum();
}

double norm(const Curve& f) {
  return std::sqrt(detail::weighted_squared_norm(f.values, *f.grid));
}

Curve sample_mean(const FunctionalSample& s) {
  return Curve(s.grid(), s.values().rowwise().mean());
}

Curve cusum_deviation(const FunctionalSample& s, Eigen::Index m) {
  const Eigen::Index n = s.size();
  if (m < 1 || m > n - 1) {
    throw std::invalid_argument("cusum_deviation: m must satisfy 1 <= m <= n-1");
  }
  const Eigen::VectorXd head = s.values().leftCols(m).rowwise().sum();
  const Eigen::VectorXd total = s.values().rowwise().sum();
  const double frac = static_cast<double>(m) / static_cast<double>(n);
  return Curve(s.grid(), head - frac * total);
}

namespace detail {

double weighted_squared_norm(const Eigen::VectorXd& values, const Grid& grid) {
  return (values.array().square() * grid.quad_weights.array()).sum();
}

}  // namespace detail

}  // namespace cpb
