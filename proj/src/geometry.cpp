#include "wrbf/geometry.hpp"

#include "wrbf/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace wrbf {

namespace {

// Sorting by the first coordinate turns the distinctness check into a
// sweep; exact duplicates are all we need to reject.
void check_pairwise_distinct(const PointSet& pts) {
  const Eigen::Index n = pts.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index m = 0; m < pts.cols(); ++m) {
      if (pts(a, m) != pts(b, m)) return pts(a, m) < pts(b, m);
    }
    return a < b;
  });
  for (std::size_t k = 1; k < order.size(); ++k) {
    if ((pts.row(order[k]) - pts.row(order[k - 1])).squaredNorm() == 0.0)
      fail(ErrorCode::invalid_argument, "collocation points " + std::to_string(order[k - 1]) + " and " +
                                            std::to_string(order[k]) + " coincide");
  }
}

int integer_root(int N, int d) {
  const int guess = static_cast<int>(std::lround(std::pow(static_cast<double>(N), 1.0 / d)));
  for (int m = std::max(1, guess - 1); m <= guess + 1; ++m) {
    long p = 1;
    for (int k = 0; k < d; ++k) p *= m;
    if (p == N) return m;
  }
  return -1;
}

}  // namespace

CollocationSet::CollocationSet(PointSet points, double box_radius)
    : points_(std::move(points)), box_radius_(box_radius), fill_distance_(0.0) {
  require(points_.rows() >= 1, ErrorCode::invalid_argument, "collocation set must not be empty");
  require(points_.cols() >= 1, ErrorCode::invalid_argument, "collocation points need dimension >= 1");
  require(std::isfinite(box_radius) && box_radius > 0.0, ErrorCode::invalid_argument,
          "box radius must be positive");
  require(points_.allFinite(), ErrorCode::invalid_argument, "collocation points must be finite");
  require(points_.cwiseAbs().maxCoeff() < box_radius, ErrorCode::out_of_range,
          "collocation points must lie strictly inside (-R, R)^d");
  check_pairwise_distinct(points_);
  fill_distance_ = wrbf::fill_distance(points_, box_radius_);
}

TimeGrid TimeGrid::uniform(double horizon, int steps) {
  require(std::isfinite(horizon) && horizon >= 0.0, ErrorCode::invalid_argument, "horizon must be >= 0");
  require(steps >= 0, ErrorCode::invalid_argument, "time step count must be >= 0");
  require((steps == 0) == (horizon == 0.0), ErrorCode::invalid_argument,
          "zero time steps is allowed exactly when the horizon is 0");
  TimeGrid g;
  g.t_.resize(static_cast<std::size_t>(steps) + 1);
  g.dt_ = steps > 0 ? horizon / steps : 0.0;
  for (int k = 0; k <= steps; ++k) g.t_[k] = horizon * k / std::max(steps, 1);
  if (steps > 0) g.t_.back() = horizon;
  return g;
}

CollocationSet tensor_grid(int d, int per_axis, double R) {
  require(d >= 1 && d <= 3, ErrorCode::invalid_argument, "equispaced grids support d in {1, 2, 3}");
  require(per_axis >= 2, ErrorCode::invalid_argument, "equispaced grids need at least 2 points per axis");
  require(std::isfinite(R) && R > 0.0, ErrorCode::invalid_argument, "grid radius must be positive");

  const double edge = R * (1.0 - kBoundaryNudge);
  Eigen::VectorXd axis(per_axis);
  for (int i = 0; i < per_axis; ++i) axis[i] = -edge + 2.0 * edge * i / (per_axis - 1);

  long total = 1;
  for (int m = 0; m < d; ++m) total *= per_axis;
  PointSet pts(total, d);
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx;
    for (int m = d - 1; m >= 0; --m) {
      pts(idx, m) = axis[rem % per_axis];
      rem /= per_axis;
    }
  }
  return CollocationSet(std::move(pts), R);
}

CollocationSet equispaced_grid(int d, int N, double R) {
  require(N >= 2, ErrorCode::invalid_argument, "equispaced grids need N >= 2");
  require(d >= 1 && d <= 3, ErrorCode::invalid_argument, "equispaced grids support d in {1, 2, 3}");
  const int per_axis = integer_root(N, d);
  if (per_axis < 0)
    fail(ErrorCode::invalid_argument,
         "N = " + std::to_string(N) + " is not a perfect " + std::to_string(d) + "-th power");
  return tensor_grid(d, per_axis, R);
}

double paper_radius(int d, int N, int tau) {
  require(N >= 1, ErrorCode::invalid_argument, "paper_radius needs N >= 1");
  double gamma = 0.0;
  if (d == 1) gamma = 0.25;
  else if (d == 2) gamma = 0.2;
  else fail(ErrorCode::invalid_argument, "paper_radius is defined for d in {1, 2}");
  const int denom = d + 2 * tau - 3;
  require(denom > 0, ErrorCode::invalid_argument, "paper_radius needs d + 2 tau - 3 > 0");
  const double exponent = 1.0 / d - 1.0 / denom;
  return gamma * std::pow(static_cast<double>(N), exponent);
}

double fill_distance(const PointSet& points, double R) {
  require(points.rows() >= 1, ErrorCode::invalid_argument, "fill_distance of an empty set");
  require(R > 0.0, ErrorCode::invalid_argument, "fill_distance needs R > 0");
  const Eigen::Index n = points.rows();
  const int d = static_cast<int>(points.cols());

  if (d == 1) {
    std::vector<double> xs(points.data(), points.data() + n);
    std::sort(xs.begin(), xs.end());
    double worst = std::max(xs.front() + R, R - xs.back());
    for (std::size_t i = 1; i < xs.size(); ++i) worst = std::max(worst, 0.5 * (xs[i] - xs[i - 1]));
    return worst;
  }

  const double per_axis_points = std::ceil(std::pow(static_cast<double>(n), 1.0 / d));
  const int probes = d == 2 ? std::max(401, 4 * static_cast<int>(per_axis_points) + 1)
                            : std::max(65, 4 * static_cast<int>(per_axis_points) + 1);
  long total = 1;
  for (int m = 0; m < d; ++m) total *= probes;

  double worst = 0.0;
  Eigen::VectorXd x(d);
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx;
    for (int m = d - 1; m >= 0; --m) {
      x[m] = -R + 2.0 * R * static_cast<double>(rem % probes) / (probes - 1);
      rem /= probes;
    }
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) best = std::min(best, (points.row(j).transpose() - x).squaredNorm());
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

}  // namespace wrbf
