#pragma once

#include <Eigen/Core>

#include <vector>

namespace wrbf {

/// Row-per-point storage: points(i, m) is coordinate m of point i.
using PointSet = Eigen::MatrixXd;

/// Pairwise-distinct collocation points inside the box (-R, R)^d.
class CollocationSet {
 public:
  /// Validates distinctness and the box inclusion, then computes the fill
  /// distance with fill_distance().
  CollocationSet(PointSet points, double box_radius);

  const PointSet& points() const noexcept { return points_; }
  Eigen::Index size() const noexcept { return points_.rows(); }
  int dim() const noexcept { return static_cast<int>(points_.cols()); }
  double box_radius() const noexcept { return box_radius_; }
  double fill_distance() const noexcept { return fill_distance_; }
  Eigen::VectorXd point(Eigen::Index i) const { return points_.row(i).transpose(); }

 private:
  PointSet points_;
  double box_radius_;
  double fill_distance_;
};

/// Uniform grid 0 = t_0 < ... < t_n = T.
class TimeGrid {
 public:
  /// n = 0 is allowed only for T = 0.
  static TimeGrid uniform(double horizon, int steps);

  int steps() const noexcept { return static_cast<int>(t_.size()) - 1; }
  double horizon() const noexcept { return t_.back(); }
  double dt() const noexcept { return dt_; }
  double operator[](int k) const { return t_.at(static_cast<std::size_t>(k)); }
  const std::vector<double>& times() const noexcept { return t_; }

 private:
  std::vector<double> t_;
  double dt_ = 0.0;
};

/// Relative inward shift of the outermost grid points.
inline constexpr double kBoundaryNudge = 1e-9;

/// Tensor grid with `per_axis` equispaced points on [-R', R'] per axis,
/// R' = R (1 - 1e-9). Axis 0 varies slowest. d in {1, 2, 3}.
CollocationSet tensor_grid(int d, int per_axis, double R);

/// N equispaced points in total; N must be a perfect d-th power.
CollocationSet equispaced_grid(int d, int N, double R);

/// gamma_d N^{1/d - 1/(d + 2 tau - 3)} with gamma_1 = 1/4, gamma_2 = 1/5.
double paper_radius(int d, int N, int tau);

/// Estimate of sup_{x in (-R,R)^d} min_j |x - x_j|.
///
/// In one dimension the value is exact (largest half-gap or boundary gap).
/// Otherwise the inner minimum is evaluated on a probe lattice over
/// [-R, R]^d with at least 4 N^{1/d} + 1 probes per axis, which bounds the
/// true supremum from below to within the probe spacing.
double fill_distance(const PointSet& points, double R);

/// First `count` points of the unscrambled Sobol sequence (Joe-Kuo
/// direction numbers), skipping the all-zero point and mapped affinely to
/// [-1, 1]^d. Requires 1 <= d <= 8.
PointSet sobol_points(int d, int count);

inline constexpr int kSobolMaxDim = 8;

}  // namespace wrbf
