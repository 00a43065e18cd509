#pragma once

#include "wrbf/geometry.hpp"
#include "wrbf/kernel.hpp"

#include <Eigen/Core>
#include <Eigen/QR>

#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

namespace wrbf {

/// G(x; theta) = sum_l gamma_l Phi(x - xi_l) + c with fixed centers xi_l and
/// sum_l |gamma_l| + |c| <= budget.
class RegressionModel {
 public:
  RegressionModel(std::shared_ptr<const WendlandKernel> kernel, PointSet centers, Eigen::VectorXd gamma,
                  double intercept, double budget, double gap_certificate);

  /// gamma = 0, c = 0.
  static RegressionModel zero(std::shared_ptr<const WendlandKernel> kernel, PointSet centers, double budget);

  const WendlandKernel& kernel() const noexcept { return *kernel_; }
  const PointSet& centers() const noexcept { return centers_; }
  const Eigen::VectorXd& gamma() const noexcept { return gamma_; }
  double intercept() const noexcept { return intercept_; }
  double budget() const noexcept { return budget_; }
  double gap_certificate() const noexcept { return gap_; }
  /// sum |gamma_l| + |c|.
  double l1_norm() const noexcept;

  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// Derivatives ignore the intercept.
  Eigen::VectorXd predict_grad(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::MatrixXd predict_hess(const Eigen::Ref<const Eigen::VectorXd>& x) const;

 private:
  void check_dim(Eigen::Index size) const;

  std::shared_ptr<const WendlandKernel> kernel_;
  PointSet centers_;
  Eigen::VectorXd gamma_;
  double intercept_;
  double budget_;
  double gap_;
};

/// beta_M = beta0 * growth(M); default growth 1 + ln(1 + M).
class BudgetSchedule {
 public:
  explicit BudgetSchedule(double beta0 = 10.0, std::function<double(int)> growth = {});

  double beta0() const noexcept { return beta0_; }
  double operator()(int M) const;

 private:
  double beta0_;
  std::function<double(int)> growth_;
};

/// Design matrix [Phi(x_j - xi_l) | 1] of a fixed node/center pair, with a
/// cached complete orthogonal decomposition for warm starts. Reusable across
/// fits with different targets.
class RegressionDesign {
 public:
  RegressionDesign(std::shared_ptr<const WendlandKernel> kernel, PointSet nodes, PointSet centers);

  Eigen::Index nodes() const noexcept { return matrix_.rows(); }
  Eigen::Index centers() const noexcept { return centers_.rows(); }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  const std::shared_ptr<const WendlandKernel>& kernel() const noexcept { return kernel_; }
  const PointSet& center_points() const noexcept { return centers_; }

  /// Minimum-norm least-squares coefficients (gamma, c) for the targets.
  Eigen::VectorXd least_squares(const Eigen::VectorXd& targets) const;

 private:
  std::shared_ptr<const WendlandKernel> kernel_;
  PointSet centers_;
  Eigen::MatrixXd matrix_;
  mutable std::unique_ptr<Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>> cod_;
};

struct FitOptions {
  /// 0 selects 50 (M + 1) ceil(max(1, 1/eps)).
  long max_iterations = 0;
  /// Start from the least-squares solution projected onto the l1 ball;
  /// otherwise start from 0.
  bool warm_start = true;
  /// Record the objective after every Frank-Wolfe iterate.
  bool record_trace = false;
};

struct FitResult {
  RegressionModel model;
  double objective = 0.0;
  long iterations = 0;
  std::vector<double> objective_trace;
};

/// Minimizes sum_j |u_j - G(x_j; theta)|^2 over the l1 ball of radius
/// `budget` in (gamma, c) until the Frank-Wolfe duality gap is <= eps^2.
/// Throws ConvergenceError carrying the best gap otherwise.
FitResult fit(const RegressionDesign& design, const Eigen::VectorXd& targets, double budget, double eps,
              const FitOptions& options = {});

FitResult fit(const Eigen::VectorXd& targets, const PointSet& nodes, const PointSet& centers,
              std::shared_ptr<const WendlandKernel> kernel, double budget, double eps,
              const FitOptions& options = {});

/// Vertex of the l1 ball of radius beta minimizing <gradient, s>:
/// -beta sign(g_i) e_i at i = argmax |g_i| (lowest index on ties, +beta
/// when g_i = 0).
Eigen::VectorXd lmo(const Eigen::VectorXd& gradient, double beta);

/// Euclidean projection onto {theta : |theta|_1 <= beta}.
Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double beta);

/// Rows: center coordinates x0..x{d-1}, weight, then intercept, budget and
/// gap repeated on every row.
void write_model_csv(std::ostream& os, const RegressionModel& model);

}  // namespace wrbf
