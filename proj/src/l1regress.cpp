#include "wrbf/l1regress.hpp"

#include "wrbf/csv.hpp"
#include "wrbf/error.hpp"
#include "wrbf/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace wrbf {

// ---------------------------------------------------------------------------
// RegressionModel

RegressionModel::RegressionModel(std::shared_ptr<const WendlandKernel> kernel, PointSet centers,
                                 Eigen::VectorXd gamma, double intercept, double budget, double gap_certificate)
    : kernel_(std::move(kernel)),
      centers_(std::move(centers)),
      gamma_(std::move(gamma)),
      intercept_(intercept),
      budget_(budget),
      gap_(gap_certificate) {
  require(kernel_ != nullptr, ErrorCode::invalid_argument, "regression model needs a kernel");
  require(centers_.cols() == kernel_->d(), ErrorCode::dimension_mismatch,
          "regression centers must match the kernel dimension");
  require(gamma_.size() == centers_.rows(), ErrorCode::dimension_mismatch,
          "one weight per regression center is required");
  require(std::isfinite(budget_) && budget_ > 0.0, ErrorCode::invalid_argument, "budget must be positive");
  if (l1_norm() > budget_ * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "regression coefficients have l1 norm " << l1_norm() << " above the budget " << budget_;
    fail(ErrorCode::invalid_argument, os.str());
  }
}

RegressionModel RegressionModel::zero(std::shared_ptr<const WendlandKernel> kernel, PointSet centers, double budget) {
  Eigen::VectorXd gamma = Eigen::VectorXd::Zero(centers.rows());
  return RegressionModel(std::move(kernel), std::move(centers), std::move(gamma), 0.0, budget, 0.0);
}

double RegressionModel::l1_norm() const noexcept { return gamma_.lpNorm<1>() + std::abs(intercept_); }

void RegressionModel::check_dim(Eigen::Index size) const {
  if (size != centers_.cols())
    fail(ErrorCode::dimension_mismatch, "model expects " + std::to_string(centers_.cols()) +
                                            "-vectors, got length " + std::to_string(size));
}

double RegressionModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  check_dim(x.size());
  double sum = intercept_;
  for (Eigen::Index l = 0; l < centers_.rows(); ++l) {
    if (gamma_[l] == 0.0) continue;
    sum += gamma_[l] * kernel_->phi((x - centers_.row(l).transpose()).norm());
  }
  return sum;
}

Eigen::VectorXd RegressionModel::predict_grad(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  check_dim(x.size());
  Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
  for (Eigen::Index l = 0; l < centers_.rows(); ++l) {
    if (gamma_[l] == 0.0) continue;
    const Eigen::VectorXd diff = x - centers_.row(l).transpose();
    const double r = diff.norm();
    if (r < kernel_->support_scale()) g += gamma_[l] * kernel_->phi1(r) * diff;
  }
  return g;
}

Eigen::MatrixXd RegressionModel::predict_hess(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  check_dim(x.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(x.size(), x.size());
  for (Eigen::Index l = 0; l < centers_.rows(); ++l) {
    if (gamma_[l] == 0.0) continue;
    const Eigen::VectorXd diff = x - centers_.row(l).transpose();
    if (diff.norm() < kernel_->support_scale()) h += gamma_[l] * kernel_->hessian(diff);
  }
  return h;
}

// ---------------------------------------------------------------------------
// BudgetSchedule

BudgetSchedule::BudgetSchedule(double beta0, std::function<double(int)> growth)
    : beta0_(beta0), growth_(std::move(growth)) {
  require(std::isfinite(beta0) && beta0 > 0.0, ErrorCode::invalid_argument, "beta0 must be positive");
  if (!growth_) growth_ = [](int M) { return 1.0 + std::log1p(static_cast<double>(M)); };
}

double BudgetSchedule::operator()(int M) const {
  require(M >= 1, ErrorCode::invalid_argument, "budget schedule needs M >= 1");
  const double beta = beta0_ * growth_(M);
  require(std::isfinite(beta) && beta > 0.0, ErrorCode::invalid_argument, "budget schedule produced beta <= 0");
  return beta;
}

// ---------------------------------------------------------------------------
// RegressionDesign

RegressionDesign::RegressionDesign(std::shared_ptr<const WendlandKernel> kernel, PointSet nodes, PointSet centers)
    : kernel_(std::move(kernel)), centers_(std::move(centers)) {
  require(kernel_ != nullptr, ErrorCode::invalid_argument, "regression design needs a kernel");
  require(nodes.rows() >= 1 && centers_.rows() >= 1, ErrorCode::invalid_argument,
          "regression needs at least one node and one center");
  require(nodes.cols() == kernel_->d() && centers_.cols() == kernel_->d(), ErrorCode::dimension_mismatch,
          "regression nodes and centers must match the kernel dimension");
  const Eigen::Index n = nodes.rows();
  const Eigen::Index m = centers_.rows();
  matrix_.resize(n, m + 1);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t jj) {
    const auto j = static_cast<Eigen::Index>(jj);
    for (Eigen::Index l = 0; l < m; ++l) matrix_(j, l) = kernel_->phi((nodes.row(j) - centers_.row(l)).norm());
    matrix_(j, m) = 1.0;
  });
}

Eigen::VectorXd RegressionDesign::least_squares(const Eigen::VectorXd& targets) const {
  if (!cod_) cod_ = std::make_unique<Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>>(matrix_);
  return cod_->solve(targets);
}

// ---------------------------------------------------------------------------
// Frank-Wolfe

Eigen::VectorXd lmo(const Eigen::VectorXd& gradient, double beta) {
  require(beta > 0.0, ErrorCode::invalid_argument, "lmo needs beta > 0");
  require(gradient.size() >= 1, ErrorCode::invalid_argument, "lmo needs a non-empty gradient");
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < gradient.size(); ++i)
    if (std::abs(gradient[i]) > std::abs(gradient[best])) best = i;
  Eigen::VectorXd s = Eigen::VectorXd::Zero(gradient.size());
  s[best] = gradient[best] > 0.0 ? -beta : beta;
  return s;
}

Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double beta) {
  require(beta > 0.0, ErrorCode::invalid_argument, "projection needs beta > 0");
  if (v.lpNorm<1>() <= beta) return v;
  std::vector<double> mags(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) mags[i] = std::abs(v[i]);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double cumulative = 0.0;
  double shift = 0.0;
  for (std::size_t k = 0; k < mags.size(); ++k) {
    cumulative += mags[k];
    const double candidate = (cumulative - beta) / static_cast<double>(k + 1);
    if (mags[k] > candidate) shift = candidate;
  }
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::max(std::abs(v[i]) - shift, 0.0);
    out[i] = v[i] < 0.0 ? -mag : mag;
  }
  // Rounding in the shift can leave the result a hair outside the ball.
  const double norm = out.lpNorm<1>();
  if (norm > beta) out *= beta / norm;
  return out;
}

namespace {

// Convex-combination bookkeeping over the 2(M+1) vertices +-beta e_i.
// Vertex 2i is +beta e_i, vertex 2i+1 is -beta e_i.
struct VertexWeights {
  std::vector<double> lambda;

  static VertexWeights from_point(const Eigen::VectorXd& theta, double beta) {
    VertexWeights w;
    w.lambda.assign(2 * static_cast<std::size_t>(theta.size()), 0.0);
    double used = 0.0;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      const double share = std::abs(theta[i]) / beta;
      w.lambda[2 * i + (theta[i] < 0.0 ? 1 : 0)] = share;
      used += share;
    }
    // The remaining mass sits on a +-e_0 pair, which contributes nothing.
    const double slack = std::max(0.0, 1.0 - used);
    w.lambda[0] += 0.5 * slack;
    w.lambda[1] += 0.5 * slack;
    return w;
  }
};

}  // namespace

FitResult fit(const RegressionDesign& design, const Eigen::VectorXd& targets, double budget, double eps,
              const FitOptions& options) {
  require(eps > 0.0 && std::isfinite(eps), ErrorCode::invalid_argument, "fit tolerance eps must be positive");
  require(budget > 0.0 && std::isfinite(budget), ErrorCode::invalid_argument, "fit budget must be positive");
  require(targets.size() == design.nodes(), ErrorCode::dimension_mismatch,
          "fit targets must have one value per node");
  require(targets.allFinite(), ErrorCode::invalid_argument, "fit targets must be finite");

  const Eigen::MatrixXd& phi = design.matrix();
  const Eigen::Index dim = phi.cols();  // M + 1
  const double tol = eps * eps;
  const long max_iter = options.max_iterations > 0
                            ? options.max_iterations
                            : 50L * static_cast<long>(dim) * static_cast<long>(std::ceil(std::max(1.0, 1.0 / eps)));

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(dim);
  if (options.warm_start) theta = project_l1_ball(design.least_squares(targets), budget);
  auto weights = VertexWeights::from_point(theta, budget);

  Eigen::VectorXd residual = phi * theta - targets;
  Eigen::VectorXd grad = 2.0 * (phi.transpose() * residual);

  FitResult result{RegressionModel::zero(design.kernel(), design.center_points(), budget), 0.0, 0, {}};
  double best_gap = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_theta = theta;

  long iter = 0;
  for (;; ++iter) {
    const double gap = std::max(0.0, grad.dot(theta) + budget * grad.cwiseAbs().maxCoeff());
    if (options.record_trace) result.objective_trace.push_back(residual.squaredNorm());
    if (gap < best_gap) {
      best_gap = gap;
      best_theta = theta;
    }
    if (gap <= tol || iter >= max_iter) break;

    // Toward vertex from the linear minimization oracle.
    Eigen::Index toward_i = 0;
    grad.cwiseAbs().maxCoeff(&toward_i);
    const double toward_sign = grad[toward_i] > 0.0 ? -1.0 : 1.0;
    const std::size_t toward_v = 2 * static_cast<std::size_t>(toward_i) + (toward_sign < 0.0 ? 1 : 0);

    // Away vertex: the active vertex with the largest <grad, v>.
    std::size_t away_v = toward_v;
    double away_score = -std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < weights.lambda.size(); ++v) {
      if (weights.lambda[v] <= 0.0) continue;
      const double score = (v % 2 == 0 ? 1.0 : -1.0) * grad[static_cast<Eigen::Index>(v / 2)];
      if (score > away_score) {
        away_score = score;
        away_v = v;
      }
    }
    if (away_v == toward_v) break;

    const auto away_i = static_cast<Eigen::Index>(away_v / 2);
    const double away_sign = away_v % 2 == 0 ? 1.0 : -1.0;
    // direction = budget (toward_sign e_toward - away_sign e_away)
    const Eigen::VectorXd phi_dir = budget * (toward_sign * phi.col(toward_i) - away_sign * phi.col(away_i));
    const double slope = budget * (toward_sign * grad[toward_i] - away_sign * grad[away_i]);
    const double curvature = phi_dir.squaredNorm();
    if (!(slope < 0.0) || curvature <= 0.0) break;

    const double step = std::min(weights.lambda[away_v], -slope / (2.0 * curvature));
    if (!(step > 0.0)) break;

    theta[toward_i] += step * budget * toward_sign;
    theta[away_i] -= step * budget * away_sign;
    weights.lambda[toward_v] += step;
    weights.lambda[away_v] -= step;
    if (weights.lambda[away_v] < 1e-15) weights.lambda[away_v] = 0.0;

    if ((iter + 1) % 256 == 0) {
      residual = phi * theta - targets;
    } else {
      residual += step * phi_dir;
    }
    grad = 2.0 * (phi.transpose() * residual);
  }

  theta = best_theta;
  const double norm = theta.lpNorm<1>();
  if (norm > budget) theta *= budget / norm;
  if (best_gap > tol) {
    std::ostringstream os;
    os << "Frank-Wolfe stopped after " << iter << " iterations with duality gap " << best_gap << " > eps^2 = " << tol;
    throw ConvergenceError(os.str(), best_gap);
  }

  result.model = RegressionModel(design.kernel(), design.center_points(), theta.head(dim - 1), theta[dim - 1],
                                 budget, best_gap);
  result.objective = (phi * theta - targets).squaredNorm();
  result.iterations = iter;
  return result;
}

FitResult fit(const Eigen::VectorXd& targets, const PointSet& nodes, const PointSet& centers,
              std::shared_ptr<const WendlandKernel> kernel, double budget, double eps, const FitOptions& options) {
  const RegressionDesign design(std::move(kernel), nodes, centers);
  return fit(design, targets, budget, eps, options);
}

void write_model_csv(std::ostream& os, const RegressionModel& model) {
  const auto d = model.centers().cols();
  for (Eigen::Index m = 0; m < d; ++m) os << 'x' << m << ',';
  os << "weight,intercept,budget,gap\n";
  for (Eigen::Index l = 0; l < model.centers().rows(); ++l) {
    for (Eigen::Index m = 0; m < d; ++m) os << format_double(model.centers()(l, m)) << ',';
    os << format_double(model.gamma()[l]) << ',' << format_double(model.intercept()) << ','
       << format_double(model.budget()) << ',' << format_double(model.gap_certificate()) << '\n';
  }
}

}  // namespace wrbf
