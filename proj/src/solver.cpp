#include "wrbf/solver.hpp"

#include "wrbf/error.hpp"
#include "wrbf/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace wrbf {

// ---------------------------------------------------------------------------
// HjbProblem

double HjbProblem::F(double t, const Eigen::VectorXd& x, double z, const Eigen::VectorXd& p,
                     const Eigen::MatrixXd& X) const {
  if (const auto* general = std::get_if<GeneralF>(&nonlinearity)) return (*general)(t, x, z, p, X);
  const auto& form = std::get<ControlForm>(nonlinearity);
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& pi : form.controls) {
    const Eigen::VectorXd b = form.drift(x, pi);
    const Eigen::MatrixXd a = form.diffusion(x, pi);
    if (b.size() != x.size() || a.rows() != x.size() || a.cols() != x.size()) {
      std::ostringstream os;
      os << "control (" << pi.transpose() << ") returned drift/diffusion of the wrong size";
      fail(ErrorCode::dimension_mismatch, os.str());
    }
    const double value = form.hamiltonian(t, x, z, b.dot(p), a.cwiseProduct(X).sum(), pi);
    if (!std::isfinite(value)) {
      std::ostringstream os;
      os << "Hamiltonian is not finite for control (" << pi.transpose() << ")";
      fail(ErrorCode::numerical, os.str());
    }
    best = std::max(best, value);
  }
  return best;
}

void HjbProblem::validate() const {
  require(dim >= 1, ErrorCode::invalid_argument, "problem dimension must be >= 1");
  require(std::isfinite(horizon) && horizon >= 0.0, ErrorCode::invalid_argument, "horizon must be >= 0");
  require(static_cast<bool>(terminal), ErrorCode::invalid_argument, "problem needs terminal data");
  if (const auto* general = std::get_if<GeneralF>(&nonlinearity)) {
    require(static_cast<bool>(*general), ErrorCode::invalid_argument, "problem needs a nonlinearity");
  } else {
    const auto& form = std::get<ControlForm>(nonlinearity);
    require(!form.controls.empty(), ErrorCode::invalid_argument, "control set is empty");
    require(form.drift && form.diffusion && form.hamiltonian, ErrorCode::invalid_argument,
            "control form needs drift, diffusion and hamiltonian callbacks");
  }
}

namespace {

Eigen::VectorXd uniform_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

}  // namespace

double ellipticity_violation(const HjbProblem& problem, int samples, unsigned seed) {
  problem.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> time(0.0, problem.horizon);
  const int d = problem.dim;
  double worst = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const double t = time(rng);
    const Eigen::VectorXd x = uniform_vector(rng, d);
    const double z = uniform_vector(rng, 1)[0];
    const Eigen::VectorXd p = uniform_vector(rng, d);
    Eigen::MatrixXd X = uniform_vector(rng, d * d).reshaped(d, d);
    X = 0.5 * (X + X.transpose()).eval();
    const Eigen::MatrixXd root = uniform_vector(rng, d * d).reshaped(d, d);
    const Eigen::MatrixXd E = root * root.transpose();
    worst = std::max(worst, problem.F(t, x, z, p, X + E) - problem.F(t, x, z, p, X));
  }
  return worst;
}

double diffusion_asymmetry(const HjbProblem& problem, int samples, unsigned seed) {
  problem.validate();
  const auto* form = std::get_if<ControlForm>(&problem.nonlinearity);
  if (form == nullptr) return 0.0;
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd x = uniform_vector(rng, problem.dim);
    for (const auto& pi : form->controls) {
      const Eigen::MatrixXd a = form->diffusion(x, pi);
      worst = std::max(worst, (a - a.transpose()).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Histories

const Eigen::VectorXd& SolutionHistory::nodal(int k) const {
  check_step(k);
  return nodal_[static_cast<std::size_t>(k)];
}

void SolutionHistory::check_step(int k) const {
  if (k < 0 || k > steps())
    fail(ErrorCode::out_of_range,
         "time index " + std::to_string(k) + " is not on the grid 0.." + std::to_string(steps()));
}

void SolutionHistory::check_dim(Eigen::Index size) const {
  if (size != colloc_.dim())
    fail(ErrorCode::dimension_mismatch, "solution expects " + std::to_string(colloc_.dim()) +
                                            "-vectors, got length " + std::to_string(size));
}

Eigen::VectorXd SolutionHistory::eval_path(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd out(steps() + 1);
  for (int k = 0; k <= steps(); ++k) out[k] = eval(k, x);
  return out;
}

InterpHistory::InterpHistory(std::shared_ptr<const GramSystem> gram, TimeGrid tgrid)
    : SolutionHistory(std::move(tgrid), gram->colloc()), gram_(std::move(gram)) {}

const Eigen::VectorXd& InterpHistory::alpha(int k) const {
  check_step(k);
  return alpha_[static_cast<std::size_t>(k)];
}

Interpolant InterpHistory::interpolant(int k) const { return Interpolant(gram_, alpha(k)); }

double InterpHistory::eval(int k, const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return interpolant(k).eval(x);
}

Eigen::VectorXd InterpHistory::eval_grad(int k, const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return interpolant(k).eval_grad(x);
}

Eigen::MatrixXd InterpHistory::eval_hess(int k, const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return interpolant(k).eval_hess(x);
}

Eigen::VectorXd InterpHistory::eval_path(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  check_dim(x.size());
  const auto& pts = colloc_.points();
  const auto& k = gram_->kernel();
  std::vector<std::pair<Eigen::Index, double>> row;
  for (Eigen::Index j = 0; j < pts.rows(); ++j) {
    const double r = (x - pts.row(j).transpose()).norm();
    if (r < k.support_scale()) row.emplace_back(j, k.phi(r));
  }
  Eigen::VectorXd out(steps() + 1);
  for (int s = 0; s <= steps(); ++s) {
    const auto& a = alpha_[static_cast<std::size_t>(s)];
    double sum = 0.0;
    for (const auto& [j, w] : row) sum += a[j] * w;
    out[s] = sum;
  }
  return out;
}

RegressHistory::RegressHistory(TimeGrid tgrid, CollocationSet colloc, RegressionModel terminal)
    : SolutionHistory(std::move(tgrid), std::move(colloc)), terminal_(std::move(terminal)) {}

const RegressionModel& RegressHistory::step_model(int k) const {
  if (k < 1 || k > steps())
    fail(ErrorCode::out_of_range, "step model index " + std::to_string(k) + " outside 1.." + std::to_string(steps()));
  return steps_[static_cast<std::size_t>(k - 1)];
}

double RegressHistory::eval(int k, const Eigen::Ref<const Eigen::VectorXd>& x) const {
  check_step(k);
  double value = terminal_.predict(x);
  for (int i = steps(); i > k; --i) value -= tgrid_.dt() * steps_[static_cast<std::size_t>(i - 1)].predict(x);
  return value;
}

Eigen::VectorXd RegressHistory::eval_grad(int k, const Eigen::Ref<const Eigen::VectorXd>& x) const {
  check_step(k);
  Eigen::VectorXd g = terminal_.predict_grad(x);
  for (int i = steps(); i > k; --i) g -= tgrid_.dt() * steps_[static_cast<std::size_t>(i - 1)].predict_grad(x);
  return g;
}

Eigen::MatrixXd RegressHistory::eval_hess(int k, const Eigen::Ref<const Eigen::VectorXd>& x) const {
  check_step(k);
  Eigen::MatrixXd h = terminal_.predict_hess(x);
  for (int i = steps(); i > k; --i) h -= tgrid_.dt() * steps_[static_cast<std::size_t>(i - 1)].predict_hess(x);
  return h;
}

Eigen::VectorXd RegressHistory::eval_path(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  check_dim(x.size());
  Eigen::VectorXd out(steps() + 1);
  double value = terminal_.predict(x);
  out[steps()] = value;
  for (int k = steps() - 1; k >= 0; --k) {
    value -= tgrid_.dt() * steps_[static_cast<std::size_t>(k)].predict(x);
    out[k] = value;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Schemes

namespace {

// F_{k,j} at every node from nodal values and nodal derivatives.
Eigen::VectorXd nodal_F(const HjbProblem& problem, double t, const PointSet& pts, const Eigen::VectorXd& z,
                        const Eigen::MatrixXd& grad, const std::vector<Eigen::MatrixXd>& hess) {
  Eigen::VectorXd out(pts.rows());
  parallel_for(static_cast<std::size_t>(pts.rows()), [&](std::size_t jj) {
    const auto j = static_cast<Eigen::Index>(jj);
    out[j] = problem.F(t, pts.row(j).transpose(), z[j], grad.row(j).transpose(), hess[jj]);
  });
  return out;
}

// Largest change of F per unit of tr X, probed with X = +-I at the nodes.
double diffusion_bound(const HjbProblem& problem, const PointSet& pts) {
  const int d = problem.dim;
  const Eigen::VectorXd p = Eigen::VectorXd::Zero(d);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(d, d);
  double bound = 0.0;
  for (Eigen::Index j = 0; j < pts.rows(); ++j) {
    const Eigen::VectorXd x = pts.row(j).transpose();
    const double base = problem.F(problem.horizon, x, 0.0, p, Z);
    bound = std::max(bound, std::abs(problem.F(problem.horizon, x, 0.0, p, I) - base) / d);
    bound = std::max(bound, std::abs(problem.F(problem.horizon, x, 0.0, p, -I) - base) / d);
  }
  return bound;
}

void check_finite(const Eigen::VectorXd& v, int k) {
  if (!v.allFinite())
    throw NumericalError("non-finite nodal value at time step " + std::to_string(k), k);
}

void check_setup(const HjbProblem& problem, const CollocationSet& colloc, const WendlandKernel& kernel,
                 const TimeGrid& tgrid) {
  problem.validate();
  require(colloc.dim() == problem.dim, ErrorCode::dimension_mismatch,
          "collocation dimension does not match the problem");
  require(kernel.d() == problem.dim, ErrorCode::dimension_mismatch, "kernel dimension does not match the problem");
  require(kernel.has_phi2(), ErrorCode::invalid_argument, "schemes need a kernel with tau >= 2");
  require(std::abs(tgrid.horizon() - problem.horizon) <= 1e-12 * std::max(1.0, problem.horizon),
          ErrorCode::invalid_argument, "time grid horizon does not match the problem");
}

}  // namespace

std::unique_ptr<InterpHistory> solve_interp(const HjbProblem& problem, std::shared_ptr<const GramSystem> gs,
                                            const TimeGrid& tgrid) {
  require(gs != nullptr, ErrorCode::invalid_argument, "solve_interp needs a Gram system");
  check_setup(problem, gs->colloc(), gs->kernel(), tgrid);

  std::unique_ptr<InterpHistory> hist(new InterpHistory(gs, tgrid));
  const auto& pts = gs->colloc().points();
  const Eigen::Index N = gs->size();
  const int n = tgrid.steps();
  const double dx = gs->colloc().fill_distance();
  hist->stability_ = tgrid.dt() * diffusion_bound(problem, pts) / (dx * dx);

  hist->nodal_.assign(static_cast<std::size_t>(n + 1), Eigen::VectorXd());
  hist->alpha_.assign(static_cast<std::size_t>(n + 1), Eigen::VectorXd());

  Eigen::VectorXd v(N);
  for (Eigen::Index j = 0; j < N; ++j) v[j] = problem.terminal(pts.row(j).transpose());
  check_finite(v, n);
  hist->nodal_[static_cast<std::size_t>(n)] = v;
  hist->alpha_[static_cast<std::size_t>(n)] = gs->solve(v);

  const NodalOperators ops(*gs, true);
  for (int k = n - 1; k >= 0; --k) {
    const auto& alpha = hist->alpha_[static_cast<std::size_t>(k + 1)];
    const NodalDerivatives der = ops.apply(alpha);
    const Eigen::VectorXd f = nodal_F(problem, tgrid[k + 1], pts, v, der.gradient, der.hessian);
    v = v - tgrid.dt() * f;
    check_finite(v, k);
    hist->nodal_[static_cast<std::size_t>(k)] = v;
    hist->alpha_[static_cast<std::size_t>(k)] = gs->solve(v);
  }
  return hist;
}

std::vector<Eigen::Index> center_indices(Eigen::Index N, int M) {
  require(N >= 1, ErrorCode::invalid_argument, "center selection needs N >= 1");
  require(M >= 1 && M <= N, ErrorCode::invalid_argument, "number of centers must satisfy 1 <= M <= N");
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(M));
  if (M == 1) {
    idx[0] = N / 2;
    return idx;
  }
  for (int l = 0; l < M; ++l)
    idx[static_cast<std::size_t>(l)] =
        static_cast<Eigen::Index>(std::llround(static_cast<double>(l) * static_cast<double>(N - 1) / (M - 1)));
  return idx;
}

std::unique_ptr<RegressHistory> solve_regress(const HjbProblem& problem, const CollocationSet& colloc,
                                              const TimeGrid& tgrid, std::shared_ptr<const WendlandKernel> kernel,
                                              const RegressOptions& options) {
  require(kernel != nullptr, ErrorCode::invalid_argument, "solve_regress needs a kernel");
  check_setup(problem, colloc, *kernel, tgrid);
  require(options.h > 0.0 && std::isfinite(options.h), ErrorCode::invalid_argument, "regression h must be > 0");

  const auto& pts = colloc.points();
  const Eigen::Index N = colloc.size();
  const int d = colloc.dim();
  const int M = options.M == 0 ? static_cast<int>(N) : options.M;
  const auto idx = center_indices(N, M);
  PointSet centers(M, d);
  for (int l = 0; l < M; ++l) centers.row(l) = pts.row(idx[static_cast<std::size_t>(l)]);

  const RegressionDesign design(kernel, pts, centers);
  const double beta = options.schedule(M);
  const double eps = options.h;

  // Model derivatives at the nodes are linear in gamma.
  const auto pairs = static_cast<std::size_t>(d * (d + 1) / 2);
  std::vector<Eigen::MatrixXd> dgrad(static_cast<std::size_t>(d), Eigen::MatrixXd::Zero(N, M));
  std::vector<Eigen::MatrixXd> dhess(pairs, Eigen::MatrixXd::Zero(N, M));
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t jj) {
    const auto j = static_cast<Eigen::Index>(jj);
    for (Eigen::Index l = 0; l < M; ++l) {
      const Eigen::VectorXd diff = (pts.row(j) - centers.row(l)).transpose();
      const double r = diff.norm();
      if (r >= kernel->support_scale()) continue;
      const double p1 = kernel->phi1(r);
      const double p2 = kernel->phi2(r);
      std::size_t q = 0;
      for (int m = 0; m < d; ++m) {
        dgrad[static_cast<std::size_t>(m)](j, l) = diff[m] * p1;
        for (int i = m; i < d; ++i, ++q) dhess[q](j, l) = diff[m] * diff[i] * p2 + (m == i ? p1 : 0.0);
      }
    }
  });

  Eigen::VectorXd values(N);
  Eigen::MatrixXd grad(N, d);
  std::vector<Eigen::MatrixXd> hess(static_cast<std::size_t>(N), Eigen::MatrixXd::Zero(d, d));
  auto accumulate = [&](const RegressionModel& model, double weight) {
    const Eigen::VectorXd& g = model.gamma();
    Eigen::VectorXd theta(M + 1);
    theta << g, model.intercept();
    values += weight * (design.matrix() * theta);
    for (int m = 0; m < d; ++m) grad.col(m) += weight * (dgrad[static_cast<std::size_t>(m)] * g);
    std::size_t q = 0;
    for (int m = 0; m < d; ++m) {
      for (int i = m; i < d; ++i, ++q) {
        const Eigen::VectorXd col = weight * (dhess[q] * g);
        for (Eigen::Index j = 0; j < N; ++j) {
          hess[static_cast<std::size_t>(j)](m, i) += col[j];
          if (m != i) hess[static_cast<std::size_t>(j)](i, m) += col[j];
        }
      }
    }
  };
  auto fit_step = [&](const Eigen::VectorXd& targets, int k) {
    try {
      return fit(design, targets, beta, eps, options.fit).model;
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("time step " + std::to_string(k) + ": " + e.what(), e.best_gap());
    }
  };

  const int n = tgrid.steps();
  Eigen::VectorXd targets(N);
  for (Eigen::Index j = 0; j < N; ++j) targets[j] = problem.terminal(pts.row(j).transpose());
  require(targets.allFinite(), ErrorCode::numerical, "terminal data is not finite at the nodes");

  std::unique_ptr<RegressHistory> hist(new RegressHistory(tgrid, colloc, fit_step(targets, n)));
  const double dx = colloc.fill_distance();
  hist->stability_ = tgrid.dt() * diffusion_bound(problem, pts) / (dx * dx);
  hist->nodal_.assign(static_cast<std::size_t>(n + 1), Eigen::VectorXd());
  hist->steps_.reserve(static_cast<std::size_t>(n));

  values.setZero();
  grad.setZero();
  accumulate(hist->terminal_, 1.0);
  check_finite(values, n);
  hist->nodal_[static_cast<std::size_t>(n)] = values;

  std::vector<RegressionModel> reversed;
  reversed.reserve(static_cast<std::size_t>(n));
  for (int k = n - 1; k >= 0; --k) {
    const Eigen::VectorXd f = nodal_F(problem, tgrid[k + 1], pts, values, grad, hess);
    require(f.allFinite(), ErrorCode::numerical, "nonlinearity is not finite at time step " + std::to_string(k + 1));
    reversed.push_back(fit_step(f, k + 1));
    accumulate(reversed.back(), -tgrid.dt());
    check_finite(values, k);
    hist->nodal_[static_cast<std::size_t>(k)] = values;
  }
  hist->steps_.assign(std::make_move_iterator(reversed.rbegin()), std::make_move_iterator(reversed.rend()));
  return hist;
}

// ---------------------------------------------------------------------------
// Matrix form of one step

StepTerms hjb_step_operator(const GramSystem& gs, const ControlForm& form, const Eigen::VectorXd& pi,
                            const Eigen::VectorXd& v) {
  require(form.drift && form.diffusion, ErrorCode::invalid_argument, "control form needs drift and diffusion");
  require(v.size() == gs.size(), ErrorCode::dimension_mismatch, "step operator: nodal vector length mismatch");
  const int d = gs.dim();
  const Eigen::Index N = gs.size();
  const auto& pts = gs.colloc().points();

  Eigen::MatrixXd b(N, d);
  std::vector<Eigen::MatrixXd> a(static_cast<std::size_t>(N));
  for (Eigen::Index j = 0; j < N; ++j) {
    const Eigen::VectorXd x = pts.row(j).transpose();
    try {
      b.row(j) = form.drift(x, pi).transpose();
      a[static_cast<std::size_t>(j)] = form.diffusion(x, pi);
    } catch (const Error& e) {
      std::ostringstream os;
      os << "control (" << pi.transpose() << "): " << e.what();
      fail(e.code(), os.str());
    }
  }

  const Eigen::VectorXd alpha = gs.solve(v);
  StepTerms out{Eigen::VectorXd::Zero(N), Eigen::VectorXd::Zero(N)};
  for (int m = 0; m < d; ++m) out.drift += drift_matrix(gs, b.col(m), m) * alpha;
  for (int m = 0; m < d; ++m) {
    for (int l = 0; l < d; ++l) {
      Eigen::VectorXd q(N);
      for (Eigen::Index j = 0; j < N; ++j) q[j] = a[static_cast<std::size_t>(j)](m, l);
      if (q.isZero(0.0)) continue;
      out.diffusion += diffusion_matrix(gs, q, m, l) * alpha;
    }
  }
  return out;
}

}  // namespace wrbf
