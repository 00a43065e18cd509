#pragma once

#include "wrbf/geometry.hpp"
#include "wrbf/interp.hpp"
#include "wrbf/l1regress.hpp"

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <variant>
#include <vector>

namespace wrbf {

/// F(t, x, z, p, X) of -dv/dt + F(t, x, v, Dv, D^2 v) = 0.
using GeneralF = std::function<double(double t, const Eigen::VectorXd& x, double z, const Eigen::VectorXd& p,
                                      const Eigen::MatrixXd& X)>;

/// F = max over pi in K of H(t, x, z, b(x,pi)^T p, tr(a(x,pi) X)).
///
/// K is a finite list. An interval control set whose optimum is known in
/// closed form is expressed as a single control with the optimization
/// folded into H.
struct ControlForm {
  std::vector<Eigen::VectorXd> controls;
  std::function<Eigen::VectorXd(const Eigen::VectorXd& x, const Eigen::VectorXd& pi)> drift;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd& x, const Eigen::VectorXd& pi)> diffusion;
  std::function<double(double t, const Eigen::VectorXd& x, double z, double drift_term, double diffusion_term,
                       const Eigen::VectorXd& pi)>
      hamiltonian;
};

struct HjbProblem {
  int dim = 1;
  double horizon = 1.0;
  std::function<double(const Eigen::VectorXd&)> terminal;
  std::variant<GeneralF, ControlForm> nonlinearity;

  /// Pointwise F through whichever encoding is stored.
  double F(double t, const Eigen::VectorXd& x, double z, const Eigen::VectorXd& p, const Eigen::MatrixXd& X) const;
  /// Throws unless dim, horizon, terminal and the nonlinearity callbacks are set.
  void validate() const;
};

/// Largest F(.., X + E) - F(.., X) over random inputs in [-1,1]^d and
/// random PSD increments E; degenerate ellipticity means this is <= 0.
double ellipticity_violation(const HjbProblem& problem, int samples, unsigned seed = 1);

/// Largest |a - a^T| over random states and every control (0 for GeneralF).
double diffusion_asymmetry(const HjbProblem& problem, int samples, unsigned seed = 1);

/// Full backward history of a scheme, indexed by time step k = 0..n.
class SolutionHistory {
 public:
  virtual ~SolutionHistory() = default;

  const TimeGrid& tgrid() const noexcept { return tgrid_; }
  int steps() const noexcept { return tgrid_.steps(); }
  /// v_k at the collocation nodes.
  const Eigen::VectorXd& nodal(int k) const;
  const CollocationSet& colloc() const noexcept { return colloc_; }
  /// dt * (diffusion bound) / dx^2; reported only, never enforced.
  double stability_number() const noexcept { return stability_; }

  virtual double eval(int k, const Eigen::Ref<const Eigen::VectorXd>& x) const = 0;
  virtual Eigen::VectorXd eval_grad(int k, const Eigen::Ref<const Eigen::VectorXd>& x) const = 0;
  virtual Eigen::MatrixXd eval_hess(int k, const Eigen::Ref<const Eigen::VectorXd>& x) const = 0;
  /// eval(k, x) for k = 0..n.
  virtual Eigen::VectorXd eval_path(const Eigen::Ref<const Eigen::VectorXd>& x) const;

 protected:
  SolutionHistory(TimeGrid tgrid, CollocationSet colloc) : tgrid_(std::move(tgrid)), colloc_(std::move(colloc)) {}
  void check_step(int k) const;
  void check_dim(Eigen::Index size) const;

  TimeGrid tgrid_;
  CollocationSet colloc_;
  std::vector<Eigen::VectorXd> nodal_;
  double stability_ = 0.0;
};

/// Interpolation scheme: v_k = v_{k+1} - dt F_{k+1}(v_{k+1}) on the nodes,
/// with derivatives taken from the interpolant of v_{k+1}.
class InterpHistory final : public SolutionHistory {
 public:
  const GramSystem& gram() const noexcept { return *gram_; }
  const std::shared_ptr<const GramSystem>& gram_ptr() const noexcept { return gram_; }
  /// Interpolation coefficients A^{-1} v_k.
  const Eigen::VectorXd& alpha(int k) const;
  Interpolant interpolant(int k) const;

  double eval(int k, const Eigen::Ref<const Eigen::VectorXd>& x) const override;
  Eigen::VectorXd eval_grad(int k, const Eigen::Ref<const Eigen::VectorXd>& x) const override;
  Eigen::MatrixXd eval_hess(int k, const Eigen::Ref<const Eigen::VectorXd>& x) const override;
  Eigen::VectorXd eval_path(const Eigen::Ref<const Eigen::VectorXd>& x) const override;

 private:
  friend std::unique_ptr<InterpHistory> solve_interp(const HjbProblem&, std::shared_ptr<const GramSystem>,
                                                     const TimeGrid&);
  InterpHistory(std::shared_ptr<const GramSystem> gram, TimeGrid tgrid);

  std::shared_ptr<const GramSystem> gram_;
  std::vector<Eigen::VectorXd> alpha_;
};

struct RegressOptions {
  BudgetSchedule schedule{};
  /// Number of centers; 0 uses every collocation point.
  int M = 0;
  /// Regression tolerance; each fit certifies a duality gap <= h^2.
  double h = 1e-3;
  FitOptions fit{};
};

/// Regression scheme: v(t_n) = G(theta_n) fit to f, then
/// v(t_k) = v(t_{k+1}) - dt G(theta_{k+1}) with theta_{k+1} fit to F_{k+1}.
class RegressHistory final : public SolutionHistory {
 public:
  const RegressionModel& terminal_model() const noexcept { return terminal_; }
  /// Model theta_k fit at time t_k for k = 1..n.
  const RegressionModel& step_model(int k) const;
  double budget() const noexcept { return terminal_.budget(); }

  double eval(int k, const Eigen::Ref<const Eigen::VectorXd>& x) const override;
  Eigen::VectorXd eval_grad(int k, const Eigen::Ref<const Eigen::VectorXd>& x) const override;
  Eigen::MatrixXd eval_hess(int k, const Eigen::Ref<const Eigen::VectorXd>& x) const override;
  Eigen::VectorXd eval_path(const Eigen::Ref<const Eigen::VectorXd>& x) const override;

 private:
  friend std::unique_ptr<RegressHistory> solve_regress(const HjbProblem&, const CollocationSet&, const TimeGrid&,
                                                       std::shared_ptr<const WendlandKernel>, const RegressOptions&);
  RegressHistory(TimeGrid tgrid, CollocationSet colloc, RegressionModel terminal);

  RegressionModel terminal_;
  std::vector<RegressionModel> steps_;  // steps_[k - 1] = theta_k
};

std::unique_ptr<InterpHistory> solve_interp(const HjbProblem& problem, std::shared_ptr<const GramSystem> gs,
                                            const TimeGrid& tgrid);

std::unique_ptr<RegressHistory> solve_regress(const HjbProblem& problem, const CollocationSet& colloc,
                                              const TimeGrid& tgrid, std::shared_ptr<const WendlandKernel> kernel,
                                              const RegressOptions& options = {});

/// Row indices of M centers spread evenly over the N collocation points.
std::vector<Eigen::Index> center_indices(Eigen::Index N, int M);

struct StepTerms {
  Eigen::VectorXd drift;      // (sum_m B_m(pi) A^{-1} v)_j
  Eigen::VectorXd diffusion;  // (sum_{m,l} B_ml(pi) A^{-1} v)_j
};

/// Drift and diffusion arguments of H for one control, assembled with the
/// dense derivative matrices.
StepTerms hjb_step_operator(const GramSystem& gs, const ControlForm& form, const Eigen::VectorXd& pi,
                            const Eigen::VectorXd& v);

}  // namespace wrbf
