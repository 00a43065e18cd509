#pragma once

#include "wrbf/geometry.hpp"
#include "wrbf/kernel.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <functional>
#include <memory>
#include <variant>
#include <vector>

namespace wrbf {

enum class Storage { dense, sparse };

struct AssemblyOptions {
  Storage storage = Storage::dense;
};

/// Diagonal shifts tried in order when the Gram matrix fails to factor.
inline constexpr std::array<double, 4> kJitterLevels = {0.0, 1e-12, 1e-10, 1e-8};

/// Symmetric N x N operator stored densely or in compressed-column form.
class SymmetricOperator {
 public:
  SymmetricOperator() = default;
  explicit SymmetricOperator(Eigen::MatrixXd dense) : data_(std::move(dense)) {}
  explicit SymmetricOperator(Eigen::SparseMatrix<double> sparse) : data_(std::move(sparse)) {}

  Eigen::Index size() const;
  bool empty() const { return size() == 0; }
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  Eigen::MatrixXd dense() const;
  Eigen::SparseMatrix<double> sparse() const;

 private:
  std::variant<Eigen::MatrixXd, Eigen::SparseMatrix<double>> data_;
};

/// Gram system of a kernel on a collocation set:
///   A  = {Phi(x_i - x_j)},  A1 = {phi1(|x_i - x_j|)},  A2 = {phi2(|x_i - x_j|)},
/// plus the Cholesky factor of A. Gl = diag(x_l) is the l-th coordinate column.
/// A1 (A2) is empty when the kernel has tau < 1 (tau < 2).
///
/// Immutable once assembled; share it through the returned shared_ptr.
class GramSystem {
 public:
  static std::shared_ptr<const GramSystem> assemble(WendlandKernel kernel, CollocationSet colloc,
                                                    AssemblyOptions options = {});

  ~GramSystem();
  GramSystem(const GramSystem&) = delete;
  GramSystem& operator=(const GramSystem&) = delete;

  const WendlandKernel& kernel() const noexcept { return kernel_; }
  const CollocationSet& colloc() const noexcept { return colloc_; }
  Eigen::Index size() const noexcept { return colloc_.size(); }
  int dim() const noexcept { return colloc_.dim(); }
  Storage storage() const noexcept { return storage_; }
  /// Diagonal shift that made the factorization succeed (0 when none).
  double jitter() const noexcept { return jitter_; }

  Eigen::MatrixXd A() const { return a_.dense(); }
  Eigen::MatrixXd A1() const;
  Eigen::MatrixXd A2() const;
  Eigen::VectorXd G(int axis) const;

  Eigen::VectorXd apply_A(const Eigen::VectorXd& v) const { return a_.apply(v); }
  Eigen::VectorXd apply_A1(const Eigen::VectorXd& v) const;
  Eigen::VectorXd apply_A2(const Eigen::VectorXd& v) const;

  /// (A + jitter I)^{-1} b through the stored factorization.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

 private:
  struct Factor;

  GramSystem(WendlandKernel kernel, CollocationSet colloc);
  void factorize();
  void check_length(Eigen::Index n, const char* what) const;

  WendlandKernel kernel_;
  CollocationSet colloc_;
  Storage storage_ = Storage::dense;
  SymmetricOperator a_, a1_, a2_;
  std::unique_ptr<Factor> factor_;
  double jitter_ = 0.0;
};

/// Kernel interpolant sum_j alpha_j Phi(x - x_j) over a Gram system.
class Interpolant {
 public:
  Interpolant(std::shared_ptr<const GramSystem> gram, Eigen::VectorXd alpha);

  const GramSystem& gram() const noexcept { return *gram_; }
  const std::shared_ptr<const GramSystem>& gram_ptr() const noexcept { return gram_; }
  const Eigen::VectorXd& alpha() const noexcept { return alpha_; }

  double eval(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd eval_grad(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::MatrixXd eval_hess(const Eigen::Ref<const Eigen::VectorXd>& x) const;

 private:
  void check_dim(Eigen::Index size) const;

  std::shared_ptr<const GramSystem> gram_;
  Eigen::VectorXd alpha_;
};

/// alpha = A^{-1} values.
Interpolant interpolate(std::shared_ptr<const GramSystem> gram, const Eigen::VectorXd& values);

/// B_l = Q_l (G_l A1 - A1 G_l) with Q_l = diag(b_diag).
Eigen::MatrixXd drift_matrix(const GramSystem& gs, const Eigen::VectorXd& b_diag, int axis);

/// B_mm = Q (A1 + G_m^2 A2 - 2 G_m A2 G_m + A2 G_m^2),
/// B_ml = Q (G_m G_l A2 - G_m A2 G_l - G_l A2 G_m + A2 G_m G_l) for m != l.
Eigen::MatrixXd diffusion_matrix(const GramSystem& gs, const Eigen::VectorXd& a_diag, int m, int l);

/// Interpolant derivatives at every node for coefficient vector alpha.
struct NodalDerivatives {
  Eigen::MatrixXd gradient;              // N x d
  std::vector<Eigen::MatrixXd> hessian;  // N matrices, d x d
};

/// The operators B_l and B_ml above with unit coefficients (Q = I), stored
/// sparse. Entries are formed directly as (x_i - x_j)_l phi1(r_ij) and
/// (x_i - x_j)_m (x_i - x_j)_l phi2(r_ij) + delta_ml phi1(r_ij), which
/// equals the commutator forms without their cancellation for large |x|.
class NodalOperators {
 public:
  /// Hessian operators are built when `with_hessian` and the kernel has tau >= 2.
  explicit NodalOperators(const GramSystem& gs, bool with_hessian = true);

  int dim() const noexcept { return d_; }
  bool has_hessian() const noexcept { return !hess_.empty(); }
  const Eigen::SparseMatrix<double, Eigen::RowMajor>& gradient_op(int axis) const;
  const Eigen::SparseMatrix<double, Eigen::RowMajor>& hessian_op(int m, int l) const;

  /// Derivatives of sum_j alpha_j Phi(x - x_j) at every node.
  NodalDerivatives apply(const Eigen::VectorXd& alpha) const;

 private:
  std::size_t pair_index(int m, int l) const;

  int d_ = 0;
  Eigen::Index n_ = 0;
  std::vector<Eigen::SparseMatrix<double, Eigen::RowMajor>> grad_;
  std::vector<Eigen::SparseMatrix<double, Eigen::RowMajor>> hess_;  // upper triangle, row-major pairs
};

/// First derivatives only; the Hessian vector is left empty.
NodalDerivatives nodal_gradient(const GramSystem& gs, const Eigen::VectorXd& alpha);
NodalDerivatives nodal_derivatives(const GramSystem& gs, const Eigen::VectorXd& alpha);

/// Smooth test function with analytic derivatives.
struct TestFunction {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
};

struct ProbeResult {
  int N = 0;
  double fill_distance = 0.0;
  /// Sup over the probe lattice of |D^a g - D^a I(g)|, maximized over
  /// multi-indices with |a|_1 = order, for order = 0, 1, 2.
  std::array<double, 3> sup_error{};
};

/// Interpolates g on equispaced grids of each size and measures the errors
/// on a probe lattice refined 10x per axis over [-R, R]^d.
std::vector<ProbeResult> convergence_probe(const WendlandKernel& kernel, double R, const std::vector<int>& N_list,
                                           const TestFunction& g);

}  // namespace wrbf
