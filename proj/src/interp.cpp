#include "wrbf/interp.hpp"

#include "wrbf/error.hpp"
#include "wrbf/parallel.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace wrbf {

// ---------------------------------------------------------------------------
// SymmetricOperator

Eigen::Index SymmetricOperator::size() const {
  return std::visit([](const auto& m) -> Eigen::Index { return m.rows(); }, data_);
}

Eigen::VectorXd SymmetricOperator::apply(const Eigen::VectorXd& v) const {
  return std::visit([&](const auto& m) -> Eigen::VectorXd { return m * v; }, data_);
}

Eigen::MatrixXd SymmetricOperator::dense() const {
  return std::visit([](const auto& m) -> Eigen::MatrixXd { return Eigen::MatrixXd(m); }, data_);
}

Eigen::SparseMatrix<double> SymmetricOperator::sparse() const {
  if (const auto* m = std::get_if<Eigen::SparseMatrix<double>>(&data_)) return *m;
  return std::get<Eigen::MatrixXd>(data_).sparseView();
}

// ---------------------------------------------------------------------------
// Assembly

namespace {

using Triplet = Eigen::Triplet<double>;

struct Entries {
  double a, a1, a2;
};

Entries kernel_entries(const WendlandKernel& k, double r) {
  return {k.phi(r), k.has_phi1() ? k.phi1(r) : 0.0, k.has_phi2() ? k.phi2(r) : 0.0};
}

// Candidate neighbours of each point: all j with |x_j0 - x_i0| < rho, found
// by a sweep over the points sorted on the first coordinate. Rows come back
// in ascending column order so assembly is deterministic.
std::vector<std::vector<Eigen::Index>> neighbour_lists(const PointSet& pts, double rho) {
  const Eigen::Index n = pts.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return pts(a, 0) < pts(b, 0); });

  std::vector<std::vector<Eigen::Index>> lists(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t pos) {
    const Eigen::Index i = order[pos];
    auto& out = lists[static_cast<std::size_t>(i)];
    for (std::size_t q = pos + 1; q-- > 0;) {
      if (pts(i, 0) - pts(order[q], 0) >= rho) break;
      out.push_back(order[q]);
    }
    for (std::size_t q = pos + 1; q < order.size(); ++q) {
      if (pts(order[q], 0) - pts(i, 0) >= rho) break;
      out.push_back(order[q]);
    }
    std::sort(out.begin(), out.end());
  });
  return lists;
}

}  // namespace

struct GramSystem::Factor {
  Eigen::LLT<Eigen::MatrixXd> dense;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> sparse;
};

GramSystem::GramSystem(WendlandKernel kernel, CollocationSet colloc)
    : kernel_(std::move(kernel)), colloc_(std::move(colloc)), factor_(std::make_unique<Factor>()) {}

GramSystem::~GramSystem() = default;

std::shared_ptr<const GramSystem> GramSystem::assemble(WendlandKernel kernel, CollocationSet colloc,
                                                       AssemblyOptions options) {
  if (kernel.d() != colloc.dim())
    fail(ErrorCode::dimension_mismatch, "kernel dimension " + std::to_string(kernel.d()) +
                                            " does not match collocation dimension " + std::to_string(colloc.dim()));

  std::shared_ptr<GramSystem> gs(new GramSystem(std::move(kernel), std::move(colloc)));
  gs->storage_ = options.storage;
  const auto& pts = gs->colloc_.points();
  const auto& k = gs->kernel_;
  const Eigen::Index n = pts.rows();
  const double rho = k.support_scale();

  if (options.storage == Storage::dense) {
    Eigen::MatrixXd a(n, n), a1(n, n), a2(n, n);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
      const auto i = static_cast<Eigen::Index>(ii);
      for (Eigen::Index j = 0; j < n; ++j) {
        const auto e = kernel_entries(k, (pts.row(i) - pts.row(j)).norm());
        a(i, j) = e.a;
        a1(i, j) = e.a1;
        a2(i, j) = e.a2;
      }
    });
    gs->a_ = SymmetricOperator(std::move(a));
    if (k.has_phi1()) gs->a1_ = SymmetricOperator(std::move(a1));
    if (k.has_phi2()) gs->a2_ = SymmetricOperator(std::move(a2));
  } else {
    const auto lists = neighbour_lists(pts, rho);
    std::vector<std::vector<Entries>> rows(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
      rows[i].reserve(lists[i].size());
      for (auto j : lists[i])
        rows[i].push_back(kernel_entries(k, (pts.row(static_cast<Eigen::Index>(i)) - pts.row(j)).norm()));
    });
    std::vector<Triplet> ta, ta1, ta2;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t q = 0; q < rows[i].size(); ++q) {
        const auto row = static_cast<Eigen::Index>(i);
        const auto col = lists[i][q];
        const auto& e = rows[i][q];
        if (e.a != 0.0) ta.emplace_back(row, col, e.a);
        if (e.a1 != 0.0) ta1.emplace_back(row, col, e.a1);
        if (e.a2 != 0.0) ta2.emplace_back(row, col, e.a2);
      }
    }
    auto build = [n](const std::vector<Triplet>& t) {
      Eigen::SparseMatrix<double> m(n, n);
      m.setFromTriplets(t.begin(), t.end());
      return m;
    };
    gs->a_ = SymmetricOperator(build(ta));
    if (k.has_phi1()) gs->a1_ = SymmetricOperator(build(ta1));
    if (k.has_phi2()) gs->a2_ = SymmetricOperator(build(ta2));
  }

  gs->factorize();
  return gs;
}

void GramSystem::factorize() {
  const Eigen::Index n = size();
  for (double jitter : kJitterLevels) {
    bool ok = false;
    if (storage_ == Storage::dense) {
      Eigen::MatrixXd shifted = a_.dense();
      shifted.diagonal().array() += jitter;
      factor_->dense.compute(shifted);
      ok = factor_->dense.info() == Eigen::Success &&
           (factor_->dense.matrixLLT().diagonal().array() > 0.0).all();
    } else {
      Eigen::SparseMatrix<double> shifted = a_.sparse();
      for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += jitter;
      factor_->sparse.compute(shifted);
      ok = factor_->sparse.info() == Eigen::Success;
    }
    if (ok) {
      jitter_ = jitter;
      if (jitter > 0.0) {
        std::ostringstream os;
        os << "Gram matrix (N=" << n << ") needed diagonal jitter " << jitter << " to factor";
        warn(os.str());
      }
      return;
    }
  }

  Eigen::MatrixXd last = a_.dense();
  last.diagonal().array() += kJitterLevels.back();
  const double pivot = Eigen::LDLT<Eigen::MatrixXd>(last).vectorD().minCoeff();
  std::ostringstream os;
  os << "Cholesky of the Gram matrix (N=" << n << ") failed at jitter " << kJitterLevels.back()
     << "; smallest pivot " << pivot;
  throw FactorizationError(os.str(), pivot);
}

void GramSystem::check_length(Eigen::Index n, const char* what) const {
  if (n != size())
    fail(ErrorCode::dimension_mismatch, std::string(what) + ": expected length " + std::to_string(size()) +
                                            ", got " + std::to_string(n));
}

Eigen::MatrixXd GramSystem::A1() const {
  require(!a1_.empty(), ErrorCode::invalid_argument, "A1 requires a kernel with tau >= 1");
  return a1_.dense();
}

Eigen::MatrixXd GramSystem::A2() const {
  require(!a2_.empty(), ErrorCode::invalid_argument, "A2 requires a kernel with tau >= 2");
  return a2_.dense();
}

Eigen::VectorXd GramSystem::G(int axis) const {
  if (axis < 0 || axis >= dim()) fail(ErrorCode::out_of_range, "axis " + std::to_string(axis) + " out of range");
  return colloc_.points().col(axis);
}

Eigen::VectorXd GramSystem::apply_A1(const Eigen::VectorXd& v) const {
  require(!a1_.empty(), ErrorCode::invalid_argument, "A1 requires a kernel with tau >= 1");
  check_length(v.size(), "apply_A1");
  return a1_.apply(v);
}

Eigen::VectorXd GramSystem::apply_A2(const Eigen::VectorXd& v) const {
  require(!a2_.empty(), ErrorCode::invalid_argument, "A2 requires a kernel with tau >= 2");
  check_length(v.size(), "apply_A2");
  return a2_.apply(v);
}

Eigen::VectorXd GramSystem::solve(const Eigen::VectorXd& b) const {
  check_length(b.size(), "solve");
  return storage_ == Storage::dense ? Eigen::VectorXd(factor_->dense.solve(b))
                                    : Eigen::VectorXd(factor_->sparse.solve(b));
}

// ---------------------------------------------------------------------------
// Interpolant

Interpolant::Interpolant(std::shared_ptr<const GramSystem> gram, Eigen::VectorXd alpha)
    : gram_(std::move(gram)), alpha_(std::move(alpha)) {
  require(gram_ != nullptr, ErrorCode::invalid_argument, "interpolant needs a Gram system");
  if (alpha_.size() != gram_->size())
    fail(ErrorCode::dimension_mismatch, "interpolant coefficients have length " + std::to_string(alpha_.size()) +
                                            ", expected " + std::to_string(gram_->size()));
}

void Interpolant::check_dim(Eigen::Index size) const {
  if (size != gram_->dim())
    fail(ErrorCode::dimension_mismatch, "interpolant expects " + std::to_string(gram_->dim()) +
                                            "-vectors, got length " + std::to_string(size));
}

double Interpolant::eval(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  check_dim(x.size());
  const auto& pts = gram_->colloc().points();
  const auto& k = gram_->kernel();
  double sum = 0.0;
  for (Eigen::Index j = 0; j < pts.rows(); ++j) {
    const double r = (x - pts.row(j).transpose()).norm();
    if (r < k.support_scale()) sum += alpha_[j] * k.phi(r);
  }
  return sum;
}

Eigen::VectorXd Interpolant::eval_grad(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  check_dim(x.size());
  const auto& pts = gram_->colloc().points();
  const auto& k = gram_->kernel();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
  for (Eigen::Index j = 0; j < pts.rows(); ++j) {
    const Eigen::VectorXd diff = x - pts.row(j).transpose();
    const double r = diff.norm();
    if (r < k.support_scale()) g += alpha_[j] * k.phi1(r) * diff;
  }
  return g;
}

Eigen::MatrixXd Interpolant::eval_hess(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  check_dim(x.size());
  const auto& pts = gram_->colloc().points();
  const auto& k = gram_->kernel();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(x.size(), x.size());
  for (Eigen::Index j = 0; j < pts.rows(); ++j) {
    const Eigen::VectorXd diff = x - pts.row(j).transpose();
    const double r = diff.norm();
    if (r < k.support_scale()) h += alpha_[j] * k.hessian(diff);
  }
  return h;
}

Interpolant interpolate(std::shared_ptr<const GramSystem> gram, const Eigen::VectorXd& values) {
  require(gram != nullptr, ErrorCode::invalid_argument, "interpolate needs a Gram system");
  Eigen::VectorXd alpha = gram->solve(values);
  return Interpolant(std::move(gram), std::move(alpha));
}

// ---------------------------------------------------------------------------
// Derivative operators

namespace {

void check_axis(const GramSystem& gs, int axis) {
  if (axis < 0 || axis >= gs.dim())
    fail(ErrorCode::out_of_range,
         "axis " + std::to_string(axis) + " out of range for dimension " + std::to_string(gs.dim()));
}

void check_diag(const GramSystem& gs, const Eigen::VectorXd& diag, const char* what) {
  if (diag.size() != gs.size())
    fail(ErrorCode::dimension_mismatch, std::string(what) + " has length " + std::to_string(diag.size()) +
                                            ", expected " + std::to_string(gs.size()));
}

}  // namespace

Eigen::MatrixXd drift_matrix(const GramSystem& gs, const Eigen::VectorXd& b_diag, int axis) {
  check_axis(gs, axis);
  check_diag(gs, b_diag, "drift coefficients");
  const Eigen::MatrixXd a1 = gs.A1();
  const Eigen::VectorXd g = gs.G(axis);
  Eigen::MatrixXd commutator = g.asDiagonal() * a1 - a1 * g.asDiagonal();
  return b_diag.asDiagonal() * commutator;
}

Eigen::MatrixXd diffusion_matrix(const GramSystem& gs, const Eigen::VectorXd& a_diag, int m, int l) {
  check_axis(gs, m);
  check_axis(gs, l);
  check_diag(gs, a_diag, "diffusion coefficients");
  const Eigen::MatrixXd a2 = gs.A2();
  const Eigen::VectorXd gm = gs.G(m);
  Eigen::MatrixXd core;
  if (m == l) {
    const Eigen::VectorXd gm2 = gm.array().square();
    core = gs.A1() + gm2.asDiagonal() * a2 - 2.0 * (gm.asDiagonal() * a2 * gm.asDiagonal()) + a2 * gm2.asDiagonal();
  } else {
    const Eigen::VectorXd gl = gs.G(l);
    const Eigen::VectorXd gml = gm.cwiseProduct(gl);
    core = gml.asDiagonal() * a2 - gm.asDiagonal() * a2 * gl.asDiagonal() - gl.asDiagonal() * a2 * gm.asDiagonal() +
           a2 * gml.asDiagonal();
  }
  return a_diag.asDiagonal() * core;
}

NodalOperators::NodalOperators(const GramSystem& gs, bool with_hessian) : d_(gs.dim()), n_(gs.size()) {
  const auto& k = gs.kernel();
  require(k.has_phi1(), ErrorCode::invalid_argument, "nodal derivatives need a kernel with tau >= 1");
  with_hessian = with_hessian && k.has_phi2();
  const auto& pts = gs.colloc().points();
  const double rho = k.support_scale();
  const auto lists = neighbour_lists(pts, rho);
  const std::size_t pairs = static_cast<std::size_t>(d_ * (d_ + 1) / 2);

  struct Row {
    std::vector<Eigen::Index> cols;
    std::vector<double> grad;  // d per column
    std::vector<double> hess;  // pairs per column
  };
  std::vector<Row> rows(static_cast<std::size_t>(n_));
  parallel_for(static_cast<std::size_t>(n_), [&](std::size_t ii) {
    const auto i = static_cast<Eigen::Index>(ii);
    auto& row = rows[ii];
    for (auto j : lists[ii]) {
      const Eigen::VectorXd diff = (pts.row(i) - pts.row(j)).transpose();
      const double r = diff.norm();
      if (r >= rho) continue;
      const double p1 = k.phi1(r);
      row.cols.push_back(j);
      for (int m = 0; m < d_; ++m) row.grad.push_back(diff[m] * p1);
      if (with_hessian) {
        const double p2 = k.phi2(r);
        for (int m = 0; m < d_; ++m)
          for (int l = m; l < d_; ++l) row.hess.push_back(diff[m] * diff[l] * p2 + (m == l ? p1 : 0.0));
      }
    }
  });

  auto build = [&](auto&& value_of) {
    Eigen::SparseMatrix<double, Eigen::RowMajor> op(n_, n_);
    std::vector<Eigen::Triplet<double>> t;
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t q = 0; q < rows[i].cols.size(); ++q)
        t.emplace_back(static_cast<Eigen::Index>(i), rows[i].cols[q], value_of(rows[i], q));
    op.setFromTriplets(t.begin(), t.end());
    return op;
  };
  for (int m = 0; m < d_; ++m)
    grad_.push_back(build([&](const Row& row, std::size_t q) { return row.grad[q * d_ + m]; }));
  if (with_hessian)
    for (std::size_t p = 0; p < pairs; ++p)
      hess_.push_back(build([&](const Row& row, std::size_t q) { return row.hess[q * pairs + p]; }));
}

std::size_t NodalOperators::pair_index(int m, int l) const {
  if (m > l) std::swap(m, l);
  if (m < 0 || l >= d_)
    fail(ErrorCode::out_of_range, "axis pair out of range for dimension " + std::to_string(d_));
  // Row-major upper triangle.
  return static_cast<std::size_t>(m * d_ - m * (m - 1) / 2 + (l - m));
}

const Eigen::SparseMatrix<double, Eigen::RowMajor>& NodalOperators::gradient_op(int axis) const {
  if (axis < 0 || axis >= d_)
    fail(ErrorCode::out_of_range, "axis " + std::to_string(axis) + " out of range for dimension " + std::to_string(d_));
  return grad_[static_cast<std::size_t>(axis)];
}

const Eigen::SparseMatrix<double, Eigen::RowMajor>& NodalOperators::hessian_op(int m, int l) const {
  require(has_hessian(), ErrorCode::invalid_argument, "Hessian operators were not built");
  return hess_[pair_index(m, l)];
}

NodalDerivatives NodalOperators::apply(const Eigen::VectorXd& alpha) const {
  require(alpha.size() == n_, ErrorCode::dimension_mismatch, "nodal derivatives: coefficient length mismatch");
  NodalDerivatives out;
  out.gradient.resize(n_, d_);
  for (int m = 0; m < d_; ++m) out.gradient.col(m) = grad_[static_cast<std::size_t>(m)] * alpha;
  if (!has_hessian()) return out;
  out.hessian.assign(static_cast<std::size_t>(n_), Eigen::MatrixXd::Zero(d_, d_));
  for (int m = 0; m < d_; ++m) {
    for (int l = m; l < d_; ++l) {
      const Eigen::VectorXd col = hess_[pair_index(m, l)] * alpha;
      for (Eigen::Index i = 0; i < n_; ++i) {
        out.hessian[static_cast<std::size_t>(i)](m, l) = col[i];
        out.hessian[static_cast<std::size_t>(i)](l, m) = col[i];
      }
    }
  }
  return out;
}

NodalDerivatives nodal_gradient(const GramSystem& gs, const Eigen::VectorXd& alpha) {
  return NodalOperators(gs, false).apply(alpha);
}

NodalDerivatives nodal_derivatives(const GramSystem& gs, const Eigen::VectorXd& alpha) {
  require(gs.kernel().has_phi2(), ErrorCode::invalid_argument, "nodal Hessians need a kernel with tau >= 2");
  return NodalOperators(gs, true).apply(alpha);
}

// ---------------------------------------------------------------------------
// Convergence probe

std::vector<ProbeResult> convergence_probe(const WendlandKernel& kernel, double R, const std::vector<int>& N_list,
                                           const TestFunction& g) {
  require(static_cast<bool>(g.value), ErrorCode::invalid_argument, "test function needs a value callback");
  const int d = kernel.d();
  std::vector<ProbeResult> results;
  results.reserve(N_list.size());

  for (int N : N_list) {
    auto colloc = equispaced_grid(d, N, R);
    const int per_axis = static_cast<int>(std::lround(std::pow(static_cast<double>(N), 1.0 / d)));
    const int probes = 10 * (per_axis - 1) + 1;
    const double fill = colloc.fill_distance();

    Eigen::VectorXd values(colloc.size());
    for (Eigen::Index j = 0; j < colloc.size(); ++j) values[j] = g.value(colloc.point(j));
    auto gram = GramSystem::assemble(kernel, std::move(colloc));
    const Interpolant ip = interpolate(gram, values);

    const bool want_grad = static_cast<bool>(g.gradient) && kernel.has_phi1();
    const bool want_hess = static_cast<bool>(g.hessian) && kernel.has_phi2();

    long total = 1;
    for (int m = 0; m < d; ++m) total *= probes;
    std::vector<std::array<double, 3>> per_probe(static_cast<std::size_t>(total));
    parallel_for(static_cast<std::size_t>(total), [&](std::size_t idx) {
      Eigen::VectorXd x(d);
      auto rem = static_cast<long>(idx);
      for (int m = d - 1; m >= 0; --m) {
        x[m] = -R + 2.0 * R * static_cast<double>(rem % probes) / (probes - 1);
        rem /= probes;
      }
      auto& e = per_probe[idx];
      e = {std::abs(g.value(x) - ip.eval(x)), 0.0, 0.0};
      if (want_grad) e[1] = (g.gradient(x) - ip.eval_grad(x)).cwiseAbs().maxCoeff();
      if (want_hess) e[2] = (g.hessian(x) - ip.eval_hess(x)).cwiseAbs().maxCoeff();
    });

    ProbeResult res;
    res.N = N;
    res.fill_distance = fill;
    for (const auto& e : per_probe)
      for (int o = 0; o < 3; ++o) res.sup_error[o] = std::max(res.sup_error[o], e[o]);
    results.push_back(res);
  }
  return results;
}

}  // namespace wrbf
