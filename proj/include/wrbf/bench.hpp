#pragma once

#include "wrbf/geometry.hpp"
#include "wrbf/interp.hpp"
#include "wrbf/solver.hpp"

#include <Eigen/Core>

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace wrbf {

/// Upper end of the volatility interval [0, sigma_max] of the test problem.
inline constexpr double kGuoSigmaMax = 0.2;

/// Analytic solution with the derivatives needed by residual_check.
struct ExactSolution {
  std::function<double(double t, const Eigen::VectorXd& x)> value;
  std::function<double(double t, const Eigen::VectorXd& x)> time_derivative;
  std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& x)> gradient;
  std::function<Eigen::MatrixXd(double t, const Eigen::VectorXd& x)> hessian;
};

enum class Encoding { control_form, general };

/// -v_t - (1/2) sup_{0<=s<=smax} tr(s^2 D^2 v) + (1/d) sum_i v_{x_i}
///   - (d/2) inf_{0<=s<=smax} (s^2 v) = 0,  v(T, x) = sin(T + sum_i x_i),
/// i.e. F = -(smax^2/2) max(tr X, 0) + (1/d) sum p_i + (d smax^2/2) max(-z, 0).
HjbProblem guo_problem(int d, Encoding encoding = Encoding::control_form, double horizon = 1.0,
                       double sigma_max = kGuoSigmaMax);
/// v(t, x) = sin(t + sum_i x_i).
ExactSolution guo_exact(int d);

/// -v_t - (sigma^2/2) tr D^2 v = 0 with v(T, x) = sin(1 + sum_i x_i).
HjbProblem heat_problem(int d, double sigma, double horizon = 1.0);
/// exp(-d sigma^2 (T - t) / 2) sin(1 + sum_i x_i).
ExactSolution heat_exact(int d, double sigma, double horizon = 1.0);

/// max |-v_t + F(t, x, v, Dv, D^2 v)| over `samples` random points of
/// [0, T] x [-1, 1]^d.
double residual_check(const HjbProblem& problem, const ExactSolution& exact, int samples, unsigned seed = 7);

struct ErrorReport {
  int N = 0;
  double R = 0.0;
  double delta_x = 0.0;
  int n = 0;
  double max_error = 0.0;
  double rms_error = 0.0;
  double runtime_ms = 0.0;
  std::string scheme;
  int tau = 0;
  double stability = 0.0;
  /// Empty on success, otherwise the failure message; errors are NaN then.
  std::string status;

  bool ok() const noexcept { return status.empty(); }
};

enum class Scheme { interp, regress };
enum class EvalSet { sobol, nodes };

const char* to_string(Scheme scheme) noexcept;
Scheme parse_scheme(const std::string& name);
EvalSet parse_eval_set(const std::string& name);

/// Kernel smoothness used for dimension d (4 for d = 1, 15 for d = 2).
int benchmark_tau(int d);

struct BenchmarkConfig {
  int d = 1;
  int n = 256;
  std::vector<int> N_list;
  Scheme scheme = Scheme::interp;
  EvalSet eval = EvalSet::sobol;
  /// Sobol points; 0 selects 10^d.
  int eval_count = 0;
  /// 0 selects benchmark_tau(d); lowered while the kernel degree exceeds the cap.
  int tau = 0;
  /// Kernel support radius rho.
  double support_scale = 1.0;
  double horizon = 1.0;
  /// Regression scheme.
  double beta0 = 10.0;
  double h = 1e-3;
  int M = 0;
  /// Write runtime_ms = 0 so repeated runs give identical output.
  bool deterministic = false;
};

/// Error metrics over the evaluation set and every time index i = 0..n.
/// Runs the residual gate first; failures of single N are recorded in the
/// report and the sweep continues.
std::vector<ErrorReport> run_benchmark(const BenchmarkConfig& config);

/// Collocation grid used by the benchmark for a requested N: equispaced in
/// d = 1, ceil(sqrt N) points per axis in d = 2, over [-R, R]^d with R from
/// paper_radius of the actual point count.
CollocationSet benchmark_grid(int d, int N, int tau);

enum class FdProblem { guo, heat };

struct FdOptions {
  FdProblem problem = FdProblem::guo;
  double sigma = kGuoSigmaMax;
  double horizon = 1.0;
  /// Kernel smoothness that fixes the radius R (same grid as the RBF run).
  int tau = 4;
  bool deterministic = false;
};

/// Explicit Euler with central differences and zero values outside a
/// uniform one-dimensional grid; errors are measured at the grid nodes.
/// Returns the nodal history indexed by k = 0..n.
std::vector<Eigen::VectorXd> fd_solve(const HjbProblem& problem, const CollocationSet& grid, const TimeGrid& tgrid);

ErrorReport fd_baseline(int n, int N, const FdOptions& options = {});
std::vector<ErrorReport> fd_sweep(int n, const std::vector<int>& N_list, const FdOptions& options = {});

struct RatioRow {
  int N = 0;
  int n = 0;
  double max_ratio = 0.0;
  double rms_ratio = 0.0;
};

/// fd / rbf error ratios per (N, n); the key sets must coincide.
std::vector<RatioRow> ratio_table(const std::vector<ErrorReport>& rbf, const std::vector<ErrorReport>& fd);

/// Header N,R,delta_x,max_error,rms_error,runtime_ms.
void write_reports_csv(std::ostream& os, const std::vector<ErrorReport>& reports);
/// `n` is not stored in the file and is supplied by the caller.
std::vector<ErrorReport> read_reports_csv(std::istream& is, int n);
/// Parses n from a "_n<digits>" component of the file name, e.g. errors_d1_n256.csv.
int steps_from_filename(const std::string& path);
std::string reports_filename(const std::string& prefix, int d, int n);

/// Header N,n,max_ratio,rms_ratio.
void write_ratios_csv(std::ostream& os, const std::vector<RatioRow>& rows);

}  // namespace wrbf
