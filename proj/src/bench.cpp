#include "wrbf/bench.hpp"

#include "wrbf/csv.hpp"
#include "wrbf/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <regex>

namespace wrbf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_bench_dim(int d) {
  if (d != 1 && d != 2) fail(ErrorCode::invalid_argument, "benchmark dimension must be 1 or 2, got " + std::to_string(d));
}

double coord_sum(const Eigen::VectorXd& x) { return x.sum(); }

}  // namespace

// ---------------------------------------------------------------------------
// Problems

HjbProblem guo_problem(int d, Encoding encoding, double horizon, double sigma_max) {
  check_bench_dim(d);
  require(sigma_max >= 0.0 && std::isfinite(sigma_max), ErrorCode::invalid_argument, "sigma_max must be >= 0");
  const double half_s2 = 0.5 * sigma_max * sigma_max;
  const double dd = d;

  HjbProblem p;
  p.dim = d;
  p.horizon = horizon;
  p.terminal = [horizon](const Eigen::VectorXd& x) { return std::sin(horizon + coord_sum(x)); };
  if (encoding == Encoding::general) {
    p.nonlinearity = GeneralF([=](double, const Eigen::VectorXd&, double z, const Eigen::VectorXd& q,
                                  const Eigen::MatrixXd& X) {
      return -half_s2 * std::max(X.trace(), 0.0) + q.sum() / dd + dd * half_s2 * std::max(-z, 0.0);
    });
  } else {
    ControlForm form;
    // The sup over [0, sigma_max] is attained in closed form, so K is a
    // single placeholder control.
    form.controls = {Eigen::VectorXd::Constant(1, sigma_max)};
    form.drift = [dd](const Eigen::VectorXd& x, const Eigen::VectorXd&) {
      return Eigen::VectorXd::Constant(x.size(), 1.0 / dd);
    };
    form.diffusion = [](const Eigen::VectorXd& x, const Eigen::VectorXd&) {
      return Eigen::MatrixXd::Identity(x.size(), x.size());
    };
    form.hamiltonian = [=](double, const Eigen::VectorXd&, double z, double drift, double diffusion,
                           const Eigen::VectorXd&) {
      const double sup_term = half_s2 * std::max(diffusion, 0.0);   // (1/2) sup s^2 tr X
      const double inf_term = -half_s2 * 2.0 * std::max(-z, 0.0);   // inf s^2 z
      return -sup_term + drift - 0.5 * dd * inf_term;
    };
    p.nonlinearity = std::move(form);
  }
  return p;
}

ExactSolution guo_exact(int d) {
  check_bench_dim(d);
  ExactSolution e;
  e.value = [](double t, const Eigen::VectorXd& x) { return std::sin(t + coord_sum(x)); };
  e.time_derivative = [](double t, const Eigen::VectorXd& x) { return std::cos(t + coord_sum(x)); };
  e.gradient = [](double t, const Eigen::VectorXd& x) {
    return Eigen::VectorXd::Constant(x.size(), std::cos(t + coord_sum(x)));
  };
  e.hessian = [](double t, const Eigen::VectorXd& x) {
    return Eigen::MatrixXd::Constant(x.size(), x.size(), -std::sin(t + coord_sum(x)));
  };
  return e;
}

HjbProblem heat_problem(int d, double sigma, double horizon) {
  check_bench_dim(d);
  const double half_s2 = 0.5 * sigma * sigma;
  HjbProblem p;
  p.dim = d;
  p.horizon = horizon;
  p.terminal = [](const Eigen::VectorXd& x) { return std::sin(1.0 + coord_sum(x)); };
  p.nonlinearity = GeneralF([half_s2](double, const Eigen::VectorXd&, double, const Eigen::VectorXd&,
                                      const Eigen::MatrixXd& X) { return -half_s2 * X.trace(); });
  return p;
}

ExactSolution heat_exact(int d, double sigma, double horizon) {
  check_bench_dim(d);
  const double rate = 0.5 * d * sigma * sigma;
  ExactSolution e;
  e.value = [=](double t, const Eigen::VectorXd& x) {
    return std::exp(-rate * (horizon - t)) * std::sin(1.0 + coord_sum(x));
  };
  e.time_derivative = [=](double t, const Eigen::VectorXd& x) {
    return rate * std::exp(-rate * (horizon - t)) * std::sin(1.0 + coord_sum(x));
  };
  e.gradient = [=](double t, const Eigen::VectorXd& x) {
    return Eigen::VectorXd::Constant(x.size(), std::exp(-rate * (horizon - t)) * std::cos(1.0 + coord_sum(x)));
  };
  e.hessian = [=](double t, const Eigen::VectorXd& x) {
    return Eigen::MatrixXd::Constant(x.size(), x.size(),
                                     -std::exp(-rate * (horizon - t)) * std::sin(1.0 + coord_sum(x)));
  };
  return e;
}

double residual_check(const HjbProblem& problem, const ExactSolution& exact, int samples, unsigned seed) {
  problem.validate();
  require(samples >= 1, ErrorCode::invalid_argument, "residual_check needs samples >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> time(0.0, problem.horizon);
  double worst = 0.0;
  Eigen::VectorXd x(problem.dim);
  for (int s = 0; s < samples; ++s) {
    const double t = time(rng);
    for (int m = 0; m < problem.dim; ++m) x[m] = unit(rng);
    const double r = -exact.time_derivative(t, x) +
                     problem.F(t, x, exact.value(t, x), exact.gradient(t, x), exact.hessian(t, x));
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Benchmark sweep

const char* to_string(Scheme scheme) noexcept { return scheme == Scheme::interp ? "interp" : "regress"; }

Scheme parse_scheme(const std::string& name) {
  if (name == "interp") return Scheme::interp;
  if (name == "regress") return Scheme::regress;
  fail(ErrorCode::invalid_argument, "unknown scheme '" + name + "' (expected interp or regress)");
}

EvalSet parse_eval_set(const std::string& name) {
  if (name == "sobol") return EvalSet::sobol;
  if (name == "nodes") return EvalSet::nodes;
  fail(ErrorCode::invalid_argument, "unknown evaluation set '" + name + "' (expected sobol or nodes)");
}

int benchmark_tau(int d) {
  check_bench_dim(d);
  return d == 1 ? 4 : 15;
}

CollocationSet benchmark_grid(int d, int N, int tau) {
  check_bench_dim(d);
  require(N >= 2, ErrorCode::invalid_argument, "benchmark grids need N >= 2");
  const int per_axis = d == 1 ? N : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(N)) - 1e-12));
  int actual = 1;
  for (int m = 0; m < d; ++m) actual *= per_axis;
  return tensor_grid(d, per_axis, paper_radius(d, actual, tau));
}

namespace {

struct Accumulator {
  double max = 0.0;
  double sum_sq = 0.0;
  long count = 0;

  void add(double err) {
    max = std::max(max, err);
    sum_sq += err * err;
    ++count;
  }
  double rms() const { return count ? std::sqrt(sum_sq / static_cast<double>(count)) : 0.0; }
};

WendlandKernel benchmark_kernel(int d, int& tau, double support_scale) {
  const int wanted = tau;
  for (; tau >= 0; --tau) {
    try {
      auto k = WendlandKernel::build(d, tau, support_scale);
      if (tau != wanted)
        warn("kernel (d=" + std::to_string(d) + ", tau=" + std::to_string(wanted) +
             ") exceeds the degree cap; using tau=" + std::to_string(tau));
      return k;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::out_of_range) throw;
    }
  }
  fail(ErrorCode::out_of_range, "no admissible kernel smoothness for d=" + std::to_string(d));
}

ErrorReport run_cell(const BenchmarkConfig& cfg, int N, const HjbProblem& problem, const ExactSolution& exact,
                     const PointSet& sobol) {
  ErrorReport rep;
  rep.n = cfg.n;
  rep.scheme = to_string(cfg.scheme);
  rep.tau = cfg.tau == 0 ? benchmark_tau(cfg.d) : cfg.tau;
  const auto start = std::chrono::steady_clock::now();
  try {
    const auto kernel = std::make_shared<const WendlandKernel>(benchmark_kernel(cfg.d, rep.tau, cfg.support_scale));
    auto colloc = benchmark_grid(cfg.d, N, rep.tau);
    rep.N = static_cast<int>(colloc.size());
    rep.R = colloc.box_radius();
    rep.delta_x = colloc.fill_distance();
    const auto tgrid = TimeGrid::uniform(cfg.horizon, cfg.n);

    std::unique_ptr<SolutionHistory> hist;
    if (cfg.scheme == Scheme::interp) {
      AssemblyOptions opts;
      opts.storage = colloc.size() > 512 ? Storage::sparse : Storage::dense;
      hist = solve_interp(problem, GramSystem::assemble(*kernel, colloc, opts), tgrid);
    } else {
      RegressOptions ro;
      ro.schedule = BudgetSchedule(cfg.beta0);
      ro.M = cfg.M;
      ro.h = cfg.h;
      hist = solve_regress(problem, colloc, tgrid, kernel, ro);
    }
    rep.stability = hist->stability_number();

    Accumulator acc;
    const PointSet& eval_pts = cfg.eval == EvalSet::sobol ? sobol : hist->colloc().points();
    for (Eigen::Index q = 0; q < eval_pts.rows(); ++q) {
      const Eigen::VectorXd x = eval_pts.row(q).transpose();
      const Eigen::VectorXd path = hist->eval_path(x);
      for (int i = 0; i <= cfg.n; ++i) acc.add(std::abs(path[i] - exact.value(tgrid[i], x)));
    }
    rep.max_error = acc.max;
    rep.rms_error = acc.rms();
  } catch (const std::exception& e) {
    rep.status = e.what();
    rep.max_error = kNaN;
    rep.rms_error = kNaN;
    warn("benchmark run N=" + std::to_string(N) + " failed: " + rep.status);
  }
  const auto stop = std::chrono::steady_clock::now();
  rep.runtime_ms = cfg.deterministic ? 0.0 : std::chrono::duration<double, std::milli>(stop - start).count();
  return rep;
}

}  // namespace

std::vector<ErrorReport> run_benchmark(const BenchmarkConfig& config) {
  check_bench_dim(config.d);
  require(config.n >= 0, ErrorCode::invalid_argument, "number of time steps must be >= 0");
  require(!config.N_list.empty(), ErrorCode::invalid_argument, "N list is empty");
  require(config.tau >= 0, ErrorCode::invalid_argument, "tau must be >= 0");

  const HjbProblem problem = guo_problem(config.d, Encoding::control_form, config.horizon);
  const ExactSolution exact = guo_exact(config.d);
  const double residual = residual_check(problem, exact, 1000);
  if (!(residual <= 1e-10))
    fail(ErrorCode::internal, "benchmark problem fails its residual check (" + format_double(residual) + ")");

  int eval_count = config.eval_count;
  if (eval_count == 0) eval_count = config.d == 1 ? 10 : 100;
  const PointSet sobol = config.eval == EvalSet::sobol ? sobol_points(config.d, eval_count) : PointSet();

  std::vector<ErrorReport> out;
  out.reserve(config.N_list.size());
  for (int N : config.N_list) out.push_back(run_cell(config, N, problem, exact, sobol));
  return out;
}

// ---------------------------------------------------------------------------
// Finite differences

std::vector<Eigen::VectorXd> fd_solve(const HjbProblem& problem, const CollocationSet& grid, const TimeGrid& tgrid) {
  problem.validate();
  require(grid.dim() == 1 && problem.dim == 1, ErrorCode::invalid_argument,
          "the finite-difference baseline is one-dimensional");
  const Eigen::Index N = grid.size();
  require(N >= 3, ErrorCode::invalid_argument, "finite differences need at least 3 nodes");
  const Eigen::VectorXd x = grid.points().col(0);
  const double dx = (x[N - 1] - x[0]) / static_cast<double>(N - 1);
  for (Eigen::Index j = 1; j < N; ++j) {
    if (std::abs(x[j] - x[j - 1] - dx) > 1e-9 * dx)
      fail(ErrorCode::invalid_argument, "finite differences need a sorted uniform grid");
  }

  const int n = tgrid.steps();
  std::vector<Eigen::VectorXd> hist(static_cast<std::size_t>(n + 1));
  Eigen::VectorXd v(N);
  for (Eigen::Index j = 0; j < N; ++j) v[j] = problem.terminal(Eigen::VectorXd::Constant(1, x[j]));
  hist[static_cast<std::size_t>(n)] = v;

  Eigen::VectorXd xj(1), p(1);
  Eigen::MatrixXd X(1, 1);
  Eigen::VectorXd next(N);
  for (int k = n - 1; k >= 0; --k) {
    const double t = tgrid[k + 1];
    for (Eigen::Index j = 0; j < N; ++j) {
      const double left = j > 0 ? v[j - 1] : 0.0;
      const double right = j + 1 < N ? v[j + 1] : 0.0;
      xj[0] = x[j];
      p[0] = (right - left) / (2.0 * dx);
      X(0, 0) = (right - 2.0 * v[j] + left) / (dx * dx);
      next[j] = v[j] - tgrid.dt() * problem.F(t, xj, v[j], p, X);
    }
    v = next;
    if (!v.allFinite()) throw NumericalError("non-finite finite-difference value at time step " + std::to_string(k), k);
    hist[static_cast<std::size_t>(k)] = v;
  }
  return hist;
}

ErrorReport fd_baseline(int n, int N, const FdOptions& options) {
  require(n >= 0, ErrorCode::invalid_argument, "number of time steps must be >= 0");
  ErrorReport rep;
  rep.n = n;
  rep.scheme = "fd";
  rep.tau = options.tau;
  const auto start = std::chrono::steady_clock::now();
  try {
    const HjbProblem problem = options.problem == FdProblem::guo
                                   ? guo_problem(1, Encoding::general, options.horizon, options.sigma)
                                   : heat_problem(1, options.sigma, options.horizon);
    const ExactSolution exact = options.problem == FdProblem::guo ? guo_exact(1)
                                                                   : heat_exact(1, options.sigma, options.horizon);
    const auto grid = benchmark_grid(1, N, options.tau);
    rep.N = static_cast<int>(grid.size());
    rep.R = grid.box_radius();
    rep.delta_x = grid.fill_distance();
    const auto tgrid = TimeGrid::uniform(options.horizon, n);
    const auto hist = fd_solve(problem, grid, tgrid);

    Accumulator acc;
    for (Eigen::Index j = 0; j < grid.size(); ++j) {
      const Eigen::VectorXd x = grid.point(j);
      for (int i = 0; i <= n; ++i) acc.add(std::abs(hist[static_cast<std::size_t>(i)][j] - exact.value(tgrid[i], x)));
    }
    rep.max_error = acc.max;
    rep.rms_error = acc.rms();
  } catch (const std::exception& e) {
    rep.status = e.what();
    rep.max_error = kNaN;
    rep.rms_error = kNaN;
    warn("finite-difference run N=" + std::to_string(N) + " failed: " + rep.status);
  }
  const auto stop = std::chrono::steady_clock::now();
  rep.runtime_ms = options.deterministic ? 0.0 : std::chrono::duration<double, std::milli>(stop - start).count();
  return rep;
}

std::vector<ErrorReport> fd_sweep(int n, const std::vector<int>& N_list, const FdOptions& options) {
  require(!N_list.empty(), ErrorCode::invalid_argument, "N list is empty");
  std::vector<ErrorReport> out;
  for (int N : N_list) out.push_back(fd_baseline(n, N, options));
  return out;
}

// ---------------------------------------------------------------------------
// Tables

std::vector<RatioRow> ratio_table(const std::vector<ErrorReport>& rbf, const std::vector<ErrorReport>& fd) {
  using Key = std::pair<int, int>;
  auto index = [](const std::vector<ErrorReport>& reports, const char* what) {
    std::map<Key, const ErrorReport*> out;
    for (const auto& r : reports)
      if (!out.emplace(Key{r.N, r.n}, &r).second)
        fail(ErrorCode::invalid_argument, std::string("duplicate (N, n) key in ") + what + " reports");
    return out;
  };
  const auto a = index(rbf, "rbf");
  const auto b = index(fd, "fd");
  if (a.size() != b.size()) fail(ErrorCode::invalid_argument, "rbf and fd reports cover different (N, n) keys");
  std::vector<RatioRow> rows;
  for (const auto& [key, r] : a) {
    const auto it = b.find(key);
    if (it == b.end())
      fail(ErrorCode::invalid_argument, "no fd report for N=" + std::to_string(key.first) +
                                            ", n=" + std::to_string(key.second));
    rows.push_back({key.first, key.second, it->second->max_error / r->max_error, it->second->rms_error / r->rms_error});
  }
  return rows;
}

void write_reports_csv(std::ostream& os, const std::vector<ErrorReport>& reports) {
  os << "N,R,delta_x,max_error,rms_error,runtime_ms\n";
  for (const auto& r : reports) {
    os << r.N << ',' << format_double(r.R) << ',' << format_double(r.delta_x) << ',' << format_double(r.max_error)
       << ',' << format_double(r.rms_error) << ',' << format_double(r.runtime_ms) << '\n';
  }
}

std::vector<ErrorReport> read_reports_csv(std::istream& is, int n) {
  const CsvTable table = read_csv(is);
  const auto cN = table.column("N"), cR = table.column("R"), cdx = table.column("delta_x"),
             cmax = table.column("max_error"), crms = table.column("rms_error"), crt = table.column("runtime_ms");
  std::vector<ErrorReport> out;
  for (const auto& row : table.rows) {
    ErrorReport r;
    const double N = parse_double(row[cN]);
    if (N != std::floor(N) || N < 1) fail(ErrorCode::io, "N must be a positive integer, got " + row[cN]);
    r.N = static_cast<int>(N);
    r.n = n;
    r.R = parse_double(row[cR]);
    r.delta_x = parse_double(row[cdx]);
    r.max_error = parse_double(row[cmax]);
    r.rms_error = parse_double(row[crms]);
    r.runtime_ms = parse_double(row[crt]);
    out.push_back(r);
  }
  return out;
}

int steps_from_filename(const std::string& path) {
  static const std::regex pattern(R"(_n(\d+)(?:[_.]|$))");
  const auto slash = path.find_last_of('/');
  const std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  std::smatch m;
  if (!std::regex_search(name, m, pattern))
    fail(ErrorCode::invalid_argument, "cannot find '_n<steps>' in file name " + name);
  return std::stoi(m[1].str());
}

std::string reports_filename(const std::string& prefix, int d, int n) {
  return prefix + "_d" + std::to_string(d) + "_n" + std::to_string(n) + ".csv";
}

void write_ratios_csv(std::ostream& os, const std::vector<RatioRow>& rows) {
  os << "N,n,max_ratio,rms_ratio\n";
  for (const auto& r : rows)
    os << r.N << ',' << r.n << ',' << format_double(r.max_ratio) << ',' << format_double(r.rms_ratio) << '\n';
}

}  // namespace wrbf
