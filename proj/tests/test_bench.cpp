#include "wrbf/bench.hpp"
#include "wrbf/error.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace wrbf;

namespace {

// F with the control supremum/infimum taken over a sigma grid.
double guo_by_grid(int d, double z, const Eigen::VectorXd& p, const Eigen::MatrixXd& X, int points) {
  double sup = -1e300, inf = 1e300;
  for (int i = 0; i < points; ++i) {
    const double s = kGuoSigmaMax * i / (points - 1);
    sup = std::max(sup, 0.5 * s * s * X.trace());
    inf = std::min(inf, s * s * z);
  }
  return -sup + p.sum() / d - 0.5 * d * inf;
}

}  // namespace

TEST_CASE("benchmark nonlinearity values") {
  for (auto enc : {Encoding::control_form, Encoding::general}) {
    const auto p1 = guo_problem(1, enc);
    const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(1);
    const Eigen::MatrixXd X0 = Eigen::MatrixXd::Zero(1, 1);
    CHECK(p1.F(0.0, x0, 0.0, x0, X0) == 0.0);
    CHECK(p1.F(0.0, x0, -1.0, x0, X0) == doctest::Approx(1.0 / 50.0).epsilon(1e-15));
    CHECK(p1.F(0.0, x0, 1.0, x0, X0) == 0.0);
    CHECK(p1.F(0.0, x0, 0.0, x0, Eigen::MatrixXd::Constant(1, 1, 2.0)) == doctest::Approx(-0.04));
    CHECK(p1.F(0.0, x0, 0.0, x0, Eigen::MatrixXd::Constant(1, 1, -2.0)) == 0.0);
  }
}

TEST_CASE("closed-form control optimum matches a grid search") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int d : {1, 2}) {
    const auto prob = guo_problem(d);
    for (int s = 0; s < 100; ++s) {
      Eigen::VectorXd x(d), p(d);
      Eigen::MatrixXd X(d, d);
      for (int m = 0; m < d; ++m) {
        x[m] = u(rng);
        p[m] = u(rng);
        for (int l = 0; l < d; ++l) X(m, l) = u(rng);
      }
      const double z = u(rng);
      const double closed = prob.F(0.2, x, z, p, X);
      CHECK(std::abs(closed - guo_by_grid(d, z, p, X, 101)) <= 1e-12);
      CHECK(std::abs(closed - guo_by_grid(d, z, p, X, 1001)) <= 1e-12);
    }
  }
}

TEST_CASE("exact solutions satisfy their equations") {
  for (int d : {1, 2}) {
    CHECK(residual_check(guo_problem(d), guo_exact(d), 1000) <= 1e-10);
    CHECK(residual_check(guo_problem(d, Encoding::general), guo_exact(d), 1000) <= 1e-10);
    CHECK(residual_check(heat_problem(d, 0.4), heat_exact(d, 0.4), 500) <= 1e-10);
  }
}

TEST_CASE("residual check detects wrong solutions") {
  auto wrong = guo_exact(1);
  wrong.value = [](double t, const Eigen::VectorXd& x) { return std::cos(t + x.sum()); };
  CHECK(residual_check(guo_problem(1), wrong, 200) > 1e-3);
  CHECK(residual_check(heat_problem(1, 0.4), heat_exact(1, 0.3), 200) > 1e-4);
  CHECK(residual_check(guo_problem(2), heat_exact(2, 0.2), 200) > 1e-3);
}

TEST_CASE("zero horizon is allowed") {
  const auto p = guo_problem(1, Encoding::control_form, 0.0);
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 0.4);
  CHECK(p.terminal(x) == doctest::Approx(std::sin(0.4)));
  CHECK(residual_check(p, guo_exact(1), 50) <= 1e-10);
  BenchmarkConfig c;
  c.n = 0;
  c.horizon = 0.0;
  c.N_list = {9};
  const auto r = run_benchmark(c);
  REQUIRE(r.size() == 1);
  CHECK(r[0].ok());
  CHECK(r[0].max_error < 1.0);
}

TEST_CASE("small benchmark sweep") {
  BenchmarkConfig c;
  c.n = 32;
  c.N_list = {9, 17};
  c.deterministic = true;
  const auto r = run_benchmark(c);
  REQUIRE(r.size() == 2);
  for (const auto& e : r) {
    CHECK(e.ok());
    CHECK(e.rms_error <= e.max_error);
    CHECK(e.runtime_ms == 0.0);
    CHECK(e.tau == 4);
    CHECK(e.R == doctest::Approx(paper_radius(1, e.N, 4)));
  }
  CHECK(r[1].max_error < r[0].max_error);

  c.eval = EvalSet::nodes;
  c.scheme = Scheme::regress;
  c.N_list = {9};
  const auto g = run_benchmark(c);
  CHECK(g[0].ok());
  CHECK(g[0].scheme == "regress");
}

TEST_CASE("failing cells are recorded and the sweep continues") {
  BenchmarkConfig c;
  c.n = 4;
  c.N_list = {1, 9};
  const auto r = run_benchmark(c);
  REQUIRE(r.size() == 2);
  CHECK_FALSE(r[0].ok());
  CHECK(std::isnan(r[0].max_error));
  CHECK(r[1].ok());
  c.d = 3;
  CHECK_THROWS_AS(run_benchmark(c), Error);
}

TEST_CASE("benchmark grid sizes") {
  CHECK(benchmark_grid(1, 33, 4).size() == 33);
  const auto g = benchmark_grid(2, 50, 15);
  CHECK(g.size() == 64);
  CHECK(g.box_radius() == doctest::Approx(paper_radius(2, 64, 15)));
  CHECK(benchmark_tau(1) == 4);
  CHECK(benchmark_tau(2) == 15);
}

TEST_CASE("finite differences") {
  HjbProblem zero;
  zero.dim = 1;
  zero.horizon = 1.0;
  zero.terminal = [](const Eigen::VectorXd&) { return 0.0; };
  zero.nonlinearity = GeneralF([](double, const Eigen::VectorXd&, double, const Eigen::VectorXd&,
                                  const Eigen::MatrixXd&) { return 0.0; });
  const auto grid = tensor_grid(1, 11, 1.0);
  const auto h = fd_solve(zero, grid, TimeGrid::uniform(1.0, 5));
  for (const auto& v : h) CHECK(v.isZero(0.0));

  FdOptions heat;
  heat.problem = FdProblem::heat;
  heat.sigma = 0.3;
  heat.deterministic = true;
  const auto coarse = fd_baseline(64, 17, heat);
  const auto fine = fd_baseline(64, 65, heat);
  CHECK(coarse.ok());
  CHECK(fine.rms_error < coarse.rms_error);
  CHECK(fine.runtime_ms == 0.0);
  CHECK(fine.scheme == "fd");

  const auto sweep = fd_sweep(32, {9, 17});
  CHECK(sweep.size() == 2);
  CHECK_THROWS_AS(fd_solve(zero, tensor_grid(2, 3, 1.0), TimeGrid::uniform(1.0, 5)), Error);
}

TEST_CASE("ratio table") {
  std::vector<ErrorReport> rbf(2), fd(2);
  rbf[0].N = 17, rbf[0].n = 256, rbf[0].max_error = 0.125, rbf[0].rms_error = 0.5;
  rbf[1].N = 33, rbf[1].n = 256, rbf[1].max_error = 0.0625, rbf[1].rms_error = 0.25;
  fd[0].N = 33, fd[0].n = 256, fd[0].max_error = 0.125, fd[0].rms_error = 0.75;
  fd[1].N = 17, fd[1].n = 256, fd[1].max_error = 0.25, fd[1].rms_error = 0.5;
  const auto rows = ratio_table(rbf, fd);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].N == 17);
  CHECK(rows[0].max_ratio == doctest::Approx(2.0));
  CHECK(rows[0].rms_ratio == doctest::Approx(1.0));
  CHECK(rows[1].rms_ratio == doctest::Approx(3.0));
  std::ostringstream os;
  write_ratios_csv(os, rows);
  CHECK(os.str() == "N,n,max_ratio,rms_ratio\n17,256,2,1\n33,256,2,3\n");
  fd[1].N = 65;
  CHECK_THROWS_AS(ratio_table(rbf, fd), Error);
  fd.pop_back();
  CHECK_THROWS_AS(ratio_table(rbf, fd), Error);
}

TEST_CASE("report csv round trip") {
  std::vector<ErrorReport> in(2);
  in[0] = {9, 1.5593, 0.19, 256, 0.3, 0.063, 12.5, "interp", 4, 0.1, ""};
  in[1] = {17, 2.65, 0.1 / 3.0, 256, 6.36e-2, 1.78e-2, 0.0, "interp", 4, 0.1, ""};
  std::stringstream ss;
  write_reports_csv(ss, in);
  const auto out = read_reports_csv(ss, 256);
  REQUIRE(out.size() == 2);
  for (int i = 0; i < 2; ++i) {
    CHECK(out[i].N == in[i].N);
    CHECK(out[i].n == 256);
    CHECK(out[i].R == in[i].R);
    CHECK(out[i].delta_x == in[i].delta_x);
    CHECK(out[i].max_error == in[i].max_error);
    CHECK(out[i].rms_error == in[i].rms_error);
    CHECK(out[i].runtime_ms == in[i].runtime_ms);
  }
  std::istringstream bad("N,R\n3,1\n");
  CHECK_THROWS_AS(read_reports_csv(bad, 1), Error);
}

TEST_CASE("file names") {
  CHECK(reports_filename("errors", 1, 256) == "errors_d1_n256.csv");
  CHECK(steps_from_filename("out/errors_d1_n256.csv") == 256);
  CHECK(steps_from_filename("fd_d1_n4096.csv") == 4096);
  CHECK(steps_from_filename("a_n12_b.csv") == 12);
  CHECK(steps_from_filename("x_n7") == 7);
  CHECK_THROWS_AS(steps_from_filename("errors.csv"), Error);
  CHECK_THROWS_AS(steps_from_filename("dir_n5/errors.csv"), Error);
}

TEST_CASE("parsers") {
  CHECK(parse_scheme("regress") == Scheme::regress);
  CHECK(parse_eval_set("nodes") == EvalSet::nodes);
  CHECK_THROWS_AS(parse_scheme("fd"), Error);
  CHECK_THROWS_AS(parse_eval_set("grid"), Error);
}

TEST_CASE("residual check controls") {
  HjbProblem zero;
  zero.dim = 1;
  zero.horizon = 1.0;
  zero.terminal = [](const Eigen::VectorXd&) { return 1.0; };
  zero.nonlinearity = GeneralF([](double, const Eigen::VectorXd&, double, const Eigen::VectorXd&,
                                  const Eigen::MatrixXd&) { return 0.0; });
  ExactSolution constant;
  constant.value = [](double, const Eigen::VectorXd&) { return 1.0; };
  constant.time_derivative = [](double, const Eigen::VectorXd&) { return 0.0; };
  constant.gradient = [](double, const Eigen::VectorXd& x) { return Eigen::VectorXd::Zero(x.size()); };
  constant.hessian = [](double, const Eigen::VectorXd& x) { return Eigen::MatrixXd::Zero(x.size(), x.size()); };
  CHECK(residual_check(zero, constant, 100) == 0.0);
  CHECK(residual_check(zero, guo_exact(1), 100) > 0.1);
}

TEST_CASE("without time steps the error is the interpolation error") {
  BenchmarkConfig c;
  c.n = 0;
  c.horizon = 0.0;
  c.N_list = {17};
  const auto r = run_benchmark(c);
  const auto colloc = benchmark_grid(1, 17, 4);
  Eigen::VectorXd v(17);
  for (int j = 0; j < 17; ++j) v[j] = std::sin(colloc.points()(j, 0));
  const auto I = interpolate(GramSystem::assemble(WendlandKernel::build(1, 4), colloc), v);
  const PointSet s = sobol_points(1, 10);
  double worst = 0.0;
  for (int q = 0; q < 10; ++q) worst = std::max(worst, std::abs(I.eval(s.row(q).transpose()) - std::sin(s(q, 0))));
  CHECK(r[0].max_error == doctest::Approx(worst).epsilon(1e-12));
}

TEST_CASE("finite differences keep terminal data without a nonlinearity") {
  HjbProblem p;
  p.dim = 1;
  p.horizon = 1.0;
  p.terminal = [](const Eigen::VectorXd& x) { return std::cos(x[0]); };
  p.nonlinearity = GeneralF([](double, const Eigen::VectorXd&, double, const Eigen::VectorXd&,
                               const Eigen::MatrixXd&) { return 0.0; });
  const auto h = fd_solve(p, tensor_grid(1, 9, 1.0), TimeGrid::uniform(1.0, 6));
  for (const auto& v : h) CHECK(v == h.back());
}

TEST_CASE("ratio examples") {
  std::vector<ErrorReport> a(1), b(1);
  a[0].N = b[0].N = 65;
  a[0].n = b[0].n = 256;
  a[0].max_error = b[0].max_error = 0.3;
  a[0].rms_error = b[0].rms_error = 0.1;
  auto rows = ratio_table(a, b);
  CHECK(rows[0].max_ratio == 1.0);
  CHECK(rows[0].rms_ratio == 1.0);
  b[0].max_error = 0.6;
  b[0].rms_error = 0.2;
  rows = ratio_table(a, b);
  CHECK(rows[0].max_ratio == 2.0);
  CHECK(rows[0].rms_ratio == 2.0);
}

TEST_CASE("benchmark error drops from N=9 to N=65") {
  BenchmarkConfig c;
  c.n = 256;
  c.N_list = {9, 65};
  const auto r = run_benchmark(c);
  CHECK(r[1].max_error < r[0].max_error);
}
