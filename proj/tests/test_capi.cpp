#include <wrbf/wrbf.h>

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

std::vector<std::string> g_warnings;
void collect(const char* msg) { g_warnings.emplace_back(msg); }

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::strlen(wrbf_version()) > 0);
  CHECK(std::string(wrbf_status_name(WRBF_OK)) == "ok");
  CHECK(std::string(wrbf_status_name(WRBF_NOT_CONVERGED)).size() > 0);
  CHECK(wrbf_set_num_threads(0) == WRBF_INVALID_ARGUMENT);
  CHECK(std::strlen(wrbf_last_error()) > 0);
  CHECK(wrbf_set_num_threads(2) == WRBF_OK);
  CHECK(std::string(wrbf_last_error()).empty());
  CHECK(wrbf_set_num_threads(1) == WRBF_OK);
}

TEST_CASE("kernel handle") {
  wrbf_kernel* k = nullptr;
  REQUIRE(wrbf_kernel_create(1, 4, 1.0, &k) == WRBF_OK);
  int d, tau, nu, deg;
  CHECK(wrbf_kernel_info(k, &d, &tau, &nu, &deg) == WRBF_OK);
  CHECK(nu == 5);
  CHECK(deg == 13);
  double c = 0;
  CHECK(wrbf_kernel_coefficient(k, 2, &c) == WRBF_OK);
  CHECK(c == doctest::Approx(-78.0 / 7.0));
  char buf[4];
  size_t needed = 0;
  CHECK(wrbf_kernel_coefficient_string(k, 2, buf, sizeof buf, &needed) == WRBF_OK);
  CHECK(needed == 6);
  CHECK(std::string(buf) == "-78");
  char full[16];
  CHECK(wrbf_kernel_coefficient_string(k, 2, full, sizeof full, nullptr) == WRBF_OK);
  CHECK(std::string(full) == "-78/7");
  CHECK(wrbf_kernel_coefficient(k, 14, &c) == WRBF_OUT_OF_RANGE);
  double v = 0;
  CHECK(wrbf_kernel_eval(k, 0, 0.0, &v) == WRBF_OK);
  CHECK(v == doctest::Approx(1.0));
  CHECK(wrbf_kernel_eval(k, 3, 0.0, &v) == WRBF_INVALID_ARGUMENT);
  const double x = 0.3;
  double g = 0, h = 0;
  CHECK(wrbf_kernel_gradient(k, &x, &g) == WRBF_OK);
  CHECK(wrbf_kernel_hessian(k, &x, &h) == WRBF_OK);
  double p1 = 0;
  wrbf_kernel_eval(k, 1, 0.3, &p1);
  CHECK(g == doctest::Approx(0.3 * p1));
  wrbf_kernel_destroy(k);
  wrbf_kernel_destroy(nullptr);

  CHECK(wrbf_kernel_create(1, 40, 1.0, &k) == WRBF_OUT_OF_RANGE);
  CHECK(wrbf_kernel_create(0, 4, 1.0, &k) == WRBF_INVALID_ARGUMENT);
  CHECK(wrbf_kernel_create(1, 4, 1.0, nullptr) == WRBF_INVALID_ARGUMENT);
}

TEST_CASE("gram and interpolant handles") {
  wrbf_kernel* k = nullptr;
  REQUIRE(wrbf_kernel_create(2, 3, 1.5, &k) == WRBF_OK);
  std::vector<double> pts, vals;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const double x = -0.8 + 0.4 * i, y = -0.8 + 0.4 * j;
      pts.push_back(x);
      pts.push_back(y);
      vals.push_back(std::sin(x + y));
    }
  for (int sparse : {0, 1}) {
    wrbf_gram* gs = nullptr;
    REQUIRE(wrbf_gram_create(k, pts.data(), 25, 1.0, sparse, &gs) == WRBF_OK);
    size_t n = 0;
    double fill = 0, jitter = -1;
    CHECK(wrbf_gram_info(gs, &n, &fill, &jitter) == WRBF_OK);
    CHECK(n == 25);
    CHECK(jitter == 0.0);
    wrbf_interpolant* I = nullptr;
    REQUIRE(wrbf_interpolate(gs, vals.data(), &I) == WRBF_OK);
    double v = 0, grad[2], hess[4];
    CHECK(wrbf_interpolant_eval(I, &pts[14], &v, grad, hess) == WRBF_OK);
    CHECK(v == doctest::Approx(vals[7]).epsilon(1e-10));
    CHECK(hess[1] == doctest::Approx(hess[2]));
    CHECK(wrbf_interpolant_eval(I, &pts[0], &v, nullptr, nullptr) == WRBF_OK);
    wrbf_interpolant_destroy(I);
    wrbf_gram_destroy(gs);
  }
  std::vector<double> dup = {0.1, 0.1, 0.1, 0.1};
  wrbf_gram* gs = nullptr;
  CHECK(wrbf_gram_create(k, dup.data(), 2, 1.0, 0, &gs) == WRBF_INVALID_ARGUMENT);
  CHECK(std::string(wrbf_last_error()).find("collocation") != std::string::npos);
  CHECK(wrbf_gram_create(k, pts.data(), 25, 0.5, 0, &gs) == WRBF_OUT_OF_RANGE);
  wrbf_kernel_destroy(k);
}

TEST_CASE("benchmark through the C interface") {
  double res = 1;
  CHECK(wrbf_residual_check(1, 1000, &res) == WRBF_OK);
  CHECK(res <= 1e-10);
  CHECK(wrbf_residual_check(3, 10, &res) == WRBF_INVALID_ARGUMENT);

  const int Ns[] = {9, 17};
  wrbf_bench_options o;
  wrbf_bench_options_init(&o);
  CHECK(o.d == 1);
  CHECK(o.support_scale == 1.0);
  o.n = 16;
  o.N_list = Ns;
  o.N_count = 2;
  o.deterministic = 1;
  wrbf_reports* rbf = nullptr;
  REQUIRE(wrbf_bench_run(&o, &rbf) == WRBF_OK);
  REQUIRE(wrbf_reports_count(rbf) == 2);
  wrbf_report r;
  CHECK(wrbf_reports_get(rbf, 1, &r) == WRBF_OK);
  CHECK(r.N == 17);
  CHECK(r.n == 16);
  CHECK(r.failure == nullptr);
  CHECK(r.runtime_ms == 0.0);
  CHECK(wrbf_reports_get(rbf, 2, &r) == WRBF_OUT_OF_RANGE);

  wrbf_reports* fd = nullptr;
  REQUIRE(wrbf_bench_fd(16, Ns, 2, 1, &fd) == WRBF_OK);
  const auto dir = fs::temp_directory_path() / "wrbf_capi";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto rbf_path = (dir / "errors_d1_n16.csv").string();
  CHECK(wrbf_reports_write_csv(rbf, rbf_path.c_str()) == WRBF_OK);
  wrbf_reports* back = nullptr;
  REQUIRE(wrbf_reports_read_csv(rbf_path.c_str(), &back) == WRBF_OK);
  wrbf_report b;
  wrbf_reports_get(back, 1, &b);
  CHECK(b.n == 16);
  CHECK(b.max_error == r.max_error);
  const auto ratio_path = (dir / "ratios.csv").string();
  CHECK(wrbf_ratios_write_csv(back, fd, ratio_path.c_str()) == WRBF_OK);
  CHECK(fs::file_size(ratio_path) > 0);
  CHECK(wrbf_reports_read_csv((dir / "missing_n3.csv").string().c_str(), &back) == WRBF_IO);
  wrbf_reports_destroy(back);
  wrbf_reports_destroy(rbf);
  wrbf_reports_destroy(fd);

  const int bad[] = {1};
  o.N_list = bad;
  o.N_count = 1;
  REQUIRE(wrbf_bench_run(&o, &rbf) == WRBF_OK);
  wrbf_reports_get(rbf, 0, &r);
  CHECK(r.failure != nullptr);
  CHECK(std::isnan(r.max_error));
  wrbf_reports_destroy(rbf);
  o.scheme = "spectral";
  CHECK(wrbf_bench_run(&o, &rbf) == WRBF_INVALID_ARGUMENT);
  fs::remove_all(dir);
}

TEST_CASE("solve config and warnings") {
  const auto dir = fs::temp_directory_path() / "wrbf_capi_solve";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto cfg = (dir / "config.json").string();
  {
    std::ofstream out(cfg);
    out << R"({"dim": 1, "kernel": {"tau": 4}, "grid": {"N": 9}, "time": {"T": 1, "n": 4}})";
  }
  wrbf_solve_summary s;
  CHECK(wrbf_solve_config(cfg.c_str(), (dir / "out").string().c_str(), 1, &s) == WRBF_OK);
  CHECK(s.N == 9);
  CHECK(fs::exists(dir / "out" / "history.csv"));
  CHECK(wrbf_solve_config((dir / "none.json").string().c_str(), dir.string().c_str(), 1, nullptr) == WRBF_IO);

  wrbf_set_warning_callback(collect);
  const int Ns[] = {1};
  wrbf_bench_options o;
  wrbf_bench_options_init(&o);
  o.n = 2;
  o.N_list = Ns;
  o.N_count = 1;
  wrbf_reports* r = nullptr;
  CHECK(wrbf_bench_run(&o, &r) == WRBF_OK);
  wrbf_reports_destroy(r);
  wrbf_set_warning_callback(nullptr);
  CHECK_FALSE(g_warnings.empty());
  fs::remove_all(dir);
}
