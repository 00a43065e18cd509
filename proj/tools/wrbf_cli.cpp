// Command-line front end over the C interface.
#include <wrbf/wrbf.h>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace {

struct Failure {
  int code;
};

void check(wrbf_status status) {
  if (status != WRBF_OK) {
    std::fprintf(stderr, "wrbf: %s: %s\n", wrbf_status_name(status), wrbf_last_error());
    throw Failure{1};
  }
}

struct Reports {
  wrbf_reports* ptr = nullptr;
  ~Reports() { wrbf_reports_destroy(ptr); }
};

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void print_reports(const wrbf_reports* reports) {
  std::printf("%8s %12s %12s %14s %14s %12s\n", "N", "R", "delta_x", "max_error", "rms_error", "runtime_ms");
  for (size_t i = 0; i < wrbf_reports_count(reports); ++i) {
    wrbf_report r;
    check(wrbf_reports_get(reports, i, &r));
    if (r.failure)
      std::printf("%8d  failed: %s\n", r.N, r.failure);
    else
      std::printf("%8d %12.6g %12.6g %14.6e %14.6e %12.1f\n", r.N, r.R, r.delta_x, r.max_error, r.rms_error,
                  r.runtime_ms);
  }
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    std::fprintf(stderr, "wrbf: cannot create %s: %s\n", dir.c_str(), ec.message().c_str());
    throw Failure{1};
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wendland RBF collocation and regression schemes for HJB terminal-value problems"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "Worker threads for parallel loops")->check(CLI::PositiveNumber);

  // kernel
  auto* kernel = app.add_subcommand("kernel", "Print Wendland kernel coefficients and values");
  int kd = 1, ktau = 2;
  std::vector<double> kr;
  kernel->add_option("--d", kd, "Space dimension")->required();
  kernel->add_option("--tau", ktau, "Smoothness parameter")->required();
  kernel->add_option("--eval", kr, "Radii at which to print phi, phi1, phi2");

  // solve
  auto* solve = app.add_subcommand("solve", "Run a scheme from a JSON config");
  std::string config_path, solve_out = ".";
  bool solve_det = false;
  solve->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
  solve->add_option("--out", solve_out, "Output directory for history.csv and meta.json");
  solve->add_flag("--deterministic", solve_det, "Write runtime_ms = 0");

  // bench
  auto* bench = app.add_subcommand("bench", "Error sweep over N for the benchmark problem");
  int bd = 1, bn = 256, eval_count = 0, btau = 0, bM = 0;
  std::vector<int> bN;
  std::string scheme = "interp", eval = "sobol", bench_out = ".";
  double beta0 = 10.0, bh = 1e-3, bscale = 1.0;
  bool bench_det = false;
  bench->add_option("--d", bd, "Space dimension (1 or 2)")->check(CLI::IsMember({1, 2}));
  bench->add_option("--n", bn, "Number of time steps")->check(CLI::NonNegativeNumber);
  bench->add_option("--N-list", bN, "Collocation point counts, comma separated")->required()->delimiter(',');
  bench->add_option("--scheme", scheme, "interp or regress")->check(CLI::IsMember({"interp", "regress"}));
  bench->add_option("--eval", eval, "Evaluation set: sobol or nodes")->check(CLI::IsMember({"sobol", "nodes"}));
  bench->add_option("--eval-count", eval_count, "Number of Sobol points (default 10^d)");
  bench->add_option("--tau", btau, "Kernel smoothness (default 4 for d=1, 15 for d=2)");
  bench->add_option("--support-scale", bscale, "Kernel support radius")->check(CLI::PositiveNumber);
  bench->add_option("--beta0", beta0, "Regression budget scale");
  bench->add_option("--tolerance", bh, "Regression tolerance h (each fit certifies a gap <= h^2)");
  bench->add_option("--M", bM, "Regression centers (default N)");
  bench->add_option("--out", bench_out, "Output directory");
  bench->add_flag("--deterministic", bench_det, "Write runtime_ms = 0");

  // bench-fd
  auto* bench_fd = app.add_subcommand("bench-fd", "Finite-difference baseline sweep (d = 1)");
  int fn = 256;
  std::vector<int> fN;
  std::string fd_out = ".";
  bool fd_det = false;
  bench_fd->add_option("--n", fn, "Number of time steps")->check(CLI::NonNegativeNumber);
  bench_fd->add_option("--N-list", fN, "Grid point counts, comma separated")->required()->delimiter(',');
  bench_fd->add_option("--out", fd_out, "Output directory");
  bench_fd->add_flag("--deterministic", fd_det, "Write runtime_ms = 0");

  // ratios
  auto* ratios = app.add_subcommand("ratios", "FD / RBF error ratios per (N, n)");
  std::string rbf_path, fd_path, ratio_out = "ratios.csv";
  ratios->add_option("--rbf", rbf_path, "RBF errors CSV (errors_d1_n<steps>.csv)")->required()->check(CLI::ExistingFile);
  ratios->add_option("--fd", fd_path, "FD errors CSV (fd_d1_n<steps>.csv)")->required()->check(CLI::ExistingFile);
  ratios->add_option("--out", ratio_out, "Output CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    check(wrbf_set_num_threads(threads));

    if (*kernel) {
      wrbf_kernel* k = nullptr;
      check(wrbf_kernel_create(kd, ktau, 1.0, &k));
      std::unique_ptr<wrbf_kernel, void (*)(wrbf_kernel*)> guard(k, wrbf_kernel_destroy);
      int nu = 0, degree = 0;
      check(wrbf_kernel_info(k, nullptr, nullptr, &nu, &degree));
      std::printf("d=%d tau=%d nu=%d degree=%d\n", kd, ktau, nu, degree);
      std::printf("j,coefficient,exact\n");
      for (int j = 0; j <= degree; ++j) {
        double c = 0.0;
        size_t needed = 0;
        check(wrbf_kernel_coefficient(k, j, &c));
        check(wrbf_kernel_coefficient_string(k, j, nullptr, 0, &needed));
        std::string exact(needed, '\0');
        check(wrbf_kernel_coefficient_string(k, j, exact.data(), exact.size(), nullptr));
        exact.resize(needed - 1);
        std::printf("%d,%.17g,%s\n", j, c, exact.c_str());
      }
      if (!kr.empty()) {
        std::printf("r,phi,phi1,phi2\n");
        for (double r : kr) {
          double v[3];
          check(wrbf_kernel_eval(k, 0, r, &v[0]));
          std::printf("%.17g,%.17g", r, v[0]);
          for (int order = 1; order <= 2; ++order) {
            if (wrbf_kernel_eval(k, order, r, &v[order]) == WRBF_OK)
              std::printf(",%.17g", v[order]);
            else
              std::printf(",");
          }
          std::printf("\n");
        }
      }
    } else if (*solve) {
      wrbf_solve_summary s;
      check(wrbf_solve_config(config_path.c_str(), solve_out.c_str(), solve_det ? 1 : 0, &s));
      std::printf("N=%d R=%.6g delta_x=%.6g delta_t=%.6g jitter=%.3g stability=%.3g runtime_ms=%.1f\n", s.N, s.R,
                  s.delta_x, s.delta_t, s.jitter_used, s.stability_number, s.runtime_ms);
      std::printf("wrote %s and %s\n", join(solve_out, "history.csv").c_str(), join(solve_out, "meta.json").c_str());
    } else if (*bench) {
      wrbf_bench_options opts;
      wrbf_bench_options_init(&opts);
      opts.d = bd;
      opts.n = bn;
      opts.N_list = bN.data();
      opts.N_count = bN.size();
      opts.scheme = scheme.c_str();
      opts.eval = eval.c_str();
      opts.eval_count = eval_count;
      opts.tau = btau;
      opts.support_scale = bscale;
      opts.beta0 = beta0;
      opts.h = bh;
      opts.M = bM;
      opts.deterministic = bench_det ? 1 : 0;
      Reports reports;
      check(wrbf_bench_run(&opts, &reports.ptr));
      ensure_dir(bench_out);
      const std::string path = join(bench_out, "errors_d" + std::to_string(bd) + "_n" + std::to_string(bn) + ".csv");
      check(wrbf_reports_write_csv(reports.ptr, path.c_str()));
      print_reports(reports.ptr);
      std::printf("wrote %s\n", path.c_str());
    } else if (*bench_fd) {
      Reports reports;
      check(wrbf_bench_fd(fn, fN.data(), fN.size(), fd_det ? 1 : 0, &reports.ptr));
      ensure_dir(fd_out);
      const std::string path = join(fd_out, "fd_d1_n" + std::to_string(fn) + ".csv");
      check(wrbf_reports_write_csv(reports.ptr, path.c_str()));
      print_reports(reports.ptr);
      std::printf("wrote %s\n", path.c_str());
    } else if (*ratios) {
      Reports rbf, fd;
      check(wrbf_reports_read_csv(rbf_path.c_str(), &rbf.ptr));
      check(wrbf_reports_read_csv(fd_path.c_str(), &fd.ptr));
      check(wrbf_ratios_write_csv(rbf.ptr, fd.ptr, ratio_out.c_str()));
      std::printf("wrote %s\n", ratio_out.c_str());
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return 0;
}
