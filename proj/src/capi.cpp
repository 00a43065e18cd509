#include "wrbf/wrbf.h"

#include "wrbf/bench.hpp"
#include "wrbf/config.hpp"
#include "wrbf/error.hpp"
#include "wrbf/interp.hpp"
#include "wrbf/kernel.hpp"
#include "wrbf/parallel.hpp"

#include <atomic>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <string>
#include <vector>

struct wrbf_kernel {
  wrbf::WendlandKernel kernel;
};

struct wrbf_gram {
  std::shared_ptr<const wrbf::GramSystem> gram;
};

struct wrbf_interpolant {
  wrbf::Interpolant interpolant;
};

struct wrbf_reports {
  std::vector<wrbf::ErrorReport> reports;
};

namespace {

thread_local std::string last_error;

wrbf_status status_of(wrbf::ErrorCode code) { return static_cast<wrbf_status>(static_cast<int>(code)); }

template <class Body>
wrbf_status guarded(Body&& body) {
  try {
    body();
    last_error.clear();
    return WRBF_OK;
  } catch (const wrbf::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return WRBF_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return WRBF_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return WRBF_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) wrbf::fail(wrbf::ErrorCode::invalid_argument, std::string(what) + " is NULL");
}

std::atomic<void (*)(const char*)> warning_callback{nullptr};

void forward_warning(const std::string& message) {
  if (auto cb = warning_callback.load()) cb(message.c_str());
}

Eigen::Map<const Eigen::VectorXd> vec(const double* p, Eigen::Index n) { return {p, n}; }

template <class Writer>
void write_file(const char* path, Writer&& writer) {
  std::ofstream os(path, std::ios::binary);
  if (!os) wrbf::fail(wrbf::ErrorCode::io, std::string("cannot write ") + path);
  writer(os);
  os.flush();
  if (!os) wrbf::fail(wrbf::ErrorCode::io, std::string("write error on ") + path);
}

wrbf::Rational normalized_coefficient(const wrbf::WendlandKernel& k, int j) {
  const auto& p = k.p_exact();
  if (j < 0 || j > p.degree())
    wrbf::fail(wrbf::ErrorCode::out_of_range,
               "coefficient index " + std::to_string(j) + " outside 0.." + std::to_string(p.degree()));
  return p.coeff(static_cast<std::size_t>(j)) / p.coeff(0);
}

}  // namespace

extern "C" {

const char* wrbf_version(void) { return "0.1.0"; }

const char* wrbf_last_error(void) { return last_error.c_str(); }

const char* wrbf_status_name(wrbf_status status) {
  if (status == WRBF_OK) return "ok";
  if (status < WRBF_INVALID_ARGUMENT || status > WRBF_INTERNAL) return "unknown";
  return wrbf::to_string(static_cast<wrbf::ErrorCode>(static_cast<int>(status)));
}

wrbf_status wrbf_set_num_threads(int threads) {
  return guarded([&] { wrbf::set_num_threads(threads); });
}

void wrbf_set_warning_callback(void (*callback)(const char* message)) {
  warning_callback.store(callback);
  wrbf::set_warning_handler(callback ? &forward_warning : nullptr);
}

wrbf_status wrbf_kernel_create(int d, int tau, double support_scale, wrbf_kernel** out) {
  return guarded([&] {
    need(out, "out");
    *out = new wrbf_kernel{wrbf::WendlandKernel::build(d, tau, support_scale)};
  });
}

void wrbf_kernel_destroy(wrbf_kernel* kernel) { delete kernel; }

wrbf_status wrbf_kernel_info(const wrbf_kernel* kernel, int* d, int* tau, int* nu, int* degree) {
  return guarded([&] {
    need(kernel, "kernel");
    if (d) *d = kernel->kernel.d();
    if (tau) *tau = kernel->kernel.tau();
    if (nu) *nu = kernel->kernel.nu();
    if (degree) *degree = kernel->kernel.degree();
  });
}

wrbf_status wrbf_kernel_eval(const wrbf_kernel* kernel, int order, double r, double* out) {
  return guarded([&] {
    need(kernel, "kernel");
    need(out, "out");
    switch (order) {
      case 0: *out = kernel->kernel.phi(r); break;
      case 1: *out = kernel->kernel.phi1(r); break;
      case 2: *out = kernel->kernel.phi2(r); break;
      default: wrbf::fail(wrbf::ErrorCode::invalid_argument, "order must be 0, 1 or 2");
    }
  });
}

wrbf_status wrbf_kernel_coefficient(const wrbf_kernel* kernel, int j, double* out) {
  return guarded([&] {
    need(kernel, "kernel");
    need(out, "out");
    *out = static_cast<double>(normalized_coefficient(kernel->kernel, j));
  });
}

wrbf_status wrbf_kernel_coefficient_string(const wrbf_kernel* kernel, int j, char* buffer, size_t size,
                                           size_t* needed) {
  return guarded([&] {
    need(kernel, "kernel");
    const std::string s = wrbf::to_string(normalized_coefficient(kernel->kernel, j));
    if (needed) *needed = s.size() + 1;
    if (buffer && size > 0) {
      const std::size_t n = std::min(size - 1, s.size());
      std::memcpy(buffer, s.data(), n);
      buffer[n] = '\0';
    }
  });
}

wrbf_status wrbf_kernel_gradient(const wrbf_kernel* kernel, const double* x, double* out) {
  return guarded([&] {
    need(kernel, "kernel");
    need(x, "x");
    need(out, "out");
    const int d = kernel->kernel.d();
    Eigen::Map<Eigen::VectorXd>(out, d) = kernel->kernel.gradient(vec(x, d));
  });
}

wrbf_status wrbf_kernel_hessian(const wrbf_kernel* kernel, const double* x, double* out) {
  return guarded([&] {
    need(kernel, "kernel");
    need(x, "x");
    need(out, "out");
    const int d = kernel->kernel.d();
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(out, d, d) =
        kernel->kernel.hessian(vec(x, d));
  });
}

wrbf_status wrbf_gram_create(const wrbf_kernel* kernel, const double* points, size_t count, double box_radius,
                             int sparse, wrbf_gram** out) {
  return guarded([&] {
    need(kernel, "kernel");
    need(points, "points");
    need(out, "out");
    const int d = kernel->kernel.d();
    wrbf::PointSet pts = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        points, static_cast<Eigen::Index>(count), d);
    wrbf::AssemblyOptions opts;
    opts.storage = sparse ? wrbf::Storage::sparse : wrbf::Storage::dense;
    auto gs = wrbf::GramSystem::assemble(kernel->kernel, wrbf::CollocationSet(std::move(pts), box_radius), opts);
    *out = new wrbf_gram{std::move(gs)};
  });
}

void wrbf_gram_destroy(wrbf_gram* gram) { delete gram; }

wrbf_status wrbf_gram_info(const wrbf_gram* gram, size_t* count, double* fill_distance, double* jitter) {
  return guarded([&] {
    need(gram, "gram");
    if (count) *count = static_cast<size_t>(gram->gram->size());
    if (fill_distance) *fill_distance = gram->gram->colloc().fill_distance();
    if (jitter) *jitter = gram->gram->jitter();
  });
}

wrbf_status wrbf_interpolate(const wrbf_gram* gram, const double* values, wrbf_interpolant** out) {
  return guarded([&] {
    need(gram, "gram");
    need(values, "values");
    need(out, "out");
    *out = new wrbf_interpolant{wrbf::interpolate(gram->gram, vec(values, gram->gram->size()))};
  });
}

void wrbf_interpolant_destroy(wrbf_interpolant* interpolant) { delete interpolant; }

wrbf_status wrbf_interpolant_eval(const wrbf_interpolant* interpolant, const double* x, double* value, double* grad,
                                  double* hess) {
  return guarded([&] {
    need(interpolant, "interpolant");
    need(x, "x");
    const auto& ip = interpolant->interpolant;
    const int d = ip.gram().dim();
    const auto xv = vec(x, d);
    if (value) *value = ip.eval(xv);
    if (grad) Eigen::Map<Eigen::VectorXd>(grad, d) = ip.eval_grad(xv);
    if (hess)
      Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(hess, d, d) =
          ip.eval_hess(xv);
  });
}

wrbf_status wrbf_solve_config(const char* config_path, const char* out_dir, int deterministic,
                              wrbf_solve_summary* summary) {
  return guarded([&] {
    need(config_path, "config_path");
    need(out_dir, "out_dir");
    const auto s = wrbf::run_solve(wrbf::load_solve_config(config_path), out_dir, deterministic != 0);
    if (summary) *summary = {s.N, s.R, s.delta_x, s.delta_t, s.runtime_ms, s.jitter_used, s.stability_number};
  });
}

void wrbf_bench_options_init(wrbf_bench_options* options) {
  if (!options) return;
  *options = wrbf_bench_options{};
  options->d = 1;
  options->n = 256;
  options->scheme = "interp";
  options->eval = "sobol";
  options->support_scale = 1.0;
  options->beta0 = 10.0;
  options->h = 1e-3;
}

wrbf_status wrbf_bench_run(const wrbf_bench_options* options, wrbf_reports** out) {
  return guarded([&] {
    need(options, "options");
    need(out, "out");
    need(options->N_list, "N_list");
    wrbf::BenchmarkConfig cfg;
    cfg.d = options->d;
    cfg.n = options->n;
    cfg.N_list.assign(options->N_list, options->N_list + options->N_count);
    cfg.scheme = wrbf::parse_scheme(options->scheme ? options->scheme : "interp");
    cfg.eval = wrbf::parse_eval_set(options->eval ? options->eval : "sobol");
    cfg.eval_count = options->eval_count;
    cfg.tau = options->tau;
    cfg.support_scale = options->support_scale;
    cfg.beta0 = options->beta0;
    cfg.h = options->h;
    cfg.M = options->M;
    cfg.deterministic = options->deterministic != 0;
    *out = new wrbf_reports{wrbf::run_benchmark(cfg)};
  });
}

wrbf_status wrbf_bench_fd(int n, const int* N_list, size_t N_count, int deterministic, wrbf_reports** out) {
  return guarded([&] {
    need(N_list, "N_list");
    need(out, "out");
    wrbf::FdOptions opts;
    opts.deterministic = deterministic != 0;
    *out = new wrbf_reports{wrbf::fd_sweep(n, std::vector<int>(N_list, N_list + N_count), opts)};
  });
}

wrbf_status wrbf_residual_check(int d, int samples, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = wrbf::residual_check(wrbf::guo_problem(d), wrbf::guo_exact(d), samples);
  });
}

size_t wrbf_reports_count(const wrbf_reports* reports) { return reports ? reports->reports.size() : 0; }

wrbf_status wrbf_reports_get(const wrbf_reports* reports, size_t index, wrbf_report* out) {
  return guarded([&] {
    need(reports, "reports");
    need(out, "out");
    if (index >= reports->reports.size())
      wrbf::fail(wrbf::ErrorCode::out_of_range, "report index " + std::to_string(index) + " out of range");
    const auto& r = reports->reports[index];
    *out = {r.N, r.n, r.R, r.delta_x, r.max_error, r.rms_error, r.runtime_ms, r.tau,
            r.ok() ? nullptr : r.status.c_str()};
  });
}

wrbf_status wrbf_reports_read_csv(const char* path, wrbf_reports** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    const int n = wrbf::steps_from_filename(path);
    std::ifstream in(path, std::ios::binary);
    if (!in) wrbf::fail(wrbf::ErrorCode::io, std::string("cannot open ") + path);
    *out = new wrbf_reports{wrbf::read_reports_csv(in, n)};
  });
}

wrbf_status wrbf_reports_write_csv(const wrbf_reports* reports, const char* path) {
  return guarded([&] {
    need(reports, "reports");
    need(path, "path");
    write_file(path, [&](std::ostream& os) { wrbf::write_reports_csv(os, reports->reports); });
  });
}

void wrbf_reports_destroy(wrbf_reports* reports) { delete reports; }

wrbf_status wrbf_ratios_write_csv(const wrbf_reports* rbf, const wrbf_reports* fd, const char* path) {
  return guarded([&] {
    need(rbf, "rbf");
    need(fd, "fd");
    need(path, "path");
    const auto rows = wrbf::ratio_table(rbf->reports, fd->reports);
    write_file(path, [&](std::ostream& os) { wrbf::write_ratios_csv(os, rows); });
  });
}

}  // extern "C"
