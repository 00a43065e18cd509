/* C interface of the wrbf library. All functions return a status code;
 * on failure wrbf_last_error() describes the cause for the calling thread.
 * Handles are opaque and must be released with the matching destroy call.
 * Points are passed row-major, one point of d coordinates after another. */
#ifndef WRBF_H
#define WRBF_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(WRBF_BUILDING_LIBRARY)
#    define WRBF_API __declspec(dllexport)
#  else
#    define WRBF_API __declspec(dllimport)
#  endif
#else
#  define WRBF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wrbf_status {
  WRBF_OK = 0,
  WRBF_INVALID_ARGUMENT = 1,
  WRBF_DIMENSION_MISMATCH = 2,
  WRBF_OUT_OF_RANGE = 3,
  WRBF_FACTORIZATION_FAILED = 4,
  WRBF_NOT_CONVERGED = 5,
  WRBF_NUMERICAL = 6,
  WRBF_IO = 7,
  WRBF_INTERNAL = 8
} wrbf_status;

WRBF_API const char* wrbf_version(void);
/* Message of the last failed call on this thread ("" if none). */
WRBF_API const char* wrbf_last_error(void);
WRBF_API const char* wrbf_status_name(wrbf_status status);
WRBF_API wrbf_status wrbf_set_num_threads(int threads);
/* NULL restores the default (stderr). */
WRBF_API void wrbf_set_warning_callback(void (*callback)(const char* message));

/* Kernels */

typedef struct wrbf_kernel wrbf_kernel;

WRBF_API wrbf_status wrbf_kernel_create(int d, int tau, double support_scale, wrbf_kernel** out);
WRBF_API void wrbf_kernel_destroy(wrbf_kernel* kernel);
WRBF_API wrbf_status wrbf_kernel_info(const wrbf_kernel* kernel, int* d, int* tau, int* nu, int* degree);
/* order 0: phi, 1: phi1 = phi'/r, 2: phi2 = phi1'/r. */
WRBF_API wrbf_status wrbf_kernel_eval(const wrbf_kernel* kernel, int order, double r, double* out);
/* Coefficient j of the polynomial normalized to phi(0) = 1, unscaled variable. */
WRBF_API wrbf_status wrbf_kernel_coefficient(const wrbf_kernel* kernel, int j, double* out);
/* Same coefficient as an exact fraction "p/q". Writes at most `size` bytes
 * including the terminator; `needed` (optional) receives the full length + 1. */
WRBF_API wrbf_status wrbf_kernel_coefficient_string(const wrbf_kernel* kernel, int j, char* buffer, size_t size,
                                                    size_t* needed);
WRBF_API wrbf_status wrbf_kernel_gradient(const wrbf_kernel* kernel, const double* x, double* out);
/* d x d, row-major. */
WRBF_API wrbf_status wrbf_kernel_hessian(const wrbf_kernel* kernel, const double* x, double* out);

/* Gram systems and interpolants */

typedef struct wrbf_gram wrbf_gram;
typedef struct wrbf_interpolant wrbf_interpolant;

WRBF_API wrbf_status wrbf_gram_create(const wrbf_kernel* kernel, const double* points, size_t count,
                                      double box_radius, int sparse, wrbf_gram** out);
WRBF_API void wrbf_gram_destroy(wrbf_gram* gram);
WRBF_API wrbf_status wrbf_gram_info(const wrbf_gram* gram, size_t* count, double* fill_distance, double* jitter);

WRBF_API wrbf_status wrbf_interpolate(const wrbf_gram* gram, const double* values, wrbf_interpolant** out);
WRBF_API void wrbf_interpolant_destroy(wrbf_interpolant* interpolant);
/* grad (d entries) and hess (d x d row-major) may be NULL. */
WRBF_API wrbf_status wrbf_interpolant_eval(const wrbf_interpolant* interpolant, const double* x, double* value,
                                           double* grad, double* hess);

/* Solver */

typedef struct wrbf_solve_summary {
  int N;
  double R;
  double delta_x;
  double delta_t;
  double runtime_ms;
  double jitter_used;
  double stability_number;
} wrbf_solve_summary;

/* Runs a JSON config and writes history.csv and meta.json into out_dir.
 * summary may be NULL. */
WRBF_API wrbf_status wrbf_solve_config(const char* config_path, const char* out_dir, int deterministic,
                                       wrbf_solve_summary* summary);

/* Benchmarks */

typedef struct wrbf_reports wrbf_reports;

typedef struct wrbf_report {
  int N;
  int n;
  double R;
  double delta_x;
  double max_error;
  double rms_error;
  double runtime_ms;
  int tau;
  /* NULL on success, else the failure message (valid until destroy). */
  const char* failure;
} wrbf_report;

typedef struct wrbf_bench_options {
  int d;
  int n;
  const int* N_list;
  size_t N_count;
  const char* scheme; /* "interp" or "regress" */
  const char* eval;   /* "sobol" or "nodes" */
  int eval_count;     /* 0: 10^d */
  int tau;            /* 0: 4 for d = 1, 15 for d = 2 */
  double support_scale; /* kernel support radius, 1 by default */
  double beta0;
  double h;
  int M; /* 0: all nodes */
  int deterministic;
} wrbf_bench_options;

WRBF_API void wrbf_bench_options_init(wrbf_bench_options* options);
WRBF_API wrbf_status wrbf_bench_run(const wrbf_bench_options* options, wrbf_reports** out);
/* One-dimensional finite-difference baseline on the benchmark grids. */
WRBF_API wrbf_status wrbf_bench_fd(int n, const int* N_list, size_t N_count, int deterministic, wrbf_reports** out);
/* Largest PDE residual of the benchmark problem over `samples` points. */
WRBF_API wrbf_status wrbf_residual_check(int d, int samples, double* out);

WRBF_API size_t wrbf_reports_count(const wrbf_reports* reports);
WRBF_API wrbf_status wrbf_reports_get(const wrbf_reports* reports, size_t index, wrbf_report* out);
/* n is taken from the "_n<steps>" part of the file name. */
WRBF_API wrbf_status wrbf_reports_read_csv(const char* path, wrbf_reports** out);
WRBF_API wrbf_status wrbf_reports_write_csv(const wrbf_reports* reports, const char* path);
WRBF_API void wrbf_reports_destroy(wrbf_reports* reports);
WRBF_API wrbf_status wrbf_ratios_write_csv(const wrbf_reports* rbf, const wrbf_reports* fd, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* WRBF_H */
