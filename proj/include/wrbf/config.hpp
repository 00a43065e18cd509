#pragma once

#include "wrbf/bench.hpp"

#include <optional>
#include <string>

namespace wrbf {

/// Settings of one `solve` run, read from JSON:
///
///   {
///     "dim": 1,
///     "scheme": "interp" | "regress",
///     "kernel": {"d": 1, "tau": 4, "support_scale": 1.0},
///     "grid": {"N": 65 | "N_per_axis": 8, "R": 2.5 | "paper"},
///     "time": {"T": 1.0, "n": 256},
///     "problem": "builtin:guo" | "builtin:heat"
///                | {"name": "guo", "sigma_max": 0.2, "encoding": "control" | "general"}
///                | {"name": "heat", "sigma": 0.2},
///     "regression": {"M": 0, "beta0": 10.0, "h": 1e-3}
///   }
///
/// kernel.d defaults to dim, support_scale to 1, grid.R to "paper",
/// problem to builtin:guo. Unknown keys are rejected.
struct SolveConfig {
  int dim = 1;
  Scheme scheme = Scheme::interp;
  int tau = 4;
  double support_scale = 1.0;
  /// Total point count (perfect d-th power) or points per axis; exactly one is set.
  std::optional<int> N;
  std::optional<int> N_per_axis;
  /// Empty selects paper_radius.
  std::optional<double> R;
  double T = 1.0;
  int n = 256;
  std::string problem = "guo";
  double sigma = kGuoSigmaMax;
  Encoding encoding = Encoding::control_form;
  int M = 0;
  double beta0 = 10.0;
  double h = 1e-3;
};

SolveConfig parse_solve_config(const std::string& json_text);
SolveConfig load_solve_config(const std::string& path);

struct SolveSummary {
  int N = 0;
  double R = 0.0;
  double delta_x = 0.0;
  double delta_t = 0.0;
  double runtime_ms = 0.0;
  double jitter_used = 0.0;
  double stability_number = 0.0;
};

/// Runs the configured scheme and writes history.csv (k,t,node_index,value)
/// and meta.json into out_dir. `deterministic` writes runtime_ms = 0.
SolveSummary run_solve(const SolveConfig& config, const std::string& out_dir, bool deterministic = false);

}  // namespace wrbf
