#include "wrbf/config.hpp"

#include "wrbf/csv.hpp"
#include "wrbf/error.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace wrbf {

using json = nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key)) fail(ErrorCode::invalid_argument, "unknown key '" + key + "' in " + where);
  }
}

const json& object_at(const json& root, const char* key) {
  if (!root.contains(key)) fail(ErrorCode::invalid_argument, std::string("config is missing '") + key + "'");
  const json& v = root.at(key);
  if (!v.is_object()) fail(ErrorCode::invalid_argument, std::string("'") + key + "' must be an object");
  return v;
}

template <class T>
T get(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    fail(ErrorCode::invalid_argument, std::string("'") + key + "' in " + where + " is missing or has the wrong type");
  }
}

void parse_problem(const json& p, SolveConfig& cfg) {
  if (p.is_string()) {
    const auto name = p.get<std::string>();
    if (name == "builtin:guo") cfg.problem = "guo";
    else if (name == "builtin:heat") cfg.problem = "heat";
    else fail(ErrorCode::invalid_argument, "unknown problem '" + name + "'");
    return;
  }
  if (!p.is_object()) fail(ErrorCode::invalid_argument, "'problem' must be a string or an object");
  reject_unknown(p, {"name", "sigma", "sigma_max", "encoding"}, "problem");
  cfg.problem = get<std::string>(p, "name", "problem");
  if (cfg.problem != "guo" && cfg.problem != "heat")
    fail(ErrorCode::invalid_argument, "unknown problem name '" + cfg.problem + "'");
  if (p.contains("sigma")) cfg.sigma = get<double>(p, "sigma", "problem");
  if (p.contains("sigma_max")) cfg.sigma = get<double>(p, "sigma_max", "problem");
  if (p.contains("encoding")) {
    const auto enc = get<std::string>(p, "encoding", "problem");
    if (enc == "control") cfg.encoding = Encoding::control_form;
    else if (enc == "general") cfg.encoding = Encoding::general;
    else fail(ErrorCode::invalid_argument, "encoding must be 'control' or 'general'");
  }
}

}  // namespace

SolveConfig parse_solve_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::invalid_argument, std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) fail(ErrorCode::invalid_argument, "config must be a JSON object");
  reject_unknown(root, {"dim", "scheme", "kernel", "grid", "time", "problem", "regression"}, "config");

  SolveConfig cfg;
  cfg.dim = get<int>(root, "dim", "config");
  if (root.contains("scheme")) cfg.scheme = parse_scheme(get<std::string>(root, "scheme", "config"));

  const json& kernel = object_at(root, "kernel");
  reject_unknown(kernel, {"d", "tau", "support_scale"}, "kernel");
  cfg.tau = get<int>(kernel, "tau", "kernel");
  if (kernel.contains("d") && get<int>(kernel, "d", "kernel") != cfg.dim)
    fail(ErrorCode::dimension_mismatch, "kernel.d differs from dim");
  if (kernel.contains("support_scale")) cfg.support_scale = get<double>(kernel, "support_scale", "kernel");

  const json& grid = object_at(root, "grid");
  reject_unknown(grid, {"N", "N_per_axis", "R"}, "grid");
  if (grid.contains("N")) cfg.N = get<int>(grid, "N", "grid");
  if (grid.contains("N_per_axis")) cfg.N_per_axis = get<int>(grid, "N_per_axis", "grid");
  if (cfg.N.has_value() == cfg.N_per_axis.has_value())
    fail(ErrorCode::invalid_argument, "grid needs exactly one of 'N' and 'N_per_axis'");
  if (grid.contains("R")) {
    const json& r = grid.at("R");
    if (r.is_string()) {
      if (r.get<std::string>() != "paper") fail(ErrorCode::invalid_argument, "grid.R must be a number or \"paper\"");
    } else {
      cfg.R = get<double>(grid, "R", "grid");
    }
  }

  const json& time = object_at(root, "time");
  reject_unknown(time, {"T", "n"}, "time");
  cfg.T = get<double>(time, "T", "time");
  cfg.n = get<int>(time, "n", "time");

  if (root.contains("problem")) parse_problem(root.at("problem"), cfg);

  if (root.contains("regression")) {
    const json& reg = object_at(root, "regression");
    reject_unknown(reg, {"M", "beta0", "h"}, "regression");
    if (reg.contains("M")) cfg.M = get<int>(reg, "M", "regression");
    if (reg.contains("beta0")) cfg.beta0 = get<double>(reg, "beta0", "regression");
    if (reg.contains("h")) cfg.h = get<double>(reg, "h", "regression");
  }
  return cfg;
}

SolveConfig load_solve_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_solve_config(ss.str());
}

SolveSummary run_solve(const SolveConfig& cfg, const std::string& out_dir, bool deterministic) {
  const auto start = std::chrono::steady_clock::now();
  const auto kernel = std::make_shared<const WendlandKernel>(WendlandKernel::build(cfg.dim, cfg.tau, cfg.support_scale));

  int total = 0;
  if (cfg.N) {
    total = *cfg.N;
  } else {
    require(*cfg.N_per_axis >= 2, ErrorCode::invalid_argument, "N_per_axis must be >= 2");
    total = 1;
    for (int m = 0; m < cfg.dim; ++m) total *= *cfg.N_per_axis;
  }
  const double R = cfg.R ? *cfg.R : paper_radius(cfg.dim, total, cfg.tau);
  CollocationSet colloc = cfg.N ? equispaced_grid(cfg.dim, total, R) : tensor_grid(cfg.dim, *cfg.N_per_axis, R);

  HjbProblem problem = cfg.problem == "guo" ? guo_problem(cfg.dim, cfg.encoding, cfg.T, cfg.sigma)
                                            : heat_problem(cfg.dim, cfg.sigma, cfg.T);
  const auto tgrid = TimeGrid::uniform(cfg.T, cfg.n);

  SolveSummary summary;
  summary.N = static_cast<int>(colloc.size());
  summary.R = R;
  summary.delta_x = colloc.fill_distance();
  summary.delta_t = tgrid.dt();

  std::unique_ptr<SolutionHistory> hist;
  if (cfg.scheme == Scheme::interp) {
    AssemblyOptions opts;
    opts.storage = colloc.size() > 512 ? Storage::sparse : Storage::dense;
    auto gs = GramSystem::assemble(*kernel, colloc, opts);
    summary.jitter_used = gs->jitter();
    hist = solve_interp(problem, gs, tgrid);
  } else {
    RegressOptions ro;
    ro.schedule = BudgetSchedule(cfg.beta0);
    ro.M = cfg.M;
    ro.h = cfg.h;
    hist = solve_regress(problem, colloc, tgrid, kernel, ro);
  }
  summary.stability_number = hist->stability_number();

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create output directory " + out_dir + ": " + ec.message());

  {
    std::ofstream out(fs::path(out_dir) / "history.csv", std::ios::binary);
    if (!out) fail(ErrorCode::io, "cannot write history.csv in " + out_dir);
    out << "k,t,node_index,value\n";
    for (int k = 0; k <= tgrid.steps(); ++k) {
      const auto& v = hist->nodal(k);
      const std::string t = format_double(tgrid[k]);
      for (Eigen::Index j = 0; j < v.size(); ++j) out << k << ',' << t << ',' << j << ',' << format_double(v[j]) << '\n';
    }
    if (!out) fail(ErrorCode::io, "write error on history.csv");
  }

  const auto stop = std::chrono::steady_clock::now();
  summary.runtime_ms = deterministic ? 0.0 : std::chrono::duration<double, std::milli>(stop - start).count();

  json meta;
  meta["N"] = summary.N;
  meta["R"] = summary.R;
  meta["delta_x"] = summary.delta_x;
  meta["delta_t"] = summary.delta_t;
  meta["runtime_ms"] = summary.runtime_ms;
  meta["jitter_used"] = summary.jitter_used;
  meta["stability_number"] = summary.stability_number;
  meta["scheme"] = to_string(cfg.scheme);
  meta["n"] = cfg.n;
  std::ofstream out(fs::path(out_dir) / "meta.json", std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write meta.json in " + out_dir);
  out << meta.dump(2) << '\n';
  return summary;
}

}  // namespace wrbf
