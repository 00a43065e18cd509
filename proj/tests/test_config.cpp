#include "wrbf/config.hpp"
#include "wrbf/csv.hpp"
#include "wrbf/error.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace wrbf;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("wrbf_test_" + name);
  fs::remove_all(p);
  return p;
}

const char* kMinimal = R"({"dim": 1, "kernel": {"tau": 4}, "grid": {"N": 17}, "time": {"T": 1.0, "n": 16}})";

}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(-1.5e-300) == "-1.5000000000000001e-300");
  CHECK(parse_double(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(parse_double("+2.5") == 2.5);
  CHECK(std::isnan(parse_double("nan")));
  CHECK_THROWS_AS(parse_double("1.0x"), Error);
  CHECK_THROWS_AS(parse_double(""), Error);
}

TEST_CASE("csv reader") {
  std::istringstream in("a,b\r\n1,2\r\n3,4\n");
  const auto t = read_csv(in);
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][t.column("b")] == "4");
  CHECK_THROWS_AS(t.column("c"), Error);
  std::istringstream ragged("a,b\n1\n");
  CHECK_THROWS_AS(read_csv(ragged), Error);
  CHECK_THROWS_AS(read_csv_file("/nonexistent/file.csv"), Error);
}

TEST_CASE("config defaults") {
  const auto c = parse_solve_config(kMinimal);
  CHECK(c.dim == 1);
  CHECK(c.scheme == Scheme::interp);
  CHECK(c.tau == 4);
  CHECK(c.support_scale == 1.0);
  CHECK(*c.N == 17);
  CHECK_FALSE(c.N_per_axis.has_value());
  CHECK_FALSE(c.R.has_value());
  CHECK(c.problem == "guo");
  CHECK(c.sigma == kGuoSigmaMax);
}

TEST_CASE("config variants") {
  const auto c = parse_solve_config(R"({
    "dim": 2, "scheme": "regress",
    "kernel": {"d": 2, "tau": 3, "support_scale": 1.5},
    "grid": {"N_per_axis": 5, "R": 1.25},
    "time": {"T": 0.5, "n": 8},
    "problem": {"name": "heat", "sigma": 0.3},
    "regression": {"M": 10, "beta0": 100, "h": 0.01}
  })");
  CHECK(c.scheme == Scheme::regress);
  CHECK(c.support_scale == 1.5);
  CHECK(*c.N_per_axis == 5);
  CHECK(*c.R == 1.25);
  CHECK(c.problem == "heat");
  CHECK(c.sigma == 0.3);
  CHECK(c.M == 10);
  CHECK(c.beta0 == 100.0);
  CHECK(c.h == 0.01);
  const auto g = parse_solve_config(
      R"({"dim": 1, "kernel": {"tau": 4}, "grid": {"N": 9, "R": "paper"}, "time": {"T": 1, "n": 4},
          "problem": {"name": "guo", "sigma_max": 0.1, "encoding": "general"}})");
  CHECK(g.encoding == Encoding::general);
  CHECK(g.sigma == 0.1);
  CHECK(parse_solve_config(R"({"dim": 1, "kernel": {"tau": 4}, "grid": {"N": 9}, "time": {"T": 1, "n": 4},
                               "problem": "builtin:heat"})")
            .problem == "heat");
}

TEST_CASE("config rejects malformed input") {
  auto bad = [](const std::string& s) {
    try {
      parse_solve_config(s);
    } catch (const Error& e) {
      return e.code() == ErrorCode::invalid_argument || e.code() == ErrorCode::dimension_mismatch;
    }
    return false;
  };
  CHECK(bad("{"));
  CHECK(bad("[]"));
  CHECK(bad(R"({"dim": 1, "kernel": {"tau": 4}, "grid": {"N": 9}, "time": {"T": 1, "n": 4}, "extra": 1})"));
  CHECK(bad(R"({"dim": 1, "kernel": {"tau": 4, "nu": 3}, "grid": {"N": 9}, "time": {"T": 1, "n": 4}})"));
  CHECK(bad(R"({"dim": 1, "kernel": {"tau": 4}, "grid": {"N": 9, "N_per_axis": 3}, "time": {"T": 1, "n": 4}})"));
  CHECK(bad(R"({"dim": 1, "kernel": {"tau": 4}, "grid": {}, "time": {"T": 1, "n": 4}})"));
  CHECK(bad(R"({"dim": 1, "kernel": {"tau": 4}, "grid": {"N": 9, "R": "wide"}, "time": {"T": 1, "n": 4}})"));
  CHECK(bad(R"({"dim": 2, "kernel": {"d": 1, "tau": 4}, "grid": {"N": 9}, "time": {"T": 1, "n": 4}})"));
  CHECK(bad(R"({"dim": 1, "kernel": {"tau": "four"}, "grid": {"N": 9}, "time": {"T": 1, "n": 4}})"));
  CHECK(bad(R"({"dim": 1, "kernel": {"tau": 4}, "grid": {"N": 9}, "time": {"T": 1, "n": 4}, "problem": "guo"})"));
  CHECK(bad(R"({"dim": 1, "kernel": {"tau": 4}, "grid": {"N": 9}, "time": {"T": 1}})"));
  CHECK_THROWS_AS(load_solve_config("/nonexistent/config.json"), Error);
}

TEST_CASE("solve run writes history and metadata") {
  const auto dir = scratch("solve");
  const auto cfg = parse_solve_config(kMinimal);
  const auto s = run_solve(cfg, dir.string(), true);
  CHECK(s.N == 17);
  CHECK(s.R == doctest::Approx(paper_radius(1, 17, 4)));
  CHECK(s.delta_t == 1.0 / 16);
  CHECK(s.runtime_ms == 0.0);
  const auto hist = read_csv_file((dir / "history.csv").string());
  CHECK(hist.header == std::vector<std::string>{"k", "t", "node_index", "value"});
  CHECK(hist.rows.size() == 17u * 17u);
  const auto meta = nlohmann::json::parse(slurp(dir / "meta.json"));
  for (const char* key : {"N", "R", "delta_x", "delta_t", "runtime_ms", "jitter_used", "stability_number"})
    CHECK(meta.contains(key));
  CHECK(meta["runtime_ms"].get<double>() == 0.0);

  const auto dir2 = scratch("solve2");
  run_solve(cfg, dir2.string(), true);
  CHECK(slurp(dir / "history.csv") == slurp(dir2 / "history.csv"));
  CHECK(slurp(dir / "meta.json") == slurp(dir2 / "meta.json"));
  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST_CASE("regression and tensor-grid solve runs") {
  const auto dir = scratch("solve_regress");
  const auto cfg = parse_solve_config(R"({"dim": 2, "scheme": "regress", "kernel": {"tau": 3, "support_scale": 1.5},
      "grid": {"N_per_axis": 4, "R": 1.0}, "time": {"T": 1, "n": 2}, "problem": {"name": "heat", "sigma": 0.2},
      "regression": {"beta0": 1000, "h": 0.01}})");
  const auto s = run_solve(cfg, dir.string(), true);
  CHECK(s.N == 16);
  CHECK(read_csv_file((dir / "history.csv").string()).rows.size() == 16u * 3u);
  fs::remove_all(dir);
}
