#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nlsfloquet/cli.hpp"
#include "nlsfloquet/errors.hpp"

using namespace nlsf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nlsf_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write_config(const fs::path& dir, const std::string& body) {
  const fs::path p = dir / "run.cfg";
  std::ofstream(p) << body;
  return p.string();
}

int run_tool(const std::string& args) {
  const char* exe = std::getenv("NLSF_CLI");
  if (!exe) return -1;
  const int rc = std::system((std::string(exe) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("parse_complex: accepted forms") {
  CHECK(parse_complex("1+2i") == cplx(1.0, 2.0));
  CHECK(parse_complex("-0.5i") == cplx(0.0, -0.5));
  CHECK(parse_complex("3") == cplx(3.0, 0.0));
  CHECK(parse_complex("1e-3-2e+1i") == cplx(1e-3, -20.0));
  CHECK(parse_complex("0.5 -1") == cplx(0.5, -1.0));
  CHECK(parse_complex("i") == cplx(0.0, 1.0));
  CHECK_THROWS(parse_complex("abc"));
}

TEST_CASE("parse_config: minimal classify-exp config") {
  const RunConfig c = parse_config("mode = classify-exp\nlambda = -1\nalpha = 1\nomega = 2\nc = 1+0i  # comment\n");
  CHECK(c.mode == "classify-exp");
  CHECK(c.lambda == -1);
  CHECK(c.alpha == 1.0);
  CHECK(c.omega == 2.0);
  CHECK(c.c == cplx(1.0, 0.0));
  CHECK_NOTHROW(validate_config(c));
}

TEST_CASE("parse_config: repeated keys, modes and errors with line numbers") {
  const RunConfig c = parse_config("tau = 2\nmode_g0 = 1 0.5 0\nmode_g0 = -1 0 0.2\nk = 1 1\nk = 0.5-1i\n");
  CHECK(c.g0_modes.size() == 2);
  CHECK(c.g0_modes[1].n == -1);
  CHECK(c.k_points.size() == 2);
  CHECK(c.k_points[1] == cplx(0.5, -1.0));

  auto parse_error_line = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const InputError& e) {
      CHECK(e.kind() == InputError::Kind::Parse);
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(parse_error_line("alpha = 1\nalpha = 2\n").rfind("line 2", 0) == 0);
  CHECK(parse_error_line("# c\nbogus = 1\n").rfind("line 2", 0) == 0);
  CHECK(parse_error_line("alpha 1\n").rfind("line 1", 0) == 0);
  CHECK(parse_error_line("omega = two\n").rfind("line 1", 0) == 0);
  CHECK(parse_error_line("window = 1 2 3\n").rfind("line 1", 0) == 0);
}

TEST_CASE("validate_config: failing invariants") {
  RunConfig scan = parse_config("mode = scan\nlambda = -1\nalpha = 1\nomega = 2\nc = 1\nwindow = -1 1 -0.5 1\n");
  CHECK_THROWS_AS(validate_config(scan), InputError);
  RunConfig sol = parse_config("mode = soliton-check\ngamma = 0\nomega = -1\n");
  CHECK_THROWS_AS(validate_config(sol), InputError);
  RunConfig mono = parse_config("mode = monodromy\ntau = 1\n");
  CHECK_THROWS_AS(validate_config(mono), InputError);
  RunConfig bad_mode = parse_config("mode = solve\n");
  CHECK_THROWS_AS(validate_config(bad_mode), InputError);
}

TEST_CASE("run: classify-exp report on the F-1.3a example") {
  RunConfig c = parse_config("mode = classify-exp\nlambda = -1\nalpha = 1\nomega = 2\nc = 1\n");
  const auto r = run(c);
  CHECK(r["schema_version"] == "1.0");
  CHECK(r["verdict"]["status"] == "consistent");
  CHECK(r["family"]["name"] == "F-1.3a");
  CHECK(r.contains("timing"));
  CHECK(r["inputs"]["alpha"] == "1");
}

TEST_CASE("run: soliton-check residuals") {
  RunConfig c = parse_config("mode = soliton-check\ngamma = 1\nomega = 2\nsamples = 8\n");
  const auto r = run(c);
  CHECK(r["pass"] == true);
  for (const char* key : {"global_relation_max", "rational_forms_max", "sqrtG_relative_max", "Ab_vs_A_max", "l1_norm_error"})
    CHECK(r["residuals"][key].get<double>() <= 1e-8);
}

TEST_CASE("run: monodromy of the zero pair") {
  RunConfig c = parse_config("mode = monodromy\nlambda = -1\ntau = 1\nk = 1 1\n");
  const auto r = run(c);
  REQUIRE(r["points"].size() == 1);
  const auto& p = r["points"][0];
  CHECK(p["domain"] == "D1");
  const cplx k(1.0, 1.0);
  const cplx z = std::exp(-2.0 * I_unit * k * k);
  CHECK(std::abs(p["z"]["re"].get<double>() - z.real()) < 1e-8);
  CHECK(std::abs(p["z"]["im"].get<double>() - z.imag()) < 1e-8);
}

TEST_CASE("run: spectra for soliton data") {
  RunConfig c = parse_config("mode = spectra\ngamma = 0\nomega = 4\nk = 1 1\nk = 1 -0.5\n");
  const auto r = run(c);
  REQUIRE(r["samples"].size() == 2);
  const auto& up = r["samples"][0];
  CHECK(up.contains("a"));
  CHECK(up.contains("A"));
  CHECK(up["gr_residual"].get<double>() <= 1e-8);
  const auto& low = r["samples"][1];
  CHECK(low.contains("ab_reason"));
}

TEST_CASE("plot-data: zero pair quadrants and soliton cuts") {
  const fs::path dz = scratch("zero");
  RunConfig z = parse_config("mode = plot-data\nlambda = -1\ntau = 1\nwindow = -1 1 -1 1\ngrid_n = 9\n");
  z.out_dir = dz.string();
  run(z);
  const auto rows = read_lines(dz / "domains.csv");
  REQUIRE(rows.size() == 82);
  int mismatches = 0;
  for (std::size_t j = 1; j < rows.size(); ++j) {
    std::stringstream ss(rows[j]);
    std::string xr, yi, label;
    std::getline(ss, xr, ',');
    std::getline(ss, yi, ',');
    std::getline(ss, label, ',');
    const double x = std::stod(xr), y = std::stod(yi);
    std::string expect = "boundary";
    if (std::abs(y) > 1e-12 && std::abs(x) > 1e-12)
      expect = y > 0 ? (x > 0 ? "D1" : "D2") : (x > 0 ? "D4" : "D3");
    if (std::abs(y) > 1e-12 && std::abs(x) <= 1e-12) continue;  // Im Omega~ = 0 on the imaginary axis
    mismatches += label != expect;
  }
  CHECK(mismatches == 0);
  CHECK(fs::exists(dz / "report.json"));

  const fs::path ds = scratch("soliton");
  RunConfig s = parse_config("mode = plot-data\ngamma = 0.5\nomega = 4\nwindow = -1.5 1.5 -1.5 1.5\ngrid_n = 7\n");
  s.out_dir = ds.string();
  run(s);
  const auto cuts = read_lines(ds / "cuts.csv");
  REQUIRE(cuts.size() == 5);
  CHECK(cuts[1].rfind("0,0,", 0) == 0);
  CHECK(cuts[3].rfind("1,0,-", 0) == 0);
}

TEST_CASE("tool: exit codes") {
  if (!std::getenv("NLSF_CLI")) return;
  const fs::path d = scratch("tool");
  CHECK(run_tool("classify-exp --config " + write_config(d, "lambda = -1\nalpha = 1\nomega = 2\nc = 1\n") +
                 " --out " + (d / "out").string()) == 0);
  CHECK(fs::exists(d / "out" / "report.json"));
  CHECK(run_tool("scan --config " + write_config(d, "lambda = -1\ntau = 1\nwindow = -1 1 0 1\n")) == 2);
  CHECK(run_tool("soliton-check --config " + write_config(d, "gamma = 0\nomega = -1\n")) == 2);
  CHECK(run_tool("classify-exp --config " + write_config(d, "alpha = 1\nalpha = 2\n")) == 2);
  CHECK(run_tool("spectra --config " + write_config(d, "tau = 1\nk = 1 1\ninitial = /nonexistent.csv\ntrace_g0 = /x\ntrace_g1 = /y\n")) == 2);
}
