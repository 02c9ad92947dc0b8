#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlsfloquet/background.hpp"
#include "nlsfloquet/floquet.hpp"
#include "nlsfloquet/spectrum.hpp"

namespace nlsf {

inline constexpr const char* kSchemaVersion = "1.0";

struct RunConfig {
  std::string mode;  ///< classify-exp, scan, soliton-check, monodromy, spectra, plot-data

  int lambda = -1;
  double tau = 0.0;
  std::vector<FourierMode> g0_modes, g1_modes;
  bool has_alpha = false, has_omega = false, has_c = false, has_gamma = false;
  double alpha = 0.0, omega = 0.0, gamma = 0.0;
  cplx c{};

  bool has_window = false;
  Window window;
  double loc_tol = 1e-3;
  double ode_tol = kFloquetTol;
  std::vector<CutStrategy> cut_strategies = all_cut_strategies();

  std::vector<cplx> k_points;
  int grid_n = 41;
  double horizon = 0.0;
  int points_per_period = 64;
  std::string initial_path, trace_g0_path, trace_g1_path;
  int samples = 20;
  unsigned seed = 12345;

  int jobs = 1;
  std::string out_dir;

  /// key = value lines as read, for the report echo
  std::map<std::string, std::vector<std::string>> raw;
};

/// Flat `key = value` lines; `#` starts a comment; mode_g0 / mode_g1 / k may repeat.
/// InputError(Parse) with the line number on malformed input.
RunConfig parse_config(const std::string& text);

/// "1+2i", "-0.5i", "3", or two numbers "re im".
cplx parse_complex(const std::string& s);

/// Mode-specific checks; InputError(Validation) naming the failing invariant.
void validate_config(const RunConfig& cfg);

/// Boundary pair from whichever spec the config holds (soliton, triple, or modes).
PeriodicPair config_pair(const RunConfig& cfg);

/// Dispatches on cfg.mode and returns the report. Writes files when cfg.out_dir is set.
/// InputError and NumericalError propagate.
nlohmann::json run(const RunConfig& cfg);

/// Writes domains.csv, zeros.csv, cuts.csv and contour.csv into dir; returns a summary.
nlohmann::json emit_plotdata(const RunConfig& cfg, const PeriodicPair& pair, const Window& window,
                             const std::string& dir);

/// Command line entry used by the tool: returns the process exit code.
int cli_main(int argc, char** argv);

}  // namespace nlsf
