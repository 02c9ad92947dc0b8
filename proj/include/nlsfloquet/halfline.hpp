#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nlsfloquet/background.hpp"
#include "nlsfloquet/floquet.hpp"

namespace nlsf {

using ScalarFn = std::function<cplx(double)>;

/// u0 on 0 = x_0 < ... < x_N, interpolated by cubic Hermite splines.
struct SampledInitialDatum {
  std::vector<double> grid;
  std::vector<cplx> values;
  double decay_M = 0.0;  ///< 0: max |u0| on the grid
  double decay_p = 2.0;
};

/// InputError on a bad grid (fewer than 4 nodes, not increasing, x_0 != 0, size mismatch).
void validate_initial_datum(const SampledInitialDatum& u0);
ScalarFn interpolate(const std::vector<double>& grid, const std::vector<cplx>& values);
SampledInitialDatum sample_initial_datum(const ScalarFn& u0, double x_max, int n);

struct InitialSpectra {
  cplx a{1.0};
  cplx b{};
};

/// a = mu3_22(0,0,k), b = mu3_12(0,0,k), integrating the x-part from x_N down to 0.
/// Requires Im k >= 0; TailTooLarge when |u0(x_N)| exceeds 1e-10 M.
InitialSpectra initial_spectra(const SampledInitialDatum& u0, int lambda, cplx k,
                               double tol = 1e-12);
/// Same for a function given on [0, x_max].
InitialSpectra initial_spectra(const ScalarFn& u0, double x_max, int lambda, cplx k,
                               double tol = 1e-12);

struct BoundaryTraces {
  ScalarFn g0;
  ScalarFn g1;
};

struct BoundaryOptions {
  int points_per_period = 64;
  double series_tol = 1e-12;
  int max_terms = 30;
  bool keep_profile = false;  ///< store Psi(t) and the matching E column on the grid
  double ode_tol = kFloquetTol;
};

struct BoundaryResult {
  cplx A{}, B{};                 ///< Psi_2(0), Psi_1(0); second column only
  cplx col_top{}, col_bottom{};  ///< the computed column at t = 0
  int terms = 0;
  std::vector<double> term_norms;  ///< sup norm of each Neumann term
  double t_used = 0.0;
  double tail_estimate = 0.0;  ///< int_T^inf |Delta| under the (1+t)^{-7/2} model
  std::vector<double> times;
  std::vector<cplx> psi_top, psi_bottom;  ///< column on the grid (keep_profile)
  std::vector<cplx> e_top, e_bottom;      ///< matching column of E
};

/// Second column of mu1(0,t,k) from the truncated Neumann series on [0, T]; k must satisfy
/// Im Omega~ >= 0. A = Psi_2(0), B = Psi_1(0). SeriesStall / SlowDecay on failure.
BoundaryResult boundary_spectra(const PeriodicPair& pair, const FloquetPoint& fp,
                                const BoundaryTraces& traces, double T,
                                const BoundaryOptions& opts = {});
/// Same with the anchored branch at k.
BoundaryResult boundary_spectra(const PeriodicPair& pair, const BoundaryTraces& traces, cplx k,
                                double T, const BoundaryOptions& opts = {});

/// First column of mu1(0,t,k) for Im Omega~ <= 0; col_top = Phi_1(0), col_bottom = Phi_2(0).
BoundaryResult boundary_first_column(const PeriodicPair& pair, const FloquetPoint& fp,
                                     const BoundaryTraces& traces, double T,
                                     const BoundaryOptions& opts = {});

/// Traces equal to the background pair.
BoundaryTraces background_traces(const PeriodicPair& pair);

struct SpectralSample {
  cplx k{};
  cplx a{}, b{}, A{}, B{}, d{};
  double gr_residual = 0.0;
  double t_used = 0.0;
  double tail_estimate = 0.0;
};

/// |A b - B a|
double global_relation_residual(const SpectralSample& s);

/// |(A b - B a)(t1) - (A b - B a)(t2)|
double t_independence_check(cplx a1, cplx b1, cplx A1, cplx B1, cplx a2, cplx b2, cplx A2,
                            cplx B2);

/// d = a conj(A(conj k)) - lambda b conj(B(conj k)); the second argument holds values at conj k.
cplx compute_d(const SpectralSample& at_k, const SpectralSample& at_conj_k, int lambda);

/// Global-relation checks are limited to Im(Omega~ + 2k^2) > margin.
inline constexpr double kGrowthMargin = 0.1;

/// CSV with header `x,re,im` (or `t,re,im`); InputError with line number on malformed rows.
void read_complex_csv(const std::string& path, std::vector<double>& grid, std::vector<cplx>& values);

}  // namespace nlsf
