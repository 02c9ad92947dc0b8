#pragma once

#include "nlsfloquet/background.hpp"
#include "nlsfloquet/matrix2.hpp"

namespace nlsf {

/// Stationary focusing soliton u = sqrt(omega) sech(x sqrt(omega) - gamma) e^{i omega t}.
struct SolitonParams {
  double gamma = 0.0;
  double omega = 1.0;
  double alpha = 1.0;  ///< u(0,0)
  double c = 0.0;      ///< u_x(0,0)
  cplx K1{};           ///< i sqrt(omega) / 2
  cplx K2{};           ///< i sqrt(omega) tanh(gamma) / 2
};

/// InvalidOmega (NumericalError) when omega <= 0.
SolitonParams soliton_params(double gamma, double omega);

/// Boundary pair {alpha e^{i omega t}, c e^{i omega t}} with lambda = -1.
PeriodicPair soliton_pair(const SolitonParams& p);

/// Profile u(x, t).
cplx soliton_profile(const SolitonParams& p, double x, double t);

/// sqrt(1 - omega sech^2(gamma) / (4k^2 + omega)) on the principal branch, whose cuts are
/// [K2, K1] and [-K1, -K2].
cplx soliton_A(const SolitonParams& p, cplx k);

struct SolitonSpectra {
  cplx a, b, A, B;
};

/// Closed-form spectral functions; PoleProximity near -K1 for a, b and CutProximity on the cuts.
SolitonSpectra soliton_spectra(const SolitonParams& p, cplx k, double guard = 1e-8);

/// Rational forms b = alpha / (2i(k + K1)), a = (k - K2)/(k + K1).
SolitonSpectra soliton_spectra_rational(const SolitonParams& p, cplx k);

struct SolitonEigenfunctions {
  cplx mu1_12, mu1_22;
  Matrix2 mu3;
};

SolitonEigenfunctions soliton_eigenfunctions(const SolitonParams& p, double x, double t, cplx k,
                                             double guard = 1e-8);

/// E(t, k) for the soliton pair (second column from the closed form, first by symmetry).
Matrix2 soliton_E(const SolitonParams& p, double t, cplx k);

/// |b A - a B|
double soliton_global_relation_residual(const SolitonParams& p, cplx k);

/// Distance from k to the cuts [K2, K1] and [-K1, -K2].
double soliton_cut_distance(const SolitonParams& p, cplx k);

/// L1 norm of u(., t) on [0, inf) by quadrature.
double soliton_l1_norm(const SolitonParams& p, double t);

}  // namespace nlsf
