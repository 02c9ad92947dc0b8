#include "nlsfloquet/soliton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "nlsfloquet/errors.hpp"

namespace nlsf {

namespace {

double sech(double x) { return 1.0 / std::cosh(x); }

void guard_pole(cplx k, cplx pole, double guard, const char* what) {
  if (std::abs(k - pole) < guard) throw NumericalError(ErrorKind::PoleProximity, what);
}

}  // namespace

SolitonParams soliton_params(double gamma, double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega) || !std::isfinite(gamma))
    throw NumericalError(ErrorKind::InvalidOmega, "soliton requires omega > 0");
  SolitonParams p;
  p.gamma = gamma;
  p.omega = omega;
  const double rw = std::sqrt(omega);
  p.alpha = rw / std::cosh(gamma);
  p.c = omega * std::sinh(gamma) / (std::cosh(gamma) * std::cosh(gamma));
  p.K1 = cplx(0.0, rw / 2.0);
  p.K2 = cplx(0.0, rw * std::tanh(gamma) / 2.0);
  const double sigma = gamma > 0 ? 1.0 : (gamma < 0 ? -1.0 : 0.0);
  const double c_alt = sigma * p.alpha * std::sqrt(std::max(0.0, omega - p.alpha * p.alpha));
  if (std::abs(c_alt - p.c) > 1e-12 * std::max(1.0, std::abs(p.c)))
    throw NumericalError(ErrorKind::NonFinite, "soliton parameter identity violated");
  return p;
}

PeriodicPair soliton_pair(const SolitonParams& p) {
  return single_exponential_pair(-1, p.alpha, p.omega, p.c);
}

cplx soliton_profile(const SolitonParams& p, double x, double t) {
  const double rw = std::sqrt(p.omega);
  return rw * sech(x * rw - p.gamma) * std::polar(1.0, p.omega * t);
}

cplx soliton_A(const SolitonParams& p, cplx k) {
  const double s = sech(p.gamma);
  return std::sqrt(1.0 - p.omega * s * s / (4.0 * k * k + p.omega));
}

double soliton_cut_distance(const SolitonParams& p, cplx k) {
  const double lo = std::abs(p.K2.imag());
  const double hi = p.K1.imag();
  auto seg = [&](double a, double b) {
    const double y = std::clamp(k.imag(), a, b);
    return std::abs(k - cplx(0.0, y));
  };
  return std::min(seg(lo, hi), seg(-hi, -lo));
}

SolitonSpectra soliton_spectra(const SolitonParams& p, cplx k, double guard) {
  guard_pole(k, -p.K1, guard, "a, b have a pole at -K1");
  if (soliton_cut_distance(p, k) < guard)
    throw NumericalError(ErrorKind::CutProximity, "k lies on the branch cuts of A, B");
  const double rw = std::sqrt(p.omega);
  const double g = p.gamma;
  SolitonSpectra s;
  s.b = rw * sech(g) / (2.0 * I_unit * k - rw);
  s.a = (2.0 * k - I_unit * rw * std::tanh(g)) / (2.0 * k + I_unit * rw);
  s.A = soliton_A(p, k);
  s.B = rw * s.A / (rw * std::sinh(g) + 2.0 * I_unit * k * std::cosh(g));
  return s;
}

SolitonSpectra soliton_spectra_rational(const SolitonParams& p, cplx k) {
  SolitonSpectra s;
  s.b = p.alpha / (2.0 * I_unit * (k + p.K1));
  s.a = (k - p.K2) / (k + p.K1);
  s.A = std::sqrt((k + p.K2) * (k - p.K2) / ((k + p.K1) * (k - p.K1)));
  s.B = p.alpha / (2.0 * I_unit) * std::sqrt((k + p.K2) / ((k + p.K1) * (k - p.K1) * (k - p.K2)));
  return s;
}

SolitonEigenfunctions soliton_eigenfunctions(const SolitonParams& p, double x, double t, cplx k,
                                             double guard) {
  if (x < 0.0) throw InputError(InputError::Kind::Validation, "x must be >= 0");
  guard_pole(k, p.K1, guard, "mu3 has a pole at K1");
  guard_pole(k, -p.K1, guard, "mu3 has a pole at -K1");
  guard_pole(k, p.K2, guard, "mu1 has a pole at K2");
  if (soliton_cut_distance(p, k) < guard)
    throw NumericalError(ErrorKind::CutProximity, "k lies on the branch cuts");
  const double rw = std::sqrt(p.omega);
  const double arg = p.gamma - x * rw;
  const double th = std::tanh(arg);
  const double sh = sech(arg);
  const cplx ewt = std::polar(1.0, p.omega * t);
  SolitonEigenfunctions out;
  out.mu3.m11 = (2.0 * k + I_unit * rw * th) / (2.0 * k - I_unit * rw);
  out.mu3.m12 = -ewt * rw * sh / (rw - 2.0 * I_unit * k);
  out.mu3.m21 = std::conj(ewt) * rw * sh / (2.0 * I_unit * k + rw);
  out.mu3.m22 = (2.0 * k - I_unit * rw * th) / (2.0 * k + I_unit * rw);
  const cplx A = soliton_A(p, k);
  const cplx den = rw * std::tanh(p.gamma) + 2.0 * I_unit * k;
  out.mu1_12 = A * rw * ewt * sh / den;
  out.mu1_22 = A * (rw * th + 2.0 * I_unit * k) / den;
  return out;
}

Matrix2 soliton_E(const SolitonParams& p, double t, cplx k) {
  const double rw = std::sqrt(p.omega);
  const double g = p.gamma;
  auto B = [&](cplx kk) {
    return rw * soliton_A(p, kk) / (rw * std::sinh(g) + 2.0 * I_unit * kk * std::cosh(g));
  };
  const cplx kb = std::conj(k);
  Matrix2 S{std::conj(soliton_A(p, kb)), B(k), -std::conj(B(kb)), soliton_A(p, k)};
  const cplx e = std::polar(1.0, p.omega * t);
  S.m12 *= e;
  S.m21 *= std::conj(e);
  return S;
}

double soliton_global_relation_residual(const SolitonParams& p, cplx k) {
  const SolitonSpectra s = soliton_spectra(p, k);
  return std::abs(s.b * s.A - s.a * s.B);
}

double soliton_l1_norm(const SolitonParams& p, double t) {
  boost::math::quadrature::exp_sinh<double> integrator;
  auto f = [&](double x) { return std::abs(soliton_profile(p, x, t)); };
  return integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity());
}

}  // namespace nlsf
