#include "nlsfloquet/background.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nlsfloquet/errors.hpp"

namespace nlsf {

namespace {

cplx mode_sum(const std::vector<FourierMode>& modes, double tau, double t) {
  cplx s = 0.0;
  const double w = 2.0 * std::numbers::pi / tau;
  for (const auto& m : modes) s += m.coeff * std::polar(1.0, w * m.n * t);
  return s;
}

cplx mode_sum_dt(const std::vector<FourierMode>& modes, double tau, double t) {
  cplx s = 0.0;
  const double w = 2.0 * std::numbers::pi / tau;
  for (const auto& m : modes) s += I_unit * (w * m.n) * m.coeff * std::polar(1.0, w * m.n * t);
  return s;
}

template <class F>
double integrate(F f, double a, double b, double tol) {
  using boost::math::quadrature::gauss_kronrod;
  if (b <= a) return 0.0;
  double err = 0.0;
  const double v = gauss_kronrod<double, 31>::integrate(f, a, b, 10, tol, &err);
  // absolute floor: integrands that vanish identically only carry rounding noise
  if (!std::isfinite(v) || err > tol * std::max(1.0, std::abs(v)) * 10.0)
    throw NumericalError(ErrorKind::QuadratureFailure, "eta quadrature did not converge");
  return v;
}

}  // namespace

void validate_pair(const PeriodicPair& pair) {
  if (pair.lambda != 1 && pair.lambda != -1)
    throw InputError(InputError::Kind::Validation, "lambda must be +1 or -1");
  if (!(pair.tau > 0.0) || !std::isfinite(pair.tau))
    throw InputError(InputError::Kind::Validation, "tau must be positive");
}

PeriodicPair zero_pair(double tau, int lambda) {
  PeriodicPair p;
  p.lambda = lambda;
  p.tau = tau;
  return p;
}

PeriodicPair single_exponential_pair(int lambda, double alpha, double omega, cplx c) {
  if (omega == 0.0 || !std::isfinite(omega))
    throw InputError(InputError::Kind::Validation, "omega must be nonzero");
  PeriodicPair p;
  p.lambda = lambda;
  p.tau = 2.0 * std::numbers::pi / std::abs(omega);
  const int n = omega > 0 ? 1 : -1;
  p.g0_modes.push_back({n, alpha});
  p.g1_modes.push_back({n, c});
  return p;
}

PairValues eval_pair(const PeriodicPair& pair, double t) {
  return {mode_sum(pair.g0_modes, pair.tau, t), mode_sum(pair.g1_modes, pair.tau, t)};
}

PairValues eval_pair_derivative(const PeriodicPair& pair, double t) {
  return {mode_sum_dt(pair.g0_modes, pair.tau, t), mode_sum_dt(pair.g1_modes, pair.tau, t)};
}

Matrix2 assemble_V(int lambda, cplx g0, cplx g1, cplx k) {
  const double lam = lambda;
  const double q = std::norm(g0);
  return {-I_unit * lam * q, 2.0 * k * g0 + I_unit * g1,
          2.0 * lam * k * std::conj(g0) - I_unit * lam * std::conj(g1), I_unit * lam * q};
}

Matrix2 assemble_Vb(const PeriodicPair& pair, double t, cplx k) {
  const auto g = eval_pair(pair, t);
  return assemble_V(pair.lambda, g.g0, g.g1, k);
}

EtaValues eta(const PeriodicPair& pair, double t, double tol) {
  if (t < 0.0) throw InputError(InputError::Kind::Validation, "eta requires t >= 0");
  const double lam = pair.lambda;
  // conj(g0) g1 is a trigonometric polynomial, so eta1 integrates exactly
  const double w = 2.0 * std::numbers::pi / pair.tau;
  auto eta1_at = [&](double s) {
    cplx acc = 0.0;
    for (const auto& m0 : pair.g0_modes)
      for (const auto& m1 : pair.g1_modes) {
        const double nu = w * (m1.n - m0.n);
        const cplx prim = nu == 0.0 ? cplx(s) : (std::polar(1.0, nu * s) - 1.0) / (I_unit * nu);
        acc += std::conj(m0.coeff) * m1.coeff * prim;
      }
    return lam * acc.imag();
  };

  EtaValues out;
  out.t = t;
  out.eta1 = eta1_at(t);

  // integrand of eta2 split into real and imaginary parts
  auto integrand = [&](double s) {
    const auto g = eval_pair(pair, s);
    const auto gd = eval_pair_derivative(pair, s);
    const double im = std::imag(std::conj(g.g0) * g.g1);
    const cplx v = lam * std::norm(g.g0) * std::norm(g.g0) - std::norm(g.g1) -
                   4.0 * I_unit * im * eta1_at(s) - I_unit * std::conj(g.g0) * gd.g0;
    return v;
  };
  const double re = integrate([&](double s) { return integrand(s).real(); }, 0.0, t, tol);
  const double imv = integrate([&](double s) { return integrand(s).imag(); }, 0.0, t, tol);
  out.eta2 = 0.25 * lam * cplx(re, imv);
  return out;
}

}  // namespace nlsf
