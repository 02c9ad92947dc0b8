#include "doctest.h"
#include "oracles.hpp"

#include "nlsfloquet/background.hpp"
#include "nlsfloquet/errors.hpp"

using namespace nlsf;

TEST_CASE("eval_pair: zero pair and a single exponential") {
  const auto z = eval_pair(zero_pair(2.0), 0.7);
  CHECK(z.g0 == cplx(0.0));
  CHECK(z.g1 == cplx(0.0));

  const PeriodicPair p = single_exponential_pair(-1, 1.0, 2.0, 1.0);
  CHECK(p.tau == doctest::Approx(oracle::pi));
  const auto v0 = eval_pair(p, 0.0);
  CHECK(std::abs(v0.g0 - 1.0) < 1e-15);
  CHECK(std::abs(v0.g1 - 1.0) < 1e-15);
  const auto vpi = eval_pair(p, oracle::pi);
  CHECK(std::abs(vpi.g0 - 1.0) < 1e-14);
  CHECK(std::abs(vpi.g1 - 1.0) < 1e-14);
}

TEST_CASE("eval_pair property: modes reproduce alpha e^{i omega t}") {
  oracle::Gen g(3);
  for (int trial = 0; trial < 50; ++trial) {
    const double alpha = g.uniform(0.1, 2.0);
    double omega = g.uniform(-5.0, 5.0);
    if (std::abs(omega) < 0.1) omega = 0.5;
    const cplx c = g.complex_in(2.0);
    const auto p = single_exponential_pair(1, alpha, omega, c);
    const double t = g.uniform(0.0, 10.0);
    const auto v = eval_pair(p, t);
    const auto d = eval_pair_derivative(p, t);
    const cplx e = std::exp(I_unit * omega * t);
    CHECK(std::abs(v.g0 - alpha * e) < 1e-12);
    CHECK(std::abs(v.g1 - c * e) < 1e-12);
    CHECK(std::abs(d.g0 - I_unit * omega * alpha * e) < 1e-11);
  }
}

TEST_CASE("assemble_Vb: zero pair and the listed entrywise example") {
  CHECK(assemble_Vb(zero_pair(1.0), 0.3, cplx(1.0, 2.0)).max_abs() == 0.0);
  const auto p = single_exponential_pair(-1, 1.0, 2.0, 1.0);
  const Matrix2 V = assemble_Vb(p, 0.0, 0.0);
  CHECK(std::abs(V.m11 - I_unit) < 1e-15);
  CHECK(std::abs(V.m12 - I_unit) < 1e-15);
  CHECK(std::abs(V.m21 - I_unit) < 1e-15);
  CHECK(std::abs(V.m22 + I_unit) < 1e-15);
}

TEST_CASE("assemble_Vb property: conjugation symmetry with lambda weighting") {
  oracle::Gen g(9);
  for (int trial = 0; trial < 100; ++trial) {
    const int lambda = trial % 2 ? 1 : -1;
    const auto p = g.pair(lambda, 3, 1.5, g.uniform(0.5, 3.0));
    const cplx k = g.complex_in(3.0);
    const double t = g.uniform(0.0, p.tau);
    const Matrix2 V = assemble_Vb(p, t, k);
    const Matrix2 Vc = assemble_Vb(p, t, std::conj(k));
    // V11(k) = conj V22(conj k), V12(k) = lambda conj V21(conj k)
    CHECK(max_abs_diff(V, oracle::conj_image(Vc, lambda)) < 1e-14 * (1.0 + V.max_abs()));
    CHECK(std::abs(V.trace()) < 1e-14);
  }
}

TEST_CASE("eta: zero pair vanishes") {
  const auto e = eta(zero_pair(2.0), 1.5);
  CHECK(e.eta1 == 0.0);
  CHECK(std::abs(e.eta2) == 0.0);
}

TEST_CASE("eta property: eta1 of a single exponential is lambda alpha Im(c) t") {
  oracle::Gen g(21);
  for (int trial = 0; trial < 10; ++trial) {
    const int lambda = trial % 2 ? 1 : -1;
    const double alpha = g.uniform(0.2, 1.5);
    const cplx c = g.complex_in(1.5);
    const auto p = single_exponential_pair(lambda, alpha, g.uniform(1.0, 4.0), c);
    const double t = g.uniform(0.0, p.tau);
    CHECK(std::abs(eta(p, t).eta1 - lambda * alpha * c.imag() * t) < 1e-10);
  }
}

TEST_CASE("validation: bad lambda, tau and omega") {
  PeriodicPair p;
  p.lambda = 0;
  CHECK_THROWS_AS(validate_pair(p), InputError);
  p.lambda = 1;
  p.tau = -1.0;
  CHECK_THROWS_AS(validate_pair(p), InputError);
  CHECK_THROWS_AS(single_exponential_pair(1, 1.0, 0.0, 1.0), InputError);
  CHECK_THROWS_AS(eta(zero_pair(1.0), -0.5), InputError);
}
