#include "doctest.h"
#include "oracles.hpp"

#include "nlsfloquet/errors.hpp"
#include "nlsfloquet/floquet.hpp"
#include "nlsfloquet/numerics.hpp"

using namespace nlsf;

TEST_CASE("ode: zero rhs keeps the identity") {
  const auto Y = solve_matrix_ode([](double, const Matrix2&) { return Matrix2::zero(); }, 0.0, 3.0,
                                  Matrix2::identity(), 1e-10, 1e-10);
  CHECK(max_abs_diff(Y, Matrix2::identity()) == 0.0);
}

TEST_CASE("ode: constant diagonal generator gives scalar exponentials") {
  for (double theta : {0.3, 1.0, 7.5}) {
    const Matrix2 A = Matrix2::diag(-I_unit * theta, I_unit * theta);
    for (auto method : {OdeMethod::DormandPrince45, OdeMethod::Fehlberg78}) {
      OdeOptions o;
      o.method = method;
      const auto Y = solve_matrix_ode([&](double, const Matrix2& y) { return A * y; }, 0.0, 1.0,
                                      Matrix2::identity(), o);
      CHECK(max_abs_diff(Y, Matrix2::diag(std::exp(-I_unit * theta), std::exp(I_unit * theta))) < 1e-8);
    }
  }
}

TEST_CASE("ode: free evolution of the zero pair over one period") {
  const double tau = 1.3;
  const cplx k(0.7, 0.4);
  const auto Y = solve_matrix_ode(
      [&](double, const Matrix2& y) { return Matrix2::diag(-2.0 * I_unit * k * k, 2.0 * I_unit * k * k) * y; },
      0.0, tau, Matrix2::identity(), 1e-12, 1e-12);
  const Matrix2 ref = Matrix2::diag(std::exp(-2.0 * I_unit * k * k * tau), std::exp(2.0 * I_unit * k * k * tau));
  CHECK(oracle::rel_diff(Y, ref) < 1e-9);
}

TEST_CASE("ode property: random constant generators match the Eigen matrix exponential") {
  oracle::Gen g(11);
  for (int trial = 0; trial < 30; ++trial) {
    Eigen::Matrix2cd M;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) M(i, j) = g.complex_in(2.0);
    const Matrix2 A = oracle::from_eigen(M);
    const double T = g.uniform(0.1, 2.0);
    OdeOptions o;
    o.method = trial % 2 ? OdeMethod::Fehlberg78 : OdeMethod::DormandPrince45;
    o.abs_tol = o.rel_tol = 1e-11;
    const auto Y = solve_matrix_ode([&](double, const Matrix2& y) { return A * y; }, 0.0, T,
                                    Matrix2::identity(), o);
    const Matrix2 ref = oracle::from_eigen((M * T).exp());
    CHECK(oracle::rel_diff(Y, ref) < 1e-8);
  }
}

TEST_CASE("ode: grid output agrees with single integrations") {
  const Matrix2 A{0.0, 1.0, -1.0, 0.0};
  const std::vector<double> ts{0.0, 0.5, 1.0, 2.0};
  const auto ys = solve_matrix_ode_grid([&](double, const Matrix2& y) { return A * y; }, ts,
                                        Matrix2::identity(), OdeOptions{});
  REQUIRE(ys.size() == ts.size());
  for (std::size_t j = 0; j < ts.size(); ++j) {
    const double t = ts[j];
    CHECK(std::abs(ys[j].m11 - std::cos(t)) < 1e-8);
    CHECK(std::abs(ys[j].m12 - std::sin(t)) < 1e-8);
  }
}

TEST_CASE("ode: non-finite rhs raises NonFinite") {
  auto bad = [](double, const Matrix2&) { return Matrix2{std::nan(""), 0.0, 0.0, 0.0}; };
  CHECK_THROWS_AS(solve_matrix_ode(bad, 0.0, 1.0, Matrix2::identity(), 1e-10, 1e-10), NumericalError);
}

static bool has_root(const std::vector<RootMultiplicity>& rs, cplx r, int m, double tol) {
  for (const auto& x : rs)
    if (std::abs(x.root - r) < tol && x.multiplicity == m) return true;
  return false;
}

TEST_CASE("poly_roots: listed examples") {
  const auto a = poly_roots(Polynomial{{1.0, 0.0, 4.0, 0.0, 4.0}}, 1e-4);
  CHECK(a.size() == 2);
  CHECK(has_root(a, cplx(0.0, 1.0 / std::sqrt(2.0)), 2, 1e-6));
  CHECK(has_root(a, cplx(0.0, -1.0 / std::sqrt(2.0)), 2, 1e-6));

  const auto b = poly_roots(Polynomial{{-1.0, 0.0, 1.0}});
  CHECK(b.size() == 2);
  CHECK(has_root(b, 1.0, 1, 1e-12));
  CHECK(has_root(b, -1.0, 1, 1e-12));

  const auto c = poly_roots(Polynomial{{0.0, 0.0, 0.0, 0.0, 4.0}});
  REQUIRE(c.size() == 1);
  CHECK(c[0].multiplicity == 4);
  CHECK(std::abs(c[0].root) < 1e-12);
}

TEST_CASE("poly_roots property: roots and multiplicities survive expansion") {
  oracle::Gen g(5);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<RootMultiplicity> roots;
    const int n = g.integer(1, 3);
    for (int j = 0; j < n; ++j) {
      cplx r;
      bool ok = false;
      while (!ok) {
        r = g.complex_in(2.0);
        ok = true;
        for (const auto& q : roots) ok = ok && std::abs(q.root - r) > 0.3;
      }
      roots.push_back({r, g.integer(1, 2)});
    }
    const cplx lead = g.complex_in(3.0) + 0.5;
    const auto p = poly_from_roots(roots, lead);
    const auto found = poly_roots(p, 1e-4);
    int total = 0;
    for (const auto& f : found) total += f.multiplicity;
    CHECK(total == p.degree());
    for (const auto& r : roots) CHECK(has_root(found, r.root, r.multiplicity, 1e-5));
  }
}

TEST_CASE("poly_roots: zero leading coefficient is rejected") {
  CHECK_THROWS_AS(poly_roots(Polynomial{{1.0, 2.0, 0.0}}), NumericalError);
}

TEST_CASE("winding: simple and double zeros") {
  const cplx kappa(0.3, -0.2);
  CHECK(winding_number([&](cplx k) { return k - kappa; }, Contour::circle(kappa, 0.1)) == 1);
  CHECK(winding_number([&](cplx k) { return (k - kappa) * (k - kappa); }, Contour::circle(kappa, 0.1)) == 2);
  CHECK(winding_number([&](cplx k) { return k - kappa; }, Contour::circle(kappa + 1.0, 0.1)) == 0);
}

TEST_CASE("winding: G of the zero pair has a double zero at sqrt(pi/(2 tau))") {
  const double tau = 1.7;
  const PeriodicPair p = zero_pair(tau);
  const cplx k0 = std::sqrt(oracle::pi / (2.0 * tau));
  auto G = [&](cplx k) {
    const Matrix2 Z = monodromy(p, k);
    return Z.trace() * Z.trace() - 4.0;
  };
  CHECK(winding_number(G, Contour::circle(k0, 0.05)) == 2);
}

TEST_CASE("winding property: count equals zeros inside random rectangles") {
  oracle::Gen g(17);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<RootMultiplicity> roots;
    for (int j = 0; j < 4; ++j) roots.push_back({g.complex_in(2.0), g.integer(1, 3)});
    const auto p = poly_from_roots(roots, 1.0);
    const double x0 = g.uniform(-2.0, 0.0), x1 = g.uniform(0.1, 2.0);
    const double y0 = g.uniform(-2.0, 0.0), y1 = g.uniform(0.1, 2.0);
    int expect = 0;
    bool near_edge = false;
    for (const auto& r : roots) {
      const double x = r.root.real(), y = r.root.imag();
      near_edge = near_edge || std::min({std::abs(x - x0), std::abs(x - x1), std::abs(y - y0), std::abs(y - y1)}) < 1e-3;
      if (x > x0 && x < x1 && y > y0 && y < y1) expect += r.multiplicity;
    }
    if (near_edge) continue;
    CHECK(winding_number([&](cplx k) { return p(k); }, Contour::rectangle(x0, x1, y0, y1)) == expect);
  }
}

TEST_CASE("winding: a zero on the contour raises ZeroOnContour") {
  CHECK_THROWS_AS(winding_number([](cplx k) { return k - 1.0; }, Contour::circle(0.0, 1.0)), NumericalError);
}
