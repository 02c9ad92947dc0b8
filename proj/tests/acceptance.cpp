// Acceptance run: one PASS/FAIL line per criterion.
// Expected values come from closed forms evaluated here, not from the library under test.

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <string>
#include <tuple>
#include <vector>

#include "nlsfloquet/branch.hpp"
#include "nlsfloquet/errors.hpp"
#include "nlsfloquet/exponential.hpp"
#include "nlsfloquet/halfline.hpp"
#include "nlsfloquet/soliton.hpp"
#include "nlsfloquet/spectrum.hpp"
#include "oracles.hpp"

using namespace nlsf;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. closed-form soliton spectra satisfy b A - a B = 0
Outcome soliton_identities() {
  const auto t0 = std::chrono::steady_clock::now();
  oracle::Gen g(1001);
  double worst = 0.0;
  int n = 0;
  for (auto [gamma, omega] : {std::pair{0.0, 4.0}, std::pair{1.0, 2.0}, std::pair{-1.0, 1.0}}) {
    const SolitonParams p = soliton_params(gamma, omega);
    int count = 0;
    while (count < 20) {
      const cplx k(g.uniform(-2.0, 2.0), g.uniform(0.0, 2.0));
      if (soliton_cut_distance(p, k) < 1e-2 || std::abs(k + p.K1) < 1e-2) continue;
      worst = std::max(worst, soliton_global_relation_residual(p, k));
      ++count;
      ++n;
    }
  }
  const double dt = seconds_since(t0);
  return {worst <= 1e-10 && dt < 1.0, fmt("%d points, max |bA - aB| = %.2e, %.3f s", n, worst, dt)};
}

// 2. numeric monodromy against the closed forms
Outcome monodromy_cross_validation() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<ExponentialTriple> triples{{1.0, 2.0, 1.0, -1},
                                               {1.0, 0.5, 0.3, -1},
                                               {1.0, -4.0, cplx(0.0, std::sqrt(2.0)), 1},
                                               {0.7, 3.0, cplx(0.5, 0.2), 1}};
  double worst = 0.0, worst_oracle = 0.0;
  for (const auto& t : triples) {
    const PeriodicPair pair = triple_pair(t);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        const cplx k(-1.5 + 0.75 * i, -1.5 + 0.75 * j + 0.01);
        const Matrix2 Z = monodromy(pair, k);
        const FloquetPoint cf = closed_form_monodromy(t, k);
        worst = std::max(worst, oracle::rel_diff(Z, cf.Z));
        worst_oracle = std::max(worst_oracle, oracle::rel_diff(cf.Z, oracle::exp_monodromy(t.lambda, t.alpha, t.omega, t.c, k)));
      }
  }
  const SolitonParams sp = soliton_params(0.5, 2.0);
  const PeriodicPair spair = soliton_pair(sp);
  double worst_sol = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const cplx k(-1.2 + 0.6 * i, -1.2 + 0.6 * j + 0.01);
      const FloquetPoint fp = anchored_point(spair, k, {});
      const cplx expect = 2.0 * I_unit * std::sin(2.0 * k * k * spair.tau);
      worst_sol = std::max(worst_sol, std::abs(fp.sqrtG - expect) / std::max(1.0, std::abs(expect)));
    }
  const double dt = seconds_since(t0);
  return {worst <= 1e-8 && worst_oracle <= 1e-8 && worst_sol <= 1e-8 && dt < 30.0,
          fmt("exponentials: max rel |dZ| = %.2e (closed form vs expm %.2e); soliton sqrt G: %.2e; %.1f s", worst,
              worst_oracle, worst_sol, dt)};
}

// 3. zero census of the zero pair with omega = 4 (tau = pi/2): G = -4 sin^2(2k^2 tau)
Outcome zero_census() {
  const auto t0 = std::chrono::steady_clock::now();
  const PeriodicPair pair = zero_pair(oracle::pi / 2.0);
  const Window w = Window::square(3.0);
  const ZeroSearch zs = find_zeros(pair, w, ZeroTarget::G);
  const double dt = seconds_since(t0);

  // k^2 = n: double zeros at +-sqrt(n), +-i sqrt(n) inside the square, order 4 at 0
  std::vector<RootMultiplicity> expect{{0.0, 4}};
  for (int n = 1; n <= 9; ++n) {
    const double r = std::sqrt(double(n));
    for (cplx z : {cplx(r, 0.0), cplx(-r, 0.0), cplx(0.0, r), cplx(0.0, -r)}) expect.push_back({z, 2});
  }
  int matched = 0, total = 0, listed_hits = 0;
  for (const auto& z : zs.zeros) total += z.multiplicity;
  for (const auto& e : expect) {
    for (const auto& z : zs.zeros) {
      if (std::abs(z.location - e.root) < 1e-3 && z.multiplicity == e.multiplicity) {
        ++matched;
        if (std::abs(e.root) < 1.5) ++listed_hits;
        break;
      }
    }
  }
  const bool ok = !zs.undecided && matched == static_cast<int>(expect.size()) &&
                  zs.zeros.size() == expect.size() && total == zs.total_winding && dt < 60.0;
  return {ok, fmt("%zu zeros found, %d/%zu expected matched (listed n = 1, 2 subset: %d/9), multiplicity sum %d, "
                  "winding %d, %.1f s",
                  zs.zeros.size(), matched, expect.size(), listed_hits, total, zs.total_winding, dt)};
}

bool has_odd_witness(const Verdict& v) {
  for (const auto& w : v.witnesses)
    if (w.parity == Parity::Odd && w.violating) return true;
  return false;
}

// 4. focusing families and gap points
Outcome focusing_families() {
  const auto t0 = std::chrono::steady_clock::now();
  int a_ok = 0, a_n = 0, b_ok = 0, b_n = 0, gap_ok = 0, gap_n = 0;
  std::string fails;
  for (double a : {0.5, 0.75, 1.0, 1.25, 1.5})
    for (double f : {1.2, 1.6, 2.0, 3.0, 4.0}) {
      const double w = f * a * a;
      const double sign = (a_n % 2) ? -1.0 : 1.0;
      const ExponentialTriple t{a, w, sign * a * std::sqrt(w - a * a), -1};
      const auto r = classify_triple(t);
      ++a_n;
      if (r.verdict.status == VerdictStatus::Consistent && r.tag.name == "F-1.3a") ++a_ok;
      else fails += fmt(" [1.3a a=%g w=%g: %s/%s]", a, w, to_string(r.verdict.status), r.tag.name.c_str());
    }
  for (double a : {0.5, 0.8, 1.0, 1.2, 1.5})
    for (double extra : {0.5, 2.0}) {
      const double w = -6.0 * a * a - extra;
      const ExponentialTriple t{a, w, cplx(0.0, a * std::sqrt(std::abs(w) + 2.0 * a * a)), -1};
      const auto r = classify_triple(t);
      ++b_n;
      if (r.verdict.status == VerdictStatus::Consistent && r.tag.name == "F-1.3b") ++b_ok;
      else fails += fmt(" [1.3b a=%g w=%g: %s/%s]", a, w, to_string(r.verdict.status), r.tag.name.c_str());
    }
  const std::vector<std::pair<double, cplx>> gap{{-5.0, 0.3},           {-3.0, 0.3},          {-1.0, 0.3},
                                                 {0.5, 0.3},            {0.9, 0.3},           {-5.0, cplx(0.3, 0.2)},
                                                 {-3.0, cplx(0.3, 0.2)}, {-1.0, cplx(0.2, -0.4)}, {0.5, cplx(0.1, 0.5)},
                                                 {0.9, cplx(-0.4, 0.1)}};
  for (const auto& [w, c] : gap) {
    const ExponentialTriple t{1.0, w, c, -1};
    const auto r = classify_triple(t);
    ++gap_n;
    if (r.verdict.status == VerdictStatus::Inconsistent && has_odd_witness(r.verdict) && r.tag.name == "none") ++gap_ok;
    else fails += fmt(" [gap w=%g c=%g%+gi: %s]", w, c.real(), c.imag(), to_string(r.verdict.status));
  }
  const double dt = seconds_since(t0);
  return {a_ok == a_n && b_ok == b_n && gap_ok == gap_n,
          fmt("F-1.3a %d/%d, F-1.3b %d/%d, gap inconsistent %d/%d, %.1f s", a_ok, a_n, b_ok, b_n, gap_ok, gap_n, dt) +
              fails};
}

// 5. defocusing families
Outcome defocusing_families() {
  const auto t0 = std::chrono::steady_clock::now();
  struct Sample {
    ExponentialTriple t;
    const char* tag;
  };
  std::vector<Sample> samples;
  for (auto [a, w] : {std::pair{1.0, -3.0}, std::pair{1.0, -0.5}, std::pair{2.0, -5.0}, std::pair{0.5, -0.1}}) {
    const double a2 = a * a;
    samples.push_back({{a, w, cplx(std::sqrt(std::pow(w + 3.0 * a2, 3) / (27.0 * a2)),
                                   std::pow(std::abs(w), 1.5) / (3.0 * std::sqrt(3.0) * a)), 1}, "D-1"});
  }
  for (auto [K, w, c2] : {std::tuple{1.0, -6.0, 0.5}, std::tuple{1.0, -10.0, 1.0}, std::tuple{0.7, -3.0, 0.3},
                          std::tuple{1.0, -5.0, 0.5}})
    samples.push_back({defocusing_kc2_triple(K, w, c2), "D-2"});
  for (auto [a, w] : {std::pair{1.0, -4.0}, std::pair{1.0, -5.0}, std::pair{0.5, -1.0}, std::pair{1.5, -8.0}})
    samples.push_back({{a, w, cplx(0.0, a * std::sqrt(-2.0 * a * a - w)), 1}, "D-3"});
  for (auto [a, w] : {std::pair{1.0, 3.0}, std::pair{1.0, 0.0 + 1e-3}, std::pair{0.5, 1.0}, std::pair{1.0, -0.5}})
    samples.push_back({{a, w, a * std::sqrt(w + a * a), 1}, "D-4"});
  for (auto [K, w, c2] : {std::tuple{1.0, -3.5, -0.2}, std::tuple{1.0, -3.2, -0.1}, std::tuple{0.5, -0.9, -0.03},
                          std::tuple{1.0, -3.0, -0.5}})
    samples.push_back({defocusing_kc2_triple(K, w, c2), "D-5"});

  int ok = 0, double_tags = 0;
  std::string fails;
  for (const auto& s : samples) {
    const auto tags = family_memberships(s.t);
    if (tags.size() > 1) ++double_tags;
    const auto r = classify_triple(s.t);
    if (r.verdict.status == VerdictStatus::Consistent && r.tag.name == s.tag && tags.size() == 1) ++ok;
    else
      fails += fmt(" [%s a=%g w=%g c=%g%+gi: %s/%s]", s.tag, s.t.alpha, s.t.omega, s.t.c.real(), s.t.c.imag(),
                   to_string(r.verdict.status), r.tag.name.c_str());
  }
  const double dt = seconds_since(t0);
  return {ok == static_cast<int>(samples.size()) && double_tags == 0,
          fmt("%d/%zu consistent with the expected tag, %d double tags, %.1f s", ok, samples.size(), double_tags, dt) +
              fails};
}

// 6. focusing pairs: G real and <= 0 on the real line
Outcome focusing_real_line() {
  const auto t0 = std::chrono::steady_clock::now();
  oracle::Gen g(606);
  std::vector<double> ks;
  for (int j = 0; j < 200; ++j) ks.push_back(g.uniform(-5.0, 5.0));
  int ok = 0;
  double worst = -1e300;
  for (int trial = 0; trial < 10; ++trial) {
    const PeriodicPair p = g.pair(-1, 3, 1.0, g.uniform(1.0, 3.0));
    if (focusing_realline_check(p, ks, 1e-9)) ++ok;
    for (double k : ks) {
      const Matrix2 Z = monodromy(p, k);
      const cplx G = Z.trace() * Z.trace() - 4.0;
      worst = std::max({worst, G.real(), std::abs(G.imag())});
    }
  }
  const double dt = seconds_since(t0);
  return {ok == 10, fmt("%d/10 pairs pass, max(Re G, |Im G|) = %.2e, %.1f s", ok, worst, dt)};
}

// 7. defocusing exponentials: |Q^b| = 1 where G > 0.1 on the real line.
// Triples come from a seeded draw; a triple counts once the closed-form G exceeds 0.1 somewhere
// on the real sample grid (many defocusing triples have G <= 0 on all of it)
Outcome defocusing_qb() {
  const auto t0 = std::chrono::steady_clock::now();
  oracle::Gen g(707);
  double worst = 0.0;
  int used = 0, triples = 0, drawn = 0;
  std::string which;
  while (triples < 5 && drawn < 200) {
    ++drawn;
    // |omega| >= 1 keeps tau <= 2 pi, long periods make continuation slow
    const double a = g.uniform(0.5, 1.5);
    const double w = (g.uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0) * g.uniform(1.0, 3.0);
    const ExponentialTriple t{a, w, g.complex_in(1.0), 1};
    std::vector<double> ks;
    for (int j = 0; j < 600; ++j) {
      const double k = -3.0 + 6.0 * (j + 0.5) / 600.0;
      if (closed_form_monodromy(t, k).G.real() > 0.1) ks.push_back(k);
    }
    if (ks.empty()) continue;
    ++triples;
    which += fmt(" (%.3g, %.3g, %.3g%+.3gi)", t.alpha, t.omega, t.c.real(), t.c.imag());
    const PeriodicPair pair = triple_pair(t);
    const std::size_t stride = std::max<std::size_t>(1, ks.size() / 25);
    for (std::size_t j = 0; j < ks.size(); j += stride) {
      const cplx q = qb_ratio(pair, cplx(ks[j], 0.0));
      worst = std::max(worst, std::abs(std::abs(q) - 1.0));
      ++used;
    }
  }
  const double dt = seconds_since(t0);
  return {worst <= 1e-8 && triples == 5,
          fmt("%d triples (%d drawn), %d real points with G > 0.1, max ||Q| - 1| = %.2e, %.1f s", triples, drawn, used,
              worst, dt) + ";" + which};
}

// 8. decay of mu1 - E for a perturbed soliton
Outcome volterra_decay() {
  const auto t0 = std::chrono::steady_clock::now();
  const SolitonParams p = soliton_params(0.0, 4.0);
  const PeriodicPair pair = soliton_pair(p);
  const double T = 400.0;
  auto bump = [](double t) { return 1e-2 * std::pow(1.0 + t, -3.5) * std::polar(1.0, 4.0 * t); };
  const BoundaryTraces tr{[&](double t) { return p.alpha * std::polar(1.0, 4.0 * t) + bump(t); },
                          [&](double t) { return p.c * std::polar(1.0, 4.0 * t) + bump(t); }};
  BoundaryOptions bo;
  bo.keep_profile = true;
  bo.points_per_period = 32;
  std::string detail;
  bool ok = true;
  for (cplx k : {cplx(1.0, 0.5), cplx(0.5, 1.0), cplx(0.7, 0.7)}) {
    const BoundaryResult r = boundary_spectra(pair, tr, k, T, bo);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t j = 0; j < r.times.size(); ++j) {
      const double t = r.times[j];
      if (t < 10.0 || t > T / 4.0) continue;
      const double d = std::max(std::abs(r.psi_top[j] - r.e_top[j]), std::abs(r.psi_bottom[j] - r.e_bottom[j]));
      const double x = std::log(1.0 + t), y = std::log(d);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    ok = ok && std::abs(slope + 2.5) <= 0.3;
    detail += fmt("k=%g%+gi slope %.3f; ", k.real(), k.imag(), slope);
  }
  return {ok, detail + fmt("%.1f s", seconds_since(t0))};
}

// 9. conjugation symmetries
Outcome symmetry_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  oracle::Gen g(909);
  double wZ = 0, wG = 0, wz = 0, wA = 0;
  int draws = 0, skipped = 0;
  while (draws < 100) {
    const int lambda = g.integer(0, 1) ? 1 : -1;
    const PeriodicPair p = g.pair(lambda, 3, 1.0, g.uniform(1.0, 3.0));
    const cplx k(g.uniform(-1.5, 1.5), g.uniform(0.05, 1.5));
    const cplx kc = std::conj(k);
    FloquetPoint a, b;
    try {
      a = anchored_point(p, k, {});
      b = anchored_point(p, kc, {});
    } catch (const NumericalError&) {
      ++skipped;
      continue;
    }
    if (!a.Sb_defined || !b.Sb_defined) {
      ++skipped;
      continue;
    }
    const Matrix2 Z = monodromy(p, k), Zc = monodromy(p, kc);
    wZ = std::max(wZ, oracle::rel_diff(Z, oracle::conj_image(Zc, lambda)));
    wG = std::max(wG, std::abs(a.G - std::conj(b.G)) / std::max(1.0, std::abs(a.G)));
    wz = std::max(wz, std::abs(a.z * std::conj(b.z) - 1.0));
    wA = std::max(wA, std::abs(a.Sb.m22 - std::conj(b.Sb.m22)) / std::max(1.0, std::abs(a.Sb.m22)));
    ++draws;
  }
  const double dt = seconds_since(t0);
  const bool ok = wZ <= 1e-9 && wG <= 1e-9 && wz <= 1e-9 && wA <= 1e-9;
  return {ok, fmt("100 draws (%d redrawn): Z %.1e, G %.1e, z %.1e, A^b %.1e, %.1f s", skipped, wZ, wG, wz, wA, dt)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"soliton oracle identities", soliton_identities},
      {"monodromy cross-validation", monodromy_cross_validation},
      {"zero census", zero_census},
      {"focusing family reproduction", focusing_families},
      {"defocusing family reproduction", defocusing_families},
      {"focusing real-line sign of G", focusing_real_line},
      {"defocusing |Q^b| = 1", defocusing_qb},
      {"Volterra decay slope", volterra_decay},
      {"conjugation symmetries", symmetry_suite},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("criterion %zu %s: %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("criterion 10 OUT OF SCOPE: long-time PDE asymptotics and Riemann-Hilbert admissibility are not "
              "computed; criteria 1-9 stand in for them\n");
  return failures == 0 ? 0 : 1;
}
