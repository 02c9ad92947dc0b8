#include "nlsfloquet/exponential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlsfloquet/errors.hpp"

namespace nlsf {

namespace {

constexpr double kPi = std::numbers::pi;

// cos(x) and sin(x)/x as series in x^2, for small |x|
cplx cos_series(cplx x2) {
  cplx term = 1.0, sum = 1.0;
  for (int n = 1; n < 8; ++n) {
    term *= -x2 / static_cast<double>((2 * n - 1) * (2 * n));
    sum += term;
  }
  return sum;
}

cplx sinc_series(cplx x2) {
  cplx term = 1.0, sum = 1.0;
  for (int n = 1; n < 8; ++n) {
    term *= -x2 / static_cast<double>((2 * n) * (2 * n + 1));
    sum += term;
  }
  return sum;
}

}  // namespace

void validate_triple(const ExponentialTriple& t) {
  if (!(t.alpha > 0.0) || !std::isfinite(t.alpha))
    throw InputError(InputError::Kind::Validation, "alpha must be > 0");
  if (t.omega == 0.0 || !std::isfinite(t.omega))
    throw InputError(InputError::Kind::Validation, "omega must be nonzero");
  if (t.lambda != 1 && t.lambda != -1)
    throw InputError(InputError::Kind::Validation, "lambda must be +1 or -1");
  if (!std::isfinite(t.c.real()) || !std::isfinite(t.c.imag()))
    throw InputError(InputError::Kind::Validation, "c must be finite");
}

double triple_tau(const ExponentialTriple& t) { return 2.0 * kPi / std::abs(t.omega); }

PeriodicPair triple_pair(const ExponentialTriple& t) {
  validate_triple(t);
  return single_exponential_pair(t.lambda, t.alpha, t.omega, t.c);
}

Polynomial omega_squared(const ExponentialTriple& t) {
  const double lam = t.lambda;
  const double a = t.alpha;
  const double h = t.omega / 2.0 + lam * a * a;
  return Polynomial{{h * h - lam * std::norm(t.c), 4.0 * lam * a * t.c.imag(), 2.0 * t.omega, 0.0,
                     4.0}};
}

cplx omega_of(const ExponentialTriple& t, cplx k) {
  const cplx w = std::sqrt(omega_squared(t)(k));
  const cplx ref = 2.0 * k * k + t.omega / 2.0;
  return std::abs(w - ref) <= std::abs(-w - ref) ? w : -w;
}

FloquetPoint closed_form_monodromy(const ExponentialTriple& t, cplx k) {
  validate_triple(t);
  const double tau = triple_tau(t);
  const double lam = t.lambda;
  const double a = t.alpha;
  const cplx W2 = omega_squared(t)(k);
  const cplx W = omega_of(t, k);
  const cplx x2 = W2 * tau * tau;

  cplx cs, sinc;  // cos(W tau), sin(W tau)/W
  if (std::abs(W * tau) < 1e-2) {
    cs = cos_series(x2);
    sinc = tau * sinc_series(x2);
  } else {
    cs = std::cos(W * tau);
    sinc = std::sin(W * tau) / W;
  }
  const cplx d = (4.0 * k * k + 2.0 * lam * a * a + t.omega) / (2.0 * I_unit);
  const cplx sn = W * sinc;  // sin(W tau)

  FloquetPoint fp;
  fp.k = k;
  fp.Z.m11 = -(cs + d * sinc);
  fp.Z.m22 = -(cs - d * sinc);
  fp.Z.m12 = -(2.0 * a * k + I_unit * t.c) * sinc;
  fp.Z.m21 = -lam * (2.0 * a * k - I_unit * std::conj(t.c)) * sinc;
  fp.G = -4.0 * sn * sn;
  fp.sqrtG = -2.0 * I_unit * sn;
  fp.z = -std::exp(-I_unit * W * tau);
  fp.OmegaTilde = W - t.omega / 2.0;
  fp.logz = -I_unit * fp.OmegaTilde * tau;

  const cplx H = W - 2.0 * k * k - lam * a * a - t.omega / 2.0;
  const cplx den = 2.0 * W - H;
  const double scale = 1.0 + std::abs(k) * std::abs(k);
  if (std::abs(W) > 1e-10 * scale && std::abs(den) > 1e-14 * scale) {
    const cplx pre = std::sqrt(den / (2.0 * W));
    fp.Sb = Matrix2{pre, pre * (t.c - 2.0 * I_unit * a * k) / den,
                    pre * lam * (std::conj(t.c) + 2.0 * I_unit * a * k) / den, pre};
    fp.Sb_defined = true;
  }
  return fp;
}

Matrix2 background_explicit(const ExponentialTriple& t, double time, cplx k) {
  const FloquetPoint fp = closed_form_monodromy(t, k);
  if (!fp.Sb_defined)
    throw NumericalError(ErrorKind::BranchPointProximity, "S^b undefined near a branch point");
  const cplx W = omega_of(t, k);
  const Matrix2 L = Matrix2::diag(std::polar(1.0, t.omega * time / 2.0),
                                  std::polar(1.0, -t.omega * time / 2.0));
  const Matrix2 R = Matrix2::diag(std::exp(-I_unit * W * time), std::exp(I_unit * W * time));
  return L * fp.Sb * R;
}

// ---------------------------------------------------------------------------
// families

namespace {

struct Checker {
  double tol;
  std::string note;
  // x approximately equals y
  bool eq(double x, double y, double scale) const { return std::abs(x - y) <= tol * (1.0 + scale); }
  bool le(double x, double y) {
    if (std::abs(x - y) <= tol * (1.0 + std::abs(y)) && x != y) note = "inequality holds within tolerance only";
    return x <= y + tol * (1.0 + std::abs(y));
  }
  // a point on the excluded boundary (to tolerance) fails; the sets are meant to be disjoint there
  bool lt(double x, double y) {
    if (std::abs(x - y) <= tol * (1.0 + std::abs(y))) {
      note = "rejected: on the excluded boundary of a strict inequality";
      return false;
    }
    return x < y;
  }
};

// real positive roots of 4K^3 + omega K + alpha c2 = 0
std::vector<double> kc2_roots(double omega, double alpha, double c2) {
  std::vector<double> out;
  for (const auto& r : poly_roots(Polynomial{{alpha * c2, omega, 0.0, 4.0}}, 1e-12)) {
    if (std::abs(r.root.imag()) > 1e-6 * (1.0 + std::abs(r.root))) continue;
    double K = r.root.real();
    for (int it = 0; it < 30; ++it) {
      const double f = 4.0 * K * K * K + omega * K + alpha * c2;
      const double df = 12.0 * K * K + omega;
      if (df == 0.0) break;
      const double step = f / df;
      K -= step;
      if (std::abs(step) < 1e-15 * (1.0 + std::abs(K))) break;
    }
    if (!std::isfinite(K))
      throw NumericalError(ErrorKind::FamilySolveFailure, "K elimination diverged");
    // near a double root Newton stalls at ~sqrt(eps); snap to the stationary point 12K^2 = -omega
    if (omega < 0.0 && std::abs(12.0 * K * K + omega) < 1e-5 * (1.0 + std::abs(omega))) {
      const double Kd = std::copysign(std::sqrt(-omega / 12.0), K);
      auto f = [&](double x) { return std::abs(4.0 * x * x * x + omega * x + alpha * c2); };
      if (f(Kd) <= 1e-9 * (1.0 + std::abs(alpha * c2))) K = Kd;
    }
    if (K > 0.0 && std::none_of(out.begin(), out.end(), [&](double q) { return std::abs(q - K) < 1e-12 * (1.0 + K); }))
      out.push_back(K);
  }
  return out;
}

}  // namespace

std::vector<FamilyTag> family_memberships(const ExponentialTriple& t, double tol) {
  validate_triple(t);
  std::vector<FamilyTag> out;
  const double a = t.alpha, w = t.omega;
  const double a2 = a * a;
  const double re = t.c.real(), im = t.c.imag();
  const double cabs = std::abs(t.c);

  auto add = [&](const char* name, Checker& ch, std::map<std::string, double> params = {}) {
    FamilyTag tag;
    tag.name = name;
    tag.parameters = std::move(params);
    tag.note = ch.note;
    out.push_back(tag);
  };

  if (t.lambda == -1) {
    {
      Checker ch{tol, {}};
      if (ch.le(a2, w) && ch.eq(im, 0.0, cabs) && ch.eq(re * re, a2 * (w - a2), re * re + a2 * std::abs(w)))
        add("F-1.3a", ch);
    }
    {
      Checker ch{tol, {}};
      if (ch.le(w, -6.0 * a2) && ch.eq(re, 0.0, cabs) && ch.eq(im, a * std::sqrt(std::abs(w) + 2.0 * a2), cabs))
        add("F-1.3b", ch);
    }
    return out;
  }

  {  // D-1
    Checker ch{tol, {}};
    if (ch.le(-3.0 * a2, w) && ch.lt(w, 0.0)) {
      const double s = w + 3.0 * a2;
      const double re2 = s * s * s / (27.0 * a2);
      const double imv = std::pow(std::abs(w), 1.5) / (3.0 * std::sqrt(3.0) * a);
      if (ch.eq(re * re, re2, re * re + re2) && ch.eq(im, imv, cabs)) add("D-1", ch);
    }
  }
  {  // D-3
    Checker ch{tol, {}};
    if (ch.lt(w, -3.0 * a2) && ch.eq(re, 0.0, cabs) &&
        ch.eq(im, a * std::sqrt(std::max(0.0, -2.0 * a2 - w)), cabs))
      add("D-3", ch);
  }
  {  // D-4
    Checker ch{tol, {}};
    if (ch.le(0.0, w + a2) && ch.eq(im, 0.0, cabs) && ch.eq(re * re, a2 * (w + a2), re * re + a2 * std::abs(w)))
      add("D-4", ch);
  }
  // D-2 and D-5
  const double c2 = im;
  if (std::abs(c2) > tol) {
    for (double K : kc2_roots(w, a, c2)) {
      const double K2 = K * K;
      const double h = a2 + w / 2.0;
      const double arg = h * h - c2 * c2 - 2.0 * K2 * (6.0 * K2 + w);
      Checker base{tol, {}};
      if (!base.le(0.0, arg)) continue;
      if (!base.eq(re * re, std::max(0.0, arg), re * re + std::abs(arg))) continue;
      const double bound = -(4.0 * K2 + w) / 2.0;
      {
        Checker ch = base;
        if (ch.lt(-12.0 * K2, w) && ch.lt(w, -4.0 * K2) && ch.lt(0.0, c2) && ch.le(c2, bound))
          add("D-2", ch, {{"K", K}, {"c2", c2}});
      }
      {
        Checker ch = base;
        if (ch.lt(-4.0 * K2, w) && ch.le(w, -3.0 * K2) && ch.le(bound, c2) && ch.lt(c2, 0.0))
          add("D-5", ch, {{"K", K}, {"c2", c2}});
      }
    }
  }
  return out;
}

FamilyTag family_tag(const ExponentialTriple& t, double tol) {
  const auto all = family_memberships(t, tol);
  return all.empty() ? FamilyTag{} : all.front();
}

ExponentialTriple defocusing_kc2_triple(double K, double omega, double c2, int sign) {
  ExponentialTriple t;
  t.lambda = 1;
  t.omega = omega;
  t.alpha = -(4.0 * K * K * K + omega * K) / c2;
  const double h = t.alpha * t.alpha + omega / 2.0;
  const double arg = h * h - c2 * c2 - 2.0 * K * K * (6.0 * K * K + omega);
  if (arg < 0.0 || !(t.alpha > 0.0))
    throw InputError(InputError::Kind::Validation, "(K, omega, c2) does not give a real triple");
  t.c = cplx(sign * std::sqrt(arg), c2);
  return t;
}

Window default_exponential_window(const ExponentialTriple& t) {
  return Window::square(2.0 * (1.0 + std::sqrt(std::abs(t.omega)) + t.alpha +
                               std::sqrt(std::abs(t.c))));
}

// ---------------------------------------------------------------------------

ExponentialClassification classify_triple(const ExponentialTriple& t,
                                          const std::vector<CutStrategy>& strategies,
                                          const SpectrumOptions& opts) {
  validate_triple(t);
  const PeriodicPair pair = triple_pair(t);
  ExponentialClassification out;
  const Window window = default_exponential_window(t);

  out.omega2_roots = poly_roots(omega_squared(t), 1e-4);
  for (const auto& r : out.omega2_roots) {
    cplx loc = r.root;
    if (std::abs(loc.imag()) < 1e-8 * (1.0 + std::abs(loc))) loc = {loc.real(), 0.0};
    ZeroRecord z;
    try {
      z = make_zero_record(pair, loc, ZeroTarget::G, opts);
      if (z.multiplicity != r.multiplicity)
        z.note = "winding multiplicity " + std::to_string(z.multiplicity) +
                 " differs from root clustering " + std::to_string(r.multiplicity);
    } catch (const NumericalError& e) {
      z.location = loc;
      z.multiplicity = r.multiplicity;
      z.parity = r.multiplicity % 2 ? Parity::Odd : Parity::Even;
      z.half_plane = half_plane_of(loc, 1e-2 * opts.loc_tol);
      z.note = std::string("multiplicity from root clustering: ") + e.what();
    }
    out.zeros.push_back(z);
  }

  try {
    out.verdict = verdict_from_zeros(pair, out.zeros, window, strategies, opts);
  } catch (const NumericalError& e) {
    out.verdict.status = VerdictStatus::Undecided;
    out.verdict.window = window;
    out.verdict.cut_strategies = strategies;
    out.verdict.notes = e.what();
  }
  try {
    const auto tags = family_memberships(t);
    if (!tags.empty()) out.tag = tags.front();
    if (tags.size() > 1) out.verdict.notes += "triple matches more than one family; ";
  } catch (const NumericalError& e) {
    out.tag.name = "undecided";
    out.tag.note = e.what();
  }

  const bool fam = out.tag.name != "none" && out.tag.name != "undecided";
  if ((out.verdict.status == VerdictStatus::Consistent && !fam) ||
      (out.verdict.status == VerdictStatus::Inconsistent && fam)) {
    out.mismatch = true;
    out.verdict.notes += "ClassifierMismatch: generic pipeline and family membership disagree; ";
  }
  return out;
}

}  // namespace nlsf
