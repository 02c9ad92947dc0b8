#include "nlsfloquet/branch.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "nlsfloquet/errors.hpp"

namespace nlsf {

namespace {

constexpr double kPi = std::numbers::pi;

// log z shifted by the nearest multiple of i pi; small near zeros of G
cplx local_offset(cplx L) { return L - I_unit * kPi * std::round(L.imag() / kPi); }

}  // namespace

BranchTracker::BranchTracker(const PeriodicPair& pair, ContinuationOptions opts)
    : pair_(pair), opts_(opts) {}

BranchValue BranchTracker::evaluate(cplx k, cplx predicted, double* ratio) const {
  ++evaluations_;
  BranchValue v;
  v.k = k;
  v.mono = monodromy_scaled(pair_, k, opts_.ode_tol);
  const double s = v.mono.log_scale;
  // eigenvalues of Zs solve x^2 - tr x + e^{-2s} = 0
  const cplx q = 0.5 * v.mono.Zs.trace();
  const cplx disc = std::sqrt(q * q - std::exp(-2.0 * s));
  const cplx x1 = q + disc;
  const cplx x2 = q - disc;
  const cplx big = std::abs(x1) >= std::abs(x2) ? x1 : x2;
  const cplx Lb = std::log(big) + s;

  std::array<double, 6> dist{};
  std::array<cplx, 6> cand{};
  int idx = 0;
  for (double sign : {1.0, -1.0}) {
    const cplx base = sign * Lb;
    const double n0 = std::round((predicted - base).imag() / (2.0 * kPi));
    for (double dn : {-1.0, 0.0, 1.0}) {
      cand[idx] = base + I_unit * (2.0 * kPi * (n0 + dn));
      dist[idx] = std::abs(cand[idx] - predicted);
      ++idx;
    }
  }
  int best = 0;
  for (int i = 1; i < 6; ++i)
    if (dist[i] < dist[best]) best = i;
  double second = 1e300;
  for (int i = 0; i < 6; ++i)
    if (i != best) second = std::min(second, dist[i]);
  v.logz = cand[best];
  if (ratio) *ratio = second > 0.0 ? dist[best] / second : 1.0;
  return v;
}

BranchValue BranchTracker::anchor(bool upper, double radius) {
  double R = radius;
  for (int attempt = 0; attempt < 6; ++attempt, R *= 2.0) {
    const cplx kA = std::polar(R, upper ? kPi / 8.0 : -kPi / 8.0);
    const cplx pred = -2.0 * I_unit * kA * kA * pair_.tau;
    double ratio = 1.0;
    const BranchValue v = evaluate(kA, pred, &ratio);
    const double expected = std::abs(pred.real());
    if (ratio <= 0.25 && std::abs(v.logz - pred) <= 0.25 * expected) return v;
  }
  throw NumericalError(ErrorKind::ContinuationAmbiguous,
                       "anchor self-check failed: log z not close to -2ik^2 tau");
}

BranchValue BranchTracker::step_to(const BranchValue& from, cplx k) {
  const cplx start = from.k;
  const double length = std::abs(k - start);
  if (length == 0.0) return from;
  const cplx dir = (k - start) / length;

  BranchValue cur = from;
  bool have_prev = false;
  cplx prev_L{};
  double prev_h = 0.0;
  double done = 0.0;
  double h = std::min(opts_.max_step, length);
  while (done < length) {
    if (done + h > length) h = length - done;
    const bool last = done + h >= length * (1.0 - 1e-14);
    const cplx kt = last ? k : start + dir * (done + h);
    const cplx pred = have_prev ? cur.logz + (cur.logz - prev_L) * (h / prev_h) : cur.logz;
    double ratio = 1.0;
    BranchValue nv = evaluate(kt, pred, &ratio);

    bool ok = ratio <= 0.25 && std::abs(nv.logz - pred) <= 0.5;
    // near a zero of G: sqrt(G) ~ -2 sinh(u) may not jump by more than half its size.
    // Both ends count, a long step can land next to a zero from far away
    const double u_min = std::min(std::abs(local_offset(cur.logz)), std::abs(local_offset(nv.logz)));
    if (ok && u_min < 1.0) ok = std::abs(nv.logz - cur.logz) <= 0.5 * u_min;
    if (!ok) {
      h *= 0.5;
      if (h < opts_.min_step)
        throw NumericalError(ErrorKind::ContinuationAmbiguous,
                             "step control cannot separate the two branches of log z");
      continue;
    }
    prev_L = cur.logz;
    prev_h = h;
    have_prev = true;
    cur = nv;
    done = last ? length : done + h;
    h = std::min(2.0 * h, opts_.max_step);
  }
  return cur;
}

BranchValue BranchTracker::follow(const BranchValue& from, const std::vector<cplx>& vertices) {
  BranchValue cur = from;
  for (const cplx& v : vertices) cur = step_to(cur, v);
  return cur;
}

std::vector<cplx> BranchTracker::path(cplx from, cplx to, const std::vector<cplx>& avoid,
                                      bool mirror) const {
  const double r = 3.0 * opts_.path_tol;
  const double len = std::abs(to - from);
  std::vector<cplx> out;
  if (len == 0.0) return out;
  const cplx u = (to - from) / len;
  const cplx side = mirror ? -I_unit * u : I_unit * u;

  struct Detour {
    double t_in, t_out;
    cplx p;
  };
  std::vector<Detour> detours;
  for (const cplx& p : avoid) {
    if (std::abs(p - to) < r || std::abs(p - from) < r) continue;
    const cplx rel = (p - from) * std::conj(u);
    const double t0 = rel.real();
    const double d = rel.imag();
    if (std::abs(d) >= r) continue;
    const double half = std::sqrt(r * r - d * d);
    if (t0 + half <= 0.0 || t0 - half >= len) continue;
    detours.push_back({t0 - half, t0 + half, p});
  }
  std::sort(detours.begin(), detours.end(),
            [](const Detour& a, const Detour& b) { return a.t_in < b.t_in; });

  for (const auto& dt : detours) {
    const cplx in = from + u * dt.t_in;
    const cplx outp = from + u * dt.t_out;
    out.push_back(in);
    const double a_in = std::arg(in - dt.p);
    const double a_out = std::arg(outp - dt.p);
    const double a_side = std::arg(side);
    auto mod2pi = [](double x) {
      x = std::fmod(x, 2.0 * kPi);
      return x < 0.0 ? x + 2.0 * kPi : x;
    };
    double span = mod2pi(a_out - a_in);
    if (mod2pi(a_side - a_in) > span) span -= 2.0 * kPi;  // go clockwise through the side
    const int n = std::max(4, static_cast<int>(std::ceil(std::abs(span) / (kPi / 12.0))));
    for (int j = 1; j <= n; ++j) out.push_back(dt.p + r * std::polar(1.0, a_in + span * j / n));
  }
  out.push_back(to);
  return out;
}

double default_anchor_radius(cplx target, const std::vector<cplx>& avoid) {
  double m = std::abs(target);
  for (const cplx& p : avoid) m = std::max(m, std::abs(p));
  return 1.5 * m + 1.5;
}

namespace {

BranchValue continue_to(const PeriodicPair& pair, cplx k_target, const std::vector<cplx>& avoid,
                        const ContinuationOptions& opts) {
  BranchTracker tr(pair, opts);
  const bool upper = k_target.imag() >= 0.0;
  const double R =
      opts.anchor_radius > 0.0 ? opts.anchor_radius : default_anchor_radius(k_target, avoid);
  const BranchValue a = tr.anchor(upper, R);
  return tr.follow(a, tr.path(a.k, k_target, avoid, !upper));
}

}  // namespace

Discriminant anchored_branch(const PeriodicPair& pair, cplx k_target,
                             const std::vector<cplx>& avoid, const ContinuationOptions& opts) {
  const BranchValue v = continue_to(pair, k_target, avoid, opts);
  Discriminant d;
  const double s = v.mono.log_scale;
  const cplx trs = v.mono.Zs.trace();
  d.G = std::exp(2.0 * s) * (trs * trs - 4.0 * std::exp(-2.0 * s));
  d.logz = v.logz;
  d.z = std::exp(v.logz);
  d.sqrtG = v.sqrtG();
  d.OmegaTilde = v.omega_tilde(pair.tau);
  d.anchored = true;
  return d;
}

FloquetPoint anchored_point(const PeriodicPair& pair, cplx k_target, const std::vector<cplx>& avoid,
                            const ContinuationOptions& opts) {
  const BranchValue v = continue_to(pair, k_target, avoid, opts);
  return floquet_point(pair, k_target, v.mono, v.logz);
}

}  // namespace nlsf
