#include "nlsfloquet/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <utility>

#include "nlsfloquet/errors.hpp"

namespace nlsf {

namespace {
constexpr double kPi = std::numbers::pi;

double mod2pi(double x) {
  x = std::fmod(x, 2.0 * kPi);
  return x < 0.0 ? x + 2.0 * kPi : x;
}
}  // namespace

const char* to_string(ZeroTarget v) {
  switch (v) {
    case ZeroTarget::G: return "G";
    case ZeroTarget::Z12: return "Z12";
    case ZeroTarget::Z21: return "Z21";
  }
  return "?";
}
const char* to_string(Parity v) { return v == Parity::Odd ? "odd" : "even"; }
const char* to_string(HalfPlane v) {
  switch (v) {
    case HalfPlane::Upper: return "upper";
    case HalfPlane::Lower: return "lower";
    case HalfPlane::RealAxis: return "real-axis";
  }
  return "?";
}
const char* to_string(DomainLabel v) {
  switch (v) {
    case DomainLabel::D1: return "D1";
    case DomainLabel::D2: return "D2";
    case DomainLabel::D3: return "D3";
    case DomainLabel::D4: return "D4";
    case DomainLabel::Boundary: return "boundary";
  }
  return "?";
}
const char* to_string(CutStrategy v) {
  switch (v) {
    case CutStrategy::Radial: return "radial";
    case CutStrategy::LevelCurve: return "level";
    case CutStrategy::Vertical: return "vertical";
  }
  return "?";
}
const char* to_string(VerdictStatus v) {
  switch (v) {
    case VerdictStatus::Consistent: return "consistent";
    case VerdictStatus::Inconsistent: return "inconsistent";
    case VerdictStatus::Undecided: return "undecided";
  }
  return "?";
}

CutStrategy parse_cut_strategy(const std::string& s) {
  if (s == "radial") return CutStrategy::Radial;
  if (s == "level") return CutStrategy::LevelCurve;
  if (s == "vertical") return CutStrategy::Vertical;
  throw InputError(InputError::Kind::Validation, "unknown cut strategy '" + s + "'");
}

double Window::radius() const {
  const double x = std::max(std::abs(xmin), std::abs(xmax));
  const double y = std::max(std::abs(ymin), std::abs(ymax));
  return std::hypot(x, y);
}

// ---------------------------------------------------------------------------
// zero search

cplx zero_target_value(const PeriodicPair& pair, ZeroTarget target, cplx k, double tol) {
  const ScaledMonodromy m = monodromy_scaled(pair, k, tol);
  const double s = m.log_scale;
  switch (target) {
    case ZeroTarget::G: {
      const cplx trs = m.Zs.trace();
      const double e2 = std::exp(-2.0 * s);
      return (trs * trs - 4.0 * e2) / (e2 + std::norm(trs));
    }
    case ZeroTarget::Z12: return m.Zs.m12 / (std::exp(-s) + m.Zs.max_abs());
    case ZeroTarget::Z21: return m.Zs.m21 / (std::exp(-s) + m.Zs.max_abs());
  }
  return 0.0;
}

namespace {

// unscaled G, Z12 or Z21
cplx raw_target(const PeriodicPair& pair, ZeroTarget target, cplx k, double tol) {
  const Matrix2 Z = monodromy(pair, k, tol);
  switch (target) {
    case ZeroTarget::G: return Z.trace() * Z.trace() - 4.0;
    case ZeroTarget::Z12: return Z.m12;
    case ZeroTarget::Z21: return Z.m21;
  }
  return 0.0;
}

class CachedTarget {
 public:
  CachedTarget(const PeriodicPair& pair, ZeroTarget target, double tol)
      : pair_(pair), target_(target), tol_(tol) {}

  cplx operator()(cplx k) {
    const auto key = std::make_pair(std::llround(k.real() * 1e12), std::llround(k.imag() * 1e12));
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    ++evaluations;
    const cplx v = zero_target_value(pair_, target_, k, tol_);
    cache_.emplace(key, v);
    return v;
  }

  std::size_t evaluations = 0;

 private:
  const PeriodicPair& pair_;
  ZeroTarget target_;
  double tol_;
  std::map<std::pair<long long, long long>, cplx> cache_;
};

struct Cell {
  double x0, x1, y0, y1;
  int count;
  int depth;
  double diameter() const { return std::hypot(x1 - x0, y1 - y0); }
  cplx center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
};

// G oscillates like sin^2(2k^2 tau); keep the phase change per sample below pi/4
int samples_for(double x0, double x1, double y0, double y1, double tau, int n_min) {
  const double kmax = std::hypot(std::max(std::abs(x0), std::abs(x1)),
                                 std::max(std::abs(y0), std::abs(y1)));
  const double edge = std::max(x1 - x0, y1 - y0);
  const double per_edge = 8.0 * kmax * tau * edge / (kPi / 4.0);
  return 4 * std::max((n_min + 3) / 4, static_cast<int>(std::ceil(per_edge)));
}

int cell_winding(CachedTarget& f, double x0, double x1, double y0, double y1, double tau,
                 int n_min) {
  WindingOptions o;
  o.n_samples = samples_for(x0, x1, y0, y1, tau, n_min);
  return winding_number([&f](cplx k) { return f(k); }, Contour::rectangle(x0, x1, y0, y1), o);
}

// multiplicity-aware Newton on the unscaled target
cplx refine_zero(const PeriodicPair& pair, ZeroTarget target, cplx k0, int m, double loc_tol,
                 double tol) {
  cplx k = k0;
  double best = std::abs(raw_target(pair, target, k, tol));
  for (int it = 0; it < 8; ++it) {
    const double h = 1e-6 * (1.0 + std::abs(k));
    const cplx f = raw_target(pair, target, k, tol);
    const cplx df = (raw_target(pair, target, k + h, tol) - raw_target(pair, target, k - h, tol)) /
                    (2.0 * h);
    if (df == 0.0) break;
    const cplx step = static_cast<double>(m) * f / df;
    const cplx kn = k - step;
    if (std::abs(kn - k0) > loc_tol) break;
    const double fn = std::abs(raw_target(pair, target, kn, tol));
    if (!(fn <= best)) break;
    best = fn;
    k = kn;
    if (std::abs(step) < 1e-13 * (1.0 + std::abs(k))) break;
  }
  return k;
}

}  // namespace

HalfPlane half_plane_of(cplx k, double tol) {
  if (std::abs(k.imag()) <= tol) return HalfPlane::RealAxis;
  return k.imag() > 0.0 ? HalfPlane::Upper : HalfPlane::Lower;
}

ZeroRecord make_zero_record(const PeriodicPair& pair, cplx location, ZeroTarget target,
                            const SpectrumOptions& opts) {
  CachedTarget f(pair, target, opts.ode_tol);
  WindingOptions o;
  o.n_samples = opts.n_samples;
  const int m = winding_number([&f](cplx k) { return f(k); },
                               Contour::circle(location, 2.0 * opts.loc_tol), o);
  if (m < 1) throw NumericalError(ErrorKind::ZeroOnContour, "no zero enclosed at given location");
  ZeroRecord r;
  r.location = location;
  r.multiplicity = m;
  r.parity = m % 2 ? Parity::Odd : Parity::Even;
  r.kind = target;
  r.half_plane = half_plane_of(location, 1e-2 * opts.loc_tol);
  if (r.half_plane == HalfPlane::RealAxis) r.location = {location.real(), 0.0};
  return r;
}

ZeroSearch find_zeros(const PeriodicPair& pair, const Window& window, ZeroTarget target,
                      const SpectrumOptions& opts) {
  ZeroSearch out;
  CachedTarget f(pair, target, opts.ode_tol);
  const int n = std::max(64, opts.n_samples);

  // total winding, nudging the window outward if a zero sits on it
  Window w = window;
  bool ok = false;
  for (int attempt = 0; attempt < 3 && !ok; ++attempt) {
    try {
      out.total_winding = cell_winding(f, w.xmin, w.xmax, w.ymin, w.ymax, pair.tau, n);
      ok = true;
    } catch (const NumericalError& e) {
      if (e.kind() != ErrorKind::ZeroOnContour && e.kind() != ErrorKind::PhaseJump) throw;
      if (attempt == 2) throw;
      const double dx = 0.005 * window.width();
      const double dy = 0.005 * window.height();
      w = {w.xmin - dx, w.xmax + dx, w.ymin - dy, w.ymax + dy};
      out.note += "window nudged outward; ";
    }
  }
  out.window = w;

  static const double fractions[] = {0.5123, 0.4871, 0.5361, 0.4617, 0.5702};
  std::vector<Cell> stack{{w.xmin, w.xmax, w.ymin, w.ymax, out.total_winding, 0}};
  std::vector<Cell> leaves;
  while (!stack.empty()) {
    const Cell c = stack.back();
    stack.pop_back();
    if (c.count == 0) continue;
    if (c.diameter() < opts.loc_tol) {
      leaves.push_back(c);
      continue;
    }
    if (c.depth >= opts.max_depth) {
      out.undecided = true;
      out.note += "max_depth reached with an unresolved cell; ";
      leaves.push_back(c);
      continue;
    }
    bool split = false;
    for (double fr : fractions) {
      const double xm = c.x0 + fr * (c.x1 - c.x0);
      const double ym = c.y0 + fr * (c.y1 - c.y0);
      const Cell kids[4] = {{c.x0, xm, c.y0, ym, 0, c.depth + 1},
                            {xm, c.x1, c.y0, ym, 0, c.depth + 1},
                            {c.x0, xm, ym, c.y1, 0, c.depth + 1},
                            {xm, c.x1, ym, c.y1, 0, c.depth + 1}};
      std::vector<Cell> got;
      int sum = 0;
      try {
        for (const Cell& kid : kids) {
          Cell k2 = kid;
          k2.count = cell_winding(f, k2.x0, k2.x1, k2.y0, k2.y1, pair.tau, n);
          sum += k2.count;
          got.push_back(k2);
        }
      } catch (const NumericalError& e) {
        if (e.kind() != ErrorKind::ZeroOnContour && e.kind() != ErrorKind::PhaseJump) throw;
        continue;
      }
      if (sum != c.count) continue;
      for (const Cell& g : got)
        if (g.count != 0) stack.push_back(g);
      split = true;
      break;
    }
    if (!split) {
      // a high-order zero drives |f| under the floor on every split line; a cell this small
      // still pins it down to within its diameter
      if (c.diameter() >= 10.0 * opts.loc_tol) {
        out.undecided = true;
        out.note += "cell could not be split consistently; ";
      }
      leaves.push_back(c);
    }
  }

  // merge leaves that belong to one cluster
  std::vector<std::size_t> parent(leaves.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t i = 0; i < leaves.size(); ++i)
    for (std::size_t j = i + 1; j < leaves.size(); ++j)
      if (std::abs(leaves[i].center() - leaves[j].center()) < 2.0 * opts.loc_tol)
        parent[find(i)] = find(j);
  std::map<std::size_t, std::pair<cplx, int>> clusters;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    auto& cl = clusters[find(i)];
    cl.first += leaves[i].center() * static_cast<double>(leaves[i].count);
    cl.second += leaves[i].count;
  }

  for (auto& [root, cl] : clusters) {
    (void)root;
    const int m = cl.second;
    cplx loc = cl.first / static_cast<double>(m);
    try {
      loc = refine_zero(pair, target, loc, m, opts.loc_tol, opts.ode_tol);
    } catch (const NumericalError&) {
    }
    ZeroRecord r;
    r.location = loc;
    r.multiplicity = m;
    r.kind = target;
    try {
      WindingOptions o;
      o.n_samples = n;
      const int circ = winding_number([&f](cplx k) { return f(k); },
                                      Contour::circle(loc, 2.0 * opts.loc_tol), o);
      if (circ != m) r.note = "circle winding " + std::to_string(circ) + " differs from cell count";
    } catch (const NumericalError& e) {
      r.note = std::string("circle winding failed: ") + e.what();
    }
    r.parity = m % 2 ? Parity::Odd : Parity::Even;
    r.half_plane = half_plane_of(loc, 1e-2 * opts.loc_tol);
    if (r.half_plane == HalfPlane::RealAxis) r.location = {loc.real(), 0.0};
    out.zeros.push_back(r);
  }
  std::sort(out.zeros.begin(), out.zeros.end(), [](const ZeroRecord& a, const ZeroRecord& b) {
    if (a.location.real() != b.location.real()) return a.location.real() < b.location.real();
    return a.location.imag() < b.location.imag();
  });
  out.evaluations = f.evaluations;
  return out;
}

// ---------------------------------------------------------------------------
// domains

DomainLabel label_from_signs(cplx k, cplx logz, double tau, double tol) {
  if (std::abs(k.imag()) < tol) return DomainLabel::Boundary;
  if (std::abs(logz.real()) < tol * tau) return DomainLabel::Boundary;
  const bool up = k.imag() > 0.0;
  const bool pos = logz.real() > 0.0;  // Im Omega~ = log|z| / tau
  if (up) return pos ? DomainLabel::D1 : DomainLabel::D2;
  return pos ? DomainLabel::D3 : DomainLabel::D4;
}

namespace {
std::vector<cplx> locations(const std::vector<ZeroRecord>& zeros, cplx skip, bool skip_one) {
  std::vector<cplx> out;
  for (const auto& z : zeros)
    if (!skip_one || std::abs(z.location - skip) > 1e-12) out.push_back(z.location);
  return out;
}
}  // namespace

DomainLabel label_domain(const PeriodicPair& pair, cplx k, const std::vector<ZeroRecord>& zeros,
                         const SpectrumOptions& opts) {
  if (std::abs(k.imag()) < opts.boundary_tol) return DomainLabel::Boundary;
  const Discriminant d = anchored_branch(pair, k, locations(zeros, 0.0, false), opts.continuation());
  return label_from_signs(k, d.logz, pair.tau, opts.boundary_tol);
}

namespace {

// leading coefficient g_m of G ~ g_m (k - kappa)^m from samples on a circle
cplx leading_coefficient(const PeriodicPair& pair, cplx kappa, int m, double rho, int n,
                         double tol) {
  cplx acc = 0.0;
  for (int j = 0; j < n; ++j) {
    const double th = 2.0 * kPi * j / n;
    const cplx k = kappa + std::polar(rho, th);
    acc += raw_target(pair, ZeroTarget::G, k, tol) * std::polar(1.0, -m * th);
  }
  return acc / (static_cast<double>(n) * std::pow(rho, m));
}

// slit along R on the side where G > 0
double real_slit(cplx gm, int m) {
  // sign of G at kappa + t (t > 0) is sign(Re gm); at kappa - t it is sign(Re gm) (-1)^m
  const double right = gm.real();
  const double left = gm.real() * (m % 2 ? -1.0 : 1.0);
  return right >= left ? 0.0 : kPi;
}

double slit_angle(CutStrategy strategy, const ZeroRecord& z, cplx gm) {
  const int m = z.multiplicity;
  const bool real = z.half_plane == HalfPlane::RealAxis;
  switch (strategy) {
    case CutStrategy::Radial:
      if (std::abs(z.location) > 1e-12) return std::arg(z.location);
      return real_slit(gm, m);
    case CutStrategy::Vertical:
      if (real) return real_slit(gm, m);
      return z.half_plane == HalfPlane::Upper ? -kPi / 2.0 : kPi / 2.0;
    case CutStrategy::LevelCurve: {
      if (real) return real_slit(gm, m);
      // rays where gm (k - kappa)^m is real negative, i.e. |z| = 1; pick the one nearest arg kappa
      const double target = std::arg(z.location);
      double best = 0.0;
      double best_d = 1e300;
      for (int j = 0; j < m; ++j) {
        const double th = (kPi - std::arg(gm) + 2.0 * kPi * j) / m;
        const double d = std::abs(std::remainder(th - target, 2.0 * kPi));
        if (d < best_d) {
          best_d = d;
          best = th;
        }
      }
      return best;
    }
  }
  return 0.0;
}

}  // namespace

ZeroRecord classify_zero(const PeriodicPair& pair, const ZeroRecord& zero, CutStrategy strategy,
                         const std::vector<ZeroRecord>& zeros, const SpectrumOptions& opts) {
  ZeroRecord r = zero;
  r.strategy = strategy;
  r.adjacency.clear();
  r.violating = false;
  r.undecided = false;
  if (r.parity == Parity::Even) return r;

  const cplx kappa = r.location;
  const double rho = 5.0 * opts.loc_tol;
  const std::vector<cplx> others = locations(zeros, kappa, true);
  double nearest = 1.0;
  for (const cplx& o : others) nearest = std::min(nearest, std::abs(o - kappa));
  const double r_out = std::max(2.0 * rho, std::min(0.2, 0.3 * nearest));

  const cplx gm = leading_coefficient(pair, kappa, r.multiplicity, rho, 32, opts.ode_tol);
  const double thc = slit_angle(strategy, r, gm);
  r.slit_angle = thc;

  const int N = std::max(8, opts.circle_samples);
  const double delta = kPi / N;

  ContinuationOptions copts = opts.continuation();
  BranchTracker tr(pair, copts);
  const bool upper = r.half_plane != HalfPlane::Lower;
  std::vector<cplx> avoid = others;
  avoid.push_back(kappa);
  const double R = opts.anchor_radius > 0.0 ? opts.anchor_radius
                                            : default_anchor_radius(kappa, avoid);
  const BranchValue a = tr.anchor(upper, R);

  // approach direction, kept at least 2 delta away from the slit
  double thA = thc + mod2pi(std::arg(a.k - kappa) - thc);
  thA = std::clamp(thA, thc + 2.0 * delta, thc + 2.0 * kPi - 2.0 * delta);

  const cplx outer = kappa + std::polar(r_out, thA);
  BranchValue v = tr.follow(a, tr.path(a.k, outer, others, !upper));
  v = tr.step_to(v, kappa + std::polar(rho, thA));

  std::vector<double> th(static_cast<std::size_t>(N));
  for (int j = 0; j < N; ++j) th[static_cast<std::size_t>(j)] = thc + delta + j * (2.0 * kPi - 2.0 * delta) / (N - 1);
  std::vector<cplx> logs(th.size());
  const auto split = static_cast<std::size_t>(std::upper_bound(th.begin(), th.end(), thA) - th.begin());
  {
    BranchValue cur = v;
    for (std::size_t j = split; j < th.size(); ++j) {
      cur = tr.step_to(cur, kappa + std::polar(rho, th[j]));
      logs[j] = cur.logz;
    }
  }
  {
    BranchValue cur = v;
    for (std::size_t j = split; j-- > 0;) {
      cur = tr.step_to(cur, kappa + std::polar(rho, th[j]));
      logs[j] = cur.logz;
    }
  }

  std::set<DomainLabel> seen;
  int boundary = 0;
  for (std::size_t j = 0; j < th.size(); ++j) {
    const DomainLabel l =
        label_from_signs(kappa + std::polar(rho, th[j]), logs[j], pair.tau, opts.boundary_tol);
    if (l == DomainLabel::Boundary)
      ++boundary;
    else
      seen.insert(l);
  }
  r.adjacency.assign(seen.begin(), seen.end());
  if (boundary > N / 4) {
    r.undecided = true;
    r.note = "more than 25% of circle samples on the boundary set";
    return r;
  }
  r.violating = !r.adjacency.empty() &&
                std::all_of(r.adjacency.begin(), r.adjacency.end(), [](DomainLabel l) {
                  return l == DomainLabel::D1 || l == DomainLabel::D4;
                });
  return r;
}

Verdict verdict_from_zeros(const PeriodicPair& pair, const std::vector<ZeroRecord>& zeros,
                           const Window& window, const std::vector<CutStrategy>& strategies,
                           const SpectrumOptions& opts) {
  Verdict v;
  v.window = window;
  v.cut_strategies = strategies;
  bool undecided = false;
  for (CutStrategy s : strategies) {
    for (const auto& z : zeros) {
      if (z.kind != ZeroTarget::G || z.parity != Parity::Odd) continue;
      ZeroRecord rec;
      try {
        rec = classify_zero(pair, z, s, zeros, opts);
      } catch (const NumericalError& e) {
        rec = z;
        rec.strategy = s;
        rec.undecided = true;
        rec.note = e.what();
      }
      if (rec.violating) v.witnesses.push_back(rec);
      if (rec.undecided) {
        undecided = true;
        v.notes += std::string("undecided zero under ") + to_string(s) + ": " + rec.note + "; ";
      }
    }
  }
  if (!v.witnesses.empty())
    v.status = VerdictStatus::Inconsistent;
  else if (undecided)
    v.status = VerdictStatus::Undecided;
  else
    v.status = VerdictStatus::Consistent;
  return v;
}

Verdict consistency_verdict(const PeriodicPair& pair, const Window& window,
                            const std::vector<CutStrategy>& strategies,
                            const SpectrumOptions& opts) {
  if (!window.conjugation_symmetric())
    throw InputError(InputError::Kind::Validation, "window must be symmetric under conjugation");
  Verdict v;
  v.window = window;
  v.cut_strategies = strategies;
  try {
    const ZeroSearch zs = find_zeros(pair, window, ZeroTarget::G, opts);
    v = verdict_from_zeros(pair, zs.zeros, zs.window, strategies, opts);
    if (zs.undecided) {
      v.notes += "zero search incomplete: " + zs.note;
      if (v.status == VerdictStatus::Consistent) v.status = VerdictStatus::Undecided;
    }
  } catch (const NumericalError& e) {
    v.status = VerdictStatus::Undecided;
    v.notes += e.what();
  }
  return v;
}

// ---------------------------------------------------------------------------

cplx qb_ratio(const FloquetPoint& fp) {
  const Matrix2& Z = fp.Z;
  const cplx sqrtG = fp.sqrtG * std::exp(-fp.log_scale);
  const double scale = std::max(1.0, Z.max_abs());
  const cplx diff = Z.m11 - Z.m22;
  cplx D = diff - sqrtG;
  const cplx Dp = diff + sqrtG;
  if (std::abs(D) < std::abs(Dp) && std::abs(Dp) > 0.0) D = -4.0 * Z.m12 * Z.m21 / Dp;
  if (std::abs(D) < 1e-14 * scale)
    throw NumericalError(ErrorKind::DivisionNearZero, "A^b vanishes: Q^b undefined");
  return -2.0 * Z.m12 / D;
}

cplx qb_ratio(const PeriodicPair& pair, cplx k, const SpectrumOptions& opts) {
  return qb_ratio(anchored_point(pair, k, {}, opts.continuation()));
}

bool focusing_realline_check(const PeriodicPair& pair, const std::vector<double>& samples,
                             double tol) {
  if (pair.lambda != -1)
    throw InputError(InputError::Kind::Validation, "real-line check applies to lambda = -1");
  for (double x : samples) {
    const Matrix2 Z = monodromy(pair, cplx(x, 0.0));
    const cplx G = Z.trace() * Z.trace() - 4.0;
    if (G.real() > tol || std::abs(G.imag()) > tol) return false;
  }
  return true;
}

}  // namespace nlsf
