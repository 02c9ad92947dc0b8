#include "nlsfloquet/numerics.hpp"

#include <algorithm>
#include <array>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <boost/numeric/odeint.hpp>

#include "nlsfloquet/errors.hpp"

namespace nlsf {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::DegenerateLeadingCoefficient: return "DegenerateLeadingCoefficient";
    case ErrorKind::ZeroOnContour: return "ZeroOnContour";
    case ErrorKind::PhaseJump: return "PhaseJump";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::BranchPointProximity: return "BranchPointProximity";
    case ErrorKind::PathBlocked: return "PathBlocked";
    case ErrorKind::ContinuationAmbiguous: return "ContinuationAmbiguous";
    case ErrorKind::DepthExceeded: return "DepthExceeded";
    case ErrorKind::Undecidable: return "Undecidable";
    case ErrorKind::DivisionNearZero: return "DivisionNearZero";
    case ErrorKind::InvalidOmega: return "InvalidOmega";
    case ErrorKind::PoleProximity: return "PoleProximity";
    case ErrorKind::CutProximity: return "CutProximity";
    case ErrorKind::TailTooLarge: return "TailTooLarge";
    case ErrorKind::SlowDecay: return "SlowDecay";
    case ErrorKind::SeriesStall: return "SeriesStall";
    case ErrorKind::FamilySolveFailure: return "FamilySolveFailure";
  }
  return "Unknown";
}

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<cplx, 4>;

State to_state(const Matrix2& m) { return {m.m11, m.m12, m.m21, m.m22}; }
Matrix2 to_matrix(const State& s) { return {s[0], s[1], s[2], s[3]}; }

bool finite_state(const State& s) {
  for (const auto& v : s)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

template <class Controlled>
Matrix2 drive(Controlled stepper, const MatrixRhs& rhs, double t0, double t1, const Matrix2& Y0,
              const OdeOptions& opts, OdeStats* stats) {
  if (!(t1 >= t0)) throw NumericalError(ErrorKind::StepUnderflow, "integration interval reversed");
  const double span = t1 - t0;
  if (span == 0.0) return Y0;

  OdeStats local;
  auto sys = [&](const State& y, State& dy, double t) {
    ++local.rhs_calls;
    const Matrix2 d = rhs(t, to_matrix(y));
    if (!d.finite()) throw NumericalError(ErrorKind::NonFinite, "rhs produced NaN/Inf");
    dy = to_state(d);
  };

  State x = to_state(Y0);
  double t = t0;
  double dt = opts.initial_step > 0.0 ? opts.initial_step : span / 64.0;
  const double min_step = 1e-14 * span;
  local.min_step = span;

  while (t1 - t > 1e-15 * span) {
    bool last = false;
    if (t + dt >= t1) {
      dt = t1 - t;
      last = true;
    }
    const double t_before = t;
    const double dt_try = dt;
    const auto res = stepper.try_step(sys, x, t, dt);
    if (res == odeint::success) {
      ++local.accepted;
      local.min_step = std::min(local.min_step, dt_try);
      local.max_step = std::max(local.max_step, dt_try);
      if (!finite_state(x)) throw NumericalError(ErrorKind::NonFinite, "state became NaN/Inf");
      if (last) t = t1;
      (void)t_before;
    } else {
      ++local.rejected;
      if (dt < min_step)
        throw NumericalError(ErrorKind::StepUnderflow, "required step below 1e-14 of interval");
    }
    if (local.accepted + local.rejected > opts.max_steps)
      throw NumericalError(ErrorKind::StepUnderflow, "step budget exhausted");
  }
  if (stats) *stats = local;
  return to_matrix(x);
}

}  // namespace

Matrix2 solve_matrix_ode(const MatrixRhs& rhs, double t0, double t1, const Matrix2& Y0,
                         double abs_tol, double rel_tol, OdeStats* stats) {
  OdeOptions opts;
  opts.abs_tol = abs_tol;
  opts.rel_tol = rel_tol;
  return solve_matrix_ode(rhs, t0, t1, Y0, opts, stats);
}

Matrix2 solve_matrix_ode(const MatrixRhs& rhs, double t0, double t1, const Matrix2& Y0,
                         const OdeOptions& opts, OdeStats* stats) {
  if (!(opts.abs_tol > 0.0) || !(opts.rel_tol > 0.0))
    throw NumericalError(ErrorKind::StepUnderflow, "tolerances must be positive");
  if (opts.method == OdeMethod::Fehlberg78) {
    auto st = odeint::make_controlled(opts.abs_tol, opts.rel_tol,
                                      odeint::runge_kutta_fehlberg78<State>());
    return drive(st, rhs, t0, t1, Y0, opts, stats);
  }
  auto st =
      odeint::make_controlled(opts.abs_tol, opts.rel_tol, odeint::runge_kutta_dopri5<State>());
  return drive(st, rhs, t0, t1, Y0, opts, stats);
}

std::vector<Matrix2> solve_matrix_ode_grid(const MatrixRhs& rhs, const std::vector<double>& times,
                                           const Matrix2& Y0, const OdeOptions& opts,
                                           OdeStats* stats) {
  std::vector<Matrix2> out;
  out.reserve(times.size());
  if (times.empty()) return out;
  out.push_back(Y0);
  OdeStats total;
  Matrix2 y = Y0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    OdeStats s;
    y = solve_matrix_ode(rhs, times[i - 1], times[i], y, opts, &s);
    total.accepted += s.accepted;
    total.rejected += s.rejected;
    total.rhs_calls += s.rhs_calls;
    out.push_back(y);
  }
  if (stats) *stats = total;
  return out;
}

// ---------------------------------------------------------------------------

cplx Polynomial::operator()(cplx x) const {
  cplx acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  Polynomial d;
  for (std::size_t i = 1; i < coeffs.size(); ++i)
    d.coeffs.push_back(coeffs[i] * static_cast<double>(i));
  if (d.coeffs.empty()) d.coeffs.push_back(0.0);
  return d;
}

std::vector<RootMultiplicity> poly_roots(const Polynomial& p, double cluster_tol) {
  const int n = p.degree();
  if (n < 1) throw NumericalError(ErrorKind::DegenerateLeadingCoefficient, "degree < 1");
  const cplx lead = p.coeffs.back();
  if (std::abs(lead) < 1e-300)
    throw NumericalError(ErrorKind::DegenerateLeadingCoefficient, "leading coefficient ~ 0");

  std::vector<cplx> raw;
  if (n == 1) {
    raw.push_back(-p.coeffs[0] / lead);
  } else {
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) C(i, n - 1) = -p.coeffs[i] / lead;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
    for (int i = 0; i < n; ++i) raw.push_back(es.eigenvalues()[i]);
  }

  // one Newton step on roots without a close neighbour
  const Polynomial dp = p.derivative();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    bool isolated = true;
    for (std::size_t j = 0; j < raw.size(); ++j)
      if (j != i && std::abs(raw[i] - raw[j]) < 1e-3 * (1.0 + std::abs(raw[i]))) isolated = false;
    if (!isolated) continue;
    const cplx d = dp(raw[i]);
    if (d == 0.0) continue;
    const cplx cand = raw[i] - p(raw[i]) / d;
    if (std::abs(p(cand)) <= std::abs(p(raw[i]))) raw[i] = cand;
  }

  // single-linkage clustering
  std::vector<std::size_t> parent(raw.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t i = 0; i < raw.size(); ++i)
    for (std::size_t j = i + 1; j < raw.size(); ++j) {
      const double scale = 1.0 + std::max(std::abs(raw[i]), std::abs(raw[j]));
      if (std::abs(raw[i] - raw[j]) < cluster_tol * scale) parent[find(i)] = find(j);
    }
  std::vector<RootMultiplicity> out;
  std::vector<std::size_t> rep;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const std::size_t r = find(i);
    auto it = std::find(rep.begin(), rep.end(), r);
    if (it == rep.end()) {
      rep.push_back(r);
      out.push_back({raw[i], 1});
    } else {
      auto& rec = out[static_cast<std::size_t>(it - rep.begin())];
      rec.root = (rec.root * static_cast<double>(rec.multiplicity) + raw[i]) /
                 static_cast<double>(rec.multiplicity + 1);
      rec.multiplicity += 1;
    }
  }
  std::sort(out.begin(), out.end(), [](const RootMultiplicity& a, const RootMultiplicity& b) {
    if (a.root.real() != b.root.real()) return a.root.real() < b.root.real();
    return a.root.imag() < b.root.imag();
  });
  return out;
}

Polynomial poly_from_roots(const std::vector<RootMultiplicity>& roots, cplx lead) {
  Polynomial p{{lead}};
  for (const auto& r : roots)
    for (int m = 0; m < r.multiplicity; ++m) {
      std::vector<cplx> next(p.coeffs.size() + 1, 0.0);
      for (std::size_t i = 0; i < p.coeffs.size(); ++i) {
        next[i + 1] += p.coeffs[i];
        next[i] -= r.root * p.coeffs[i];
      }
      p.coeffs = std::move(next);
    }
  return p;
}

// ---------------------------------------------------------------------------

Contour Contour::circle(cplx center, double radius) {
  Contour c;
  c.is_circle_ = true;
  c.center_ = center;
  c.radius_ = radius;
  return c;
}

Contour Contour::polygon(std::vector<cplx> vertices) {
  Contour c;
  c.is_circle_ = false;
  c.vertices_ = std::move(vertices);
  return c;
}

Contour Contour::rectangle(double xmin, double xmax, double ymin, double ymax) {
  return polygon({{xmin, ymin}, {xmax, ymin}, {xmax, ymax}, {xmin, ymax}});
}

cplx Contour::point(double s) const {
  if (is_circle_) return center_ + radius_ * std::polar(1.0, 2.0 * std::numbers::pi * s);
  const std::size_t n = vertices_.size();
  double u = s * static_cast<double>(n);
  std::size_t i = static_cast<std::size_t>(std::floor(u));
  if (i >= n) i = n - 1;
  const double frac = u - static_cast<double>(i);
  const cplx a = vertices_[i];
  const cplx b = vertices_[(i + 1) % n];
  return a + (b - a) * frac;
}

int winding_number(const ComplexFn& f, const Contour& contour, int n_samples) {
  WindingOptions o;
  o.n_samples = n_samples;
  return winding_number(f, contour, o);
}

int winding_number(const ComplexFn& f, const Contour& contour, const WindingOptions& opts) {
  const int n = std::max(opts.n_samples, 4);
  std::size_t evals = 0;
  auto eval = [&](double s) {
    ++evals;
    const cplx v = f(contour.point(s));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw NumericalError(ErrorKind::NonFinite, "non-finite value on contour");
    if (std::abs(v) < opts.floor)
      throw NumericalError(ErrorKind::ZeroOnContour, "function below floor on contour");
    return v;
  };
  const double half_pi = 0.5 * std::numbers::pi;

  // explicit stack instead of recursion
  struct Seg {
    double sa, sb;
    cplx fa, fb;
    int depth;
  };
  double total = 0.0;
  std::vector<cplx> vals(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) vals[static_cast<std::size_t>(j)] = eval(static_cast<double>(j) / n);
  std::vector<Seg> stack;
  for (int j = 0; j < n; ++j) {
    const double sa = static_cast<double>(j) / n;
    const double sb = static_cast<double>(j + 1) / n;
    stack.push_back({sa, sb, vals[static_cast<std::size_t>(j)],
                     vals[static_cast<std::size_t>((j + 1) % n)], 0});
    while (!stack.empty()) {
      Seg sg = stack.back();
      stack.pop_back();
      const double d = std::arg(sg.fb / sg.fa);
      // the chord from fa to fb must also stay clear of the origin, else a fast
      // turn near a zero can alias to a small increment
      if (std::abs(d) < half_pi && std::abs(sg.fb - sg.fa) <= std::min(std::abs(sg.fa), std::abs(sg.fb))) {
        total += d;
        continue;
      }
      if (sg.depth >= opts.max_depth)
        throw NumericalError(ErrorKind::PhaseJump, "cannot bound phase increment below pi/2");
      const double sm = 0.5 * (sg.sa + sg.sb);
      const cplx fm = eval(sm);
      // push right half first so the left half is processed first
      stack.push_back({sm, sg.sb, fm, sg.fb, sg.depth + 1});
      stack.push_back({sg.sa, sm, sg.fa, fm, sg.depth + 1});
    }
  }
  if (opts.evaluations) *opts.evaluations += evals;
  const double w = total / (2.0 * std::numbers::pi);
  const double r = std::round(w);
  if (std::abs(w - r) > 0.25) throw NumericalError(ErrorKind::PhaseJump, "non-integer winding");
  return static_cast<int>(r);
}

}  // namespace nlsf
