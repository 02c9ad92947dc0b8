#include "nlsfloquet/floquet.hpp"

#include <algorithm>
#include <cmath>

#include "nlsfloquet/branch.hpp"
#include "nlsfloquet/errors.hpp"

namespace nlsf {

namespace {

OdeOptions floquet_ode(double tol) {
  OdeOptions o;
  o.abs_tol = tol;
  o.rel_tol = tol;
  o.method = OdeMethod::Fehlberg78;
  return o;
}

double growth_rate(cplx k) { return 2.0 * std::abs((k * k).imag()); }

// rhs of Y' = (V^b - 2ik^2 sigma3 + shift) Y
MatrixRhs tpart_rhs(const PeriodicPair& pair, cplx k, cplx shift) {
  const cplx k2 = k * k;
  return [&pair, k, k2, shift](double t, const Matrix2& Y) {
    Matrix2 A = assemble_Vb(pair, t, k);
    A.m11 += -2.0 * I_unit * k2 + shift;
    A.m22 += 2.0 * I_unit * k2 + shift;
    return A * Y;
  };
}

}  // namespace

Matrix2 propagate(const PeriodicPair& pair, cplx k, double t, double tol) {
  const double mu = growth_rate(k);
  const Matrix2 Y = solve_matrix_ode(tpart_rhs(pair, k, -mu), 0.0, t, Matrix2::identity(),
                                     floquet_ode(tol));
  return Y * std::exp(mu * t);
}

ScaledMonodromy monodromy_scaled(const PeriodicPair& pair, cplx k, double tol) {
  const double mu = growth_rate(k);
  ScaledMonodromy out;
  out.Zs = solve_matrix_ode(tpart_rhs(pair, k, -mu), 0.0, pair.tau, Matrix2::identity(),
                            floquet_ode(tol));
  out.log_scale = mu * pair.tau;
  return out;
}

Matrix2 monodromy(const PeriodicPair& pair, cplx k, double tol) {
  return monodromy_scaled(pair, k, tol).unscaled();
}

Discriminant discriminant(const Matrix2& Z, double tau) {
  Discriminant d;
  const cplx tr = Z.trace();
  d.G = tr * tr - 4.0;
  d.sqrtG = std::sqrt(d.G);
  const cplx minus = tr - d.sqrtG;
  const cplx plus = tr + d.sqrtG;
  // avoid cancellation: z * (1/z) = 1
  d.z = std::abs(minus) >= std::abs(plus) ? 0.5 * minus : 2.0 / plus;
  d.logz = std::log(d.z);
  d.OmegaTilde = I_unit * d.logz / tau;
  d.anchored = false;
  return d;
}

Discriminant discriminant_from_log(const Matrix2& Z, cplx logz, double tau) {
  Discriminant d;
  const cplx tr = Z.trace();
  d.G = tr * tr - 4.0;
  d.logz = logz;
  d.z = std::exp(logz);
  d.sqrtG = -2.0 * std::sinh(logz);
  d.OmegaTilde = I_unit * logz / tau;
  d.anchored = true;
  return d;
}

Matrix2 diagonalizer(const Matrix2& Z, cplx sqrtG) {
  const double scale = std::max(1.0, Z.max_abs());
  if (std::abs(sqrtG) < 1e-10 * scale)
    throw NumericalError(ErrorKind::BranchPointProximity, "sqrt(G) vanishes: k is a branch point");
  const cplx diff = Z.m11 - Z.m22;
  cplx D = diff - sqrtG;
  const cplx Dp = diff + sqrtG;
  if (std::abs(D) < std::abs(Dp)) D = -4.0 * Z.m12 * Z.m21 / Dp;
  if (std::abs(D) < 1e-14 * scale)
    throw NumericalError(ErrorKind::BranchPointProximity,
                         "Z11 - Z22 - sqrt(G) vanishes: k is a branch point");
  const cplx p = std::sqrt(-D / (2.0 * sqrtG));
  return Matrix2{1.0, -2.0 * Z.m12 / D, 2.0 * Z.m21 / D, 1.0} * p;
}

namespace {

FloquetPoint build_point(const PeriodicPair& pair, cplx k, const ScaledMonodromy& mono, cplx logz,
                         bool anchored) {
  FloquetPoint fp;
  fp.k = k;
  const double s = mono.log_scale;
  if (s < 600.0) {
    fp.Z = mono.unscaled();
    fp.log_scale = 0.0;
  } else {
    fp.Z = mono.Zs;
    fp.log_scale = s;
  }
  const cplx trs = mono.Zs.trace();
  // G = e^{2s} (trs^2 - 4 e^{-2s})
  fp.G = std::exp(2.0 * s) * (trs * trs - 4.0 * std::exp(-2.0 * s));
  fp.logz = logz;
  fp.z = std::exp(logz);
  fp.sqrtG = -2.0 * std::sinh(logz);
  fp.OmegaTilde = I_unit * logz / pair.tau;
  fp.branch_anchored = anchored;
  const cplx sqrtG_scaled = std::exp(-logz - s) - std::exp(logz - s);
  try {
    fp.Sb = diagonalizer(mono.Zs, sqrtG_scaled);
    fp.Sb_defined = fp.Sb.finite();
  } catch (const NumericalError&) {
    fp.Sb_defined = false;
  }
  return fp;
}

}  // namespace

FloquetPoint floquet_point(const PeriodicPair& pair, cplx k, double tol) {
  const ScaledMonodromy mono = monodromy_scaled(pair, k, tol);
  // e^{2s} is real positive, so the principal sqrt(G) is e^{s} times the principal root of
  // the scaled discriminant
  const cplx trs = mono.Zs.trace();
  const cplx disc = std::sqrt(trs * trs - 4.0 * std::exp(-2.0 * mono.log_scale));
  const cplx minus = trs - disc;
  const cplx plus = trs + disc;
  cplx logz;
  if (std::abs(minus) >= std::abs(plus))
    logz = std::log(0.5 * minus) + mono.log_scale;
  else
    logz = -(std::log(0.5 * plus) + mono.log_scale);
  FloquetPoint fp = build_point(pair, k, mono, logz, false);
  // keep the principal branch of log z as reported by the principal logarithm
  fp.logz = cplx(fp.logz.real(), std::arg(std::exp(cplx(0.0, fp.logz.imag()))));
  fp.OmegaTilde = I_unit * fp.logz / pair.tau;
  return fp;
}

FloquetPoint floquet_point(const PeriodicPair& pair, cplx k, cplx logz, double tol) {
  return build_point(pair, k, monodromy_scaled(pair, k, tol), logz, true);
}

FloquetPoint floquet_point(const PeriodicPair& pair, cplx k, const ScaledMonodromy& mono,
                           cplx logz) {
  return build_point(pair, k, mono, logz, true);
}

BackgroundFrame background_frame(const PeriodicPair& pair, const FloquetPoint& fp, double t,
                                 double tol) {
  if (!fp.Sb_defined)
    throw NumericalError(ErrorKind::BranchPointProximity, "S^b undefined at this k");
  BackgroundFrame f;
  f.t = t;
  f.psi = propagate(pair, fp.k, t, tol);
  const Matrix2& S = fp.Sb;
  const Matrix2 Sinv = S.inverse();
  const Matrix2 expmtB = S * exp_i_sigma3(t * fp.OmegaTilde) * Sinv;
  f.P = f.psi * expmtB;
  f.E = f.P * S;
  f.psi_b = f.E * exp_i_sigma3(-t * fp.OmegaTilde);
  return f;
}

BackgroundFrame background_eigenfunction(const PeriodicPair& pair, double t, cplx k, double tol) {
  ContinuationOptions opts;
  opts.ode_tol = tol;
  const FloquetPoint fp = anchored_point(pair, k, {}, opts);
  return background_frame(pair, fp, t, tol);
}

std::vector<Matrix2> frame_period_grid(const PeriodicPair& pair, const FloquetPoint& fp, int m,
                                       double tol) {
  if (!fp.Sb_defined)
    throw NumericalError(ErrorKind::BranchPointProximity, "S^b undefined at this k");
  if (m < 2) throw InputError(InputError::Kind::Validation, "period grid needs m >= 2");
  const cplx W = I_unit * fp.OmegaTilde;
  std::vector<double> fwd(static_cast<std::size_t>(m) + 1);
  for (int j = 0; j <= m; ++j) fwd[static_cast<std::size_t>(j)] = pair.tau * j / m;
  const auto opts = floquet_ode(tol);

  // Each column of E solves e' = (V^b - 2ik^2 sigma3 +- i Omega~) e. The column that dominates
  // forward in time is integrated forward from S^b, the other backward from E(tau) = S^b.
  auto column = [&](int col, cplx shift) {
    const Matrix2 start = col == 0 ? Matrix2{fp.Sb.m11, 0.0, fp.Sb.m21, 0.0}
                                   : Matrix2{fp.Sb.m12, 0.0, fp.Sb.m22, 0.0};
    const bool forward = (col == 0) == (fp.OmegaTilde.imag() >= 0.0);
    std::vector<cplx> c1(static_cast<std::size_t>(m) + 1), c2(c1.size());
    if (forward) {
      const auto ys = solve_matrix_ode_grid(tpart_rhs(pair, fp.k, shift), fwd, start, opts);
      for (std::size_t j = 0; j < ys.size(); ++j) {
        c1[j] = ys[j].m11;
        c2[j] = ys[j].m21;
      }
    } else {
      // s = tau - t reverses time
      const MatrixRhs base = tpart_rhs(pair, fp.k, shift);
      const double tau = pair.tau;
      MatrixRhs rev = [base, tau](double s, const Matrix2& Y) { return base(tau - s, Y) * -1.0; };
      const auto ys = solve_matrix_ode_grid(rev, fwd, start, opts);
      for (std::size_t j = 0; j < ys.size(); ++j) {
        c1[c1.size() - 1 - j] = ys[j].m11;
        c2[c2.size() - 1 - j] = ys[j].m21;
      }
    }
    return std::make_pair(c1, c2);
  };
  const auto col1 = column(0, W);
  const auto col2 = column(1, -W);
  std::vector<Matrix2> E(static_cast<std::size_t>(m));
  for (std::size_t j = 0; j < E.size(); ++j)
    E[j] = Matrix2{col1.first[j], col2.first[j], col1.second[j], col2.second[j]};
  return E;
}

AsymptoticsReport check_asymptotics(const PeriodicPair& pair, const std::vector<double>& rays,
                                    const std::vector<double>& radii, double tol) {
  AsymptoticsReport rep;
  rep.eta1_tau = eta(pair, pair.tau).eta1;
  const double tau = pair.tau;
  for (double th : rays) {
    double first = -1.0;
    double last = 0.0;
    for (double r : radii) {
      const cplx k = std::polar(r, th);
      const ScaledMonodromy mono = monodromy_scaled(pair, k, tol);
      const double s = mono.log_scale;
      const cplx w = 2.0 * k * k * tau;
      // e^{-s} sin w, e^{-s} cos w without overflow
      const cplx ep = std::exp(I_unit * w - s);
      const cplx em = std::exp(-I_unit * w - s);
      const cplx sin_s = (ep - em) / (2.0 * I_unit);
      const cplx cos_s = 0.5 * (ep + em);
      const cplx trs = mono.Zs.trace();
      const cplx resid = trs * trs - 4.0 * std::exp(-2.0 * s) + 4.0 * sin_s * sin_s;
      AsymptoticsRow row;
      row.ray = th;
      row.radius = r;
      row.ratio = std::abs(resid) * r;
      row.ratio_next = std::abs(resid + 8.0 * rep.eta1_tau * cos_s * sin_s / k) * r * r;
      rep.rows.push_back(row);
      if (first < 0.0) first = row.ratio;
      last = row.ratio;
    }
    if (last > 1.5 * first + 1e-8) rep.pass = false;
  }
  return rep;
}

}  // namespace nlsf
