#pragma once

#include <vector>

#include "nlsfloquet/background.hpp"
#include "nlsfloquet/matrix2.hpp"
#include "nlsfloquet/numerics.hpp"

namespace nlsf {

/// Default tolerance for one-period integrations of the background t-part.
inline constexpr double kFloquetTol = 1e-12;

/// psi(t,k) of psi_t + 2ik^2 sigma3 psi = V^b psi, psi(0) = I, integrated with the 7(8) pair.
Matrix2 propagate(const PeriodicPair& pair, cplx k, double t, double tol = kFloquetTol);

/// Z(k) = psi(tau, k).
Matrix2 monodromy(const PeriodicPair& pair, cplx k, double tol = kFloquetTol);

/// Z = Zs * exp(log_scale), log_scale = 2 |Im k^2| tau. Zs stays O(1) where Z overflows.
struct ScaledMonodromy {
  Matrix2 Zs;
  double log_scale = 0.0;
  Matrix2 unscaled() const { return Zs * std::exp(log_scale); }
};
ScaledMonodromy monodromy_scaled(const PeriodicPair& pair, cplx k, double tol = kFloquetTol);

struct Discriminant {
  cplx G{};
  cplx sqrtG{};
  cplx z{};
  cplx logz{};
  cplx OmegaTilde{};
  bool anchored = false;  ///< false: principal square root and principal log
};

/// Principal-branch G, sqrt(G), z = (tr Z - sqrt G)/2, Omega~ = i log z / tau.
Discriminant discriminant(const Matrix2& Z, double tau);

/// Branch values from a continued log z; sqrt(G) = 1/z - z.
Discriminant discriminant_from_log(const Matrix2& Z, cplx logz, double tau);

/// Unit-determinant S with Z = S diag(z, 1/z) S^{-1}, z = (tr Z - sqrtG)/2.
/// Works on scaled inputs too (Zs together with sqrtG * e^{-log_scale}).
Matrix2 diagonalizer(const Matrix2& Z, cplx sqrtG);

struct FloquetPoint {
  cplx k{};
  Matrix2 Z;
  double log_scale = 0.0;  ///< Z stored scaled when log_scale > 0
  cplx G{};
  cplx sqrtG{};
  cplx z{};
  cplx logz{};
  cplx OmegaTilde{};
  Matrix2 Sb;
  bool Sb_defined = false;
  bool branch_anchored = false;
};

/// Floquet quantities with the principal branch.
FloquetPoint floquet_point(const PeriodicPair& pair, cplx k, double tol = kFloquetTol);
/// Same, with log z supplied by a continuation.
FloquetPoint floquet_point(const PeriodicPair& pair, cplx k, cplx logz, double tol = kFloquetTol);
/// Same, reusing an already computed monodromy.
FloquetPoint floquet_point(const PeriodicPair& pair, cplx k, const ScaledMonodromy& mono, cplx logz);

struct BackgroundFrame {
  double t = 0.0;
  Matrix2 psi;
  Matrix2 P;
  Matrix2 E;
  Matrix2 psi_b;
};

/// Frame at time t using the branch data of fp (Sb and Omega~ must be defined).
BackgroundFrame background_frame(const PeriodicPair& pair, const FloquetPoint& fp, double t,
                                 double tol = kFloquetTol);

/// Frame at time t with the anchored branch at k.
BackgroundFrame background_eigenfunction(const PeriodicPair& pair, double t, cplx k,
                                         double tol = kFloquetTol);

/// E(t_j, k) on a uniform grid of one period (m points, t_j = j tau / m) from a single sweep.
std::vector<Matrix2> frame_period_grid(const PeriodicPair& pair, const FloquetPoint& fp, int m,
                                       double tol = kFloquetTol);

struct AsymptoticsRow {
  double ray = 0.0;
  double radius = 0.0;
  double ratio = 0.0;       ///< |G + 4 sin^2(2k^2 tau)| |k| / e^{4 |Im k^2| tau}
  double ratio_next = 0.0;  ///< same after removing the -8 eta1 cos sin / k term, times |k|
};

struct AsymptoticsReport {
  double eta1_tau = 0.0;
  std::vector<AsymptoticsRow> rows;
  bool pass = true;  ///< false when the ratio grows with radius on some ray
};

AsymptoticsReport check_asymptotics(const PeriodicPair& pair, const std::vector<double>& rays,
                                    const std::vector<double>& radii, double tol = kFloquetTol);

}  // namespace nlsf
