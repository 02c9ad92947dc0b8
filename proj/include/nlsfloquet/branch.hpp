#pragma once

#include <vector>

#include "nlsfloquet/background.hpp"
#include "nlsfloquet/floquet.hpp"

namespace nlsf {

struct ContinuationOptions {
  double ode_tol = kFloquetTol;
  double path_tol = 1e-3;       ///< detour radius is 3 * path_tol
  double anchor_radius = 0.0;   ///< 0: chosen from the target and avoid points
  double max_step = 0.25;
  double min_step = 1e-9;
};

/// Continued branch of log z at one point.
struct BranchValue {
  cplx k{};
  cplx logz{};
  ScaledMonodromy mono;

  double log_abs_z() const { return logz.real(); }
  cplx omega_tilde(double tau) const { return I_unit * logz / tau; }
  /// sqrt(G) = 1/z - z
  cplx sqrtG() const { return -2.0 * std::sinh(logz); }
};

/// Follows log z along polylines starting from the large-|k| anchor where log z ~ -2ik^2 tau.
class BranchTracker {
 public:
  BranchTracker(const PeriodicPair& pair, ContinuationOptions opts = {});

  /// Anchor R e^{i pi/8} (upper) or its conjugate. Doubles R until the self-check passes.
  BranchValue anchor(bool upper, double radius);

  /// Continue from `from` along the straight segment to k.
  BranchValue step_to(const BranchValue& from, cplx k);

  /// Continue through the vertices in order.
  BranchValue follow(const BranchValue& from, const std::vector<cplx>& vertices);

  /// Straight path anchor -> target with semicircle detours around avoid points.
  std::vector<cplx> path(cplx from, cplx to, const std::vector<cplx>& avoid, bool mirror) const;

  /// Evaluate at k and pick the candidate log nearest to `predicted`.
  /// ratio receives best / second-best candidate distance.
  BranchValue evaluate(cplx k, cplx predicted, double* ratio = nullptr) const;

  const PeriodicPair& pair() const { return pair_; }
  const ContinuationOptions& options() const { return opts_; }
  std::size_t evaluations() const { return evaluations_; }

 private:
  PeriodicPair pair_;
  ContinuationOptions opts_;
  mutable std::size_t evaluations_ = 0;
};

/// Anchor radius covering a target and a set of points.
double default_anchor_radius(cplx target, const std::vector<cplx>& avoid);

/// Branch values at k_target by continuation from the anchor avoiding `avoid`.
Discriminant anchored_branch(const PeriodicPair& pair, cplx k_target,
                             const std::vector<cplx>& avoid, const ContinuationOptions& opts = {});

/// Anchored branch as a full FloquetPoint.
FloquetPoint anchored_point(const PeriodicPair& pair, cplx k_target, const std::vector<cplx>& avoid,
                            const ContinuationOptions& opts = {});

}  // namespace nlsf
