#pragma once

#include <map>
#include <string>
#include <vector>

#include "nlsfloquet/background.hpp"
#include "nlsfloquet/floquet.hpp"
#include "nlsfloquet/numerics.hpp"
#include "nlsfloquet/spectrum.hpp"

namespace nlsf {

/// g0 = alpha e^{i omega t}, g1 = c e^{i omega t}.
struct ExponentialTriple {
  double alpha = 1.0;
  double omega = 1.0;
  cplx c{};
  int lambda = -1;
};

/// InputError unless alpha > 0, omega != 0 and lambda = +-1.
void validate_triple(const ExponentialTriple& t);
double triple_tau(const ExponentialTriple& t);
PeriodicPair triple_pair(const ExponentialTriple& t);

/// Omega(k)^2 as a quartic in k, coefficients ascending.
Polynomial omega_squared(const ExponentialTriple& t);

/// Omega(k) with the sign closest to 2k^2 + omega/2.
cplx omega_of(const ExponentialTriple& t, cplx k);

/// Closed-form Z, G, z, Omega~ and S^b.
FloquetPoint closed_form_monodromy(const ExponentialTriple& t, cplx k);

/// psi^b(t) = e^{i omega t sigma3 / 2} S^b e^{-i Omega t sigma3}; BranchPointProximity near P.
Matrix2 background_explicit(const ExponentialTriple& t, double time, cplx k);

struct FamilyTag {
  std::string name = "none";  ///< F-1.3a, F-1.3b, D-1 ... D-5 or none
  std::map<std::string, double> parameters;
  std::string note;  ///< set when an inequality holds only within tolerance
};

/// Every family whose predicate the triple satisfies (at most one if the sets are disjoint).
std::vector<FamilyTag> family_memberships(const ExponentialTriple& t, double tol = 1e-9);
/// First membership or "none".
FamilyTag family_tag(const ExponentialTriple& t, double tol = 1e-9);

/// D-2 / D-5 parametrization: alpha = -(4K^3 + omega K)/c2 and
/// c = sign sqrt((alpha^2 + omega/2)^2 - c2^2 - 2K^2(6K^2 + omega)) + i c2.
ExponentialTriple defocusing_kc2_triple(double K, double omega, double c2, int sign = 1);

/// Square of half-side 2 (1 + |omega|^{1/2} + alpha + |c|^{1/2}).
Window default_exponential_window(const ExponentialTriple& t);

struct ExponentialClassification {
  Verdict verdict;
  FamilyTag tag;
  std::vector<RootMultiplicity> omega2_roots;
  std::vector<ZeroRecord> zeros;  ///< G zeros at the roots of Omega^2
  bool mismatch = false;
};

ExponentialClassification classify_triple(const ExponentialTriple& t,
                                          const std::vector<CutStrategy>& strategies =
                                              all_cut_strategies(),
                                          const SpectrumOptions& opts = {});

}  // namespace nlsf
