#pragma once

#include <vector>

#include "nlsfloquet/matrix2.hpp"

namespace nlsf {

struct FourierMode {
  int n = 0;
  cplx coeff{};
};

/// Periodic boundary pair g_j(t) = sum coeff * exp(2 pi i n t / tau).
struct PeriodicPair {
  int lambda = -1;
  double tau = 1.0;
  std::vector<FourierMode> g0_modes;
  std::vector<FourierMode> g1_modes;
};

/// Throws InputError when lambda is not +-1 or tau <= 0.
void validate_pair(const PeriodicPair& pair);

PeriodicPair zero_pair(double tau, int lambda = -1);

/// g0 = alpha e^{i omega t}, g1 = c e^{i omega t}; tau = 2 pi / |omega|, stored as mode n = sign(omega).
PeriodicPair single_exponential_pair(int lambda, double alpha, double omega, cplx c);

struct PairValues {
  cplx g0{};
  cplx g1{};
};

PairValues eval_pair(const PeriodicPair& pair, double t);
/// Time derivatives (g0_t, g1_t).
PairValues eval_pair_derivative(const PeriodicPair& pair, double t);

/// V(t,k) of the t-part for Dirichlet value g0 and Neumann value g1.
Matrix2 assemble_V(int lambda, cplx g0, cplx g1, cplx k);
Matrix2 assemble_Vb(const PeriodicPair& pair, double t, cplx k);

struct EtaValues {
  double eta1 = 0.0;
  cplx eta2{};
  double t = 0.0;
};

/// Quadrature of eta1 and eta2 on [0, t]; QuadratureFailure when the error estimate exceeds tol.
EtaValues eta(const PeriodicPair& pair, double t, double tol = 1e-11);

}  // namespace nlsf
