#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "nlsfloquet/matrix2.hpp"

namespace nlsf {

// ---------------------------------------------------------------------------
// Adaptive integration of Y' = F(t, Y) for 2x2 complex Y.

enum class OdeMethod {
  DormandPrince45,  ///< embedded 5(4) pair with first-same-as-last
  Fehlberg78,       ///< embedded 7(8) pair, cheaper at tight tolerances
};

struct OdeOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  OdeMethod method = OdeMethod::DormandPrince45;
  double initial_step = 0.0;  ///< 0 picks span/64
  std::size_t max_steps = 20'000'000;
};

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_calls = 0;
  double min_step = 0.0;
  double max_step = 0.0;
};

using MatrixRhs = std::function<Matrix2(double, const Matrix2&)>;

Matrix2 solve_matrix_ode(const MatrixRhs& rhs, double t0, double t1, const Matrix2& Y0,
                         double abs_tol, double rel_tol, OdeStats* stats = nullptr);

Matrix2 solve_matrix_ode(const MatrixRhs& rhs, double t0, double t1, const Matrix2& Y0,
                         const OdeOptions& opts, OdeStats* stats = nullptr);

/// Solution at each of the increasing times, starting from Y0 at times.front().
std::vector<Matrix2> solve_matrix_ode_grid(const MatrixRhs& rhs, const std::vector<double>& times,
                                           const Matrix2& Y0, const OdeOptions& opts,
                                           OdeStats* stats = nullptr);

// ---------------------------------------------------------------------------
// Polynomials

/// Coefficients in ascending degree.
struct Polynomial {
  std::vector<cplx> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  cplx operator()(cplx x) const;
  Polynomial derivative() const;
};

struct RootMultiplicity {
  cplx root;
  int multiplicity = 1;
};

/// Roots with multiplicities; roots closer than cluster_tol*(1+|r|) are merged.
std::vector<RootMultiplicity> poly_roots(const Polynomial& p, double cluster_tol = 1e-6);

/// Monic expansion of prod (x - r_i)^{m_i} times lead, ascending coefficients.
Polynomial poly_from_roots(const std::vector<RootMultiplicity>& roots, cplx lead);

// ---------------------------------------------------------------------------
// Closed contours and winding numbers

class Contour {
 public:
  static Contour circle(cplx center, double radius);
  /// Closed polygon through the vertices (the last vertex connects back to the first).
  static Contour polygon(std::vector<cplx> vertices);
  /// Counterclockwise boundary of [xmin, xmax] x [ymin, ymax].
  static Contour rectangle(double xmin, double xmax, double ymin, double ymax);

  /// Point at parameter s in [0, 1]; s = 0 and s = 1 coincide.
  cplx point(double s) const;

 private:
  bool is_circle_ = true;
  cplx center_{};
  double radius_ = 1.0;
  std::vector<cplx> vertices_;
};

using ComplexFn = std::function<cplx(cplx)>;

struct WindingOptions {
  int n_samples = 64;
  double floor = 1e-12;      ///< |f| below this on the contour raises ZeroOnContour
  int max_depth = 40;        ///< bisection depth per initial interval
  std::size_t* evaluations = nullptr;
};

int winding_number(const ComplexFn& f, const Contour& contour, int n_samples = 64);
int winding_number(const ComplexFn& f, const Contour& contour, const WindingOptions& opts);

}  // namespace nlsf
