#pragma once

#include <string>
#include <vector>

#include "nlsfloquet/background.hpp"
#include "nlsfloquet/branch.hpp"
#include "nlsfloquet/floquet.hpp"

namespace nlsf {

enum class ZeroTarget { G, Z12, Z21 };
enum class Parity { Odd, Even };
enum class HalfPlane { Upper, Lower, RealAxis };
enum class DomainLabel { D1, D2, D3, D4, Boundary };
enum class CutStrategy { Radial, LevelCurve, Vertical };
enum class VerdictStatus { Consistent, Inconsistent, Undecided };

const char* to_string(ZeroTarget v);
const char* to_string(Parity v);
const char* to_string(HalfPlane v);
const char* to_string(DomainLabel v);
const char* to_string(CutStrategy v);
const char* to_string(VerdictStatus v);
/// Accepts "radial", "level", "vertical"; InputError otherwise.
CutStrategy parse_cut_strategy(const std::string& s);

inline const std::vector<CutStrategy>& all_cut_strategies() {
  static const std::vector<CutStrategy> all{CutStrategy::Radial, CutStrategy::LevelCurve,
                                            CutStrategy::Vertical};
  return all;
}

struct Window {
  double xmin = -1.0, xmax = 1.0, ymin = -1.0, ymax = 1.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double radius() const;
  bool contains(cplx k) const {
    return k.real() >= xmin && k.real() <= xmax && k.imag() >= ymin && k.imag() <= ymax;
  }
  bool conjugation_symmetric(double tol = 1e-12) const { return std::abs(ymin + ymax) <= tol; }
  static Window square(double half_side) { return {-half_side, half_side, -half_side, half_side}; }
};

struct ZeroRecord {
  cplx location{};
  int multiplicity = 1;
  Parity parity = Parity::Odd;
  ZeroTarget kind = ZeroTarget::G;
  HalfPlane half_plane = HalfPlane::Upper;
  std::vector<DomainLabel> adjacency;  ///< sorted, unique
  bool violating = false;
  bool undecided = false;
  CutStrategy strategy = CutStrategy::LevelCurve;
  double slit_angle = 0.0;
  std::string note;
};

struct Verdict {
  VerdictStatus status = VerdictStatus::Undecided;
  std::vector<ZeroRecord> witnesses;
  Window window;
  std::vector<CutStrategy> cut_strategies;
  std::string notes;
};

struct SpectrumOptions {
  double loc_tol = 1e-3;
  int max_depth = 20;
  int n_samples = 64;           ///< initial samples per winding contour
  double boundary_tol = 1e-6;   ///< |Im k| and |log|z|| / tau below this are boundary
  int circle_samples = 48;
  double ode_tol = kFloquetTol;
  double path_tol = 1e-3;
  double anchor_radius = 0.0;   ///< 0: automatic
  int jobs = 1;

  ContinuationOptions continuation() const {
    ContinuationOptions c;
    c.ode_tol = ode_tol;
    c.path_tol = path_tol;
    c.anchor_radius = anchor_radius;
    return c;
  }
};

struct ZeroSearch {
  std::vector<ZeroRecord> zeros;  ///< sorted by (Re, Im)
  int total_winding = 0;
  Window window;                   ///< window actually used (after nudging)
  bool undecided = false;
  std::string note;
  std::size_t evaluations = 0;
};

/// Scaled value of the target function whose winding counts zeros.
cplx zero_target_value(const PeriodicPair& pair, ZeroTarget target, cplx k, double tol);

ZeroSearch find_zeros(const PeriodicPair& pair, const Window& window, ZeroTarget target,
                      const SpectrumOptions& opts = {});

/// Record for a known zero location, multiplicity from winding on a circle of radius 2 loc_tol.
ZeroRecord make_zero_record(const PeriodicPair& pair, cplx location, ZeroTarget target,
                            const SpectrumOptions& opts = {});

HalfPlane half_plane_of(cplx k, double tol);

DomainLabel label_from_signs(cplx k, cplx logz, double tau, double tol);

DomainLabel label_domain(const PeriodicPair& pair, cplx k, const std::vector<ZeroRecord>& zeros,
                         const SpectrumOptions& opts = {});

/// Fills adjacency and violating. `zeros` lists the other zeros to keep paths away from.
ZeroRecord classify_zero(const PeriodicPair& pair, const ZeroRecord& zero, CutStrategy strategy,
                         const std::vector<ZeroRecord>& zeros, const SpectrumOptions& opts = {});

/// Classification of already located zeros under every strategy.
Verdict verdict_from_zeros(const PeriodicPair& pair, const std::vector<ZeroRecord>& zeros,
                           const Window& window, const std::vector<CutStrategy>& strategies,
                           const SpectrumOptions& opts = {});

Verdict consistency_verdict(const PeriodicPair& pair, const Window& window,
                            const std::vector<CutStrategy>& strategies,
                            const SpectrumOptions& opts = {});

/// Q^b = -2 Z12 / (Z11 - Z22 - sqrt G) on the branch carried by fp.
cplx qb_ratio(const FloquetPoint& fp);
/// Q^b with the anchored branch.
cplx qb_ratio(const PeriodicPair& pair, cplx k, const SpectrumOptions& opts = {});

/// true iff Re G <= tol and |Im G| <= tol at every real sample; requires lambda = -1.
bool focusing_realline_check(const PeriodicPair& pair, const std::vector<double>& samples,
                             double tol = 1e-9);

}  // namespace nlsf
