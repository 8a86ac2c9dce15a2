#pragma once

#include <array>
#include <memory>
#include <string>

#include <json.hpp>

#include "isobispec/grid.hpp"

namespace isobispec {

/// Data defining one iso-bispectral family: a normalised seed h on [5a/2, pi]
/// and an eigenfunction e on [3a/2, pi-a] with M_h e = eigsign * e.
struct FamilySpec {
  Grid grid;
  RealFn h;
  RealFn e;
  int eigsign = 1;
  RealFn kernel_primitive;  ///< K_h, clamped outside [5a/2, pi]
  RealFn e_cumulative;      ///< int_{3a/2}^x e(t) dt
  double relation_residual = 0.0;

  double integral_e() const { return integrate(e); }

  /// With validate = true, throws ConvergenceFailure unless the eigen
  /// relation holds to 1e-7 and InvalidArgument if h vanishes. Unvalidated
  /// specs exist for negative controls.
  static FamilySpec make(RealFn h, RealFn e, int eigsign, bool validate = true);
};

/// Interval labels of the seven breakpoint segments of [0, pi].
inline constexpr std::array<const char*, 7> kSegmentNames{
    "(0,a)", "(a,3a/2)", "(3a/2,pi-a)", "(pi-a,2a)", "(2a,pi-a/2)", "(pi-a/2,5a/2)", "(5a/2,pi)"};

struct Potential {
  Complex alpha{0.0, 0.0};
  ComplexFn fn;  ///< on [0, pi]
  std::shared_ptr<const FamilySpec> family;  ///< null for an arbitrary potential

  const Grid& grid() const { return fn.grid(); }
};

/// Member q_alpha of the family: alpha e on (3a/2, pi-a),
/// -alpha K_h(x+a/2) int_{3a/2}^{x-a/2} e on (2a, pi-a/2), h on (5a/2, pi),
/// zero elsewhere.
Potential build_potential(std::shared_ptr<const FamilySpec> spec, Complex alpha);

/// Wraps an arbitrary sampled potential on [0, pi]; it must vanish on (0, a).
Potential general_potential(ComplexFn fn);

/// omega = int_a^pi q.
Complex omega(const Potential& q);

struct StructuralReport {
  Complex alpha{};
  std::array<double, 7> segment_norms{};  ///< L2 norm per breakpoint segment
  std::array<double, 6> jumps{};          ///< |q(b+) - q(b-)| at interior breakpoints
  double max_abs = 0.0;

  nlohmann::json to_json() const;
};

StructuralReport structural_report(const Potential& q);

}  // namespace isobispec
