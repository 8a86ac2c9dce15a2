#pragma once

#include <vector>

#include <json.hpp>

#include "isobispec/charfn.hpp"

namespace isobispec {

/// Axis-aligned rectangle in the rho plane.
struct RhoRect {
  double re_lo = 0.0;
  double re_hi = 0.0;
  double im_lo = 0.0;
  double im_hi = 0.0;
};

struct Eigenvalue {
  int n = 0;
  Complex lambda{};
  Complex rho{};
  double residual = 0.0;
  bool certified = false;
};

struct Spectrum {
  CharKind kind = CharKind::Delta0;
  std::vector<Eigenvalue> eigenvalues;  ///< ordered by Re lambda, then Im lambda
  std::vector<Complex> seeds;
  RhoRect sweep{};
  int sweep_count = 0;   ///< winding number over `sweep`
  int found_in_sweep = 0;
  bool complete() const { return sweep_count == found_in_sweep; }

  nlohmann::json to_json() const;
};

struct SpectrumOptions {
  int n_eigs = 15;
  double left_edge = 0.25;
  double im_half_height = 2.0;
};

/// Zeroth-order rho seeds: n for Delta_0 and Theta_1, n - 1/2 for Delta_1
/// and Theta_0, n = 1..n_max.
std::vector<Complex> seeds(CharKind kind, int n_max);

/// Allowed size of |F(lambda)| at an accepted zero.
double residual_bound(CharKind kind, Complex lambda);

struct RefineResult {
  Complex lambda{};
  Complex rho{};
  int iterations = 0;
  double residual = 0.0;
};

/// Newton iteration in rho on F(rho^2) with a central-difference derivative.
/// Throws NoConvergence after 50 iterations and LeftTrustRegion if rho moves
/// more than 1 away from the seed.
RefineResult refine_root(const CharFnEval& ev, CharKind kind, Complex seed_rho);
Complex refine(const CharFnEval& ev, CharKind kind, Complex seed_rho);

/// Zeros of F(rho^2) inside the rectangle, by the argument principle. A
/// contour passing within 1e-12 of a zero is pushed outward by 1e-4 and
/// retried up to five times before ContourThroughZero is thrown.
int count_zeros(const CharFnEval& ev, CharKind kind, RhoRect rect);

/// Refines the seeds, certifies every root with its own winding-number-1
/// rectangle and checks the sweep rectangle 0 < Re rho < edge, |Im rho| <= 2
/// against the number of roots found in it.
Spectrum compute_spectrum(const CharFnEval& ev, CharKind kind, const SpectrumOptions& opts = {});

}  // namespace isobispec
