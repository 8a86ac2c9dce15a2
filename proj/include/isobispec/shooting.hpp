#pragma once

#include "isobispec/charfn.hpp"
#include "isobispec/grid.hpp"
#include "isobispec/potential.hpp"

namespace isobispec {

enum class ShotKind {
  S,  ///< y(0) = 0, y'(0) = 1
  C,  ///< y(0) = 1, y'(0) = 0
};

struct ShootingSolution {
  Complex lambda{};
  ComplexFn y;
  ComplexFn yprime;
  ShotKind kind = ShotKind::S;
};

/// Solves -y'' + q(x) y(x-a) = lambda y on [0, pi] through the Volterra form
///   y(x) = y_free(x) + int_a^x sin(rho(x-s))/rho q(s) y(s-a) ds,
/// marching node by node: the delayed value y(s-a) is always already known.
ShootingSolution shoot(const Potential& q, Complex lambda, ShotKind kind);

/// Same, with arbitrary initial data y(0) = y0, y'(0) = dy0.
ShootingSolution shoot_initial(const Potential& q, Complex lambda, Complex y0, Complex dy0);

struct CharValues {
  Complex delta0, delta1, theta0, theta1;

  Complex operator[](CharKind kind) const;
};

/// (S(pi), S'(pi), C(pi), C'(pi)) from two shots.
CharValues char_values(const Potential& q, Complex lambda);

}  // namespace isobispec
