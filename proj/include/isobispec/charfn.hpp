#pragma once

#include <vector>

#include "isobispec/grid.hpp"
#include "isobispec/potential.hpp"

namespace isobispec {

enum class QMethod {
  Reordered,  ///< single integrals after exchanging the order of integration
  Original,   ///< nested double integral, evaluated directly (slow oracle)
};

/// Quadratic correction Q_k on [3a/2, pi-a/2]:
///   Q_k(x) = int_a^{x-a/2} q * int_{x+a/2}^pi q
///            - (-1)^k int_a^{pi-x+a/2} q(t) K_q(x+t-a/2) dt.
ComplexFn compute_Q(const Potential& q, int k, QMethod method = QMethod::Reordered);

struct WFunction {
  int k = 0;
  ComplexFn w;  ///< on [a, pi]
  QMethod provenance = QMethod::Reordered;
};

/// w_k = q on (a, 3a/2) and (pi-a/2, pi), q + Q_k on (3a/2, pi-a/2).
WFunction compute_w(const Potential& q, int k, QMethod method = QMethod::Reordered);

enum class CharKind { Delta0, Delta1, Theta0, Theta1 };

const char* to_string(CharKind kind);

/// sin(z)/z with a Taylor branch near zero.
Complex sinc(Complex z);

/// Closed-form characteristic functions of a potential, evaluated from w_0,
/// w_1 and omega:
///   Delta_0 = sin(rho pi)/rho - omega cos(rho(pi-a))/(2 rho^2)
///             + 1/(2 rho^2) int_a^pi w_0(x) cos(rho(pi-2x+a)) dx
///   Delta_1 = cos(rho pi) + omega sin(rho(pi-a))/(2 rho)
///             - 1/(2 rho) int_a^pi w_0(x) sin(rho(pi-2x+a)) dx
///   Theta_0 = cos(rho pi) + omega sin(rho(pi-a))/(2 rho)
///             + 1/(2 rho) int_a^pi w_1(x) sin(rho(pi-2x+a)) dx
///   Theta_1 = -rho sin(rho pi) + omega/2 cos(rho(pi-a))
///             + 1/2 int_a^pi w_1(x) cos(rho(pi-2x+a)) dx
/// with lambda = rho^2. For |rho| <= epsilon the sinc rearrangements are used.
///
/// In Delta_j, omega is taken as the quadrature value of int w_0, which is
/// what makes the discrete Delta_0 pole-free at rho = 0; omega_q() keeps the
/// value computed from q itself.
class CharFnEval {
 public:
  explicit CharFnEval(const Potential& q, double epsilon = 1e-3);

  Complex operator()(CharKind kind, Complex lambda) const;
  Complex delta(int j, Complex lambda) const;
  Complex theta(int j, Complex lambda) const;

  /// Evaluation by a fixed path, in terms of rho (no trust-region check).
  Complex direct(CharKind kind, Complex rho) const;
  Complex series(CharKind kind, Complex rho) const;

  const WFunction& w0() const { return w0_; }
  const WFunction& w1() const { return w1_; }
  Complex omega_q() const { return omega_q_; }
  Complex omega_w0() const { return omega_w0_; }
  double delay() const { return a_; }
  double epsilon() const { return epsilon_; }
  const Grid& grid() const { return grid_; }

  /// Largest |Re rho| and |Im rho| for which plain Simpson on this grid is
  /// trusted; outside, evaluation throws GridTooCoarseForRho.
  double max_re_rho() const;
  double max_im_rho() const { return 15.0; }
  void check_rho(Complex rho) const;

 private:
  Grid grid_;
  double a_ = 0.0;
  double epsilon_ = 1e-3;
  WFunction w0_;
  WFunction w1_;
  Complex omega_q_{};
  Complex omega_w0_{};
  std::vector<double> x_;
  std::vector<Complex> c0_;  // quadrature weight times w_0
  std::vector<Complex> c1_;  // quadrature weight times w_1
};

Complex eval_delta(const CharFnEval& ev, int j, Complex lambda);
Complex eval_theta(const CharFnEval& ev, int j, Complex lambda);

}  // namespace isobispec
