#pragma once

#include <Eigen/Core>

#include <json.hpp>

#include "isobispec/grid.hpp"

namespace isobispec {

/// (M_h f)(x) = int_{3a/2}^{pi-x+a/2} K_h(x+t-a/2) f(t) dt on [3a/2, pi-a],
/// where K_h is the right antiderivative of h. h lives on [5a/2, pi].
RealFn apply_M(const RealFn& h, const RealFn& f);

/// Same operator with K_h already computed (support [5a/2, pi]).
RealFn apply_M_primitive(const RealFn& kernel_primitive, const RealFn& f);

/// Nystrom discretisation of M_h on the nodes of [3a/2, pi-a].
///
/// `matrix` is the trapezoid discretisation A(i,j) = kappa(x_i,t_j) w_j whose
/// weight-symmetrised form is exactly symmetric; `high_order` uses the same
/// composite rule as apply_M row by row (not symmetric, but consistent with
/// apply_M to rounding).
struct NystromOperator {
  Grid grid;
  RealFn h;
  RealFn kernel_primitive;
  int first_node = 0;
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  Eigen::MatrixXd matrix;
  Eigen::MatrixXd high_order;

  int panels() const { return static_cast<int>(nodes.size()) - 1; }
  /// D^{1/2} A D^{-1/2} with D = diag(weights).
  Eigen::MatrixXd symmetrized() const;
  Eigen::VectorXd apply(const Eigen::VectorXd& f) const { return matrix * f; }
};

NystromOperator build_nystrom(const RealFn& h);

enum class EigenChoice {
  LargestMagnitude,  ///< largest |eta|
  Smallest,          ///< algebraically smallest eta
  ByIndex,           ///< index-th entry in order of decreasing |eta|
};

struct Eigenpair {
  double eta = 0.0;
  RealFn e;  ///< unit L2 norm on [3a/2, pi-a], nonnegative integral
  double residual = 0.0;  ///< ||M_h e - eta e|| / ||e||
};

/// Dense symmetric solve (cyclic Jacobi) on the symmetrised trapezoid matrix,
/// followed by shifted inverse iteration on the high-order matrix.
Eigenpair leading_real_eigenpair(const NystromOperator& op, EigenChoice which = EigenChoice::LargestMagnitude,
                                 int index = 0);

struct NormalizedFamily {
  RealFn h;  ///< (target / eta) h
  RealFn e;
  int target = 1;
  double residual = 0.0;  ///< ||M_h' e - target e|| / ||e||
};

/// Rescales h so the eigenvalue of the chosen pair becomes target (+1 or -1).
NormalizedFamily normalize_family(const RealFn& h, const Eigenpair& pair, int target);

/// Machine-readable dump: schema, a, n, eta, residual, nodes, e (and the
/// trapezoid kernel matrix when requested).
nlohmann::json eigen_report(const NystromOperator& op, const Eigenpair& pair, bool with_matrix = false);

}  // namespace isobispec
