#include "isobispec/operator.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "isobispec/jacobi.hpp"

namespace isobispec {

namespace {

void check_seed_support(const RealFn& h) {
  const Grid& g = h.grid();
  if (h.lo() != g.node(Break::FiveHalfA) || h.hi() != g.node(Break::Pi))
    throw Error(Errc::SupportMismatch, "seed function must live on [5a/2, pi]");
}

void check_eigen_support(const RealFn& f, const Grid& g) {
  if (!(f.grid() == g)) throw Error(Errc::SupportMismatch, "functions live on different grids");
  if (f.lo() != g.node(Break::ThreeHalfA) || f.hi() != g.node(Break::PiMinusA))
    throw Error(Errc::SupportMismatch, "operand must live on [3a/2, pi-a]");
}

/// Upper integration node for row x_i: pi - x_i + a/2.
int cutoff_node(const Grid& g, int i) { return g.panels() - i + g.half_delay(); }

RealFn single_segment(const Grid& g, int lo, const Eigen::VectorXd& values) {
  return RealFn(g, {{lo, lo + static_cast<int>(values.size()) - 1, values}});
}

}  // namespace

RealFn apply_M_primitive(const RealFn& kernel_primitive, const RealFn& f) {
  const Grid& g = kernel_primitive.grid();
  check_eigen_support(f, g);
  const int lo = g.node(Break::ThreeHalfA);
  const int hi = g.node(Break::PiMinusA);
  const int m = g.half_delay();

  Eigen::VectorXd out(hi - lo + 1);
  for (int i = lo; i <= hi; ++i) {
    const int to = cutoff_node(g, i);
    double sum = 0.0;
    for (const auto& seg : f.segments()) {
      const int from = std::max(seg.lo, lo);
      const int upto = std::min(seg.hi, to);
      if (upto <= from) continue;
      quad::composite(from, upto, seg.lo, std::min(seg.hi, to), g.step(), [&](int j, double w) {
        sum += w * kernel_primitive.at(i + j - m) * seg.at(j);
      });
    }
    out[i - lo] = sum;
  }
  return single_segment(g, lo, out);
}

RealFn apply_M(const RealFn& h, const RealFn& f) {
  check_seed_support(h);
  return apply_M_primitive(antiderivative_from_right(h), f);
}

Eigen::MatrixXd NystromOperator::symmetrized() const {
  const Eigen::VectorXd s = weights.cwiseSqrt();
  return s.asDiagonal() * matrix * s.cwiseInverse().asDiagonal();
}

NystromOperator build_nystrom(const RealFn& h) {
  check_seed_support(h);
  const Grid& g = h.grid();
  const int lo = g.node(Break::ThreeHalfA);
  const int hi = g.node(Break::PiMinusA);
  const int n = hi - lo;
  if (n < 8) throw Error(Errc::InvalidArgument, "Nystrom discretisation needs at least 8 panels");
  const int m = g.half_delay();

  NystromOperator op;
  op.grid = g;
  op.h = h;
  op.kernel_primitive = antiderivative_from_right(h);
  op.first_node = lo;
  op.nodes.resize(n + 1);
  op.weights = Eigen::VectorXd::Constant(n + 1, g.step());
  op.weights[0] = op.weights[n] = 0.5 * g.step();
  for (int r = 0; r <= n; ++r) op.nodes[r] = g.x(lo + r);

  const RealFn& k = op.kernel_primitive;
  op.matrix = Eigen::MatrixXd::Zero(n + 1, n + 1);
  op.high_order = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int r = 0; r <= n; ++r) {
    const int i = lo + r;
    const int to = cutoff_node(g, i);
    for (int c = 0; lo + c <= to; ++c) {
      const int j = lo + c;
      double w = op.weights[c];
      if (j == to && c != 0 && c != n) w *= 0.5;
      op.matrix(r, c) = k.at(i + j - m) * w;
    }
    quad::composite(lo, to, lo, to, g.step(),
                    [&](int j, double w) { op.high_order(r, j - lo) += w * k.at(i + j - m); });
  }
  return op;
}

Eigenpair leading_real_eigenpair(const NystromOperator& op, EigenChoice which, int index) {
  if (op.matrix.cwiseAbs().maxCoeff() <= 1e-14) throw Error(Errc::ZeroOperator, "kernel vanishes identically");

  const auto sym = jacobi_eigen(op.symmetrized());
  const Eigen::Index n = sym.values.size();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return std::abs(sym.values[a]) > std::abs(sym.values[b]); });

  Eigen::Index pick = order.front();
  switch (which) {
    case EigenChoice::LargestMagnitude:
      break;
    case EigenChoice::Smallest:
      sym.values.minCoeff(&pick);
      break;
    case EigenChoice::ByIndex:
      if (index < 0 || index >= n) throw Error(Errc::InvalidArgument, "eigenvalue index out of range");
      pick = order[index];
      break;
  }
  const double largest = std::abs(sym.values[order.front()]);
  if (std::abs(sym.values[pick]) <= 1e-12 * largest)
    throw Error(Errc::ZeroOperator, "selected eigenvalue is numerically zero");

  // Back to function values, then polish against the high-order operator.
  Eigen::VectorXd z = sym.vectors.col(pick).cwiseQuotient(op.weights.cwiseSqrt());
  z.normalize();
  double mu = sym.values[pick];
  const Eigen::MatrixXd& b = op.high_order;
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(b.rows(), b.cols());
  for (int it = 0; it < 50; ++it) {
    const Eigen::VectorXd y = (b - mu * eye).partialPivLu().solve(z);
    if (!y.allFinite() || y.norm() == 0.0) break;
    z = y.normalized();
    const Eigen::VectorXd bz = b * z;
    const double next = z.dot(bz);
    const double res = (bz - next * z).norm();
    const double step = std::abs(next - mu);
    mu = next;
    if (res <= 1e-15 * std::abs(mu) * std::sqrt(static_cast<double>(z.size())) || (step == 0.0 && it > 0)) break;
  }

  RealFn e = single_segment(op.grid, op.first_node, z);
  e *= 1.0 / l2_norm(e);
  double total = integrate(e);
  double sign = total > 1e-14 ? 1.0 : (total < -1e-14 ? -1.0 : 0.0);
  if (sign == 0.0) {
    const auto& v = e.segments().front().values;
    for (Eigen::Index k = 0; k < v.size() && sign == 0.0; ++k)
      if (std::abs(v[k]) > 1e-14) sign = v[k] > 0 ? 1.0 : -1.0;
  }
  if (sign < 0) e *= -1.0;

  Eigenpair pair;
  pair.eta = mu;
  pair.e = e;
  RealFn r = apply_M_primitive(op.kernel_primitive, e);
  r -= mu * e;
  pair.residual = l2_norm(r) / l2_norm(e);
  if (!(pair.residual <= 1e-8))
    throw Error(Errc::ConvergenceFailure, "eigenpair residual " + std::to_string(pair.residual) + " above 1e-8");
  return pair;
}

NormalizedFamily normalize_family(const RealFn& h, const Eigenpair& pair, int target) {
  if (target != 1 && target != -1) throw Error(Errc::InvalidArgument, "target eigenvalue must be +1 or -1");
  if (pair.eta == 0.0) throw Error(Errc::ZeroOperator, "cannot normalise a zero eigenvalue");
  NormalizedFamily out;
  out.h = (target / pair.eta) * h;
  out.e = pair.e;
  out.target = target;
  RealFn r = apply_M(out.h, out.e);
  r -= static_cast<double>(target) * out.e;
  out.residual = l2_norm(r) / l2_norm(out.e);
  if (!(out.residual <= 1e-7))
    throw Error(Errc::ConvergenceFailure, "normalised eigen-relation residual " + std::to_string(out.residual));
  return out;
}

nlohmann::json eigen_report(const NystromOperator& op, const Eigenpair& pair, bool with_matrix) {
  nlohmann::json j;
  j["schema"] = 1;
  j["a"] = op.grid.delay();
  j["n"] = op.panels();
  j["eta"] = pair.eta;
  j["residual"] = pair.residual;
  std::vector<double> nodes(op.nodes.data(), op.nodes.data() + op.nodes.size());
  const auto& ev = pair.e.segments().front().values;
  std::vector<double> values(ev.data(), ev.data() + ev.size());
  j["nodes"] = nodes;
  j["e"] = values;
  if (with_matrix) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < op.matrix.rows(); ++r) {
      std::vector<double> row(op.matrix.cols());
      for (Eigen::Index c = 0; c < op.matrix.cols(); ++c) row[c] = op.matrix(r, c);
      rows.push_back(row);
    }
    j["matrix"] = rows;
  }
  return j;
}

}  // namespace isobispec
