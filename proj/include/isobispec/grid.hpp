#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <iosfwd>
#include <numbers>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "isobispec/error.hpp"

namespace isobispec {

using Complex = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Breakpoints
// ---------------------------------------------------------------------------

/// Named nodes of the delay decomposition of [0, pi], in ascending order for
/// a in [pi/3, 2pi/5).
enum class Break : int { Zero, A, ThreeHalfA, PiMinusA, TwoA, PiMinusHalfA, FiveHalfA, Pi };

inline constexpr int kBreakCount = 8;

struct Breakpoints {
  double a = 0.0;
  /// Indexed by Break; values are 0, a, 3a/2, pi-a, 2a, pi-a/2, 5a/2, pi.
  std::array<double, kBreakCount> nodes{};
  /// False when the delay was accepted outside [pi/3, 2pi/5) in relaxed mode.
  bool supported = true;

  double operator[](Break b) const { return nodes[static_cast<int>(b)]; }
  std::array<double, kBreakCount> sorted() const;
  /// Length of the segment between consecutive sorted nodes s and s+1.
  double length(int segment) const;
  bool empty(int segment) const { return length(segment) <= 1e-12; }
};

/// Validates the delay and lays out the breakpoints. With strict = false any
/// a in (0, pi) is accepted and `supported` records whether the construction
/// is actually backed by the theory.
Breakpoints make_breakpoints(double a, bool strict = true);

// ---------------------------------------------------------------------------
// Grid
// ---------------------------------------------------------------------------

/// Delay expressed as a rational multiple of pi: a = pi * num / den.
struct DelayFraction {
  long num = 7;
  long den = 20;
  double radians() const { return kPi * static_cast<double>(num) / static_cast<double>(den); }
};

/// Uniform grid on [0, pi] whose step divides a/2, so every breakpoint and
/// every shift by a/2 or a maps nodes onto nodes.
class Grid {
 public:
  Grid() = default;

  /// Smallest aligned grid with at least `target_panels` panels on [0, pi]
  /// and at least 4 panels in every nonempty breakpoint segment.
  static Grid aligned(DelayFraction a, int target_panels, bool strict = true);

  int panels() const { return panels_; }
  int half_delay() const { return half_; }
  double step() const { return kPi / panels_; }
  double delay() const { return x(2 * half_); }
  DelayFraction fraction() const { return fraction_; }
  double x(int node) const { return kPi * node / panels_; }

  int node(Break b) const { return breaks_[static_cast<int>(b)]; }
  const std::array<int, kBreakCount>& break_nodes() const { return breaks_; }
  /// Panel count of the breakpoint segment starting at `b`.
  int segment_panels(Break b) const;

  /// Node index for x; throws OffGrid unless x sits on a node.
  int node_of(double x) const;

  bool operator==(const Grid& other) const {
    return panels_ == other.panels_ && half_ == other.half_;
  }

 private:
  int panels_ = 0;
  int half_ = 0;
  DelayFraction fraction_{};
  std::array<int, kBreakCount> breaks_{};
};

// ---------------------------------------------------------------------------
// Quadrature on uniform node ranges
// ---------------------------------------------------------------------------

namespace quad {

/// Emits (node, weight) pairs for the integral from node `from` to node `to`
/// on a uniform grid with spacing `step`, touching only nodes in [lo, hi]
/// (the range over which the integrand is smooth). Composite Simpson, a 3/8
/// tail for odd panel counts, and a three-point end rule for a single panel;
/// a single panel with no smooth neighbour falls back to the trapezoid rule.
/// Exact for quadratics on every path except the last.
template <typename Add>
void composite(int from, int to, int lo, int hi, double step, Add&& add) {
  const int n = to - from;
  if (n <= 0) return;
  if (n == 1) {
    if (to + 1 <= hi) {
      add(from, 5.0 * step / 12.0);
      add(to, 8.0 * step / 12.0);
      add(to + 1, -step / 12.0);
    } else if (from - 1 >= lo) {
      add(from - 1, -step / 12.0);
      add(from, 8.0 * step / 12.0);
      add(to, 5.0 * step / 12.0);
    } else {
      add(from, 0.5 * step);
      add(to, 0.5 * step);
    }
    return;
  }
  const int simpson_panels = (n % 2 == 0) ? n : n - 3;
  for (int k = 0; k < simpson_panels; k += 2) {
    add(from + k, step / 3.0);
    add(from + k + 1, 4.0 * step / 3.0);
    add(from + k + 2, step / 3.0);
  }
  if (n % 2 == 1) {
    const int s = from + simpson_panels;
    add(s, 3.0 * step / 8.0);
    add(s + 1, 9.0 * step / 8.0);
    add(s + 2, 9.0 * step / 8.0);
    add(s + 3, 3.0 * step / 8.0);
  }
}

/// Running integral of uniformly spaced samples starting at index 0.
template <typename Derived>
auto cumulative(const Eigen::MatrixBase<Derived>& v, double step) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = v.size() - 1;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> c = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(v.size());
  if (n < 1) return c;
  if (n == 1) {
    c[1] = 0.5 * step * (v[0] + v[1]);
    return c;
  }
  for (Eigen::Index k = 1; k <= n; ++k) {
    if (k % 2 == 0) {
      c[k] = c[k - 2] + step / 3.0 * (v[k - 2] + 4.0 * v[k - 1] + v[k]);
    } else if (k + 1 <= n) {
      c[k] = c[k - 1] + step / 12.0 * (5.0 * v[k - 1] + 8.0 * v[k] - v[k + 1]);
    } else {
      c[k] = c[k - 1] + step / 12.0 * (-v[k - 2] + 8.0 * v[k - 1] + 5.0 * v[k]);
    }
  }
  return c;
}

}  // namespace quad

// ---------------------------------------------------------------------------
// PiecewiseFn
// ---------------------------------------------------------------------------

enum class Side { Left, Right };

/// Behaviour of evaluation outside the support: throw, or hold the endpoint
/// value constant.
enum class Extension { None, Clamp };

/// A function on [lo, hi] (node indices of a Grid) stored as a tiling of
/// segments, each holding its own samples at every node it covers. Adjacent
/// segments share their boundary node, which is how jumps are represented.
template <typename Scalar>
class PiecewiseFn {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Real = typename Eigen::NumTraits<Scalar>::Real;

  struct Segment {
    int lo = 0;
    int hi = 0;
    Vector values;
    int panels() const { return hi - lo; }
    Scalar at(int node) const { return values[node - lo]; }
  };

  PiecewiseFn() = default;

  PiecewiseFn(Grid grid, std::vector<Segment> segments, Extension ext = Extension::None)
      : grid_(grid), segments_(std::move(segments)), ext_(ext) {
    if (segments_.empty()) throw Error(Errc::InvalidArgument, "PiecewiseFn needs at least one segment");
    for (std::size_t s = 0; s < segments_.size(); ++s) {
      const auto& seg = segments_[s];
      if (seg.hi < seg.lo || seg.values.size() != seg.hi - seg.lo + 1)
        throw Error(Errc::InvalidArgument, "segment sample count does not match its node range");
      if (s > 0 && segments_[s - 1].hi != seg.lo)
        throw Error(Errc::InvalidArgument, "segments must tile the support");
    }
    if (lo() < 0 || hi() > grid_.panels()) throw Error(Errc::OutOfSupport, "support exceeds [0, pi]");
  }

  /// Samples f(x) on [lo, hi], cutting segments at every grid breakpoint
  /// strictly inside the range.
  template <typename F>
  static PiecewiseFn sample(const Grid& grid, int lo, int hi, F&& f) {
    std::vector<Segment> segs;
    for (const auto& [s_lo, s_hi] : breakpoint_pieces(grid, lo, hi)) {
      Segment seg{s_lo, s_hi, Vector(s_hi - s_lo + 1)};
      for (int i = s_lo; i <= s_hi; ++i) seg.values[i - s_lo] = static_cast<Scalar>(f(grid.x(i)));
      segs.push_back(std::move(seg));
    }
    return PiecewiseFn(grid, std::move(segs));
  }

  static PiecewiseFn constant(const Grid& grid, int lo, int hi, Scalar c) {
    return sample(grid, lo, hi, [c](double) { return c; });
  }

  /// Node ranges between consecutive breakpoints covering [lo, hi]. Zero
  /// length pieces are kept so branch indexing stays uniform.
  static std::vector<std::pair<int, int>> breakpoint_pieces(const Grid& grid, int lo, int hi) {
    std::vector<int> cuts{lo};
    for (int b : grid.break_nodes())
      if (b > lo && b < hi) cuts.push_back(b);
    cuts.push_back(hi);
    std::vector<std::pair<int, int>> out;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) out.emplace_back(cuts[k], cuts[k + 1]);
    return out;
  }

  const Grid& grid() const { return grid_; }
  int lo() const { return segments_.front().lo; }
  int hi() const { return segments_.back().hi; }
  double lo_x() const { return grid_.x(lo()); }
  double hi_x() const { return grid_.x(hi()); }
  const std::vector<Segment>& segments() const { return segments_; }
  std::vector<Segment>& segments() { return segments_; }
  Extension extension() const { return ext_; }
  bool contains(int node) const { return node >= lo() && node <= hi(); }

  PiecewiseFn with_extension(Extension ext) const {
    PiecewiseFn out = *this;
    out.ext_ = ext;
    return out;
  }

  /// Index of the segment that owns `node` from the given side. Zero-length
  /// segments are only returned when the whole support has zero length.
  std::size_t segment_index(int node, Side side) const {
    if (!contains(node)) throw Error(Errc::OutOfSupport, "node " + std::to_string(node) + " outside support");
    const std::size_t n = segments_.size();
    for (std::size_t s = 0; s < n; ++s) {
      const auto& seg = segments_[s];
      if (seg.panels() == 0) continue;
      if (side == Side::Right ? (node >= seg.lo && node < seg.hi) : (node > seg.lo && node <= seg.hi)) return s;
    }
    // Right limit at the end of support, left limit at its start.
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t s = side == Side::Right ? n - 1 - k : k;
      if (segments_[s].panels() > 0) return s;
    }
    return 0;
  }

  /// One-sided sample at a node (the two sides differ only at breakpoints).
  Scalar at(int node, Side side = Side::Right) const {
    if (!contains(node)) {
      if (ext_ == Extension::None)
        throw Error(Errc::OutOfSupport, "node " + std::to_string(node) + " outside support");
      return node < lo() ? at(lo(), Side::Right) : at(hi(), Side::Left);
    }
    return segments_[segment_index(node, side)].at(node);
  }

  /// Piecewise-linear interpolation between nodes; right-continuous at
  /// breakpoints, left limit at the upper end of support.
  Scalar operator()(double x) const {
    const double p = x / grid_.step();
    const double tol = 1e-9;
    if (p < lo() - tol || p > hi() + tol) {
      if (ext_ == Extension::None) throw Error(Errc::OutOfSupport, "x = " + std::to_string(x) + " outside support");
      return p < lo() ? at(lo(), Side::Right) : at(hi(), Side::Left);
    }
    const double clamped = std::clamp(p, static_cast<double>(lo()), static_cast<double>(hi()));
    int i = static_cast<int>(std::floor(clamped + tol));
    if (i >= hi()) return at(hi(), Side::Left);
    const double t = clamped - i;
    if (t <= tol) return at(i, Side::Right);
    const auto& seg = segments_[segment_index(i, Side::Right)];
    return (1.0 - t) * seg.at(i) + t * seg.at(i + 1);
  }

  template <typename F>
  auto map(F&& f) const {
    using Out = std::decay_t<decltype(f(std::declval<Scalar>()))>;
    std::vector<typename PiecewiseFn<Out>::Segment> segs;
    segs.reserve(segments_.size());
    for (const auto& seg : segments_)
      segs.push_back({seg.lo, seg.hi, seg.values.unaryExpr(f).template cast<Out>().eval()});
    return PiecewiseFn<Out>(grid_, std::move(segs), ext_);
  }

  PiecewiseFn restricted(int new_lo, int new_hi) const {
    if (new_lo < lo() || new_hi > hi() || new_lo > new_hi)
      throw Error(Errc::OutOfSupport, "restriction range outside support");
    std::vector<Segment> segs;
    if (new_lo == new_hi) {
      Vector v(1);
      v[0] = at(new_lo, Side::Right);
      segs.push_back({new_lo, new_lo, v});
    } else {
      for (const auto& seg : segments_) {
        const int a = std::max(seg.lo, new_lo);
        const int b = std::min(seg.hi, new_hi);
        if (b <= a) continue;
        segs.push_back({a, b, seg.values.segment(a - seg.lo, b - a + 1)});
      }
    }
    return PiecewiseFn(grid_, std::move(segs), ext_);
  }

  bool same_layout(const PiecewiseFn& other) const {
    if (!(grid_ == other.grid_) || segments_.size() != other.segments_.size()) return false;
    for (std::size_t s = 0; s < segments_.size(); ++s)
      if (segments_[s].lo != other.segments_[s].lo || segments_[s].hi != other.segments_[s].hi) return false;
    return true;
  }

  PiecewiseFn& operator*=(Scalar c) {
    for (auto& seg : segments_) seg.values *= c;
    return *this;
  }

  PiecewiseFn& operator+=(const PiecewiseFn& other) {
    require_same_layout(other);
    for (std::size_t s = 0; s < segments_.size(); ++s) segments_[s].values += other.segments_[s].values;
    return *this;
  }

  PiecewiseFn& operator-=(const PiecewiseFn& other) {
    require_same_layout(other);
    for (std::size_t s = 0; s < segments_.size(); ++s) segments_[s].values -= other.segments_[s].values;
    return *this;
  }

  Real max_abs() const {
    Real m = 0;
    for (const auto& seg : segments_) m = std::max<Real>(m, seg.values.cwiseAbs().maxCoeff());
    return m;
  }

 private:
  void require_same_layout(const PiecewiseFn& other) const {
    if (!same_layout(other)) throw Error(Errc::SupportMismatch, "piecewise functions have different layouts");
  }

  Grid grid_{};
  std::vector<Segment> segments_;
  Extension ext_ = Extension::None;
};

using RealFn = PiecewiseFn<double>;
using ComplexFn = PiecewiseFn<Complex>;

template <typename Scalar>
PiecewiseFn<Scalar> operator*(Scalar c, PiecewiseFn<Scalar> f) {
  f *= c;
  return f;
}

template <typename Scalar>
PiecewiseFn<Scalar> operator+(PiecewiseFn<Scalar> f, const PiecewiseFn<Scalar>& g) {
  f += g;
  return f;
}

template <typename Scalar>
PiecewiseFn<Scalar> operator-(PiecewiseFn<Scalar> f, const PiecewiseFn<Scalar>& g) {
  f -= g;
  return f;
}

inline ComplexFn to_complex(const RealFn& f) {
  return f.map([](double v) { return Complex(v, 0.0); });
}

// ---------------------------------------------------------------------------
// Calculus on piecewise functions
// ---------------------------------------------------------------------------

/// Integral over nodes [lo, hi], segment by segment so jumps never sit
/// inside a quadrature panel.
template <typename Scalar>
Scalar integrate(const PiecewiseFn<Scalar>& f, int lo, int hi) {
  if (lo > hi) throw Error(Errc::InvalidArgument, "integrate: lo > hi");
  if (lo < f.lo() || hi > f.hi()) throw Error(Errc::OutOfSupport, "integrate: range outside support");
  Scalar sum(0);
  const double h = f.grid().step();
  for (const auto& seg : f.segments()) {
    const int from = std::max(seg.lo, lo);
    const int to = std::min(seg.hi, hi);
    if (to <= from) continue;
    quad::composite(from, to, seg.lo, seg.hi, h, [&](int node, double w) { sum += w * seg.at(node); });
  }
  return sum;
}

template <typename Scalar>
Scalar integrate(const PiecewiseFn<Scalar>& f, double lo, double hi) {
  if (lo > hi) throw Error(Errc::InvalidArgument, "integrate: lo > hi");
  const double tol = 1e-9 * f.grid().step();
  if (lo < f.lo_x() - tol || hi > f.hi_x() + tol) throw Error(Errc::OutOfSupport, "integrate: range outside support");
  return integrate(f, f.grid().node_of(lo), f.grid().node_of(hi));
}

template <typename Scalar>
Scalar integrate(const PiecewiseFn<Scalar>& f) {
  return integrate(f, f.lo(), f.hi());
}

template <typename Scalar>
double l2_norm(const PiecewiseFn<Scalar>& f, int lo, int hi) {
  const RealFn sq = f.map([](Scalar v) { return static_cast<double>(std::norm(v)); });
  return std::sqrt(std::max(0.0, integrate(sq, lo, hi)));
}

template <typename Scalar>
double l2_norm(const PiecewiseFn<Scalar>& f) {
  return l2_norm(f, f.lo(), f.hi());
}

/// F(x) = integral of f from lo() to x. Continuous across segment joins.
template <typename Scalar>
PiecewiseFn<Scalar> cumulative_from_left(const PiecewiseFn<Scalar>& f) {
  auto segs = f.segments();
  Scalar offset(0);
  for (auto& seg : segs) {
    typename PiecewiseFn<Scalar>::Vector c = quad::cumulative(seg.values, f.grid().step());
    c.array() += offset;
    offset = c[c.size() - 1];
    seg.values = std::move(c);
  }
  return PiecewiseFn<Scalar>(f.grid(), std::move(segs), Extension::Clamp);
}

/// K(x) = integral of f from x to hi(); K(hi) = 0. Evaluation outside the
/// support holds the endpoint values (K(lo) below, 0 above).
template <typename Scalar>
PiecewiseFn<Scalar> antiderivative_from_right(const PiecewiseFn<Scalar>& f) {
  auto segs = f.segments();
  Scalar offset(0);
  for (auto it = segs.rbegin(); it != segs.rend(); ++it) {
    typename PiecewiseFn<Scalar>::Vector rev = it->values.reverse();
    typename PiecewiseFn<Scalar>::Vector c = quad::cumulative(rev, f.grid().step());
    c.array() += offset;
    offset = c[c.size() - 1];
    it->values = c.reverse();
  }
  return PiecewiseFn<Scalar>(f.grid(), std::move(segs), Extension::Clamp);
}

// ---------------------------------------------------------------------------
// CSV interchange: header `x,re[,im]`, strictly increasing x.
// ---------------------------------------------------------------------------

struct SampledCurve {
  std::vector<double> x;
  std::vector<Complex> y;
  bool complex_valued = false;
};

SampledCurve read_csv(std::istream& in);
SampledCurve read_csv_file(const std::string& path);

/// One row per node; at breakpoints the right limit is written (left limit at
/// the last node) so x stays strictly increasing.
void write_csv(std::ostream& out, const RealFn& f);
void write_csv(std::ostream& out, const ComplexFn& f);

/// Linear interpolation of tabulated data onto [lo, hi] of the grid.
RealFn resample(const Grid& grid, int lo, int hi, const SampledCurve& curve);

}  // namespace isobispec
