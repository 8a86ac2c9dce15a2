#include "isobispec/charfn.hpp"

#include <algorithm>
#include <cmath>

namespace isobispec {

namespace {

/// int_from^to f(s) g(s + shift) ds, split wherever either factor crosses one
/// of its segment boundaries so every quadrature panel sees smooth data.
Complex shifted_product(const ComplexFn& f, const ComplexFn& g, int shift, int from, int to) {
  if (to <= from) return Complex(0.0);
  std::vector<int> cuts{from, to};
  for (const auto& seg : f.segments())
    for (int b : {seg.lo, seg.hi})
      if (b > from && b < to) cuts.push_back(b);
  for (const auto& seg : g.segments())
    for (int b : {seg.lo - shift, seg.hi - shift})
      if (b > from && b < to) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const double step = f.grid().step();
  Complex sum(0.0);
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const int p = cuts[k];
    const int r = cuts[k + 1];
    const auto& fs = f.segments()[f.segment_index(p, Side::Right)];
    const auto& gs = g.segments()[g.segment_index(p + shift, Side::Right)];
    const int lo = std::max(fs.lo, gs.lo - shift);
    const int hi = std::min(fs.hi, gs.hi - shift);
    quad::composite(p, r, lo, hi, step, [&](int j, double w) { sum += w * fs.at(j) * gs.at(j + shift); });
  }
  return sum;
}

ComplexFn single_segment(const Grid& g, int lo, int hi, ComplexFn::Vector values) {
  return ComplexFn(g, {{lo, hi, std::move(values)}});
}

ComplexFn q_reordered(const ComplexFn& q, const ComplexFn& c, const ComplexFn& kq, int k) {
  const Grid& g = q.grid();
  const int m = g.half_delay();
  const int n = g.panels();
  const int lo = g.node(Break::ThreeHalfA);
  const int hi = g.node(Break::PiMinusHalfA);
  const double sgn = (k % 2 == 0) ? 1.0 : -1.0;

  ComplexFn::Vector out(hi - lo + 1);
  for (int i = lo; i <= hi; ++i) {
    const Complex outer = c.at(i - m) * kq.at(i + m);
    const Complex inner = shifted_product(q, kq, i - m, 2 * m, n - i + m);
    out[i - lo] = outer - sgn * inner;
  }
  return single_segment(g, lo, hi, std::move(out));
}

ComplexFn q_original(const ComplexFn& q, const ComplexFn& c, const ComplexFn& kq, int k) {
  const Grid& g = q.grid();
  const int m = g.half_delay();
  const int n = g.panels();
  const int a = 2 * m;
  const int t_lo = a;
  const int t_hi = n - a;
  const double sgn = (k % 2 == 0) ? 1.0 : -1.0;

  // R(t) = int_{t+a}^pi q(tau - t) q(tau) dtau on every node of [a, pi-a].
  std::vector<Complex> r(t_hi - t_lo + 1);
  for (int j = t_lo; j <= t_hi; ++j) r[j - t_lo] = shifted_product(q, q, -j, j + a, n);

  // Integrand of the outer integral jumps where q(t) or q(t+a) does.
  std::vector<int> cuts{t_lo, t_hi};
  for (const auto& seg : q.segments())
    for (int b : {seg.lo, seg.hi, seg.lo - a, seg.hi - a})
      if (b > t_lo && b < t_hi) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  struct Piece {
    int lo, hi;
    std::vector<Complex> f;
  };
  std::vector<Piece> pieces;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    Piece pc{cuts[s], cuts[s + 1], {}};
    const auto& q_shift = q.segments()[q.segment_index(pc.lo + a, Side::Right)];
    const auto& q_here = q.segments()[q.segment_index(pc.lo, Side::Right)];
    for (int j = pc.lo; j <= pc.hi; ++j)
      pc.f.push_back(q_shift.at(j + a) * c.at(j) - q_here.at(j) * kq.at(j + a) - sgn * r[j - t_lo]);
    pieces.push_back(std::move(pc));
  }

  const int lo = g.node(Break::ThreeHalfA);
  const int hi = g.node(Break::PiMinusHalfA);
  ComplexFn::Vector out(hi - lo + 1);
  for (int i = lo; i <= hi; ++i) {
    Complex sum(0.0);
    for (const auto& pc : pieces) {
      const int from = std::max(pc.lo, i - m);
      if (pc.hi <= from) continue;
      quad::composite(from, pc.hi, pc.lo, pc.hi, g.step(), [&](int j, double w) { sum += w * pc.f[j - pc.lo]; });
    }
    out[i - lo] = sum;
  }
  return single_segment(g, lo, hi, std::move(out));
}

}  // namespace

ComplexFn compute_Q(const Potential& q, int k, QMethod method) {
  if (k != 0 && k != 1) throw Error(Errc::InvalidArgument, "k must be 0 or 1");
  const Grid& g = q.grid();
  const ComplexFn tail = q.fn.restricted(g.node(Break::A), g.panels());
  const ComplexFn c = cumulative_from_left(tail);
  const ComplexFn kq = antiderivative_from_right(tail);
  return method == QMethod::Reordered ? q_reordered(tail, c, kq, k) : q_original(tail, c, kq, k);
}

WFunction compute_w(const Potential& q, int k, QMethod method) {
  const Grid& g = q.grid();
  const int lo = g.node(Break::ThreeHalfA);
  const int hi = g.node(Break::PiMinusHalfA);
  const ComplexFn qq = compute_Q(q, k, method);

  ComplexFn w = q.fn.restricted(g.node(Break::A), g.panels());
  for (auto& seg : w.segments()) {
    if (seg.hi <= lo || seg.lo >= hi) continue;
    if (seg.lo < lo || seg.hi > hi)
      throw Error(Errc::SupportMismatch, "potential segments must break at 3a/2 and pi-a/2");
    for (int i = seg.lo; i <= seg.hi; ++i) seg.values[i - seg.lo] += qq.at(i);
  }
  return {k, std::move(w), method};
}

const char* to_string(CharKind kind) {
  switch (kind) {
    case CharKind::Delta0: return "delta0";
    case CharKind::Delta1: return "delta1";
    case CharKind::Theta0: return "theta0";
    case CharKind::Theta1: return "theta1";
  }
  return "?";
}

Complex sinc(Complex z) {
  if (std::abs(z) > 1e-4) return std::sin(z) / z;
  const Complex z2 = z * z;
  return 1.0 + z2 * (-1.0 / 6.0 + z2 * (1.0 / 120.0 + z2 * (-1.0 / 5040.0 + z2 / 362880.0)));
}

// ---------------------------------------------------------------------------

CharFnEval::CharFnEval(const Potential& q, double epsilon)
    : grid_(q.grid()),
      a_(q.grid().delay()),
      epsilon_(epsilon),
      w0_(compute_w(q, 0)),
      w1_(compute_w(q, 1)),
      omega_q_(omega(q)) {
  const double h = grid_.step();
  for (std::size_t s = 0; s < w0_.w.segments().size(); ++s) {
    const auto& s0 = w0_.w.segments()[s];
    const auto& s1 = w1_.w.segments()[s];
    if (s0.panels() == 0) continue;
    std::vector<double> wt(s0.panels() + 1, 0.0);
    quad::composite(s0.lo, s0.hi, s0.lo, s0.hi, h, [&](int j, double w) { wt[j - s0.lo] += w; });
    for (int j = s0.lo; j <= s0.hi; ++j) {
      x_.push_back(grid_.x(j));
      c0_.push_back(wt[j - s0.lo] * s0.at(j));
      c1_.push_back(wt[j - s0.lo] * s1.at(j));
    }
  }
  omega_w0_ = Complex(0.0);
  for (const auto& c : c0_) omega_w0_ += c;
}

double CharFnEval::max_re_rho() const { return 40.0 * grid_.panels() / 2048.0; }

void CharFnEval::check_rho(Complex rho) const {
  if (std::abs(rho.real()) > max_re_rho() || std::abs(rho.imag()) > max_im_rho())
    throw Error(Errc::GridTooCoarseForRho, "|rho| beyond the range trusted on this grid; refine --grid-n");
}

Complex CharFnEval::direct(CharKind kind, Complex rho) const {
  const double a = a_;
  const Complex b = rho * (kPi - a);
  Complex sum(0.0);
  switch (kind) {
    case CharKind::Delta0: {
      // omega cos(B) folded into the sum term by term (omega = sum of c0).
      const Complex cb = std::cos(b);
      for (std::size_t k = 0; k < x_.size(); ++k) sum += c0_[k] * (std::cos(rho * (kPi - 2.0 * x_[k] + a)) - cb);
      return std::sin(rho * kPi) / rho + sum / (2.0 * rho * rho);
    }
    case CharKind::Delta1: {
      const Complex sb = std::sin(b);
      for (std::size_t k = 0; k < x_.size(); ++k) sum += c0_[k] * (sb - std::sin(rho * (kPi - 2.0 * x_[k] + a)));
      return std::cos(rho * kPi) + sum / (2.0 * rho);
    }
    case CharKind::Theta0:
      for (std::size_t k = 0; k < x_.size(); ++k) sum += c1_[k] * std::sin(rho * (kPi - 2.0 * x_[k] + a));
      return std::cos(rho * kPi) + omega_q_ * std::sin(b) / (2.0 * rho) + sum / (2.0 * rho);
    case CharKind::Theta1:
      for (std::size_t k = 0; k < x_.size(); ++k) sum += c1_[k] * std::cos(rho * (kPi - 2.0 * x_[k] + a));
      return -rho * std::sin(rho * kPi) + 0.5 * omega_q_ * std::cos(b) + 0.5 * sum;
  }
  return sum;
}

Complex CharFnEval::series(CharKind kind, Complex rho) const {
  const double a = a_;
  Complex sum(0.0);
  switch (kind) {
    case CharKind::Delta0:
      for (std::size_t k = 0; k < x_.size(); ++k) {
        const double x = x_[k];
        sum += c0_[k] * (kPi - x) * (x - a) * sinc(rho * (kPi - x)) * sinc(rho * (x - a));
      }
      return kPi * sinc(rho * kPi) + sum;
    case CharKind::Delta1:
      for (std::size_t k = 0; k < x_.size(); ++k) {
        const double x = x_[k];
        sum += c0_[k] * (x - a) * std::cos(rho * (kPi - x)) * sinc(rho * (x - a));
      }
      return std::cos(rho * kPi) + sum;
    case CharKind::Theta0:
      for (std::size_t k = 0; k < x_.size(); ++k) {
        const double d = kPi - 2.0 * x_[k] + a;
        sum += c1_[k] * d * sinc(rho * d);
      }
      return std::cos(rho * kPi) + omega_q_ * (0.5 * (kPi - a)) * sinc(rho * (kPi - a)) + 0.5 * sum;
    case CharKind::Theta1:
      return direct(kind, rho);
  }
  return sum;
}

Complex CharFnEval::operator()(CharKind kind, Complex lambda) const {
  const Complex rho = std::sqrt(lambda);
  check_rho(rho);
  return std::abs(rho) > epsilon_ ? direct(kind, rho) : series(kind, rho);
}

Complex CharFnEval::delta(int j, Complex lambda) const {
  return (*this)(j == 0 ? CharKind::Delta0 : CharKind::Delta1, lambda);
}

Complex CharFnEval::theta(int j, Complex lambda) const {
  return (*this)(j == 0 ? CharKind::Theta0 : CharKind::Theta1, lambda);
}

Complex eval_delta(const CharFnEval& ev, int j, Complex lambda) { return ev.delta(j, lambda); }
Complex eval_theta(const CharFnEval& ev, int j, Complex lambda) { return ev.theta(j, lambda); }

}  // namespace isobispec
