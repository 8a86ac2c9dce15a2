#include "isobispec/shooting.hpp"

#include <algorithm>
#include <vector>

namespace isobispec {

ShootingSolution shoot_initial(const Potential& q, Complex lambda, Complex y0, Complex dy0) {
  const Grid& g = q.grid();
  const int n = g.panels();
  const int delay = 2 * g.half_delay();
  const double h = g.step();
  const Complex rho = std::sqrt(lambda);
  if (std::abs(rho.real()) > 40.0 * n / 2048.0 || std::abs(rho.imag()) > 15.0)
    throw Error(Errc::GridTooCoarseForRho, "|rho| beyond the range trusted on this grid; refine --grid-n");

  // Kernel tables indexed by k + 1 for k = -1..n (k = -1 serves the
  // three-point end rule reaching one node past x).
  std::vector<Complex> ks(n + 2), kc(n + 2);
  for (int k = -1; k <= n; ++k) {
    const double u = k * h;
    ks[k + 1] = u * sinc(rho * u);
    kc[k + 1] = std::cos(rho * u);
  }
  auto sin_over_rho = [&](int k) { return ks[k + 1]; };
  auto cos_k = [&](int k) { return kc[k + 1]; };

  const ComplexFn tail = q.fn.restricted(delay, n);

  // Integration pieces in s: jumps of q and the kinks they induce in y(s-a).
  std::vector<int> cuts{delay, n};
  for (const auto& seg : tail.segments())
    for (int b : {seg.lo, seg.hi, seg.lo + delay, seg.hi + delay})
      if (b > delay && b < n) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  struct Piece {
    int lo, hi;
    const ComplexFn::Segment* seg;
  };
  std::vector<Piece> pieces;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    pieces.push_back({cuts[k], cuts[k + 1], &tail.segments()[tail.segment_index(cuts[k], Side::Right)]});

  std::vector<Complex> y(n + 1), dy(n + 1);
  for (int i = 0; i <= n; ++i) {
    y[i] = y0 * cos_k(i) + dy0 * sin_over_rho(i);
    dy[i] = -lambda * y0 * sin_over_rho(i) + dy0 * cos_k(i);
  }

  for (int i = delay + 1; i <= n; ++i) {
    Complex acc(0.0), dacc(0.0);
    for (const auto& pc : pieces) {
      if (pc.lo >= i) break;
      const int to = std::min(pc.hi, i);
      quad::composite(pc.lo, to, pc.lo, pc.hi, h, [&](int j, double w) {
        const Complex f = w * pc.seg->at(j) * y[j - delay];
        acc += sin_over_rho(i - j) * f;
        dacc += cos_k(i - j) * f;
      });
    }
    y[i] += acc;
    dy[i] += dacc;
  }

  ShootingSolution sol;
  sol.lambda = lambda;
  sol.kind = (y0 == Complex(0.0) && dy0 == Complex(1.0)) ? ShotKind::S : ShotKind::C;
  sol.y = ComplexFn(g, {{0, n, Eigen::Map<ComplexFn::Vector>(y.data(), n + 1)}});
  sol.yprime = ComplexFn(g, {{0, n, Eigen::Map<ComplexFn::Vector>(dy.data(), n + 1)}});
  return sol;
}

ShootingSolution shoot(const Potential& q, Complex lambda, ShotKind kind) {
  auto sol = kind == ShotKind::S ? shoot_initial(q, lambda, 0.0, 1.0) : shoot_initial(q, lambda, 1.0, 0.0);
  sol.kind = kind;
  return sol;
}

Complex CharValues::operator[](CharKind kind) const {
  switch (kind) {
    case CharKind::Delta0: return delta0;
    case CharKind::Delta1: return delta1;
    case CharKind::Theta0: return theta0;
    case CharKind::Theta1: return theta1;
  }
  return {};
}

CharValues char_values(const Potential& q, Complex lambda) {
  const auto s = shoot(q, lambda, ShotKind::S);
  const auto c = shoot(q, lambda, ShotKind::C);
  const int n = q.grid().panels();
  return {s.y.at(n), s.yprime.at(n), c.y.at(n), c.yprime.at(n)};
}

}  // namespace isobispec
