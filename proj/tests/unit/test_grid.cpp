#include <doctest.h>

#include <cmath>
#include <sstream>

#include "isobispec/grid.hpp"

using namespace isobispec;

TEST_SUITE("grid") {
  TEST_CASE("breakpoints of the default delay are ordered and closed-form") {
    const double a = 0.35 * kPi;
    const auto bp = make_breakpoints(a);
    CHECK(bp[Break::A] == doctest::Approx(a));
    CHECK(bp[Break::ThreeHalfA] == doctest::Approx(1.5 * a));
    CHECK(bp[Break::PiMinusA] == doctest::Approx(kPi - a));
    CHECK(bp[Break::TwoA] == doctest::Approx(2 * a));
    CHECK(bp[Break::PiMinusHalfA] == doctest::Approx(kPi - a / 2));
    CHECK(bp[Break::FiveHalfA] == doctest::Approx(2.5 * a));
    CHECK(bp.supported);
    for (int s = 0; s < kBreakCount - 1; ++s) CHECK_FALSE(bp.empty(s));
  }

  TEST_CASE("a = pi/3 collapses two segments") {
    const auto bp = make_breakpoints(kPi / 3);
    CHECK(bp[Break::PiMinusA] == doctest::Approx(bp[Break::TwoA]));
    CHECK(bp[Break::PiMinusHalfA] == doctest::Approx(bp[Break::FiveHalfA]));
    int empty = 0;
    for (int s = 0; s < kBreakCount - 1; ++s) empty += bp.empty(s);
    CHECK(empty == 2);
  }

  TEST_CASE("delays outside [pi/3, 2pi/5) are rejected unless relaxed") {
    CHECK_THROWS_AS(make_breakpoints(0.3 * kPi), Error);
    CHECK_THROWS_AS(make_breakpoints(0.4 * kPi), Error);
    try {
      make_breakpoints(0.45 * kPi);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::DelayOutOfRange);
    }
    CHECK_FALSE(make_breakpoints(0.3 * kPi, false).supported);
  }

  TEST_CASE("aligned grid for 7/20 puts every breakpoint on a node") {
    const Grid g = Grid::aligned({7, 20}, 2048);
    CHECK(g.panels() == 2080);
    CHECK(g.half_delay() == 364);
    CHECK(g.delay() == doctest::Approx(0.35 * kPi).epsilon(1e-15));
    const auto bp = make_breakpoints(g.delay());
    for (int b = 0; b < kBreakCount; ++b)
      CHECK(g.x(g.break_nodes()[b]) == doctest::Approx(bp.nodes[b]).epsilon(1e-14));
    CHECK(g.node_of(g.x(777)) == 777);
    CHECK_THROWS_AS(g.node_of(g.x(10) + 0.3 * g.step()), Error);
  }

  TEST_CASE("aligned grid for 1/3 keeps the empty segments empty") {
    const Grid g = Grid::aligned({1, 3}, 100);
    CHECK(g.panels() % 6 == 0);
    CHECK(g.segment_panels(Break::PiMinusA) == 0);
    CHECK(g.segment_panels(Break::PiMinusHalfA) == 0);
    CHECK(g.segment_panels(Break::A) >= 4);
  }

  TEST_CASE("composite rule is exact for cubics on every panel count") {
    const double h = 0.1;
    auto run = [&](int from, int to, int lo, int hi) {
      double s = 0.0;
      quad::composite(from, to, lo, hi, h, [&](int j, double w) {
        const double x = j * h;
        s += w * (1.0 - 2.0 * x + 3.0 * x * x - x * x * x);
      });
      auto prim = [](double x) { return x - x * x + x * x * x - 0.25 * x * x * x * x; };
      return s - (prim(to * h) - prim(from * h));
    };
    for (int n = 2; n <= 9; ++n) CHECK(std::abs(run(0, n, 0, n)) < 1e-13);
  }

  TEST_CASE("single panel uses the three-point rule, exact for quadratics") {
    const double h = 0.25;
    auto err = [&](int lo, int hi) {
      double s = 0.0;
      quad::composite(3, 4, lo, hi, h, [&](int j, double w) { s += w * (j * h) * (j * h); });
      return s - (std::pow(4 * h, 3) - std::pow(3 * h, 3)) / 3.0;
    };
    CHECK(std::abs(err(3, 5)) < 1e-14);
    CHECK(std::abs(err(2, 4)) < 1e-14);
    CHECK(std::abs(err(3, 4)) > 1e-6);  // trapezoid fallback
  }

  TEST_CASE("cumulative integral matches the closed form at every node") {
    const int n = 41;
    const double h = 1.0 / n;
    Eigen::VectorXd v(n + 1);
    for (int i = 0; i <= n; ++i) v[i] = std::exp(i * h);
    const auto c = quad::cumulative(v, h);
    for (int i = 0; i <= n; ++i) CHECK(c[i] == doctest::Approx(std::exp(i * h) - 1.0).epsilon(1e-7));
  }

  TEST_CASE("piecewise sampling splits at breakpoints and integrates jumps exactly") {
    const Grid g = Grid::aligned({7, 20}, 200);
    RealFn f = RealFn::constant(g, 0, g.panels(), 0.0);
    for (auto& seg : f.segments())
      if (seg.lo >= g.node(Break::A)) seg.values.setConstant(2.0);
    CHECK(f.segments().size() == 7);
    CHECK(f.at(g.node(Break::A), Side::Left) == 0.0);
    CHECK(f.at(g.node(Break::A), Side::Right) == 2.0);
    CHECK(integrate(f) == doctest::Approx(2.0 * (kPi - g.delay())).epsilon(1e-13));
    CHECK(l2_norm(f) == doctest::Approx(std::sqrt(4.0 * (kPi - g.delay()))).epsilon(1e-13));
  }

  TEST_CASE("antiderivative from the right vanishes at pi and clamps below") {
    const Grid g = Grid::aligned({7, 20}, 400);
    const int lo = g.node(Break::FiveHalfA);
    const RealFn h = RealFn::sample(g, lo, g.panels(), [](double x) { return x; });
    const RealFn k = antiderivative_from_right(h);
    CHECK(k.at(g.panels()) == doctest::Approx(0.0));
    const double expect = 0.5 * (kPi * kPi - g.x(lo) * g.x(lo));
    CHECK(k.at(lo) == doctest::Approx(expect).epsilon(1e-13));
    CHECK(k.at(lo - 50) == doctest::Approx(expect).epsilon(1e-13));
    const RealFn c = cumulative_from_left(h);
    CHECK(c.at(lo) == 0.0);
    CHECK(c.at(g.panels()) == doctest::Approx(expect).epsilon(1e-13));
  }

  TEST_CASE("restricted and arithmetic keep layouts") {
    const Grid g = Grid::aligned({7, 20}, 200);
    const ComplexFn f = ComplexFn::sample(g, 0, g.panels(), [](double x) { return Complex(x, -x); });
    const ComplexFn r = f.restricted(g.node(Break::A), g.node(Break::TwoA));
    CHECK(r.lo() == g.node(Break::A));
    CHECK(r.hi() == g.node(Break::TwoA));
    CHECK(r.segments().size() == 3);
    const ComplexFn z = f - f;
    CHECK(z.max_abs() == 0.0);
    CHECK(f(g.x(13) + 0.5 * g.step()).real() == doctest::Approx(g.x(13) + 0.5 * g.step()));
    CHECK_THROWS_AS(f.at(g.panels() + 1), Error);
  }

  TEST_CASE("csv round trip and resampling") {
    const Grid g = Grid::aligned({7, 20}, 200);
    const int lo = g.node(Break::FiveHalfA);
    const RealFn h = RealFn::sample(g, lo, g.panels(), [](double x) { return 3.0 - x; });
    std::stringstream ss;
    write_csv(ss, h);
    const auto curve = read_csv(ss);
    CHECK(curve.x.size() == static_cast<std::size_t>(g.panels() - lo + 1));
    const RealFn back = resample(g, lo, g.panels(), curve);
    CHECK((back - h).max_abs() < 1e-15);

    std::stringstream bad("x,re\n0,1\n0,2\n");
    CHECK_THROWS_AS(read_csv(bad), Error);
  }
}
