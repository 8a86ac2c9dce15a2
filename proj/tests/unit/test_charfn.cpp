#include <doctest.h>

#include <cmath>

#include "isobispec/charfn.hpp"
#include "isobispec/operator.hpp"

using namespace isobispec;

namespace {

constexpr std::array<CharKind, 4> kKinds{CharKind::Delta0, CharKind::Delta1, CharKind::Theta0, CharKind::Theta1};

std::shared_ptr<const FamilySpec> family(int target, int eigsign) {
  const Grid g = Grid::aligned({7, 20}, target);
  const RealFn h = RealFn::constant(g, g.node(Break::FiveHalfA), g.panels(), 1.0);
  const auto pair = leading_real_eigenpair(build_nystrom(h));
  auto nf = normalize_family(h, pair, eigsign);
  return std::make_shared<const FamilySpec>(FamilySpec::make(nf.h, nf.e, eigsign));
}

Potential step_potential(const Grid& g, double c) {
  return general_potential(ComplexFn::sample(g, 0, g.panels(), [&](double x) { return x < g.delay() ? 0.0 : c; }));
}

}  // namespace

TEST_SUITE("charfn") {
  TEST_CASE("zero potential gives the free characteristic functions") {
    const Grid g = Grid::aligned({7, 20}, 1024);
    const CharFnEval ev(general_potential(ComplexFn::constant(g, 0, g.panels(), 0.0)));
    for (Complex lambda : {Complex(2.3), Complex(-4.0), Complex(3.0, 4.0), Complex(1e-8), Complex(90.0)}) {
      const Complex rho = std::sqrt(lambda);
      CHECK(std::abs(ev(CharKind::Delta0, lambda) - kPi * sinc(rho * kPi)) < 1e-12);
      CHECK(std::abs(ev(CharKind::Delta1, lambda) - std::cos(rho * kPi)) < 1e-12);
      CHECK(std::abs(ev(CharKind::Theta0, lambda) - std::cos(rho * kPi)) < 1e-12);
      CHECK(std::abs(ev(CharKind::Theta1, lambda) + rho * std::sin(rho * kPi)) < 1e-12);
    }
    CHECK(std::abs(ev(CharKind::Delta0, 0.0) - kPi) < 1e-14);
  }

  TEST_CASE("step potential at lambda = 0 matches the method-of-steps polynomials") {
    const Grid g = Grid::aligned({7, 20}, 1024);
    const double c = 0.8;
    const double a = g.delay();
    const double u = kPi - a, v = kPi - 2 * a;
    const CharFnEval ev(step_potential(g, c));
    CHECK(ev(CharKind::Delta0, 0.0).real() == doctest::Approx(kPi + c * std::pow(u, 3) / 6 + c * c * std::pow(v, 5) / 120).epsilon(1e-9));
    CHECK(ev(CharKind::Delta1, 0.0).real() == doctest::Approx(1 + c * u * u / 2 + c * c * std::pow(v, 4) / 24).epsilon(1e-9));
    CHECK(ev(CharKind::Theta0, 0.0).real() == doctest::Approx(1 + c * u * u / 2 + c * c * std::pow(v, 4) / 24).epsilon(1e-9));
    CHECK(ev(CharKind::Theta1, 0.0).real() == doctest::Approx(c * u + c * c * std::pow(v, 3) / 6).epsilon(1e-9));
  }

  TEST_CASE("series and direct paths agree near the switch") {
    const auto fam = family(512, 1);
    const CharFnEval ev(build_potential(fam, Complex(0.5, 1.5)));
    for (Complex rho : {Complex(1.2e-3), Complex(0.0, 1.1e-3), Complex(8e-4, 8e-4)})
      for (auto k : kKinds) {
        const Complex d = ev.direct(k, rho), s = ev.series(k, rho);
        CHECK(std::abs(d - s) / (1.0 + std::abs(s)) < 1e-7);
      }
  }

  TEST_CASE("functions are even in rho") {
    const auto fam = family(256, 1);
    const CharFnEval ev(build_potential(fam, 1.0));
    for (auto k : kKinds) {
      const Complex rho(2.7, 0.4);
      CHECK(std::abs(ev.direct(k, rho) - ev.direct(k, -rho)) < 1e-10 * (1.0 + std::abs(ev.direct(k, rho))));
    }
  }

  TEST_CASE("Q vanishes on (pi-a, 2a) and equals -(-1)^k alpha eigsign e on (3a/2, pi-a)") {
    for (int eigsign : {1, -1}) {
      const auto fam = family(1024, eigsign);
      const Complex alpha(0.5, 1.5);
      const Potential q = build_potential(fam, alpha);
      const Grid& g = q.grid();
      for (int k : {0, 1}) {
        const ComplexFn qk = compute_Q(q, k);
        const double sign = (k == 0 ? -1.0 : 1.0) * eigsign;
        double worst = 0.0;
        for (int i = g.node(Break::ThreeHalfA) + 1; i < g.node(Break::PiMinusA); ++i)
          worst = std::max(worst, std::abs(qk.at(i) - sign * alpha * fam->e.at(i)));
        for (int i = g.node(Break::PiMinusA) + 1; i < g.node(Break::TwoA); ++i) worst = std::max(worst, std::abs(qk.at(i)));
        CHECK(worst < 1e-9);
      }
    }
  }

  TEST_CASE("both Q routes agree") {
    const auto fam = family(512, 1);
    const Potential q = build_potential(fam, Complex(0.5, 1.5));
    for (int k : {0, 1}) {
      const ComplexFn a = compute_Q(q, k, QMethod::Reordered);
      const ComplexFn b = compute_Q(q, k, QMethod::Original);
      CHECK(l2_norm(a - b) < 1e-6);
    }
  }

  TEST_CASE("w_0 is shared by family B and w_1 is not") {
    const auto fam = family(512, 1);
    const CharFnEval e0(build_potential(fam, 0.0));
    const CharFnEval e1(build_potential(fam, 1.0));
    CHECK(l2_norm(e1.w0().w - e0.w0().w) < 1e-10);
    CHECK(l2_norm(e1.w1().w - e0.w1().w) >= 0.1 * l2_norm(fam->e));
  }

  TEST_CASE("omega equals the integral of w_0 for an arbitrary potential") {
    const Grid g = Grid::aligned({7, 20}, 1024);
    const Potential q = general_potential(ComplexFn::sample(g, 0, g.panels(), [&](double x) {
      return x < g.delay() ? Complex(0.0) : Complex(std::sin(2 * x) + 0.3 * x, std::cos(5 * x));
    }));
    const CharFnEval ev(q);
    CHECK(std::abs(ev.omega_q() - ev.omega_w0()) < 1e-7);
  }

  TEST_CASE("rho outside the trusted range is refused") {
    const Grid g = Grid::aligned({7, 20}, 512);
    const CharFnEval ev(general_potential(ComplexFn::constant(g, 0, g.panels(), 0.0)));
    try {
      ev(CharKind::Delta0, Complex(400.0));
      FAIL("expected GridTooCoarseForRho");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::GridTooCoarseForRho);
    }
    CHECK_THROWS_AS(ev(CharKind::Delta0, Complex(0.0, 500.0)), Error);
    CHECK_NOTHROW(ev(CharKind::Delta0, Complex(90.0)));
  }

  TEST_CASE("sinc near zero") {
    CHECK(std::abs(sinc(Complex(1e-6)) - 1.0) < 1e-12);
    CHECK(std::abs(sinc(Complex(0.5, 0.2)) - std::sin(Complex(0.5, 0.2)) / Complex(0.5, 0.2)) < 1e-15);
    CHECK(std::abs(sinc(Complex(9e-5)) - std::sin(9e-5) / 9e-5) < 3e-16);
  }
}
