#include <doctest.h>

#include <cmath>

#include "isobispec/operator.hpp"
#include "isobispec/potential.hpp"

using namespace isobispec;

namespace {

std::shared_ptr<const FamilySpec> family(int target, int eigsign) {
  const Grid g = Grid::aligned({7, 20}, target);
  const RealFn h = RealFn::constant(g, g.node(Break::FiveHalfA), g.panels(), 1.0);
  const auto pair = leading_real_eigenpair(build_nystrom(h));
  auto nf = normalize_family(h, pair, eigsign);
  return std::make_shared<const FamilySpec>(FamilySpec::make(nf.h, nf.e, eigsign));
}

}  // namespace

TEST_SUITE("potential") {
  TEST_CASE("alpha = 0 leaves only the seed branch") {
    const auto fam = family(512, 1);
    const auto rep = structural_report(build_potential(fam, 0.0));
    for (int s = 0; s < 6; ++s) CHECK(rep.segment_norms[s] == 0.0);
    CHECK(rep.segment_norms[6] > 0.0);
  }

  TEST_CASE("branches follow the construction") {
    const auto fam = family(512, 1);
    const Complex alpha(0.5, 1.5);
    const Potential q = build_potential(fam, alpha);
    const Grid& g = q.grid();
    const int m = g.half_delay();
    for (int i = g.node(Break::ThreeHalfA) + 1; i < g.node(Break::PiMinusA); i += 7)
      CHECK(std::abs(q.fn.at(i) - alpha * fam->e.at(i)) < 1e-15);
    for (int i = g.node(Break::TwoA) + 1; i < g.node(Break::PiMinusHalfA); i += 5)
      CHECK(std::abs(q.fn.at(i) + alpha * fam->kernel_primitive.at(i + m) * fam->e_cumulative.at(i - m)) < 1e-14);
    for (int i = 0; i < g.node(Break::ThreeHalfA); ++i) CHECK(q.fn.at(i) == Complex(0.0));
    const auto rep = structural_report(q);
    CHECK(rep.segment_norms[0] == 0.0);
    CHECK(rep.segment_norms[3] == 0.0);
    CHECK(rep.to_json()["segment_l2_norms"].size() == 7);
  }

  TEST_CASE("omega of family B is the integral of h for every alpha") {
    const auto fam = family(2048, 1);
    const double expect = integrate(fam->h);
    CHECK(expect == doctest::Approx((kPi - 2.5 * fam->grid.delay()) / 0.043860039557130935).epsilon(1e-9));
    for (Complex alpha : {Complex(1.0), Complex(-2.0), Complex(0.5, 1.5)})
      CHECK(std::abs(omega(build_potential(fam, alpha)) - expect) < 1e-8);
  }

  TEST_CASE("omega of family B1 moves with slope 2 int e") {
    const auto fam = family(2048, -1);
    const Complex w0 = omega(build_potential(fam, 0.0));
    for (Complex alpha : {Complex(1.0), Complex(-2.0), Complex(0.5, 1.5)}) {
      const Complex w = omega(build_potential(fam, alpha));
      CHECK(std::abs(w - w0 - 2.0 * alpha * fam->integral_e()) < 1e-8);
    }
  }

  TEST_CASE("family construction validates the eigen relation") {
    const auto fam = family(256, 1);
    CHECK(fam->relation_residual < 1e-7);
    CHECK_THROWS_AS(FamilySpec::make(2.0 * fam->h, fam->e, 1), Error);
    CHECK_NOTHROW(FamilySpec::make(2.0 * fam->h, fam->e, 1, false));
    CHECK_THROWS_AS(FamilySpec::make(fam->h, fam->e, 3), Error);
  }

  TEST_CASE("general potentials must vanish on (0, a)") {
    const Grid g = Grid::aligned({7, 20}, 256);
    const ComplexFn ok = ComplexFn::sample(g, 0, g.panels(), [&](double x) { return x < g.delay() ? 0.0 : x; });
    CHECK_NOTHROW(general_potential(ok));
    const ComplexFn bad = ComplexFn::constant(g, 0, g.panels(), 1.0);
    CHECK_THROWS_AS(general_potential(bad), Error);
    const ComplexFn short_support = ComplexFn::constant(g, g.node(Break::A), g.panels(), 1.0);
    CHECK_THROWS_AS(general_potential(short_support), Error);
  }
}
