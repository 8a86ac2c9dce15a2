#include "isobispec/potential.hpp"

#include "isobispec/operator.hpp"

namespace isobispec {

FamilySpec FamilySpec::make(RealFn h, RealFn e, int eigsign, bool validate) {
  if (eigsign != 1 && eigsign != -1) throw Error(Errc::InvalidArgument, "eigsign must be +1 or -1");
  const Grid& g = h.grid();
  if (!(e.grid() == g)) throw Error(Errc::SupportMismatch, "h and e live on different grids");

  FamilySpec spec;
  spec.grid = g;
  spec.h = std::move(h);
  spec.e = std::move(e);
  spec.eigsign = eigsign;
  spec.kernel_primitive = antiderivative_from_right(spec.h);
  spec.e_cumulative = cumulative_from_left(spec.e);

  RealFn r = apply_M_primitive(spec.kernel_primitive, spec.e);
  r -= static_cast<double>(eigsign) * spec.e;
  spec.relation_residual = l2_norm(r) / l2_norm(spec.e);
  if (validate) {
    if (spec.h.max_abs() == 0.0) throw Error(Errc::InvalidArgument, "seed function vanishes identically");
    if (!(spec.relation_residual <= 1e-7))
      throw Error(Errc::ConvergenceFailure,
                  "M_h e = eigsign e violated, residual " + std::to_string(spec.relation_residual));
  }
  return spec;
}

Potential build_potential(std::shared_ptr<const FamilySpec> spec, Complex alpha) {
  if (!spec) throw Error(Errc::InvalidArgument, "null family");
  const Grid& g = spec->grid;
  const int m = g.half_delay();
  const int n = g.panels();
  const RealFn& k = spec->kernel_primitive;
  const RealFn& ecum = spec->e_cumulative;

  std::vector<ComplexFn::Segment> segs;
  for (const auto& [lo, hi] : ComplexFn::breakpoint_pieces(g, 0, n)) {
    ComplexFn::Segment seg{lo, hi, ComplexFn::Vector::Zero(hi - lo + 1)};
    if (hi > lo) {
      if (lo == g.node(Break::ThreeHalfA)) {
        for (int i = lo; i <= hi; ++i) seg.values[i - lo] = alpha * spec->e.at(i);
      } else if (lo == g.node(Break::TwoA)) {
        for (int i = lo; i <= hi; ++i) seg.values[i - lo] = -alpha * k.at(i + m) * ecum.at(i - m);
      } else if (lo == g.node(Break::FiveHalfA)) {
        for (int i = lo; i <= hi; ++i) seg.values[i - lo] = spec->h.at(i);
      }
    }
    segs.push_back(std::move(seg));
  }

  Potential q;
  q.alpha = alpha;
  q.fn = ComplexFn(g, std::move(segs));
  q.family = std::move(spec);
  return q;
}

Potential general_potential(ComplexFn fn) {
  const Grid& g = fn.grid();
  if (fn.lo() != 0 || fn.hi() != g.panels()) throw Error(Errc::SupportMismatch, "potential must live on [0, pi]");
  const int a = g.node(Break::A);
  for (int i = 0; i < a; ++i)
    if (fn.at(i, Side::Right) != Complex(0.0) || (i > 0 && fn.at(i, Side::Left) != Complex(0.0)))
      throw Error(Errc::InvalidArgument, "potential must vanish on (0, a)");
  Potential q;
  q.fn = std::move(fn);
  return q;
}

Complex omega(const Potential& q) {
  const Grid& g = q.grid();
  return integrate(q.fn, g.node(Break::A), g.panels());
}

StructuralReport structural_report(const Potential& q) {
  const Grid& g = q.grid();
  StructuralReport rep;
  rep.alpha = q.alpha;
  const auto& b = g.break_nodes();
  for (int s = 0; s < 7; ++s) rep.segment_norms[s] = l2_norm(q.fn, b[s], b[s + 1]);
  for (int k = 1; k < 7; ++k) rep.jumps[k - 1] = std::abs(q.fn.at(b[k], Side::Right) - q.fn.at(b[k], Side::Left));
  rep.max_abs = q.fn.max_abs();
  return rep;
}

nlohmann::json StructuralReport::to_json() const {
  static constexpr std::array<const char*, 6> kJumpNames{"a", "3a/2", "pi-a", "2a", "pi-a/2", "5a/2"};
  nlohmann::json j;
  j["schema"] = 1;
  j["alpha"] = {alpha.real(), alpha.imag()};
  nlohmann::json norms = nlohmann::json::object();
  for (int s = 0; s < 7; ++s) norms[kSegmentNames[s]] = segment_norms[s];
  j["segment_l2_norms"] = norms;
  nlohmann::json jumps_j = nlohmann::json::object();
  for (int k = 0; k < 6; ++k) jumps_j[kJumpNames[k]] = jumps[k];
  j["jumps"] = jumps_j;
  j["max_abs"] = max_abs;
  return j;
}

}  // namespace isobispec
