#include "isobispec/harness.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "isobispec/parallel.hpp"
#include "isobispec/shooting.hpp"

namespace isobispec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), std::string("stage ") + name + ": " + e.detail());
  }
}

std::vector<double> split_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw Error(Errc::InvalidArgument, "not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<Potential> build_members(const Fixture& fx, const std::vector<Complex>& alphas) {
  std::vector<Potential> out;
  for (const auto& al : alphas) out.push_back(build_potential(fx.family, al));
  return out;
}

std::vector<std::unique_ptr<CharFnEval>> evaluators(const std::vector<Potential>& qs) {
  std::vector<std::unique_ptr<CharFnEval>> out(qs.size());
  parallel_for(qs.size(), [&](std::size_t k) { out[k] = std::make_unique<CharFnEval>(qs[k]); });
  return out;
}

nlohmann::json complex_json(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

nlohmann::json environment(const RunConfig& cfg, const Fixture& fx) {
  nlohmann::json alphas = nlohmann::json::array();
  for (const auto& al : cfg.alphas) alphas.push_back(complex_json(al));
  return {{"a_frac", std::to_string(cfg.a_frac.num) + "/" + std::to_string(cfg.a_frac.den)},
          {"a", fx.grid.delay()},
          {"grid_target", cfg.grid_n},
          {"grid_panels", fx.grid.panels()},
          {"h", cfg.h_spec},
          {"eigsign", cfg.eigsign},
          {"normalized", cfg.normalize},
          {"eta", fx.pair.eta},
          {"eigen_residual", fx.family->relation_residual},
          {"integral_e", fx.family->integral_e()},
          {"alphas", alphas},
          {"threads", thread_count()}};
}

/// max |F_k(alpha) - F_k(alpha_0)| / (1 + |F_k(alpha_0)|) over the lambda grid.
double max_function_spread(const std::vector<std::unique_ptr<CharFnEval>>& evs, const std::vector<CharKind>& kinds,
                           const std::vector<Complex>& lambdas) {
  std::vector<double> worst(evs.size(), 0.0);
  parallel_for(evs.size(), [&](std::size_t a) {
    if (a == 0) return;
    for (const auto& l : lambdas)
      for (auto k : kinds) worst[a] = std::max(worst[a], relative_deviation((*evs[a])(k, l), (*evs[0])(k, l)));
  });
  return *std::max_element(worst.begin(), worst.end());
}

/// L2 distance between two complex functions on their common node range.
double l2_distance(const ComplexFn& f, const ComplexFn& g) {
  ComplexFn d = f;
  for (auto& seg : d.segments())
    for (int i = seg.lo; i <= seg.hi; ++i) seg.values[i - seg.lo] -= g.at(i, i < seg.hi ? Side::Right : Side::Left);
  return l2_norm(d);
}

double crosscheck_deviation(const std::vector<Potential>& qs, const std::vector<std::unique_ptr<CharFnEval>>& evs,
                            const std::vector<Complex>& lambdas) {
  const std::array<CharKind, 4> kinds{CharKind::Delta0, CharKind::Delta1, CharKind::Theta0, CharKind::Theta1};
  const std::size_t per = lambdas.size();
  std::vector<double> worst(qs.size() * per, 0.0);
  parallel_for(worst.size(), [&](std::size_t t) {
    const std::size_t a = t / per;
    const Complex l = lambdas[t % per];
    const CharValues cv = char_values(qs[a], l);
    for (auto k : kinds) worst[t] = std::max(worst[t], relative_deviation((*evs[a])(k, l), cv[k]));
  });
  return worst.empty() ? 0.0 : *std::max_element(worst.begin(), worst.end());
}

/// Largest |lambda_n(alpha) - lambda_n(alpha_0)| over the first n_eigs zeros;
/// infinite if any list is short, uncertified or incomplete.
double spectrum_spread(const std::vector<Spectrum>& specs, int n_eigs) {
  double worst = 0.0;
  for (const auto& s : specs) {
    if (static_cast<int>(s.eigenvalues.size()) < n_eigs) return kInf;
    for (int n = 0; n < n_eigs; ++n)
      if (!s.eigenvalues[n].certified) return kInf;
  }
  for (std::size_t a = 1; a < specs.size(); ++a)
    for (int n = 0; n < n_eigs; ++n)
      worst = std::max(worst, std::abs(specs[a].eigenvalues[n].lambda - specs[0].eigenvalues[n].lambda));
  return worst;
}

std::vector<Spectrum> spectra_for(const std::vector<std::unique_ptr<CharFnEval>>& evs, CharKind kind, int n_eigs) {
  std::vector<Spectrum> out;
  for (const auto& ev : evs) out.push_back(compute_spectrum(*ev, kind, {n_eigs}));
  return out;
}

int completeness_gap(const std::vector<Spectrum>& specs) {
  int gap = 0;
  for (const auto& s : specs) gap = std::max(gap, std::abs(s.sweep_count - s.found_in_sweep));
  return gap;
}

}  // namespace

// ---------------------------------------------------------------------------

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> t{
      {"eigen_residual", 1e-7},   {"w0_structure", 1e-7},   {"omega", 1e-7},
      {"delta_invariance", 1e-7}, {"spectrum_invariance", 1e-7}, {"crosscheck", 1e-7},
      {"q_routes", 1e-6},         {"w1_invariance", 1e-7},  {"omega_slope", 1e-8},
      {"theta_identity", 1e-8},   {"theta_separation", 1e-4}, {"w0_variation", 1e-6},
  };
  return t;
}

double RunConfig::tol(const std::string& name) const {
  if (auto it = tolerances.find(name); it != tolerances.end()) return it->second;
  const auto& d = default_tolerances();
  if (auto it = d.find(name); it != d.end()) return it->second;
  throw Error(Errc::InvalidArgument, "unknown tolerance '" + name + "'");
}

Grid RunConfig::grid() const {
  if (!unsafe_delay) {
    // 1/3 <= P/Q < 2/5 in integers.
    const long p = a_frac.num, q = a_frac.den;
    if (q <= 0 || 3 * p < q || 5 * p >= 2 * q)
      throw Error(Errc::DelayOutOfRange, "a/pi must lie in [1/3, 2/5); pass --unsafe-delay to override");
  }
  if (grid_n < 8) throw Error(Errc::InvalidArgument, "grid-n must be at least 8");
  return Grid::aligned(a_frac, grid_n, !unsafe_delay);
}

DelayFraction parse_fraction(const std::string& text) {
  const auto slash = text.find('/');
  try {
    std::size_t u1 = 0, u2 = 0;
    if (slash == std::string::npos) throw std::invalid_argument("no slash");
    const std::string ps = text.substr(0, slash), qs = text.substr(slash + 1);
    const int p = std::stoi(ps, &u1);
    const int q = std::stoi(qs, &u2);
    if (u1 != ps.size() || u2 != qs.size() || p <= 0 || q <= 0) throw std::invalid_argument("bad");
    const int g = std::gcd(p, q);
    return {p / g, q / g};
  } catch (const std::exception&) {
    throw Error(Errc::InvalidArgument, "expected a positive fraction P/Q, got '" + text + "'");
  }
}

Complex parse_alpha(const std::string& text) {
  const auto v = split_numbers(text);
  if (v.size() == 1) return {v[0], 0.0};
  if (v.size() == 2) return {v[0], v[1]};
  throw Error(Errc::InvalidArgument, "alpha must be RE or RE,IM, got '" + text + "'");
}

RealFn build_h(const Grid& grid, const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? std::string() : spec.substr(colon + 1);
  const int lo = grid.node(Break::FiveHalfA);
  const int hi = grid.panels();

  if (kind == "csv") {
    if (arg.empty()) throw Error(Errc::InvalidArgument, "csv: needs a path");
    return resample(grid, lo, hi, read_csv_file(arg));
  }
  const auto p = arg.empty() ? std::vector<double>{} : split_numbers(arg);
  if (kind == "const") {
    const double c = p.empty() ? 1.0 : p.at(0);
    if (p.size() > 1) throw Error(Errc::InvalidArgument, "const takes one value");
    return RealFn::constant(grid, lo, hi, c);
  }
  if (kind == "sin") {
    if (p.size() != 1) throw Error(Errc::InvalidArgument, "sin takes one frequency");
    const double f = p[0];
    return RealFn::sample(grid, lo, hi, [f](double x) { return std::sin(f * x); });
  }
  if (kind == "linear") {
    if (p.size() == 1) {
      const double s = p[0];
      return RealFn::sample(grid, lo, hi, [s](double x) { return s * x; });
    }
    if (p.size() == 2) {
      const double c0 = p[0], c1 = p[1];
      return RealFn::sample(grid, lo, hi, [c0, c1](double x) { return c0 + c1 * x; });
    }
    throw Error(Errc::InvalidArgument, "linear takes S or A,B");
  }
  throw Error(Errc::InvalidArgument, "unknown h spec '" + spec + "'");
}

std::vector<Complex> validation_lambdas() {
  std::vector<Complex> out;
  for (int i = 0; i < 40; ++i) out.emplace_back(-5.0 + 125.0 * i / 39.0, 0.0);
  out.emplace_back(3.0, 4.0);
  out.emplace_back(-2.0, -7.0);
  return out;
}

double relative_deviation(Complex a, Complex b) { return std::abs(a - b) / (1.0 + std::abs(b)); }

Fixture build_fixture(const RunConfig& cfg) {
  if (cfg.eigsign != 1 && cfg.eigsign != -1) throw Error(Errc::InvalidArgument, "eigsign must be +1 or -1");
  Fixture fx{cfg.grid(), {}, {}, nullptr};
  fx.h_raw = build_h(fx.grid, cfg.h_spec);
  const auto op = build_nystrom(fx.h_raw);
  fx.pair = leading_real_eigenpair(op, cfg.eigen_choice, cfg.eigen_index);
  if (cfg.normalize) {
    auto nf = normalize_family(fx.h_raw, fx.pair, cfg.eigsign);
    fx.family = std::make_shared<const FamilySpec>(FamilySpec::make(std::move(nf.h), std::move(nf.e), cfg.eigsign));
  } else {
    fx.family = std::make_shared<const FamilySpec>(FamilySpec::make(fx.h_raw, fx.pair.e, cfg.eigsign, false));
  }
  return fx;
}

// ---------------------------------------------------------------------------

void VerificationReport::add(std::string name, double value, double threshold, bool at_least, std::string note) {
  Check c{std::move(name), value, threshold, at_least, false, std::move(note)};
  c.pass = at_least ? value >= threshold : value <= threshold;
  checks.push_back(std::move(c));
}

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

nlohmann::json VerificationReport::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json j{{"name", c.name},
                     {"value", std::isfinite(c.value) ? nlohmann::json(c.value) : nlohmann::json("inf")},
                     {"threshold", c.threshold},
                     {"comparison", c.at_least ? ">=" : "<="},
                     {"pass", c.pass}};
    if (!c.note.empty()) j["note"] = c.note;
    list.push_back(std::move(j));
  }
  return {{"schema", 1},
          {"scenario", scenario},
          {"checks", list},
          {"flags", flags},
          {"environment", environment},
          {"verdict", passed() ? "PASS" : "FAIL"}};
}

std::string VerificationReport::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "name,value,threshold,comparison,pass\n";
  for (const auto& c : checks)
    out << c.name << ',' << c.value << ',' << c.threshold << ',' << (c.at_least ? ">=" : "<=") << ','
        << (c.pass ? "true" : "false") << '\n';
  out << "verdict,,,," << (passed() ? "PASS" : "FAIL") << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------

VerificationReport run_verify_theorem1(const RunConfig& cfg) {
  if (cfg.eigsign != 1) throw Error(Errc::InvalidArgument, "verify-theorem1 needs eigsign +1");
  if (cfg.alphas.empty()) throw Error(Errc::InvalidArgument, "no alpha values");
  VerificationReport rep;
  rep.scenario = "verify-theorem1";

  const Fixture fx = stage("family", [&] { return build_fixture(cfg); });
  rep.environment = environment(cfg, fx);
  rep.add("eigen_residual", fx.family->relation_residual, cfg.tol("eigen_residual"));

  const auto qs = stage("potentials", [&] { return build_members(fx, cfg.alphas); });
  const auto evs = stage("charfn", [&] { return evaluators(qs); });

  const Grid& g = fx.grid;
  double zero_part = 0.0, h_part = 0.0, omega_gap = 0.0;
  for (const auto& ev : evs) {
    const ComplexFn& w = ev->w0().w;
    zero_part = std::max(zero_part, l2_norm(w, g.node(Break::A), g.node(Break::FiveHalfA)));
    h_part = std::max(h_part, l2_distance(w.restricted(g.node(Break::FiveHalfA), g.panels()), to_complex(fx.family->h)));
    omega_gap = std::max(omega_gap, std::abs(ev->omega_q() - ev->omega_w0()));
  }
  rep.add("w0_zero_on_a_to_5a/2", zero_part, cfg.tol("w0_structure"));
  rep.add("w0_equals_h_on_5a/2_to_pi", h_part, cfg.tol("w0_structure"));
  rep.add("omega_vs_integral_w0", omega_gap, cfg.tol("omega"));

  const auto lambdas = validation_lambdas();
  const double spread = stage("delta-invariance", [&] {
    return max_function_spread(evs, {CharKind::Delta0, CharKind::Delta1}, lambdas);
  });
  rep.add("delta_invariance", spread, cfg.tol("delta_invariance"));

  stage("spectra", [&] {
    const auto s0 = spectra_for(evs, CharKind::Delta0, cfg.n_eigs);
    const auto s1 = spectra_for(evs, CharKind::Delta1, cfg.n_eigs);
    rep.add("spectrum_invariance_delta0", spectrum_spread(s0, cfg.n_eigs), cfg.tol("spectrum_invariance"));
    rep.add("spectrum_invariance_delta1", spectrum_spread(s1, cfg.n_eigs), cfg.tol("spectrum_invariance"));
    rep.add("sweep_completeness", std::max(completeness_gap(s0), completeness_gap(s1)), 0.0);
    return 0;
  });

  const double cross = stage("crosscheck", [&] { return crosscheck_deviation(qs, evs, lambdas); });
  rep.add("charfn_vs_shooting", cross, cfg.tol("crosscheck"));
  return rep;
}

VerificationReport run_verify_remark2(const RunConfig& cfg) {
  if (cfg.eigsign != -1) throw Error(Errc::InvalidArgument, "verify-remark2 needs eigsign -1");
  if (cfg.alphas.empty()) throw Error(Errc::InvalidArgument, "no alpha values");
  VerificationReport rep;
  rep.scenario = "verify-remark2";

  const Fixture fx = stage("family", [&] { return build_fixture(cfg); });
  rep.environment = environment(cfg, fx);
  rep.add("eigen_residual", fx.family->relation_residual, cfg.tol("eigen_residual"));
  const double int_e = fx.family->integral_e();
  const bool degenerate = std::abs(int_e) < 1e-10;
  if (degenerate) rep.flags.push_back("DegenerateFamily");

  const auto qs = stage("potentials", [&] { return build_members(fx, cfg.alphas); });
  const auto evs = stage("charfn", [&] { return evaluators(qs); });

  double w1_spread = 0.0, w0_spread = 0.0, slope_gap = 0.0;
  for (std::size_t a = 1; a < evs.size(); ++a) {
    w1_spread = std::max(w1_spread, l2_distance(evs[a]->w1().w, evs[0]->w1().w));
    w0_spread = std::max(w0_spread, l2_distance(evs[a]->w0().w, evs[0]->w0().w));
    const Complex d_omega = evs[a]->omega_q() - evs[0]->omega_q();
    slope_gap = std::max(slope_gap, std::abs(d_omega - 2.0 * (cfg.alphas[a] - cfg.alphas[0]) * int_e));
  }
  rep.add("w1_invariance", w1_spread, cfg.tol("w1_invariance"));
  if (evs.size() > 1 && std::abs(cfg.alphas[1] - cfg.alphas[0]) > 0.0)
    rep.add("w0_varies", w0_spread, cfg.tol("w0_variation"), true, "w_0 is not shared when eigsign is -1");
  rep.add("omega_slope_2_integral_e", slope_gap, cfg.tol("omega_slope"));

  const auto lambdas = validation_lambdas();
  const double a = fx.grid.delay();
  const double len = kPi - a;
  std::vector<double> t0(evs.size(), 0.0), t1(evs.size(), 0.0);
  parallel_for(evs.size(), [&](std::size_t k) {
    if (k == 0) return;
    const Complex d_omega = evs[k]->omega_q() - evs[0]->omega_q();
    for (const auto& l : lambdas) {
      const Complex rho = std::sqrt(l);
      const Complex p0 = d_omega * 0.5 * len * sinc(rho * len);
      const Complex p1 = 0.5 * d_omega * std::cos(rho * len);
      t0[k] = std::max(t0[k], std::abs(evs[k]->theta(0, l) - evs[0]->theta(0, l) - p0));
      t1[k] = std::max(t1[k], std::abs(evs[k]->theta(1, l) - evs[0]->theta(1, l) - p1));
    }
  });
  rep.add("theta0_difference_identity", *std::max_element(t0.begin(), t0.end()), cfg.tol("theta_identity"));
  rep.add("theta1_difference_identity", *std::max_element(t1.begin(), t1.end()), cfg.tol("theta_identity"));

  if (degenerate) {
    rep.add("theta0_spectra_differ", kInf, cfg.tol("theta_separation"), true, "skipped: integral of e vanishes");
  } else if (evs.size() > 1) {
    const double sep = stage("spectra", [&] {
      const auto specs = spectra_for(evs, CharKind::Theta0, cfg.n_eigs);
      double best = 0.0;
      for (std::size_t k = 1; k < specs.size(); ++k) {
        const std::size_t n = std::min(specs[k].eigenvalues.size(), specs[0].eigenvalues.size());
        for (std::size_t i = 0; i < n; ++i)
          best = std::max(best, std::abs(specs[k].eigenvalues[i].lambda - specs[0].eigenvalues[i].lambda));
      }
      return best;
    });
    rep.add("theta0_spectra_differ", sep, cfg.tol("theta_separation"), true);
  }
  return rep;
}

VerificationReport run_crosscheck(const RunConfig& cfg) {
  if (cfg.alphas.empty()) throw Error(Errc::InvalidArgument, "no alpha values");
  VerificationReport rep;
  rep.scenario = "crosscheck";
  const Fixture fx = stage("family", [&] { return build_fixture(cfg); });
  rep.environment = environment(cfg, fx);
  const auto qs = stage("potentials", [&] { return build_members(fx, cfg.alphas); });
  const auto evs = stage("charfn", [&] { return evaluators(qs); });
  const double dev = stage("crosscheck", [&] { return crosscheck_deviation(qs, evs, validation_lambdas()); });
  rep.add("charfn_vs_shooting", dev, cfg.tol("crosscheck"));
  return rep;
}

nlohmann::json run_spectrum(const RunConfig& cfg, bool theta) {
  const Fixture fx = build_fixture(cfg);
  const auto qs = build_members(fx, cfg.alphas);
  const auto evs = evaluators(qs);
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t a = 0; a < evs.size(); ++a) {
    for (auto kind : theta ? std::array{CharKind::Theta0, CharKind::Theta1} : std::array{CharKind::Delta0, CharKind::Delta1}) {
      const Spectrum s = compute_spectrum(*evs[a], kind, {cfg.n_eigs});
      for (auto entry : s.to_json()) {
        entry["alpha_re"] = cfg.alphas[a].real();
        entry["alpha_im"] = cfg.alphas[a].imag();
        entry["sweep_complete"] = s.complete();
        out.push_back(std::move(entry));
      }
    }
  }
  return out;
}

nlohmann::json run_charfn(const RunConfig& cfg, const std::vector<Complex>& lambdas) {
  const Fixture fx = build_fixture(cfg);
  const auto qs = build_members(fx, cfg.alphas);
  const auto evs = evaluators(qs);
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t a = 0; a < evs.size(); ++a) {
    for (const auto& l : lambdas) {
      nlohmann::json row{{"alpha_re", cfg.alphas[a].real()},
                         {"alpha_im", cfg.alphas[a].imag()},
                         {"lambda_re", l.real()},
                         {"lambda_im", l.imag()}};
      for (auto kind : {CharKind::Delta0, CharKind::Delta1, CharKind::Theta0, CharKind::Theta1}) {
        const Complex v = (*evs[a])(kind, l);
        row[std::string(to_string(kind)) + "_re"] = v.real();
        row[std::string(to_string(kind)) + "_im"] = v.imag();
      }
      out.push_back(std::move(row));
    }
  }
  return out;
}

}  // namespace isobispec
