// End-to-end acceptance run on the default fixture: one PASS/FAIL line per
// criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <string>

#include "isobispec/harness.hpp"
#include "isobispec/parallel.hpp"
#include "isobispec/shooting.hpp"

using namespace isobispec;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

constexpr std::array<CharKind, 4> kAll{CharKind::Delta0, CharKind::Delta1, CharKind::Theta0, CharKind::Theta1};

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

struct Context {
  RunConfig cfg;
  Fixture fx;
  std::vector<Potential> qs;
  std::vector<std::unique_ptr<CharFnEval>> evs;
  std::vector<Spectrum> spectra[2];  // Delta_0, Delta_1 per alpha
  Potential random_q;

  void members() {
    for (const auto& al : cfg.alphas) qs.push_back(build_potential(fx.family, al));
    evs.resize(qs.size());
    parallel_for(qs.size(), [&](std::size_t k) { evs[k] = std::make_unique<CharFnEval>(qs[k]); });
  }
};

/// Smooth random potential vanishing on (0, a): a short random sine series.
Potential random_potential(const Grid& g) {
  std::mt19937 rng(20240517u);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::array<Complex, 5> c;
  for (auto& v : c) v = Complex(u(rng), u(rng));
  const double a = g.delay();
  return general_potential(ComplexFn::sample(g, 0, g.panels(), [&](double x) {
    if (x < a) return Complex(0.0);
    Complex s(0.0);
    for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * std::sin((k + 1) * (x - a));
    return s;
  }));
}

double delta_spread(const std::vector<std::unique_ptr<CharFnEval>>& evs) {
  double worst = 0.0;
  for (std::size_t k = 1; k < evs.size(); ++k)
    for (const auto& l : validation_lambdas())
      for (int j : {0, 1}) worst = std::max(worst, relative_deviation(evs[k]->delta(j, l), evs[0]->delta(j, l)));
  return worst;
}

Outcome c1(Context& ctx) {
  ctx.fx = build_fixture(ctx.cfg);
  const double r = ctx.fx.family->relation_residual;
  return {r <= 1e-7, fmt("||M_h' e - e|| / ||e|| = %.3g on %g panels", r, ctx.fx.grid.panels())};
}

Outcome c2(Context& ctx) {
  ctx.members();
  const double s = delta_spread(ctx.evs);
  return {s <= 1e-7, fmt("max relative Delta_j spread over alpha = %.3g", s)};
}

Outcome c3(Context& ctx) {
  double worst = 0.0;
  bool certified = true;
  for (int j : {0, 1}) {
    const CharKind kind = j == 0 ? CharKind::Delta0 : CharKind::Delta1;
    for (const auto& ev : ctx.evs) ctx.spectra[j].push_back(compute_spectrum(*ev, kind, {ctx.cfg.n_eigs}));
    for (const auto& s : ctx.spectra[j]) {
      if (static_cast<int>(s.eigenvalues.size()) < ctx.cfg.n_eigs) certified = false;
      for (const auto& e : s.eigenvalues) certified = certified && e.certified;
    }
    if (!certified) break;
    for (std::size_t a = 1; a < ctx.spectra[j].size(); ++a)
      for (int n = 0; n < ctx.cfg.n_eigs; ++n)
        worst = std::max(worst, std::abs(ctx.spectra[j][a].eigenvalues[n].lambda - ctx.spectra[j][0].eigenvalues[n].lambda));
  }
  return {certified && worst <= 1e-7,
          fmt("max |lambda_n(alpha) - lambda_n(0)| = %.3g over 15 zeros of Delta_0 and Delta_1", worst) +
              (certified ? "" : ", uncertified zero")};
}

Outcome c4(Context& ctx) {
  const Grid& g = ctx.fx.grid;
  double zero = 0.0, tail = 0.0;
  for (const auto& ev : ctx.evs) {
    const ComplexFn& w = ev->w0().w;
    zero = std::max(zero, l2_norm(w, g.node(Break::A), g.node(Break::FiveHalfA)));
    const ComplexFn d = w.restricted(g.node(Break::FiveHalfA), g.panels()) - to_complex(ctx.fx.family->h);
    tail = std::max(tail, l2_norm(d));
  }
  return {zero <= 1e-7 && tail <= 1e-7, fmt("||w_0|| on (a,5a/2) = %.3g, ||w_0 - h|| on (5a/2,pi) = %.3g", zero, tail)};
}

Outcome c5(Context& ctx) {
  double worst = 0.0;
  for (const auto& ev : ctx.evs) worst = std::max(worst, std::abs(ev->omega_q() - ev->omega_w0()));
  ctx.random_q = random_potential(ctx.fx.grid);
  const CharFnEval rnd(ctx.random_q);
  const double r = std::abs(rnd.omega_q() - rnd.omega_w0());
  return {std::max(worst, r) <= 1e-7, fmt("|omega - int w_0| = %.3g (family), %.3g (random q)", worst, r)};
}

Outcome c6(Context& ctx) {
  double worst = 0.0;
  for (std::size_t a = 1; a < ctx.qs.size(); ++a)
    for (int k : {0, 1})
      worst = std::max(worst, l2_norm(compute_Q(ctx.qs[a], k, QMethod::Reordered) - compute_Q(ctx.qs[a], k, QMethod::Original)));
  return {worst <= 1e-6, fmt("max L2 gap between Q_k routes = %.3g", worst)};
}

Outcome c7(Context& ctx) {
  std::vector<const Potential*> all;
  for (const auto& q : ctx.qs) all.push_back(&q);
  all.push_back(&ctx.random_q);
  const CharFnEval rnd(ctx.random_q);
  const auto lambdas = validation_lambdas();
  std::vector<double> worst(all.size() * lambdas.size(), 0.0);
  parallel_for(worst.size(), [&](std::size_t t) {
    const std::size_t a = t / lambdas.size();
    const Complex l = lambdas[t % lambdas.size()];
    const CharFnEval& ev = a < ctx.evs.size() ? *ctx.evs[a] : rnd;
    const CharValues cv = char_values(*all[a], l);
    for (auto k : kAll) worst[t] = std::max(worst[t], relative_deviation(ev(k, l), cv[k]));
  });
  const double w = *std::max_element(worst.begin(), worst.end());
  return {w <= 1e-7, fmt("max relative closed-form vs shooting deviation = %.3g", w)};
}

Outcome c8(Context& ctx) {
  const Grid& g = ctx.fx.grid;
  const CharFnEval ev(general_potential(ComplexFn::constant(g, 0, g.panels(), 0.0)));
  double worst = std::abs(ev(CharKind::Delta0, 0.0) - kPi);
  bool ok = true;
  for (int j : {0, 1}) {
    const auto s = compute_spectrum(ev, j == 0 ? CharKind::Delta0 : CharKind::Delta1, {15});
    if (s.eigenvalues.size() < 15) ok = false;
    for (int n = 1; n <= 15 && ok; ++n) {
      const double expect = j == 0 ? n * n : (n - 0.5) * (n - 0.5);
      worst = std::max(worst, std::abs(s.eigenvalues[n - 1].lambda - expect));
    }
  }
  return {ok && worst <= 1e-10, fmt("max |lambda - exact| and |Delta_0(0) - pi| = %.3g", worst)};
}

Outcome c9(Context& ctx) {
  RunConfig cfg = ctx.cfg;
  cfg.eigsign = -1;
  cfg.alphas = {Complex(0.0), Complex(1.0), Complex(-1.0), Complex(-2.0), Complex(0.5, 1.5)};
  const Fixture fx = build_fixture(cfg);
  std::vector<std::unique_ptr<CharFnEval>> evs(cfg.alphas.size());
  parallel_for(evs.size(), [&](std::size_t k) {
    evs[k] = std::make_unique<CharFnEval>(build_potential(fx.family, cfg.alphas[k]));
  });
  const double int_e = fx.family->integral_e();
  if (std::abs(int_e) < 1e-10) return {true, "degenerate family: integral of e vanishes, discrimination not asserted"};

  double w1 = 0.0;
  for (std::size_t k = 1; k < evs.size(); ++k) w1 = std::max(w1, l2_norm(evs[k]->w1().w - evs[0]->w1().w));
  const double slope = std::abs(evs[1]->omega_q() - evs[2]->omega_q() - 4.0 * int_e);

  const double len = kPi - fx.grid.delay();
  double ident = 0.0;
  for (std::size_t k = 1; k < evs.size(); ++k) {
    const Complex dw = evs[k]->omega_q() - evs[0]->omega_q();
    for (const auto& l : validation_lambdas()) {
      const Complex rho = std::sqrt(l);
      ident = std::max(ident, std::abs(evs[k]->theta(0, l) - evs[0]->theta(0, l) - dw * 0.5 * len * sinc(rho * len)));
    }
  }
  const bool pass = w1 <= 1e-7 && slope <= 1e-8 && ident <= 1e-8;
  return {pass, fmt("w_1 spread = %.3g, |omega(p_1) - omega(p_-1) - 4 int e| = %.3g", w1, slope) +
                    fmt(", Theta_0 identity gap = %.3g", ident)};
}

Outcome c10(Context& ctx) {
  RunConfig cfg = ctx.cfg;
  cfg.normalize = false;
  const Fixture fx = build_fixture(cfg);
  std::vector<std::unique_ptr<CharFnEval>> evs(cfg.alphas.size());
  parallel_for(evs.size(), [&](std::size_t k) {
    evs[k] = std::make_unique<CharFnEval>(build_potential(fx.family, cfg.alphas[k]));
  });
  const double s = delta_spread(evs);
  return {s >= 1e-3, fmt("without the eta rescale (eta = %.4g) the Delta_j spread is %.3g", fx.pair.eta, s)};
}

Outcome c11(Context& ctx) {
  int gap = 0, total = 0;
  for (int j : {0, 1})
    for (const auto& s : ctx.spectra[j]) {
      gap = std::max(gap, std::abs(s.sweep_count - s.found_in_sweep));
      total += s.sweep_count;
    }
  return {total > 0 && gap == 0, fmt("largest |winding count - refined zeros| = %g over %g counted zeros", gap, total)};
}

}  // namespace

int main() {
  Context ctx;
  struct Item {
    int id;
    const char* title;
    double budget;  // seconds, 0 = none
    std::function<Outcome(Context&)> run;
  };
  const std::vector<Item> items{
      {1, "eigenpair residual", 5.0, c1},
      {2, "Delta_j function-level invariance", 30.0, c2},
      {3, "Delta_j spectrum-level invariance", 120.0, c3},
      {4, "w_0 structural identity", 0.0, c4},
      {5, "omega equals the integral of w_0", 0.0, c5},
      {6, "Q_k route equivalence", 0.0, c6},
      {7, "closed form vs shooting", 0.0, c7},
      {8, "zero-potential exactness", 0.0, c8},
      {9, "eigsign -1 discrimination", 0.0, c9},
      {10, "negative control", 0.0, c10},
      {11, "certification completeness", 0.0, c11},
  };

  std::printf("threads: %d\n", thread_count());
  int failures = 0;
  for (const auto& it : items) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = it.run(ctx);
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (it.budget > 0.0 && secs > it.budget) {
      out.pass = false;
      out.detail += fmt(" [over budget: %.1f s > %.0f s]", secs, it.budget);
    }
    failures += !out.pass;
    std::printf("[%s] criterion %2d: %s: %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", it.id, it.title, out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%s: %d of %zu criteria passed\n", failures ? "FAIL" : "PASS", static_cast<int>(items.size()) - failures,
              items.size());
  return failures ? 1 : 0;
}
