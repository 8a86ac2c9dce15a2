#include "isobispec/spectra.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <functional>
#include <optional>

#include "isobispec/parallel.hpp"

namespace isobispec {

namespace {

bool integer_asymptotics(CharKind kind) { return kind == CharKind::Delta0 || kind == CharKind::Theta1; }

Complex value_at_rho(const CharFnEval& ev, CharKind kind, Complex rho) { return ev(kind, rho * rho); }

struct ContourHitZero : std::exception {};

constexpr double kContourFloor = 1e-12;

class Winding {
 public:
  explicit Winding(std::function<Complex(Complex)> f) : f_(std::move(f)) {}

  int count(const RhoRect& r) {
    const std::array<Complex, 5> corners{Complex(r.re_lo, r.im_lo), Complex(r.re_hi, r.im_lo),
                                         Complex(r.re_hi, r.im_hi), Complex(r.re_lo, r.im_hi),
                                         Complex(r.re_lo, r.im_lo)};
    double total = 0.0;
    for (int e = 0; e < 4; ++e) {
      const Complex z0 = corners[e];
      const Complex z1 = corners[e + 1];
      const int samples = std::max(8, static_cast<int>(std::ceil(std::abs(z1 - z0) * 16.0)));
      Complex zp = z0;
      Complex fp = eval(zp);
      for (int s = 1; s <= samples; ++s) {
        const Complex z = z0 + (z1 - z0) * (static_cast<double>(s) / samples);
        const Complex f = eval(z);
        total += phase(zp, fp, z, f, 0);
        zp = z;
        fp = f;
      }
    }
    return static_cast<int>(std::lround(total / (2.0 * kPi)));
  }

 private:
  Complex eval(Complex z) {
    const Complex f = f_(z);
    if (!(std::abs(f) > kContourFloor)) throw ContourHitZero();
    return f;
  }

  double phase(Complex z0, Complex f0, Complex z1, Complex f1, int depth) {
    const double d = std::arg(f1 / f0);
    if (std::abs(d) < 0.5 * kPi) return d;
    if (depth > 40 || std::abs(z1 - z0) < 1e-12) throw ContourHitZero();
    const Complex zm = 0.5 * (z0 + z1);
    const Complex fm = eval(zm);
    return phase(z0, f0, zm, fm, depth + 1) + phase(zm, fm, z1, f1, depth + 1);
  }

  std::function<Complex(Complex)> f_;
};

bool inside(const RhoRect& r, Complex rho) {
  return rho.real() > r.re_lo && rho.real() < r.re_hi && rho.imag() > r.im_lo && rho.imag() < r.im_hi;
}

}  // namespace

std::vector<Complex> seeds(CharKind kind, int n_max) {
  if (n_max < 1) throw Error(Errc::InvalidArgument, "n_max must be at least 1");
  const double shift = integer_asymptotics(kind) ? 0.0 : 0.5;
  std::vector<Complex> out;
  for (int n = 1; n <= n_max; ++n) out.emplace_back(n - shift, 0.0);
  return out;
}

double residual_bound(CharKind kind, Complex lambda) {
  const double mag = std::abs(lambda);
  const bool linear = kind == CharKind::Delta0 || kind == CharKind::Theta1;
  return 1e-9 * std::max(1.0, linear ? mag : std::sqrt(mag));
}

RefineResult refine_root(const CharFnEval& ev, CharKind kind, Complex seed_rho) {
  Complex rho = seed_rho;
  for (int it = 1; it <= 50; ++it) {
    const Complex f = value_at_rho(ev, kind, rho);
    const double d = 1e-6 * (1.0 + std::abs(rho));
    const Complex fp = (value_at_rho(ev, kind, rho + d) - value_at_rho(ev, kind, rho - d)) / (2.0 * d);
    if (!std::isfinite(std::abs(f)) || !std::isfinite(std::abs(fp)) || fp == Complex(0.0))
      throw Error(Errc::NoConvergence, "Newton step undefined");
    const Complex step = f / fp;
    rho -= step;
    if (std::abs(rho - seed_rho) > 1.0) throw Error(Errc::LeftTrustRegion, "Newton iterate left the seed's trust region");
    ev.check_rho(rho);
    const Complex lambda = rho * rho;
    const double res = std::abs(value_at_rho(ev, kind, rho));
    if (std::abs(step) < 1e-10 && res <= residual_bound(kind, lambda)) {
      // Report the root in the right half plane (F is even in rho).
      if (rho.real() < 0 || (rho.real() == 0 && rho.imag() < 0)) rho = -rho;
      return {lambda, rho, it, res};
    }
  }
  throw Error(Errc::NoConvergence, "Newton did not converge in 50 iterations");
}

Complex refine(const CharFnEval& ev, CharKind kind, Complex seed_rho) { return refine_root(ev, kind, seed_rho).lambda; }

int count_zeros(const CharFnEval& ev, CharKind kind, RhoRect rect) {
  Winding w([&](Complex rho) { return value_at_rho(ev, kind, rho); });
  for (int attempt = 0; attempt <= 5; ++attempt) {
    const double grow = 1e-4 * attempt;
    const RhoRect r{rect.re_lo - grow, rect.re_hi + grow, rect.im_lo - grow, rect.im_hi + grow};
    try {
      return w.count(r);
    } catch (const ContourHitZero&) {
    }
  }
  throw Error(Errc::ContourThroughZero, "contour passes through a zero after 5 perturbations");
}

Spectrum compute_spectrum(const CharFnEval& ev, CharKind kind, const SpectrumOptions& opts) {
  Spectrum spec;
  spec.kind = kind;
  spec.seeds = seeds(kind, opts.n_eigs);
  const double edge = integer_asymptotics(kind) ? opts.n_eigs + 0.5 : static_cast<double>(opts.n_eigs);
  spec.sweep = {opts.left_edge, edge, -opts.im_half_height, opts.im_half_height};

  std::vector<RefineResult> roots;
  auto absorb = [&](const std::vector<Complex>& starts) {
    std::vector<std::optional<RefineResult>> found(starts.size());
    parallel_for(starts.size(), [&](std::size_t k) {
      try {
        found[k] = refine_root(ev, kind, starts[k]);
      } catch (const Error& e) {
        if (e.code() != Errc::NoConvergence && e.code() != Errc::LeftTrustRegion &&
            e.code() != Errc::GridTooCoarseForRho)
          throw;
      }
    });
    for (const auto& f : found) {
      if (!f) continue;
      const bool dup = std::any_of(roots.begin(), roots.end(),
                                   [&](const RefineResult& r) { return std::abs(r.lambda - f->lambda) <= 1e-6; });
      if (!dup) roots.push_back(*f);
    }
  };
  auto count_inside = [&] {
    return static_cast<int>(
        std::count_if(roots.begin(), roots.end(), [&](const RefineResult& r) { return inside(spec.sweep, r.rho); }));
  };

  absorb(spec.seeds);
  spec.sweep_count = count_zeros(ev, kind, spec.sweep);
  if (count_inside() < spec.sweep_count) {
    // Something off the real seeds: scan a lattice over the sweep rectangle.
    std::vector<Complex> extra;
    for (double re = opts.left_edge; re <= edge; re += 0.25)
      for (double im : {-1.5, -0.75, 0.0, 0.75, 1.5}) extra.emplace_back(re, im);
    absorb(extra);
  }
  spec.found_in_sweep = count_inside();

  // lambda = 0 is outside every rho rectangle; test it directly.
  const Complex f0 = ev(kind, Complex(0.0));
  if (std::abs(f0) <= residual_bound(kind, 0.0)) {
    const bool dup = std::any_of(roots.begin(), roots.end(), [](const RefineResult& r) { return std::abs(r.lambda) <= 1e-6; });
    if (!dup) roots.push_back({Complex(0.0), Complex(0.0), 0, std::abs(f0)});
  }

  // Conjugate pairs share Re lambda only up to rounding, so real parts within
  // 1e-9 (relative) form one cluster ordered by Im lambda.
  std::sort(roots.begin(), roots.end(),
            [](const RefineResult& a, const RefineResult& b) { return a.lambda.real() < b.lambda.real(); });
  for (std::size_t s = 0; s < roots.size();) {
    std::size_t t = s + 1;
    while (t < roots.size() &&
           roots[t].lambda.real() - roots[t - 1].lambda.real() <= 1e-9 * (1.0 + std::abs(roots[t].lambda)))
      ++t;
    std::sort(roots.begin() + s, roots.begin() + t,
              [](const RefineResult& a, const RefineResult& b) { return a.lambda.imag() < b.lambda.imag(); });
    s = t;
  }

  spec.eigenvalues.resize(roots.size());
  parallel_for(roots.size(), [&](std::size_t k) {
    const auto& r = roots[k];
    Eigenvalue& e = spec.eigenvalues[k];
    e.n = static_cast<int>(k) + 1;
    e.lambda = r.lambda;
    e.rho = r.rho;
    e.residual = r.residual;
    double half = 0.4;
    for (const auto& o : roots)
      if (&o != &r) half = std::min(half, 0.45 * std::abs(o.rho - r.rho));
    int expected = 1;
    if (std::abs(r.rho) <= 1e-12) expected = 2;  // simple zero in lambda is double in rho
    try {
      const RhoRect box{r.rho.real() - half, r.rho.real() + half, r.rho.imag() - half, r.rho.imag() + half};
      e.certified = half > 1e-6 && count_zeros(ev, kind, box) == expected &&
                    r.residual <= residual_bound(kind, r.lambda);
    } catch (const Error&) {
      e.certified = false;
    }
  });
  if (static_cast<int>(spec.eigenvalues.size()) > opts.n_eigs) spec.eigenvalues.resize(opts.n_eigs);
  return spec;
}

nlohmann::json Spectrum::to_json() const {
  const int j = (kind == CharKind::Delta0 || kind == CharKind::Theta0) ? 0 : 1;
  nlohmann::json list = nlohmann::json::array();
  for (const auto& e : eigenvalues) {
    list.push_back({{"j", j},
                    {"kind", to_string(kind)},
                    {"n", e.n},
                    {"re_lambda", e.lambda.real()},
                    {"im_lambda", e.lambda.imag()},
                    {"residual", e.residual},
                    {"certified", e.certified}});
  }
  return list;
}

}  // namespace isobispec
