#include "isobispec/grid.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace isobispec {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::DelayOutOfRange: return "DelayOutOfRange";
    case Errc::OutOfSupport: return "OutOfSupport";
    case Errc::OffGrid: return "OffGrid";
    case Errc::SupportMismatch: return "SupportMismatch";
    case Errc::ZeroOperator: return "ZeroOperator";
    case Errc::ConvergenceFailure: return "ConvergenceFailure";
    case Errc::GridTooCoarseForRho: return "GridTooCoarseForRho";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::LeftTrustRegion: return "LeftTrustRegion";
    case Errc::ContourThroughZero: return "ContourThroughZero";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------

std::array<double, kBreakCount> Breakpoints::sorted() const {
  auto s = nodes;
  std::sort(s.begin(), s.end());
  return s;
}

double Breakpoints::length(int segment) const {
  if (segment < 0 || segment + 1 >= kBreakCount) throw Error(Errc::InvalidArgument, "segment index out of range");
  const auto s = sorted();
  return s[segment + 1] - s[segment];
}

Breakpoints make_breakpoints(double a, bool strict) {
  if (!std::isfinite(a) || a <= 0.0) throw Error(Errc::DelayOutOfRange, "delay must be finite and positive");
  // Tolerate rounding in a = pi/3 itself.
  const double lo = kPi / 3.0 * (1.0 - 1e-14);
  const bool supported = a >= lo && a < 2.0 * kPi / 5.0;
  if (strict && !supported) throw Error(Errc::DelayOutOfRange, "a must lie in [pi/3, 2pi/5)");
  if (!strict && a >= kPi) throw Error(Errc::DelayOutOfRange, "a must lie in (0, pi)");

  Breakpoints bp;
  bp.a = a;
  bp.supported = supported;
  bp.nodes = {0.0, a, 1.5 * a, kPi - a, 2.0 * a, kPi - 0.5 * a, 2.5 * a, kPi};
  // Snap coincident nodes (a = pi/3) so the empty segments are exactly empty.
  auto& n = bp.nodes;
  if (std::abs(n[3] - n[4]) <= 1e-12) n[4] = n[3];
  if (std::abs(n[5] - n[6]) <= 1e-12) n[6] = n[5];
  return bp;
}

// ---------------------------------------------------------------------------

Grid Grid::aligned(DelayFraction a, int target_panels, bool strict) {
  if (a.num <= 0 || a.den <= 0) throw Error(Errc::DelayOutOfRange, "delay fraction must be positive");
  if (target_panels < 8) throw Error(Errc::InvalidArgument, "grid needs at least 8 panels");
  make_breakpoints(a.radians(), strict);

  // a/2 = m h and pi = N h  =>  m / N = num / (2 den).
  const long g = std::gcd(a.num, 2 * a.den);
  const long base_n = 2 * a.den / g;
  const long base_m = a.num / g;
  const long limit = 16L * target_panels + base_n;

  for (long k = std::max(1L, (target_panels + base_n - 1) / base_n); k * base_n <= limit; ++k) {
    Grid grid;
    grid.panels_ = static_cast<int>(k * base_n);
    grid.half_ = static_cast<int>(k * base_m);
    grid.fraction_ = a;
    const int n = grid.panels_;
    const int m = grid.half_;
    grid.breaks_ = {0, 2 * m, 3 * m, n - 2 * m, 4 * m, n - m, 5 * m, n};
    if (!std::is_sorted(grid.breaks_.begin(), grid.breaks_.end()))
      throw Error(Errc::DelayOutOfRange, "breakpoints out of order: the construction needs pi/3 <= a <= 2pi/5");
    bool ok = true;
    for (int s = 0; s + 1 < kBreakCount; ++s) {
      const int len = grid.breaks_[s + 1] - grid.breaks_[s];
      if (len != 0 && len < 4) ok = false;
    }
    if (ok) return grid;
  }
  throw Error(Errc::InvalidArgument, "no aligned grid within 16x the requested size; use a simpler delay fraction");
}

int Grid::segment_panels(Break b) const {
  const int i = static_cast<int>(b);
  if (i + 1 >= kBreakCount) return 0;
  return breaks_[i + 1] - breaks_[i];
}

int Grid::node_of(double x) const {
  const double p = x / step();
  const double r = std::round(p);
  if (std::abs(p - r) > 1e-7 || r < 0 || r > panels_)
    throw Error(Errc::OffGrid, "x = " + std::to_string(x) + " is not a grid node");
  return static_cast<int>(r);
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  return out;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename Scalar>
void write_rows(std::ostream& out, const PiecewiseFn<Scalar>& f, bool complex_valued) {
  out << (complex_valued ? "x,re,im\n" : "x,re\n");
  for (int i = f.lo(); i <= f.hi(); ++i) {
    const Complex v = f.at(i, i == f.hi() ? Side::Left : Side::Right);
    out << fmt17(f.grid().x(i)) << ',' << fmt17(v.real());
    if (complex_valued) out << ',' << fmt17(v.imag());
    out << '\n';
  }
}

}  // namespace

SampledCurve read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::Io, "empty CSV");
  const auto header = split_fields(line);
  SampledCurve curve;
  if (header.size() == 2 && header[0] == "x" && header[1] == "re") {
    curve.complex_valued = false;
  } else if (header.size() == 3 && header[0] == "x" && header[1] == "re" && header[2] == "im") {
    curve.complex_valued = true;
  } else {
    throw Error(Errc::Io, "CSV header must be x,re or x,re,im");
  }
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto f = split_fields(line);
    if (f.size() != header.size()) throw Error(Errc::Io, "row " + std::to_string(row) + ": wrong field count");
    try {
      const double x = std::stod(f[0]);
      const double re = std::stod(f[1]);
      const double im = curve.complex_valued ? std::stod(f[2]) : 0.0;
      if (!curve.x.empty() && !(x > curve.x.back()))
        throw Error(Errc::Io, "row " + std::to_string(row) + ": x must be strictly increasing");
      curve.x.push_back(x);
      curve.y.emplace_back(re, im);
    } catch (const std::logic_error&) {
      throw Error(Errc::Io, "row " + std::to_string(row) + ": not a number");
    }
  }
  if (curve.x.size() < 2) throw Error(Errc::Io, "CSV needs at least two rows");
  return curve;
}

SampledCurve read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  return read_csv(in);
}

void write_csv(std::ostream& out, const RealFn& f) { write_rows(out, f, false); }
void write_csv(std::ostream& out, const ComplexFn& f) { write_rows(out, f, true); }

RealFn resample(const Grid& grid, int lo, int hi, const SampledCurve& curve) {
  const double tol = 1e-9;
  if (curve.x.front() > grid.x(lo) + tol || curve.x.back() < grid.x(hi) - tol)
    throw Error(Errc::OutOfSupport, "tabulated data does not cover the required interval");
  for (const auto& v : curve.y)
    if (v.imag() != 0.0) throw Error(Errc::InvalidArgument, "seed function must be real-valued");
  return RealFn::sample(grid, lo, hi, [&](double x) {
    auto it = std::upper_bound(curve.x.begin(), curve.x.end(), x);
    if (it == curve.x.begin()) return curve.y.front().real();
    if (it == curve.x.end()) return curve.y.back().real();
    const auto k = static_cast<std::size_t>(it - curve.x.begin());
    const double t = (x - curve.x[k - 1]) / (curve.x[k] - curve.x[k - 1]);
    return (1.0 - t) * curve.y[k - 1].real() + t * curve.y[k].real();
  });
}

}  // namespace isobispec
