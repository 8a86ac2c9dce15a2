#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "isobispec/charfn.hpp"
#include "isobispec/operator.hpp"
#include "isobispec/potential.hpp"
#include "isobispec/spectra.hpp"

namespace isobispec {

struct RunConfig {
  DelayFraction a_frac{7, 20};
  std::string h_spec = "const:1";  ///< const:C | sin:F | linear:S | linear:A,B | csv:PATH
  int eigsign = 1;
  std::vector<Complex> alphas{Complex(0.0), Complex(1.0), Complex(-2.0), Complex(0.5, 1.5)};
  int grid_n = 2048;
  int n_eigs = 15;
  std::map<std::string, double> tolerances;  ///< overrides of default_tolerances()
  EigenChoice eigen_choice = EigenChoice::LargestMagnitude;
  int eigen_index = 0;
  bool normalize = true;  ///< false skips the eta rescale (negative control)
  std::string output = "json";
  std::string out_dir;
  bool unsafe_delay = false;

  double tol(const std::string& name) const;
  Grid grid() const;
};

/// Named thresholds and their defaults.
const std::map<std::string, double>& default_tolerances();

DelayFraction parse_fraction(const std::string& text);
/// "RE" or "RE,IM".
Complex parse_alpha(const std::string& text);
/// Samples the seed function described by `spec` on [5a/2, pi].
RealFn build_h(const Grid& grid, const std::string& spec);

/// The lambda validation grid: 40 points evenly spaced on [-5, 120] plus
/// 3+4i and -2-7i.
std::vector<Complex> validation_lambdas();

/// |A - B| / (1 + |B|).
double relative_deviation(Complex a, Complex b);

struct Fixture {
  Grid grid;
  RealFn h_raw;
  Eigenpair pair;
  std::shared_ptr<const FamilySpec> family;
};

/// h from the config, its chosen eigenpair, and the family (rescaled by
/// eigsign / eta unless cfg.normalize is false).
Fixture build_fixture(const RunConfig& cfg);

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool at_least = false;  ///< pass means value >= threshold instead of <=
  bool pass = false;
  std::string note;
};

struct VerificationReport {
  std::string scenario;
  std::vector<Check> checks;
  nlohmann::json environment = nlohmann::json::object();
  std::vector<std::string> flags;

  void add(std::string name, double value, double threshold, bool at_least = false, std::string note = {});
  bool passed() const;
  nlohmann::json to_json() const;
  std::string to_csv() const;
};

VerificationReport run_verify_theorem1(const RunConfig& cfg);
VerificationReport run_verify_remark2(const RunConfig& cfg);
VerificationReport run_crosscheck(const RunConfig& cfg);

/// Zeros of Delta_0 and Delta_1 (or Theta_0 and Theta_1) for every alpha.
nlohmann::json run_spectrum(const RunConfig& cfg, bool theta = false);

/// All four characteristic functions on the given lambdas for every alpha.
nlohmann::json run_charfn(const RunConfig& cfg, const std::vector<Complex>& lambdas);

}  // namespace isobispec
