#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "isobispec/harness.hpp"

using namespace isobispec;

namespace {

struct Options {
  std::string a_frac = "7/20";
  std::string h = "const:1";
  std::string eigsign = "+1";
  std::vector<std::string> alphas;
  int grid_n = 2048;
  int n_eigs = 15;
  std::vector<std::string> tols;
  std::string out = "json";
  std::string out_dir;
  bool unsafe_delay = false;
  std::string eigen = "largest";
  bool skip_normalization = false;
  // subcommand extras
  bool theta = false;
  bool with_matrix = false;
  std::vector<std::string> lambdas;
  std::string lambda_range;
};

void add_common(CLI::App* app, Options& o) {
  app->set_help_flag("--help", "print this help and exit");  // -h is taken by --h
  app->add_option("--a-frac", o.a_frac, "delay as a fraction of pi, P/Q")->capture_default_str();
  app->add_option("--h", o.h, "seed function: const:C, sin:F, linear:S, linear:A,B or csv:PATH")
      ->capture_default_str();
  app->add_option("--eigsign", o.eigsign, "+1 or -1")->capture_default_str();
  app->add_option("--alpha", o.alphas, "family parameter RE[,IM]; repeatable")->allow_extra_args(false);
  app->add_option("--grid-n", o.grid_n, "minimum number of panels on [0, pi]")->capture_default_str();
  app->add_option("--n-eigs", o.n_eigs, "eigenvalues per spectrum")->capture_default_str();
  app->add_option("--tol", o.tols, "threshold override NAME=VAL; repeatable")->allow_extra_args(false);
  app->add_option("--out", o.out, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app->add_option("--out-dir", o.out_dir, "write results to this directory instead of stdout");
  app->add_flag("--unsafe-delay", o.unsafe_delay, "allow a/pi outside [1/3, 2/5)");
  app->add_option("--eigen", o.eigen, "eigenpair choice: largest, smallest or index:K")->capture_default_str();
  app->add_flag("--skip-normalization", o.skip_normalization, "do not rescale h by eigsign/eta");
}

RunConfig to_config(const Options& o) {
  RunConfig cfg;
  cfg.a_frac = parse_fraction(o.a_frac);
  cfg.h_spec = o.h;
  if (o.eigsign == "+1" || o.eigsign == "1")
    cfg.eigsign = 1;
  else if (o.eigsign == "-1")
    cfg.eigsign = -1;
  else
    throw Error(Errc::InvalidArgument, "eigsign must be +1 or -1");
  if (!o.alphas.empty()) {
    cfg.alphas.clear();
    for (const auto& s : o.alphas) cfg.alphas.push_back(parse_alpha(s));
  }
  cfg.grid_n = o.grid_n;
  if (o.n_eigs < 1) throw Error(Errc::InvalidArgument, "n-eigs must be positive");
  cfg.n_eigs = o.n_eigs;
  for (const auto& t : o.tols) {
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw Error(Errc::InvalidArgument, "--tol expects NAME=VAL");
    const std::string name = t.substr(0, eq);
    if (!default_tolerances().count(name)) throw Error(Errc::InvalidArgument, "unknown tolerance '" + name + "'");
    try {
      cfg.tolerances[name] = std::stod(t.substr(eq + 1));
    } catch (const std::exception&) {
      throw Error(Errc::InvalidArgument, "bad tolerance value in '" + t + "'");
    }
  }
  if (o.eigen == "largest") {
    cfg.eigen_choice = EigenChoice::LargestMagnitude;
  } else if (o.eigen == "smallest") {
    cfg.eigen_choice = EigenChoice::Smallest;
  } else if (o.eigen.rfind("index:", 0) == 0) {
    cfg.eigen_choice = EigenChoice::ByIndex;
    cfg.eigen_index = std::stoi(o.eigen.substr(6));
  } else {
    throw Error(Errc::InvalidArgument, "--eigen must be largest, smallest or index:K");
  }
  cfg.normalize = !o.skip_normalization;
  cfg.output = o.out;
  cfg.out_dir = o.out_dir;
  cfg.unsafe_delay = o.unsafe_delay;
  return cfg;
}

std::string cell(const nlohmann::json& v) {
  if (v.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

/// Array of flat objects as CSV, header from the first row.
std::string rows_to_csv(const nlohmann::json& rows) {
  std::ostringstream out;
  if (rows.empty()) return {};
  std::vector<std::string> keys;
  for (const auto& [k, v] : rows.front().items()) keys.push_back(k);
  for (std::size_t i = 0; i < keys.size(); ++i) out << (i ? "," : "") << keys[i];
  out << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < keys.size(); ++i) out << (i ? "," : "") << cell(r.value(keys[i], nlohmann::json()));
    out << '\n';
  }
  return out.str();
}

void emit(const RunConfig& cfg, const std::string& stem, const std::string& text) {
  if (cfg.out_dir.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::filesystem::create_directories(cfg.out_dir);
  const auto path = std::filesystem::path(cfg.out_dir) / stem;
  std::ofstream f(path);
  if (!f) throw Error(Errc::Io, "cannot write " + path.string());
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
  std::cout << path.string() << '\n';
}

std::string ext(const RunConfig& cfg) { return cfg.output == "csv" ? ".csv" : ".json"; }

int report(const RunConfig& cfg, const VerificationReport& rep) {
  emit(cfg, rep.scenario + ext(cfg), cfg.output == "csv" ? rep.to_csv() : rep.to_json().dump(2));
  std::cerr << rep.scenario << ": " << (rep.passed() ? "PASS" : "FAIL") << '\n';
  return rep.passed() ? 0 : 1;
}

std::vector<Complex> charfn_lambdas(const Options& o) {
  std::vector<Complex> out;
  for (const auto& s : o.lambdas) out.push_back(parse_alpha(s));
  if (!o.lambda_range.empty()) {
    double lo = 0, hi = 0;
    int count = 0;
    if (std::sscanf(o.lambda_range.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 || count < 1)
      throw Error(Errc::InvalidArgument, "--lambda-range expects LO:HI:COUNT");
    for (int i = 0; i < count; ++i) out.emplace_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1), 0.0);
  }
  return out.empty() ? validation_lambdas() : out;
}

int run_family(const RunConfig& cfg) {
  const Fixture fx = build_fixture(cfg);
  nlohmann::json members = nlohmann::json::array();
  std::ostringstream all_csv;
  for (std::size_t k = 0; k < cfg.alphas.size(); ++k) {
    const Potential q = build_potential(fx.family, cfg.alphas[k]);
    members.push_back(structural_report(q).to_json());
    std::ostringstream csv;
    write_csv(csv, q.fn);
    if (!cfg.out_dir.empty()) {
      emit(cfg, "family_q" + std::to_string(k) + ".csv", csv.str());
    } else if (cfg.output == "csv") {
      all_csv << "# alpha=" << cfg.alphas[k].real() << "," << cfg.alphas[k].imag() << '\n' << csv.str();
    }
  }
  const nlohmann::json rep{{"schema", 1},
                           {"a", fx.grid.delay()},
                           {"grid_panels", fx.grid.panels()},
                           {"eta", fx.pair.eta},
                           {"eigen_residual", fx.family->relation_residual},
                           {"integral_e", fx.family->integral_e()},
                           {"members", members}};
  if (!cfg.out_dir.empty())
    emit(cfg, "family_report.json", rep.dump(2));
  else
    emit(cfg, "", cfg.output == "csv" ? all_csv.str() : rep.dump(2));
  return 0;
}

int run_eig(const RunConfig& cfg, bool with_matrix) {
  const Grid g = cfg.grid();
  const RealFn h = build_h(g, cfg.h_spec);
  const auto op = build_nystrom(h);
  const auto pair = leading_real_eigenpair(op, cfg.eigen_choice, cfg.eigen_index);
  const auto rep = eigen_report(op, pair, with_matrix);
  if (cfg.output == "csv") {
    std::ostringstream csv;
    csv.precision(17);
    csv << "x,e\n";
    for (std::size_t i = 0; i < rep["nodes"].size(); ++i)
      csv << rep["nodes"][i].get<double>() << ',' << rep["e"][i].get<double>() << '\n';
    emit(cfg, "eig.csv", csv.str());
  } else {
    emit(cfg, "eig.json", rep.dump(2));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iso-bispectral potentials for Sturm-Liouville operators with a constant delay"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print this help and exit");
  Options o;

  auto* thm = app.add_subcommand("verify-theorem1", "check that Delta_0, Delta_1 and their zeros do not depend on alpha");
  auto* rem = app.add_subcommand("verify-remark2", "check the eigsign -1 family: shared w_1, alpha-dependent omega");
  auto* cross = app.add_subcommand("crosscheck", "closed-form characteristic functions against direct shooting");
  auto* spec = app.add_subcommand("spectrum", "certified zeros of the characteristic functions");
  auto* chf = app.add_subcommand("charfn", "characteristic function values on a lambda list");
  auto* fam = app.add_subcommand("family", "sample the family members and their structural report");
  auto* eig = app.add_subcommand("eig", "eigenpair of the Nystrom operator");
  for (auto* s : {thm, rem, cross, spec, chf, fam, eig}) add_common(s, o);
  spec->add_flag("--theta", o.theta, "zeros of Theta_0 and Theta_1 instead of Delta_0 and Delta_1");
  chf->add_option("--lambda", o.lambdas, "evaluation point RE[,IM]; repeatable")->allow_extra_args(false);
  chf->add_option("--lambda-range", o.lambda_range, "LO:HI:COUNT real points");
  eig->add_flag("--with-matrix", o.with_matrix, "include the kernel matrix");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = to_config(o);
    if (*rem && rem->count("--eigsign") == 0) cfg.eigsign = -1;
    if (*thm) return report(cfg, run_verify_theorem1(cfg));
    if (*rem) return report(cfg, run_verify_remark2(cfg));
    if (*cross) return report(cfg, run_crosscheck(cfg));
    if (*spec) {
      const auto rows = run_spectrum(cfg, o.theta);
      emit(cfg, "spectrum" + ext(cfg), cfg.output == "csv" ? rows_to_csv(rows) : rows.dump(2));
      return 0;
    }
    if (*chf) {
      const auto rows = run_charfn(cfg, charfn_lambdas(o));
      emit(cfg, "charfn" + ext(cfg), cfg.output == "csv" ? rows_to_csv(rows) : rows.dump(2));
      return 0;
    }
    if (*fam) return run_family(cfg);
    if (*eig) return run_eig(cfg, o.with_matrix);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
