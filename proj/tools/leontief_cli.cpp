// Command-line front end: analyze, btf, sensitivity, check-productive,
// export-dot. Exit codes: 0 done, 2 input error, 3 numerical failure,
// 4 --require-solution unmet.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "leontief/leontief.hpp"

namespace {

using namespace leontief;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitNoSolution = 4;

struct Shared {
  std::string input;
  std::string mode = "auto";
  std::string kind = "transactions";
  double tol_spectral = kDefaultSpectralTolerance;
  double support_eps = 0.0;
  std::string normalize = "unit";
  std::vector<std::string> functionals;
  std::string format = "text";
  std::string output;
  bool require_solution = false;
};

void add_shared(CLI::App* cmd, Shared& s) {
  cmd->add_option("input", s.input, "Economy file (.csv or report/input .json)")->required();
  cmd->add_option("--mode", s.mode, "closed, open or auto (open iff demand is nonzero)")
      ->check(CLI::IsMember({"closed", "open", "auto"}));
  cmd->add_option("--kind", s.kind, "CSV payload: transactions or coefficients")
      ->check(CLI::IsMember({"transactions", "coefficients"}));
  cmd->add_option("--tol-spectral", s.tol_spectral, "Tolerance for rho = 1, in (0, 0.1]");
  cmd->add_option("--support-eps", s.support_eps, "Entries <= eps are treated as zero");
  cmd->add_option("--normalize", s.normalize, "Closed-mode scale: unit or match-total")
      ->check(CLI::IsMember({"unit", "match-total"}));
  cmd->add_option("--functional", s.functionals, "name=w1,w2,... (repeatable)");
  cmd->add_option("--format", s.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  cmd->add_option("--output,-o", s.output, "Write the report here instead of stdout");
  cmd->add_flag("--require-solution", s.require_solution,
                "Exit with status 4 unless a unique solution was found");
}

std::vector<LinearFunctional> parse_functionals(const std::vector<std::string>& specs) {
  std::vector<LinearFunctional> out;
  for (const std::string& spec : specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
      throw DomainError("functional '" + spec + "' is not of the form name=w1,w2,...");
    LinearFunctional f{spec.substr(0, eq), {}};
    std::stringstream ss(spec.substr(eq + 1));
    std::string cell;
    for (std::size_t col = 1; std::getline(ss, cell, ','); ++col) {
      try {
        std::size_t used = 0;
        f.weights.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw DomainError("functional '" + f.name + "': weight " + std::to_string(col) + " ('" +
                          cell + "') is not a number");
      }
    }
    out.push_back(std::move(f));
  }
  return out;
}

AnalysisOptions options_from(const Shared& s, Depth depth) {
  AnalysisOptions o;
  o.mode = s.mode == "closed" ? ModeChoice::Closed : s.mode == "open" ? ModeChoice::Open : ModeChoice::Auto;
  o.tol_spectral = s.tol_spectral;
  o.support_eps = s.support_eps;
  o.normalize = s.normalize == "unit" ? NormalizationKind::Unit : NormalizationKind::MatchScale;
  o.functionals = parse_functionals(s.functionals);
  o.depth = depth;
  return o;
}

void emit(const Shared& s, const std::string& text) {
  if (s.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(s.output);
  if (!f) throw std::runtime_error("cannot write '" + s.output + "'");
  f << text;
}

int exit_code(const Json& report, bool require_solution) {
  int code = kExitOk;
  for (const Json& e : report.at("errors")) {
    const std::string kind = e.at("kind").get<std::string>();
    if (kind == "input") return kExitInput;
    if (kind == "numerical") code = kExitNumerical;
  }
  if (code != kExitOk) return code;
  if (require_solution && (!report.contains("solution") || report["solution"].is_null()))
    return kExitNoSolution;
  return kExitOk;
}

int run_report(const Shared& s, Depth depth) {
  const EconomyFile econ =
      parse_economy(s.input, FileFormat::Auto, parse_payload_kind(s.kind));
  const Analysis an = run_analysis(econ, options_from(s, depth));
  emit(s, s.format == "json" ? an.report.dump(2) + "\n" : render_text(an.report));
  return exit_code(an.report, s.require_solution);
}

int run_productive(const Shared& s) {
  const EconomyFile econ = parse_economy(s.input, FileFormat::Auto, parse_payload_kind(s.kind));
  AnalysisOptions o = options_from(s, Depth::Structure);
  const Analysis an = run_analysis(econ, o);
  const Json& r = an.report;
  if (!r.contains("productivity")) {
    emit(s, s.format == "json" ? r.dump(2) + "\n" : render_text(r));
    return exit_code(r, false);
  }
  Json out{{"productivity", r["productivity"]}, {"errors", r["errors"]}};
  if (r.contains("partition")) out["spectral_radius"] = r["partition"]["rho"];
  if (s.format == "json") {
    emit(s, out.dump(2) + "\n");
  } else {
    std::ostringstream t;
    t << "productive: " << (r["productivity"]["productive"].get<bool>() ? "yes" : "no") << "\n"
      << "leading minors of I - A: " << detail::join(r["productivity"]["leading_minors"]) << "\n";
    if (out.contains("spectral_radius"))
      t << "spectral radius: " << detail::fmt(out["spectral_radius"].get<double>(), 10) << "\n";
    emit(s, t.str());
  }
  return exit_code(r, false);
}

int run_dot(const Shared& s) {
  const EconomyFile econ = parse_economy(s.input, FileFormat::Auto, parse_payload_kind(s.kind));
  const Analysis an = run_analysis(econ, options_from(s, Depth::Structure));
  const int code = exit_code(an.report, false);
  if (code != kExitOk) {
    std::cerr << render_text(an.report);
    return code;
  }
  emit(s, export_dot(an, econ.labels));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonnegative solutions and sensitivities of (I - A)x = d"};
  app.require_subcommand(1);
  std::map<std::string, Shared> shared;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"analyze", "Verdict, certificates and solution"},
      {"btf", "Block triangular form and spectral classes only"},
      {"sensitivity", "Verdict, solution, Jacobians and elasticities"},
      {"check-productive", "Leading-minor productivity test"},
      {"export-dot", "Condensation graph in Graphviz format"}};
  for (const auto& [name, help] : commands) add_shared(app.add_subcommand(name, help), shared[name]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  try {
    for (const auto& [name, s] : shared) {
      if (!app.got_subcommand(name)) continue;
      if (name == "analyze") return run_report(s, Depth::Verdict);
      if (name == "btf") return run_report(s, Depth::Structure);
      if (name == "sensitivity") return run_report(s, Depth::Sensitivity);
      if (name == "check-productive") return run_productive(s);
      if (name == "export-dot") return run_dot(s);
    }
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const DomainError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const DimensionError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
