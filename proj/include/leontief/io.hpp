#pragma once

// Economy files in, structured reports out. The JSON report is the primary
// artifact; the text report and the DOT graph are rendered from the same
// analysis.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "leontief/classification.hpp"
#include "leontief/economy.hpp"
#include "leontief/errors.hpp"
#include "leontief/graph.hpp"
#include "leontief/linalg.hpp"
#include "leontief/sensitivity.hpp"
#include "leontief/solver.hpp"
#include "leontief/spectral.hpp"

namespace leontief {

using Json = nlohmann::json;

enum class PayloadKind { Transactions, Coefficients };

inline std::string to_string(PayloadKind k) {
  return k == PayloadKind::Transactions ? "transactions" : "coefficients";
}

inline PayloadKind parse_payload_kind(std::string_view s) {
  if (s == "transactions") return PayloadKind::Transactions;
  if (s == "coefficients") return PayloadKind::Coefficients;
  throw DomainError("unknown payload kind '" + std::string(s) + "'");
}

struct EconomyFile {
  std::vector<std::string> labels;
  PayloadKind kind = PayloadKind::Transactions;
  Matrix matrix;
  std::optional<Vec> demand;
  std::optional<Vec> totals;

  std::size_t size() const noexcept { return labels.size(); }
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  std::string out(s.substr(b, e - b));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

/// Plain or scientific notation, whole cell, finite and nonnegative.
inline double parse_cell(const std::string& text, std::size_t row, std::size_t col) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (text.empty() || ec != std::errc() || ptr != last)
    throw ParseError("not a number: '" + text + "'", row, col);
  if (!std::isfinite(v)) throw ParseError("not a finite number: '" + text + "'", row, col);
  if (v < 0.0)
    throw DomainError(ParseError::format("negative value '" + text + "'", row, col));
  return v;
}

}  // namespace detail

/// CSV: header `sector,L1,...,Ln[,demand][,total]`, then one row per
/// sector in header order. Rows and columns in errors are 1-based.
inline EconomyFile parse_economy_csv(std::istream& in, PayloadKind kind = PayloadKind::Transactions) {
  EconomyFile econ;
  econ.kind = kind;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    rows.emplace_back(lineno, detail::split_csv(line));
  }
  if (rows.empty()) throw ParseError("empty file: missing header", 1, 1);

  const auto& [hline, header] = rows.front();
  std::optional<std::size_t> demand_col, total_col;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const std::string h = detail::lower(header[c]);
    if (h == "demand" || h == "total") {
      auto& slot = h == "demand" ? demand_col : total_col;
      if (slot) throw ParseError("duplicate '" + h + "' column", hline, c + 1);
      slot = c;
    } else {
      if (demand_col || total_col)
        throw ParseError("sector column '" + header[c] + "' after demand/total columns", hline, c + 1);
      if (header[c].empty()) throw ParseError("empty sector label", hline, c + 1);
      econ.labels.push_back(header[c]);
    }
  }
  const std::size_t n = econ.labels.size();
  if (n == 0) throw ParseError("header names no sectors", hline, 1);
  {
    std::set<std::string> seen;
    for (std::size_t c = 0; c < n; ++c)
      if (!seen.insert(econ.labels[c]).second)
        throw ParseError("duplicate sector label '" + econ.labels[c] + "'", hline, c + 2);
  }
  if (rows.size() - 1 != n)
    throw ParseError("expected " + std::to_string(n) + " sector rows, found " +
                         std::to_string(rows.size() - 1),
                     rows.back().first, 1);

  econ.matrix = Matrix(n, n);
  if (demand_col) econ.demand = Vec(n);
  if (total_col) econ.totals = Vec(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& [lineno, cells] = rows[i + 1];
    if (cells.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " cells, found " +
                           std::to_string(cells.size()),
                       lineno, std::min(cells.size(), header.size()) + 1);
    if (cells[0] != econ.labels[i])
      throw ParseError("row label '" + cells[0] + "' does not match header label '" +
                           econ.labels[i] + "'",
                       lineno, 1);
    for (std::size_t j = 0; j < n; ++j) econ.matrix(i, j) = detail::parse_cell(cells[j + 1], lineno, j + 2);
    if (demand_col) (*econ.demand)[i] = detail::parse_cell(cells[*demand_col], lineno, *demand_col + 1);
    if (total_col) (*econ.totals)[i] = detail::parse_cell(cells[*total_col], lineno, *total_col + 1);
  }
  return econ;
}

/// JSON: either an `input` object as echoed in reports, or a whole report.
inline EconomyFile parse_economy_json(const Json& doc) {
  const Json& in = doc.contains("input") ? doc.at("input") : doc;
  try {
    EconomyFile econ;
    econ.labels = in.at("labels").get<std::vector<std::string>>();
    econ.kind = parse_payload_kind(in.value("kind", std::string("transactions")));
    const auto rows = in.at("matrix").get<std::vector<Vec>>();
    const std::size_t n = econ.labels.size();
    if (n == 0) throw DimensionError("no sectors");
    if (std::set<std::string>(econ.labels.begin(), econ.labels.end()).size() != n)
      throw DomainError("duplicate sector label");
    if (rows.size() != n) throw DimensionError("matrix row count does not match labels");
    for (const Vec& r : rows)
      if (r.size() != n) throw DimensionError("matrix is not square");
    econ.matrix = Matrix::from_rows(rows);
    auto vec = [&](const char* key) -> std::optional<Vec> {
      if (!in.contains(key) || in.at(key).is_null()) return std::nullopt;
      Vec v = in.at(key).get<Vec>();
      if (v.size() != n) throw DimensionError(std::string(key) + " length does not match labels");
      return v;
    };
    econ.demand = vec("demand");
    econ.totals = vec("totals");
    auto check = [](const Vec& v, const char* what) {
      for (double x : v)
        if (!std::isfinite(x) || x < 0.0)
          throw DomainError(std::string(what) + " entries must be finite and nonnegative");
    };
    check(econ.matrix.data(), "matrix");
    if (econ.demand) check(*econ.demand, "demand");
    if (econ.totals) check(*econ.totals, "totals");
    return econ;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed economy JSON: ") + e.what(), 0, 0);
  }
}

enum class FileFormat { Auto, Csv, Json };

inline EconomyFile parse_economy(const std::string& path, FileFormat format = FileFormat::Auto,
                                 PayloadKind kind = PayloadKind::Transactions) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open '" + path + "'", 0, 0);
  if (format == FileFormat::Auto) {
    const std::string ext = detail::lower(path.substr(path.find_last_of('.') + 1));
    format = ext == "json" ? FileFormat::Json : FileFormat::Csv;
  }
  if (format == FileFormat::Csv) return parse_economy_csv(f, kind);
  Json doc;
  try {
    doc = Json::parse(f);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), 0, e.byte);
  }
  return parse_economy_json(doc);
}

enum class ModeChoice { Auto, Closed, Open };

inline std::string to_string(ModeChoice m) {
  switch (m) {
    case ModeChoice::Auto: return "auto";
    case ModeChoice::Closed: return "closed";
    case ModeChoice::Open: return "open";
  }
  return "?";
}

/// How far the pipeline runs.
enum class Depth { Structure, Verdict, Sensitivity };

struct AnalysisOptions {
  ModeChoice mode = ModeChoice::Auto;
  double tol_spectral = kDefaultSpectralTolerance;
  double support_eps = 0.0;
  NormalizationKind normalize = NormalizationKind::Unit;
  std::vector<LinearFunctional> functionals;
  Depth depth = Depth::Verdict;
};

/// Everything computed by run_analysis, for callers that want the typed
/// values rather than the JSON tree.
struct Analysis {
  std::optional<TechMatrix> a;
  std::optional<SccDecomposition> scc;
  std::optional<GraphFacts> facts;
  std::optional<BlockTriangularForm> btf;
  std::optional<SpectralClassification> spectral;
  std::optional<AnalysisVerdict> verdict;
  std::optional<Solution> solution;
  std::optional<SensitivityResult> sensitivity;
  Mode mode = Mode::Closed;
  Json report;
};

namespace detail {

inline Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(Vec(m.row(i).begin(), m.row(i).end()));
  return rows;
}

inline Json optional_vec_json(const std::vector<std::optional<double>>& v) {
  Json out = Json::array();
  for (const auto& e : v) out.push_back(e ? Json(*e) : Json(nullptr));
  return out;
}

inline std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
      dynamic_cast<const DimensionError*>(&e))
    return "input";
  if (dynamic_cast<const PreconditionError*>(&e)) return "precondition";
  return "numerical";
}

inline std::vector<std::string> sector_names(const EconomyFile& econ, const std::vector<std::size_t>& idx) {
  std::vector<std::string> out;
  for (std::size_t i : idx) out.push_back(econ.labels[i]);
  return out;
}

inline Json input_json(const EconomyFile& econ) {
  Json in{{"labels", econ.labels}, {"kind", to_string(econ.kind)}, {"matrix", matrix_json(econ.matrix)}};
  in["demand"] = econ.demand ? Json(*econ.demand) : Json(nullptr);
  in["totals"] = econ.totals ? Json(*econ.totals) : Json(nullptr);
  return in;
}

inline std::string normalization_name(NormalizationKind k) {
  return k == NormalizationKind::Unit ? "unit" : "match-total";
}

}  // namespace detail

/// Observed total output used by match-total normalization.
inline Vec reference_totals(const EconomyFile& econ) {
  if (econ.totals) return *econ.totals;
  if (econ.kind == PayloadKind::Coefficients)
    throw DomainError("match-total normalization needs a 'total' column for coefficient input");
  const std::size_t n = econ.size();
  Vec t(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[i] += econ.matrix(i, j);
    if (econ.demand) t[i] += (*econ.demand)[i];
  }
  return t;
}

/// Full pipeline. Stage failures are recorded under `errors` with the stage
/// name; later stages that depend on a failed one are skipped.
inline Analysis run_analysis(const EconomyFile& econ, const AnalysisOptions& opt = {}) {
  Analysis an;
  Json& r = an.report;
  const std::size_t n = econ.size();
  r["input"] = detail::input_json(econ);
  r["tolerances"] = {{"spectral", opt.tol_spectral},
                     {"support_eps", opt.support_eps},
                     {"normalization", detail::normalization_name(opt.normalize)},
                     {"mode", to_string(opt.mode)}};
  r["errors"] = Json::array();
  r["completed"] = false;

  auto fail = [&](const char* stage, const std::exception& e) {
    r["errors"].push_back({{"stage", stage}, {"kind", detail::error_kind(e)}, {"message", e.what()}});
  };
  auto run = [&](const char* stage, auto&& body) {
    try {
      body();
      return true;
    } catch (const std::exception& e) {
      fail(stage, e);
      return false;
    }
  };

  std::optional<DemandVector> d;
  const bool ok_coeffs = run("coefficients", [&] {
    if (!(opt.support_eps >= 0.0) || !std::isfinite(opt.support_eps))
      throw DomainError("support-eps must be a finite nonnegative number");
    if (econ.demand) d = DemandVector(*econ.demand);
    Matrix a(n, n);
    if (econ.kind == PayloadKind::Transactions)
      a = tech_coeffs_from_transactions(econ.matrix, d ? *d : DemandVector::zero(n)).first.matrix();
    else
      a = econ.matrix;
    if (opt.support_eps > 0.0)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (a(i, j) <= opt.support_eps) a(i, j) = 0.0;
    an.a = TechMatrix(std::move(a));
    switch (opt.mode) {
      case ModeChoice::Closed: an.mode = Mode::Closed; break;
      case ModeChoice::Open:
        if (!d || d->is_zero()) throw DomainError("open mode needs a nonzero demand column");
        an.mode = Mode::Open;
        break;
      case ModeChoice::Auto: an.mode = d && !d->is_zero() ? Mode::Open : Mode::Closed; break;
    }
    r["mode"] = to_string(an.mode);
    r["coefficients"] = detail::matrix_json(an.a->matrix());
    const Productivity p = is_productive(*an.a);
    r["productivity"] = {{"productive", p.productive}, {"leading_minors", p.minors}};
  });
  if (!ok_coeffs) return an;

  const bool ok_structure = run("structure", [&] {
    const Digraph g = build_digraph(*an.a);
    an.scc = scc(g);
    an.facts = graph_facts(*an.scc, g);
    an.btf = block_triangular_form(*an.scc);
    Json sinks = Json::array(), sources = Json::array();
    for (std::size_t v = 0; v < n; ++v) {
      if (an.facts->is_sink[v]) sinks.push_back(econ.labels[v]);
      if (an.facts->is_source[v]) sources.push_back(econ.labels[v]);
    }
    r["graph"] = {{"edges", g.edge_count()}, {"sinks", sinks}, {"sources", sources}};
    r["permutation"] = detail::sector_names(econ, an.btf->perm.image());
  });
  if (!ok_structure) return an;

  const bool ok_spectral = run("spectral", [&] {
    an.spectral = classify_blocks(*an.btf, *an.a, opt.tol_spectral);
  });
  {
    Json blocks = Json::array();
    const Vec dv = d ? d->values() : Vec(n, 0.0);
    for (std::size_t b = 0; b < an.btf->block_count(); ++b) {
      const auto members = an.btf->block_vertices(b);
      bool demand = false;
      for (std::size_t v : members) demand = demand || dv[v] > 0.0;
      Json succ = Json::array();
      for (std::size_t c : an.scc->condensation[b]) succ.push_back(c + 1);
      Json jb{{"index", b + 1},
              {"sectors", detail::sector_names(econ, members)},
              {"successors", succ},
              {"closure", static_cast<bool>(an.facts->is_closure[b])},
              {"contains_sink", static_cast<bool>(an.facts->contains_sink[b])},
              {"demand", demand}};
      if (an.spectral) {
        const BlockSpectrum& s = an.spectral->blocks[b];
        jb["rho"] = s.rho;
        jb["rho_bracket"] = {s.lower, s.upper};
        jb["class"] = to_string(s.cls);
      }
      blocks.push_back(std::move(jb));
    }
    r["blocks"] = std::move(blocks);
    if (an.spectral)
      r["partition"] = {{"below_one", detail::sector_names(econ, an.spectral->below_one)},
                        {"one", detail::sector_names(econ, an.spectral->one)},
                        {"above_one", detail::sector_names(econ, an.spectral->above_one)},
                        {"rho", an.spectral->rho}};
  }
  if (!ok_spectral) return an;
  if (opt.depth == Depth::Structure) {
    r["completed"] = true;
    return an;
  }

  const bool ok_verdict = run("verdict", [&] {
    an.verdict = an.mode == Mode::Closed ? classify_closed(*an.a, *an.spectral, *an.btf)
                                         : classify_open(*an.a, *d, *an.spectral, *an.btf);
    const AnalysisVerdict& v = *an.verdict;
    Json free = Json::array();
    for (std::size_t b : v.free_blocks) free.push_back(b + 1);
    r["verdict"] = {{"mode", to_string(v.mode)},
                    {"exists_meaningful", v.exists_meaningful},
                    {"exists_nonneg_nontrivial", v.exists_nonneg_nontrivial},
                    {"unique", v.unique},
                    {"free_blocks", free},
                    {"witness", v.witness ? Json(*v.witness) : Json(nullptr)}};
    Json certs = Json::array();
    for (const Certificate& c : v.certificates)
      certs.push_back({{"condition", c.condition},
                       {"block", c.block ? Json(*c.block + 1) : Json(nullptr)},
                       {"other_block", c.other_block ? Json(*c.other_block + 1) : Json(nullptr)},
                       {"satisfied", c.satisfied},
                       {"reason", c.reason}});
    r["certificates"] = std::move(certs);
  });
  if (!ok_verdict) return an;

  r["solution"] = nullptr;
  if (an.verdict->exists_nonneg_nontrivial && an.verdict->unique) {
    const bool ok_solution = run("solution", [&] {
      if (an.mode == Mode::Closed) {
        const Normalization norm = opt.normalize == NormalizationKind::Unit
                                       ? Normalization::unit()
                                       : Normalization::match_scale(reference_totals(econ));
        an.solution = solve_closed(*an.a, *an.verdict, *an.spectral, *an.btf, norm);
      } else {
        an.solution = solve_open(*an.a, *d, *an.verdict, *an.spectral, *an.btf);
      }
      Json s{{"x", an.solution->x}, {"residual", an.solution->residual}};
      if (an.solution->normalization) {
        s["normalization"] = detail::normalization_name(an.solution->normalization->kind);
        if (an.solution->normalization->kind == NormalizationKind::MatchScale)
          s["reference"] = an.solution->normalization->reference;
      }
      r["solution"] = std::move(s);
    });
    if (!ok_solution) return an;
  }

  if (opt.depth == Depth::Sensitivity) {
    const bool ok_sens = run("sensitivity", [&] {
      if (!an.solution)
        throw PreconditionError(
            "sensitivity needs a unique solution; the verdict does not certify one");
      an.sensitivity = sensitivity_sweep(*an.a, d, *an.solution, opt.functionals);
      const SensitivityResult& s = *an.sensitivity;
      Json cols = Json::array();
      for (std::size_t k = 0; k < s.parameter_count(); ++k)
        cols.push_back(ParameterIndex::from_flat(k, n).name());
      Json ja_cols(std::vector<Json>(cols.begin(), cols.begin() + static_cast<std::ptrdiff_t>(n * n)));
      r["parameters"] = cols;
      r["jacobian_a"] = {{"rows", econ.labels}, {"columns", ja_cols}, {"values", detail::matrix_json(s.jacobian_a)}};
      if (s.jacobian_d) {
        Json jd_cols(std::vector<Json>(cols.begin() + static_cast<std::ptrdiff_t>(n * n), cols.end()));
        r["jacobian_d"] = {{"rows", econ.labels}, {"columns", jd_cols}, {"values", detail::matrix_json(*s.jacobian_d)}};
      } else {
        r["jacobian_d"] = nullptr;
      }
      Json el = Json::array();
      for (std::size_t m = 0; m < n; ++m)
        el.push_back({{"variable", "x[" + econ.labels[m] + "]"},
                      {"kind", "sector"},
                      {"z0", s.x0[m]},
                      {"values", detail::optional_vec_json(s.elasticity_x[m])}});
      for (const FunctionalSensitivity& f : s.functionals)
        el.push_back({{"variable", f.name},
                      {"kind", "functional"},
                      {"weights", f.weights},
                      {"z0", f.z0},
                      {"gradient", f.gradient},
                      {"values", detail::optional_vec_json(f.elasticity)}});
      r["elasticities"] = std::move(el);
    });
    if (!ok_sens) return an;
  }
  r["completed"] = true;
  return an;
}

/// Graphviz text: one node per strongly connected component, labeled with
/// its sectors and spectral class; closures drawn with a double border.
inline std::string export_dot(const GraphFacts& facts, const SpectralClassification& sc,
                              const BlockTriangularForm& btf, const std::vector<std::string>& labels,
                              const std::vector<std::vector<std::size_t>>& condensation) {
  auto color = [](SpectralClass c) {
    switch (c) {
      case SpectralClass::BelowOne: return "palegreen";
      case SpectralClass::One: return "gold";
      case SpectralClass::AboveOne: return "salmon";
    }
    return "white";
  };
  std::ostringstream out;
  out << "digraph condensation {\n  rankdir=LR;\n  node [shape=box, style=filled];\n";
  for (std::size_t b = 0; b < btf.block_count(); ++b) {
    std::string members;
    for (std::size_t v : btf.block_vertices(b)) members += (members.empty() ? "" : ", ") + labels.at(v);
    out << "  B" << b + 1 << " [label=\"B" << b + 1 << ": {" << members << "}\\n"
        << to_string(sc.cls(b)) << "\", fillcolor=" << color(sc.cls(b));
    if (facts.is_closure[b]) out << ", peripheries=2";
    out << "];\n";
  }
  for (std::size_t b = 0; b < condensation.size(); ++b)
    for (std::size_t c : condensation[b]) out << "  B" << b + 1 << " -> B" << c + 1 << ";\n";
  out << "}\n";
  return out.str();
}

inline std::string export_dot(const Analysis& an, const std::vector<std::string>& labels) {
  if (!an.facts || !an.spectral || !an.btf || !an.scc)
    throw PreconditionError("structure and spectral stages did not complete");
  return export_dot(*an.facts, *an.spectral, *an.btf, labels, an.scc->condensation);
}

namespace detail {

inline std::string fmt(double v, int prec = 6) {
  std::ostringstream s;
  s << std::setprecision(prec) << v;
  return s.str();
}

inline std::string join(const Json& arr, const char* sep = ", ") {
  std::string out;
  for (const auto& e : arr) {
    if (!out.empty()) out += sep;
    out += e.is_string() ? e.get<std::string>() : e.is_number() ? fmt(e.get<double>()) : e.dump();
  }
  return out;
}

}  // namespace detail

/// Human-readable rendering of a report.
inline std::string render_text(const Json& r) {
  using detail::fmt;
  using detail::join;
  std::ostringstream o;
  const Json& in = r.at("input");
  o << "Sectors: " << join(in.at("labels")) << " (" << in.at("kind").get<std::string>() << ")\n";
  if (r.contains("mode")) o << "Mode: " << r.at("mode").get<std::string>() << "\n";
  const Json& t = r.at("tolerances");
  o << "Tolerances: spectral " << fmt(t.at("spectral").get<double>()) << ", support-eps "
    << fmt(t.at("support_eps").get<double>()) << ", normalization "
    << t.at("normalization").get<std::string>() << "\n";
  if (r.contains("productivity"))
    o << "Productive (leading minors of I - A positive): "
      << (r["productivity"]["productive"].get<bool>() ? "yes" : "no") << "\n";
  if (r.contains("blocks")) {
    o << "\nBlocks (" << r["blocks"].size() << "):\n";
    for (const Json& b : r["blocks"]) {
      o << "  B" << b["index"].get<std::size_t>() << " {" << join(b["sectors"]) << "}";
      if (b.contains("rho"))
        o << " rho=" << fmt(b["rho"].get<double>(), 10) << " " << b["class"].get<std::string>();
      if (!b["successors"].empty()) {
        std::string s;
        for (const auto& c : b["successors"]) s += (s.empty() ? "B" : ", B") + std::to_string(c.get<std::size_t>());
        o << " -> " << s;
      }
      if (b["closure"].get<bool>()) o << " [closure]";
      if (b["demand"].get<bool>()) o << " [demand]";
      o << "\n";
    }
  }
  if (r.contains("verdict")) {
    const Json& v = r["verdict"];
    auto yn = [](bool b) { return b ? "yes" : "no"; };
    auto line = [&](const std::string& label, bool value) {
      o << "  " << std::left << std::setw(40) << label << std::right << yn(value) << "\n";
    };
    o << "\nVerdict (" << v["mode"].get<std::string>() << "):\n";
    line("positive solution exists:", v["exists_meaningful"].get<bool>());
    line("nonnegative nontrivial solution exists:", v["exists_nonneg_nontrivial"].get<bool>());
    line(v["mode"] == "closed" ? "unique up to multiples:" : "unique:", v["unique"].get<bool>());
    if (!v["witness"].is_null()) o << "  witness: [" << join(v["witness"]) << "]\n";
    o << "\nCertificates:\n";
    for (const Json& c : r["certificates"]) {
      o << "  [" << (c["satisfied"].get<bool>() ? "ok  " : "FAIL") << "] " << c["condition"].get<std::string>();
      if (!c["block"].is_null()) o << " B" << c["block"].get<std::size_t>();
      o << ": " << c["reason"].get<std::string>() << "\n";
    }
  }
  if (r.contains("solution") && !r["solution"].is_null()) {
    const Json& s = r["solution"];
    o << "\nSolution x = [" << join(s["x"]) << "]";
    if (s.contains("normalization")) o << " (" << s["normalization"].get<std::string>() << ")";
    o << ", residual " << fmt(s["residual"].get<double>(), 3) << "\n";
  }
  if (r.contains("elasticities")) {
    const Json& cols = r["parameters"];
    o << "\nElasticities:\n  " << std::setw(12) << "parameter";
    for (const Json& e : r["elasticities"]) o << std::setw(14) << e["variable"].get<std::string>();
    o << "\n";
    for (std::size_t k = 0; k < cols.size(); ++k) {
      o << "  " << std::setw(12) << cols[k].get<std::string>();
      for (const Json& e : r["elasticities"]) {
        const Json& val = e["values"][k];
        o << std::setw(14) << (val.is_null() ? std::string("undefined") : fmt(val.get<double>(), 5));
      }
      o << "\n";
    }
  }
  if (!r.at("errors").empty()) {
    o << "\nErrors:\n";
    for (const Json& e : r["errors"])
      o << "  " << e["stage"].get<std::string>() << " (" << e["kind"].get<std::string>()
        << "): " << e["message"].get<std::string>() << "\n";
  }
  return o.str();
}

}  // namespace leontief
