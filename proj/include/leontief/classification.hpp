#pragma once

// Existence and uniqueness of nonnegative solutions of (I - A)x = d,
// decided on the block triangular form, with one certificate per tested
// condition so every verdict can be audited block by block.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "leontief/blockwise.hpp"
#include "leontief/economy.hpp"
#include "leontief/errors.hpp"
#include "leontief/graph.hpp"
#include "leontief/linalg.hpp"
#include "leontief/spectral.hpp"

namespace leontief {

enum class Mode { Closed, Open };

inline std::string to_string(Mode m) { return m == Mode::Closed ? "closed" : "open"; }

/// A = M * C with C diagonal: a(i, j) = m(i, j) * c[j].
struct MCDecomposition {
  Matrix transactions;
  Vec c;
};

/// Technical coefficients from a transaction table: c_jj is the inverse of
/// sector j's total output (row sum plus final demand).
inline std::pair<TechMatrix, MCDecomposition> tech_coeffs_from_transactions(
    const Matrix& m, const DemandVector& d) {
  if (!m.is_square()) throw DimensionError("transaction matrix must be square");
  const std::size_t n = m.rows();
  if (d.size() != n) throw DimensionError("demand length does not match transaction matrix");
  MCDecomposition mc{m, Vec(n)};
  for (std::size_t i = 0; i < n; ++i) {
    double total = d[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (!(m(i, j) >= 0.0) || !std::isfinite(m(i, j)))
        throw DomainError("transaction (" + std::to_string(i + 1) + ", " + std::to_string(j + 1) +
                          ") is negative or not finite");
      total += m(i, j);
    }
    if (!(total > 0.0))
      throw DomainError("sector " + std::to_string(i + 1) +
                        " has zero total output (no sales and no final demand)");
    mc.c[i] = 1.0 / total;
  }
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = m(i, j) * mc.c[j];
  return {TechMatrix(std::move(a)), std::move(mc)};
}

/// Inverse direction: given a strictly positive solution x, M = A diag(x)
/// and C = diag(1/x).
inline MCDecomposition decompose_mc(const TechMatrix& a, const Vec& x, const DemandVector& d) {
  const std::size_t n = a.size();
  if (x.size() != n || d.size() != n) throw DimensionError("decompose_mc size mismatch");
  for (double v : x)
    if (!(v > 0.0)) throw DomainError("decompose_mc needs a strictly positive solution");
  Vec r = identity_minus(a.matrix()) * x;
  for (std::size_t i = 0; i < n; ++i) r[i] -= d[i];
  const double res = norm_inf(r);
  if (res > 1e-8 * std::max(1.0, norm_inf(x)))
    throw ConsistencyError("x does not solve (I - A)x = d (residual " + std::to_string(res) + ")",
                           res);
  MCDecomposition mc{Matrix(n, n), Vec(n)};
  for (std::size_t i = 0; i < n; ++i) {
    mc.c[i] = 1.0 / x[i];
    for (std::size_t j = 0; j < n; ++j) mc.transactions(i, j) = a(i, j) * x[j];
  }
  return mc;
}

struct Productivity {
  bool productive = false;
  /// Leading principal minors of I - A.
  Vec minors;
};

/// Hawkins-Simon test. A minor whose factorization is flagged singular
/// counts as zero even if rounding left it a tiny positive number.
inline Productivity is_productive(const TechMatrix& a) {
  const Matrix b = identity_minus(a.matrix());
  Productivity p{true, Vec(a.size())};
  for (std::size_t k = 1; k <= a.size(); ++k) {
    const LuFactors f = lu_factor(b.block(0, 0, k, k));
    p.minors[k - 1] = determinant(f);
    if (f.singular || !(p.minors[k - 1] > 0.0)) p.productive = false;
  }
  return p;
}

struct Certificate {
  /// closed-meaningful, closed-nonnegative, closed-unique, open-meaningful,
  /// open-nonnegative or open-unique.
  std::string condition;
  /// 0-based block in the canonical form; empty for whole-matrix checks.
  std::optional<std::size_t> block;
  std::optional<std::size_t> other_block;
  bool satisfied = false;
  std::string reason;
};

struct AnalysisVerdict {
  Mode mode = Mode::Closed;
  /// Strictly positive solution exists.
  bool exists_meaningful = false;
  bool exists_nonneg_nontrivial = false;
  /// Closed: up to positive multiples. Open: exactly one.
  bool unique = false;
  /// Original sector order. Closed witnesses have unit 2-norm.
  std::optional<Vec> witness;
  std::vector<Certificate> certificates;
  /// ONE blocks none of whose ancestors has rho >= 1; each spans a ray of
  /// the solution cone.
  std::vector<std::size_t> free_blocks;
  /// Open mode: blocks carrying positive demand.
  std::vector<std::size_t> demand_blocks;
};

namespace detail {

inline std::string block_name(std::size_t b) { return "B" + std::to_string(b + 1); }

/// "A_{r,c}" with 1-based block indices.
inline std::string a_block(std::size_t r, std::size_t c) {
  return "A_{" + std::to_string(r + 1) + "," + std::to_string(c + 1) + "}";
}

/// "A_{b,j} = 0 for j != b"
inline std::string zero_row_text(std::size_t b) {
  const std::string i = std::to_string(b + 1);
  return "A_{" + i + ",j} = 0 for j != " + i;
}

inline std::string rho_text(const SpectralClassification& sc, std::size_t b) {
  const std::string r = "rho(" + a_block(b, b) + ")";
  switch (sc.cls(b)) {
    case SpectralClass::One: return r + " = 1";
    case SpectralClass::BelowOne: return r + " = " + std::to_string(sc.blocks[b].rho) + " < 1";
    case SpectralClass::AboveOne: return r + " = " + std::to_string(sc.blocks[b].rho) + " > 1";
  }
  return r;
}

/// Block-level structure shared by both modes.
struct BlockStructure {
  Matrix permuted;
  /// succ[b]: blocks c != b with A_bc != 0.
  std::vector<std::vector<std::size_t>> succ;
  /// reach[b][c]: b reaches c along one or more condensation edges.
  std::vector<std::vector<bool>> reach;
};

inline BlockStructure block_structure(const TechMatrix& a, const BlockTriangularForm& btf,
                                      double support_eps) {
  if (btf.perm.size() != a.size()) throw DimensionError("block form does not match matrix");
  BlockStructure s;
  s.permuted = permute_similarity(a.matrix(), btf.perm);
  const std::size_t k = btf.block_count();
  s.succ.assign(k, {});
  for (std::size_t b = 0; b < k; ++b)
    for (std::size_t c = 0; c < k; ++c) {
      if (c == b) continue;
      bool nonzero = false;
      for (std::size_t i = btf.block_begin(b); i < btf.block_end(b) && !nonzero; ++i)
        for (std::size_t j = btf.block_begin(c); j < btf.block_end(c); ++j)
          if (s.permuted(i, j) > support_eps) {
            nonzero = true;
            break;
          }
      if (nonzero) {
        if (c < b) throw PreconditionError("matrix is not block upper triangular in this form");
        s.succ[b].push_back(c);
      }
    }
  s.reach = condensation_reachability(s.succ);
  return s;
}

inline bool is_direct(const BlockStructure& s, std::size_t from, std::size_t to) {
  return std::find(s.succ[from].begin(), s.succ[from].end(), to) != s.succ[from].end();
}

inline std::string feed_text(const BlockStructure& s, std::size_t from, std::size_t to) {
  if (is_direct(s, from, to)) return a_block(from, to) + " != 0";
  return block_name(from) + " reaches " + block_name(to) + " through intermediate blocks";
}

/// First block j (smallest index) with rho >= 1 that reaches b.
inline std::optional<std::size_t> critical_ancestor(const BlockStructure& s,
                                                    const SpectralClassification& sc,
                                                    std::size_t b) {
  for (std::size_t j = 0; j < b; ++j)
    if (s.reach[j][b] && sc.cls(j) != SpectralClass::BelowOne) return j;
  return std::nullopt;
}

inline Vec finish_witness(const BlockSweep& sweep, const BlockTriangularForm& btf, Mode mode) {
  Vec x = btf.perm.scatter(sweep.x);
  for (double& v : x)
    if (v < 0.0 && v > -1e-14) v = 0.0;
  if (mode == Mode::Closed) {
    const double nrm = norm2(x);
    for (double& v : x) v /= nrm;
  }
  return x;
}

}  // namespace detail

/// Verdict for (I - A)x = 0. sc and btf must come from `a` (with the same
/// support threshold).
inline AnalysisVerdict classify_closed(const TechMatrix& a, const SpectralClassification& sc,
                                       const BlockTriangularForm& btf, double support_eps = 0.0) {
  using detail::block_name;
  const detail::BlockStructure s = detail::block_structure(a, btf, support_eps);
  const std::size_t k = btf.block_count();
  AnalysisVerdict v;
  v.mode = Mode::Closed;

  // Meaningful: every rho <= 1, some rho = 1, and rho(A_ii) = 1 iff block row i
  // is zero off the diagonal.
  bool ec3 = true, any_one = false;
  for (std::size_t b = 0; b < k; ++b) {
    Certificate c{"closed-meaningful", b, std::nullopt, true, {}};
    const bool closure = s.succ[b].empty();
    switch (sc.cls(b)) {
      case SpectralClass::AboveOne:
        c.satisfied = false;
        c.reason = detail::rho_text(sc, b);
        break;
      case SpectralClass::One:
        any_one = true;
        if (closure) {
          c.reason = detail::rho_text(sc, b) + " and " + detail::zero_row_text(b);
        } else {
          c.satisfied = false;
          c.other_block = s.succ[b].front();
          c.reason = detail::rho_text(sc, b) + " but " + detail::feed_text(s, b, s.succ[b].front());
        }
        break;
      case SpectralClass::BelowOne:
        if (closure) {
          c.satisfied = false;
          c.reason = detail::rho_text(sc, b) + " and " + detail::zero_row_text(b) + ", so x on " +
                     block_name(b) + " is forced to 0";
        } else {
          c.other_block = s.succ[b].front();
          c.reason = detail::rho_text(sc, b) + " and " + detail::feed_text(s, b, s.succ[b].front());
        }
        break;
    }
    ec3 = ec3 && c.satisfied;
    v.certificates.push_back(std::move(c));
  }
  v.certificates.push_back({"closed-meaningful", std::nullopt, std::nullopt, any_one,
                            any_one ? "some diagonal block has rho = 1"
                                    : "no diagonal block has rho = 1"});
  v.exists_meaningful = ec3 && any_one;

  // Nonnegative: a ONE block none of whose ancestors has rho >= 1.
  for (std::size_t b = 0; b < k; ++b) {
    if (sc.cls(b) != SpectralClass::One) continue;
    Certificate c{"closed-nonnegative", b, std::nullopt, true, {}};
    if (const auto j = detail::critical_ancestor(s, sc, b)) {
      c.satisfied = false;
      c.other_block = *j;
      c.reason = block_name(*j) + " has rho >= 1 and " + detail::feed_text(s, *j, b);
    } else {
      c.reason = detail::rho_text(sc, b) + " and every block feeding it has rho < 1";
      v.free_blocks.push_back(b);
    }
    v.certificates.push_back(std::move(c));
  }
  v.exists_nonneg_nontrivial = !v.free_blocks.empty();
  if (!any_one)
    v.certificates.push_back(
        {"closed-nonnegative", std::nullopt, std::nullopt, false, "no diagonal block has rho = 1"});

  // Unique: exactly one such block.
  {
    std::string list;
    for (std::size_t b : v.free_blocks) list += (list.empty() ? "" : ", ") + block_name(b);
    v.unique = v.free_blocks.size() == 1;
    v.certificates.push_back(
        {"closed-unique", v.free_blocks.size() == 1 ? std::optional<std::size_t>(v.free_blocks.front())
                                          : std::nullopt,
         std::nullopt, v.unique,
         std::to_string(v.free_blocks.size()) + " block(s) satisfy the nonnegative condition" +
             (list.empty() ? "" : ": " + list)});
  }

  if (v.exists_nonneg_nontrivial) {
    // Every admissible generator at once: positive whenever a positive
    // solution exists, and independent of how sectors are numbered.
    std::vector<double> weight(k, 0.0);
    for (std::size_t b : v.free_blocks) weight[b] = 1.0;
    v.witness = detail::finish_witness(
        block_back_substitute(s.permuted, btf, sc, Vec(a.size(), 0.0), weight), btf, Mode::Closed);
  }
  return v;
}

/// Verdict for (I - A)x = d with d != 0.
inline AnalysisVerdict classify_open(const TechMatrix& a, const DemandVector& d,
                                     const SpectralClassification& sc,
                                     const BlockTriangularForm& btf, double support_eps = 0.0) {
  using detail::block_name;
  if (d.size() != a.size()) throw DimensionError("demand length does not match matrix");
  if (d.is_zero())
    throw PreconditionError("open analysis needs a nonzero demand vector; use closed mode for d = 0");
  const detail::BlockStructure s = detail::block_structure(a, btf, support_eps);
  const std::size_t k = btf.block_count();
  const Vec dp = btf.perm.gather(d.values());
  AnalysisVerdict v;
  v.mode = Mode::Open;

  std::vector<bool> in_j(k, false);
  for (std::size_t b = 0; b < k; ++b)
    for (std::size_t i = btf.block_begin(b); i < btf.block_end(b); ++i)
      if (dp[i] > 0.0) in_j[b] = true;
  for (std::size_t b = 0; b < k; ++b)
    if (in_j[b]) v.demand_blocks.push_back(b);

  // Meaningful: every rho <= 1 and rho(A_ii) = 1 iff d_i = 0 and A_ij = 0 (j != i).
  bool eo3 = true;
  for (std::size_t b = 0; b < k; ++b) {
    Certificate c{"open-meaningful", b, std::nullopt, true, {}};
    const bool closure = s.succ[b].empty();
    const std::string idx = std::to_string(b + 1);
    switch (sc.cls(b)) {
      case SpectralClass::AboveOne:
        c.satisfied = false;
        c.reason = detail::rho_text(sc, b);
        break;
      case SpectralClass::One:
        if (in_j[b]) {
          c.satisfied = false;
          c.reason = detail::rho_text(sc, b) + " but d_" + idx + " != 0";
        } else if (!closure) {
          c.satisfied = false;
          c.other_block = s.succ[b].front();
          c.reason = detail::rho_text(sc, b) + " but " + detail::feed_text(s, b, s.succ[b].front());
        } else {
          c.reason = detail::rho_text(sc, b) + ", d_" + idx + " = 0 and " + detail::zero_row_text(b);
        }
        break;
      case SpectralClass::BelowOne:
        if (!in_j[b] && closure) {
          c.satisfied = false;
          c.reason = detail::rho_text(sc, b) + " with d_" + idx + " = 0 and " + detail::zero_row_text(b) +
                     ", so x on " + block_name(b) + " is forced to 0";
        } else {
          c.reason = detail::rho_text(sc, b) + (in_j[b] ? " and d_" + idx + " != 0"
                                                        : " and " + detail::feed_text(
                                                                        s, b, s.succ[b].front()));
          if (!in_j[b]) c.other_block = s.succ[b].front();
        }
        break;
    }
    eo3 = eo3 && c.satisfied;
    v.certificates.push_back(std::move(c));
  }
  v.exists_meaningful = eo3;

  // Nonnegative: demand blocks have rho < 1 and no block with rho >= 1 feeds any
  // demand block.
  bool eo6 = true;
  for (std::size_t b = 0; b < k; ++b) {
    const std::string idx = std::to_string(b + 1);
    if (in_j[b]) {
      Certificate c{"open-nonnegative", b, std::nullopt, sc.cls(b) == SpectralClass::BelowOne, {}};
      c.reason = detail::rho_text(sc, b) + " on a block with d_" + idx + " != 0";
      eo6 = eo6 && c.satisfied;
      v.certificates.push_back(std::move(c));
    } else if (sc.cls(b) != SpectralClass::BelowOne) {
      Certificate c{"open-nonnegative", b, std::nullopt, true, {}};
      for (std::size_t j : v.demand_blocks)
        if (s.reach[b][j]) {
          c.satisfied = false;
          c.other_block = j;
          c.reason = detail::rho_text(sc, b) + " and " + detail::feed_text(s, b, j) +
                     ", which has positive demand";
          break;
        }
      if (c.satisfied)
        c.reason = detail::rho_text(sc, b) + " and " + block_name(b) +
                   " does not reach any block with positive demand";
      eo6 = eo6 && c.satisfied;
      v.certificates.push_back(std::move(c));
    }
  }
  v.exists_nonneg_nontrivial = eo6;

  // Unique: on top of the nonnegative test, every ONE block without demand is fed by a block
  // with rho >= 1, which pins its Perron component to zero.
  bool uo2 = eo6;
  v.certificates.push_back({"open-unique", std::nullopt, std::nullopt, eo6,
                            eo6 ? "the nonnegative conditions hold" : "the nonnegative conditions fail"});
  for (std::size_t b = 0; b < k; ++b) {
    if (in_j[b] || sc.cls(b) != SpectralClass::One) continue;
    Certificate c{"open-unique", b, std::nullopt, true, {}};
    if (const auto j = detail::critical_ancestor(s, sc, b)) {
      c.other_block = *j;
      c.reason = detail::rho_text(sc, b) + " and " + block_name(*j) + " with rho >= 1 feeds it (" +
                 detail::feed_text(s, *j, b) + ")";
    } else {
      c.satisfied = false;
      c.reason = detail::rho_text(sc, b) +
                 " and no block with rho >= 1 feeds it; any multiple of its Perron vector can be "
                 "added";
      v.free_blocks.push_back(b);
    }
    uo2 = uo2 && c.satisfied;
    v.certificates.push_back(std::move(c));
  }
  v.unique = uo2;

  if (v.exists_nonneg_nontrivial) {
    std::vector<double> weight(k, 0.0);
    if (v.exists_meaningful)
      for (std::size_t b : v.free_blocks) weight[b] = 1.0;
    v.witness =
        detail::finish_witness(block_back_substitute(s.permuted, btf, sc, dp, weight), btf, Mode::Open);
  }
  return v;
}

}  // namespace leontief
