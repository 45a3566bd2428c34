#pragma once

// Perron roots of the diagonal blocks and the BELOW_ONE / ONE / ABOVE_ONE
// classes that the existence conditions are stated in.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "leontief/economy.hpp"
#include "leontief/errors.hpp"
#include "leontief/graph.hpp"
#include "leontief/linalg.hpp"

namespace leontief {

inline constexpr double kDefaultSpectralTolerance = 1e-9;

enum class SpectralClass { BelowOne, One, AboveOne };

inline std::string to_string(SpectralClass c) {
  switch (c) {
    case SpectralClass::BelowOne: return "BELOW_ONE";
    case SpectralClass::One: return "ONE";
    case SpectralClass::AboveOne: return "ABOVE_ONE";
  }
  return "?";
}

inline SpectralClass classify_radius(double rho, double tolerance) {
  if (std::abs(rho - 1.0) <= tolerance) return SpectralClass::One;
  return rho < 1.0 ? SpectralClass::BelowOne : SpectralClass::AboveOne;
}

/// Perron root of an irreducible block with its Collatz-Wielandt bracket
/// lower <= rho <= upper and the positive unit eigenvector.
struct PerronEstimate {
  double rho = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  Vec vector;
  std::size_t iterations = 0;
};

namespace detail {

/// Relative bracket width at which the iteration stops. Ratios of sums of
/// nonnegative terms carry only rounding error, so this is reachable.
inline constexpr double kBracketStop = 1e-13;
/// Largest accepted bracket width on the unscaled block.
inline constexpr double kBracketAccept = 1e-9;

inline bool is_irreducible(const Matrix& block) {
  return block.rows() == 1 || scc(build_digraph(TechMatrix(block))).count() == 1;
}

}  // namespace detail

/// Power iteration on B + delta*I with delta = half the current
/// Collatz-Wielandt upper bound. The shift makes periodic blocks primitive;
/// tying it to the bound keeps the convergence ratio near 1/3 regardless
/// of the block's magnitude. Stops on the bracket, never on vector change.
inline PerronEstimate estimate_perron(const Matrix& block) {
  if (!block.is_square() || block.rows() == 0) throw DimensionError("block must be square");
  const std::size_t n = block.rows();
  PerronEstimate est;
  if (n == 1) {
    est.rho = est.lower = est.upper = block(0, 0);
    est.vector = {1.0};
    return est;
  }

  Vec v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  Vec u(n);
  const std::size_t cap = 100 * n * n;
  double lo = 0.0, hi = 0.0;
  for (std::size_t it = 1; it <= cap; ++it) {
    u = block * v;
    lo = u[0] / v[0];
    hi = lo;
    for (std::size_t i = 1; i < n; ++i) {
      const double r = u[i] / v[i];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    est.iterations = it;
    if (hi == 0.0) break;  // zero block
    if (hi - lo <= detail::kBracketStop * hi) break;
    const double shift = 0.5 * hi;
    for (std::size_t i = 0; i < n; ++i) u[i] += shift * v[i];
    const double nrm = norm2(u);
    for (std::size_t i = 0; i < n; ++i) v[i] = u[i] / nrm;
  }
  est.lower = lo;
  est.upper = hi;
  est.rho = 0.5 * (lo + hi);
  est.vector = std::move(v);
  if (hi - lo > detail::kBracketAccept)
    throw ConvergenceError("power iteration did not converge within " + std::to_string(cap) +
                               " iterations",
                           lo, hi);
  return est;
}

/// Spectral radius of a nonnegative square block. Reducible input is split
/// into its strongly connected components and the maximum is taken.
inline double spectral_radius(const Matrix& block, bool irreducible) {
  if (!block.is_square() || block.rows() == 0) throw DimensionError("block must be square");
  if (irreducible || block.rows() == 1) return estimate_perron(block).rho;
  const TechMatrix a(block);
  const SccDecomposition d = scc(build_digraph(a));
  double rho = 0.0;
  for (const auto& members : d.components) {
    Matrix sub(members.size(), members.size());
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = 0; j < members.size(); ++j) sub(i, j) = block(members[i], members[j]);
    rho = std::max(rho, estimate_perron(sub).rho);
  }
  return rho;
}

/// Positive unit eigenvector of an irreducible block whose Perron root is
/// 1 within `tolerance`.
inline Vec perron_vector(const Matrix& block, double tolerance = kDefaultSpectralTolerance) {
  if (!detail::is_irreducible(block))
    throw PreconditionError("Perron vector requested for a reducible block");
  PerronEstimate est = estimate_perron(block);
  if (classify_radius(est.rho, tolerance) != SpectralClass::One)
    throw PreconditionError("Perron vector requested for a block with rho = " +
                            std::to_string(est.rho) + ", not 1");
  for (double v : est.vector)
    if (!(v > 0.0)) throw ConsistencyError("Perron vector has a nonpositive entry", v);
  return est.vector;
}

struct BlockSpectrum {
  double rho = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  SpectralClass cls = SpectralClass::BelowOne;
  /// Present iff cls == One; ordered like the block's rows in the form.
  std::optional<Vec> perron;
};

struct SpectralClassification {
  double tolerance = kDefaultSpectralTolerance;
  std::vector<BlockSpectrum> blocks;
  /// max over blocks
  double rho = 0.0;
  /// Original sector indices, ascending.
  std::vector<std::size_t> below_one;
  std::vector<std::size_t> one;
  std::vector<std::size_t> above_one;

  SpectralClass cls(std::size_t b) const { return blocks[b].cls; }
};

inline Matrix diagonal_block(const Matrix& permuted, const BlockTriangularForm& btf,
                             std::size_t b) {
  return permuted.block(btf.block_begin(b), btf.block_begin(b), btf.block_size(b),
                        btf.block_size(b));
}

inline SpectralClassification classify_blocks(const BlockTriangularForm& btf, const TechMatrix& a,
                                              double tolerance = kDefaultSpectralTolerance) {
  if (!(tolerance > 0.0 && tolerance <= 0.1))
    throw DomainError("spectral tolerance must lie in (0, 0.1]");
  if (btf.perm.size() != a.size()) throw DimensionError("block form does not match matrix");
  const Matrix permuted = permute_similarity(a.matrix(), btf.perm);
  SpectralClassification sc;
  sc.tolerance = tolerance;
  sc.blocks.resize(btf.block_count());
  for (std::size_t b = 0; b < btf.block_count(); ++b) {
    PerronEstimate est;
    try {
      est = estimate_perron(diagonal_block(permuted, btf, b));
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("block " + std::to_string(b + 1) + ": " + e.what(), e.lower(),
                             e.upper());
    }
    BlockSpectrum& bs = sc.blocks[b];
    bs.rho = est.rho;
    bs.lower = est.lower;
    bs.upper = est.upper;
    bs.cls = classify_radius(est.rho, tolerance);
    if (bs.cls == SpectralClass::One) {
      for (double v : est.vector)
        if (!(v > 0.0))
          throw ConsistencyError("block " + std::to_string(b + 1) +
                                     ": Perron vector has a nonpositive entry",
                                 v);
      bs.perron = std::move(est.vector);
    }
    sc.rho = std::max(sc.rho, bs.rho);
    auto& bucket = bs.cls == SpectralClass::BelowOne ? sc.below_one
                   : bs.cls == SpectralClass::One    ? sc.one
                                                     : sc.above_one;
    for (std::size_t v : btf.block_vertices(b)) bucket.push_back(v);
  }
  std::sort(sc.below_one.begin(), sc.below_one.end());
  std::sort(sc.one.begin(), sc.one.end());
  std::sort(sc.above_one.begin(), sc.above_one.end());
  return sc;
}

}  // namespace leontief
