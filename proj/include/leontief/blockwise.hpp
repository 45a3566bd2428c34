#pragma once

// Back substitution over a block upper triangular form. Shared by the
// witness construction in the classifier, the solver and the open-mode
// derivatives.

#include <cstddef>
#include <string>
#include <vector>

#include "leontief/graph.hpp"
#include "leontief/linalg.hpp"
#include "leontief/spectral.hpp"

namespace leontief {

/// Result of one sweep, in the permuted (block) order.
struct BlockSweep {
  Vec x;
  /// Largest |rhs| seen by a block that was set to zero or to a Perron
  /// multiple. Theory says it is zero whenever the sweep is legitimate.
  double forced_rhs = 0.0;
};

/// Solves (I - A)x = rhs blockwise, starting at the last block. BELOW_ONE
/// blocks are solved exactly; a ONE block b with weight[b] > 0 gets
/// weight[b] times its Perron vector; every other block gets 0.
inline BlockSweep block_back_substitute(const Matrix& permuted, const BlockTriangularForm& btf,
                                        const SpectralClassification& sc, const Vec& rhs,
                                        const std::vector<double>& weight) {
  const std::size_t n = permuted.rows();
  if (rhs.size() != n || weight.size() != btf.block_count())
    throw DimensionError("block sweep input size mismatch");
  BlockSweep out;
  out.x.assign(n, 0.0);
  for (std::size_t b = btf.block_count(); b-- > 0;) {
    const std::size_t lo = btf.block_begin(b), hi = btf.block_end(b), m = hi - lo;
    Vec r(m);
    for (std::size_t i = lo; i < hi; ++i) {
      double s = rhs[i];
      for (std::size_t j = hi; j < n; ++j) s += permuted(i, j) * out.x[j];
      r[i - lo] = s;
    }
    if (sc.cls(b) == SpectralClass::BelowOne) {
      const Vec xb = solve(lu_factor(identity_minus(diagonal_block(permuted, btf, b))), r);
      for (std::size_t i = 0; i < m; ++i) out.x[lo + i] = xb[i];
      continue;
    }
    out.forced_rhs = std::max(out.forced_rhs, norm_inf(r));
    if (weight[b] > 0.0) {
      if (!sc.blocks[b].perron)
        throw PreconditionError("block " + std::to_string(b + 1) + " has no Perron vector");
      const Vec& p = *sc.blocks[b].perron;
      for (std::size_t i = 0; i < m; ++i) out.x[lo + i] = weight[b] * p[i];
    }
  }
  return out;
}

/// LU factors of every diagonal block I - A_bb, reused for any number of
/// right-hand sides. Zeros in the rhs beyond a block stay exact zeros
/// above it, which is what makes derivative sparsity structural.
class BlockSolver {
 public:
  BlockSolver(Matrix permuted, const BlockTriangularForm& btf)
      : permuted_(std::move(permuted)), bounds_(btf.block_bounds) {
    factors_.reserve(btf.block_count());
    for (std::size_t b = 0; b < btf.block_count(); ++b) {
      factors_.push_back(
          lu_factor(identity_minus(permuted_.block(bounds_[b], bounds_[b], btf.block_size(b),
                                                   btf.block_size(b)))));
      if (factors_.back().singular)
        throw SingularMatrixError("diagonal block " + std::to_string(b + 1) +
                                  " of I - A is singular");
    }
  }

  /// x with (I - A)x = rhs, both in permuted order.
  Vec solve(const Vec& rhs) const {
    const std::size_t n = permuted_.rows();
    if (rhs.size() != n) throw DimensionError("right-hand side length mismatch");
    Vec x(n, 0.0);
    for (std::size_t b = factors_.size(); b-- > 0;) {
      const std::size_t lo = bounds_[b], hi = bounds_[b + 1];
      Vec r(hi - lo);
      bool nonzero = false;
      for (std::size_t i = lo; i < hi; ++i) {
        double s = rhs[i];
        for (std::size_t j = hi; j < n; ++j)
          if (x[j] != 0.0) s += permuted_(i, j) * x[j];
        r[i - lo] = s;
        nonzero = nonzero || s != 0.0;
      }
      if (!nonzero) continue;
      const Vec xb = leontief::solve(factors_[b], r);
      for (std::size_t i = lo; i < hi; ++i) x[i] = xb[i - lo];
    }
    return x;
  }

  const Matrix& permuted() const noexcept { return permuted_; }

 private:
  Matrix permuted_;
  std::vector<std::size_t> bounds_;
  std::vector<LuFactors> factors_;
};

}  // namespace leontief
