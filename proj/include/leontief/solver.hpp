#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "leontief/blockwise.hpp"
#include "leontief/classification.hpp"
#include "leontief/economy.hpp"
#include "leontief/errors.hpp"
#include "leontief/graph.hpp"
#include "leontief/linalg.hpp"
#include "leontief/spectral.hpp"

namespace leontief {

enum class NormalizationKind { Unit, MatchScale };

/// How a closed-mode solution is scaled: unit 2-norm, or the 2-norm of a
/// reference vector (typically observed total output).
struct Normalization {
  NormalizationKind kind = NormalizationKind::Unit;
  Vec reference;

  static Normalization unit() { return {}; }
  static Normalization match_scale(Vec reference) {
    return {NormalizationKind::MatchScale, std::move(reference)};
  }
  double target_norm() const { return kind == NormalizationKind::Unit ? 1.0 : norm2(reference); }
};

struct Solution {
  Vec x;
  Mode mode = Mode::Closed;
  /// Closed mode only.
  std::optional<Normalization> normalization;
  /// ||(I - A)x - d||_inf
  double residual = 0.0;
};

namespace detail {

inline constexpr double kResidualTolerance = 1e-8;

inline double residual_inf(const TechMatrix& a, const Vec& x, const Vec& d) {
  Vec r = identity_minus(a.matrix()) * x;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= d[i];
  return norm_inf(r);
}

/// Clears rounding-level negatives; anything larger is a real sign error.
inline void clamp_nonnegative(Vec& x) {
  const double floor = 1e-12 * std::max(1.0, norm_inf(x));
  for (double& v : x) {
    if (v >= 0.0) continue;
    if (v < -floor) throw ConsistencyError("solution has a negative entry " + std::to_string(v), v);
    v = 0.0;
  }
}

}  // namespace detail

/// Normalized solution of (I - A)x = 0 when it is unique up to multiples:
/// the distinguished ONE block carries its Perron vector, BELOW_ONE blocks
/// feeding it are back-substituted, everything else is zero.
inline Solution solve_closed(const TechMatrix& a, const AnalysisVerdict& verdict,
                             const SpectralClassification& sc, const BlockTriangularForm& btf,
                             const Normalization& norm = Normalization::unit()) {
  if (verdict.mode != Mode::Closed) throw PreconditionError("solve_closed needs a closed verdict");
  if (!verdict.exists_nonneg_nontrivial || !verdict.unique || verdict.free_blocks.size() != 1)
    throw PreconditionError(
        "closed system has no unique nonnegative solution up to multiples; the normalized "
        "solution is not a single point");
  if (norm.kind == NormalizationKind::MatchScale && norm.reference.size() != a.size())
    throw DimensionError("normalization reference has the wrong length");
  const std::size_t n = a.size();
  std::vector<double> weight(btf.block_count(), 0.0);
  weight[verdict.free_blocks.front()] = 1.0;
  const BlockSweep sweep =
      block_back_substitute(permute_similarity(a.matrix(), btf.perm), btf, sc, Vec(n, 0.0), weight);

  Solution s;
  s.mode = Mode::Closed;
  s.normalization = norm;
  s.x = btf.perm.scatter(sweep.x);
  detail::clamp_nonnegative(s.x);
  const double nrm = norm2(s.x);
  for (double& v : s.x) v /= nrm;
  const double unit_residual = detail::residual_inf(a, s.x, Vec(n, 0.0));
  if (unit_residual > detail::kResidualTolerance)
    throw ConsistencyError("closed solution residual " + std::to_string(unit_residual) +
                               " exceeds tolerance",
                           unit_residual);
  const double target = norm.target_norm();
  for (double& v : s.x) v *= target;
  s.residual = detail::residual_inf(a, s.x, Vec(n, 0.0));
  return s;
}

/// The unique nonnegative solution of (I - A)x = d, built block by block
/// from the last block of the form.
inline Solution solve_open(const TechMatrix& a, const DemandVector& d,
                           const AnalysisVerdict& verdict, const SpectralClassification& sc,
                           const BlockTriangularForm& btf) {
  if (verdict.mode != Mode::Open) throw PreconditionError("solve_open needs an open verdict");
  if (!verdict.exists_nonneg_nontrivial || !verdict.unique)
    throw PreconditionError("open system has no unique nonnegative solution");
  const std::vector<double> weight(btf.block_count(), 0.0);
  const BlockSweep sweep = block_back_substitute(permute_similarity(a.matrix(), btf.perm), btf, sc,
                                                 btf.perm.gather(d.values()), weight);
  Solution s;
  s.mode = Mode::Open;
  s.x = btf.perm.scatter(sweep.x);
  detail::clamp_nonnegative(s.x);
  s.residual = detail::residual_inf(a, s.x, d.values());
  const double bound = detail::kResidualTolerance * (1.0 + norm_inf(d.values()));
  if (s.residual > bound)
    throw ConsistencyError("open solution residual " + std::to_string(s.residual) +
                               " exceeds bound " + std::to_string(bound) +
                               " although the verdict certifies uniqueness",
                           s.residual);
  return s;
}

}  // namespace leontief
