#include <gtest/gtest.h>

#include <cmath>

#include "leontief/classification.hpp"
#include "leontief/errors.hpp"
#include "leontief/solver.hpp"
#include "oracles.hpp"

using namespace leontief;

namespace {

struct Pipeline {
  TechMatrix a;
  BlockTriangularForm btf;
  SpectralClassification sc;
  AnalysisVerdict verdict;
};

Pipeline closed(const TechMatrix& a) {
  Pipeline p{a, block_triangular_form(a), {}, {}};
  p.sc = classify_blocks(p.btf, a);
  p.verdict = classify_closed(a, p.sc, p.btf);
  return p;
}

Pipeline open(const TechMatrix& a, const DemandVector& d) {
  Pipeline p{a, block_triangular_form(a), {}, {}};
  p.sc = classify_blocks(p.btf, a);
  p.verdict = classify_open(a, d, p.sc, p.btf);
  return p;
}

const TechMatrix kClosedA{{25.0 / 100, 20.0 / 50, 55.0 / 300},
                          {14.0 / 100, 6.0 / 50, 30.0 / 300},
                          {80.0 / 100, 180.0 / 50, 40.0 / 300}};

}  // namespace

TEST(SolveClosed, MatchTotalReproducesObservedOutput) {
  const Pipeline p = closed(kClosedA);
  const Solution s = solve_closed(p.a, p.verdict, p.sc, p.btf, Normalization::match_scale({100, 50, 300}));
  EXPECT_NEAR(s.x[0], 100, 1e-6);
  EXPECT_NEAR(s.x[1], 50, 1e-6);
  EXPECT_NEAR(s.x[2], 300, 1e-6);
  EXPECT_LE(s.residual, 1e-8 * (1 + 0));
}

TEST(SolveClosed, HandExamples) {
  const Pipeline p1 = closed(TechMatrix{{1, 0.2}, {0, 0.5}});
  const Solution s1 = solve_closed(p1.a, p1.verdict, p1.sc, p1.btf);
  EXPECT_NEAR(s1.x[0], 1.0, 1e-15);
  EXPECT_EQ(s1.x[1], 0.0);

  const Pipeline p2 = closed(TechMatrix{{0.5, 0.2}, {0, 1}});
  const Solution s2 = solve_closed(p2.a, p2.verdict, p2.sc, p2.btf);
  EXPECT_NEAR(s2.x[0], 0.4 / std::sqrt(1.16), 1e-14);
  EXPECT_NEAR(s2.x[1], 1.0 / std::sqrt(1.16), 1e-14);
}

TEST(SolveClosed, RefusesNonUnique) {
  const Pipeline p = closed(TechMatrix{{1, 0}, {0, 1}});
  EXPECT_THROW(solve_closed(p.a, p.verdict, p.sc, p.btf), PreconditionError);
  const Pipeline q = closed(TechMatrix{{0.5}});
  EXPECT_THROW(solve_closed(q.a, q.verdict, q.sc, q.btf), PreconditionError);
}

TEST(SolveClosed, ScaleProperty) {
  const Pipeline p = closed(kClosedA);
  const Solution u = solve_closed(p.a, p.verdict, p.sc, p.btf);
  const Solution m = solve_closed(p.a, p.verdict, p.sc, p.btf, Normalization::match_scale({3, 4, 12}));
  EXPECT_NEAR(norm2(u.x), 1.0, 1e-14);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(m.x[i] / u.x[i], 13.0, 13.0 * 1e-12);
}

TEST(SolveOpen, HandExamples) {
  const Pipeline z = open(TechMatrix(Matrix(2, 2)), DemandVector{1, 2});
  EXPECT_EQ(solve_open(z.a, DemandVector{1, 2}, z.verdict, z.sc, z.btf).x, (Vec{1, 2}));

  const Pipeline p = open(TechMatrix{{0.5, 0.2}, {0, 0.4}}, DemandVector{0, 1});
  const Solution s = solve_open(p.a, DemandVector{0, 1}, p.verdict, p.sc, p.btf);
  EXPECT_NEAR(s.x[1], 1 / 0.6, 1e-15);
  EXPECT_NEAR(s.x[0], 2.0 / 3, 1e-15);
}

TEST(SolveOpen, OpenExampleTransactions) {
  const Matrix m{{174, 255, 347, 44}, {87, 102, 139, 132}, {87, 51, 70, 88}, {87, 51, 70, 132}};
  const DemandVector d{50, 50, 400, 100};
  const TechMatrix a = tech_coeffs_from_transactions(m, d).first;
  const Pipeline p = open(a, d);
  const Solution s = solve_open(a, d, p.verdict, p.sc, p.btf);
  const Vec ref{870, 510, 696, 440};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(s.x[i], ref[i], 1e-9);
}

TEST(SolveOpen, RoundedMatrixWithinTwoPercent) {
  const TechMatrix a{{0.2, 0.5, 0.5, 0.1}, {0.1, 0.2, 0.2, 0.3}, {0.1, 0.1, 0.1, 0.2}, {0.1, 0.1, 0.1, 0.3}};
  const DemandVector d{50, 50, 400, 100};
  const Pipeline p = open(a, d);
  const Solution s = solve_open(a, d, p.verdict, p.sc, p.btf);
  const Vec ref{870, 510, 696, 440};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(s.x[i], ref[i], 0.02 * ref[i]);
}

TEST(SolveOpen, RefusesNonUnique) {
  const Pipeline p = open(TechMatrix{{1, 0}, {0, 0.5}}, DemandVector{0, 1});
  EXPECT_THROW(solve_open(p.a, DemandVector{0, 1}, p.verdict, p.sc, p.btf), PreconditionError);
}

// Residual bound, agreement with a monolithic dense solve, and permutation
// invariance over random productive instances.
TEST(SolverProperty, RandomProductive) {
  oracle::Rng rng(31);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = rng.index(1, 30);
    const Matrix m = oracle::sparse_nonneg(rng, n, rng.uniform(0.05, 0.5), 10.0);
    Vec d(n);
    for (double& v : d) v = rng.chance(0.7) ? rng.uniform(0.1, 10.0) : 0.0;
    d[rng.index(0, n - 1)] = 1.0;
    // Every sector must reach one with final demand, otherwise a closed
    // subsystem with unit root appears.
    const auto reach = oracle::floyd_warshall(m);
    for (std::size_t i = 0; i < n; ++i) {
      bool leaks = d[i] > 0.0;
      for (std::size_t k = 0; k < n && !leaks; ++k) leaks = reach[i][k] && d[k] > 0.0;
      if (!leaks) d[i] = 1.0;
    }
    Vec x;
    const TechMatrix a(oracle::coefficients_from(m, d, x));
    const DemandVector dv(d);
    const Pipeline p = open(a, dv);
    ASSERT_TRUE(p.verdict.unique) << "trial " << t;
    const Solution s = solve_open(a, dv, p.verdict, p.sc, p.btf);
    EXPECT_LE(s.residual, 1e-8 * (1 + norm_inf(d)));
    const Vec ref = oracle::gauss_solve(identity_minus(a.matrix()), d);
    EXPECT_LT(oracle::max_abs_diff(s.x, ref), 1e-9 * std::max(1.0, norm_inf(ref)));

    const auto perm = rng.permutation(n);
    Vec dp(n);
    for (std::size_t i = 0; i < n; ++i) dp[i] = d[perm[i]];
    const TechMatrix ap(oracle::permuted(a.matrix(), perm));
    const Pipeline pp = open(ap, DemandVector(dp));
    const Solution sp = solve_open(ap, DemandVector(dp), pp.verdict, pp.sc, pp.btf);
    for (std::size_t i = 0; i < n; ++i)
      EXPECT_NEAR(sp.x[i], s.x[perm[i]], 1e-10 * std::max(1.0, norm_inf(s.x)));
  }
}
