#pragma once

// Independent reference implementations and random instance generators
// shared by the unit suites and the acceptance binary. Nothing here calls
// into the library's graph, spectral or classification code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "leontief/linalg.hpp"

namespace oracle {

using leontief::Matrix;
using leontief::Vec;

// ---------------------------------------------------------------- exact

/// Normalized rational with 64-bit parts; the grid instances keep
/// numerators and denominators tiny.
struct Frac {
  std::int64_t p = 0, q = 1;

  Frac() = default;
  Frac(std::int64_t num, std::int64_t den = 1) : p(num), q(den) {
    if (q == 0) throw std::domain_error("zero denominator");
    if (q < 0) p = -p, q = -q;
    const std::int64_t g = std::gcd(p < 0 ? -p : p, q);
    if (g > 1) p /= g, q /= g;
  }
  friend Frac operator+(Frac a, Frac b) { return {a.p * b.q + b.p * a.q, a.q * b.q}; }
  friend Frac operator-(Frac a, Frac b) { return {a.p * b.q - b.p * a.q, a.q * b.q}; }
  friend Frac operator*(Frac a, Frac b) { return {a.p * b.p, a.q * b.q}; }
  friend Frac operator/(Frac a, Frac b) { return {a.p * b.q, a.q * b.p}; }
  friend bool operator==(Frac a, Frac b) { return a.p == b.p && a.q == b.q; }
  bool zero() const { return p == 0; }
  bool negative() const { return p < 0; }
  double value() const { return static_cast<double>(p) / static_cast<double>(q); }
};

/// Exact value of a grid number (a multiple of 1/10).
inline Frac tenths(double v) {
  const double t = std::round(v * 10.0);
  if (std::abs(t - v * 10.0) > 1e-9) throw std::domain_error("not a multiple of 0.1");
  return {static_cast<std::int64_t>(t), 10};
}

/// Unique solution of the (possibly overdetermined) system, or nothing if
/// the columns are dependent or the system is inconsistent.
inline bool solve_exact(std::vector<std::vector<Frac>> m, std::vector<Frac>& y) {
  const std::size_t rows = m.size(), cols = m.empty() ? 0 : m[0].size() - 1;
  std::size_t r = 0;
  std::vector<std::size_t> pivot_col;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && m[piv][c].zero()) ++piv;
    if (piv == rows) return false;  // dependent column
    std::swap(m[piv], m[r]);
    const Frac inv = Frac(1) / m[r][c];
    for (auto& v : m[r]) v = v * inv;
    for (std::size_t i = 0; i < rows; ++i)
      if (i != r && !m[i][c].zero()) {
        const Frac f = m[i][c];
        for (std::size_t j = 0; j <= cols; ++j) m[i][j] = m[i][j] - f * m[r][j];
      }
    pivot_col.push_back(c);
    ++r;
  }
  if (r < cols) return false;
  for (std::size_t i = r; i < rows; ++i)
    if (!m[i][cols].zero()) return false;
  y.assign(cols, Frac(0));
  for (std::size_t i = 0; i < r; ++i) y[pivot_col[i]] = m[i][cols];
  return true;
}

struct Flags {
  bool meaningful = false;
  bool nonneg = false;
  bool unique = false;
  friend bool operator==(const Flags&, const Flags&) = default;
};

namespace detail {

/// Vertices of {x >= 0 : B x = rhs (, 1'x = 1 if normalize)} by support
/// enumeration. Returns distinct vertices.
inline std::vector<std::vector<Frac>> vertices(const std::vector<std::vector<Frac>>& b,
                                               const std::vector<Frac>& rhs, bool normalize) {
  const std::size_t n = b.size();
  std::vector<std::vector<Frac>> out;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t j = 0; j < n; ++j)
      if (mask & (1u << j)) s.push_back(j);
    std::vector<std::vector<Frac>> m;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<Frac> row;
      for (std::size_t j : s) row.push_back(b[i][j]);
      row.push_back(rhs[i]);
      m.push_back(row);
    }
    if (normalize) {
      std::vector<Frac> row(s.size(), Frac(1));
      row.push_back(Frac(1));
      m.push_back(row);
    }
    std::vector<Frac> y;
    if (!solve_exact(m, y)) continue;
    if (std::any_of(y.begin(), y.end(), [](Frac f) { return f.negative(); })) continue;
    std::vector<Frac> x(n, Frac(0));
    for (std::size_t k = 0; k < s.size(); ++k) x[s[k]] = y[k];
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  }
  return out;
}

inline std::vector<std::vector<Frac>> b_exact(const Matrix& a) {
  const std::size_t n = a.rows();
  std::vector<std::vector<Frac>> b(n, std::vector<Frac>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b[i][j] = Frac(i == j ? 1 : 0) - tenths(a(i, j));
  return b;
}

inline void mark_support(const std::vector<std::vector<Frac>>& vs, std::vector<bool>& covered) {
  for (const auto& v : vs)
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!v[i].zero()) covered[i] = true;
}

}  // namespace detail

/// Closed system (I - A)x = 0 over the nonnegative orthant, decided on the
/// normalized polytope {x >= 0, (I - A)x = 0, sum x = 1}.
inline Flags closed_flags(const Matrix& a) {
  const std::size_t n = a.rows();
  const auto vs = detail::vertices(detail::b_exact(a), std::vector<Frac>(n, Frac(0)), true);
  Flags f;
  f.nonneg = !vs.empty();
  f.unique = vs.size() == 1;
  std::vector<bool> covered(n, false);
  detail::mark_support(vs, covered);
  f.meaningful = f.nonneg && std::all_of(covered.begin(), covered.end(), [](bool c) { return c; });
  return f;
}

/// Open system (I - A)x = d: vertices of the solution polyhedron plus the
/// extreme rays of its recession cone (the closed-system vertices).
inline Flags open_flags(const Matrix& a, const Vec& d) {
  const std::size_t n = a.rows();
  const auto b = detail::b_exact(a);
  std::vector<Frac> rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = tenths(d[i]);
  const auto vs = detail::vertices(b, rhs, false);
  const auto rays = detail::vertices(b, std::vector<Frac>(n, Frac(0)), true);
  Flags f;
  f.nonneg = !vs.empty();
  f.unique = vs.size() == 1 && rays.empty();
  std::vector<bool> covered(n, false);
  detail::mark_support(vs, covered);
  detail::mark_support(rays, covered);
  f.meaningful = f.nonneg && std::all_of(covered.begin(), covered.end(), [](bool c) { return c; });
  return f;
}

// ---------------------------------------------------------------- dense

/// Laplace expansion along the first row.
inline double brute_det(const Matrix& m) {
  const std::size_t n = m.rows();
  if (n == 0) return 1.0;
  if (n == 1) return m(0, 0);
  double s = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    if (m(0, c) == 0.0) continue;
    Matrix minor(n - 1, n - 1);
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t j = 0, mj = 0; j < n; ++j)
        if (j != c) minor(i - 1, mj++) = m(i, j);
    s += (c % 2 == 0 ? 1.0 : -1.0) * m(0, c) * brute_det(minor);
  }
  return s;
}

/// reach[i][j]: a path of length >= 1 from i to j along entries > eps.
inline std::vector<std::vector<bool>> floyd_warshall(const Matrix& a, double eps = 0.0) {
  const std::size_t n = a.rows();
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r[i][j] = a(i, j) > eps;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (r[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (r[k][j]) r[i][j] = true;
  return r;
}

/// Dense solve by Gaussian elimination with partial pivoting, written
/// separately from the library LU.
inline Vec gauss_solve(Matrix m, Vec b) {
  const std::size_t n = m.rows();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m(i, k)) > std::abs(m(p, k))) p = i;
    for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
    std::swap(b[k], b[p]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = m(i, k) / m(k, k);
      for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
      b[i] -= f * b[k];
    }
  }
  Vec x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= m(i, j) * x[j];
    x[i] = s / m(i, i);
  }
  return x;
}

// ----------------------------------------------------------- generators

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<>(lo, hi)(g_); }
  std::size_t index(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(g_);
  }
  bool chance(double p) { return uniform() < p; }
  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    std::shuffle(p.begin(), p.end(), g_);
    return p;
  }
  std::mt19937_64& engine() { return g_; }

 private:
  std::mt19937_64 g_;
};

/// Nonnegative matrix with the given density, entries in (0, scale).
inline Matrix sparse_nonneg(Rng& rng, std::size_t n, double density, double scale = 1.0) {
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (rng.chance(density)) a(i, j) = rng.uniform(0.01, 1.0) * scale;
  return a;
}

/// Transaction-style matrix whose digraph contains the cycle 0->1->...->0,
/// so it is irreducible, plus random extra entries.
inline Matrix irreducible_transactions(Rng& rng, std::size_t n, double density) {
  Matrix m = sparse_nonneg(rng, n, density, 10.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    if (n > 1 && m(i, j) == 0.0) m(i, j) = rng.uniform(1.0, 10.0);
  }
  if (n == 1 && m(0, 0) == 0.0) m(0, 0) = rng.uniform(1.0, 10.0);
  return m;
}

/// A = M diag(1/x) with x = row sums of M + d. (I - A)x = d holds exactly
/// up to rounding of the divisions, and with d = 0 the matrix has Perron
/// root 1 with Perron vector x.
inline Matrix coefficients_from(const Matrix& m, const Vec& d, Vec& x) {
  const std::size_t n = m.rows();
  x.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = d[i];
    for (std::size_t j = 0; j < n; ++j) x[i] += m(i, j);
    if (!(x[i] > 0.0)) throw std::domain_error("sector with no output");
  }
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = m(i, j) / x[j];
  return a;
}

/// Irreducible block with Perron root exactly scaled to `rho` (rho = 1 is
/// exact in the sense above; others are scaled copies).
inline Matrix irreducible_block(Rng& rng, std::size_t n, double rho, double density) {
  Vec x;
  Matrix a = coefficients_from(irreducible_transactions(rng, n, density), Vec(n, 0.0), x);
  return rho * a;
}

/// Places blocks on the diagonal of a block upper triangular matrix and
/// fills the strictly upper block part with the given density.
inline Matrix block_upper(Rng& rng, const std::vector<Matrix>& blocks, double coupling_density,
                          double coupling_scale = 0.3) {
  std::size_t n = 0;
  for (const Matrix& b : blocks) n += b.rows();
  Matrix a(n, n);
  std::size_t off = 0;
  std::vector<std::size_t> start;
  for (const Matrix& b : blocks) {
    start.push_back(off);
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.rows(); ++j) a(off + i, off + j) = b(i, j);
    off += b.rows();
  }
  start.push_back(n);
  for (std::size_t bi = 0; bi < blocks.size(); ++bi)
    for (std::size_t i = start[bi]; i < start[bi + 1]; ++i)
      for (std::size_t j = start[bi + 1]; j < n; ++j)
        if (rng.chance(coupling_density)) a(i, j) = rng.uniform(0.01, 1.0) * coupling_scale;
  return a;
}

/// P A P' with (P A P')(i, j) = A(p[i], p[j]).
inline Matrix permuted(const Matrix& a, const std::vector<std::size_t>& p) {
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(p[i], p[j]);
  return out;
}

inline double max_abs_diff(const Vec& a, const Vec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace oracle
