#pragma once

// Dense real kernel: row-major matrices, permutations, LU with partial
// pivoting, and the handful of derived quantities the analysis needs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "leontief/errors.hpp"

namespace leontief {

using Vec = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw DimensionError("ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix from_rows(const std::vector<Vec>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < m.rows_; ++i) {
      if (rows[i].size() != m.cols_) throw DimensionError("ragged row list");
      std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  const std::vector<double>& data() const noexcept { return data_; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  /// Copy of the nr x nc submatrix whose top-left corner is (r0, c0).
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw DimensionError("block out of range");
    Matrix b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
  }

  std::vector<Vec> to_rows() const {
    std::vector<Vec> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i].assign(row(i).begin(), row(i).end());
    return out;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matrix product shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline Vec operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw DimensionError("matrix-vector shape mismatch");
  Vec y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    const auto r = a.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) s += r[j] * x[j];
    y[i] = s;
  }
  return y;
}

inline Vec operator*(const Matrix& a, const Vec& x) { return a * std::span<const double>(x); }

inline Matrix operator*(double s, Matrix a) {
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (double& v : a.row(i)) v *= s;
  return a;
}

/// I - A for square A.
inline Matrix identity_minus(const Matrix& a) {
  if (!a.is_square()) throw DimensionError("I - A needs a square matrix");
  Matrix b(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) b(i, j) = (i == j ? 1.0 : 0.0) - a(i, j);
  return b;
}

inline double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

/// Maximum absolute row sum.
inline double norm_inf(const Matrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (double v : a.row(i)) s += std::abs(v);
    m = std::max(m, s);
  }
  return m;
}

inline double norm_inf(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

inline double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("dot product length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

inline bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

inline bool all_finite(const Matrix& a) { return all_finite(std::span<const double>(a.data())); }

/// Bijection on [0, n). `p[i]` is the original index placed at position i.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<std::size_t> image) : image_(std::move(image)) {
    std::vector<bool> seen(image_.size(), false);
    for (std::size_t v : image_) {
      if (v >= image_.size() || seen[v]) throw DomainError("not a permutation");
      seen[v] = true;
    }
  }

  static Permutation identity(std::size_t n) {
    std::vector<std::size_t> img(n);
    std::iota(img.begin(), img.end(), std::size_t{0});
    return Permutation(std::move(img));
  }

  std::size_t size() const noexcept { return image_.size(); }
  std::size_t operator[](std::size_t i) const noexcept { return image_[i]; }
  const std::vector<std::size_t>& image() const noexcept { return image_; }

  Permutation inverse() const {
    std::vector<std::size_t> inv(image_.size());
    for (std::size_t i = 0; i < image_.size(); ++i) inv[image_[i]] = i;
    return Permutation(std::move(inv));
  }

  /// (p.then(q))[i] = p[q[i]]: first reindex by p, then by q.
  Permutation then(const Permutation& q) const {
    if (q.size() != size()) throw DimensionError("permutation size mismatch");
    std::vector<std::size_t> img(size());
    for (std::size_t i = 0; i < size(); ++i) img[i] = image_[q[i]];
    return Permutation(std::move(img));
  }

  /// out[i] = x[p[i]]
  template <typename T>
  std::vector<T> gather(const std::vector<T>& x) const {
    if (x.size() != size()) throw DimensionError("permutation size mismatch");
    std::vector<T> out(x.size());
    for (std::size_t i = 0; i < size(); ++i) out[i] = x[image_[i]];
    return out;
  }

  /// Inverse of gather: out[p[i]] = x[i].
  template <typename T>
  std::vector<T> scatter(const std::vector<T>& x) const {
    if (x.size() != size()) throw DimensionError("permutation size mismatch");
    std::vector<T> out(x.size());
    for (std::size_t i = 0; i < size(); ++i) out[image_[i]] = x[i];
    return out;
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<std::size_t> image_;
};

/// result(i, j) = a(p[i], p[j]). Similarity by the permutation matrix;
/// similarity by p.inverse() undoes it.
inline Matrix permute_similarity(const Matrix& a, const Permutation& p) {
  if (!a.is_square() || a.rows() != p.size())
    throw DimensionError("permutation similarity needs a square matrix of matching size");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(p[i], p[j]);
  return out;
}

/// Relative pivot tolerance: a pivot below this times max|a| counts as zero.
inline constexpr double kPivotTolerance = 1e-12;

/// Packed L (unit lower, below the diagonal) and U (on and above) of
/// P*A = L*U with row permutation P.
struct LuFactors {
  Matrix packed;
  /// Row i of P*A is row `row_perm[i]` of A.
  std::vector<std::size_t> row_perm;
  bool singular = false;
  /// Absolute threshold actually used: kPivotTolerance * max|a|.
  double pivot_threshold = 0.0;
  int perm_sign = 1;

  std::size_t size() const noexcept { return packed.rows(); }
};

inline LuFactors lu_factor(const Matrix& a) {
  if (!a.is_square()) throw DimensionError("LU factorization needs a square matrix");
  const std::size_t n = a.rows();
  LuFactors f;
  f.packed = a;
  f.row_perm.resize(n);
  std::iota(f.row_perm.begin(), f.row_perm.end(), std::size_t{0});
  const double scale = max_abs(a);
  f.pivot_threshold = kPivotTolerance * scale;
  Matrix& lu = f.packed;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(lu(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(lu(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
      std::swap(f.row_perm[k], f.row_perm[piv]);
      f.perm_sign = -f.perm_sign;
    }
    // A zero matrix has scale 0; every pivot is then singular.
    if (best <= f.pivot_threshold || scale == 0.0) {
      f.singular = true;
      continue;
    }
    const double pivot = lu(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = lu(i, k) / pivot;
      lu(i, k) = m;
      if (m == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= m * lu(k, j);
    }
  }
  return f;
}

inline Vec solve(const LuFactors& f, std::span<const double> rhs) {
  const std::size_t n = f.size();
  if (rhs.size() != n) throw DimensionError("right-hand side length mismatch");
  if (f.singular) throw SingularMatrixError("cannot solve with singular LU factors");
  Vec x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = rhs[f.row_perm[i]];
    for (std::size_t j = 0; j < i; ++j) s -= f.packed(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= f.packed(i, j) * x[j];
    x[i] = s / f.packed(i, i);
  }
  return x;
}

inline Vec solve(const LuFactors& f, const Vec& rhs) { return solve(f, std::span<const double>(rhs)); }

/// Product of the pivots with the permutation sign. Meaningful even when
/// the singular flag is set (it is then tiny, possibly exactly zero).
inline double determinant(const LuFactors& f) {
  double d = f.perm_sign;
  for (std::size_t i = 0; i < f.size(); ++i) d *= f.packed(i, i);
  return d;
}

/// P^T * L * U, i.e. the matrix that was factored.
inline Matrix reconstruct(const LuFactors& f) {
  const std::size_t n = f.size();
  Matrix prod(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k <= std::min(i, j); ++k) {
        const double l = k == i ? 1.0 : f.packed(i, k);
        s += l * f.packed(k, j);
      }
      prod(f.row_perm[i], j) = s;
    }
  return prod;
}

/// Determinants of the top-left 1x1 ... nxn submatrices. Each leading
/// block is factored on its own so pivoting never mixes in later rows.
inline Vec leading_principal_minors(const Matrix& a) {
  if (!a.is_square()) throw DimensionError("leading minors need a square matrix");
  Vec minors(a.rows());
  for (std::size_t k = 1; k <= a.rows(); ++k)
    minors[k - 1] = determinant(lu_factor(a.block(0, 0, k, k)));
  return minors;
}

/// Rank by Gaussian elimination with complete pivoting; pivots at or
/// below `rel_tol * max|a|` count as zero.
inline std::size_t numerical_rank(const Matrix& a, double rel_tol = kPivotTolerance) {
  Matrix m = a;
  const std::size_t rows = m.rows(), cols = m.cols();
  const double threshold = rel_tol * max_abs(m);
  std::size_t rank = 0;
  for (std::size_t k = 0; k < std::min(rows, cols); ++k) {
    std::size_t pr = k, pc = k;
    double best = 0.0;
    for (std::size_t i = k; i < rows; ++i)
      for (std::size_t j = k; j < cols; ++j)
        if (std::abs(m(i, j)) > best) best = std::abs(m(i, j)), pr = i, pc = j;
    if (best <= threshold || best == 0.0) break;
    for (std::size_t j = 0; j < cols; ++j) std::swap(m(k, j), m(pr, j));
    for (std::size_t i = 0; i < rows; ++i) std::swap(m(i, k), m(i, pc));
    for (std::size_t i = k + 1; i < rows; ++i) {
      const double f = m(i, k) / m(k, k);
      for (std::size_t j = k; j < cols; ++j) m(i, j) -= f * m(k, j);
    }
    ++rank;
  }
  return rank;
}

/// A nonzero vector spanning (an approximation of) the kernel of a square
/// matrix of rank n-1, from LU with complete pivoting. Unit 2-norm.
inline Vec null_vector(const Matrix& a) {
  if (!a.is_square()) throw DimensionError("null vector needs a square matrix");
  const std::size_t n = a.rows();
  if (n == 0) throw DimensionError("empty matrix");
  Matrix lu = a;
  std::vector<std::size_t> col(n);
  std::iota(col.begin(), col.end(), std::size_t{0});
  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::size_t pr = k, pc = k;
    double best = -1.0;
    for (std::size_t i = k; i < n; ++i)
      for (std::size_t j = k; j < n; ++j)
        if (std::abs(lu(i, j)) > best) {
          best = std::abs(lu(i, j));
          pr = i;
          pc = j;
        }
    if (best == 0.0) throw PreconditionError("matrix rank is below n-1");
    if (pr != k)
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(pr, j));
    if (pc != k) {
      for (std::size_t i = 0; i < n; ++i) std::swap(lu(i, k), lu(i, pc));
      std::swap(col[k], col[pc]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = lu(i, k) / lu(k, k);
      lu(i, k) = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= m * lu(k, j);
    }
  }
  // Upper triangle U with U(n-1, n-1) ~ 0; solve U z = 0 with z_{n-1} = 1.
  Vec z(n, 0.0);
  z[n - 1] = 1.0;
  for (std::size_t i = n - 1; i-- > 0;) {
    double s = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) s -= lu(i, j) * z[j];
    z[i] = s / lu(i, i);
  }
  Vec x(n);
  for (std::size_t i = 0; i < n; ++i) x[col[i]] = z[i];
  const double nrm = norm2(x);
  for (double& v : x) v /= nrm;
  return x;
}

}  // namespace leontief
