#pragma once

// First-order sensitivity of the solution of (I - A)x = d with respect to
// every a(i, j) and d(m), plus two independent oracles (cofactor null
// vector and central finite differences) used to validate it.

#include <algorithm>
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
#include "leontief/solver.hpp"

namespace leontief {

/// One entry of the parameter vector (a11, a12, ..., ann, d1, ..., dn).
struct ParameterIndex {
  enum class Kind { Coefficient, Demand };
  Kind kind = Kind::Coefficient;
  std::size_t i = 0;
  /// Column for coefficients; unused for demand.
  std::size_t j = 0;

  static ParameterIndex coefficient(std::size_t i, std::size_t j) { return {Kind::Coefficient, i, j}; }
  static ParameterIndex demand(std::size_t m) { return {Kind::Demand, m, 0}; }

  static ParameterIndex from_flat(std::size_t k, std::size_t n) {
    if (k < n * n) return coefficient(k / n, k % n);
    if (k < n * n + n) return demand(k - n * n);
    throw DimensionError("flat parameter index " + std::to_string(k) + " out of range");
  }
  std::size_t flat(std::size_t n) const { return kind == Kind::Coefficient ? i * n + j : n * n + i; }
  void check(std::size_t n) const {
    if (i >= n || (kind == Kind::Coefficient && j >= n))
      throw DimensionError("parameter index out of range for n = " + std::to_string(n));
  }
  std::string name() const {
    return kind == Kind::Coefficient
               ? "a(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")"
               : "d(" + std::to_string(i + 1) + ")";
  }
};

/// z = sum_m weights[m] * x[m].
struct LinearFunctional {
  std::string name;
  Vec weights;
};

/// (eps / z0) * dz. Throws when z0 = 0, where the elasticity is undefined.
inline double elasticity(double z0, double dz, double eps) {
  if (z0 == 0.0) throw DomainError("elasticity undefined: base value of the variable is 0");
  return eps / z0 * dz;
}

/// Derivatives of the normalized closed solution. The norm of x is held
/// at ||x0||, so every derivative dx satisfies (I - A0)dx = x0_j e_i
/// projected onto the range of I - A0, and x0' dx = 0.
class ClosedDerivative {
 public:
  ClosedDerivative(const TechMatrix& a0, Vec x0) : x0_(std::move(x0)) {
    const std::size_t n = a0.size();
    if (x0_.size() != n) throw DimensionError("x0 length does not match matrix");
    const Matrix b = identity_minus(a0.matrix());
    const std::size_t rank = numerical_rank(b);
    if (rank + 1 != n)
      throw PreconditionError("I - A0 has rank " + std::to_string(rank) + ", need n - 1 = " +
                              std::to_string(n - 1) + " for a unique normalized solution");
    const double x0n = norm_inf(x0_);
    if (!(x0n > 0.0)) throw PreconditionError("x0 is zero");
    const double res = norm_inf(b * x0_);
    if (res > 1e-8 * x0n)
      throw ConsistencyError("x0 does not solve (I - A0)x = 0 (residual " + std::to_string(res) + ")",
                             res);
    w_ = null_vector(b.transpose());
    x0x0_ = dot(x0_, x0_);

    anchor_ = 0;
    for (std::size_t p = 1; p < n; ++p)
      if (std::abs(x0_[p] * w_[p]) > std::abs(x0_[anchor_] * w_[anchor_])) anchor_ = p;
    Matrix anchored = b;
    for (std::size_t k = 0; k < n; ++k) anchored(anchor_, k) = anchored(k, anchor_) = 0.0;
    anchored(anchor_, anchor_) = 1.0;
    lu_ = lu_factor(anchored);
    if (lu_.singular) throw SingularMatrixError("anchored reduced system is singular");
  }

  /// dx for a right-hand side perturbation r of (I - A0)x = 0.
  Vec solve(Vec r) const {
    const double wr = dot(w_, r);  // w has unit norm
    for (std::size_t k = 0; k < r.size(); ++k) r[k] -= wr * w_[k];
    r[anchor_] = 0.0;
    Vec v = leontief::solve(lu_, r);
    const double c = -dot(x0_, v) / x0x0_;
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += c * x0_[k];
    return v;
  }

  Vec derivative(const ParameterIndex& p) const {
    const std::size_t n = x0_.size();
    p.check(n);
    if (p.kind != ParameterIndex::Kind::Coefficient)
      throw PreconditionError("closed model has no demand parameters");
    Vec r(n, 0.0);
    r[p.i] = x0_[p.j];
    return solve(std::move(r));
  }

  const Vec& x0() const noexcept { return x0_; }
  std::size_t anchor() const noexcept { return anchor_; }
  const Vec& left_null_vector() const noexcept { return w_; }

 private:
  Vec x0_;
  Vec w_;
  double x0x0_ = 0.0;
  std::size_t anchor_ = 0;
  LuFactors lu_;
};

/// Derivatives of x = (I - A0)^{-1} d0 using per-block factors, so that
/// entries which cannot depend on a parameter come out as exact zeros.
class OpenDerivative {
 public:
  OpenDerivative(const TechMatrix& a0, Vec x0)
      : x0_(std::move(x0)),
        btf_(block_triangular_form(a0)),
        solver_(permute_similarity(a0.matrix(), btf_.perm), btf_) {
    if (x0_.size() != a0.size()) throw DimensionError("x0 length does not match matrix");
  }

  Vec derivative(const ParameterIndex& p) const {
    const std::size_t n = x0_.size();
    p.check(n);
    Vec r(n, 0.0);
    if (p.kind == ParameterIndex::Kind::Coefficient)
      r[p.i] = x0_[p.j];
    else
      r[p.i] = 1.0;
    return btf_.perm.scatter(solver_.solve(btf_.perm.gather(r)));
  }

  const Vec& x0() const noexcept { return x0_; }

 private:
  Vec x0_;
  BlockTriangularForm btf_;
  BlockSolver solver_;
};

inline Vec derivative_closed(const TechMatrix& a0, const Solution& x0, const ParameterIndex& p) {
  if (x0.mode != Mode::Closed) throw PreconditionError("derivative_closed needs a closed solution");
  return ClosedDerivative(a0, x0.x).derivative(p);
}

inline Vec derivative_open(const TechMatrix& a0, const DemandVector& d0, const Solution& x0,
                           const ParameterIndex& p) {
  if (x0.mode != Mode::Open) throw PreconditionError("derivative_open needs an open solution");
  if (d0.size() != a0.size()) throw DimensionError("demand length does not match matrix");
  return OpenDerivative(a0, x0.x).derivative(p);
}

struct FunctionalSensitivity {
  std::string name;
  Vec weights;
  double z0 = 0.0;
  /// dz/d(eps_k), indexed like the parameter vector.
  Vec gradient;
  /// Empty entries: z0 = 0.
  std::vector<std::optional<double>> elasticity;
};

struct SensitivityResult {
  Mode mode = Mode::Closed;
  Matrix a0;
  Vec d0;
  Vec x0;
  std::optional<Normalization> normalization;
  /// Row m, column i*n + j: dx_m / da_ij.
  Matrix jacobian_a;
  /// Row m, column k: dx_m / dd_k. Open mode only.
  std::optional<Matrix> jacobian_d;
  /// Row m, same column layout as the Jacobians concatenated
  /// (n^2 coefficient columns then n demand columns in open mode).
  std::vector<std::vector<std::optional<double>>> elasticity_x;
  std::vector<FunctionalSensitivity> functionals;

  std::size_t parameter_count() const { return jacobian_a.cols() + (jacobian_d ? jacobian_d->cols() : 0); }
  double derivative(std::size_t m, std::size_t k) const {
    const std::size_t n2 = jacobian_a.cols();
    return k < n2 ? jacobian_a(m, k) : (*jacobian_d)(m, k - n2);
  }
  double parameter_value(std::size_t k) const {
    const std::size_t n = a0.rows();
    return k < n * n ? a0(k / n, k % n) : d0[k - n * n];
  }
};

/// Full Jacobians of x0 (one factorization, n^2 or n^2 + n solves) and the
/// elasticities of every x_m and every requested functional.
inline SensitivityResult sensitivity_sweep(const TechMatrix& a0, const std::optional<DemandVector>& d0,
                                           const Solution& x0,
                                           const std::vector<LinearFunctional>& functionals = {}) {
  const std::size_t n = a0.size();
  if (x0.x.size() != n) throw DimensionError("solution length does not match matrix");
  SensitivityResult out;
  out.mode = x0.mode;
  out.a0 = a0.matrix();
  out.x0 = x0.x;
  out.normalization = x0.normalization;
  out.jacobian_a = Matrix(n, n * n);

  if (x0.mode == Mode::Closed) {
    out.d0.assign(n, 0.0);
    const ClosedDerivative cd(a0, x0.x);
    for (std::size_t k = 0; k < n * n; ++k) {
      const Vec dx = cd.derivative(ParameterIndex::from_flat(k, n));
      for (std::size_t m = 0; m < n; ++m) out.jacobian_a(m, k) = dx[m];
    }
  } else {
    if (!d0) throw PreconditionError("open sensitivity needs the demand vector");
    if (d0->size() != n) throw DimensionError("demand length does not match matrix");
    out.d0 = d0->values();
    const OpenDerivative od(a0, x0.x);
    out.jacobian_d = Matrix(n, n);
    for (std::size_t k = 0; k < n * n + n; ++k) {
      const Vec dx = od.derivative(ParameterIndex::from_flat(k, n));
      for (std::size_t m = 0; m < n; ++m) {
        if (k < n * n)
          out.jacobian_a(m, k) = dx[m];
        else
          (*out.jacobian_d)(m, k - n * n) = dx[m];
      }
    }
  }

  const std::size_t np = out.parameter_count();
  out.elasticity_x.assign(n, std::vector<std::optional<double>>(np));
  for (std::size_t m = 0; m < n; ++m) {
    if (out.x0[m] == 0.0) continue;
    for (std::size_t k = 0; k < np; ++k)
      out.elasticity_x[m][k] = elasticity(out.x0[m], out.derivative(m, k), out.parameter_value(k));
  }

  for (const LinearFunctional& f : functionals) {
    if (f.weights.size() != n)
      throw DimensionError("functional '" + f.name + "' has " + std::to_string(f.weights.size()) +
                           " weights, expected " + std::to_string(n));
    if (!all_finite(f.weights)) throw DomainError("functional '" + f.name + "' has a non-finite weight");
    FunctionalSensitivity fs{f.name, f.weights, dot(f.weights, out.x0), Vec(np, 0.0), {}};
    fs.elasticity.resize(np);
    for (std::size_t k = 0; k < np; ++k) {
      double g = 0.0;
      for (std::size_t m = 0; m < n; ++m) g += f.weights[m] * out.derivative(m, k);
      fs.gradient[k] = g;
      if (fs.z0 != 0.0) fs.elasticity[k] = elasticity(fs.z0, g, out.parameter_value(k));
    }
    out.functionals.push_back(std::move(fs));
  }
  return out;
}

/// Null vector of a rank n-1 matrix from cofactors of one row (the last
/// row whose cofactors are not all zero), unit norm, first nonzero > 0.
inline Vec cofactor_nullvector(const Matrix& dmat) {
  if (!dmat.is_square() || dmat.rows() == 0) throw DimensionError("matrix must be square");
  const std::size_t n = dmat.rows();
  if (n > 12) throw DimensionError("cofactor oracle limited to n <= 12");
  const std::size_t rank = numerical_rank(dmat);
  if (rank + 1 != n)
    throw PreconditionError("cofactor null vector needs rank n - 1, got " + std::to_string(rank));

  auto minor_det = [&](std::size_t r, std::size_t c) {
    if (n == 1) return 1.0;
    Matrix m(n - 1, n - 1);
    for (std::size_t i = 0, mi = 0; i < n; ++i) {
      if (i == r) continue;
      for (std::size_t j = 0, mj = 0; j < n; ++j)
        if (j != c) m(mi, mj++) = dmat(i, j);
      ++mi;
    }
    return determinant(lu_factor(m));
  };

  Vec y(n, 0.0);
  const double scale = std::pow(std::max(1.0, max_abs(dmat)), static_cast<double>(n - 1));
  for (std::size_t r = n; r-- > 0;) {
    for (std::size_t k = 0; k < n; ++k)
      y[k] = ((r + k) % 2 == 0 ? 1.0 : -1.0) * minor_det(r, k);
    if (norm_inf(y) > 1e-12 * scale) break;
  }
  const double nrm = norm2(y);
  if (!(nrm > 0.0)) throw ConsistencyError("all cofactors vanish", 0.0);
  for (double& v : y) v /= nrm;
  const double floor = 1e-12 * norm_inf(y);
  for (double v : y)
    if (std::abs(v) > floor) {
      if (v < 0.0)
        for (double& u : y) u = -u;
      break;
    }
  const double res = norm_inf(dmat * y);
  if (res > 1e-8 * std::max(1.0, norm_inf(dmat)))
    throw ConsistencyError("cofactor vector residual " + std::to_string(res), res);
  return y;
}

/// Base point for the finite-difference oracle. Closed problems are
/// normalized to ||x0||_2 and sign-fixed against x0.
struct FdProblem {
  Mode mode = Mode::Closed;
  Matrix a;
  Vec d;
  Vec x0;
};

namespace detail {

/// Unit right singular vector of the smallest singular value, by inverse
/// iteration on B'B started from `start`.
inline Vec smallest_singular_vector(const Matrix& b, const Vec& start) {
  const LuFactors f = lu_factor(b);
  if (f.singular) {
    if (numerical_rank(b) + 1 != b.rows())
      throw PreconditionError("finite-difference oracle invalid: perturbed matrix has rank deficiency > 1");
    return null_vector(b);
  }
  const LuFactors ft = lu_factor(b.transpose());
  Vec y = start;
  double nrm = norm2(y);
  for (double& v : y) v /= nrm;
  for (int it = 0; it < 60; ++it) {
    Vec z = solve(f, solve(ft, y));
    nrm = norm2(z);
    if (dot(z, y) < 0.0) nrm = -nrm;
    double change = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      z[i] /= nrm;
      change = std::max(change, std::abs(z[i] - y[i]));
    }
    y = std::move(z);
    if (change < 1e-15) return y;
  }
  throw PreconditionError(
      "finite-difference oracle invalid: smallest singular value is not isolated after perturbation");
}

inline Vec fd_evaluate(const FdProblem& pr, const Matrix& a, const Vec& d) {
  const Matrix b = identity_minus(a);
  if (pr.mode == Mode::Open) {
    const LuFactors f = lu_factor(b);
    if (f.singular) throw PreconditionError("finite-difference oracle invalid: I - A is singular");
    return solve(f, d);
  }
  Vec x = smallest_singular_vector(b, pr.x0);
  if (dot(x, pr.x0) < 0.0)
    for (double& v : x) v = -v;
  const double s = norm2(pr.x0) / norm2(x);
  for (double& v : x) v *= s;
  return x;
}

}  // namespace detail

inline double default_fd_step(Mode mode, double value) {
  return (mode == Mode::Closed ? 1e-6 : 1e-7) * std::max(1.0, std::abs(value));
}

/// Central difference (x(eps + h) - x(eps - h)) / (2h) along parameter p.
inline Vec finite_difference_oracle(const FdProblem& pr, const ParameterIndex& p, double h) {
  const std::size_t n = pr.a.rows();
  p.check(n);
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  if (pr.mode == Mode::Closed && p.kind == ParameterIndex::Kind::Demand)
    throw PreconditionError("closed model has no demand parameters");
  auto shifted = [&](double delta) {
    Matrix a = pr.a;
    Vec d = pr.d.empty() ? Vec(n, 0.0) : pr.d;
    if (p.kind == ParameterIndex::Kind::Coefficient)
      a(p.i, p.j) += delta;
    else
      d[p.i] += delta;
    return detail::fd_evaluate(pr, a, d);
  };
  const Vec up = shifted(h), down = shifted(-h);
  Vec g(n);
  for (std::size_t m = 0; m < n; ++m) g[m] = (up[m] - down[m]) / (2.0 * h);
  return g;
}

}  // namespace leontief
