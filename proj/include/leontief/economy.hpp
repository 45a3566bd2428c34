#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include "leontief/errors.hpp"
#include "leontief/linalg.hpp"

namespace leontief {

/// Square nonnegative matrix of technical coefficients. a(i, j) is the
/// amount of sector i's good used per unit of sector j's output.
class TechMatrix {
 public:
  TechMatrix() = default;
  explicit TechMatrix(Matrix a) : a_(std::move(a)) {
    if (!a_.is_square()) throw DimensionError("technical coefficient matrix must be square");
    if (a_.rows() == 0) throw DimensionError("technical coefficient matrix is empty");
    for (std::size_t i = 0; i < a_.rows(); ++i)
      for (std::size_t j = 0; j < a_.cols(); ++j) {
        const double v = a_(i, j);
        if (!std::isfinite(v))
          throw DomainError("non-finite coefficient at (" + std::to_string(i + 1) + ", " +
                            std::to_string(j + 1) + ")");
        if (v < 0.0)
          throw DomainError("negative coefficient at (" + std::to_string(i + 1) + ", " +
                            std::to_string(j + 1) + ")");
      }
  }
  TechMatrix(std::initializer_list<std::initializer_list<double>> rows)
      : TechMatrix(Matrix(rows)) {}

  std::size_t size() const noexcept { return a_.rows(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return a_(i, j); }
  const Matrix& matrix() const noexcept { return a_; }

 private:
  Matrix a_;
};

/// Nonnegative final demand d.
class DemandVector {
 public:
  DemandVector() = default;
  explicit DemandVector(Vec d) : d_(std::move(d)) {
    for (std::size_t i = 0; i < d_.size(); ++i) {
      if (!std::isfinite(d_[i]))
        throw DomainError("non-finite demand for sector " + std::to_string(i + 1));
      if (d_[i] < 0.0) throw DomainError("negative demand for sector " + std::to_string(i + 1));
    }
  }
  DemandVector(std::initializer_list<double> d) : DemandVector(Vec(d)) {}

  static DemandVector zero(std::size_t n) { return DemandVector(Vec(n, 0.0)); }

  std::size_t size() const noexcept { return d_.size(); }
  double operator[](std::size_t i) const noexcept { return d_[i]; }
  const Vec& values() const noexcept { return d_; }
  bool is_zero() const noexcept {
    return std::all_of(d_.begin(), d_.end(), [](double v) { return v == 0.0; });
  }

 private:
  Vec d_;
};

}  // namespace leontief
