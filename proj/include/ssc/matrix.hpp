#pragma once

#include <Eigen/Dense>

namespace ssc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// D x N data matrix; columns are data points.
class DataMatrix {
 public:
  DataMatrix() = default;
  /// Throws InputError on non-finite entries or an empty shape.
  explicit DataMatrix(Matrix values);

  const Matrix& values() const noexcept { return values_; }
  Eigen::Index dim() const noexcept { return values_.rows(); }
  Eigen::Index size() const noexcept { return values_.cols(); }

 private:
  Matrix values_;
};

/// N x N self-representation coefficients with an exactly zero diagonal.
class CoefficientMatrix {
 public:
  CoefficientMatrix() = default;
  /// Zeroes the diagonal of `values`; throws InputError if not square.
  explicit CoefficientMatrix(Matrix values);

  const Matrix& values() const noexcept { return values_; }
  Eigen::Index size() const noexcept { return values_.cols(); }

 private:
  Matrix values_;
};

/// Scales every nonzero column to unit l2 norm; zero columns stay zero.
Matrix normalize_columns(const Matrix& y);

bool all_finite(const Matrix& m);

}  // namespace ssc
