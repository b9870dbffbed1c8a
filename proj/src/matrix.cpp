#include "ssc/matrix.hpp"

#include <string>
#include <utility>

#include "ssc/errors.hpp"

namespace ssc {

bool all_finite(const Matrix& m) { return m.allFinite(); }

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw InputError("data matrix must have at least one row and one column");
  }
  if (!values_.allFinite()) {
    throw InputError("data matrix contains non-finite entries");
  }
}

CoefficientMatrix::CoefficientMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() != values_.cols()) {
    throw InputError("coefficient matrix must be square, got " +
                     std::to_string(values_.rows()) + "x" +
                     std::to_string(values_.cols()));
  }
  values_.diagonal().setZero();
}

Matrix normalize_columns(const Matrix& y) {
  Matrix out = y;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const double norm = out.col(j).norm();
    if (norm > 0.0) out.col(j) /= norm;
  }
  return out;
}

}  // namespace ssc
