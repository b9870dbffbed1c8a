#pragma once

#include <cstdint>

#include "ssc/matrix.hpp"

namespace ssc {

/// m x D Gaussian sketching matrix, entries N(0, 1/m).
struct ProjectionMatrix {
  Matrix values;
  std::uint64_t seed = 0;

  Eigen::Index sketch_dim() const noexcept { return values.rows(); }
  Eigen::Index ambient_dim() const noexcept { return values.cols(); }
};

/// Deterministic in (m, D, seed): entries are drawn in column-major order
/// from a single mt19937_64 stream seeded with `seed`.
/// Throws InputError unless 1 <= m <= D.
ProjectionMatrix gaussian_matrix(Eigen::Index m, Eigen::Index D, std::uint64_t seed);

/// G * Y. Throws InputError when G's column count differs from Y's rows.
DataMatrix project(const ProjectionMatrix& g, const DataMatrix& y);

struct DistortionReport {
  double max_expansion = 0.0;
  double max_contraction = 0.0;
  long pair_count = 0;           // N (N - 1) / 2, including skipped pairs
  long zero_distance_pairs = 0;  // excluded from the ratios
};

/// Pairwise distance ratios ||y~_i - y~_j|| / ||y_i - y_j|| over all column
/// pairs. Pairs with zero original distance are counted, not measured.
DistortionReport jl_distortion(const DataMatrix& y, const DataMatrix& y_proj);

}  // namespace ssc
