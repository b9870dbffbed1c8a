#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ssc/matrix.hpp"

namespace ssc {

/// Symmetric, nonnegative, zero-diagonal N x N affinity.
class AffinityMatrix {
 public:
  AffinityMatrix() = default;
  /// Throws InputError unless `values` is square, finite, nonnegative,
  /// exactly symmetric, and zero on the diagonal.
  explicit AffinityMatrix(Matrix values);

  const Matrix& values() const noexcept { return values_; }
  Eigen::Index size() const noexcept { return values_.cols(); }

 private:
  Matrix values_;
};

/// Tag written to run metadata describing build_affinity.
inline constexpr const char* kAffinityFormula = "colmax-abs-symmetric";

/// Scales each column of C by 1 / max|column| (zero columns untouched), then
/// W = |C~| + |C~|^T.
AffinityMatrix build_affinity(const CoefficientMatrix& c);

/// L = I - D^{-1/2} W D^{-1/2}. Degree-zero vertices get an all-zero row and
/// column, so each contributes its own zero eigenvalue.
Matrix normalized_laplacian(const AffinityMatrix& w);

struct EigenDecomposition {
  Vector eigenvalues;  // ascending
  Matrix eigenvectors; // column i pairs with eigenvalues(i)
};

/// Throws InputError if `s` is not symmetric to 1e-10 (scaled by max |s_ij|
/// when that exceeds 1).
EigenDecomposition symmetric_eigendecomposition(const Matrix& s);

/// A gap at k only counts when lambda_{k+1} >= kEigengapRatio * lambda_k.
inline constexpr double kEigengapRatio = 2.0;

/// argmax over k in [1, k_max] of (lambda_{k+1} - lambda_k), smallest k on
/// ties. Only indices where the spectrum at least doubles are candidates, so
/// gaps inside the bulk of a sparse graph's spectrum cannot outvote the
/// jump that ends the near-zero eigenvalues. With no candidate every k in
/// range competes.
int estimate_num_clusters(std::span<const double> eigenvalues, int k_max);

struct KMeansResult {
  std::vector<int> labels;
  double cost = 0.0;  // within-cluster sum of squares
};

/// Best of `restarts` k-means runs on the rows of `points`. Run r is seeded
/// with seed + r, uses D^2-weighted seeding and Lloyd iterations until the
/// assignment is stable or 300 iterations pass. Labels are renumbered in
/// order of first appearance.
KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int restarts = 10);

struct SpectralOptions {
  std::optional<int> k_override;
  std::optional<int> k_max;  // defaults to min(N - 1, 15)
  std::uint64_t seed = 0;
  int restarts = 10;
};

struct SpectralResult {
  Vector eigenvalues;       // of the normalized Laplacian, ascending
  int estimated_k = 1;      // cluster count actually used
  int eigengap_k = 1;       // eigengap estimate, even when overridden
  std::vector<int> labels;  // in [0, estimated_k)
  Matrix embedding;         // N x estimated_k, before row normalization
};

SpectralResult cluster(const AffinityMatrix& w, const SpectralOptions& options = {});

/// Fraction of sum(W) lying on pairs (i, j) with labels[i] == labels[j].
double block_mass_fraction(const Matrix& w, std::span<const int> labels);

}  // namespace ssc
