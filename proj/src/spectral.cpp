#include "ssc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "ssc/errors.hpp"

namespace ssc {

AffinityMatrix::AffinityMatrix(Matrix values) : values_(std::move(values)) {
  const Eigen::Index n = values_.rows();
  if (values_.cols() != n) throw InputError("affinity matrix must be square");
  if (!values_.allFinite()) throw InputError("affinity matrix has non-finite entries");
  for (Eigen::Index j = 0; j < n; ++j) {
    if (values_(j, j) != 0.0) {
      throw InputError("affinity matrix has nonzero diagonal at " + std::to_string(j));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (values_(i, j) < 0.0) {
        throw InputError("affinity matrix has negative entry at (" + std::to_string(i) +
                         ", " + std::to_string(j) + ")");
      }
      if (values_(i, j) != values_(j, i)) {
        throw InputError("affinity matrix is not symmetric at (" + std::to_string(i) +
                         ", " + std::to_string(j) + ")");
      }
    }
  }
}

AffinityMatrix build_affinity(const CoefficientMatrix& c) {
  Matrix scaled = c.values().cwiseAbs();
  for (Eigen::Index j = 0; j < scaled.cols(); ++j) {
    const double peak = scaled.col(j).maxCoeff();
    if (peak > 0.0) scaled.col(j) /= peak;
  }
  Matrix w = scaled + scaled.transpose();
  return AffinityMatrix(std::move(w));
}

Matrix normalized_laplacian(const AffinityMatrix& w) {
  const Matrix& v = w.values();
  const Eigen::Index n = v.rows();
  Vector inv_sqrt_degree(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double degree = v.row(i).sum();
    inv_sqrt_degree(i) = degree > 0.0 ? 1.0 / std::sqrt(degree) : 0.0;
  }
  Matrix l(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      l(i, j) = -inv_sqrt_degree(i) * v(i, j) * inv_sqrt_degree(j);
    }
    l(j, j) = inv_sqrt_degree(j) > 0.0 ? 1.0 : 0.0;
  }
  return l;
}

EigenDecomposition symmetric_eigendecomposition(const Matrix& s) {
  if (s.rows() != s.cols()) throw InputError("eigendecomposition needs a square matrix");
  if (!s.allFinite()) throw InputError("eigendecomposition input has non-finite entries");
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  const double asymmetry = (s - s.transpose()).cwiseAbs().maxCoeff();
  if (asymmetry > 1e-10 * scale) {
    throw InputError("matrix is not symmetric (max |S - S^T| = " +
                     std::to_string(asymmetry) + ")");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (s + s.transpose()));
  if (solver.info() != Eigen::Success) {
    throw InputError("symmetric eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

int estimate_num_clusters(std::span<const double> eigenvalues, int k_max) {
  if (eigenvalues.empty()) throw InputError("empty spectrum");
  const int n = static_cast<int>(eigenvalues.size());
  if (k_max < 1 || k_max > n - 1) {
    if (n == 1 && k_max >= 1) return 1;
    throw InputError("k_max=" + std::to_string(k_max) + " outside [1, " +
                     std::to_string(n - 1) + "]");
  }
  auto argmax_gap = [&](bool filtered) {
    int best_k = 0;
    double best_gap = -std::numeric_limits<double>::infinity();
    for (int k = 1; k <= k_max; ++k) {
      const double lo = eigenvalues[k - 1];
      const double hi = eigenvalues[k];
      if (filtered && hi < kEigengapRatio * lo) continue;
      if (hi - lo > best_gap) {
        best_gap = hi - lo;
        best_k = k;
      }
    }
    return best_k;
  };
  const int k = argmax_gap(true);
  return k > 0 ? k : argmax_gap(false);
}

namespace {

constexpr int kLloydMaxIter = 300;

std::vector<int> relabel_by_first_appearance(const std::vector<int>& labels, int k) {
  std::vector<int> mapping(k, -1);
  std::vector<int> out(labels.size());
  int next = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    int& m = mapping[labels[i]];
    if (m < 0) m = next++;
    out[i] = m;
  }
  return out;
}

KMeansResult kmeans_once(const Matrix& points, int k, std::uint64_t seed) {
  const Eigen::Index n = points.rows();
  std::mt19937_64 engine(seed);

  // D^2-weighted seeding.
  Matrix centers(k, points.cols());
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  centers.row(0) = points.row(pick(engine));
  Vector nearest = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = nearest.sum();
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      std::discrete_distribution<Eigen::Index> weighted(nearest.data(),
                                                        nearest.data() + n);
      chosen = weighted(engine);
    } else {
      chosen = pick(engine);
    }
    centers.row(c) = points.row(chosen);
    nearest = nearest.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }

  std::vector<int> labels(n, -1);
  Vector dist(n);
  for (int iter = 0; iter < kLloydMaxIter; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (points.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      dist(i) = best_d;
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }

    // An empty cluster takes the point farthest from its current center.
    std::vector<int> counts(k, 0);
    for (int l : labels) ++counts[l];
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      Eigen::Index far = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (counts[labels[i]] > 1 && (far < 0 || dist(i) > dist(far))) far = i;
      }
      --counts[labels[far]];
      labels[far] = c;
      counts[c] = 1;
      dist(far) = 0.0;
      changed = true;
    }

    centers.setZero();
    for (Eigen::Index i = 0; i < n; ++i) centers.row(labels[i]) += points.row(i);
    for (int c = 0; c < k; ++c) centers.row(c) /= static_cast<double>(counts[c]);

    if (!changed) break;
  }

  KMeansResult result;
  result.cost = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    result.cost += (points.row(i) - centers.row(labels[i])).squaredNorm();
  }
  result.labels = relabel_by_first_appearance(labels, k);
  return result;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int restarts) {
  const Eigen::Index n = points.rows();
  if (k < 1) throw InputError("k must be at least 1");
  if (k > n) {
    throw InputError("k=" + std::to_string(k) + " exceeds the number of points " +
                     std::to_string(n));
  }
  if (restarts < 1) throw InputError("restarts must be at least 1");
  KMeansResult best;
  best.cost = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    KMeansResult run = kmeans_once(points, k, seed + static_cast<std::uint64_t>(r));
    if (run.cost < best.cost) best = std::move(run);
  }
  return best;
}

SpectralResult cluster(const AffinityMatrix& w, const SpectralOptions& options) {
  const Eigen::Index n = w.size();
  if (n < 1) throw InputError("cannot cluster an empty affinity matrix");
  SpectralResult result;
  const EigenDecomposition eig = symmetric_eigendecomposition(normalized_laplacian(w));
  result.eigenvalues = eig.eigenvalues;

  if (n == 1) {
    result.labels = {0};
    result.embedding = eig.eigenvectors;
    return result;
  }

  const int k_max = options.k_max.value_or(static_cast<int>(std::min<Eigen::Index>(n - 1, 15)));
  result.eigengap_k = estimate_num_clusters(
      std::span<const double>(result.eigenvalues.data(), result.eigenvalues.size()), k_max);
  const int k = options.k_override.value_or(result.eigengap_k);
  if (k < 1 || k > n) {
    throw InputError("cluster count " + std::to_string(k) + " outside [1, " +
                     std::to_string(n) + "]");
  }
  result.estimated_k = k;
  result.embedding = eig.eigenvectors.leftCols(k);

  Matrix rows = result.embedding;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = rows.row(i).norm();
    if (norm > 0.0) rows.row(i) /= norm;
  }
  result.labels = kmeans(rows, k, options.seed, options.restarts).labels;
  return result;
}

double block_mass_fraction(const Matrix& w, std::span<const int> labels) {
  if (static_cast<Eigen::Index>(labels.size()) != w.rows() || w.rows() != w.cols()) {
    throw InputError("label count does not match matrix size");
  }
  double total = 0.0;
  double inside = 0.0;
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      const double v = std::abs(w(i, j));
      total += v;
      if (labels[i] == labels[j]) inside += v;
    }
  }
  return total > 0.0 ? inside / total : 1.0;
}

}  // namespace ssc
