#include "ssc/random_projection.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "ssc/errors.hpp"

namespace ssc {

ProjectionMatrix gaussian_matrix(Eigen::Index m, Eigen::Index D, std::uint64_t seed) {
  if (m < 1 || m > D) {
    throw InputError("sketch dimension m=" + std::to_string(m) +
                     " must satisfy 1 <= m <= D=" + std::to_string(D));
  }
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(m)));
  ProjectionMatrix g;
  g.seed = seed;
  g.values.resize(m, D);
  double* data = g.values.data();
  const Eigen::Index total = m * D;
  for (Eigen::Index i = 0; i < total; ++i) data[i] = normal(engine);
  return g;
}

DataMatrix project(const ProjectionMatrix& g, const DataMatrix& y) {
  if (g.ambient_dim() != y.dim()) {
    throw InputError("projection expects " + std::to_string(g.ambient_dim()) +
                     "-dimensional data, got " + std::to_string(y.dim()));
  }
  return DataMatrix(g.values * y.values());
}

DistortionReport jl_distortion(const DataMatrix& y, const DataMatrix& y_proj) {
  const Eigen::Index n = y.size();
  if (y_proj.size() != n) {
    throw InputError("column counts differ: " + std::to_string(n) + " vs " +
                     std::to_string(y_proj.size()));
  }
  if (n < 2) throw InputError("distortion needs at least 2 points");

  DistortionReport report;
  double max_ratio = 1.0;
  double min_ratio = 1.0;
  bool measured = false;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      ++report.pair_count;
      const double original = (y.values().col(i) - y.values().col(j)).norm();
      if (original == 0.0) {
        ++report.zero_distance_pairs;
        continue;
      }
      const double ratio =
          (y_proj.values().col(i) - y_proj.values().col(j)).norm() / original;
      if (!measured) {
        max_ratio = min_ratio = ratio;
        measured = true;
      } else {
        max_ratio = std::max(max_ratio, ratio);
        min_ratio = std::min(min_ratio, ratio);
      }
    }
  }
  report.max_expansion = std::max(max_ratio - 1.0, 0.0);
  report.max_contraction = std::max(1.0 - min_ratio, 0.0);
  return report;
}

}  // namespace ssc
