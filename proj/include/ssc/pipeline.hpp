#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ssc/random_projection.hpp"
#include "ssc/spectral.hpp"
#include "ssc/ssc_admm.hpp"

namespace ssc {

struct SynthSpec {
  int K = 0;
  int d = 0;
  int D = 0;
  int n_per = 0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

struct ProjectionSpec {
  int m = 0;
  std::uint64_t seed = 0;
};

/// "K,d,D,n_per,sigma,seed"; throws ConfigError on malformed text.
SynthSpec parse_synth_spec(const std::string& text);
/// "m,seed"
ProjectionSpec parse_projection_spec(const std::string& text);

struct RunConfig {
  std::optional<std::string> frames;
  std::optional<SynthSpec> synth;
  std::optional<bool> normalize;  // unset: on for frames, off for synthetic
  std::optional<ProjectionSpec> projection;

  std::optional<double> mu;   // unset: default_mu
  std::optional<double> rho;  // unset: kDefaultRhoRatio * mu
  int max_iter = 5000;
  double tol_primal = 1e-4;
  double tol_change = 1e-5;

  std::optional<int> k;
  std::optional<int> k_max;
  std::uint64_t spectral_seed = 0;
  int restarts = 10;

  std::optional<std::filesystem::path> out_labels;
  std::optional<std::filesystem::path> out_w;
  std::optional<std::filesystem::path> out_c;
  std::optional<std::filesystem::path> out_conv;
  std::optional<std::filesystem::path> out_meta;

  /// Throws ConfigError unless exactly one input source is set and every
  /// numeric field is in range.
  void validate() const;
};

struct RunSummary {
  Eigen::Index points = 0;
  Eigen::Index ambient_dim = 0;
  Eigen::Index solve_dim = 0;
  bool normalized = false;
  SolverConfig solver;
  SolveReport report;
  std::vector<Residuals> history;
  CoefficientMatrix C;
  AffinityMatrix W;
  SpectralResult spectral;
  std::optional<DistortionReport> distortion;
  std::vector<int> ground_truth;  // synthetic input only
  std::optional<double> ground_truth_agreement;
  double block_mass = 0.0;        // fraction of W inside the found clusters
  std::vector<std::filesystem::path> written;
};

/// Ingest -> optional projection -> ADMM -> spectral clustering -> exports.
/// Errors are rethrown with the failing stage prefixed; files written
/// before a failure are removed.
RunSummary run(const RunConfig& config);

/// key=value lines accepted back by the CLI's --config.
std::string render_metadata(const RunConfig& config, const RunSummary& summary);

/// Fraction of point pairs on which both partitions agree about
/// same-cluster versus different-cluster. Throws InputError on length
/// mismatch; a single point gives 1.
double compare_partitions(std::span<const int> a, std::span<const int> b);

std::string version();

}  // namespace ssc
