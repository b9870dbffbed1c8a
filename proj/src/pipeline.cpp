#include "ssc/pipeline.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "ssc/data_io.hpp"
#include "ssc/errors.hpp"

namespace ssc {

namespace {

std::vector<std::string> split_fields(const std::string& text) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(text);
  while (std::getline(in, field, ',')) out.push_back(field);
  return out;
}

template <typename T>
T parse_number(const std::string& text, const char* what) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && *first == ' ') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError(std::string("cannot parse ") + what + " from '" + text + "'");
  }
  return value;
}

template <typename F>
auto stage(const char* name, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(name) + ": " + e.what());
  }
}

class OutputGuard {
 public:
  ~OutputGuard() {
    if (committed_) return;
    for (const auto& p : written_) {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
  }
  void add(const std::filesystem::path& p) { written_.push_back(p); }
  void commit() { committed_ = true; }
  const std::vector<std::filesystem::path>& written() const { return written_; }

 private:
  std::vector<std::filesystem::path> written_;
  bool committed_ = false;
};

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw IoError("cannot write " + path.string());
}

std::string quoted(const std::string& s) { return '"' + s + '"'; }

}  // namespace

std::string version() {
#ifdef SSC_VERSION
  return SSC_VERSION;
#else
  return "unknown";
#endif
}

SynthSpec parse_synth_spec(const std::string& text) {
  const auto f = split_fields(text);
  if (f.size() != 6) {
    throw ConfigError("--synth expects K,d,D,n_per,sigma,seed, got '" + text + "'");
  }
  SynthSpec s;
  s.K = parse_number<int>(f[0], "K");
  s.d = parse_number<int>(f[1], "d");
  s.D = parse_number<int>(f[2], "D");
  s.n_per = parse_number<int>(f[3], "n_per");
  s.sigma = parse_number<double>(f[4], "sigma");
  s.seed = parse_number<std::uint64_t>(f[5], "seed");
  return s;
}

ProjectionSpec parse_projection_spec(const std::string& text) {
  const auto f = split_fields(text);
  if (f.size() != 2) throw ConfigError("--project expects m,seed, got '" + text + "'");
  return {parse_number<int>(f[0], "m"), parse_number<std::uint64_t>(f[1], "seed")};
}

void RunConfig::validate() const {
  if (frames.has_value() == synth.has_value()) {
    throw ConfigError("exactly one of --frames or --synth must be given");
  }
  if (synth) {
    if (synth->K < 1 || synth->d < 1 || synth->d >= synth->D || synth->n_per < 1 ||
        !(synth->sigma >= 0.0)) {
      throw ConfigError("--synth needs K >= 1, 1 <= d < D, n_per >= 1, sigma >= 0");
    }
  }
  if (projection && projection->m < 1) throw ConfigError("--project needs m >= 1");
  if (mu && !(*mu > 0.0)) throw ConfigError("--mu must be positive");
  if (rho && !(*rho > 0.0)) throw ConfigError("--rho must be positive");
  if (max_iter < 1) throw ConfigError("--max-iter must be at least 1");
  if (!(tol_primal > 0.0)) throw ConfigError("--tol-primal must be positive");
  if (!(tol_change > 0.0)) throw ConfigError("--tol-change must be positive");
  if (k && *k < 1) throw ConfigError("--k must be at least 1");
  if (k_max && *k_max < 1) throw ConfigError("--k-max must be at least 1");
  if (restarts < 1) throw ConfigError("--restarts must be at least 1");
}

double compare_partitions(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) {
    throw InputError("partitions have different lengths: " + std::to_string(a.size()) +
                     " vs " + std::to_string(b.size()));
  }
  const std::size_t n = a.size();
  if (n < 2) return 1.0;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if ((a[i] == a[j]) == (b[i] == b[j])) ++agree;
    }
  }
  return static_cast<double>(agree) / static_cast<double>(n * (n - 1) / 2);
}

RunSummary run(const RunConfig& config) {
  stage("config", [&] { config.validate(); });

  RunSummary summary;
  DataMatrix y = stage("ingest", [&] {
    if (config.synth) {
      const SynthSpec& s = *config.synth;
      SyntheticDataset data =
          synth_union_of_subspaces(s.K, s.d, s.D, s.n_per, s.sigma, s.seed);
      summary.ground_truth = data.labels;
      summary.normalized = config.normalize.value_or(false);
      return summary.normalized ? DataMatrix(normalize_columns(data.Y.values()))
                                : std::move(data.Y);
    }
    summary.normalized = config.normalize.value_or(true);
    return frames_to_matrix(load_frames(*config.frames), summary.normalized);
  });
  summary.points = y.size();
  summary.ambient_dim = y.dim();

  if (config.projection) {
    y = stage("projection", [&] {
      const ProjectionMatrix g =
          gaussian_matrix(config.projection->m, y.dim(), config.projection->seed);
      DataMatrix projected = project(g, y);
      if (y.size() >= 2) summary.distortion = jl_distortion(y, projected);
      return projected;
    });
  }
  summary.solve_dim = y.dim();

  stage("solver", [&] {
    SolverConfig cfg;
    cfg.mu = config.mu ? *config.mu : default_mu(y);
    cfg.rho = config.rho.value_or(kDefaultRhoRatio * cfg.mu);
    cfg.max_iter = config.max_iter;
    cfg.tol_primal = config.tol_primal;
    cfg.tol_change = config.tol_change;
    SolveResult result = solve_ssc(y, cfg);
    summary.solver = cfg;
    summary.report = result.report;
    summary.history = std::move(result.history);
    summary.C = std::move(result.C);
  });

  stage("spectral", [&] {
    summary.W = build_affinity(summary.C);
    SpectralOptions options;
    options.k_override = config.k;
    options.k_max = config.k_max;
    options.seed = config.spectral_seed;
    options.restarts = config.restarts;
    summary.spectral = cluster(summary.W, options);
    summary.block_mass = block_mass_fraction(summary.W.values(), summary.spectral.labels);
    if (!summary.ground_truth.empty()) {
      summary.ground_truth_agreement =
          compare_partitions(summary.ground_truth, summary.spectral.labels);
    }
  });

  OutputGuard guard;
  stage("export", [&] {
    if (config.out_labels) {
      guard.add(*config.out_labels);
      export_labels(summary.spectral.labels, *config.out_labels);
    }
    if (config.out_w) {
      guard.add(*config.out_w);
      export_heatmap(summary.W.values(), *config.out_w);
    }
    if (config.out_c) {
      guard.add(*config.out_c);
      export_heatmap(summary.C.values(), *config.out_c);
    }
    if (config.out_conv) {
      guard.add(*config.out_conv);
      export_convergence(summary.history, *config.out_conv);
    }
    if (config.out_meta) {
      guard.add(*config.out_meta);
      write_text(*config.out_meta, render_metadata(config, summary));
    }
  });
  summary.written = guard.written();
  guard.commit();
  return summary;
}

std::string render_metadata(const RunConfig& config, const RunSummary& summary) {
  std::ostringstream out;
  out << "# sparse subspace clustering run\n";
  out << "software-version=" << quoted(version()) << '\n';
  if (config.frames) out << "frames=" << quoted(*config.frames) << '\n';
  if (config.synth) {
    const SynthSpec& s = *config.synth;
    out << "synth=" << quoted(std::to_string(s.K) + "," + std::to_string(s.d) + "," +
                              std::to_string(s.D) + "," + std::to_string(s.n_per) + "," +
                              format_double(s.sigma) + "," + std::to_string(s.seed))
        << '\n';
  }
  out << "normalize=" << (summary.normalized ? "true" : "false") << '\n';
  if (config.projection) {
    out << "project=" << quoted(std::to_string(config.projection->m) + "," +
                                std::to_string(config.projection->seed))
        << '\n';
    out << "projection-variance=\"1/m\"\n";
  }
  out << "mu=" << format_double(summary.solver.mu) << '\n';
  out << "rho=" << format_double(summary.solver.rho) << '\n';
  out << "mu-source=" << (config.mu ? "\"explicit\"" : "\"800/coherence\"") << '\n';
  out << "rho-source=" << (config.rho ? "\"explicit\"" : "\"mu/100\"") << '\n';
  out << "max-iter=" << summary.solver.max_iter << '\n';
  out << "tol-primal=" << format_double(summary.solver.tol_primal) << '\n';
  out << "tol-change=" << format_double(summary.solver.tol_change) << '\n';
  if (config.k) out << "k=" << *config.k << '\n';
  if (config.k_max) out << "k-max=" << *config.k_max << '\n';
  out << "spectral-seed=" << config.spectral_seed << '\n';
  out << "restarts=" << config.restarts << '\n';
  out << "affinity=" << quoted(kAffinityFormula) << '\n';
  auto path_line = [&](const char* key, const std::optional<std::filesystem::path>& p) {
    if (p) out << key << '=' << quoted(p->string()) << '\n';
  };
  path_line("out-labels", config.out_labels);
  path_line("out-w", config.out_w);
  path_line("out-c", config.out_c);
  path_line("out-conv", config.out_conv);
  path_line("out-meta", config.out_meta);
  out << "points=" << summary.points << '\n';
  out << "ambient-dim=" << summary.ambient_dim << '\n';
  out << "solve-dim=" << summary.solve_dim << '\n';
  out << "converged=" << (summary.report.converged ? "true" : "false") << '\n';
  out << "iterations=" << summary.report.iterations_used << '\n';
  out << "estimated-k=" << summary.spectral.estimated_k << '\n';
  out << "eigengap-k=" << summary.spectral.eigengap_k << '\n';
  out << "block-mass=" << format_double(summary.block_mass) << '\n';
  if (summary.distortion) {
    out << "jl-max-expansion=" << format_double(summary.distortion->max_expansion) << '\n';
    out << "jl-max-contraction=" << format_double(summary.distortion->max_contraction)
        << '\n';
  }
  if (summary.ground_truth_agreement) {
    out << "ground-truth-agreement=" << format_double(*summary.ground_truth_agreement)
        << '\n';
  }
  return out.str();
}

}  // namespace ssc
