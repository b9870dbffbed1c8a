// Command-line driver: data -> (projection) -> ADMM -> spectral clustering.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ssc/errors.hpp"
#include "ssc/pipeline.hpp"

namespace {

template <typename T>
void copy_if_set(const CLI::Option* opt, const T& value, std::optional<T>& target) {
  if (opt->count() > 0) target = value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse subspace clustering: ADMM self-expression + spectral clustering"};
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::ignore);
  app.set_version_flag("--version", ssc::version());

  std::string frames, synth, project, out_labels, out_w, out_c, out_conv, out_meta;
  bool normalize = false;
  double mu = 0.0, rho = 0.0;
  int k = 0, k_max = 0;
  ssc::RunConfig config;

  auto* frames_opt = app.add_option("--frames", frames, "Glob of PGM frames (P2/P5)");
  auto* synth_opt =
      app.add_option("--synth", synth, "Synthetic union of subspaces: K,d,D,n_per,sigma,seed");
  auto* normalize_opt = app.add_flag("--normalize,!--no-normalize", normalize,
                                     "Scale columns to unit norm (default: on for frames)");
  auto* project_opt = app.add_option("--project", project, "Gaussian sketch: m,seed");
  auto* mu_opt = app.add_option("--mu", mu, "Data-fidelity weight (default 800/coherence)");
  auto* rho_opt = app.add_option("--rho", rho, "Penalty weight (default mu/100)");
  app.add_option("--max-iter", config.max_iter, "ADMM iteration cap")->capture_default_str();
  app.add_option("--tol-primal", config.tol_primal, "Feasibility tolerance")
      ->capture_default_str();
  app.add_option("--tol-change", config.tol_change, "Iterate-change tolerance")
      ->capture_default_str();
  auto* k_opt = app.add_option("--k", k, "Cluster count (default: eigengap estimate)");
  auto* k_max_opt = app.add_option("--k-max", k_max, "Largest cluster count considered");
  app.add_option("--spectral-seed", config.spectral_seed, "k-means seed")
      ->capture_default_str();
  app.add_option("--restarts", config.restarts, "k-means restarts")->capture_default_str();
  auto* labels_opt = app.add_option("--out-labels", out_labels, "Labels CSV");
  auto* w_opt = app.add_option("--out-w", out_w, "Affinity heatmap (PGM)");
  auto* c_opt = app.add_option("--out-c", out_c, "Coefficient heatmap (PGM)");
  auto* conv_opt = app.add_option("--out-conv", out_conv, "Convergence history CSV");
  auto* meta_opt = app.add_option("--out-meta", out_meta, "Run metadata (key=value)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ssc::ErrorKind::kConfig);
  }

  try {
    copy_if_set(frames_opt, frames, config.frames);
    if (synth_opt->count() > 0) config.synth = ssc::parse_synth_spec(synth);
    copy_if_set(normalize_opt, normalize, config.normalize);
    if (project_opt->count() > 0) config.projection = ssc::parse_projection_spec(project);
    copy_if_set(mu_opt, mu, config.mu);
    copy_if_set(rho_opt, rho, config.rho);
    copy_if_set(k_opt, k, config.k);
    copy_if_set(k_max_opt, k_max, config.k_max);
    if (labels_opt->count() > 0) config.out_labels = out_labels;
    if (w_opt->count() > 0) config.out_w = out_w;
    if (c_opt->count() > 0) config.out_c = out_c;
    if (conv_opt->count() > 0) config.out_conv = out_conv;
    if (meta_opt->count() > 0) config.out_meta = out_meta;

    const ssc::RunSummary summary = ssc::run(config);
    std::cout << "points=" << summary.points << " dim=" << summary.ambient_dim
              << " solve-dim=" << summary.solve_dim << " mu=" << summary.solver.mu
              << " converged=" << (summary.report.converged ? "yes" : "no")
              << " iterations=" << summary.report.iterations_used
              << " clusters=" << summary.spectral.estimated_k;
    if (summary.ground_truth_agreement) {
      std::cout << " agreement=" << *summary.ground_truth_agreement;
    }
    std::cout << '\n';
    return 0;
  } catch (const ssc::Error& e) {
    std::cerr << "ssc: " << ssc::to_string(e.kind()) << ": " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "ssc: internal error: " << e.what() << '\n';
    return 1;
  }
}
