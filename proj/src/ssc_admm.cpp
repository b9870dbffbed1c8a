#include "ssc/ssc_admm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ssc/errors.hpp"

namespace ssc {

namespace {

// Column sums accumulated top to bottom so results never depend on
// vectorization width.
Vector column_sums(const Matrix& m) {
  Vector sums(m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) s += m(i, j);
    sums(j) = s;
  }
  return sums;
}

double max_abs(const Matrix& m) {
  double out = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      out = std::max(out, std::abs(m(i, j)));
  return out;
}

Matrix without_diagonal(const Matrix& m) {
  Matrix out = m;
  out.diagonal().setZero();
  return out;
}

void check_square(const Matrix& m, Eigen::Index n, const char* name) {
  if (m.rows() != n || m.cols() != n) {
    throw ConfigError(std::string(name) + " has shape " + std::to_string(m.rows()) +
                      "x" + std::to_string(m.cols()) + ", expected " +
                      std::to_string(n) + "x" + std::to_string(n));
  }
}

}  // namespace

double soft_threshold(double v, double s) noexcept {
  const double mag = std::abs(v) - s;
  if (mag <= 0.0) return 0.0;
  return v > 0.0 ? mag : -mag;
}

Matrix soft_threshold(const Matrix& m, double s) {
  return m.unaryExpr([s](double v) { return soft_threshold(v, s); });
}

void SolverConfig::validate() const {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ConfigError("mu must be positive");
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ConfigError("rho must be positive");
  if (max_iter < 1) throw ConfigError("max_iter must be at least 1");
  if (!(tol_primal > 0.0)) throw ConfigError("tol_primal must be positive");
  if (!(tol_change > 0.0)) throw ConfigError("tol_change must be positive");
}

double default_mu(const DataMatrix& y, double alpha) {
  const Matrix unit = normalize_columns(y.values());
  const Matrix gram = unit.transpose() * unit;
  double coherence = 0.0;
  for (Eigen::Index j = 0; j < gram.cols(); ++j)
    for (Eigen::Index i = 0; i < gram.rows(); ++i)
      if (i != j) coherence = std::max(coherence, std::abs(gram(i, j)));
  return coherence > 0.0 ? alpha / coherence : alpha;
}

SolverConfig default_config(const DataMatrix& y, double alpha) {
  SolverConfig cfg;
  cfg.mu = default_mu(y, alpha);
  cfg.rho = kDefaultRhoRatio * cfg.mu;
  return cfg;
}

SolverState SolverState::zeros(Eigen::Index n) {
  SolverState s;
  s.A = Matrix::Zero(n, n);
  s.C = Matrix::Zero(n, n);
  s.C_prev = Matrix::Zero(n, n);
  s.delta = Vector::Zero(n);
  s.Delta = Matrix::Zero(n, n);
  return s;
}

FactorizationCache::FactorizationCache(const DataMatrix& y, double mu, double rho)
    : mu_(mu), rho_(rho) {
  const Matrix& v = y.values();
  weighted_gram_ = mu * (v.transpose() * v);
  Matrix m = weighted_gram_;
  m.array() += rho;
  m.diagonal().array() += rho;
  llt_.compute(m);
  if (llt_.info() != Eigen::Success) {
    throw DivergenceError("factorization of the A-update system failed", 0);
  }
}

Matrix update_A(const SolverState& state, const DataMatrix& y,
                const SolverConfig& cfg, const FactorizationCache& cache) {
  const Eigen::Index n = cache.size();
  if (y.size() != n) {
    throw ConfigError("factorization built for " + std::to_string(n) +
                      " points, data has " + std::to_string(y.size()));
  }
  if (cache.mu() != cfg.mu || cache.rho() != cfg.rho) {
    throw ConfigError("factorization built with different mu/rho");
  }
  check_square(state.C, n, "C");
  check_square(state.Delta, n, "Delta");
  if (state.delta.size() != n) throw ConfigError("delta has wrong length");

  const double rho = cfg.rho;
  Matrix rhs = cache.weighted_gram();
  rhs.array() += rho;
  rhs += rho * without_diagonal(state.C);
  rhs.rowwise() -= state.delta.transpose();
  rhs -= state.Delta;
  return cache.solve(rhs);
}

CoefficientMatrix update_C(const Matrix& A_next, const Matrix& Delta, double rho) {
  if (A_next.rows() != Delta.rows() || A_next.cols() != Delta.cols()) {
    throw ConfigError("A and Delta shapes differ");
  }
  const double inv_rho = 1.0 / rho;
  Matrix j = soft_threshold(A_next + Delta * inv_rho, inv_rho);
  return CoefficientMatrix(std::move(j));
}

std::pair<Vector, Matrix> update_multipliers(const SolverState& state,
                                             const Matrix& A_next,
                                             const CoefficientMatrix& C_next,
                                             double rho) {
  const Eigen::Index n = state.delta.size();
  check_square(A_next, n, "A");
  check_square(C_next.values(), n, "C");
  check_square(state.Delta, n, "Delta");

  const Vector sums = column_sums(A_next);
  Vector delta = state.delta;
  for (Eigen::Index j = 0; j < n; ++j) delta(j) = delta(j) + rho * (sums(j) - 1.0);
  Matrix Delta = state.Delta;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      Delta(i, j) = Delta(i, j) + rho * (A_next(i, j) - C_next.values()(i, j));
  return {std::move(delta), std::move(Delta)};
}

Residuals residual_report(const SolverState& state) {
  Residuals r;
  const Vector sums = column_sums(state.A);
  r.feasibility = 0.0;
  for (Eigen::Index j = 0; j < sums.size(); ++j)
    r.feasibility = std::max(r.feasibility, std::abs(sums(j) - 1.0));
  r.coupling = max_abs(state.A - state.C);
  r.change = state.iteration == 0 ? std::numeric_limits<double>::infinity()
                                  : max_abs(state.C - state.C_prev);
  return r;
}

double ssc_objective(const DataMatrix& y, const Matrix& C, double mu) {
  const Matrix& v = y.values();
  return C.cwiseAbs().sum() + 0.5 * mu * (v - v * C).squaredNorm();
}

double augmented_lagrangian(const DataMatrix& y, const SolverConfig& cfg,
                            const Matrix& A, const Matrix& C,
                            const Vector& delta, const Matrix& Delta) {
  const Matrix& v = y.values();
  const Vector feas = column_sums(A).array() - 1.0;
  const Matrix coupling = A - without_diagonal(C);
  return C.cwiseAbs().sum() + 0.5 * cfg.mu * (v - v * A).squaredNorm() +
         0.5 * cfg.rho * feas.squaredNorm() + 0.5 * cfg.rho * coupling.squaredNorm() +
         delta.dot(feas) + (Delta.array() * coupling.array()).sum();
}

SolveResult solve_ssc(const DataMatrix& y, const SolverConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = y.size();
  if (n < 2) {
    throw InputError("sparse subspace clustering needs at least 2 points, got " +
                     std::to_string(n));
  }

  const FactorizationCache cache(y, cfg.mu, cfg.rho);
  SolverState state = SolverState::zeros(n);
  SolveResult result;
  Residuals last;

  while (state.iteration < cfg.max_iter) {
    Matrix A_next = update_A(state, y, cfg, cache);
    CoefficientMatrix C_next = update_C(A_next, state.Delta, cfg.rho);
    auto [delta_next, Delta_next] = update_multipliers(state, A_next, C_next, cfg.rho);

    if (!A_next.allFinite() || !C_next.values().allFinite() ||
        !delta_next.allFinite() || !Delta_next.allFinite()) {
      throw DivergenceError("non-finite iterate at iteration " +
                                std::to_string(state.iteration + 1),
                            state.iteration + 1);
    }

    state.C_prev = std::move(state.C);
    state.A = std::move(A_next);
    state.C = C_next.values();
    state.delta = std::move(delta_next);
    state.Delta = std::move(Delta_next);
    ++state.iteration;

    last = residual_report(state);
    state.residuals.push_back(last);

    if (last.feasibility <= cfg.tol_primal && last.coupling <= cfg.tol_primal &&
        last.change <= cfg.tol_change) {
      result.report.converged = true;
      break;
    }
  }

  result.report.iterations_used = state.iteration;
  result.report.final_residuals = last;
  result.C = CoefficientMatrix(std::move(state.C));
  result.history = std::move(state.residuals);
  return result;
}

}  // namespace ssc
