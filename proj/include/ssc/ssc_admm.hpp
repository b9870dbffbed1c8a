#pragma once

#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>

#include "ssc/matrix.hpp"

namespace ssc {

/// Soft-thresholding T_s(v) = max(|v| - s, 0) * sgn(v).
double soft_threshold(double v, double s) noexcept;
Matrix soft_threshold(const Matrix& m, double s);

struct SolverConfig {
  double mu = 0.0;   // data-fidelity weight
  double rho = 0.0;  // penalty weight
  int max_iter = 5000;
  double tol_primal = 1e-4;
  double tol_change = 1e-5;

  /// Throws ConfigError unless mu, rho, tolerances > 0 and max_iter >= 1.
  void validate() const;
};

inline constexpr double kDefaultMuAlpha = 800.0;
/// Default rho / mu. rho = mu leaves the iterate-change residual stalled
/// for thousands of iterations once the primal residuals vanish.
inline constexpr double kDefaultRhoRatio = 0.01;

/// alpha / max_{i != j} |y_i^T y_j| computed on unit-normalized columns.
/// Falls back to alpha when every pair of columns is orthogonal.
double default_mu(const DataMatrix& y, double alpha = kDefaultMuAlpha);

/// Defaults: mu from default_mu, rho = kDefaultRhoRatio * mu, remaining
/// fields as declared.
SolverConfig default_config(const DataMatrix& y, double alpha = kDefaultMuAlpha);

/// (||A^T 1 - 1||_inf, ||A - C||_inf, ||C_k - C_{k-1}||_inf)
struct Residuals {
  double feasibility = 0.0;
  double coupling = 0.0;
  double change = std::numeric_limits<double>::infinity();
};

struct SolverState {
  Matrix A;
  Matrix C;
  Matrix C_prev;
  Vector delta;
  Matrix Delta;
  long iteration = 0;
  std::vector<Residuals> residuals;

  /// All-zero start of size n.
  static SolverState zeros(Eigen::Index n);
  Eigen::Index size() const noexcept { return C.cols(); }
};

/// Cholesky factor of M = mu Y^T Y + rho I + rho 1 1^T, fixed for a solve.
class FactorizationCache {
 public:
  FactorizationCache(const DataMatrix& y, double mu, double rho);

  Eigen::Index size() const noexcept { return weighted_gram_.cols(); }
  double mu() const noexcept { return mu_; }
  double rho() const noexcept { return rho_; }
  /// mu Y^T Y
  const Matrix& weighted_gram() const noexcept { return weighted_gram_; }
  Matrix solve(const Matrix& rhs) const { return llt_.solve(rhs); }

 private:
  double mu_;
  double rho_;
  Matrix weighted_gram_;
  Eigen::LLT<Matrix> llt_;
};

/// Minimizer of the augmented Lagrangian over A with C, delta, Delta fixed:
/// M A = mu Y^T Y + rho 1 1^T + rho (C - diag C) - 1 delta^T - Delta.
Matrix update_A(const SolverState& state, const DataMatrix& y,
                const SolverConfig& cfg, const FactorizationCache& cache);

/// J = T_{1/rho}(A_next + Delta / rho); returns J with its diagonal zeroed.
CoefficientMatrix update_C(const Matrix& A_next, const Matrix& Delta, double rho);

/// delta + rho (A^T 1 - 1), Delta + rho (A - C).
std::pair<Vector, Matrix> update_multipliers(const SolverState& state,
                                             const Matrix& A_next,
                                             const CoefficientMatrix& C_next,
                                             double rho);

/// Residuals of the current iterate; change is +inf at iteration 0.
Residuals residual_report(const SolverState& state);

/// ||C||_1 + (mu / 2) ||Y - Y C||_F^2
double ssc_objective(const DataMatrix& y, const Matrix& C, double mu);

/// Full augmented Lagrangian at (A, C, delta, Delta).
double augmented_lagrangian(const DataMatrix& y, const SolverConfig& cfg,
                            const Matrix& A, const Matrix& C,
                            const Vector& delta, const Matrix& Delta);

struct SolveReport {
  bool converged = false;
  long iterations_used = 0;
  Residuals final_residuals;
};

struct SolveResult {
  CoefficientMatrix C;
  SolveReport report;
  std::vector<Residuals> history;
};

/// Runs A -> C -> multiplier updates from the all-zero start until both
/// primal residuals are within tol_primal and the C change within
/// tol_change, or max_iter is reached. Throws InputError for N < 2 and
/// DivergenceError when an iterate becomes non-finite.
SolveResult solve_ssc(const DataMatrix& y, const SolverConfig& cfg);

}  // namespace ssc
