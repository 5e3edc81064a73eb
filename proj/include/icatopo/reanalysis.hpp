#pragma once

#include "icatopo/sparse.hpp"

#include <Eigen/Core>

#include <memory>

namespace icatopo {

/// Held factorization of a reference tangent K0 together with the current
/// approximation K_cur = K0 + dK. dK is kept as the difference of two
/// matrices on one pattern and only ever applied to vectors.
class ReanalysisContext {
 public:
  explicit ReanalysisContext(std::shared_ptr<const SparsePattern> pattern);

  /// Factors K and makes it the reference; clears dK.
  void factor(const SparseSym& K);
  /// dK := K - K0. Requires a held factorization.
  void set_current(const SparseSym& K);
  void clear_delta() { has_delta_ = false; }

  bool has_factor() const { return factor_.valid(); }
  bool has_delta() const { return has_delta_; }
  int n() const { return static_cast<int>(pattern_->n); }
  const SparseSym& reference() const { return K0_; }
  const std::shared_ptr<const LdltSymbolic>& symbolic() const { return sym_; }

  /// K0^{-1} b.
  Eigen::VectorXd solve_reference(const Eigen::VectorXd& b) const;
  /// dK v (zero when no delta is held).
  Eigen::VectorXd apply_delta(const Eigen::VectorXd& v) const;
  /// K_cur v.
  Eigen::VectorXd apply_current(const Eigen::VectorXd& v) const;

  /// Number of numeric factorizations performed through this context.
  long factorizations() const { return factorizations_; }

 private:
  std::shared_ptr<const SparsePattern> pattern_;
  std::shared_ptr<const LdltSymbolic> sym_;
  LdltFactorization factor_;
  SparseSym K0_;
  SparseSym Kcur_;
  bool has_delta_ = false;
  long factorizations_ = 0;
};

struct IcaReport {
  int iterations = 0;     // k of the returned iterate
  double residual = 0.0;  // relative residual of the returned iterate
  bool converged = false;
  bool fallback = false;  // set by callers that had to refactor
};

struct IcaResult {
  Eigen::VectorXd x;
  IcaReport report;
};

/// Solves K_cur x = rhs by x(k+1) = x~ - B x(k), x(0) = x~ = K0^{-1} rhs,
/// B = K0^{-1} dK. Returns the first iterate with
/// ||K_cur x - rhs||_inf < eps ||rhs||_inf, otherwise the best of
/// x(0)..x(k_max) with converged = false.
IcaResult ica_solve(const ReanalysisContext& ctx, const Eigen::VectorXd& rhs, double eps, int k_max = 10);

/// Adjoint system K_cur lambda = -l with the same iteration.
IcaResult ica_adjoint_solve(const ReanalysisContext& ctx, const Eigen::VectorXd& l, double eps_T = 1e-8,
                            int k_max = 10);

/// Combined-approximations step: Galerkin projection of K_cur x = rhs onto
/// the first q terms x~, -B x~, B^2 x~, ... of the binomial series. Drops
/// trailing basis vectors while the reduced matrix is singular.
Eigen::VectorXd ca_solve(const ReanalysisContext& ctx, const Eigen::VectorXd& rhs, int q);

/// Power-iteration estimate of ||K0^{-1} dK||_2 through B^T B, matrix-free.
/// Stops once successive estimates agree to rel_tol.
double estimate_norm_B(const ReanalysisContext& ctx, int max_iterations = 200, double rel_tol = 1e-7);

}  // namespace icatopo
