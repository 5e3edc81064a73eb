#include "icatopo/reanalysis.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace icatopo {

ReanalysisContext::ReanalysisContext(std::shared_ptr<const SparsePattern> pattern)
    : pattern_(std::move(pattern)), sym_(LdltSymbolic::analyze(pattern_)), K0_(pattern_), Kcur_(pattern_) {}

void ReanalysisContext::factor(const SparseSym& K) {
  if (K.pattern_ptr() != pattern_ && !same_pattern(K, K0_))
    throw std::invalid_argument("ReanalysisContext::factor: pattern mismatch");
  factor_ = ldlt_factor(K, sym_);
  ++factorizations_;
  K0_.values() = K.values();
  has_delta_ = false;
}

void ReanalysisContext::set_current(const SparseSym& K) {
  if (!has_factor()) throw std::logic_error("ReanalysisContext::set_current: no reference factorization");
  if (K.pattern_ptr() != pattern_ && !same_pattern(K, K0_))
    throw std::invalid_argument("ReanalysisContext::set_current: pattern mismatch");
  Kcur_.values() = K.values();
  has_delta_ = true;
}

Eigen::VectorXd ReanalysisContext::solve_reference(const Eigen::VectorXd& b) const {
  if (!has_factor()) throw std::logic_error("ReanalysisContext: no reference factorization");
  return factor_.solve(b);
}

Eigen::VectorXd ReanalysisContext::apply_delta(const Eigen::VectorXd& v) const {
  if (!has_delta_) return Eigen::VectorXd::Zero(v.size());
  return delta_apply(Kcur_, K0_, v);
}

Eigen::VectorXd ReanalysisContext::apply_current(const Eigen::VectorXd& v) const {
  return has_delta_ ? Kcur_.multiply(v) : K0_.multiply(v);
}

IcaResult ica_solve(const ReanalysisContext& ctx, const Eigen::VectorXd& rhs, double eps, int k_max) {
  IcaResult out;
  const double rn = rhs.lpNorm<Eigen::Infinity>();
  if (rn == 0.0) {
    out.x = Eigen::VectorXd::Zero(rhs.size());
    out.report.converged = true;
    return out;
  }
  const Eigen::VectorXd x0 = ctx.solve_reference(rhs);
  if (!ctx.has_delta()) {
    out.x = x0;
    out.report.residual = (ctx.reference().multiply(x0) - rhs).lpNorm<Eigen::Infinity>() / rn;
    out.report.converged = out.report.residual < eps;
    return out;
  }

  Eigen::VectorXd x = x0;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0;; ++k) {
    const Eigen::VectorXd dx = ctx.apply_delta(x);
    // K_cur x = K0 x + dK x
    const double res = (ctx.reference().multiply(x) + dx - rhs).lpNorm<Eigen::Infinity>() / rn;
    if (res < best) {
      best = res;
      out.x = x;
      out.report.iterations = k;
      out.report.residual = res;
    }
    if (res < eps) {
      out.report.converged = true;
      return out;
    }
    if (k == k_max || !std::isfinite(res)) return out;
    x = x0 - ctx.solve_reference(dx);
  }
}

IcaResult ica_adjoint_solve(const ReanalysisContext& ctx, const Eigen::VectorXd& l, double eps_T, int k_max) {
  return ica_solve(ctx, -l, eps_T, k_max);
}

Eigen::VectorXd ca_solve(const ReanalysisContext& ctx, const Eigen::VectorXd& rhs, int q) {
  if (q < 1) throw std::invalid_argument("ca_solve: basis size must be at least 1");
  const Eigen::VectorXd x0 = ctx.solve_reference(rhs);
  if (rhs.lpNorm<Eigen::Infinity>() == 0.0) return x0;

  Eigen::MatrixXd S(rhs.size(), q);
  S.col(0) = x0;
  for (int j = 1; j < q; ++j) S.col(j) = -ctx.solve_reference(ctx.apply_delta(S.col(j - 1)));
  // Scaling the columns changes nothing in exact arithmetic but keeps the
  // reduced matrix balanced.
  Eigen::VectorXd scale(q);
  for (int j = 0; j < q; ++j) {
    const double nrm = S.col(j).norm();
    scale[j] = nrm > 0.0 ? nrm : 1.0;
    S.col(j) /= scale[j];
  }
  Eigen::MatrixXd KS(rhs.size(), q);
  for (int j = 0; j < q; ++j) KS.col(j) = ctx.apply_current(S.col(j));

  for (int m = q; m >= 1; --m) {
    const Eigen::MatrixXd A = S.leftCols(m).transpose() * KS.leftCols(m);
    const Eigen::VectorXd b = S.leftCols(m).transpose() * rhs;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    lu.setThreshold(1e-12);
    if (lu.isInvertible()) return S.leftCols(m) * lu.solve(b);
  }
  return x0;
}

double estimate_norm_B(const ReanalysisContext& ctx, int max_iterations, double rel_tol) {
  if (!ctx.has_delta()) return 0.0;
  const int n = ctx.n();
  std::mt19937 gen(12345);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = dist(gen);
  x.normalize();

  double sigma = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    const Eigen::VectorXd y = ctx.solve_reference(ctx.apply_delta(x));  // B x
    const double prev = sigma;
    sigma = y.norm();
    if (sigma == 0.0 || !std::isfinite(sigma)) return sigma;
    if (std::abs(sigma - prev) <= rel_tol * sigma) return sigma;
    // B^T y = dK K0^{-1} y  (both factors symmetric)
    Eigen::VectorXd z = ctx.apply_delta(ctx.solve_reference(y));
    const double zn = z.norm();
    if (zn == 0.0) break;
    x = z / zn;
  }
  return ctx.solve_reference(ctx.apply_delta(x)).norm();
}

}  // namespace icatopo
