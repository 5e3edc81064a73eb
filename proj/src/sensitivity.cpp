#include "icatopo/sensitivity.hpp"

namespace icatopo {

AdjointSolution solve_adjoint(const Assembler& as, const Eigen::VectorXd& rho, double p,
                              const Eigen::VectorXd& u_hat, ReanalysisContext& ctx, const AdjointOptions& opt,
                              Timings* timings) {
  AdjointSolution out;
  const Eigen::VectorXd& l = as.output_selector();
  if (opt.reference_is_exact && ctx.has_factor() && !ctx.has_delta()) {
    ScopedTimer t(timings, TimeCategory::LinearSystems);
    out.lambda = ctx.solve_reference(-l);
    out.method = AdjointMethod::Reused;
    return out;
  }

  SparseSym K = as.make_matrix();
  {
    ScopedTimer t(timings, TimeCategory::Tangent);
    as.tangent(rho, p, u_hat, K);
  }
  if (opt.use_ica && ctx.has_factor()) {
    ctx.set_current(K);
    IcaResult ica;
    {
      ScopedTimer t(timings, TimeCategory::LinearSystems);
      ica = ica_adjoint_solve(ctx, l, opt.eps_T, opt.ica_max);
    }
    out.report = ica.report;
    if (ica.report.converged) {
      out.lambda = std::move(ica.x);
      out.method = AdjointMethod::Ica;
      return out;
    }
    out.report.fallback = true;
  }
  {
    ScopedTimer t(timings, TimeCategory::Factorizations);
    ctx.factor(K);
  }
  ScopedTimer t(timings, TimeCategory::LinearSystems);
  out.lambda = ctx.solve_reference(-l);
  out.method = AdjointMethod::Direct;
  return out;
}

Eigen::VectorXd objective_gradient(const Assembler& as, const Eigen::VectorXd& rho, double p,
                                   const Eigen::VectorXd& u_hat, const Eigen::VectorXd& lambda) {
  const int n_el = as.mesh().n_el();
  Eigen::VectorXd g(n_el);
  for (int e = 0; e < n_el; ++e) {
    const Vec8 dr = as.residual_density_derivative(e, rho, p, u_hat);
    const Vec8 le = as.element_displacements(e, lambda);  // same gather as for u
    g[e] = le.dot(dr);
  }
  return g;
}

}  // namespace icatopo
