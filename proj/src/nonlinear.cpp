#include "icatopo/nonlinear.hpp"

#include "icatopo/error.hpp"

#include <cmath>
#include <optional>

namespace icatopo {

StrategyFlags flags(Strategy s) {
  switch (s) {
    case Strategy::N: return {true, 1, 1, false};
    case Strategy::MN: return {false, 1, 0, false};
    case Strategy::upK1: return {false, 1, 1, false};
    case Strategy::upK1g: return {false, 1, 1, true};
    case Strategy::upK100: return {false, 1, 100, false};
    case Strategy::upK100g: return {false, 1, 100, true};
    case Strategy::upK03K100g: return {false, 3, 100, true};
  }
  throw std::invalid_argument("flags: unknown strategy");
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::N: return "N";
    case Strategy::MN: return "MN";
    case Strategy::upK1: return "upK1";
    case Strategy::upK1g: return "upK1g";
    case Strategy::upK100: return "upK100";
    case Strategy::upK100g: return "upK100g";
    case Strategy::upK03K100g: return "upK03K100g";
  }
  return "?";
}

Strategy parse_strategy(std::string_view name) {
  for (Strategy s : kAllStrategies)
    if (to_string(s) == name) return s;
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

Action decide_action(Strategy s, int outer_iter, int newton_iter, const NewtonCounters& c, int period) {
  const StrategyFlags f = flags(s);
  if (outer_iter <= 5 || f.refactor_every_newton_iter) return Action::Refactor;
  if (newton_iter == 0 && outer_iter % f.refactor_every_k_outer == 0) return Action::Refactor;
  if (f.delta_refresh_period == 0) return Action::ReuseHeldDelta;
  if (f.delta_refresh_period == 1) return Action::ReuseFreshDelta;
  const int pr = f.delta_refresh_period == 100 ? period : f.delta_refresh_period;
  return c.global_iterations / pr > c.last_refresh / pr ? Action::ReuseFreshDelta : Action::ReuseHeldDelta;
}

namespace {

struct Solver {
  const Assembler& as;
  const Eigen::VectorXd& rho;
  double p;
  ReanalysisContext& ctx;
  const NewtonOptions& opt;
  Timings* timings;
  NewtonStats& stats;
  SparseSym K;

  Eigen::VectorXd residual(const Eigen::VectorXd& u) {
    ScopedTimer t(timings, TimeCategory::Rhs);
    return as.residual(rho, p, u);
  }

  void assemble_tangent(const Eigen::VectorXd& u) {
    ScopedTimer t(timings, TimeCategory::Tangent);
    as.tangent(rho, p, u, K);
    ++stats.tangent_assemblies;
  }

  // Factor K_T(u) and return the exact step.
  Eigen::VectorXd exact_step(const Eigen::VectorXd& u, const Eigen::VectorXd& r) {
    assemble_tangent(u);
    {
      ScopedTimer t(timings, TimeCategory::Factorizations);
      ctx.factor(K);
    }
    ScopedTimer t(timings, TimeCategory::LinearSystems);
    return ctx.solve_reference(-r);
  }

  // Armijo backtracking on ||r||^2. Returns the accepted state or nothing.
  std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> line_search(const Eigen::VectorXd& u,
                                                                         const Eigen::VectorXd& s, double merit0,
                                                                         double slope) {
    double alpha = 1.0;
    for (int b = 0; b <= opt.max_backtracks; ++b, alpha *= 0.5) {
      Eigen::VectorXd trial = u + alpha * s;
      try {
        Eigen::VectorXd rt = residual(trial);
        const double m = rt.squaredNorm();
        if (std::isfinite(m) && m <= merit0 + opt.armijo_c1 * alpha * slope) {
          stats.backtracks += b;
          return std::make_pair(std::move(trial), std::move(rt));
        }
      } catch (const NonpositiveJacobianError&) {
        // rejected trial
      }
    }
    stats.backtracks += opt.max_backtracks;
    return std::nullopt;
  }
};

}  // namespace

NewtonResult newton_solve(const Assembler& as, const Eigen::VectorXd& rho, double p, const Eigen::VectorXd& u0,
                          Strategy strategy, ReanalysisContext& ctx, int outer_iter, NewtonCounters& counters,
                          const NewtonOptions& opt, Timings* timings) {
  NewtonResult out;
  NewtonStats& st = out.stats;
  const long fact0 = ctx.factorizations();
  Solver S{as, rho, p, ctx, opt, timings, st, as.make_matrix()};

  Eigen::VectorXd u = u0;
  Eigen::VectorXd r = S.residual(u);
  const Strategy effective = opt.force_full ? Strategy::N : strategy;
  // 1 after a stalled step on held data, 2 after one on a fresh dK
  int stale = 0;
  const bool pure_modified = flags(effective).delta_refresh_period == 0;  // MN never builds a dK

  for (int it = 0;; ++it) {
    st.final_residual = r.lpNorm<Eigen::Infinity>();
    if (st.final_residual <= opt.tol) break;
    if (it == opt.max_iter || !std::isfinite(st.final_residual)) {
      st.factorizations = ctx.factorizations() - fact0;
      throw NewtonNonconvergence("Newton did not converge: ||r||_inf = " + std::to_string(st.final_residual) +
                                     " after " + std::to_string(it) + " iterations",
                                 st);
    }

    Action action = decide_action(effective, outer_iter, it, counters, opt.refresh_period);
    if (action != Action::Refactor && !ctx.has_factor()) action = Action::Refactor;
    bool early_refresh = false;
    if (action == Action::ReuseHeldDelta && stale == 1) {
      action = Action::ReuseFreshDelta;
      early_refresh = true;
      ++st.stale_refreshes;
    } else if (action != Action::Refactor && stale == 2) {
      ++st.fallbacks;
      action = Action::Refactor;
    }

    Eigen::VectorXd s;
    bool exact = action == Action::Refactor;
    if (exact) {
      s = S.exact_step(u, r);
    } else {
      if (action == Action::ReuseFreshDelta) {
        S.assemble_tangent(u);
        ctx.set_current(S.K);
        if (!early_refresh) counters.last_refresh = counters.global_iterations;
      }
      if (opt.monitor_norm_B) st.max_norm_B = std::max(st.max_norm_B, estimate_norm_B(ctx));
      IcaResult ica;
      {
        ScopedTimer t(timings, TimeCategory::LinearSystems);
        ica = ica_solve(ctx, -r, opt.eps_R, opt.ica_max);
      }
      st.ica_iterations.push_back(ica.report.iterations);
      if (ica.report.converged) {
        s = std::move(ica.x);
      } else {
        ++st.fallbacks;
        s = S.exact_step(u, r);
        exact = true;
      }
    }

    const double merit0 = r.squaredNorm();
    double slope = 2.0 * r.dot(ctx.apply_current(s));
    if (!exact && !(slope < 0.0)) {
      ++st.fallbacks;
      s = S.exact_step(u, r);
      exact = true;
      slope = -2.0 * merit0;
    }
    auto accepted = S.line_search(u, s, merit0, slope);
    if (!accepted && !exact) {
      ++st.fallbacks;
      s = S.exact_step(u, r);
      exact = true;
      accepted = S.line_search(u, s, merit0, -2.0 * merit0);
    }
    if (!accepted) {
      st.factorizations = ctx.factorizations() - fact0;
      throw NewtonNonconvergence("Armijo line search failed at Newton iteration " + std::to_string(it), st);
    }
    u = std::move(accepted->first);
    r = std::move(accepted->second);
    if (exact || r.lpNorm<Eigen::Infinity>() <= opt.stagnation_ratio * st.final_residual) stale = 0;
    else stale = action == Action::ReuseFreshDelta || pure_modified ? 2 : 1;
    ++st.iterations;
    ++counters.global_iterations;
  }

  st.converged = true;
  st.factorizations = ctx.factorizations() - fact0;
  out.u = std::move(u);
  out.r = std::move(r);
  return out;
}

}  // namespace icatopo
