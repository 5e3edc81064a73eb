#include "icatopo/optimizer.hpp"

#include "icatopo/error.hpp"
#include "icatopo/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace icatopo {

SubproblemResult knapsack_lp(const Eigen::VectorXd& g, const Eigen::VectorXd& a, const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi, const Eigen::VectorXd& rho, double V) {
  const int n = static_cast<int>(g.size());
  if (a.size() != n || lo.size() != n || hi.size() != n || rho.size() != n)
    throw std::invalid_argument("knapsack_lp: length mismatch");
  for (int i = 0; i < n; ++i) {
    if (!(a[i] > 0.0)) throw std::invalid_argument("knapsack_lp: volume weights must be positive");
    if (lo[i] > hi[i]) throw InfeasibleError("knapsack_lp: empty box");
  }
  const double vmin = a.dot(lo), vmax = a.dot(hi);
  const double slack = 1e-12 * std::max({std::abs(V), std::abs(vmax), 1e-300});
  if (V < vmin - slack || V > vmax + slack) throw InfeasibleError("knapsack_lp: volume target outside the box");

  std::vector<double> bp(n);
  for (int i = 0; i < n; ++i) bp[i] = -g[i] / a[i];
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return bp[i] > bp[j]; });

  SubproblemResult out;
  out.rho = lo;
  if (n == 0) return out;
  if (V <= vmin) {
    out.theta = bp[order.front()];
    return out;
  }

  // Large theta puts every element at its lower bound; lowering theta past
  // a breakpoint moves that element to its upper bound.
  double vol = vmin;
  for (int s = 0; s < n;) {
    int e = s;
    double add = 0.0;
    while (e < n && bp[order[e]] == bp[order[s]]) {
      const int i = order[e++];
      add += a[i] * (hi[i] - lo[i]);
    }
    const double theta = bp[order[s]];
    if (vol + add < V && e < n) {
      for (int k = s; k < e; ++k) out.rho[order[k]] = hi[order[k]];
      vol += add;
      s = e;
      continue;
    }
    const double rem = V - vol;
    if (rem >= add) {
      for (int k = s; k < e; ++k) out.rho[order[k]] = hi[order[k]];
      out.theta = e < n ? 0.5 * (theta + bp[order[e]]) : theta;
      return out;
    }
    // Tied group: every split of `rem` over it has the same cost.
    out.theta = theta;
    double mid = vol, up = 0.0, down = 0.0;
    for (int k = s; k < e; ++k) {
      const int i = order[k];
      const double rc = std::clamp(rho[i], lo[i], hi[i]);
      mid += a[i] * (rc - lo[i]);
      up += a[i] * (hi[i] - rc);
      down += a[i] * (rc - lo[i]);
    }
    for (int k = s; k < e; ++k) {
      const int i = order[k];
      const double rc = std::clamp(rho[i], lo[i], hi[i]);
      if (V >= mid) {
        const double t = up > 0.0 ? (V - mid) / up : 0.0;
        out.rho[i] = rc + t * (hi[i] - rc);
      } else {
        const double t = down > 0.0 ? (mid - V) / down : 0.0;
        out.rho[i] = rc - t * (rc - lo[i]);
      }
      out.rho[i] = std::clamp(out.rho[i], lo[i], hi[i]);
    }
    return out;
  }
  return out;
}

SubproblemResult slp_subproblem(const Eigen::VectorXd& grad, const Eigen::VectorXd& rho,
                                const Eigen::VectorXd& delta, double rho_min, const Eigen::VectorXd& a, double V) {
  const Eigen::VectorXd lo = (rho - delta).cwiseMax(rho_min);
  const Eigen::VectorXd hi = (rho + delta).cwiseMin(1.0);
  return knapsack_lp(grad, a, lo, hi, rho, V);
}

double projected_gradient_norm(const Eigen::VectorXd& rho, const Eigen::VectorXd& grad, double theta,
                               const Eigen::VectorXd& a, double rho_min) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < rho.size(); ++i) {
    const double proj = std::clamp(rho[i] - (grad[i] + theta * a[i]), rho_min, 1.0);
    m = std::max(m, std::abs(proj - rho[i]));
  }
  return m;
}

double penalty_at(int k, double p0, double dp, int every, double p_max) {
  const int steps = std::max(0, k - 1) / every;
  return std::min(p_max, p0 + dp * steps);
}

namespace {

struct Evaluation {
  double F = 0.0;
  Eigen::VectorXd u;
  Eigen::VectorXd grad;  // design space
  NewtonStats newton;
  int adjoint_ica = -1;
  bool adjoint_fallback = false;
  double max_norm_B = -1.0;
};

}  // namespace

RunHistory optimize(const Problem& pb, const OptimizerConfig& cfg) {
  const Assembler as = make_assembler(pb);
  const DensityFilter filter(pb.mesh, pb.spec.filter_radius, cfg.kernel);
  const int n_el = pb.mesh.n_el();
  const double V = pb.volume_target;
  const Eigen::VectorXd v = Eigen::VectorXd::Constant(n_el, pb.mesh.element_volume());
  // Volume of the physical densities as a function of the design: a^T rho.
  const Eigen::VectorXd a = filter.backpropagate(v);
  const StrategyFlags sf = flags(cfg.strategy);

  RunHistory h;
  h.problem = pb.spec.name;
  h.strategy = to_string(cfg.strategy);
  h.nx = pb.spec.nx;
  h.ny = pb.spec.ny;
  h.volume_target = V;
  h.rho_min = cfg.rho_min;
  h.linear = pb.spec.linear;

  if (V < cfg.rho_min * v.sum() || V > v.sum()) throw InfeasibleError("optimize: volume target is not attainable");

  ReanalysisContext ctx(as.pattern());
  NewtonCounters counters;
  Eigen::VectorXd rho = Eigen::VectorXd::Constant(n_el, V / v.sum());
  Eigen::VectorXd u = Eigen::VectorXd::Zero(as.n_free());
  Eigen::VectorXd delta = Eigen::VectorXd::Constant(n_el, cfg.move_limit);
  Eigen::VectorXd last_step = Eigen::VectorXd::Zero(n_el);

  // State needed to redo the previous design update with a smaller move limit.
  Eigen::VectorXd prev_rho, prev_grad, prev_delta;

  const auto evaluate = [&](int k, const Eigen::VectorXd& rho_phys, double p, IterationRecord& rec) {
    Evaluation ev;
    {
      ScopedTimer tf(&rec.time, TimeCategory::Objective);
      NewtonOptions nopt = cfg.newton;
      nopt.monitor_norm_B = cfg.monitor_norm_B;
      NewtonResult nr = newton_solve(as, rho_phys, p, u, cfg.strategy, ctx, k, counters, nopt, &rec.time);
      ev.newton = nr.stats;
      ev.u = std::move(nr.u);
      AdjointOptions aopt;
      aopt.use_ica = sf.adjoint_uses_ica && k > 5;
      aopt.eps_T = cfg.eps_T;
      aopt.ica_max = cfg.newton.ica_max;
      aopt.reference_is_exact = pb.spec.linear && nr.stats.factorizations > 0;
      const AdjointSolution adj = solve_adjoint(as, rho_phys, p, ev.u, ctx, aopt, &rec.time);
      if (adj.method == AdjointMethod::Ica) ev.adjoint_ica = adj.report.iterations;
      ev.adjoint_fallback = adj.report.fallback;
      if (cfg.monitor_norm_B) {
        ev.max_norm_B = nr.stats.max_norm_B;
        if (adj.method == AdjointMethod::Ica) ev.max_norm_B = std::max(ev.max_norm_B, estimate_norm_B(ctx));
      }
      ev.F = as.output_selector().dot(ev.u);
      Eigen::VectorXd g_phys;
      {
        ScopedTimer tg(&rec.time, TimeCategory::Gradient);
        g_phys = objective_gradient(as, rho_phys, p, ev.u, adj.lambda);
      }
      ScopedTimer tfl(&rec.time, TimeCategory::Filtering);
      ev.grad = filter.backpropagate(g_phys);
    }
    return ev;
  };

  const int last = cfg.converge ? cfg.max_iterations : cfg.budget + 1;
  for (int k = 1; k <= last; ++k) {
    IterationRecord rec;
    rec.iter = k;
    rec.p = penalty_at(k, cfg.p0, cfg.dp, cfg.p_every, cfg.p_max);
    const long fact0 = ctx.factorizations();
    Evaluation ev;
    Eigen::VectorXd rho_phys;
    {
      ScopedTimer tt(&rec.time, TimeCategory::Total);
      for (int attempt = 0;; ++attempt) {
        {
          ScopedTimer tfl(&rec.time, TimeCategory::Filtering);
          // Rows are convex weights, so this only strips roundoff.
          rho_phys = filter.apply(rho).cwiseMax(cfg.rho_min).cwiseMin(1.0);
        }
        try {
          ev = evaluate(k, rho_phys, rec.p, rec);
          break;
        } catch (const NewtonNonconvergence& err) {
          if (attempt > 0 || k == 1 || prev_rho.size() == 0) {
            h.status = std::string("aborted at iteration ") + std::to_string(k) + ": " + err.what();
            h.aborted = true;
            break;
          }
          ++rec.retries;
          if (cfg.verbose) std::fprintf(stderr, "%4d  retry with halved move limits: %s\n", k, err.what());
          rec.fallbacks += err.stats().fallbacks;
          prev_delta *= 0.5;
          delta = prev_delta;
          ScopedTimer ts(&rec.time, TimeCategory::Subproblem);
          const SubproblemResult sp = slp_subproblem(prev_grad, prev_rho, delta, cfg.rho_min, a, V);
          last_step = sp.rho - prev_rho;
          rho = sp.rho;
        } catch (const SingularMatrixError& err) {
          h.status = std::string("aborted at iteration ") + std::to_string(k) + ": " + err.what();
          h.aborted = true;
          break;
        }
      }
      if (h.aborted) {
        rec.factorizations = ctx.factorizations() - fact0;
        h.records.push_back(rec);
        break;
      }
      u = ev.u;

      SubproblemResult sp;
      {
        ScopedTimer ts(&rec.time, TimeCategory::Subproblem);
        sp = slp_subproblem(ev.grad, rho, delta, cfg.rho_min, a, V);
      }
      rec.theta = sp.theta;
      rec.gp_norm = projected_gradient_norm(rho, ev.grad, sp.theta, a, cfg.rho_min);

      rec.objective = ev.F;
      rec.newton_iterations = ev.newton.iterations;
      rec.factorizations = ctx.factorizations() - fact0;
      rec.ica_steps = static_cast<int>(ev.newton.ica_iterations.size());
      for (int it : ev.newton.ica_iterations) rec.ica_max_iterations = std::max(rec.ica_max_iterations, it);
      rec.adjoint_ica_iterations = ev.adjoint_ica;
      rec.fallbacks += ev.newton.fallbacks + (ev.adjoint_fallback ? 1 : 0);
      rec.backtracks = ev.newton.backtracks;
      rec.residual = ev.newton.final_residual;
      rec.volume = v.dot(rho_phys);
      rec.rho_design_min = rho.minCoeff();
      rec.rho_design_max = rho.maxCoeff();
      rec.rho_phys_min = rho_phys.minCoeff();
      rec.rho_phys_max = rho_phys.maxCoeff();
      rec.mean_move_limit = delta.mean();
      rec.max_norm_B = ev.max_norm_B;

      h.rho_design = rho;
      h.rho_phys = rho_phys;

      const bool stop = (cfg.converge && rec.gp_norm < cfg.tol) || k == last;
      if (!stop) {
        prev_rho = rho;
        prev_grad = ev.grad;
        prev_delta = delta;
        const Eigen::VectorXd step = sp.rho - rho;
        if (cfg.adaptive_move_limit) {
          for (int i = 0; i < n_el; ++i) {
            if (step[i] * last_step[i] < 0.0) delta[i] = std::max(1e-3 * cfg.move_limit, 0.5 * delta[i]);
            else if (step[i] != 0.0) delta[i] = std::min(cfg.move_limit, 1.2 * delta[i]);
          }
        }
        last_step = step;
        rho = sp.rho;
      } else if (cfg.converge && rec.gp_norm < cfg.tol) {
        h.status = "converged";
      }
    }
    double parts = 0.0;
    for (TimeCategory c : {TimeCategory::Objective, TimeCategory::Gradient, TimeCategory::Subproblem,
                           TimeCategory::Filtering})
      parts += rec.time[c];
    rec.time[TimeCategory::Other] = std::max(0.0, rec.time[TimeCategory::Total] - parts);
    h.time += rec.time;
    h.factorizations += rec.factorizations;
    h.newton_iterations += rec.newton_iterations;
    h.records.push_back(rec);
    if (cfg.verbose)
      std::fprintf(stderr, "%4d  F=% .6e  p=%.1f  newton=%2d  fact=%ld  gP=%.3e  vol=%.6f\n", k, rec.objective,
                   rec.p, rec.newton_iterations, rec.factorizations, rec.gp_norm, rec.volume / V);
    if (h.status == "converged") break;
  }
  if (!h.aborted && cfg.converge && h.status != "converged") h.status = "iteration cap reached";
  return h;
}

}  // namespace icatopo
