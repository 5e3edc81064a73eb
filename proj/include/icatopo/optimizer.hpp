#pragma once

#include "icatopo/bench.hpp"
#include "icatopo/filter.hpp"
#include "icatopo/nonlinear.hpp"
#include "icatopo/timing.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace icatopo {

struct SubproblemResult {
  Eigen::VectorXd rho;
  double theta = 0.0;  // multiplier of the volume constraint
};

/// min g^T x  s.t.  a^T x = V, lo <= x <= hi, solved exactly by sorting the
/// breakpoints theta_i = -g_i / a_i. Elements whose breakpoint equals the
/// optimal theta keep x_i = rho_i when the volume allows and are otherwise
/// moved proportionally toward one bound. Requires a > 0. Throws
/// InfeasibleError when a^T lo > V or a^T hi < V (beyond roundoff).
SubproblemResult knapsack_lp(const Eigen::VectorXd& g, const Eigen::VectorXd& a, const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi, const Eigen::VectorXd& rho, double V);

/// Move-limited SLP step: bounds max(rho_min, rho - delta) and
/// min(1, rho + delta), per element.
SubproblemResult slp_subproblem(const Eigen::VectorXd& grad, const Eigen::VectorXd& rho,
                                const Eigen::VectorXd& delta, double rho_min, const Eigen::VectorXd& a, double V);

/// ||P_X(rho - (grad + theta a)) - rho||_inf with X = [rho_min, 1]^n.
double projected_gradient_norm(const Eigen::VectorXd& rho, const Eigen::VectorXd& grad, double theta,
                               const Eigen::VectorXd& a, double rho_min);

/// SIMP exponent at outer iteration k (1-based): p0 + dp * floor((k-1)/every),
/// capped at p_max.
double penalty_at(int k, double p0 = 1.0, double dp = 0.1, int every = 10, double p_max = 3.0);

struct OptimizerConfig {
  Strategy strategy = Strategy::N;
  int budget = 300;          // outer iterations (design updates)
  bool converge = false;     // stop on ||g_P||_inf < tol instead of the budget
  double tol = 1e-3;
  int max_iterations = 1000;  // cap for converge mode
  double move_limit = 0.05;
  bool adaptive_move_limit = true;
  double rho_min = 1e-3;
  double p0 = 1.0;
  double dp = 0.1;
  int p_every = 10;
  double p_max = 3.0;
  FilterKernel kernel = FilterKernel::Cone;
  NewtonOptions newton;
  double eps_T = 1e-8;
  bool monitor_norm_B = false;
  bool verbose = false;
};

struct IterationRecord {
  int iter = 0;
  double objective = 0.0;
  double p = 0.0;
  int newton_iterations = 0;
  long factorizations = 0;
  int ica_steps = 0;       // inexact Newton steps
  int ica_max_iterations = 0;
  int adjoint_ica_iterations = -1;  // -1: direct adjoint
  int fallbacks = 0;
  int backtracks = 0;
  int retries = 0;
  double residual = 0.0;  // final ||r||_inf
  double gp_norm = 0.0;
  double theta = 0.0;
  double volume = 0.0;  // sum v_i rho_phys,i
  double rho_design_min = 0.0;
  double rho_design_max = 0.0;
  double rho_phys_min = 0.0;
  double rho_phys_max = 0.0;
  double mean_move_limit = 0.0;
  double max_norm_B = -1.0;  // -1: not monitored
  Timings time;
};

struct RunHistory {
  std::string problem;
  std::string strategy;
  int nx = 0;
  int ny = 0;
  double volume_target = 0.0;
  double rho_min = 0.0;
  bool linear = false;
  std::vector<IterationRecord> records;
  Eigen::VectorXd rho_design;
  Eigen::VectorXd rho_phys;
  Timings time;  // run totals
  long factorizations = 0;
  long newton_iterations = 0;
  std::string status = "ok";  // "ok", "converged", or an abort message
  bool aborted = false;
};

/// Outer loop: filter, equilibrium, adjoint gradient, filter transpose,
/// move-limited LP step, SIMP continuation. Evaluates the objective at
/// iterations 1..budget+1 and updates the design after each of the first
/// `budget` evaluations. A Newton failure halves the move limits and
/// retries the step once; a second failure ends the run with aborted = true.
RunHistory optimize(const Problem& problem, const OptimizerConfig& config);

}  // namespace icatopo
