#pragma once

#include "icatopo/assembly.hpp"
#include "icatopo/reanalysis.hpp"
#include "icatopo/timing.hpp"

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace icatopo {

enum class Strategy { N, MN, upK1, upK1g, upK100, upK100g, upK03K100g };

inline constexpr Strategy kAllStrategies[] = {Strategy::N,      Strategy::MN,      Strategy::upK1,      Strategy::upK1g,
                                              Strategy::upK100, Strategy::upK100g, Strategy::upK03K100g};

struct StrategyFlags {
  bool refactor_every_newton_iter;
  int refactor_every_k_outer;  // Newton calls that start with a factorization: every k-th outer iteration
  int delta_refresh_period;    // 0: dK never refreshed (modified Newton), 1: every iteration
  bool adjoint_uses_ica;
};

StrategyFlags flags(Strategy s);
std::string to_string(Strategy s);
/// Throws std::invalid_argument for an unknown name.
Strategy parse_strategy(std::string_view name);

enum class Action { Refactor, ReuseFreshDelta, ReuseHeldDelta };

/// Counters shared by every Newton call of one run.
struct NewtonCounters {
  long global_iterations = 0;  // Newton iterations completed so far
  long last_refresh = 0;       // value of global_iterations at the last dK refresh
};

/// Factorization policy. outer_iter is 1-based; newton_iter counts from 0
/// inside one call. The 100-period rule refreshes dK on the first reuse
/// step after the global counter crosses a multiple of the period.
Action decide_action(Strategy s, int outer_iter, int newton_iter, const NewtonCounters& c, int period = 100);

struct NewtonOptions {
  double tol = 1e-5;  // on ||r||_inf
  int max_iter = 50;
  double eps_R = 1e-2;
  int ica_max = 10;
  int refresh_period = 100;
  double armijo_c1 = 1e-4;
  int max_backtracks = 20;
  // An inexact step that cuts ||r||_inf by less than this factor means the
  // held data has gone stale: a held dK is refreshed, a fresh one forces a
  // refactorization.
  double stagnation_ratio = 0.25;
  bool force_full = false;  // behave as strategy N
  bool monitor_norm_B = false;
};

struct NewtonStats {
  int iterations = 0;
  long factorizations = 0;
  std::vector<int> ica_iterations;  // per inexact step
  int backtracks = 0;
  double final_residual = 0.0;
  int fallbacks = 0;
  int stale_refreshes = 0;  // dK refreshed early because progress stalled
  int tangent_assemblies = 0;
  double max_norm_B = 0.0;  // only with monitor_norm_B
  bool converged = false;
};

class NewtonNonconvergence : public std::runtime_error {
 public:
  NewtonNonconvergence(const std::string& what, NewtonStats stats)
      : std::runtime_error(what), stats_(std::move(stats)) {}
  const NewtonStats& stats() const { return stats_; }

 private:
  NewtonStats stats_;
};

struct NewtonResult {
  Eigen::VectorXd u;
  Eigen::VectorXd r;
  NewtonStats stats;
};

/// Damped Newton iteration for r(u, rho) = 0 starting from u0.
///
/// Steps come either from a fresh factorization of K_T or from ica_solve
/// against the held context, as decide_action dictates. The step length is
/// chosen by Armijo backtracking on ||r||_2^2; trial states with det F <= 0
/// count as rejections. An inexact step that is not a descent direction, or
/// whose line search fails, is replaced once by an exact step.
NewtonResult newton_solve(const Assembler& as, const Eigen::VectorXd& rho, double p, const Eigen::VectorXd& u0,
                          Strategy strategy, ReanalysisContext& ctx, int outer_iter, NewtonCounters& counters,
                          const NewtonOptions& opt = {}, Timings* timings = nullptr);

}  // namespace icatopo
