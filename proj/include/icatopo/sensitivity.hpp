#pragma once

#include "icatopo/assembly.hpp"
#include "icatopo/reanalysis.hpp"
#include "icatopo/timing.hpp"

#include <Eigen/Core>

namespace icatopo {

enum class AdjointMethod { Direct, Ica, Reused };

struct AdjointSolution {
  Eigen::VectorXd lambda;
  AdjointMethod method = AdjointMethod::Direct;
  IcaReport report;  // meaningful for AdjointMethod::Ica
};

struct AdjointOptions {
  bool use_ica = false;
  double eps_T = 1e-8;
  int ica_max = 10;
  /// The held factorization is exactly K_T(u_hat) (linear kinematics after
  /// a Newton solve at the same rho): solve with it directly.
  bool reference_is_exact = false;
};

/// Solves K_T(u_hat) lambda = -l. With use_ica the tangent at u_hat becomes
/// the context's current matrix and the ICA sequence is tried first; on
/// failure, or without use_ica, K_T(u_hat) is factored.
AdjointSolution solve_adjoint(const Assembler& as, const Eigen::VectorXd& rho, double p,
                              const Eigen::VectorXd& u_hat, ReanalysisContext& ctx, const AdjointOptions& opt = {},
                              Timings* timings = nullptr);

/// dF/drho_e = lambda_e^T dr/drho_e for every element.
Eigen::VectorXd objective_gradient(const Assembler& as, const Eigen::VectorXd& rho, double p,
                                   const Eigen::VectorXd& u_hat, const Eigen::VectorXd& lambda);

}  // namespace icatopo
