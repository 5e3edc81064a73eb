#include "icatopo/nonlinear.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace icatopo;

namespace {

NewtonResult solve(const Assembler& as, const Eigen::VectorXd& rho, double p, const Eigen::VectorXd& u0,
                   Strategy s, int outer = 1, NewtonOptions opt = {}) {
  ReanalysisContext ctx(as.pattern());
  NewtonCounters c;
  return newton_solve(as, rho, p, u0, s, ctx, outer, c, opt);
}

}  // namespace

TEST_CASE("strategy table") {
  CHECK(flags(Strategy::N).refactor_every_newton_iter);
  for (Strategy s : kAllStrategies) {
    CHECK(parse_strategy(to_string(s)) == s);
    if (s != Strategy::N) CHECK_FALSE(flags(s).refactor_every_newton_iter);
  }
  CHECK(flags(Strategy::MN).delta_refresh_period == 0);
  CHECK(flags(Strategy::upK1).delta_refresh_period == 1);
  CHECK(flags(Strategy::upK100).delta_refresh_period == 100);
  CHECK(flags(Strategy::upK03K100g).refactor_every_k_outer == 3);
  CHECK(flags(Strategy::upK100g).refactor_every_k_outer == 1);
  CHECK(flags(Strategy::upK1g).adjoint_uses_ica);
  CHECK_FALSE(flags(Strategy::upK1).adjoint_uses_ica);
  CHECK_THROWS_AS(parse_strategy("upK2"), std::invalid_argument);
}

TEST_CASE("factorization policy") {
  NewtonCounters c;
  for (int outer : {1, 7, 50})
    for (int it : {0, 1, 9}) CHECK(decide_action(Strategy::N, outer, it, c) == Action::Refactor);

  // The first five outer iterations always run full Newton.
  for (Strategy s : kAllStrategies) CHECK(decide_action(s, 5, 3, c) == Action::Refactor);

  CHECK(decide_action(Strategy::upK03K100g, 7, 0, c) == Action::ReuseHeldDelta);
  CHECK(decide_action(Strategy::upK03K100g, 9, 0, c) == Action::Refactor);
  CHECK(decide_action(Strategy::upK03K100g, 9, 1, c) == Action::ReuseHeldDelta);

  CHECK(decide_action(Strategy::MN, 10, 0, c) == Action::Refactor);
  CHECK(decide_action(Strategy::MN, 10, 3, c) == Action::ReuseHeldDelta);
  CHECK(decide_action(Strategy::upK1, 10, 3, c) == Action::ReuseFreshDelta);
  CHECK(decide_action(Strategy::upK1g, 10, 0, c) == Action::Refactor);

  // 100-period rule: fresh on the first reuse step past a multiple of 100.
  NewtonCounters at{200, 150};
  CHECK(decide_action(Strategy::upK100, 10, 3, at) == Action::ReuseFreshDelta);
  NewtonCounters after{250, 200};
  CHECK(decide_action(Strategy::upK100, 10, 3, after) == Action::ReuseHeldDelta);
  NewtonCounters crossed{203, 198};
  CHECK(decide_action(Strategy::upK100g, 10, 1, crossed) == Action::ReuseFreshDelta);
  CHECK(decide_action(Strategy::upK100g, 10, 1, crossed, 1000) == Action::ReuseHeldDelta);
}

TEST_CASE("linear residual converges in one step for every strategy") {
  const Problem pb = build(linear_mode(with_mesh(cantilever(), 12, 4)));
  const Assembler as = make_assembler(pb);
  const Eigen::VectorXd rho = Eigen::VectorXd::Constant(pb.mesh.n_el(), 0.5);
  for (Strategy s : kAllStrategies) {
    const NewtonResult r = solve(as, rho, 3.0, Eigen::VectorXd::Zero(as.n_free()), s, 7);
    CHECK(r.stats.converged);
    CHECK(r.stats.iterations == 1);
    CHECK(r.stats.final_residual <= 1e-5);
  }
}

TEST_CASE("nonlinear solves") {
  const Problem pb = testing_support::small_cantilever();
  const Assembler as = make_assembler(pb);
  const Eigen::VectorXd rho = Eigen::VectorXd::Constant(pb.mesh.n_el(), 0.5);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(as.n_free());
  const double p = 3.0;

  const NewtonResult n = solve(as, rho, p, zero, Strategy::N);
  REQUIRE(n.stats.converged);
  CHECK(n.stats.final_residual <= 1e-5);
  CHECK(as.residual(rho, p, n.u).lpNorm<Eigen::Infinity>() == n.stats.final_residual);
  CHECK(as.admissible(n.u));
  CHECK(n.stats.factorizations == n.stats.iterations);
  CHECK(n.stats.fallbacks == 0);

  SUBCASE("warm start near the optimization path") {
    const Eigen::VectorXd rho2 = rho.array() + 0.01;
    const NewtonResult w = solve(as, rho2, p, n.u, Strategy::N);
    CHECK(w.stats.iterations <= 4);
    CHECK(w.stats.final_residual <= 1e-5);
  }

  SUBCASE("a converged state needs no iterations") {
    ReanalysisContext ctx(as.pattern());
    NewtonCounters c{37, 0};
    const NewtonResult w = newton_solve(as, rho, p, n.u, Strategy::upK100g, ctx, 20, c);
    CHECK(w.stats.iterations == 0);
    CHECK(w.stats.factorizations == 0);
    CHECK(c.global_iterations == 37);
    CHECK(w.u == n.u);
  }

  SUBCASE("full and inexact Newton agree") {
    const NewtonResult r = solve(as, rho, p, zero, Strategy::upK1, 7);
    CHECK(r.stats.final_residual <= 1e-5);
    CHECK((r.u - n.u).lpNorm<Eigen::Infinity>() <= 1e-4);
    CHECK(r.stats.factorizations < r.stats.iterations);
    CHECK_FALSE(r.stats.ica_iterations.empty());
  }

  SUBCASE("counters persist across calls") {
    ReanalysisContext ctx(as.pattern());
    NewtonCounters c;
    const Eigen::VectorXd rho2 = rho.array() + 0.01, rho3 = rho.array() + 0.02;
    const NewtonResult a = newton_solve(as, rho2, p, n.u, Strategy::upK100, ctx, 7, c);
    CHECK(c.global_iterations == a.stats.iterations);
    const NewtonResult b = newton_solve(as, rho3, p, a.u, Strategy::upK100, ctx, 8, c);
    CHECK(c.global_iterations == a.stats.iterations + b.stats.iterations);
  }

  SUBCASE("a wrong held factorization falls back to an exact step") {
    ReanalysisContext ctx(as.pattern());
    SparseSym K = as.make_matrix();
    as.tangent(rho, p, zero, K);
    for (double& v : K.values()) v = -v;
    ctx.factor(K);
    NewtonCounters c;
    // Near equilibrium the held factor points every step uphill.
    const Eigen::VectorXd rho2 = rho.array() + 0.01;
    const NewtonResult r = newton_solve(as, rho2, p, n.u, Strategy::upK03K100g, ctx, 7, c);
    CHECK(r.stats.fallbacks >= 1);
    CHECK(r.stats.factorizations >= 1);
    CHECK(r.stats.converged);
    CHECK(r.stats.final_residual <= 1e-5);
    const NewtonResult ref = solve(as, rho2, p, n.u, Strategy::N);
    CHECK((r.u - ref.u).lpNorm<Eigen::Infinity>() <= 1e-4);
  }

  SUBCASE("iteration cap") {
    NewtonOptions opt;
    opt.max_iter = 1;
    bool thrown = false;
    try {
      solve(as, rho, p, zero, Strategy::N, 1, opt);
    } catch (const NewtonNonconvergence& err) {
      thrown = true;
      CHECK(err.stats().iterations == 1);
      CHECK(err.stats().final_residual > 1e-5);
      CHECK(err.stats().factorizations == 1);
    }
    CHECK(thrown);
  }
}

TEST_CASE("every strategy reaches the same equilibrium") {
  const Problem pb = testing_support::small_inverter();
  const Assembler as = make_assembler(pb);
  std::mt19937 gen(60);
  const Eigen::VectorXd rho = testing_support::random_vector(gen, pb.mesh.n_el(), 0.2, 1.0);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(as.n_free());
  const NewtonResult ref = solve(as, rho, 2.0, zero, Strategy::N);
  for (Strategy s : kAllStrategies) {
    const NewtonResult r = solve(as, rho, 2.0, zero, s, 8);
    CHECK(r.stats.final_residual <= 1e-5);
    CHECK(as.admissible(r.u));
    CHECK((r.u - ref.u).lpNorm<Eigen::Infinity>() <= 1e-4 * std::max(1.0, ref.u.lpNorm<Eigen::Infinity>()));
  }
}
