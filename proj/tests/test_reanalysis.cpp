#include "icatopo/reanalysis.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace icatopo;
using testing_support::max_rel_diff;
using testing_support::random_vector;

namespace {

struct Pair {
  Eigen::MatrixXd K0, K1;
  SparseSym S0, S1;
};

// Dense SPD K0 and K1 = K0 + scale * E with E symmetric.
Pair make_matrices(std::mt19937& gen, int n, double scale) {
  Pair p;
  p.K0 = testing_support::random_spd(gen, n);
  p.K1 = p.K0 + scale * testing_support::random_symmetric(gen, n) * n;
  p.S0 = SparseSym::from_dense(p.K0);
  p.S1 = testing_support::on_pattern(p.S0, p.K1);
  return p;
}

// Plain dense version of the iteration: first iterate below eps, else the
// smallest residual among s(0)..s(k_max).
struct DenseIca {
  Eigen::VectorXd x;
  int k = 0;
  bool converged = false;
};

DenseIca dense_ica(const Eigen::MatrixXd& K0, const Eigen::MatrixXd& K1, const Eigen::VectorXd& b, double eps,
                   int k_max) {
  const Eigen::MatrixXd B = K0.ldlt().solve(K1 - K0);
  const Eigen::VectorXd x0 = K0.ldlt().solve(b);
  DenseIca out;
  double best = 1e300;
  Eigen::VectorXd s = x0;
  for (int k = 0; k <= k_max; ++k) {
    const double res = (K1 * s - b).lpNorm<Eigen::Infinity>() / b.lpNorm<Eigen::Infinity>();
    if (res < best) {
      best = res;
      out.x = s;
      out.k = k;
    }
    if (res < eps) {
      out.converged = true;
      return out;
    }
    s = x0 - B * s;
  }
  return out;
}

}  // namespace

TEST_CASE("without a delta the reference solve is exact") {
  std::mt19937 gen(40);
  const Pair p = make_matrices(gen, 20, 0.0);
  ReanalysisContext ctx(p.S0.pattern_ptr());
  ctx.factor(p.S0);
  CHECK(ctx.factorizations() == 1);
  const Eigen::VectorXd b = random_vector(gen, 20);
  const IcaResult r = ica_solve(ctx, b, 1e-10);
  CHECK(r.report.converged);
  CHECK(r.report.iterations == 0);
  CHECK(max_rel_diff(r.x, p.K0.ldlt().solve(b)) <= 1e-12);

  ctx.set_current(p.S0);
  const IcaResult r2 = ica_solve(ctx, b, 1e-10);
  CHECK(r2.report.iterations == 0);
  CHECK(r2.x == r.x);
}

TEST_CASE("contraction matches the dense iteration") {
  std::mt19937 gen(41);
  for (double scale : {0.02, 0.05, 0.1}) {
    const Pair p = make_matrices(gen, 30, scale);
    ReanalysisContext ctx(p.S0.pattern_ptr());
    ctx.factor(p.S0);
    ctx.set_current(p.S1);
    const Eigen::VectorXd b = random_vector(gen, 30);
    for (double eps : {1e-2, 1e-6, 1e-12}) {
      const IcaResult r = ica_solve(ctx, b, eps, 10);
      const DenseIca d = dense_ica(p.K0, p.K1, b, eps, 10);
      CHECK(r.report.converged == d.converged);
      CHECK(r.report.iterations == d.k);
      CHECK(max_rel_diff(r.x, d.x) <= 1e-10);
      const double res = (p.K1 * r.x - b).lpNorm<Eigen::Infinity>() / b.lpNorm<Eigen::Infinity>();
      CHECK(r.report.residual == doctest::Approx(res).epsilon(1e-6));
      if (r.report.converged) CHECK(res < eps);
    }
  }
}

TEST_CASE("divergent iteration is reported") {
  std::mt19937 gen(42);
  Pair p = make_matrices(gen, 15, 0.0);
  p.S1 = testing_support::on_pattern(p.S0, 2.5 * p.K0);
  ReanalysisContext ctx(p.S0.pattern_ptr());
  ctx.factor(p.S0);
  ctx.set_current(p.S1);
  CHECK(estimate_norm_B(ctx) == doctest::Approx(1.5).epsilon(1e-10));
  const Eigen::VectorXd b = random_vector(gen, 15);
  const IcaResult r = ica_solve(ctx, b, 1e-2, 10);
  CHECK_FALSE(r.report.converged);
  // With B = 1.5 I the residual grows at every step, so x(0) is the best.
  CHECK(r.report.iterations == 0);
  CHECK(r.report.residual == doctest::Approx(1.5).epsilon(1e-10));
}

TEST_CASE("zero right-hand side") {
  std::mt19937 gen(43);
  const Pair p = make_matrices(gen, 10, 0.05);
  ReanalysisContext ctx(p.S0.pattern_ptr());
  ctx.factor(p.S0);
  ctx.set_current(p.S1);
  const IcaResult r = ica_solve(ctx, Eigen::VectorXd::Zero(10), 1e-8);
  CHECK(r.report.converged);
  CHECK(r.report.iterations == 0);
  CHECK(r.x.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("adjoint solve") {
  std::mt19937 gen(44);
  const Pair p = make_matrices(gen, 25, 0.03);
  ReanalysisContext ctx(p.S0.pattern_ptr());
  ctx.factor(p.S0);
  ctx.set_current(p.S1);
  const Eigen::VectorXd l = random_vector(gen, 25);
  const IcaResult r = ica_adjoint_solve(ctx, l, 1e-8, 10);
  const Eigen::VectorXd ref = p.K1.ldlt().solve(-l);
  if (r.report.converged) CHECK(max_rel_diff(r.x, ref) <= 1e-6);
  const DenseIca d = dense_ica(p.K0, p.K1, -l, 1e-8, 10);
  CHECK(r.report.converged == d.converged);
  CHECK(max_rel_diff(r.x, d.x) <= 1e-10);
}

TEST_CASE("combined approximations") {
  std::mt19937 gen(45);
  {
    const Pair p = make_matrices(gen, 12, 0.0);
    ReanalysisContext ctx(p.S0.pattern_ptr());
    ctx.factor(p.S0);
    const Eigen::VectorXd b = random_vector(gen, 12);
    CHECK(max_rel_diff(ca_solve(ctx, b, 3), p.K0.ldlt().solve(b)) <= 1e-12);
  }
  {
    const int n = 6;
    const Pair p = make_matrices(gen, n, 0.05);
    ReanalysisContext ctx(p.S0.pattern_ptr());
    ctx.factor(p.S0);
    ctx.set_current(p.S1);
    const Eigen::VectorXd b = random_vector(gen, n);
    const Eigen::VectorXd exact = p.K1.ldlt().solve(b);
    // The full Krylov space contains the exact solution.
    CHECK(max_rel_diff(ca_solve(ctx, b, n), exact) <= 1e-6);

    // The Galerkin solution is the energy-norm best approximation in the basis.
    REQUIRE(p.K1.llt().info() == Eigen::Success);
    const auto energy = [&](const Eigen::VectorXd& x) { return (x - exact).dot(p.K1 * (x - exact)); };
    const Eigen::VectorXd x0 = p.K0.ldlt().solve(b);
    const Eigen::VectorXd ca1 = ca_solve(ctx, b, 1);
    CHECK(energy(ca1) <= energy(x0) * (1 + 1e-12));
    CHECK(energy(ca_solve(ctx, b, 3)) <= energy(ca1) * (1 + 1e-12));
    CHECK_THROWS_AS(ca_solve(ctx, b, 0), std::invalid_argument);
  }
}

TEST_CASE("norm of B") {
  std::mt19937 gen(46);
  const Pair p = make_matrices(gen, 30, 0.05);
  ReanalysisContext ctx(p.S0.pattern_ptr());
  ctx.factor(p.S0);
  CHECK(estimate_norm_B(ctx) == 0.0);
  ctx.set_current(p.S0);
  CHECK(estimate_norm_B(ctx) == 0.0);

  const double alpha = 0.3;
  ctx.set_current(testing_support::on_pattern(p.S0, (1 + alpha) * p.K0));
  CHECK(estimate_norm_B(ctx) == doctest::Approx(alpha).epsilon(1e-10));

  ctx.set_current(p.S1);
  const Eigen::MatrixXd B = p.K0.ldlt().solve(p.K1 - p.K0);
  const double sigma = Eigen::JacobiSVD<Eigen::MatrixXd>(B).singularValues()[0];
  CHECK(std::abs(estimate_norm_B(ctx) - sigma) <= 0.01 * sigma);
}

TEST_CASE("context contract") {
  std::mt19937 gen(47);
  const Pair p = make_matrices(gen, 8, 0.05);
  ReanalysisContext ctx(p.S0.pattern_ptr());
  CHECK_FALSE(ctx.has_factor());
  CHECK_THROWS_AS(ctx.set_current(p.S1), std::logic_error);
  ctx.factor(p.S0);
  ctx.set_current(p.S1);
  CHECK(ctx.has_delta());
  const Eigen::VectorXd v = random_vector(gen, 8);
  CHECK(max_rel_diff(ctx.apply_current(v), p.K1 * v) <= 1e-13);
  ctx.factor(p.S1);
  CHECK_FALSE(ctx.has_delta());
  CHECK(ctx.factorizations() == 2);
  const SparseSym other = SparseSym::from_dense(Eigen::MatrixXd::Identity(8, 8));
  CHECK_THROWS_AS(ctx.factor(other), std::invalid_argument);
}
