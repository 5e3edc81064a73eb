#include "icatopo/bench.hpp"
#include "icatopo/nonlinear.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace icatopo;

TEST_CASE("canonical constants") {
  struct Row {
    ProblemSpec s;
    double width, height, thickness, E, nu, load, k_in, k_out, vf, radius;
    int nx, ny;
    bool compliance;
  };
  // Mechanism loads and input springs are halved on the symmetry line.
  const Row table[] = {
      {cantilever(), 120, 30, 1, 3000, 0.4, 120, 0, 0, 0.5, 10, 400, 100, true},
      {slender(), 400, 50, 1, 3000, 0.3, 40, 0, 0, 0.2, 5, 600, 75, true},
      {inverter(), 300, 150, 7, 180, 0.3, 25, 2.0, 0.5, 0.2, 7.5, 300, 150, false},
      {gripper(), 320, 160, 7, 180, 0.3, 2, 0.1, 1.0, 0.2, 5, 320, 160, false},
  };
  for (const Row& r : table) {
    CAPTURE(r.s.name);
    CHECK(r.s.width == r.width);
    CHECK(r.s.height == r.height);
    CHECK(r.s.thickness == r.thickness);
    CHECK(r.s.E == r.E);
    CHECK(r.s.nu == r.nu);
    CHECK(r.s.load == r.load);
    CHECK(r.s.k_in == r.k_in);
    CHECK(r.s.k_out == r.k_out);
    CHECK(r.s.volume_fraction == r.vf);
    CHECK(r.s.filter_radius == r.radius);
    CHECK(r.s.nx == r.nx);
    CHECK(r.s.ny == r.ny);
    CHECK(r.s.compliance == r.compliance);
  }
  CHECK(cantilever().nx * cantilever().ny == 40000);
  CHECK(slender().nx * slender().ny == 45000);
  CHECK(inverter().nx * inverter().ny == 45000);
  CHECK(gripper().nx * gripper().ny == 51200);
  CHECK(build(with_mesh(cantilever(), 8, 2)).material.nu() == 0.4);
}

TEST_CASE("scaled and desk meshes") {
  const ProblemSpec c = cantilever(0.1);
  CHECK(c.nx == 40);
  CHECK(c.ny == 10);
  CHECK(c.E == 3000.0);
  CHECK(c.filter_radius == doctest::Approx(1.5));  // 10 * 40 / 400 = 1, floored

  const ProblemSpec s = slender(0.2);
  CHECK(s.nx == 120);
  CHECK(s.ny == 15);

  const std::pair<const char*, std::pair<int, int>> desks[] = {
      {"cantilever", {60, 15}}, {"slender", {120, 15}}, {"inverter", {60, 30}}, {"gripper", {64, 32}}};
  for (const auto& [name, mesh] : desks) {
    const ProblemSpec d = desk(name);
    CHECK(d.nx == mesh.first);
    CHECK(d.ny == mesh.second);
    CHECK(d.filter_radius >= 1.5);
  }
  CHECK(desk("cantilever").filter_radius == doctest::Approx(1.5));
  CHECK(with_mesh(cantilever(), 200, 50).filter_radius == doctest::Approx(5.0));
  CHECK_THROWS_AS(problem_by_name("bridge"), std::invalid_argument);
  CHECK_THROWS_AS(with_mesh(cantilever(), 0, 4), std::invalid_argument);
}

TEST_CASE("refinement families") {
  const auto sb = refinement_family("slender");
  REQUIRE(sb.size() == 4);
  const int sn[4][2] = {{200, 25}, {400, 50}, {600, 75}, {800, 100}};
  const double sr[4] = {2.5, 5.0, 7.5, 10.0};
  for (int i = 0; i < 4; ++i) {
    CHECK(sb[i].nx == sn[i][0]);
    CHECK(sb[i].ny == sn[i][1]);
    CHECK(sb[i].filter_radius == sr[i]);
  }
  const auto inv = refinement_family("inverter");
  REQUIRE(inv.size() == 4);
  const int in[4][2] = {{200, 100}, {300, 150}, {400, 200}, {500, 250}};
  const double ir[4] = {5.0, 7.5, 10.0, 12.5};
  for (int i = 0; i < 4; ++i) {
    CHECK(inv[i].nx == in[i][0]);
    CHECK(inv[i].ny == in[i][1]);
    CHECK(inv[i].filter_radius == ir[i]);
  }
  CHECK_THROWS_AS(refinement_family("gripper"), std::invalid_argument);
}

TEST_CASE("assembled problems") {
  const Problem cb = build(with_mesh(cantilever(), 12, 4));
  CHECK(cb.mesh.n_fixed() == 10);
  CHECK(cb.volume_target == doctest::Approx(0.5 * 120 * 30));
  CHECK(load_vector(cb.mesh, cb.loads).sum() == doctest::Approx(-120.0));

  // Odd row count: the load splits between the two nodes around mid-height.
  const Problem odd = build(with_mesh(cantilever(), 12, 5));
  CHECK(odd.loads.loads.size() == 2);
  CHECK(load_vector(odd.mesh, odd.loads).sum() == doctest::Approx(-120.0));

  const Problem inv = testing_support::small_inverter();
  CHECK(inv.loads.springs.size() == 2);
  CHECK(inv.loads.output_dofs.size() == 1);
  CHECK_FALSE(inv.loads.compliance);
  const Problem gr = build(with_mesh(gripper(), 16, 8));
  CHECK(gr.loads.springs.size() == 2);
  CHECK(gr.volume_target == doctest::Approx(0.2 * 320 * 160 * 7));
}

TEST_CASE("config round trip") {
  ProblemSpec s = with_mesh(inverter(), 30, 15);
  s.k_out = 0.3;
  s.filter_radius = 2.25;
  const auto kv = to_config(s);
  const ProblemSpec back = apply_config(desk("inverter"), kv);
  CHECK(back.nx == 30);
  CHECK(back.ny == 15);
  CHECK(back.k_out == s.k_out);
  CHECK(back.filter_radius == s.filter_radius);
  CHECK(to_config(back) == kv);
  CHECK_THROWS_AS(apply_config(s, {{"E", "abc"}}), std::invalid_argument);
}

TEST_CASE("linear mode") {
  const ProblemSpec base = with_mesh(cantilever(), 12, 4);
  CHECK(linear_mode(base).linear);
  const auto compliance = [](ProblemSpec s, double load) {
    s.load = load;
    const Problem pb = build(linear_mode(s));
    const Assembler as = make_assembler(pb);
    const Eigen::VectorXd rho = Eigen::VectorXd::Constant(pb.mesh.n_el(), 0.5);
    ReanalysisContext ctx(as.pattern());
    NewtonCounters c;
    const NewtonResult r =
        newton_solve(as, rho, 3.0, Eigen::VectorXd::Zero(as.n_free()), Strategy::N, ctx, 1, c);
    return as.output_selector().dot(r.u);
  };
  const double F1 = compliance(base, 120.0), F2 = compliance(base, 240.0);
  CHECK(F2 == doctest::Approx(4.0 * F1).epsilon(1e-10));
}
