#include "icatopo/mesh.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace icatopo;

TEST_CASE("grid sizes and numbering") {
  const Mesh big = build_grid(400, 100, 120, 30, 1);
  CHECK(big.n_el() == 40000);

  const Mesh one = build_grid(1, 1, 1, 1, 1);
  CHECK(one.n_el() == 1);
  CHECK(one.n_nd() == 4);
  CHECK(one.n_dof() == 8);

  const Mesh m = build_grid(3, 2, 3, 2, 1);
  CHECK(m.n_el() == 6);
  CHECK(m.n_nd() == 12);
  CHECK(m.element(0) == std::array<int, 4>{0, 1, 5, 4});
  CHECK(m.elem_w() == doctest::Approx(1.0));
  for (int e = 0; e < m.n_el(); ++e) {
    const auto& c = m.element(e);
    for (int a = 0; a < 4; ++a) {
      CHECK(c[a] >= 0);
      CHECK(c[a] < m.n_nd());
      for (int b = a + 1; b < 4; ++b) CHECK(c[a] != c[b]);
    }
  }
}

TEST_CASE("grid rejects bad input") {
  CHECK_THROWS_AS(build_grid(0, 1, 1, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(1, 1, -1, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(1, 1, 1, 1, 0), std::invalid_argument);
}

TEST_CASE("grid is deterministic and tiles the domain") {
  const Mesh a = build_grid(7, 5, 13.0, 3.0, 2.0);
  const Mesh b = build_grid(7, 5, 13.0, 3.0, 2.0);
  CHECK(a == b);
  double area = 0.0;
  for (int e = 0; e < a.n_el(); ++e) {
    const auto x = a.element_coords(e);
    area += 0.5 * std::abs((x[2] - x[0]).x() * (x[3] - x[1]).y() - (x[2] - x[0]).y() * (x[3] - x[1]).x());
  }
  CHECK(std::abs(area - 39.0) <= 1e-12 * 39.0);
}

TEST_CASE("supports") {
  const Mesh big = build_grid(400, 100, 120, 30, 1);
  const Mesh fixed = fix_region(big, [](const Eigen::Vector2d& p) { return p.x() < 1e-9; }, AxisSet::Both);
  CHECK(fixed.n_fixed() == 202);

  const Mesh m = build_grid(3, 2, 3, 2, 1);
  const Mesh ends =
      fix_region(m, [](const Eigen::Vector2d& p) { return p.x() < 1e-9 || p.x() > 3 - 1e-9; }, AxisSet::Both);
  int nodes = 0;
  for (int n = 0; n < ends.n_nd(); ++n)
    if (ends.is_fixed(Mesh::dof(n, Axis::X))) ++nodes;
  CHECK(nodes == 6);  // two columns of three nodes
  CHECK(ends.n_free() + ends.n_fixed() == ends.n_dof());
  for (int d : ends.free_dofs()) CHECK_FALSE(ends.is_fixed(d));

  const Mesh none = fix_region(m, [](const Eigen::Vector2d&) { return false; }, AxisSet::Both);
  CHECK(none == m);

  const Mesh roller = fix_region(m, [](const Eigen::Vector2d& p) { return p.y() < 1e-9; }, AxisSet::Y);
  CHECK(roller.n_fixed() == 4);
  CHECK(roller.is_fixed(Mesh::dof(0, Axis::Y)));
  CHECK_FALSE(roller.is_fixed(Mesh::dof(0, Axis::X)));
}

TEST_CASE("gather and scatter") {
  const Mesh one = build_grid(1, 1, 1, 1, 1);
  const Mesh m = fix_region(one, [](const Eigen::Vector2d& p) { return p.x() < 1e-9 && p.y() < 1e-9; },
                            AxisSet::Both);
  CHECK(m.n_free() == 6);

  std::mt19937 gen(3);
  const Mesh g = fix_region(build_grid(4, 3, 4, 3, 1), [](const Eigen::Vector2d& p) { return p.x() < 1e-9; },
                            AxisSet::Both);
  const Eigen::VectorXd red = testing_support::random_vector(gen, g.n_free());
  CHECK(gather_free(g, scatter_free(g, red)) == red);

  const Eigen::VectorXd full = testing_support::random_vector(gen, g.n_dof());
  const Eigen::VectorXd back = scatter_free(g, gather_free(g, full));
  for (int d = 0; d < g.n_dof(); ++d) CHECK(back[d] == (g.is_fixed(d) ? 0.0 : full[d]));

  CHECK_THROWS_AS(gather_free(g, Eigen::VectorXd::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(scatter_free(g, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("load and output vectors") {
  const Mesh m = build_grid(2, 1, 2, 1, 1);
  LoadCase lc;
  lc.loads = {{5, Axis::Y, -3.0}};
  CHECK(output_vector(m, lc) == load_vector(m, lc));
  CHECK(load_vector(m, lc)[11] == -3.0);

  lc.compliance = false;
  lc.output_dofs = {Mesh::dof(2, Axis::X)};
  const Eigen::VectorXd l = output_vector(m, lc);
  CHECK(l[4] == -1.0);
  CHECK(l.cwiseAbs().sum() == 1.0);
}

TEST_CASE("nearest node") {
  const Mesh m = build_grid(4, 2, 4, 2, 1);
  CHECK(m.nearest_node({0.0, 0.0}) == 0);
  CHECK(m.nearest_node({4.0, 2.0}) == m.n_nd() - 1);
  CHECK(m.nearest_node({2.1, 0.9}) == m.node_id(2, 1));
}
