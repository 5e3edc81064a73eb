#include "icatopo/mesh.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace icatopo {

Mesh build_grid(int nx, int ny, double width, double height, double thickness) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("build_grid: element counts must be >= 1");
  if (!(width > 0.0) || !(height > 0.0) || !(thickness > 0.0))
    throw std::invalid_argument("build_grid: dimensions must be positive");

  Mesh m;
  m.nx_ = nx;
  m.ny_ = ny;
  m.width_ = width;
  m.height_ = height;
  m.thickness_ = thickness;
  m.elem_w_ = width / nx;
  m.elem_h_ = height / ny;

  m.coords_.resize(static_cast<size_t>(m.n_nd()));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.coords_[m.node_id(i, j)] = Eigen::Vector2d(i * m.elem_w_, j * m.elem_h_);

  m.conn_.resize(static_cast<size_t>(m.n_el()));
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      m.conn_[m.element_id(i, j)] = {m.node_id(i, j), m.node_id(i + 1, j),
                                     m.node_id(i + 1, j + 1), m.node_id(i, j + 1)};

  m.free_index_.assign(static_cast<size_t>(m.n_dof()), 0);
  m.renumber_free();
  return m;
}

void Mesh::renumber_free() {
  free_dofs_.clear();
  for (int d = 0; d < n_dof(); ++d) {
    if (free_index_[d] < 0) continue;
    free_index_[d] = static_cast<int>(free_dofs_.size());
    free_dofs_.push_back(d);
  }
}

Mesh fix_region(const Mesh& mesh, const std::function<bool(const Eigen::Vector2d&)>& pred,
                AxisSet axes) {
  Mesh out = mesh;
  int selected = 0;
  for (int n = 0; n < out.n_nd(); ++n) {
    if (!pred(out.coords_[n])) continue;
    ++selected;
    if (axes != AxisSet::Y) out.free_index_[Mesh::dof(n, Axis::X)] = -1;
    if (axes != AxisSet::X) out.free_index_[Mesh::dof(n, Axis::Y)] = -1;
  }
  if (selected == 0) {
    std::cerr << "warning: fix_region selected no nodes\n";
    return out;
  }
  out.renumber_free();
  return out;
}

Eigen::Vector2d Mesh::element_center(int e) const {
  const auto& c = conn_[e];
  return 0.5 * (coords_[c[0]] + coords_[c[2]]);
}

std::array<Eigen::Vector2d, 4> Mesh::element_coords(int e) const {
  const auto& c = conn_[e];
  return {coords_[c[0]], coords_[c[1]], coords_[c[2]], coords_[c[3]]};
}

std::array<int, 8> Mesh::element_dofs(int e) const {
  const auto& c = conn_[e];
  std::array<int, 8> d{};
  for (int a = 0; a < 4; ++a) {
    d[2 * a] = 2 * c[a];
    d[2 * a + 1] = 2 * c[a] + 1;
  }
  return d;
}

int Mesh::nearest_node(const Eigen::Vector2d& p) const {
  int best = 0;
  double best_d = (coords_[0] - p).squaredNorm();
  for (int n = 1; n < n_nd(); ++n) {
    const double d = (coords_[n] - p).squaredNorm();
    if (d < best_d - 1e-12 * (1.0 + best_d)) {
      best = n;
      best_d = d;
    }
  }
  return best;
}

Eigen::VectorXd gather_free(const Mesh& mesh, const Eigen::VectorXd& full) {
  if (full.size() != mesh.n_dof())
    throw std::invalid_argument("gather_free: expected a vector of length 2*n_nd");
  Eigen::VectorXd out(mesh.n_free());
  const auto& fd = mesh.free_dofs();
  for (int k = 0; k < mesh.n_free(); ++k) out[k] = full[fd[k]];
  return out;
}

Eigen::VectorXd scatter_free(const Mesh& mesh, const Eigen::VectorXd& reduced) {
  if (reduced.size() != mesh.n_free())
    throw std::invalid_argument("scatter_free: expected a vector over the free DOFs");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.n_dof());
  const auto& fd = mesh.free_dofs();
  for (int k = 0; k < mesh.n_free(); ++k) out[fd[k]] = reduced[k];
  return out;
}

Eigen::VectorXd load_vector(const Mesh& mesh, const LoadCase& lc) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(mesh.n_dof());
  for (const auto& pl : lc.loads) f[Mesh::dof(pl.node, pl.dir)] += pl.magnitude;
  return f;
}

Eigen::VectorXd output_vector(const Mesh& mesh, const LoadCase& lc) {
  if (lc.compliance) return load_vector(mesh, lc);
  Eigen::VectorXd l = Eigen::VectorXd::Zero(mesh.n_dof());
  for (int d : lc.output_dofs) l[d] = -1.0;
  return l;
}

}  // namespace icatopo
