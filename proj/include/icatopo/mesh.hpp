#pragma once

#include <Eigen/Core>

#include <array>
#include <functional>
#include <vector>

namespace icatopo {

enum class Axis { X = 0, Y = 1 };
enum class AxisSet { X, Y, Both };

/// Regular rectangular grid of bilinear quadrilaterals.
///
/// Nodes and elements are numbered row-major from the bottom-left corner:
/// node (i, j) is j*(nx+1)+i and element (i, j) is j*nx+i. Element nodes are
/// listed counter-clockwise starting at the bottom-left node. Node n owns the
/// global DOFs 2n (x) and 2n+1 (y).
class Mesh {
 public:
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double width() const { return width_; }
  double height() const { return height_; }
  double elem_w() const { return elem_w_; }
  double elem_h() const { return elem_h_; }
  double thickness() const { return thickness_; }

  int n_el() const { return nx_ * ny_; }
  int n_nd() const { return (nx_ + 1) * (ny_ + 1); }
  int n_dof() const { return 2 * n_nd(); }
  int n_free() const { return static_cast<int>(free_dofs_.size()); }
  int n_fixed() const { return n_dof() - n_free(); }

  int node_id(int i, int j) const { return j * (nx_ + 1) + i; }
  int element_id(int i, int j) const { return j * nx_ + i; }
  static int dof(int node, Axis a) { return 2 * node + static_cast<int>(a); }

  const Eigen::Vector2d& node(int n) const { return coords_[n]; }
  const std::array<int, 4>& element(int e) const { return conn_[e]; }
  Eigen::Vector2d element_center(int e) const;
  double element_volume() const { return elem_w_ * elem_h_ * thickness_; }
  std::array<Eigen::Vector2d, 4> element_coords(int e) const;

  /// Global DOF indices of element e, in element order (x0, y0, x1, y1, ...).
  std::array<int, 8> element_dofs(int e) const;

  bool is_fixed(int dof) const { return free_index_[dof] < 0; }
  /// Free-DOF index of a global DOF, -1 for a fixed one.
  int free_index(int dof) const { return free_index_[dof]; }
  const std::vector<int>& free_dofs() const { return free_dofs_; }

  /// Node closest to a point (ties resolved toward the lower index).
  int nearest_node(const Eigen::Vector2d& p) const;

  friend bool operator==(const Mesh&, const Mesh&) = default;

 private:
  friend Mesh build_grid(int, int, double, double, double);
  friend Mesh fix_region(const Mesh&, const std::function<bool(const Eigen::Vector2d&)>&, AxisSet);
  void renumber_free();

  int nx_ = 0;
  int ny_ = 0;
  double width_ = 0.0;
  double height_ = 0.0;
  double elem_w_ = 0.0;
  double elem_h_ = 0.0;
  double thickness_ = 0.0;
  std::vector<Eigen::Vector2d> coords_;
  std::vector<std::array<int, 4>> conn_;
  std::vector<int> free_index_;
  std::vector<int> free_dofs_;
};

/// Throws std::invalid_argument on non-positive counts or dimensions.
Mesh build_grid(int nx, int ny, double width, double height, double thickness);

/// Returns a copy of `mesh` with the selected DOFs of every node matching
/// `pred` marked fixed. An empty selection leaves the mesh unchanged and
/// emits a warning on stderr.
Mesh fix_region(const Mesh& mesh, const std::function<bool(const Eigen::Vector2d&)>& pred,
                 AxisSet axes);

/// Full-length (2*n_nd) vector restricted to the free DOFs.
Eigen::VectorXd gather_free(const Mesh& mesh, const Eigen::VectorXd& full);
/// Inverse of gather_free; fixed DOFs receive 0.
Eigen::VectorXd scatter_free(const Mesh& mesh, const Eigen::VectorXd& reduced);

struct PointLoad {
  int node;
  Axis dir;
  double magnitude;
};

/// Linear spring to ground.
struct Spring {
  int node;
  Axis dir;
  double stiffness;
};

/// Loads, port springs and the objective selector l.
///
/// For compliance problems l equals the external load vector; for mechanisms
/// l is -1 at every output DOF and 0 elsewhere.
struct LoadCase {
  std::vector<PointLoad> loads;
  std::vector<Spring> springs;
  std::vector<int> output_dofs;  // global DOF indices
  bool compliance = true;
};

/// External force vector over all DOFs.
Eigen::VectorXd load_vector(const Mesh& mesh, const LoadCase& lc);
/// Objective selector over all DOFs.
Eigen::VectorXd output_vector(const Mesh& mesh, const LoadCase& lc);

}  // namespace icatopo
