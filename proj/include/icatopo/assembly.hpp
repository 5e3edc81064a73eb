#pragma once

#include "icatopo/material.hpp"
#include "icatopo/mesh.hpp"
#include "icatopo/sparse.hpp"

#include <Eigen/Core>

#include <array>
#include <memory>
#include <vector>

namespace icatopo {

/// Quadrature data of one element: G and the integration weight
/// (Gauss weight * detJ * thickness) at each of the 2x2 points.
struct ElementQuadrature {
  std::array<Mat48, 4> G;
  std::array<double, 4> w;
};

ElementQuadrature element_quadrature(const std::array<Eigen::Vector2d, 4>& xy, double thickness);

// Element kernels. All SIMP-scaled by rho^p and throw
// NonpositiveJacobianError if det F <= 0 at any quadrature point.

/// rho^p * integral of W.
double element_energy(double rho, double p, const Vec8& u_e, const ElementQuadrature& q,
                      const MaterialParams& mat);
/// rho^p * integral of G^T sigma.
Vec8 element_internal_force(double rho, double p, const Vec8& u_e, const ElementQuadrature& q,
                            const MaterialParams& mat);
/// rho^p * integral of G^T D G.
Mat8 element_tangent(double rho, double p, const Vec8& u_e, const ElementQuadrature& q,
                     const MaterialParams& mat);
/// Small-strain stiffness, integral of G^T D(I) G.
Mat8 linear_element_stiffness(const ElementQuadrature& q, const MaterialParams& mat);

enum class Kinematics2D { Nonlinear, Linear };

/// Tangent stiffness and residual over the free DOFs.
struct GlobalSystem {
  SparseSym K;
  Eigen::VectorXd r;
};

/// Global assembly for one mesh and load case. The sparsity pattern and the
/// element-to-pattern scatter map are built once; matrices created by
/// make_matrix() share the pattern and are rewritten in place.
///
/// With Kinematics2D::Linear the residual becomes K(rho) u - f with the
/// small-strain stiffness, so the same solvers run the linear model.
class Assembler {
 public:
  Assembler(Mesh mesh, LoadCase loads, MaterialParams mat, Kinematics2D kin = Kinematics2D::Nonlinear);

  const Mesh& mesh() const { return *mesh_; }
  const LoadCase& loads() const { return loads_; }
  const MaterialParams& material() const { return mat_; }
  Kinematics2D kinematics() const { return kin_; }
  int n_free() const { return mesh_->n_free(); }
  const std::shared_ptr<const SparsePattern>& pattern() const { return pattern_; }
  const ElementQuadrature& quadrature() const { return quad_; }

  /// External force f and objective selector l over the free DOFs.
  const Eigen::VectorXd& external_force() const { return f_; }
  const Eigen::VectorXd& output_selector() const { return l_; }

  SparseSym make_matrix() const { return SparseSym(pattern_); }

  /// Element displacement vector gathered from free-DOF displacements.
  Vec8 element_displacements(int e, const Eigen::VectorXd& u) const;
  /// Free-DOF index per element DOF (-1 for fixed DOFs).
  const std::array<int, 8>& element_free_dofs(int e) const { return edofs_[e]; }

  /// Total potential energy: sum rho^p int W - f^T u + 1/2 u^T K_s u.
  double potential_energy(const Eigen::VectorXd& rho, double p, const Eigen::VectorXd& u) const;
  /// r = f_int + K_s u - f.
  Eigen::VectorXd residual(const Eigen::VectorXd& rho, double p, const Eigen::VectorXd& u) const;
  /// Overwrites the values of K (which must come from make_matrix()).
  void tangent(const Eigen::VectorXd& rho, double p, const Eigen::VectorXd& u, SparseSym& K) const;
  GlobalSystem assemble(const Eigen::VectorXd& rho, double p, const Eigen::VectorXd& u) const;

  /// dr/drho_e restricted to element e's DOFs: p rho_e^(p-1) int G^T sigma.
  Vec8 residual_density_derivative(int e, const Eigen::VectorXd& rho, double p, const Eigen::VectorXd& u) const;

  /// True iff det F > 0 at every quadrature point of every element.
  bool admissible(const Eigen::VectorXd& u) const;

 private:
  Vec8 element_force_unscaled(int e, const Vec8& ue) const;

  std::shared_ptr<const Mesh> mesh_;
  LoadCase loads_;
  MaterialParams mat_;
  Kinematics2D kin_;
  ElementQuadrature quad_;
  Mat8 k_lin_;
  std::shared_ptr<const SparsePattern> pattern_;
  std::vector<std::array<int, 8>> edofs_;
  std::vector<std::array<int, 36>> scatter_;  // lower 8x8 -> pattern position, -1 if fixed
  std::vector<std::pair<int, double>> springs_;  // free index, stiffness
  std::vector<int> spring_pos_;
  Eigen::VectorXd f_;
  Eigen::VectorXd l_;
};

}  // namespace icatopo
