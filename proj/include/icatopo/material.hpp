#pragma once

#include <Eigen/Core>

#include <array>

namespace icatopo {

using Vec4 = Eigen::Matrix<double, 4, 1>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat4 = Eigen::Matrix<double, 4, 4>;
using Mat8 = Eigen::Matrix<double, 8, 8>;
using Mat48 = Eigen::Matrix<double, 4, 8>;

/// Isotropic parameters of the compressible neo-Hookean law.
class MaterialParams {
 public:
  /// Throws std::invalid_argument unless E > 0 and -1 < nu < 0.5.
  MaterialParams(double youngs_modulus, double poisson_ratio);

  double E() const { return E_; }
  double nu() const { return nu_; }
  double lambda() const { return lambda_; }
  double mu() const { return mu_; }

 private:
  double E_;
  double nu_;
  double lambda_;
  double mu_;
};

// Tensors over the 2x2 deformation gradient are flattened row-major:
// index 2*i + J holds F(i, J), i.e. (dux/dX, dux/dY, duy/dX, duy/dY).

/// Shape-function gradient matrix at one quadrature point.
struct ShapeGradient {
  Mat48 G;      // maps element displacements to the flattened displacement gradient
  double detJ;  // isoparametric Jacobian determinant (area scale)
};

/// Bilinear Q4 gradients at reference coordinates (xi, eta) in [-1, 1]^2.
/// Nodes are counter-clockwise. Throws SingularGeometryError when detJ <= 0.
ShapeGradient shape_gradients(const std::array<Eigen::Vector2d, 4>& xy, double xi, double eta);

struct Kinematics {
  Eigen::Matrix2d F;
  double J;
};

/// F = I + grad u. A non-positive J is reported, not thrown.
Kinematics deformation_gradient(const Mat48& G, const Vec8& u_e);

/// Stored energy per unit reference volume (plane strain):
/// W = mu/2 (tr(F^T F) - 2 - 2 ln J) + lambda/4 (J^2 - 1 - 2 ln J).
double strain_energy(const Eigen::Matrix2d& F, const MaterialParams& mat);

/// First Piola-Kirchhoff stress dW/dF, flattened. Throws
/// NonpositiveJacobianError when det F <= 0.
Vec4 pk1_stress(const Eigen::Matrix2d& F, const MaterialParams& mat);

/// dP/dF as a 4x4 matrix over flattened indices. Throws
/// NonpositiveJacobianError when det F <= 0.
Mat4 tangent_modulus(const Eigen::Matrix2d& F, const MaterialParams& mat);

/// 2x2 Gauss rule on the reference square.
struct GaussPoint {
  double xi, eta, weight;
};
const std::array<GaussPoint, 4>& gauss_2x2();

}  // namespace icatopo
