#include "icatopo/material.hpp"

#include "icatopo/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace icatopo {

MaterialParams::MaterialParams(double youngs_modulus, double poisson_ratio)
    : E_(youngs_modulus), nu_(poisson_ratio) {
  if (!(E_ > 0.0)) throw std::invalid_argument("MaterialParams: E must be positive");
  if (!(nu_ > -1.0 && nu_ < 0.5))
    throw std::invalid_argument("MaterialParams: Poisson ratio must lie in (-1, 0.5)");
  lambda_ = E_ * nu_ / ((1.0 + nu_) * (1.0 - 2.0 * nu_));
  mu_ = E_ / (2.0 * (1.0 + nu_));
}

const std::array<GaussPoint, 4>& gauss_2x2() {
  static const double g = 1.0 / std::sqrt(3.0);
  static const std::array<GaussPoint, 4> pts{{{-g, -g, 1.0}, {g, -g, 1.0}, {g, g, 1.0}, {-g, g, 1.0}}};
  return pts;
}

ShapeGradient shape_gradients(const std::array<Eigen::Vector2d, 4>& xy, double xi, double eta) {
  // dN/dxi and dN/deta for nodes (-1,-1), (1,-1), (1,1), (-1,1)
  const std::array<double, 4> dxi{-0.25 * (1 - eta), 0.25 * (1 - eta), 0.25 * (1 + eta), -0.25 * (1 + eta)};
  const std::array<double, 4> deta{-0.25 * (1 - xi), -0.25 * (1 + xi), 0.25 * (1 + xi), 0.25 * (1 - xi)};

  Eigen::Matrix2d jac = Eigen::Matrix2d::Zero();  // d(x,y)/d(xi,eta)
  for (int a = 0; a < 4; ++a) {
    jac(0, 0) += dxi[a] * xy[a].x();
    jac(0, 1) += deta[a] * xy[a].x();
    jac(1, 0) += dxi[a] * xy[a].y();
    jac(1, 1) += deta[a] * xy[a].y();
  }
  const double det = jac.determinant();
  const double scale = (xy[2] - xy[0]).squaredNorm() + (xy[3] - xy[1]).squaredNorm();
  if (!(det > 1e-14 * scale)) throw SingularGeometryError("shape_gradients: degenerate element geometry");
  const Eigen::Matrix2d jinv = jac.inverse();

  ShapeGradient out;
  out.G.setZero();
  out.detJ = det;
  for (int a = 0; a < 4; ++a) {
    const double dNdX = dxi[a] * jinv(0, 0) + deta[a] * jinv(1, 0);
    const double dNdY = dxi[a] * jinv(0, 1) + deta[a] * jinv(1, 1);
    out.G(0, 2 * a) = dNdX;
    out.G(1, 2 * a) = dNdY;
    out.G(2, 2 * a + 1) = dNdX;
    out.G(3, 2 * a + 1) = dNdY;
  }
  return out;
}

Kinematics deformation_gradient(const Mat48& G, const Vec8& u_e) {
  const Vec4 g = G * u_e;
  Kinematics k;
  k.F << 1.0 + g[0], g[1], g[2], 1.0 + g[3];
  k.J = k.F.determinant();
  return k;
}

namespace {

double checked_det(const Eigen::Matrix2d& F) {
  const double J = F.determinant();
  if (!(J > 0.0)) throw NonpositiveJacobianError("nonpositive det F");
  return J;
}

}  // namespace

double strain_energy(const Eigen::Matrix2d& F, const MaterialParams& mat) {
  const double J = checked_det(F);
  const double lnJ = std::log(J);
  return 0.5 * mat.mu() * (F.squaredNorm() - 2.0 - 2.0 * lnJ) +
         0.25 * mat.lambda() * (J * J - 1.0 - 2.0 * lnJ);
}

// P = mu (F - F^-T) + lambda/2 (J^2 - 1) F^-T
Vec4 pk1_stress(const Eigen::Matrix2d& F, const MaterialParams& mat) {
  const double J = checked_det(F);
  Eigen::Matrix2d H;  // F^-T
  H << F(1, 1), -F(1, 0), -F(0, 1), F(0, 0);
  H /= J;
  const Eigen::Matrix2d P = mat.mu() * (F - H) + 0.5 * mat.lambda() * (J * J - 1.0) * H;
  return Vec4(P(0, 0), P(0, 1), P(1, 0), P(1, 1));
}

// dP_iJ/dF_kL = mu d_ik d_JL + c H_iL H_kJ + lambda J^2 H_iJ H_kL,
// c = mu - lambda/2 (J^2 - 1), H = F^-T.
Mat4 tangent_modulus(const Eigen::Matrix2d& F, const MaterialParams& mat) {
  const double J = checked_det(F);
  Eigen::Matrix2d H;
  H << F(1, 1), -F(1, 0), -F(0, 1), F(0, 0);
  H /= J;
  const double c = mat.mu() - 0.5 * mat.lambda() * (J * J - 1.0);
  const double b = mat.lambda() * J * J;
  Mat4 D;
  for (int i = 0; i < 2; ++i)
    for (int Jx = 0; Jx < 2; ++Jx)
      for (int k = 0; k < 2; ++k)
        for (int L = 0; L < 2; ++L) {
          double v = c * H(i, L) * H(k, Jx) + b * H(i, Jx) * H(k, L);
          if (i == k && Jx == L) v += mat.mu();
          D(2 * i + Jx, 2 * k + L) = v;
        }
  return D;
}

}  // namespace icatopo
