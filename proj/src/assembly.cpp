#include "icatopo/assembly.hpp"

#include "icatopo/error.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace icatopo {

namespace {

// Index of (a, b), a >= b, in the packed lower triangle of an 8x8 matrix.
constexpr int packed(int a, int b) { return a * (a + 1) / 2 + b; }

[[noreturn]] void rethrow_for_element(int e) {
  throw NonpositiveJacobianError("nonpositive det F in element " + std::to_string(e), e);
}

}  // namespace

ElementQuadrature element_quadrature(const std::array<Eigen::Vector2d, 4>& xy, double thickness) {
  ElementQuadrature q;
  const auto& gp = gauss_2x2();
  for (int g = 0; g < 4; ++g) {
    const ShapeGradient sg = shape_gradients(xy, gp[g].xi, gp[g].eta);
    q.G[g] = sg.G;
    q.w[g] = gp[g].weight * sg.detJ * thickness;
  }
  return q;
}

double element_energy(double rho, double p, const Vec8& u_e, const ElementQuadrature& q,
                      const MaterialParams& mat) {
  double w = 0.0;
  for (int g = 0; g < 4; ++g) w += q.w[g] * strain_energy(deformation_gradient(q.G[g], u_e).F, mat);
  return std::pow(rho, p) * w;
}

Vec8 element_internal_force(double rho, double p, const Vec8& u_e, const ElementQuadrature& q,
                            const MaterialParams& mat) {
  Vec8 f = Vec8::Zero();
  for (int g = 0; g < 4; ++g)
    f.noalias() += q.w[g] * q.G[g].transpose() * pk1_stress(deformation_gradient(q.G[g], u_e).F, mat);
  return std::pow(rho, p) * f;
}

Mat8 element_tangent(double rho, double p, const Vec8& u_e, const ElementQuadrature& q,
                     const MaterialParams& mat) {
  Mat8 k = Mat8::Zero();
  for (int g = 0; g < 4; ++g) {
    const Mat4 D = tangent_modulus(deformation_gradient(q.G[g], u_e).F, mat);
    const Mat48 DG = D * q.G[g];
    k.noalias() += q.w[g] * q.G[g].transpose() * DG;
  }
  return std::pow(rho, p) * k;
}

Mat8 linear_element_stiffness(const ElementQuadrature& q, const MaterialParams& mat) {
  return element_tangent(1.0, 1.0, Vec8::Zero(), q, mat);
}

Assembler::Assembler(Mesh mesh, LoadCase loads, MaterialParams mat, Kinematics2D kin)
    : mesh_(std::make_shared<const Mesh>(std::move(mesh))), loads_(std::move(loads)), mat_(mat), kin_(kin) {
  const Mesh& m = *mesh_;
  // Regular grid: every element shares the reference quadrature.
  quad_ = element_quadrature(m.element_coords(0), m.thickness());
  k_lin_ = linear_element_stiffness(quad_, mat_);

  edofs_.resize(static_cast<size_t>(m.n_el()));
  std::vector<std::pair<int, int>> entries;
  entries.reserve(static_cast<size_t>(m.n_el()) * 36);
  for (int e = 0; e < m.n_el(); ++e) {
    const auto gd = m.element_dofs(e);
    for (int a = 0; a < 8; ++a) edofs_[e][a] = m.free_index(gd[a]);
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b <= a; ++b)
        if (edofs_[e][a] >= 0 && edofs_[e][b] >= 0) entries.emplace_back(edofs_[e][a], edofs_[e][b]);
  }
  pattern_ = SparsePattern::from_entries(m.n_free(), std::move(entries));

  scatter_.resize(static_cast<size_t>(m.n_el()));
  for (int e = 0; e < m.n_el(); ++e)
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b <= a; ++b) {
        const int ia = edofs_[e][a], ib = edofs_[e][b];
        scatter_[e][packed(a, b)] = (ia >= 0 && ib >= 0) ? pattern_->find(ia, ib) : -1;
      }

  for (const auto& s : loads_.springs) {
    const int fi = m.free_index(Mesh::dof(s.node, s.dir));
    if (fi < 0) continue;  // spring on a supported DOF does no work
    springs_.emplace_back(fi, s.stiffness);
    spring_pos_.push_back(pattern_->find(fi, fi));
  }
  f_ = gather_free(m, load_vector(m, loads_));
  l_ = gather_free(m, output_vector(m, loads_));
}

Vec8 Assembler::element_displacements(int e, const Eigen::VectorXd& u) const {
  Vec8 ue;
  for (int a = 0; a < 8; ++a) {
    const int i = edofs_[e][a];
    ue[a] = i >= 0 ? u[i] : 0.0;
  }
  return ue;
}

double Assembler::potential_energy(const Eigen::VectorXd& rho, double p, const Eigen::VectorXd& u) const {
  double pi = 0.0;
  for (int e = 0; e < mesh_->n_el(); ++e) {
    const Vec8 ue = element_displacements(e, u);
    if (kin_ == Kinematics2D::Linear) {
      pi += 0.5 * std::pow(rho[e], p) * ue.dot(k_lin_ * ue);
    } else {
      try {
        pi += element_energy(rho[e], p, ue, quad_, mat_);
      } catch (const NonpositiveJacobianError&) {
        rethrow_for_element(e);
      }
    }
  }
  for (const auto& [i, k] : springs_) pi += 0.5 * k * u[i] * u[i];
  return pi - f_.dot(u);
}

Vec8 Assembler::element_force_unscaled(int e, const Vec8& ue) const {
  if (kin_ == Kinematics2D::Linear) return k_lin_ * ue;
  try {
    return element_internal_force(1.0, 1.0, ue, quad_, mat_);
  } catch (const NonpositiveJacobianError&) {
    rethrow_for_element(e);
  }
}

Eigen::VectorXd Assembler::residual(const Eigen::VectorXd& rho, double p, const Eigen::VectorXd& u) const {
  if (u.size() != n_free()) throw std::invalid_argument("Assembler::residual: u must cover the free DOFs");
  Eigen::VectorXd r = -f_;
  for (int e = 0; e < mesh_->n_el(); ++e) {
    const Vec8 fe = std::pow(rho[e], p) * element_force_unscaled(e, element_displacements(e, u));
    for (int a = 0; a < 8; ++a) {
      const int i = edofs_[e][a];
      if (i >= 0) r[i] += fe[a];
    }
  }
  for (const auto& [i, k] : springs_) r[i] += k * u[i];
  return r;
}

void Assembler::tangent(const Eigen::VectorXd& rho, double p, const Eigen::VectorXd& u, SparseSym& K) const {
  if (K.pattern_ptr() != pattern_) throw std::invalid_argument("Assembler::tangent: matrix has a foreign pattern");
  K.set_zero();
  auto& kv = K.values();
  for (int e = 0; e < mesh_->n_el(); ++e) {
    Mat8 ke;
    if (kin_ == Kinematics2D::Linear) {
      ke = std::pow(rho[e], p) * k_lin_;
    } else {
      try {
        ke = element_tangent(rho[e], p, element_displacements(e, u), quad_, mat_);
      } catch (const NonpositiveJacobianError&) {
        rethrow_for_element(e);
      }
    }
    const auto& sc = scatter_[e];
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b <= a; ++b) {
        const int pos = sc[packed(a, b)];
        if (pos >= 0) kv[pos] += ke(a, b);
      }
  }
  for (size_t s = 0; s < springs_.size(); ++s) kv[spring_pos_[s]] += springs_[s].second;
}

GlobalSystem Assembler::assemble(const Eigen::VectorXd& rho, double p, const Eigen::VectorXd& u) const {
  GlobalSystem sys{make_matrix(), residual(rho, p, u)};
  tangent(rho, p, u, sys.K);
  return sys;
}

Vec8 Assembler::residual_density_derivative(int e, const Eigen::VectorXd& rho, double p,
                                            const Eigen::VectorXd& u) const {
  const double scale = p * std::pow(rho[e], p - 1.0);
  return scale * element_force_unscaled(e, element_displacements(e, u));
}

bool Assembler::admissible(const Eigen::VectorXd& u) const {
  if (kin_ == Kinematics2D::Linear) return true;
  for (int e = 0; e < mesh_->n_el(); ++e) {
    const Vec8 ue = element_displacements(e, u);
    for (int g = 0; g < 4; ++g)
      if (!(deformation_gradient(quad_.G[g], ue).J > 0.0)) return false;
  }
  return true;
}

}  // namespace icatopo
