#pragma once

#include "icatopo/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <string>
#include <string_view>

namespace icatopo {

enum class FilterKernel { Cone, Gaussian };

FilterKernel parse_kernel(std::string_view name);
std::string to_string(FilterKernel k);

/// Density filter rho_phys = W rho_design with
/// W_ij = w(d_ij) v_j / sum_k w(d_ik) v_k over element-center distances.
/// The radius is given in element lengths (multiples of the smaller element
/// side). Cone: w = max(0, 1 - d/R). Gaussian: w = exp(-(3d/R)^2 / 2),
/// truncated at d = R.
class DensityFilter {
 public:
  DensityFilter(const Mesh& mesh, double radius_elements, FilterKernel kernel = FilterKernel::Cone);

  int size() const { return static_cast<int>(W_.rows()); }
  double radius() const { return radius_; }
  const Eigen::SparseMatrix<double, Eigen::RowMajor>& matrix() const { return W_; }

  /// Throws std::invalid_argument on a length mismatch.
  Eigen::VectorXd apply(const Eigen::VectorXd& rho_design) const;
  /// Exact transpose of apply.
  Eigen::VectorXd backpropagate(const Eigen::VectorXd& g_phys) const;

 private:
  double radius_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> W_;
};

}  // namespace icatopo
