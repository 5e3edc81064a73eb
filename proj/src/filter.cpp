#include "icatopo/filter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace icatopo {

FilterKernel parse_kernel(std::string_view name) {
  if (name == "cone") return FilterKernel::Cone;
  if (name == "gaussian") return FilterKernel::Gaussian;
  throw std::invalid_argument("unknown filter kernel '" + std::string(name) + "'");
}

std::string to_string(FilterKernel k) { return k == FilterKernel::Cone ? "cone" : "gaussian"; }

DensityFilter::DensityFilter(const Mesh& mesh, double radius_elements, FilterKernel kernel)
    : radius_(radius_elements) {
  if (!(radius_elements >= 0.0)) throw std::invalid_argument("DensityFilter: radius must be non-negative");
  const double h = std::min(mesh.elem_w(), mesh.elem_h());
  const double R = radius_elements * h;
  const int nx = mesh.nx(), ny = mesh.ny();
  const int reach_x = static_cast<int>(std::ceil(R / mesh.elem_w()));
  const int reach_y = static_cast<int>(std::ceil(R / mesh.elem_h()));
  const double v = mesh.element_volume();  // uniform, kept for the general form

  std::vector<Eigen::Triplet<double>> trip;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int e = mesh.element_id(i, j);
      const size_t first = trip.size();
      double sum = 0.0;
      for (int jj = std::max(0, j - reach_y); jj <= std::min(ny - 1, j + reach_y); ++jj)
        for (int ii = std::max(0, i - reach_x); ii <= std::min(nx - 1, i + reach_x); ++ii) {
          const double dx = (ii - i) * mesh.elem_w(), dy = (jj - j) * mesh.elem_h();
          const double d = std::sqrt(dx * dx + dy * dy);
          double w;
          if (ii == i && jj == j) {
            w = 1.0;
          } else if (d >= R) {
            continue;
          } else if (kernel == FilterKernel::Cone) {
            w = 1.0 - d / R;
          } else {
            const double s = 3.0 * d / R;
            w = std::exp(-0.5 * s * s);
          }
          w *= v;
          trip.emplace_back(e, mesh.element_id(ii, jj), w);
          sum += w;
        }
      for (size_t k = first; k < trip.size(); ++k)
        trip[k] = Eigen::Triplet<double>(trip[k].row(), trip[k].col(), trip[k].value() / sum);
    }
  W_.resize(mesh.n_el(), mesh.n_el());
  W_.setFromTriplets(trip.begin(), trip.end());
}

Eigen::VectorXd DensityFilter::apply(const Eigen::VectorXd& rho_design) const {
  if (rho_design.size() != W_.cols()) throw std::invalid_argument("DensityFilter::apply: length mismatch");
  return W_ * rho_design;
}

Eigen::VectorXd DensityFilter::backpropagate(const Eigen::VectorXd& g_phys) const {
  if (g_phys.size() != W_.rows()) throw std::invalid_argument("DensityFilter::backpropagate: length mismatch");
  return W_.transpose() * g_phys;
}

}  // namespace icatopo
