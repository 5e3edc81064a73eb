#pragma once

#include "icatopo/assembly.hpp"
#include "icatopo/bench.hpp"
#include "icatopo/sparse.hpp"

#include <Eigen/Dense>

#include <limits>
#include <random>

namespace testing_support {

inline Eigen::MatrixXd random_matrix(std::mt19937& gen, int rows, int cols, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  Eigen::MatrixXd A(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) A(i, j) = d(gen);
  return A;
}

inline Eigen::VectorXd random_vector(std::mt19937& gen, int n, double lo = -1.0, double hi = 1.0) {
  return random_matrix(gen, n, 1, lo, hi).col(0);
}

inline Eigen::MatrixXd random_spd(std::mt19937& gen, int n, double shift = 1.0) {
  const Eigen::MatrixXd A = random_matrix(gen, n, n);
  return A * A.transpose() + shift * n * Eigen::MatrixXd::Identity(n, n);
}

inline Eigen::MatrixXd random_symmetric(std::mt19937& gen, int n) {
  const Eigen::MatrixXd A = random_matrix(gen, n, n);
  return 0.5 * (A + A.transpose());
}

// Copy of B on the pattern of A (both dense-pattern matrices of one size).
inline icatopo::SparseSym on_pattern(const icatopo::SparseSym& A, const Eigen::MatrixXd& B) {
  icatopo::SparseSym out(A.pattern_ptr());
  const auto& p = A.pattern();
  for (int j = 0; j < p.n; ++j)
    for (int k = p.col_ptr[j]; k < p.col_ptr[j + 1]; ++k) out.values()[k] = B(p.row_idx[k], j);
  return out;
}

inline double max_rel_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).lpNorm<Eigen::Infinity>() / std::max(1e-300, b.lpNorm<Eigen::Infinity>());
}

// min g^T x s.t. a^T x = V, lo <= x <= hi by enumeration. A vertex of this
// LP has at most one variable strictly between its bounds: try every
// lower/upper pattern for the others and solve the constraint for that one.
inline double knapsack_oracle(const Eigen::VectorXd& g, const Eigen::VectorXd& a, const Eigen::VectorXd& lo,
                              const Eigen::VectorXd& hi, double V) {
  const int n = static_cast<int>(g.size());
  double best = std::numeric_limits<double>::infinity();
  const double slack = 1e-12 * (std::abs(V) + a.cwiseAbs().dot(hi.cwiseAbs()));
  for (long mask = 0; mask < (1L << n); ++mask) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = (mask >> i) & 1 ? hi[i] : lo[i];
    if (std::abs(a.dot(x) - V) <= slack) best = std::min(best, g.dot(x));
    for (int j = 0; j < n; ++j) {
      const double rest = a.dot(x) - a[j] * x[j];
      const double xj = (V - rest) / a[j];
      if (xj < lo[j] || xj > hi[j]) continue;
      Eigen::VectorXd y = x;
      y[j] = xj;
      best = std::min(best, g.dot(y));
    }
  }
  return best;
}

// Small cantilever used throughout: 12x4 elements on the 120x30 domain.
inline icatopo::Problem small_cantilever() { return icatopo::build(icatopo::with_mesh(icatopo::cantilever(), 12, 4)); }

inline icatopo::Problem small_inverter() { return icatopo::build(icatopo::with_mesh(icatopo::inverter(), 12, 6)); }

}  // namespace testing_support
