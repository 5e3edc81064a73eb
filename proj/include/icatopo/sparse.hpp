#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <utility>
#include <vector>

namespace icatopo {

/// Lower-triangular CSC pattern (diagonal included), rows sorted per column.
struct SparsePattern {
  int n = 0;
  std::vector<int> col_ptr;
  std::vector<int> row_idx;

  int nnz() const { return static_cast<int>(row_idx.size()); }
  /// Position of entry (i, j) with i >= j, or -1 if structurally zero.
  int find(int i, int j) const;

  /// Builds a pattern from (row, col) pairs in either triangle. Diagonal
  /// entries are always included.
  static std::shared_ptr<const SparsePattern> from_entries(int n, std::vector<std::pair<int, int>> entries);
};

/// Symmetric sparse matrix stored as its lower triangle.
class SparseSym {
 public:
  SparseSym() = default;
  explicit SparseSym(std::shared_ptr<const SparsePattern> pattern);

  int rows() const { return pattern_ ? pattern_->n : 0; }
  const SparsePattern& pattern() const { return *pattern_; }
  const std::shared_ptr<const SparsePattern>& pattern_ptr() const { return pattern_; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  void set_zero();
  /// Adds v at (i, j); either triangle. Throws if not in the pattern.
  void add(int i, int j, double v);

  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
  double norm_inf() const;
  Eigen::MatrixXd to_dense() const;
  static SparseSym from_dense(const Eigen::MatrixXd& A);

 private:
  std::shared_ptr<const SparsePattern> pattern_;
  std::vector<double> values_;
};

bool same_pattern(const SparseSym& a, const SparseSym& b);

/// (K_new - K_old) v without forming the difference. Patterns must match.
Eigen::VectorXd delta_apply(const SparseSym& K_new, const SparseSym& K_old, const Eigen::VectorXd& v);

/// Matrix Market coordinate/real/symmetric export, 1-based indices.
void write_matrix_market(const SparseSym& K, std::ostream& os);

/// Ordering and fill pattern of an LDL^T factorization, shared by every
/// factorization of matrices with the same sparsity pattern.
class LdltFactorization;
LdltFactorization ldlt_factor(const SparseSym& K, std::shared_ptr<const class LdltSymbolic> sym);

class LdltSymbolic {
 public:
  /// Approximate-minimum-degree ordering followed by elimination-tree
  /// symbolic factorization.
  static std::shared_ptr<const LdltSymbolic> analyze(const std::shared_ptr<const SparsePattern>& pattern);

  int n() const { return n_; }
  int nnz_l() const { return static_cast<int>(l_row_.size()); }
  const std::vector<int>& new_to_old() const { return perm_; }
  const SparsePattern& pattern() const { return *pattern_; }

 private:
  friend class LdltFactorization;
  friend LdltFactorization ldlt_factor(const SparseSym&, std::shared_ptr<const LdltSymbolic>);
  int n_ = 0;
  std::shared_ptr<const SparsePattern> pattern_;
  std::vector<int> perm_;      // new -> old
  std::vector<int> perm_inv_;  // old -> new
  std::vector<int> parent_;    // elimination tree
  // L: strictly lower part, CSC in the permuted ordering.
  std::vector<int> l_ptr_;
  std::vector<int> l_row_;
  // Row structure of L (columns j < k with L(k, j) != 0).
  std::vector<int> r_ptr_;
  std::vector<int> r_col_;
  // Permuted lower part of A: for permuted column k, rows >= k and the
  // position of the value in the original pattern.
  std::vector<int> a_ptr_;
  std::vector<int> a_row_;
  std::vector<int> a_src_;
  // k may pair with k+1 in a 2x2 pivot without extra fill.
  std::vector<std::uint8_t> pair_ok_;
};

/// P K P^T = L D L^T with unit lower L and block-diagonal D holding 1x1 and
/// 2x2 pivots. The ordering is fixed by the symbolic analysis; a 2x2 pivot
/// is taken on an adjacent pair (k, k+1) with identical fill when the 1x1
/// pivot fails the Bunch-Kaufman growth test.
class LdltFactorization {
 public:
  LdltFactorization() = default;

  int rows() const { return sym_ ? sym_->n_ : 0; }
  bool valid() const { return static_cast<bool>(sym_); }
  int num_2x2_pivots() const { return num_2x2_; }
  const LdltSymbolic& symbolic() const { return *sym_; }

  /// Throws std::invalid_argument on a length mismatch.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

  /// Dense factors in the permuted ordering (testing aid).
  Eigen::MatrixXd dense_L() const;
  Eigen::MatrixXd dense_D() const;

 private:
  friend LdltFactorization ldlt_factor(const SparseSym&, std::shared_ptr<const LdltSymbolic>);
  std::shared_ptr<const LdltSymbolic> sym_;
  std::vector<double> lx_;
  std::vector<double> d_;     // block diagonal entries
  std::vector<double> e_;     // e_[k]: off-diagonal of a 2x2 block starting at k
  std::vector<std::int8_t> block_;  // 1: 1x1, 2: first of 2x2, -2: second of 2x2
  int num_2x2_ = 0;
};

/// Numeric factorization. Throws SingularMatrixError when no acceptable
/// pivot exceeds 1e-14 * ||K||_inf. `sym` may be null (analyzed on the fly).
LdltFactorization ldlt_factor(const SparseSym& K, std::shared_ptr<const LdltSymbolic> sym = nullptr);

}  // namespace icatopo
