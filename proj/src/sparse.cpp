#include "icatopo/sparse.hpp"

#include "icatopo/error.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

namespace icatopo {

// ---------------------------------------------------------------------------
// Storage

int SparsePattern::find(int i, int j) const {
  if (i < j) std::swap(i, j);
  const auto first = row_idx.begin() + col_ptr[j];
  const auto last = row_idx.begin() + col_ptr[j + 1];
  const auto it = std::lower_bound(first, last, i);
  return (it != last && *it == i) ? static_cast<int>(it - row_idx.begin()) : -1;
}

std::shared_ptr<const SparsePattern> SparsePattern::from_entries(int n, std::vector<std::pair<int, int>> entries) {
  for (auto& [i, j] : entries) {
    if (i < 0 || j < 0 || i >= n || j >= n) throw std::invalid_argument("SparsePattern: entry out of range");
    if (i < j) std::swap(i, j);
  }
  for (int k = 0; k < n; ++k) entries.emplace_back(k, k);
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
  entries.erase(std::unique(entries.begin(), entries.end()), entries.end());

  auto p = std::make_shared<SparsePattern>();
  p->n = n;
  p->col_ptr.assign(static_cast<size_t>(n) + 1, 0);
  p->row_idx.reserve(entries.size());
  for (const auto& [i, j] : entries) {
    ++p->col_ptr[j + 1];
    p->row_idx.push_back(i);
  }
  for (int j = 0; j < n; ++j) p->col_ptr[j + 1] += p->col_ptr[j];
  return p;
}

SparseSym::SparseSym(std::shared_ptr<const SparsePattern> pattern)
    : pattern_(std::move(pattern)), values_(static_cast<size_t>(pattern_->nnz()), 0.0) {}

void SparseSym::set_zero() { std::fill(values_.begin(), values_.end(), 0.0); }

void SparseSym::add(int i, int j, double v) {
  const int p = pattern_->find(i, j);
  if (p < 0) throw std::invalid_argument("SparseSym::add: entry not in pattern");
  values_[p] += v;
}

Eigen::VectorXd SparseSym::multiply(const Eigen::VectorXd& x) const {
  const int n = rows();
  if (x.size() != n) throw std::invalid_argument("SparseSym::multiply: dimension mismatch");
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  const auto& cp = pattern_->col_ptr;
  const auto& ri = pattern_->row_idx;
  for (int j = 0; j < n; ++j) {
    double acc = 0.0;
    const double xj = x[j];
    for (int p = cp[j]; p < cp[j + 1]; ++p) {
      const int i = ri[p];
      const double v = values_[p];
      y[i] += v * xj;
      if (i != j) acc += v * x[i];
    }
    y[j] += acc;
  }
  return y;
}

double SparseSym::norm_inf() const {
  const int n = rows();
  std::vector<double> rowsum(static_cast<size_t>(n), 0.0);
  const auto& cp = pattern_->col_ptr;
  const auto& ri = pattern_->row_idx;
  for (int j = 0; j < n; ++j)
    for (int p = cp[j]; p < cp[j + 1]; ++p) {
      const double a = std::abs(values_[p]);
      rowsum[ri[p]] += a;
      if (ri[p] != j) rowsum[j] += a;
    }
  double m = 0.0;
  for (double s : rowsum) m = std::max(m, s);
  return m;
}

Eigen::MatrixXd SparseSym::to_dense() const {
  const int n = rows();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  const auto& cp = pattern_->col_ptr;
  const auto& ri = pattern_->row_idx;
  for (int j = 0; j < n; ++j)
    for (int p = cp[j]; p < cp[j + 1]; ++p) {
      A(ri[p], j) = values_[p];
      A(j, ri[p]) = values_[p];
    }
  return A;
}

SparseSym SparseSym::from_dense(const Eigen::MatrixXd& A) {
  const int n = static_cast<int>(A.rows());
  std::vector<std::pair<int, int>> entries;
  for (int j = 0; j < n; ++j)
    for (int i = j; i < n; ++i)
      if (A(i, j) != 0.0 || A(j, i) != 0.0) entries.emplace_back(i, j);
  SparseSym K(SparsePattern::from_entries(n, entries));
  const auto& cp = K.pattern().col_ptr;
  const auto& ri = K.pattern().row_idx;
  for (int j = 0; j < n; ++j)
    for (int p = cp[j]; p < cp[j + 1]; ++p) K.values_[p] = A(ri[p], j);
  return K;
}

bool same_pattern(const SparseSym& a, const SparseSym& b) {
  if (a.pattern_ptr() == b.pattern_ptr()) return true;
  return a.rows() == b.rows() && a.pattern().col_ptr == b.pattern().col_ptr &&
         a.pattern().row_idx == b.pattern().row_idx;
}

Eigen::VectorXd delta_apply(const SparseSym& K_new, const SparseSym& K_old, const Eigen::VectorXd& v) {
  if (!same_pattern(K_new, K_old)) throw std::invalid_argument("delta_apply: sparsity patterns differ");
  const int n = K_new.rows();
  if (v.size() != n) throw std::invalid_argument("delta_apply: dimension mismatch");
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  const auto& cp = K_new.pattern().col_ptr;
  const auto& ri = K_new.pattern().row_idx;
  const auto& a = K_new.values();
  const auto& b = K_old.values();
  for (int j = 0; j < n; ++j) {
    double acc = 0.0;
    for (int p = cp[j]; p < cp[j + 1]; ++p) {
      const double d = a[p] - b[p];
      if (d == 0.0) continue;
      const int i = ri[p];
      y[i] += d * v[j];
      if (i != j) acc += d * v[i];
    }
    y[j] += acc;
  }
  return y;
}

void write_matrix_market(const SparseSym& K, std::ostream& os) {
  os << "%%MatrixMarket matrix coordinate real symmetric\n";
  os << K.rows() << ' ' << K.rows() << ' ' << K.pattern().nnz() << '\n';
  const auto& cp = K.pattern().col_ptr;
  const auto& ri = K.pattern().row_idx;
  os << std::setprecision(17);
  for (int j = 0; j < K.rows(); ++j)
    for (int p = cp[j]; p < cp[j + 1]; ++p) os << ri[p] + 1 << ' ' << j + 1 << ' ' << K.values()[p] << '\n';
}

// ---------------------------------------------------------------------------
// Symbolic analysis

std::shared_ptr<const LdltSymbolic> LdltSymbolic::analyze(const std::shared_ptr<const SparsePattern>& pattern) {
  const SparsePattern& A = *pattern;
  const int n = A.n;
  auto s = std::make_shared<LdltSymbolic>();
  s->n_ = n;
  s->pattern_ = pattern;

  // Fill-reducing ordering.
  {
    std::vector<Eigen::Triplet<double, int>> trip;
    trip.reserve(static_cast<size_t>(A.nnz()));
    for (int j = 0; j < n; ++j)
      for (int p = A.col_ptr[j]; p < A.col_ptr[j + 1]; ++p) trip.emplace_back(A.row_idx[p], j, 1.0);
    Eigen::SparseMatrix<double, Eigen::ColMajor, int> M(n, n);
    M.setFromTriplets(trip.begin(), trip.end());
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> pinv;
    Eigen::AMDOrdering<int> amd;
    amd(M, pinv);
    s->perm_.assign(pinv.indices().data(), pinv.indices().data() + n);
  }
  s->perm_inv_.assign(static_cast<size_t>(n), 0);
  for (int k = 0; k < n; ++k) s->perm_inv_[s->perm_[k]] = k;

  // Permuted lower part of A, and its upper structure by column.
  std::vector<int> cnt(static_cast<size_t>(n) + 1, 0);
  std::vector<int> ucnt(static_cast<size_t>(n) + 1, 0);
  for (int j = 0; j < n; ++j)
    for (int p = A.col_ptr[j]; p < A.col_ptr[j + 1]; ++p) {
      const int a = s->perm_inv_[A.row_idx[p]];
      const int b = s->perm_inv_[j];
      ++cnt[std::min(a, b) + 1];
      if (a != b) ++ucnt[std::max(a, b) + 1];
    }
  for (int k = 0; k < n; ++k) {
    cnt[k + 1] += cnt[k];
    ucnt[k + 1] += ucnt[k];
  }
  s->a_ptr_ = cnt;
  s->a_row_.assign(static_cast<size_t>(A.nnz()), 0);
  s->a_src_.assign(static_cast<size_t>(A.nnz()), 0);
  std::vector<int> upper(static_cast<size_t>(ucnt[n]));
  {
    std::vector<int> fill(cnt.begin(), cnt.end() - 1);
    std::vector<int> ufill(ucnt.begin(), ucnt.end() - 1);
    for (int j = 0; j < n; ++j)
      for (int p = A.col_ptr[j]; p < A.col_ptr[j + 1]; ++p) {
        const int a = s->perm_inv_[A.row_idx[p]];
        const int b = s->perm_inv_[j];
        const int c = std::min(a, b);
        const int r = std::max(a, b);
        s->a_row_[fill[c]] = r;
        s->a_src_[fill[c]++] = p;
        if (r != c) upper[ufill[r]++] = c;
      }
  }

  // Elimination tree.
  s->parent_.assign(static_cast<size_t>(n), -1);
  {
    std::vector<int> ancestor(static_cast<size_t>(n), -1);
    for (int k = 0; k < n; ++k)
      for (int q = ucnt[k]; q < ucnt[k + 1]; ++q) {
        int i = upper[q];
        while (i != -1 && i < k) {
          const int next = ancestor[i];
          ancestor[i] = k;
          if (next == -1) s->parent_[i] = k;
          i = next;
        }
      }
  }

  // Row structure of L by elimination-tree reach.
  std::vector<int> flag(static_cast<size_t>(n), -1);
  s->r_ptr_.assign(static_cast<size_t>(n) + 1, 0);
  std::vector<int> colcount(static_cast<size_t>(n), 0);
  for (int k = 0; k < n; ++k) {
    flag[k] = k;
    for (int q = ucnt[k]; q < ucnt[k + 1]; ++q)
      for (int i = upper[q]; flag[i] != k; i = s->parent_[i]) {
        flag[i] = k;
        s->r_col_.push_back(i);
        ++colcount[i];
      }
    s->r_ptr_[k + 1] = static_cast<int>(s->r_col_.size());
  }

  s->l_ptr_.assign(static_cast<size_t>(n) + 1, 0);
  for (int j = 0; j < n; ++j) s->l_ptr_[j + 1] = s->l_ptr_[j] + colcount[j];
  s->l_row_.assign(static_cast<size_t>(s->l_ptr_[n]), 0);
  {
    std::vector<int> fill(s->l_ptr_.begin(), s->l_ptr_.end() - 1);
    for (int k = 0; k < n; ++k)
      for (int q = s->r_ptr_[k]; q < s->r_ptr_[k + 1]; ++q) s->l_row_[fill[s->r_col_[q]]++] = k;
  }

  // struct(L_k) \ {k+1} == struct(L_{k+1}) whenever parent(k) = k+1 and the
  // column counts differ by one.
  s->pair_ok_.assign(static_cast<size_t>(n), 0);
  for (int k = 0; k + 1 < n; ++k)
    s->pair_ok_[k] = (s->parent_[k] == k + 1 && colcount[k] == colcount[k + 1] + 1) ? 1 : 0;
  return s;
}

// ---------------------------------------------------------------------------
// Numeric factorization

LdltFactorization ldlt_factor(const SparseSym& K, std::shared_ptr<const LdltSymbolic> sym) {
  if (!sym) sym = LdltSymbolic::analyze(K.pattern_ptr());
  if (sym->pattern_ != K.pattern_ptr() &&
      (sym->pattern_->col_ptr != K.pattern().col_ptr || sym->pattern_->row_idx != K.pattern().row_idx))
    throw std::invalid_argument("ldlt_factor: symbolic analysis belongs to a different pattern");

  const LdltSymbolic& S = *sym;
  const int n = S.n_;
  const auto& kv = K.values();
  const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;
  const double tol = 1e-14 * K.norm_inf();

  LdltFactorization F;
  F.sym_ = sym;
  F.lx_.assign(S.l_row_.size(), 0.0);
  F.d_.assign(static_cast<size_t>(n), 0.0);
  F.e_.assign(static_cast<size_t>(n), 0.0);
  F.block_.assign(static_cast<size_t>(n), 1);

  std::vector<double> x(static_cast<size_t>(n), 0.0);
  std::vector<double> x2(static_cast<size_t>(n), 0.0);
  std::vector<double> lk(static_cast<size_t>(n), 0.0);
  std::vector<int> next(S.l_ptr_.begin(), S.l_ptr_.end() - 1);
  auto& lx = F.lx_;

  // Column k of the Schur complement into w, skipping the update from column `skip`.
  auto schur_column = [&](int k, std::vector<double>& w, int skip) {
    for (int p = S.a_ptr_[k]; p < S.a_ptr_[k + 1]; ++p) w[S.a_row_[p]] += kv[S.a_src_[p]];
    for (int q = S.r_ptr_[k]; q < S.r_ptr_[k + 1]; ++q) {
      const int j = S.r_col_[q];
      if (j != skip) lk[j] = lx[next[j]];
    }
    for (int q = S.r_ptr_[k]; q < S.r_ptr_[k + 1]; ++q) {
      const int j = S.r_col_[q];
      if (j == skip) continue;
      double wj;
      switch (F.block_[j]) {
        case 2: wj = F.d_[j] * lk[j] + F.e_[j] * lk[j + 1]; break;
        case -2: wj = F.e_[j - 1] * lk[j - 1] + F.d_[j] * lk[j]; break;
        default: wj = F.d_[j] * lk[j]; break;
      }
      const int p0 = next[j]++;
      w[k] -= lk[j] * wj;
      for (int p = p0 + 1; p < S.l_ptr_[j + 1]; ++p) w[S.l_row_[p]] -= lx[p] * wj;
    }
    for (int q = S.r_ptr_[k]; q < S.r_ptr_[k + 1]; ++q) lk[S.r_col_[q]] = 0.0;
  };

  auto singular = [&](int k) {
    const int orig = S.perm_[k];
    return SingularMatrixError("ldlt_factor: singular matrix at pivot " + std::to_string(orig), orig);
  };

  bool precomputed = false;
  for (int k = 0; k < n; ++k) {
    if (F.block_[k] == -2) continue;
    if (precomputed) {
      std::swap(x, x2);
      precomputed = false;
    } else {
      schur_column(k, x, -1);
    }
    const int c0 = S.l_ptr_[k];
    const int c1 = S.l_ptr_[k + 1];
    const double akk = x[k];
    double omega = 0.0;
    for (int p = c0; p < c1; ++p) omega = std::max(omega, std::abs(x[S.l_row_[p]]));

    bool pair = false;
    bool have_next = false;
    if (S.pair_ok_[k] && std::abs(akk) < alpha * omega) {
      schur_column(k + 1, x2, k);
      have_next = true;
      const double b = x[k + 1];
      const double c = x2[k + 1];
      const double det = akk * c - b * b;
      pair = std::abs(det) > tol * std::max({std::abs(akk), std::abs(b), std::abs(c)});
    }

    if (pair) {
      const double b = x[k + 1];
      const double c = x2[k + 1];
      const double det = akk * c - b * b;
      const double i00 = c / det, i01 = -b / det, i11 = akk / det;
      const int q0 = S.l_ptr_[k + 1];
      for (int p = c0; p < c1; ++p) {
        const int i = S.l_row_[p];
        if (i == k + 1) {
          lx[p] = 0.0;
          continue;
        }
        const int q = q0 + (p - c0 - 1);
        lx[p] = x[i] * i00 + x2[i] * i01;
        lx[q] = x[i] * i01 + x2[i] * i11;
      }
      F.d_[k] = akk;
      F.d_[k + 1] = c;
      F.e_[k] = b;
      F.block_[k] = 2;
      F.block_[k + 1] = -2;
      ++F.num_2x2_;
      // The pair's pointers into L(:, k) start at row k+2.
      next[k] = c0 + 1;
      for (int p = c0; p < c1; ++p) {
        x[S.l_row_[p]] = 0.0;
        x2[S.l_row_[p]] = 0.0;
      }
      x[k] = 0.0;
      x2[k + 1] = 0.0;
      continue;
    }

    if (!(std::abs(akk) > tol)) throw singular(k);
    F.d_[k] = akk;
    for (int p = c0; p < c1; ++p) lx[p] = x[S.l_row_[p]] / akk;
    if (have_next) {
      // Fold the 1x1 pivot's update into the precomputed column k+1.
      const double lk1 = lx[c0];  // row k+1 is the first entry since parent(k) = k+1
      const double wk = akk * lk1;
      for (int p = c0; p < c1; ++p) x2[S.l_row_[p]] -= lx[p] * wk;
      ++next[k];
      precomputed = true;
    }
    for (int p = c0; p < c1; ++p) x[S.l_row_[p]] = 0.0;
    x[k] = 0.0;
  }
  return F;
}

Eigen::VectorXd LdltFactorization::solve(const Eigen::VectorXd& b) const {
  const LdltSymbolic& S = *sym_;
  const int n = S.n_;
  if (b.size() != n) throw std::invalid_argument("LdltFactorization::solve: dimension mismatch");
  std::vector<double> y(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) y[k] = b[S.perm_[k]];

  for (int j = 0; j < n; ++j) {
    const double yj = y[j];
    if (yj == 0.0) continue;
    for (int p = S.l_ptr_[j]; p < S.l_ptr_[j + 1]; ++p) y[S.l_row_[p]] -= lx_[p] * yj;
  }
  for (int k = 0; k < n; ++k) {
    if (block_[k] == 2) {
      const double a = d_[k], bb = e_[k], c = d_[k + 1];
      const double det = a * c - bb * bb;
      const double y0 = y[k], y1 = y[k + 1];
      y[k] = (c * y0 - bb * y1) / det;
      y[k + 1] = (a * y1 - bb * y0) / det;
      ++k;
    } else {
      y[k] /= d_[k];
    }
  }
  for (int j = n - 1; j >= 0; --j) {
    double s = y[j];
    for (int p = S.l_ptr_[j]; p < S.l_ptr_[j + 1]; ++p) s -= lx_[p] * y[S.l_row_[p]];
    y[j] = s;
  }

  Eigen::VectorXd x(n);
  for (int k = 0; k < n; ++k) x[S.perm_[k]] = y[k];
  return x;
}

Eigen::MatrixXd LdltFactorization::dense_L() const {
  const LdltSymbolic& S = *sym_;
  Eigen::MatrixXd L = Eigen::MatrixXd::Identity(S.n_, S.n_);
  for (int j = 0; j < S.n_; ++j)
    for (int p = S.l_ptr_[j]; p < S.l_ptr_[j + 1]; ++p) L(S.l_row_[p], j) = lx_[p];
  return L;
}

Eigen::MatrixXd LdltFactorization::dense_D() const {
  const int n = sym_->n_;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    D(k, k) = d_[k];
    if (block_[k] == 2) {
      D(k, k + 1) = e_[k];
      D(k + 1, k) = e_[k];
    }
  }
  return D;
}

}  // namespace icatopo
