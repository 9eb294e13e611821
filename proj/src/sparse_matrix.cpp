#include "mns/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mns {

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::vector<Triplet> triplets, bool symmetric) {
  SparseMatrix m(rows, cols);
  m.symmetric_ = symmetric;
  for (const auto& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      throw std::out_of_range("triplet index outside matrix dimensions");
    }
  }
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  m.col_idx_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  std::size_t k = 0;
  for (int r = 0; r < rows; ++r) {
    while (k < triplets.size() && triplets[k].row == r) {
      const int c = triplets[k].col;
      double sum = 0.0;
      while (k < triplets.size() && triplets[k].row == r && triplets[k].col == c) sum += triplets[k++].value;
      m.col_idx_.push_back(c);
      m.values_.push_back(sum);
    }
    m.row_ptr_[r + 1] = static_cast<int>(m.col_idx_.size());
  }
  return m;
}

SparseMatrix SparseMatrix::identity(int n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, n, std::move(t), true);
}

double SparseMatrix::coeff(int i, int j) const {
  const auto begin = col_idx_.begin() + row_ptr_[i];
  const auto end = col_idx_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(begin, end, j);
  return (it != end && *it == j) ? values_[it - col_idx_.begin()] : 0.0;
}

Vector SparseMatrix::operator*(const Vector& x) const {
  if (x.size() != cols_) throw std::invalid_argument("matrix-vector dimension mismatch");
  Vector y(rows_);
  for (int r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += values_[k] * x[col_idx_[k]];
    y[r] = s;
  }
  return y;
}

Vector SparseMatrix::transpose_multiply(const Vector& x) const {
  if (x.size() != rows_) throw std::invalid_argument("transpose matrix-vector dimension mismatch");
  Vector y = Vector::Zero(cols_);
  for (int r = 0; r < rows_; ++r) {
    const double xr = x[r];
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) y[col_idx_[k]] += values_[k] * xr;
  }
  return y;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Triplet> t;
  t.reserve(values_.size());
  for (int r = 0; r < rows_; ++r) {
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) t.push_back({col_idx_[k], r, values_[k]});
  }
  return from_triplets(cols_, rows_, std::move(t), symmetric_);
}

Vector SparseMatrix::diagonal() const {
  Vector d = Vector::Zero(std::min(rows_, cols_));
  for (int r = 0; r < d.size(); ++r) d[r] = coeff(r, r);
  return d;
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double SparseMatrix::symmetry_error() const {
  if (rows_ != cols_) throw std::invalid_argument("symmetry check requires a square matrix");
  const SparseMatrix diff = linear_combination(1.0, *this, -1.0, transpose());
  return diff.max_abs();
}

void SparseMatrix::eliminate_symmetric(std::span<const int> dofs, double diag) {
  std::vector<char> mask(static_cast<std::size_t>(std::max(rows_, cols_)), 0);
  for (int d : dofs) {
    if (d < 0 || d >= rows_ || d >= cols_) throw std::out_of_range("constrained dof outside matrix dimensions");
    mask[d] = 1;
  }
  for (int r = 0; r < rows_; ++r) {
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const int c = col_idx_[k];
      if (mask[r] || mask[c]) values_[k] = (r == c && mask[r]) ? diag : 0.0;
    }
  }
  // Constrained rows whose diagonal was never stored.
  std::vector<Triplet> missing;
  for (int d : dofs) {
    if (coeff(d, d) != diag) missing.push_back({d, d, diag});
  }
  if (!missing.empty()) {
    std::vector<Triplet> all;
    all.reserve(values_.size() + missing.size());
    for (int r = 0; r < rows_; ++r) {
      for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) all.push_back({r, col_idx_[k], values_[k]});
    }
    all.insert(all.end(), missing.begin(), missing.end());
    *this = from_triplets(rows_, cols_, std::move(all), symmetric_);
  }
}

void SparseMatrix::zero_columns(std::span<const int> cols) {
  std::vector<char> mask(static_cast<std::size_t>(cols_), 0);
  for (int c : cols) {
    if (c < 0 || c >= cols_) throw std::out_of_range("column outside matrix dimensions");
    mask[c] = 1;
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (mask[col_idx_[k]]) values_[k] = 0.0;
  }
}

Eigen::SparseMatrix<double, Eigen::ColMajor> SparseMatrix::to_eigen() const {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(values_.size());
  for (int r = 0; r < rows_; ++r) {
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) t.emplace_back(r, col_idx_[k], values_[k]);
  }
  Eigen::SparseMatrix<double, Eigen::ColMajor> m(rows_, cols_);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows_, cols_);
  for (int r = 0; r < rows_; ++r) {
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) d(r, col_idx_[k]) += values_[k];
  }
  return d;
}

SparseMatrix linear_combination(double alpha, const SparseMatrix& a, double beta, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("matrix shapes differ");
  std::vector<Triplet> t;
  t.reserve(a.nonzeros() + b.nonzeros());
  for (const auto& [m, s] : {std::pair{&a, alpha}, std::pair{&b, beta}}) {
    const auto rp = m->row_ptr();
    const auto ci = m->col_idx();
    const auto v = m->values();
    for (int r = 0; r < m->rows(); ++r) {
      for (int k = rp[r]; k < rp[r + 1]; ++k) t.push_back({r, ci[k], s * v[k]});
    }
  }
  return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(t), a.symmetric() && b.symmetric());
}

SparseMatrix interleave_blocks(const SparseMatrix& scalar, int components) {
  std::vector<Triplet> t;
  t.reserve(scalar.nonzeros() * components);
  const auto rp = scalar.row_ptr();
  const auto ci = scalar.col_idx();
  const auto v = scalar.values();
  for (int r = 0; r < scalar.rows(); ++r) {
    for (int k = rp[r]; k < rp[r + 1]; ++k) {
      for (int c = 0; c < components; ++c) t.push_back({components * r + c, components * ci[k] + c, v[k]});
    }
  }
  return SparseMatrix::from_triplets(scalar.rows() * components, scalar.cols() * components, std::move(t),
                                     scalar.symmetric());
}

}  // namespace mns
