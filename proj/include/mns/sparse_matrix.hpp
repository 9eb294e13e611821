#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstddef>
#include <span>
#include <vector>

namespace mns {

using Vector = Eigen::VectorXd;

struct Triplet {
  int row;
  int col;
  double value;
};

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row; explicit zeros may be stored.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols), row_ptr_(static_cast<std::size_t>(rows) + 1, 0) {}

  /// Sums duplicate entries. `symmetric` is metadata only.
  static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets, bool symmetric = false);
  static SparseMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nonzeros() const { return values_.size(); }
  bool symmetric() const { return symmetric_; }
  void set_symmetric(bool flag) { symmetric_ = flag; }

  std::span<const int> row_ptr() const { return row_ptr_; }
  std::span<const int> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// Entry (i, j), zero if not stored.
  double coeff(int i, int j) const;

  Vector operator*(const Vector& x) const;
  Vector transpose_multiply(const Vector& x) const;
  SparseMatrix transpose() const;
  Vector diagonal() const;

  double max_abs() const;
  /// max |A_ij - A_ji|, computed through the transpose.
  double symmetry_error() const;

  /// Zeroes the listed rows and columns and sets their diagonal to `diag`.
  void eliminate_symmetric(std::span<const int> dofs, double diag = 1.0);
  /// Zeroes the listed columns.
  void zero_columns(std::span<const int> cols);

  Eigen::SparseMatrix<double, Eigen::ColMajor> to_eigen() const;
  Eigen::MatrixXd to_dense() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
  bool symmetric_ = false;
};

/// alpha * a + beta * b for matrices of equal shape (patterns may differ).
SparseMatrix linear_combination(double alpha, const SparseMatrix& a, double beta, const SparseMatrix& b);

/// Expands a scalar operator to `components` interleaved copies:
/// entry (i, j) maps to (components*i + c, components*j + c).
SparseMatrix interleave_blocks(const SparseMatrix& scalar, int components);

}  // namespace mns
