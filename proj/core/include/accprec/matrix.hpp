#pragma once

// Working-precision (binary64) vectors and matrices: dense row-major, packed
// band, and compressed sparse row storage, plus products and norms.

#include <cstddef>
#include <span>
#include <vector>

namespace accprec {

using Vector = std::vector<double>;

/// Machine precision of the working format (binary64 epsilon, 2^-52).
inline constexpr double kUnitRoundoff = 2.220446049250313e-16;

/// Throws accprec::Error if any entry is NaN or infinite.
void require_finite(std::span<const double> values, const char* what);

double norm1(std::span<const double> x);
double norm2(std::span<const double> x);
double norm_inf(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);

/// y += a*x
void axpy(double a, std::span<const double> x, std::span<double> y);
void scale(double a, std::span<double> x);

Vector unit_vector(std::size_t n, std::size_t i);

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  const std::vector<double>& data() const noexcept { return data_; }

  Vector column(std::size_t j) const;
  void set_column(std::size_t j, std::span<const double> values);
  DenseMatrix transpose() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Square band matrix with `lower` sub-diagonals and `upper` super-diagonals.
/// Row i stores columns [i-lower, i+upper]; entries outside the band are zero.
class BandMatrix {
 public:
  BandMatrix() = default;
  BandMatrix(std::size_t n, std::size_t lower, std::size_t upper);

  std::size_t size() const noexcept { return n_; }
  std::size_t lower_bandwidth() const noexcept { return lower_; }
  std::size_t upper_bandwidth() const noexcept { return upper_; }

  bool in_band(std::size_t i, std::size_t j) const noexcept {
    return j + lower_ >= i && j <= i + upper_;
  }
  /// Zero outside the band.
  double operator()(std::size_t i, std::size_t j) const {
    return in_band(i, j) ? data_[slot(i, j)] : 0.0;
  }
  /// Mutable access; (i, j) must lie inside the band.
  double& at(std::size_t i, std::size_t j);

  /// First and one-past-last column stored for row i.
  std::size_t row_begin(std::size_t i) const noexcept { return i > lower_ ? i - lower_ : 0; }
  std::size_t row_end(std::size_t i) const noexcept {
    return i + upper_ + 1 < n_ ? i + upper_ + 1 : n_;
  }

  DenseMatrix to_dense() const;

 private:
  std::size_t slot(std::size_t i, std::size_t j) const noexcept {
    return i * (lower_ + upper_ + 1) + (j + lower_ - i);
  }

  std::size_t n_ = 0;
  std::size_t lower_ = 0;
  std::size_t upper_ = 0;
  std::vector<double> data_;
};

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row; explicit zeros may be stored.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols);
  /// Validates the layout invariants.
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
               std::vector<std::size_t> col_idx, std::vector<double> values);

  /// Duplicate (row, col) pairs are summed.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<Triplet> triplets);
  static SparseMatrix from_band(const BandMatrix& band, bool drop_zeros = true);
  static SparseMatrix from_dense(const DenseMatrix& dense, bool drop_zeros = true);
  static SparseMatrix identity(std::size_t n, double diagonal = 1.0);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nonzeros() const noexcept { return values_.size(); }

  const std::vector<std::size_t>& row_ptr() const noexcept { return row_ptr_; }
  const std::vector<std::size_t>& col_idx() const noexcept { return col_idx_; }
  const std::vector<double>& values() const noexcept { return values_; }

  /// Stored value or zero.
  double coeff(std::size_t i, std::size_t j) const;
  std::size_t max_row_nonzeros() const;
  /// Largest |i-j| below and above the diagonal over stored entries.
  std::size_t lower_bandwidth() const;
  std::size_t upper_bandwidth() const;

  SparseMatrix transpose() const;
  DenseMatrix to_dense() const;
  /// Requires the matrix to be square; the result carries the bandwidths of the pattern.
  BandMatrix to_band() const;
  SparseMatrix scaled(double factor) const;
  bool is_symmetric() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

// Products are summed left to right within each row.
Vector spmv(const SparseMatrix& a, std::span<const double> v);
Vector spmv(const BandMatrix& a, std::span<const double> v);
Vector spmv(const DenseMatrix& a, std::span<const double> v);
void spmv_into(const SparseMatrix& a, std::span<const double> v, std::span<double> out);
void spmv_into(const BandMatrix& a, std::span<const double> v, std::span<double> out);

Vector spmv_transpose(const DenseMatrix& a, std::span<const double> v);

double norm1(const SparseMatrix& a);
double norm_inf(const SparseMatrix& a);
double norm1(const BandMatrix& a);
double norm_inf(const BandMatrix& a);
double norm1(const DenseMatrix& a);
double norm_inf(const DenseMatrix& a);

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
/// Exact for integer-valued operands whose partial sums stay below 2^53.
BandMatrix multiply(const BandMatrix& a, const BandMatrix& b);
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double b_scale = 1.0);

}  // namespace accprec
