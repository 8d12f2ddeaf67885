#include "accprec/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "accprec/errors.hpp"

namespace accprec {

void require_finite(std::span<const double> values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(std::string(what) + ": non-finite entry at position " + std::to_string(i));
    }
  }
}

double norm1(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s;
}

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double norm_inf(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionMismatch("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw DimensionMismatch("axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void scale(double a, std::span<double> x) {
  for (double& v : x) v *= a;
}

Vector unit_vector(std::size_t n, std::size_t i) {
  Vector e(n, 0.0);
  e.at(i) = 1.0;
  return e;
}

// ---------------------------------------------------------------------------
// DenseMatrix

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  if (data_.size() != rows * cols) throw DimensionMismatch("DenseMatrix: entry count != rows*cols");
  require_finite(data_, "DenseMatrix");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector DenseMatrix::column(std::size_t j) const {
  Vector c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

void DenseMatrix::set_column(std::size_t j, std::span<const double> values) {
  if (values.size() != rows_) throw DimensionMismatch("set_column: length mismatch");
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = values[i];
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

// ---------------------------------------------------------------------------
// BandMatrix

BandMatrix::BandMatrix(std::size_t n, std::size_t lower, std::size_t upper)
    : n_(n), lower_(lower), upper_(upper), data_(n * (lower + upper + 1), 0.0) {
  if (n > 0 && (lower >= n || upper >= n))
    throw DimensionMismatch("BandMatrix: bandwidth must be smaller than n");
}

double& BandMatrix::at(std::size_t i, std::size_t j) {
  if (i >= n_ || j >= n_ || !in_band(i, j)) throw DimensionMismatch("BandMatrix::at outside band");
  return data_[slot(i, j)];
}

DenseMatrix BandMatrix::to_dense() const {
  DenseMatrix d(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = row_begin(i); j < row_end(i); ++j) d(i, j) = data_[slot(i, j)];
  return d;
}

// ---------------------------------------------------------------------------
// SparseMatrix

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                           std::vector<std::size_t> col_idx, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (row_ptr_.size() != rows_ + 1 || row_ptr_.front() != 0 ||
      row_ptr_.back() != col_idx_.size() || col_idx_.size() != values_.size()) {
    throw DimensionMismatch("SparseMatrix: inconsistent CSR arrays");
  }
  for (std::size_t i = 0; i < rows_; ++i) {
    if (row_ptr_[i] > row_ptr_[i + 1]) throw Error("SparseMatrix: row offsets not monotone");
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      if (col_idx_[p] >= cols_) throw DimensionMismatch("SparseMatrix: column index out of range");
      if (p > row_ptr_[i] && col_idx_[p] <= col_idx_[p - 1])
        throw Error("SparseMatrix: column indices not strictly increasing in row " +
                    std::to_string(i));
    }
  }
  require_finite(values_, "SparseMatrix");
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row >= rows || t.col >= cols) throw DimensionMismatch("from_triplets: index out of range");
  }
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<std::size_t> row_ptr(rows + 1, 0);
  std::vector<std::size_t> col_idx;
  std::vector<double> values;
  col_idx.reserve(triplets.size());
  values.reserve(triplets.size());
  for (std::size_t k = 0; k < triplets.size(); ++k) {
    const auto& t = triplets[k];
    if (k > 0 && t.row == triplets[k - 1].row && t.col == triplets[k - 1].col) {
      values.back() += t.value;
      continue;
    }
    col_idx.push_back(t.col);
    values.push_back(t.value);
    ++row_ptr[t.row + 1];
  }
  for (std::size_t i = 0; i < rows; ++i) row_ptr[i + 1] += row_ptr[i];
  return SparseMatrix(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

SparseMatrix SparseMatrix::from_band(const BandMatrix& band, bool drop_zeros) {
  const std::size_t n = band.size();
  std::vector<std::size_t> row_ptr(n + 1, 0);
  std::vector<std::size_t> col_idx;
  std::vector<double> values;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = band.row_begin(i); j < band.row_end(i); ++j) {
      const double v = band(i, j);
      if (drop_zeros && v == 0.0) continue;
      col_idx.push_back(j);
      values.push_back(v);
    }
    row_ptr[i + 1] = col_idx.size();
  }
  return SparseMatrix(n, n, std::move(row_ptr), std::move(col_idx), std::move(values));
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& dense, bool drop_zeros) {
  std::vector<std::size_t> row_ptr(dense.rows() + 1, 0);
  std::vector<std::size_t> col_idx;
  std::vector<double> values;
  for (std::size_t i = 0; i < dense.rows(); ++i) {
    for (std::size_t j = 0; j < dense.cols(); ++j) {
      const double v = dense(i, j);
      if (drop_zeros && v == 0.0) continue;
      col_idx.push_back(j);
      values.push_back(v);
    }
    row_ptr[i + 1] = col_idx.size();
  }
  return SparseMatrix(dense.rows(), dense.cols(), std::move(row_ptr), std::move(col_idx),
                      std::move(values));
}

SparseMatrix SparseMatrix::identity(std::size_t n, double diagonal) {
  std::vector<std::size_t> row_ptr(n + 1);
  std::vector<std::size_t> col_idx(n);
  for (std::size_t i = 0; i <= n; ++i) row_ptr[i] = i;
  for (std::size_t i = 0; i < n; ++i) col_idx[i] = i;
  return SparseMatrix(n, n, std::move(row_ptr), std::move(col_idx), Vector(n, diagonal));
}

double SparseMatrix::coeff(std::size_t i, std::size_t j) const {
  const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

std::size_t SparseMatrix::max_row_nonzeros() const {
  std::size_t m = 0;
  for (std::size_t i = 0; i < rows_; ++i) m = std::max(m, row_ptr_[i + 1] - row_ptr_[i]);
  return m;
}

std::size_t SparseMatrix::lower_bandwidth() const {
  std::size_t bw = 0;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      if (col_idx_[p] < i) bw = std::max(bw, i - col_idx_[p]);
  return bw;
}

std::size_t SparseMatrix::upper_bandwidth() const {
  std::size_t bw = 0;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      if (col_idx_[p] > i) bw = std::max(bw, col_idx_[p] - i);
  return bw;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<std::size_t> row_ptr(cols_ + 1, 0);
  for (std::size_t c : col_idx_) ++row_ptr[c + 1];
  for (std::size_t j = 0; j < cols_; ++j) row_ptr[j + 1] += row_ptr[j];
  std::vector<std::size_t> next(row_ptr.begin(), row_ptr.end() - 1);
  std::vector<std::size_t> col_idx(values_.size());
  std::vector<double> values(values_.size());
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      const std::size_t dst = next[col_idx_[p]]++;
      col_idx[dst] = i;
      values[dst] = values_[p];
    }
  }
  return SparseMatrix(cols_, rows_, std::move(row_ptr), std::move(col_idx), std::move(values));
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) d(i, col_idx_[p]) = values_[p];
  return d;
}

BandMatrix SparseMatrix::to_band() const {
  if (rows_ != cols_) throw DimensionMismatch("to_band: matrix not square");
  BandMatrix b(rows_, lower_bandwidth(), upper_bandwidth());
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) b.at(i, col_idx_[p]) = values_[p];
  return b;
}

SparseMatrix SparseMatrix::scaled(double factor) const {
  SparseMatrix s = *this;
  for (double& v : s.values_) v *= factor;
  return s;
}

bool SparseMatrix::is_symmetric() const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      if (coeff(col_idx_[p], i) != values_[p]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Products and norms

void spmv_into(const SparseMatrix& a, std::span<const double> v, std::span<double> out) {
  if (v.size() != a.cols() || out.size() != a.rows()) throw DimensionMismatch("spmv: size mismatch");
  const auto& rp = a.row_ptr();
  const auto& ci = a.col_idx();
  const auto& val = a.values();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) s += val[p] * v[ci[p]];
    out[i] = s;
  }
}

void spmv_into(const BandMatrix& a, std::span<const double> v, std::span<double> out) {
  if (v.size() != a.size() || out.size() != a.size()) throw DimensionMismatch("spmv: size mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = a.row_begin(i); j < a.row_end(i); ++j) s += a(i, j) * v[j];
    out[i] = s;
  }
}

Vector spmv(const SparseMatrix& a, std::span<const double> v) {
  Vector out(a.rows());
  spmv_into(a, v, out);
  return out;
}

Vector spmv(const BandMatrix& a, std::span<const double> v) {
  Vector out(a.size());
  spmv_into(a, v, out);
  return out;
}

Vector spmv(const DenseMatrix& a, std::span<const double> v) {
  if (v.size() != a.cols()) throw DimensionMismatch("spmv: size mismatch");
  Vector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    const auto r = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) s += r[j] * v[j];
    out[i] = s;
  }
  return out;
}

Vector spmv_transpose(const DenseMatrix& a, std::span<const double> v) {
  if (v.size() != a.rows()) throw DimensionMismatch("spmv_transpose: size mismatch");
  Vector out(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) out[j] += r[j] * v[i];
  }
  return out;
}

double norm1(const SparseMatrix& a) {
  Vector colsum(a.cols(), 0.0);
  for (std::size_t p = 0; p < a.nonzeros(); ++p) colsum[a.col_idx()[p]] += std::abs(a.values()[p]);
  return norm_inf(colsum);
}

double norm_inf(const SparseMatrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p) s += std::abs(a.values()[p]);
    m = std::max(m, s);
  }
  return m;
}

double norm1(const BandMatrix& a) {
  Vector colsum(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = a.row_begin(i); j < a.row_end(i); ++j) colsum[j] += std::abs(a(i, j));
  return norm_inf(colsum);
}

double norm_inf(const BandMatrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = a.row_begin(i); j < a.row_end(i); ++j) s += std::abs(a(i, j));
    m = std::max(m, s);
  }
  return m;
}

double norm1(const DenseMatrix& a) {
  Vector colsum(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) colsum[j] += std::abs(a(i, j));
  return norm_inf(colsum);
}

double norm_inf(const DenseMatrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) m = std::max(m, norm1(a.row(i)));
  return m;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("multiply: inner dimension mismatch");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

BandMatrix multiply(const BandMatrix& a, const BandMatrix& b) {
  if (a.size() != b.size()) throw DimensionMismatch("multiply: size mismatch");
  const std::size_t n = a.size();
  const std::size_t lo = std::min(n > 0 ? n - 1 : 0, a.lower_bandwidth() + b.lower_bandwidth());
  const std::size_t up = std::min(n > 0 ? n - 1 : 0, a.upper_bandwidth() + b.upper_bandwidth());
  BandMatrix c(n, lo, up);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = a.row_begin(i); k < a.row_end(i); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = b.row_begin(k); j < b.row_end(k); ++j) c.at(i, j) += aik * b(k, j);
    }
  return c;
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double b_scale) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("add: shape mismatch");
  std::vector<std::size_t> row_ptr(a.rows() + 1, 0);
  std::vector<std::size_t> col_idx;
  std::vector<double> values;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    std::size_t p = a.row_ptr()[i], pe = a.row_ptr()[i + 1];
    std::size_t q = b.row_ptr()[i], qe = b.row_ptr()[i + 1];
    while (p < pe || q < qe) {
      const std::size_t ca = p < pe ? a.col_idx()[p] : a.cols();
      const std::size_t cb = q < qe ? b.col_idx()[q] : b.cols();
      if (ca < cb) {
        col_idx.push_back(ca);
        values.push_back(a.values()[p++]);
      } else if (cb < ca) {
        col_idx.push_back(cb);
        values.push_back(b_scale * b.values()[q++]);
      } else {
        col_idx.push_back(ca);
        values.push_back(a.values()[p++] + b_scale * b.values()[q++]);
      }
    }
    row_ptr[i + 1] = col_idx.size();
  }
  return SparseMatrix(a.rows(), a.cols(), std::move(row_ptr), std::move(col_idx),
                      std::move(values));
}

}  // namespace accprec
