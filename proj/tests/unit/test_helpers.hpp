#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "accprec/double_double.hpp"
#include "accprec/matrix.hpp"
#include "accprec/testbed.hpp"

namespace accprec::test {

/// (T_n^{-1})_{ij} = min(i,j) (n+1-max(i,j)) / (n+1), 1-based.
inline DenseMatrix analytic_T_inverse(std::size_t n) {
  DenseMatrix x(n, n);
  const double np1 = static_cast<double>(n + 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double lo = static_cast<double>(std::min(i, j) + 1);
      const double hi = static_cast<double>(std::max(i, j) + 1);
      x(i, j) = lo * (np1 - hi) / np1;
    }
  return x;
}

inline double rel_diff2(std::span<const double> a, std::span<const double> b) {
  double num = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) num += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(num) / norm2(b);
}

inline double rel_diff1(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix d(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) d(i, j) = a(i, j) - b(i, j);
  return norm1(d) / norm1(b);
}

inline double rel_entry(double got, double want) {
  if (want == 0.0) return std::abs(got);
  return std::abs(got - want) / std::abs(want);
}

/// Random integer matrix with off-diagonals in [-range, range] at the given
/// density and a diagonal exceeding the off-diagonal row sum by 1..slack.
inline SparseMatrix random_dd_integer(std::size_t n, Xoshiro256& rng, int range = 9,
                                      double density = 0.6, int slack = 5) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || rng.uniform() >= density) continue;
      const double value = std::floor(rng.uniform() * (2 * range + 1)) - range;
      if (value == 0.0) continue;
      t.push_back({i, j, value});
      row += std::abs(value);
    }
    t.push_back({i, i, row + 1.0 + std::floor(rng.uniform() * slack)});
  }
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

/// Random dense matrix with standard normal entries.
inline DenseMatrix random_dense(std::size_t rows, std::size_t cols, Xoshiro256& rng) {
  DenseMatrix a(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) a(i, j) = rng.normal();
  return a;
}

inline Vector random_vector(std::size_t n, Xoshiro256& rng) {
  Vector v(n);
  for (double& x : v) x = rng.normal();
  return v;
}

inline double dd_rel(DoubleDouble got, DoubleDouble want) {
  const DoubleDouble d = dd_abs(got - want);
  if (want.hi == 0.0) return d.to_double();
  return (d / dd_abs(want)).to_double();
}

}  // namespace accprec::test
