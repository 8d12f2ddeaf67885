#pragma once

// Extended-precision reference computations used to validate the working
// precision algorithms. Everything here is dense and size-capped.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "accprec/dd_factor.hpp"
#include "accprec/double_double.hpp"
#include "accprec/matrix.hpp"

namespace accprec {

using DDVector = std::vector<DoubleDouble>;

/// Row-major square matrix of double-double entries.
struct DDMatrix {
  std::size_t n = 0;
  std::vector<DoubleDouble> data;

  DDMatrix() = default;
  explicit DDMatrix(std::size_t size) : n(size), data(size * size) {}
  DoubleDouble& operator()(std::size_t i, std::size_t j) { return data[i * n + j]; }
  DoubleDouble operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
};

DDMatrix to_dd(const DenseMatrix& a);
Vector round_to_double(const DDVector& x);

DDVector xp_matvec(const SparseMatrix& a, std::span<const double> x);
DDVector xp_matvec(const BandMatrix& a, std::span<const double> x);
DDVector xp_matvec(const DenseMatrix& a, std::span<const double> x);

/// Partial-pivoting elimination in double-double. Throws SingularError when a
/// pivot column is zero. n <= 2048.
DDVector xp_solve_dd(DDMatrix a, DDVector b);
Vector xp_solve(const DenseMatrix& a, std::span<const double> b);
Vector xp_solve(const SparseMatrix& a, std::span<const double> b);

/// b - A x accumulated in double-double and rounded once.
Vector xp_residual(const SparseMatrix& a, std::span<const double> x, std::span<const double> b);
Vector xp_residual(const BandMatrix& a, std::span<const double> x, std::span<const double> b);
Vector xp_residual(const DenseMatrix& a, std::span<const double> x, std::span<const double> b);

struct DDRrdFactors {
  DDMatrix L;
  DDVector D;
  DDMatrix U;
};

/// Called after elimination step k with the current slacks and the working
/// matrix (off-diagonal part, eliminated columns zeroed).
using LduObserver = std::function<void(std::size_t k, const DDVector& v, const DDMatrix& a)>;

/// Same recurrences as accurate_ldu, carried out in double-double on dense
/// storage. n <= 256.
DDRrdFactors xp_accurate_ldu_reference(const DDRep& rep, const LduObserver& observer = {});

}  // namespace accprec
