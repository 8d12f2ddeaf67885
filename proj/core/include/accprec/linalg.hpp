#pragma once

// Operators, baseline backward-stable direct solvers, and norm estimators.

#include <cstddef>
#include <functional>
#include <span>

#include "accprec/matrix.hpp"

namespace accprec {

/// A square operator known only through its action. `apply` must be
/// deterministic; `apply_transpose` may be empty when the operator is
/// symmetric or its transpose is not available.
struct LinearOperator {
  using Apply = std::function<void(std::span<const double>, std::span<double>)>;

  std::size_t n = 0;
  Apply apply;
  Apply apply_transpose;
  bool symmetric = false;

  Vector operator()(std::span<const double> v) const;
  Vector transpose_apply(std::span<const double> v) const;
  bool has_transpose() const { return symmetric || static_cast<bool>(apply_transpose); }
};

LinearOperator make_operator(const SparseMatrix& a);
LinearOperator make_operator(const BandMatrix& a);
LinearOperator make_operator(const DenseMatrix& a);

struct NormEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Largest singular value by power iteration on op^T op (or op twice when
/// symmetric). Stops when the relative change between sweeps drops below tol.
NormEstimate norm2_estimate(const LinearOperator& op, double tol = 1e-2, int maxit = 200);

/// ||A^{-1}||_2 by power iteration on A^{-T} A^{-1}, given solvers for A and A^T.
NormEstimate inverse_norm2_estimate(std::size_t n, const std::function<Vector(const Vector&)>& solve,
                                    const std::function<Vector(const Vector&)>& solve_transpose,
                                    double tol = 1e-2, int maxit = 200);

/// Hager/Higham estimate of ||A^{-1}||_1 from solves with A and A^T.
double inverse_norm1_estimate(std::size_t n, const std::function<Vector(const Vector&)>& solve,
                              const std::function<Vector(const Vector&)>& solve_transpose);

/// Gaussian elimination with partial pivoting, factored once.
class DenseLU {
 public:
  explicit DenseLU(DenseMatrix a);

  std::size_t size() const noexcept { return lu_.rows(); }
  Vector solve(std::span<const double> b) const;
  Vector solve_transpose(std::span<const double> b) const;

 private:
  DenseMatrix lu_;
  std::vector<std::size_t> perm_;
};

Vector gepp_solve(const DenseMatrix& a, std::span<const double> b);

/// Band LU with partial pivoting (row interchanges widen U to lower+upper).
class BandLU {
 public:
  explicit BandLU(const BandMatrix& a);

  std::size_t size() const noexcept { return n_; }
  Vector solve(std::span<const double> b) const;
  Vector solve_transpose(std::span<const double> b) const;

 private:
  std::size_t n_ = 0;
  std::size_t lower_ = 0;
  std::size_t width_ = 0;  // upper bandwidth of U after pivoting
  // Row i of U holds columns [i, i+width_].
  std::vector<double> u_;
  // Row i of L holds the multipliers for rows i+1..i+lower_.
  std::vector<double> l_;
  std::vector<std::size_t> pivot_;
};

/// Banded Cholesky M = R^T R with R upper triangular of the same bandwidth.
class BandCholesky {
 public:
  explicit BandCholesky(const BandMatrix& m);

  std::size_t size() const noexcept { return r_.size(); }
  const BandMatrix& factor() const noexcept { return r_; }
  /// Squared diagonal of R (the elimination pivots).
  Vector pivots() const;
  Vector solve(std::span<const double> b) const;

 private:
  BandMatrix r_;
};

}  // namespace accprec
