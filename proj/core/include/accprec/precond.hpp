#pragma once

// Accurately preconditioned systems B x = c with B = I + M^{-1} K and
// c = M^{-1} b, where A = M + K and M^{-1} is applied through a handle.

#include <cstddef>
#include <optional>

#include "accprec/ie_solve.hpp"
#include "accprec/krylov.hpp"
#include "accprec/matrix.hpp"

namespace accprec {

struct SplitSystem {
  PrecondHandle M;
  SparseMatrix K;
  SparseMatrix Kt;
  Vector b;
  /// M and A assembled, when exactly representable; used for true residuals.
  std::optional<SparseMatrix> M_assembled;
  std::optional<SparseMatrix> A;

  std::size_t size() const noexcept { return b.size(); }
};

SplitSystem make_split_system(PrecondHandle m, SparseMatrix k, Vector b,
                              std::optional<SparseMatrix> m_assembled = std::nullopt,
                              std::optional<SparseMatrix> a = std::nullopt);

/// K = A - M computed entrywise. Both matrices must hold integers below 2^53,
/// otherwise RefuseInexactSplit is thrown and K has to be supplied directly.
SplitSystem split_from(const SparseMatrix& a, const SparseMatrix& m_assembled, PrecondHandle m,
                       Vector b);

/// v + M^{-1}(K v).
Vector apply_B(const SplitSystem& sys, std::span<const double> v);
/// v + K^T (M^{-T} v).
Vector apply_Bt(const SplitSystem& sys, std::span<const double> v);
LinearOperator b_operator(const SplitSystem& sys, bool symmetric = false);

struct DenseSystem {
  DenseMatrix B;
  Vector c;
};

/// B column by column; zero columns of K contribute identity columns. n <= 4096.
DenseSystem form_B_dense(const SplitSystem& sys);

enum class KrylovMethod { gmres, cg, minres };

struct SystemSolveReport : SolveReport {
  Vector c;
  /// ||K||_1 ||x||_1 / ||b||_1.
  double rho = 0.0;
  /// Estimate of kappa_1(B); direct path only.
  std::optional<double> kappa1_B;
  /// ||b - A x||_2 / ||b||_2 of the original system, accumulated in double-double.
  double original_residual = 0.0;
};

SystemSolveReport solve_direct(const SplitSystem& sys);
SystemSolveReport solve_iterative(const SplitSystem& sys, KrylovMethod method,
                                  const KrylovConfig& cfg = {});
/// Same system matrix, right-hand side `b` in place of sys.b.
SystemSolveReport solve_iterative(const SplitSystem& sys, std::span<const double> b,
                                  KrylovMethod method, const KrylovConfig& cfg = {});

/// ||b - (M + K) x||_2 / ||b||_2 in double-double; requires A or M assembled.
std::optional<double> original_residual(const SplitSystem& sys, std::span<const double> x);
std::optional<double> original_residual(const SplitSystem& sys, std::span<const double> x,
                                        std::span<const double> b);

}  // namespace accprec
