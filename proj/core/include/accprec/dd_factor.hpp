#pragma once

// Diagonally-dominant-parts representation and the cancellation-free LDU
// factorization built on it.
//
// A row diagonally dominant matrix with positive diagonal is stored as its
// off-diagonal entries plus the slack v_i = a_ii - sum_{j!=i} |a_ij| >= 0.
// Elimination then updates the slack of each trailing row as a sum of
// nonnegative terms, so the pivots (and hence D) come out with small
// componentwise relative error regardless of the matrix condition number.

#include <cstddef>
#include <limits>

#include "accprec/matrix.hpp"

namespace accprec {

struct DDRep {
  /// Square, no stored diagonal entries.
  SparseMatrix offdiag;
  /// Row dominance slacks, all >= 0.
  Vector v;

  std::size_t size() const noexcept { return v.size(); }
};

/// Validates shape, zero diagonal, and v >= 0.
DDRep make_dd_rep(SparseMatrix offdiag, Vector v);

enum class DominanceMode {
  /// Integer entries only; the slack is computed exactly.
  exact,
  /// Slack computed in working precision. The accuracy guarantee of
  /// accurate_ldu no longer holds because v already carries cancellation.
  floating,
};

DDRep dd_from_assembled(const SparseMatrix& a, DominanceMode mode);
/// a_ii = v_i + sum_{j != i} |a_ij|, summed left to right.
SparseMatrix dd_assemble(const DDRep& rep);

/// |s| + |t| - |s - t| evaluated branch-wise: 2 min(|s|,|t|) when s t > 0, else 0.
double g_term(double s, double t);
/// |l||c| - l c evaluated branch-wise: 2|l||c| when l c < 0, else 0.
double p_term(double l, double c);

enum class FactorLayout { banded, dense };

/// A = L diag(D) U with unit triangular L and U.
struct RrdFactors {
  BandMatrix L;  ///< unit lower triangular (stored diagonal is 1)
  Vector D;
  BandMatrix U;  ///< unit upper triangular (stored diagonal is 1)

  std::size_t size() const noexcept { return D.size(); }
};

/// Optional instrumentation of the elimination.
struct LduTrace {
  double min_dominance = std::numeric_limits<double>::infinity();
  std::size_t dominance_updates = 0;
};

/// Throws SingularError(k) when a pivot vanishes before the last row.
/// Banded layout keeps the bandwidths of the off-diagonal pattern (no fill
/// occurs without pivoting); dense layout is limited to n <= 4096.
RrdFactors accurate_ldu(const DDRep& rep, FactorLayout layout = FactorLayout::banded,
                        LduTrace* trace = nullptr);

struct FactorDiagnostics {
  double kappa1_L = 0.0;
  double kappa1_U = 0.0;
  double max_abs_L = 0.0;
  double max_abs_U = 0.0;
};

FactorDiagnostics factor_diagnostics(const RrdFactors& f);

// Triangular solves with unit-diagonal band factors.
Vector solve_unit_lower(const BandMatrix& l, std::span<const double> b);
Vector solve_unit_upper(const BandMatrix& u, std::span<const double> b);
Vector solve_unit_lower_transpose(const BandMatrix& l, std::span<const double> b);
Vector solve_unit_upper_transpose(const BandMatrix& u, std::span<const double> b);

}  // namespace accprec
