#pragma once

// Solve handles that apply M^{-1} with inverse-equivalent accuracy.

#include <cstddef>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "accprec/dd_factor.hpp"
#include "accprec/linalg.hpp"
#include "accprec/matrix.hpp"

namespace accprec {

/// L y = b, y / D, U x = y.
Vector rrd_solve(const RrdFactors& f, std::span<const double> b);
/// U^T y = b, y / D, L^T x = y.
Vector rrd_solve_transpose(const RrdFactors& f, std::span<const double> b);

struct RrdStep {
  std::shared_ptr<const RrdFactors> factors;
};
/// Holds F^{-1} itself; applying the step is a matrix-vector product.
struct ExplicitInverseStep {
  std::shared_ptr<const DenseMatrix> inverse;
};
struct DiagonalStep {
  std::shared_ptr<const Vector> diagonal;
};
/// Backward-stable banded Cholesky; the accuracy baseline.
struct CholBaselineStep {
  std::shared_ptr<const BandCholesky> factor;
};

using SolveStep = std::variant<RrdStep, ExplicitInverseStep, DiagonalStep, CholBaselineStep>;

SolveStep make_rrd_step(RrdFactors f);
SolveStep make_explicit_inverse_step(DenseMatrix inverse);
SolveStep make_diagonal_step(Vector diagonal);
SolveStep make_chol_step(const BandMatrix& m);

std::size_t step_size(const SolveStep& s);
Vector step_solve(const SolveStep& s, std::span<const double> b);
Vector step_solve_transpose(const SolveStep& s, std::span<const double> b);

/// M = alpha * F_1 * F_2 * ... * F_m. The chain lists the factors in the
/// order their inverses are applied: M^{-1} b = F_m^{-1} ... F_1^{-1} (b / alpha).
class PrecondHandle {
 public:
  PrecondHandle() = default;
  PrecondHandle(double alpha, std::vector<SolveStep> chain);

  std::size_t size() const noexcept { return n_; }
  double alpha() const noexcept { return alpha_; }
  const std::vector<SolveStep>& chain() const noexcept { return chain_; }

  Vector solve(std::span<const double> b) const;
  /// M^{-T} b: the chain in reverse order with transposed step solves.
  Vector solve_transpose(std::span<const double> b) const;

 private:
  double alpha_ = 1.0;
  std::vector<SolveStep> chain_;
  std::size_t n_ = 0;
};

Vector handle_solve(const PrecondHandle& h, std::span<const double> b);
Vector explicit_inverse_apply(const DenseMatrix& minv, std::span<const double> b);
/// Column-by-column M^{-1}; n <= 4096.
DenseMatrix invert_via_handle(const PrecondHandle& h);

}  // namespace accprec
