#pragma once

// Restarted GMRES, CG and MINRES on abstract operators. All methods start
// from x = 0 and stop on the relative updated residual.

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "accprec/linalg.hpp"
#include "accprec/matrix.hpp"

namespace accprec {

enum class ReplacementPolicy { off, simple };

struct KrylovConfig {
  /// Relative residual target; 0 selects sqrt(n) * u.
  double tol = 0.0;
  std::size_t restart = 50;
  std::size_t maxit = 5000;
  ReplacementPolicy rr_policy = ReplacementPolicy::off;
  /// Replacement fires once the deviation bound reaches rr_threshold * ||r||.
  double rr_threshold = std::sqrt(kUnitRoundoff);
  /// Norm estimate of the operator used by the deviation bound; 0 estimates it.
  double op_norm = 0.0;
};

double default_tolerance(std::size_t n);

struct SolveReport {
  Vector x;
  std::size_t iterations = 0;
  bool converged = false;
  /// Relative updated residual after each iteration.
  std::vector<double> residual_history;
  std::size_t replacements = 0;
  /// ||rhs - op x|| / ||rhs|| recomputed in working precision at exit.
  double true_residual = 0.0;
  /// CG met a nonpositive curvature, or Lanczos broke down unexpectedly.
  bool breakdown = false;
  std::string message;
};

SolveReport gmres(const LinearOperator& op, std::span<const double> rhs, const KrylovConfig& cfg = {});
SolveReport cg(const LinearOperator& op, std::span<const double> rhs, const KrylovConfig& cfg = {});
SolveReport minres(const LinearOperator& op, std::span<const double> rhs, const KrylovConfig& cfg = {});

/// Running bound on the gap between updated and true residuals.
struct ReplacementState {
  double deviation = 0.0;
  double residual_at_last = std::numeric_limits<double>::infinity();
  std::size_t count = 0;
};

/// Accumulates the deviation for an update of norm `step_norm`; returns true
/// (and resets the state) when the true residual should be recomputed.
bool residual_replacement(ReplacementState& state, double op_norm, double step_norm,
                          double residual_norm, double threshold);

}  // namespace accprec
