#pragma once

// Smallest-magnitude eigenvalues of A through the dominant eigenvalues of
// H = A^{-1}, where H is applied by an accurate solver.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "accprec/matrix.hpp"

namespace accprec {

using ApplyFn = std::function<Vector(const Vector&)>;

struct EigReport {
  /// Eigenvalue of H.
  double theta = 0.0;
  /// 1 / theta, the eigenvalue of A.
  double lambda = 0.0;
  std::size_t iterations = 0;
  /// ||H x - theta x||_2 / |theta|.
  double residual = 0.0;
  Vector x;
  bool converged = false;
  bool degenerate = false;
  std::vector<double> residual_history;
};

struct InverseIterationConfig {
  /// 0 selects sqrt(n) * u.
  double tol = 0.0;
  std::size_t maxit = 1000;
  /// Stop unconverged once the residual has not decreased for this many steps.
  std::size_t stagnation_window = 10;
};

/// y = H x, theta = x^T y, x <- y / ||y||, until ||y - theta x|| <= tol |theta|.
EigReport inverse_iteration(const ApplyFn& apply_h, Vector v0, const InverseIterationConfig& cfg = {});

struct LanczosConfig {
  double tol = 0.0;
  /// Maximal Krylov dimension.
  std::size_t maxit = 300;
  std::uint64_t seed = 1;
};

/// Lanczos with full reorthogonalization on symmetric H. Returns the k Ritz
/// pairs of largest |theta|, ordered by decreasing |theta| (increasing |lambda|).
std::vector<EigReport> lanczos_smallest(const ApplyFn& apply_h, Vector v0, std::size_t k,
                                        const LanczosConfig& cfg = {});

/// The default deterministic start vector: all ones, normalized.
Vector ones_start(std::size_t n);

/// Eigenvalues (ascending) and eigenvectors (columns) of a small symmetric
/// matrix by cyclic Jacobi rotations.
struct SymmetricEigen {
  Vector values;
  DenseMatrix vectors;
};
SymmetricEigen jacobi_eigen(DenseMatrix a);

}  // namespace accprec
