#pragma once

// Test problem generators, the exact integer right-hand-side construction,
// analytic eigenvalues and accuracy metrics.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "accprec/ie_solve.hpp"
#include "accprec/krylov.hpp"
#include "accprec/matrix.hpp"
#include "accprec/precond.hpp"

namespace accprec {

/// xoshiro256** seeded through splitmix64.
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed);

  std::uint64_t next();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal by the Box-Muller transform.
  double normal();

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// tridiag(-1, 2, -1).
BandMatrix gen_T(std::size_t n);
/// Skew-symmetric: +1 above the diagonal, -1 below.
BandMatrix gen_Kskew(std::size_t n);

enum class PrecondMode { accurate, baseline };

/// M = alpha * T_n^power with power 1 or 2.
struct PreconditionerSpec {
  std::size_t n = 0;
  double alpha = 1.0;
  int power = 1;
};

/// Accurate: alpha with chain [LDU(T)] or [LDU(T), LDU(T)].
/// Baseline: alpha with a banded Cholesky factor of T^power.
PrecondHandle build_handle(const PreconditionerSpec& spec, PrecondMode mode);
/// alpha * T^power; exact whenever alpha * 6 stays below 2^53.
SparseMatrix assemble_preconditioner(const PreconditionerSpec& spec);

struct TestProblem {
  std::string family;
  std::size_t n = 0;
  double param = 0.0;
  /// Mesh size where the family defines one.
  double h = 0.0;
  PreconditionerSpec M;
  SparseMatrix K;
  SparseMatrix M_assembled;
  /// Present when A = M + K is exactly representable.
  std::optional<SparseMatrix> A;
  bool integer = false;
};

/// A = 2(n+1) T - gamma K_n, M = 2(n+1) T.
TestProblem gen_ex1(std::size_t n, std::int64_t gamma);
/// Sparse integer matrix floor(10 z) at density-distributed random positions.
SparseMatrix gen_sparse_S(std::size_t n, double density, std::uint64_t seed);
/// A = (n+1)^4 T^2 + gamma S, M = (n+1)^4 T^2.
TestProblem gen_ex2(std::size_t n, std::int64_t gamma, std::uint64_t seed, double density = 0.001);
/// h = gamma / (n+1), M = h^-2 T, K = -(1/(2h)) K_n.
TestProblem gen_ex3(std::size_t n, double gamma = 1.0);
/// A = (n+1)^4 T^2 + rho I, M = (n+1)^4 T^2, K = rho I.
TestProblem gen_ex4(std::size_t n, std::int64_t rho);

SplitSystem make_system(const TestProblem& p, PrecondMode mode, Vector b);

struct ExactRhs {
  Vector x;
  Vector b;
  double scale = 0.0;
};

using SolveFn = std::function<Vector(const Vector&)>;

/// b0 uniform(0,1), x0 = solve(b0), x = round(x0 * scale / ||x0||_inf) with
/// scale 1e8 (retried once with 1e5), b = A x in 128-bit integers.
ExactRhs make_exact_rhs(const SparseMatrix& a, std::uint64_t seed, const SolveFn& solve);
/// Picks a backward-stable LU (banded or dense) for the x0 solve.
ExactRhs make_exact_rhs(const SparseMatrix& a, std::uint64_t seed);
/// b - A x == 0 in 128-bit integer arithmetic.
bool verify_exact_rhs(const SparseMatrix& a, std::span<const double> x, std::span<const double> b);

/// Returned in place of a ratio whose denominator vanishes.
inline constexpr double kMetricSentinel = -1.0;

struct MetricSet {
  double eta_ie = 0.0;
  double eta_rel = 0.0;
  double rho_factor = 0.0;
  std::optional<double> kappaA;
  std::optional<double> kappaB;
};

MetricSet metrics(std::span<const double> x_hat, std::span<const double> x, std::span<const double> b,
                  double norm_ainv2, const SparseMatrix& k);

/// ||A^{-1}||_2 to about two digits. Uses a backward-stable LU of the
/// assembled A when it is narrow banded or n <= 2048, power iteration with
/// accurate Krylov solves otherwise.
NormEstimate norm_Ainv_estimate(const SplitSystem& sys, bool symmetric, double tol = 1e-2);

/// kappa_2(B): dense for n <= 2048, power iteration with GMRES otherwise.
double kappa2_B_estimate(const SplitSystem& sys, double tol = 1e-1);

/// 1/4 + pi^2 i^2 / gamma^2.
double exact_eig_cd(double gamma, int i);
/// 16 sin^4(j pi h / 2) / h^4 + rho with h = 1/(n+1).
double exact_eig_biharm(std::size_t n, std::size_t j, double rho);
/// The eigenvalue of smallest magnitude among exact_eig_biharm(n, j, rho), j = 1..n.
double exact_eig_biharm_absmin(std::size_t n, double rho);

}  // namespace accprec
