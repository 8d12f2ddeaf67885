#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "accprec/dd_factor.hpp"
#include "accprec/eigs.hpp"
#include "accprec/ie_solve.hpp"
#include "accprec/precond.hpp"
#include "accprec/testbed.hpp"
#include "test_helpers.hpp"

using namespace accprec;

namespace {

ApplyFn diag_inverse(Vector d) {
  return [d](const Vector& x) {
    Vector y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] / d[i];
    return y;
  };
}

ApplyFn T_inverse(std::size_t n) {
  auto f = std::make_shared<RrdFactors>(
      accurate_ldu(dd_from_assembled(SparseMatrix::from_band(gen_T(n)), DominanceMode::exact)));
  return [f](const Vector& x) { return rrd_solve(*f, x); };
}

/// A^{-1} for example 4 through the accurate preconditioned solver.
struct Ex4Inverse {
  TestProblem p;
  SplitSystem sys;
  KrylovMethod method;

  Ex4Inverse(std::size_t n, std::int64_t rho)
      : p(gen_ex4(n, rho)),
        sys(make_system(p, PrecondMode::accurate, Vector(n, 0.0))),
        method(rho >= 0 ? KrylovMethod::cg : KrylovMethod::minres) {}

  ApplyFn fn() const {
    return [this](const Vector& x) { return solve_iterative(sys, x, method).x; };
  }
};

double tridiag_eig(std::size_t n, std::size_t k) {
  return 2.0 - 2.0 * std::cos(static_cast<double>(k) * std::numbers::pi / static_cast<double>(n + 1));
}

}  // namespace

TEST_CASE("inverse iteration on diag(2,5)", "[eigs][inverse]") {
  InverseIterationConfig cfg;
  const EigReport r = inverse_iteration(diag_inverse({2.0, 5.0}), Vector{1.0, 1.0}, cfg);
  CHECK(r.converged);
  CHECK(test::rel_entry(r.lambda, 2.0) <= 1e-15);
  // Asymptotically the residual contracts by mu_2 / mu_1 = 2/5 per step.
  const auto& h = r.residual_history;
  REQUIRE(h.size() >= 10);
  for (std::size_t k = 5; k < h.size(); ++k) CHECK(h[k] / h[k - 1] == Catch::Approx(0.4).epsilon(1e-3));
}

TEST_CASE("inverse iteration on T3", "[eigs][inverse]") {
  const EigReport r = inverse_iteration(T_inverse(3), ones_start(3));
  CHECK(r.converged);
  CHECK(test::rel_entry(r.lambda, 2.0 - std::sqrt(2.0)) <= 1e-14);
}

TEST_CASE("report invariants", "[eigs][property]") {
  const EigReport r = inverse_iteration(T_inverse(50), ones_start(50));
  REQUIRE(r.converged);
  // lambda is one division away from 1/theta.
  CHECK(std::abs(r.lambda * r.theta - 1.0) <= 2 * kUnitRoundoff);
  CHECK(std::abs(norm2(r.x) - 1.0) <= 50 * kUnitRoundoff);
}

TEST_CASE("Rayleigh residual does not grow on symmetric input", "[eigs][property]") {
  Xoshiro256 rng(13);
  for (std::size_t n : {20u, 200u}) {
    InverseIterationConfig cfg;
    const EigReport r = inverse_iteration(T_inverse(n), test::random_vector(n, rng), cfg);
    CHECK(r.converged);
    const auto& h = r.residual_history;
    for (std::size_t k = 1; k < h.size(); ++k) CHECK(h[k] <= 1.1 * h[k - 1]);
  }
}

TEST_CASE("degenerate and stagnating runs", "[eigs][inverse]") {
  SECTION("theta = 0") {
    const EigReport r = inverse_iteration([](const Vector& x) { return Vector(x.size(), 0.0); }, Vector{1.0, 0.0});
    CHECK(r.degenerate);
    CHECK_FALSE(r.converged);
  }
  SECTION("maxit") {
    InverseIterationConfig cfg;
    cfg.maxit = 3;
    const EigReport r = inverse_iteration(diag_inverse({1.0, 1.01}), Vector{1.0, 1.0}, cfg);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 3);
  }
  SECTION("zero start vector") { CHECK_THROWS(inverse_iteration(diag_inverse({1.0}), Vector{0.0})); }
}

TEST_CASE("example 4 smallest eigenvalue", "[eigs][testbed]") {
  SECTION("n = 4095, rho = 1 and -100 against the analytic value") {
    for (std::int64_t rho : {1, -100}) {
      const Ex4Inverse h(4095, rho);
      const EigReport r = inverse_iteration(h.fn(), ones_start(4095));
      CHECK(r.converged);
      const double exact = exact_eig_biharm_absmin(4095, static_cast<double>(rho));
      CHECK(test::rel_entry(r.lambda, exact) <= 1e-11);
    }
  }
  SECTION("n = 65535, rho = 1 reproduces 98.409090996696") {
    const Ex4Inverse h(65535, 1);
    const EigReport r = inverse_iteration(h.fn(), ones_start(65535));
    CHECK(r.converged);
    CHECK(test::rel_entry(r.lambda, 98.409090996696) <= 1e-12);
    CHECK(test::rel_entry(r.lambda, exact_eig_biharm(65535, 1, 1.0)) <= 1e-12);
  }
}

TEST_CASE("Lanczos with full reorthogonalization", "[eigs][lanczos]") {
  SECTION("diag(1,2,3,4), k = 2") {
    const auto reps = lanczos_smallest(diag_inverse({1, 2, 3, 4}), Vector{1, 1, 1, 1}, 2);
    REQUIRE(reps.size() == 2);
    CHECK(reps[0].converged);
    CHECK(reps[1].converged);
    CHECK(test::rel_entry(reps[0].lambda, 1.0) <= 1e-13);
    CHECK(test::rel_entry(reps[1].lambda, 2.0) <= 1e-13);
  }
  SECTION("T8, k = 2") {
    // The all-ones start is orthogonal to the antisymmetric eigenvectors.
    Xoshiro256 rng(8);
    const auto reps = lanczos_smallest(T_inverse(8), test::random_vector(8, rng), 2);
    REQUIRE(reps.size() == 2);
    CHECK(test::rel_entry(reps[0].lambda, tridiag_eig(8, 1)) <= 1e-13);
    CHECK(test::rel_entry(reps[1].lambda, tridiag_eig(8, 2)) <= 1e-13);
  }
  SECTION("agrees with inverse iteration on example 4") {
    const Ex4Inverse h(1023, 1);
    const EigReport ii = inverse_iteration(h.fn(), ones_start(1023));
    const auto lz = lanczos_smallest(h.fn(), ones_start(1023), 1);
    REQUIRE(lz.size() == 1);
    CHECK(lz[0].converged);
    CHECK(test::rel_entry(lz[0].lambda, ii.lambda) <= 1e-12);
  }
  SECTION("k out of range") { CHECK_THROWS(lanczos_smallest(diag_inverse({1, 2}), Vector{1, 1}, 3)); }
}

TEST_CASE("jacobi_eigen", "[eigs][jacobi]") {
  const SymmetricEigen e = jacobi_eigen(gen_T(6).to_dense());
  for (std::size_t k = 0; k < 6; ++k) CHECK(std::abs(e.values[k] - tridiag_eig(6, k + 1)) <= 1e-14);
  const DenseMatrix av = multiply(gen_T(6).to_dense(), e.vectors);
  for (std::size_t k = 0; k < 6; ++k) {
    Vector r = av.column(k);
    axpy(-e.values[k], e.vectors.column(k), r);
    CHECK(norm2(r) <= 1e-14);
  }
}
