#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "accprec/dd_factor.hpp"
#include "accprec/eigs.hpp"
#include "accprec/errors.hpp"
#include "accprec/oracle.hpp"
#include "accprec/precond.hpp"
#include "accprec/testbed.hpp"
#include "test_helpers.hpp"

using namespace accprec;

namespace {

double norm2_dense(const DenseMatrix& a) {
  return std::sqrt(jacobi_eigen(multiply(a.transpose(), a)).values.back());
}

/// Largest singular value of A^{-1}; avoids the squared condition number of A^T A.
double inverse_norm2(const DenseMatrix& a) {
  const DenseLU lu(a);
  DenseMatrix inv(a.rows(), a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) inv.set_column(j, lu.solve(unit_vector(a.rows(), j)));
  return norm2_dense(inv);
}

double kappa2(const DenseMatrix& a) { return norm2_dense(a) * inverse_norm2(a); }

PrecondHandle rrd_of(const SparseMatrix& m) {
  return PrecondHandle(1.0, {make_rrd_step(accurate_ldu(dd_from_assembled(m, DominanceMode::exact)))});
}

}  // namespace

TEST_CASE("split_from", "[precond][split]") {
  SECTION("example 1 gives K = -gamma K_n") {
    const std::size_t n = 12;
    const TestProblem p = gen_ex1(n, 5);
    const SplitSystem sys = split_from(*p.A, p.M_assembled, build_handle(p.M, PrecondMode::accurate), Vector(n, 1.0));
    const SparseMatrix want = SparseMatrix::from_band(gen_Kskew(n)).scaled(-5.0);
    CHECK(sys.K.to_dense().data() == want.to_dense().data());
  }
  SECTION("A = M gives K = 0") {
    const SparseMatrix t = SparseMatrix::from_band(gen_T(6));
    const SplitSystem sys = split_from(t, t, rrd_of(t), Vector(6, 1.0));
    CHECK(sys.K.nonzeros() == 0);
  }
  SECTION("example 2 gives K = gamma S") {
    const std::size_t n = 100;
    const TestProblem p = gen_ex2(n, -7, 42, 0.01);
    const SplitSystem sys = split_from(*p.A, p.M_assembled, build_handle(p.M, PrecondMode::accurate), Vector(n, 1.0));
    const SparseMatrix s = gen_sparse_S(n, 0.01, 42).scaled(-7.0);
    CHECK(sys.K.to_dense().data() == s.to_dense().data());
  }
  SECTION("non-integer data is refused") {
    const SparseMatrix a = SparseMatrix::identity(2, 1.5);
    CHECK_THROWS_AS(split_from(a, SparseMatrix::identity(2), PrecondHandle(1.0, {make_diagonal_step(Vector(2, 1.0))}),
                               Vector(2, 1.0)),
                    RefuseInexactSplit);
  }
}

TEST_CASE("apply_B", "[precond][applyB]") {
  SECTION("K = 0 is the identity, bitwise") {
    Xoshiro256 rng(3);
    const std::size_t n = 200;
    const TestProblem p = gen_ex4(n, 0);
    const SplitSystem sys = make_system(p, PrecondMode::accurate, Vector(n, 1.0));
    REQUIRE(sys.K.nonzeros() == 0);
    for (int trial = 0; trial < 5; ++trial) {
      const Vector v = test::random_vector(n, rng);
      CHECK(apply_B(sys, v) == v);
      CHECK(apply_Bt(sys, v) == v);
    }
  }
  SECTION("example 4, n = 3, rho = 1 against double-double") {
    const TestProblem p = gen_ex4(3, 1);
    const SplitSystem sys = make_system(p, PrecondMode::accurate, Vector(3, 1.0));
    const Vector got = apply_B(sys, Vector(3, 1.0));
    DDMatrix t = to_dd(gen_T(3).to_dense());
    const DDVector y = xp_solve_dd(t, xp_solve_dd(t, DDVector(3, DoubleDouble(1.0))));
    for (std::size_t i = 0; i < 3; ++i) {
      const DoubleDouble want = DoubleDouble(1.0) + y[i] / DoubleDouble(256.0);
      CHECK(test::rel_entry(got[i], want.to_double()) <= 1e-14);
    }
  }
  SECTION("linearity") {
    Xoshiro256 rng(4);
    const TestProblem p = gen_ex1(300, 100);
    const SplitSystem sys = make_system(p, PrecondMode::accurate, Vector(300, 1.0));
    const Vector v = test::random_vector(300, rng);
    Vector v2 = v;
    scale(2.0, v2);
    Vector twice = apply_B(sys, v);
    scale(2.0, twice);
    CHECK(test::rel_diff2(apply_B(sys, v2), twice) <= 1e-14);
  }
}

TEST_CASE("form_B_dense", "[precond][dense]") {
  SECTION("K = 0") {
    const SparseMatrix t = SparseMatrix::from_band(gen_T(5));
    const Vector b{1, 2, 3, 4, 5};
    const SplitSystem sys = split_from(t, t, rrd_of(t), b);
    const DenseSystem d = form_B_dense(sys);
    CHECK(d.B.data() == DenseMatrix::identity(5).data());
    CHECK(d.c == handle_solve(sys.M, b));
  }
  SECTION("2x2 halves") {
    const PrecondHandle m(1.0, {make_diagonal_step(Vector{2.0, 2.0})});
    const SparseMatrix k = SparseMatrix::from_dense(DenseMatrix(2, 2, {0, 1, 1, 0}));
    const DenseSystem d = form_B_dense(make_split_system(m, k, Vector{2.0, 2.0}));
    CHECK(d.B.data() == std::vector<double>{1, 0.5, 0.5, 1});
    CHECK(d.c == Vector{1.0, 1.0});
  }
  SECTION("dense product agrees with apply_B") {
    Xoshiro256 rng(5);
    for (const TestProblem& p : {gen_ex1(256, 10), gen_ex2(255, 1000, 3, 0.01), gen_ex4(128, -100)}) {
      const SplitSystem sys = make_system(p, PrecondMode::accurate, Vector(p.n, 1.0));
      const DenseSystem d = form_B_dense(sys);
      const Vector v = test::random_vector(p.n, rng);
      CHECK(test::rel_diff2(spmv(d.B, v), apply_B(sys, v)) <= 1e-13);
    }
  }
  SECTION("example 2 at n = 127: dense condition number and convergence") {
    const TestProblem p = gen_ex2(127, 1000, 7);
    const SplitSystem sys = make_system(p, PrecondMode::accurate, spmv(*p.A, Vector(127, 1.0)));
    const DenseSystem d = form_B_dense(sys);
    const double k2 = kappa2(d.B);
    CHECK_THAT(kappa2_B_estimate(sys), Catch::Matchers::WithinRel(k2, 0.1));
    const SolveReport r = solve_iterative(sys, KrylovMethod::gmres);
    CHECK(r.converged);
    UNSCOPED_INFO("kappa2(B) = " << k2 << ", iterations " << r.iterations);
    CHECK(r.iterations <= 127);
  }
}

TEST_CASE("solve_direct", "[precond][direct]") {
  SECTION("K = 0 returns the handle solve") {
    const SparseMatrix t = SparseMatrix::from_band(gen_T(40));
    Xoshiro256 rng(6);
    const Vector b = test::random_vector(40, rng);
    const SplitSystem sys = split_from(t, t, rrd_of(t), b);
    const SystemSolveReport r = solve_direct(sys);
    CHECK(r.x == handle_solve(sys.M, b));
    const Vector xref = xp_solve(t, b);
    CHECK(test::rel_diff2(r.x, xref) * norm2(xref) / (inverse_norm2(t.to_dense()) * norm2(b)) <= 10 * kUnitRoundoff);
  }
  SECTION("example 1 at n = 511, gamma = 10 with the exact right-hand side") {
    const std::size_t n = 511;
    const TestProblem p = gen_ex1(n, 10);
    const ExactRhs ex = make_exact_rhs(*p.A, 7);
    const SplitSystem sys = make_system(p, PrecondMode::accurate, ex.b);
    const SystemSolveReport r = solve_direct(sys);
    const double ainv = norm_Ainv_estimate(sys, false).value;
    const MetricSet m = metrics(r.x, ex.x, ex.b, ainv, sys.K);
    CHECK(m.eta_ie <= 1e-13);
    CHECK(r.kappa1_B.has_value());
    CHECK(r.rho > 0.0);
  }
  SECTION("random dominant M plus small integer K against the oracle") {
    Xoshiro256 rng(64);
    const std::size_t n = 64;
    const SparseMatrix m = test::random_dd_integer(n, rng, 50, 0.2, 3);
    std::vector<Triplet> kt;
    for (int e = 0; e < 40; ++e)
      kt.push_back({static_cast<std::size_t>(rng.uniform() * n), static_cast<std::size_t>(rng.uniform() * n),
                    std::floor(rng.uniform() * 7) - 3});
    const SparseMatrix k = SparseMatrix::from_triplets(n, n, kt);
    const SparseMatrix a = add(m, k);
    const Vector b = test::random_vector(n, rng);
    const SplitSystem sys = split_from(a, m, rrd_of(m), b);
    const SystemSolveReport r = solve_direct(sys);
    const Vector xref = xp_solve(a, b);
    Vector diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = r.x[i] - xref[i];
    CHECK(norm2(diff) / (inverse_norm2(a.to_dense()) * norm2(b)) <= 1e-13);
  }
}

TEST_CASE("solve_iterative", "[precond][iterative]") {
  SECTION("K = 0 converges in one iteration to the handle solve") {
    const SparseMatrix t = SparseMatrix::from_band(gen_T(30));
    const Vector b = spmv(t, Vector(30, 1.0));
    const SplitSystem sys = split_from(t, t, rrd_of(t), b);
    for (auto method : {KrylovMethod::gmres, KrylovMethod::cg, KrylovMethod::minres}) {
      const SystemSolveReport r = solve_iterative(sys, method);
      CHECK(r.converged);
      CHECK(r.iterations == 1);
      CHECK(r.x == handle_solve(sys.M, b));
      CHECK(r.c == handle_solve(sys.M, b));
    }
  }
  SECTION("example 2 at n = 1023, gamma = 1e3") {
    const std::size_t n = 1023;
    const TestProblem p = gen_ex2(n, 1000, 7);
    const ExactRhs ex = make_exact_rhs(*p.A, 7);
    const SplitSystem sys = make_system(p, PrecondMode::accurate, ex.b);
    const SystemSolveReport r = solve_iterative(sys, KrylovMethod::gmres);
    CHECK(r.converged);
    const MetricSet m = metrics(r.x, ex.x, ex.b, norm_Ainv_estimate(sys, false).value, sys.K);
    CHECK(m.eta_ie <= 1e-14);
  }
  SECTION("accurate beats the Cholesky baseline on example 1, n = 8191, gamma = 10") {
    const std::size_t n = 8191;
    const TestProblem p = gen_ex1(n, 10);
    const ExactRhs ex = make_exact_rhs(*p.A, 7);
    const SplitSystem acc = make_system(p, PrecondMode::accurate, ex.b);
    const SplitSystem base = make_system(p, PrecondMode::baseline, ex.b);
    const double ainv = norm_Ainv_estimate(acc, false).value;
    const SystemSolveReport ra = solve_iterative(acc, KrylovMethod::gmres);
    const SystemSolveReport rb = solve_iterative(base, KrylovMethod::gmres);
    const double eta_acc = metrics(ra.x, ex.x, ex.b, ainv, acc.K).eta_ie;
    const double eta_base = metrics(rb.x, ex.x, ex.b, ainv, base.K).eta_ie;
    UNSCOPED_INFO("eta_ie accurate " << eta_acc << ", baseline " << eta_base);
    CHECK(eta_acc <= 1e-13);
    CHECK(eta_acc <= 1e-2 * eta_base);
  }
}

TEST_CASE("kappa(M) lies between kappa(A)/kappa(B) and kappa(A) kappa(B)", "[precond][property]") {
  for (const TestProblem& p : {gen_ex1(64, 10), gen_ex1(128, 1000), gen_ex2(127, -1000, 5, 0.01), gen_ex4(100, -100)}) {
    const SplitSystem sys = make_system(p, PrecondMode::accurate, Vector(p.n, 1.0));
    const double kb = kappa2(form_B_dense(sys).B);
    const double ka = kappa2(p.A->to_dense());
    const double km = kappa2(p.M_assembled.to_dense());
    CHECK(ka / kb <= km * (1 + 1e-6));
    CHECK(km <= kb * ka * (1 + 1e-6));
  }
}
