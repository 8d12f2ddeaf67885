#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "accprec/dd_factor.hpp"
#include "accprec/eigs.hpp"
#include "accprec/oracle.hpp"
#include "accprec/precond.hpp"
#include "accprec/testbed.hpp"
#include "test_helpers.hpp"

using namespace accprec;

namespace {

double tridiag_min_eig(std::size_t n) {
  return 2.0 - 2.0 * std::cos(std::numbers::pi / static_cast<double>(n + 1));
}

// P(floor(10 z) == 0) for standard normal z.
const double kZeroProb = 0.5 * std::erf(0.1 / std::numbers::sqrt2);

void check_count(std::size_t n, double density, std::uint64_t seed) {
  const SparseMatrix s = gen_sparse_S(n, density, seed);
  const double cells = static_cast<double>(n) * static_cast<double>(n);
  const double p = density * (1.0 - kZeroProb);
  const double mean = cells * p;
  const double sigma = std::sqrt(cells * p * (1.0 - p));
  CHECK(std::abs(static_cast<double>(s.nonzeros()) - mean) <= 3.0 * sigma);
  for (double v : s.values()) {
    CHECK(v == std::floor(v));
    CHECK(v != 0.0);
    CHECK(std::abs(v) <= 70.0);
  }
}

double ex3_smallest(std::size_t n) {
  const TestProblem p = gen_ex3(n, 1.0);
  const SplitSystem sys = make_system(p, PrecondMode::accurate, Vector(n, 0.0));
  const EigReport r = inverse_iteration(
      [&](const Vector& x) { return solve_iterative(sys, x, KrylovMethod::gmres).x; }, ones_start(n));
  REQUIRE(r.converged);
  return r.lambda;
}

}  // namespace

TEST_CASE("Xoshiro256 is deterministic", "[testbed][rng]") {
  Xoshiro256 a(99);
  Xoshiro256 b(99);
  Xoshiro256 c(100);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t x = a.next();
    CHECK(x == b.next());
    differs = differs || x != c.next();
  }
  CHECK(differs);
  Xoshiro256 u(5);
  double mean = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double x = u.uniform();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
    mean += x;
  }
  CHECK(std::abs(mean / 100000 - 0.5) <= 3.0 * std::sqrt(1.0 / 12.0 / 100000));
}

TEST_CASE("gen_T and gen_Kskew", "[testbed][gen]") {
  CHECK(gen_T(3).to_dense().data() == std::vector<double>{2, -1, 0, -1, 2, -1, 0, -1, 2});
  CHECK(gen_T(2).to_dense().data() == std::vector<double>{2, -1, -1, 2});
  CHECK(gen_Kskew(3).to_dense().data() == std::vector<double>{0, 1, 0, -1, 0, 1, 0, -1, 0});
  const DDRep rep = dd_from_assembled(SparseMatrix::from_band(gen_T(20)), DominanceMode::exact);
  for (std::size_t i = 0; i < 20; ++i) CHECK(rep.v[i] == ((i == 0 || i == 19) ? 1.0 : 0.0));
}

TEST_CASE("example generators", "[testbed][gen]") {
  SECTION("example 1 interior row") {
    const TestProblem p = gen_ex1(3, 1);
    REQUIRE(p.A.has_value());
    CHECK(p.A->coeff(1, 0) == -7.0);
    CHECK(p.A->coeff(1, 1) == 16.0);
    CHECK(p.A->coeff(1, 2) == -9.0);
    CHECK(p.M.alpha == 8.0);
    CHECK(p.integer);
  }
  SECTION("example 1 with gamma = 0") {
    const TestProblem p = gen_ex1(10, 0);
    CHECK(p.K.nonzeros() == 0);
    CHECK(p.A->to_dense().data() == SparseMatrix::from_band(gen_T(10)).scaled(22.0).to_dense().data());
  }
  SECTION("example 2 with gamma = 0 is pentadiagonal") {
    const TestProblem p = gen_ex2(20, 0, 1);
    CHECK(p.K.nonzeros() == 0);
    CHECK(p.A->lower_bandwidth() == 2);
    CHECK(p.A->upper_bandwidth() == 2);
    CHECK(p.A->to_dense().data() == p.M_assembled.to_dense().data());
  }
  SECTION("example 2 assembles exactly") {
    const TestProblem p = gen_ex2(63, 1000, 3, 0.01);
    const SparseMatrix s = gen_sparse_S(63, 0.01, 3);
    const DenseMatrix a = p.A->to_dense();
    const DenseMatrix m = p.M_assembled.to_dense();
    const DenseMatrix sd = s.to_dense();
    for (std::size_t i = 0; i < 63; ++i)
      for (std::size_t j = 0; j < 63; ++j) REQUIRE(a(i, j) == m(i, j) + 1000.0 * sd(i, j));
  }
  SECTION("example 4 stencil at n = 4") {
    const TestProblem p = gen_ex4(4, 0);
    CHECK(p.K.nonzeros() == 0);
    const double s = 625.0;
    // Rows of T^2: boundary rows lose the reflected neighbour.
    const std::vector<double> stencil{5, -4, 1, 0, -4, 6, -4, 1, 1, -4, 6, -4, 0, 1, -4, 5};
    const DenseMatrix a = p.A->to_dense();
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) CHECK(a(i, j) == s * stencil[4 * i + j]);
    const TestProblem q = gen_ex4(4, -3);
    CHECK(q.A->coeff(2, 2) == 6 * s - 3);
    CHECK(q.K.to_dense().data() == SparseMatrix::identity(4, -3.0).to_dense().data());
  }
  SECTION("example 3 mesh") {
    const TestProblem p = gen_ex3(63, 1.0);
    CHECK(p.h == 0x1p-6);
    CHECK(p.M.alpha == 4096.0);
    CHECK(p.K.coeff(0, 1) == -32.0);
    CHECK(p.K.coeff(1, 0) == 32.0);
  }
}

TEST_CASE("sparse S statistics", "[testbed][gen]") {
  check_count(100, 0.001, 42);
  check_count(1023, 0.001, 7);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) check_count(300, 0.01, seed);
  CHECK(gen_sparse_S(50, 0.1, 9).to_dense().data() == gen_sparse_S(50, 0.1, 9).to_dense().data());
}

TEST_CASE("make_exact_rhs", "[testbed][rhs]") {
  SECTION("identity") {
    const std::size_t n = 30;
    const ExactRhs r = make_exact_rhs(SparseMatrix::identity(n), 11);
    Xoshiro256 rng(11);
    Vector b0(n);
    for (double& v : b0) v = rng.uniform();
    const double m = norm_inf(b0);
    for (std::size_t i = 0; i < n; ++i) CHECK(r.x[i] == std::round(1e8 * b0[i] / m));
    CHECK(r.b == r.x);
  }
  SECTION("example 1, n = 511, seed 7 is exact") {
    const TestProblem p = gen_ex1(511, 10);
    const ExactRhs r = make_exact_rhs(*p.A, 7);
    CHECK(verify_exact_rhs(*p.A, r.x, r.b));
    for (double v : xp_residual(*p.A, r.x, r.b)) CHECK(v == 0.0);
    CHECK(norm_inf(r.x) == 1e8);
  }
  SECTION("verify rejects a perturbed pair") {
    const TestProblem p = gen_ex4(31, 1);
    ExactRhs r = make_exact_rhs(*p.A, 3);
    CHECK(verify_exact_rhs(*p.A, r.x, r.b));
    r.b[5] += 1.0;
    CHECK_FALSE(verify_exact_rhs(*p.A, r.x, r.b));
  }
  SECTION("every family") {
    for (const TestProblem& p : {gen_ex1(255, 100), gen_ex2(255, -100, 5, 0.01), gen_ex4(255, -100)}) {
      const ExactRhs r = make_exact_rhs(*p.A, 1);
      CHECK(verify_exact_rhs(*p.A, r.x, r.b));
    }
  }
}

TEST_CASE("metrics", "[testbed][metrics]") {
  SECTION("exact solution") {
    const Vector x{1, 2, 3};
    const MetricSet m = metrics(x, x, Vector{4, 5, 6}, 2.0, SparseMatrix(3, 3));
    CHECK(m.eta_ie == 0.0);
    CHECK(m.eta_rel == 0.0);
  }
  SECTION("identity system with a unit perturbation") {
    const Vector x{1, 0, 0};
    const Vector xh{1 + 1e-8, 0, 0};
    const MetricSet m = metrics(xh, x, x, 1.0, SparseMatrix::identity(3));
    CHECK(test::rel_entry(m.eta_ie, 1e-8) <= 1e-7);
    CHECK(test::rel_entry(m.eta_rel, 1e-8) <= 1e-7);
    CHECK(m.rho_factor == 1.0);
  }
  SECTION("sentinels") {
    const Vector z{0, 0};
    const MetricSet m = metrics(Vector{1, 1}, z, z, 1.0, SparseMatrix(2, 2));
    CHECK(m.eta_ie == kMetricSentinel);
    CHECK(m.eta_rel == kMetricSentinel);
    CHECK(m.rho_factor == kMetricSentinel);
    CHECK_FALSE(std::isnan(m.eta_ie));
  }
  SECTION("differences are taken exactly") {
    const Vector x{1e16, 1};
    const Vector xh{1e16, 1 + 0x1p-52};
    CHECK(metrics(xh, x, x, 1.0, SparseMatrix(2, 2)).eta_rel == 0x1p-52 / 1e16);
  }
  SECTION("consistency identity") {
    Xoshiro256 rng(21);
    for (int trial = 0; trial < 50; ++trial) {
      const Vector x = test::random_vector(40, rng);
      const Vector b = test::random_vector(40, rng);
      Vector xh = x;
      for (double& v : xh) v += 1e-6 * rng.normal();
      const double ainv = 0.1 + rng.uniform();
      const MetricSet m = metrics(xh, x, b, ainv, SparseMatrix(40, 40));
      CHECK(test::rel_entry(m.eta_ie * ainv * norm2(b), m.eta_rel * norm2(x)) <= 1e-14);
    }
  }
}

TEST_CASE("norm_Ainv_estimate", "[testbed][norm]") {
  SECTION("diag(2,5)") {
    const SplitSystem sys = make_split_system(PrecondHandle(1.0, {make_diagonal_step(Vector{2, 5})}),
                                              SparseMatrix(2, 2), Vector{1, 1});
    CHECK(test::rel_entry(norm_Ainv_estimate(sys, true).value, 0.5) <= 1e-2);
  }
  SECTION("T_n") {
    for (std::size_t n : {10u, 500u}) {
      const TestProblem p = gen_ex1(n, 0);
      const SplitSystem sys = make_system(p, PrecondMode::accurate, Vector(n, 1.0));
      const double want = 1.0 / (2.0 * static_cast<double>(n + 1) * tridiag_min_eig(n));
      CHECK(test::rel_entry(norm_Ainv_estimate(sys, true).value, want) <= 1e-2);
    }
  }
  SECTION("example 4, rho = 0, n = 4095") {
    const std::size_t n = 4095;
    const SplitSystem sys = make_system(gen_ex4(n, 0), PrecondMode::accurate, Vector(n, 1.0));
    const double h = 1.0 / static_cast<double>(n + 1);
    const double s = std::sin(std::numbers::pi * h / 2.0);
    const double want = std::pow(h, 4) / (16.0 * std::pow(s, 4));
    const NormEstimate e = norm_Ainv_estimate(sys, true);
    CHECK(e.converged);
    CHECK(test::rel_entry(e.value, want) <= 1e-2);
    CHECK(std::abs(e.value * std::pow(std::numbers::pi, 4) - 1.0) <= 1e-2);
  }
}

TEST_CASE("analytic eigenvalues", "[testbed][eig]") {
  CHECK(test::rel_entry(exact_eig_cd(1, 1), 10.11960440108936) <= 1e-15);
  CHECK(test::rel_entry(exact_eig_biharm(65535, 1, 1), 98.409090996696) <= 1e-12);
  const double pi4 = std::pow(std::numbers::pi, 4);
  for (std::size_t n : {63u, 255u, 4095u}) CHECK(std::abs(exact_eig_biharm(n, 1, 0) / pi4 - 1.0) <= 1e-2);
  CHECK(test::rel_entry(exact_eig_biharm_absmin(65535, -100), -2.590909003304) <= 1e-11);
  CHECK(exact_eig_biharm_absmin(10, 5) == exact_eig_biharm(10, 1, 5));
  // The n eigenvalues of (n+1)^4 T^2.
  const std::size_t n = 7;
  const DenseMatrix t2 = multiply(gen_T(n), gen_T(n)).to_dense();
  const SymmetricEigen e = jacobi_eigen(t2);
  for (std::size_t j = 1; j <= n; ++j)
    CHECK(test::rel_entry(exact_eig_biharm(n, j, 0), 4096.0 * e.values[j - 1]) <= 1e-13);
}

TEST_CASE("example 3 eigenvalue converges at rate h^2", "[testbed][eig][property]") {
  const double exact = exact_eig_cd(1.0, 1);
  const double e1 = std::abs(ex3_smallest(63) - exact);
  const double e2 = std::abs(ex3_smallest(255) - exact);
  const double ratio = e1 / e2;
  UNSCOPED_INFO("error ratio " << ratio);
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
}
