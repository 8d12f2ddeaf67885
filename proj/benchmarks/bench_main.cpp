#include <benchmark/benchmark.h>

#include "accprec/dd_factor.hpp"
#include "accprec/ie_solve.hpp"
#include "accprec/krylov.hpp"
#include "accprec/precond.hpp"
#include "accprec/testbed.hpp"

using namespace accprec;

namespace {

Vector random_rhs(std::size_t n) {
  Xoshiro256 rng(n);
  Vector b(n);
  for (double& v : b) v = rng.uniform();
  return b;
}

void BM_accurate_ldu_tridiagonal(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const DDRep rep = dd_from_assembled(*gen_ex1(n, 10).A, DominanceMode::exact);
  for (auto _ : state) benchmark::DoNotOptimize(accurate_ldu(rep));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_accurate_ldu_tridiagonal)->RangeMultiplier(8)->Range(1 << 10, 1 << 19)->Complexity();

void BM_accurate_ldu_pentadiagonal(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const SparseMatrix t2 = SparseMatrix::from_band(multiply(gen_T(n), gen_T(n)));
  const DDRep rep = dd_from_assembled(add(t2, SparseMatrix::identity(n, 6.0)), DominanceMode::exact);
  for (auto _ : state) benchmark::DoNotOptimize(accurate_ldu(rep));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_accurate_ldu_pentadiagonal)->RangeMultiplier(8)->Range(1 << 10, 1 << 16)->Complexity();

void BM_rrd_solve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const RrdFactors f = accurate_ldu(dd_from_assembled(SparseMatrix::from_band(gen_T(n)), DominanceMode::exact));
  const Vector b = random_rhs(n);
  for (auto _ : state) benchmark::DoNotOptimize(rrd_solve(f, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_rrd_solve)->RangeMultiplier(8)->Range(1 << 10, 1 << 19)->Complexity();

void BM_apply_B(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const SplitSystem sys = make_system(gen_ex4(n, 1), PrecondMode::accurate, random_rhs(n));
  const Vector v = random_rhs(n + 1);
  const Vector x(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n));
  for (auto _ : state) benchmark::DoNotOptimize(apply_B(sys, x));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_apply_B)->RangeMultiplier(8)->Range(1 << 10, 1 << 16)->Complexity();

void BM_gmres_example1(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const TestProblem p = gen_ex1(n, 10);
  const SplitSystem sys = make_system(p, PrecondMode::accurate, spmv(*p.A, Vector(n, 1.0)));
  std::size_t iterations = 0;
  for (auto _ : state) {
    const SystemSolveReport r = solve_iterative(sys, KrylovMethod::gmres);
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.x.data());
  }
  state.counters["iterations"] = static_cast<double>(iterations);
}
BENCHMARK(BM_gmres_example1)->Arg(1023)->Arg(8191)->Unit(benchmark::kMillisecond);

void BM_cg_example4(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const SplitSystem sys = make_system(gen_ex4(n, 1), PrecondMode::accurate, random_rhs(n));
  for (auto _ : state) benchmark::DoNotOptimize(solve_iterative(sys, KrylovMethod::cg).x.data());
}
BENCHMARK(BM_cg_example4)->Arg(4095)->Arg(65535)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
