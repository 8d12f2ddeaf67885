#include "accprec/testbed.hpp"

#include <cmath>
#include <numbers>

#include "accprec/double_double.hpp"
#include "accprec/errors.hpp"
#include "accprec/linalg.hpp"

namespace accprec {

namespace {

constexpr double kTwo53 = 9007199254740992.0;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

bool is_power_of_two(double x) {
  int e = 0;
  return x > 0.0 && std::frexp(x, &e) == 0.5;
}

void check_exact(const SparseMatrix& a, const char* who) {
  for (double x : a.values())
    if (std::abs(x) >= kTwo53) throw OverflowError(std::string(who) + ": entries exceed 2^53");
}

/// Narrow enough that a banded LU beats a dense one.
bool narrow_band(const SparseMatrix& a) { return a.lower_bandwidth() + a.upper_bandwidth() <= 64; }

DoubleDouble dd_norm2_sq(std::span<const double> x) {
  DoubleDouble s;
  for (double v : x) s += dd_detail::two_prod(v, v);
  return s;
}

LinearOperator bt_operator(const SplitSystem& sys) {
  LinearOperator op;
  op.n = sys.size();
  op.apply = [&sys](std::span<const double> v, std::span<double> out) {
    const Vector r = apply_Bt(sys, v);
    std::copy(r.begin(), r.end(), out.begin());
  };
  op.apply_transpose = [&sys](std::span<const double> v, std::span<double> out) {
    const Vector r = apply_B(sys, v);
    std::copy(r.begin(), r.end(), out.begin());
  };
  return op;
}

}  // namespace

// ---------------------------------------------------------------------------
// Random numbers

Xoshiro256::Xoshiro256(std::uint64_t seed) {
  std::uint64_t state = seed;
  for (auto& s : s_) s = splitmix64(state);
}

std::uint64_t Xoshiro256::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Xoshiro256::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

// ---------------------------------------------------------------------------
// Generators

BandMatrix gen_T(std::size_t n) {
  if (n < 2) throw Error("gen_T: n must be at least 2");
  BandMatrix t(n, 1, 1);
  for (std::size_t i = 0; i < n; ++i) {
    t.at(i, i) = 2.0;
    if (i > 0) t.at(i, i - 1) = -1.0;
    if (i + 1 < n) t.at(i, i + 1) = -1.0;
  }
  return t;
}

BandMatrix gen_Kskew(std::size_t n) {
  if (n < 2) throw Error("gen_Kskew: n must be at least 2");
  BandMatrix k(n, 1, 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    k.at(i, i + 1) = 1.0;
    k.at(i + 1, i) = -1.0;
  }
  return k;
}

PrecondHandle build_handle(const PreconditionerSpec& spec, PrecondMode mode) {
  if (spec.power != 1 && spec.power != 2) throw Error("build_handle: power must be 1 or 2");
  const BandMatrix t = gen_T(spec.n);
  if (mode == PrecondMode::accurate) {
    const DDRep rep = dd_from_assembled(SparseMatrix::from_band(t), DominanceMode::exact);
    SolveStep step = make_rrd_step(accurate_ldu(rep, FactorLayout::banded));
    std::vector<SolveStep> chain(static_cast<std::size_t>(spec.power), step);
    return PrecondHandle(spec.alpha, std::move(chain));
  }
  const BandMatrix m = spec.power == 1 ? t : multiply(t, t);
  return PrecondHandle(spec.alpha, {make_chol_step(m)});
}

SparseMatrix assemble_preconditioner(const PreconditionerSpec& spec) {
  const BandMatrix t = gen_T(spec.n);
  const BandMatrix m = spec.power == 1 ? t : multiply(t, t);
  return SparseMatrix::from_band(m).scaled(spec.alpha);
}

TestProblem gen_ex1(std::size_t n, std::int64_t gamma) {
  TestProblem p;
  p.family = "ex1";
  p.n = n;
  p.param = static_cast<double>(gamma);
  p.h = 0.0;
  p.M = {n, 2.0 * static_cast<double>(n + 1), 1};
  p.M_assembled = assemble_preconditioner(p.M);
  p.K = SparseMatrix::from_band(gen_Kskew(n)).scaled(-static_cast<double>(gamma));
  if (gamma == 0) p.K = SparseMatrix(n, n);
  p.A = add(p.M_assembled, p.K);
  check_exact(*p.A, "gen_ex1");
  p.integer = true;
  return p;
}

SparseMatrix gen_sparse_S(std::size_t n, double density, std::uint64_t seed) {
  if (!(density > 0.0 && density <= 1.0)) throw Error("gen_sparse_S: density must lie in (0, 1]");
  Xoshiro256 rng(seed);
  const std::uint64_t cells = static_cast<std::uint64_t>(n) * n;
  const double log_q = std::log1p(-density);
  std::vector<Triplet> t;
  std::uint64_t idx = 0;
  while (true) {
    if (density < 1.0) {
      const double skip = std::floor(std::log(1.0 - rng.uniform()) / log_q);
      if (skip >= static_cast<double>(cells - idx)) break;
      idx += static_cast<std::uint64_t>(skip);
    }
    if (idx >= cells) break;
    const double value = std::floor(10.0 * rng.normal());
    if (value != 0.0) t.push_back({static_cast<std::size_t>(idx / n), static_cast<std::size_t>(idx % n), value});
    ++idx;
  }
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

TestProblem gen_ex2(std::size_t n, std::int64_t gamma, std::uint64_t seed, double density) {
  TestProblem p;
  p.family = "ex2";
  p.n = n;
  p.param = static_cast<double>(gamma);
  p.h = 1.0 / static_cast<double>(n + 1);
  const double np1 = static_cast<double>(n + 1);
  p.M = {n, np1 * np1 * np1 * np1, 2};
  p.M_assembled = assemble_preconditioner(p.M);
  check_exact(p.M_assembled, "gen_ex2");
  p.K = gamma == 0 ? SparseMatrix(n, n) : gen_sparse_S(n, density, seed).scaled(static_cast<double>(gamma));
  check_exact(p.K, "gen_ex2");
  p.A = add(p.M_assembled, p.K);
  check_exact(*p.A, "gen_ex2");
  p.integer = true;
  return p;
}

TestProblem gen_ex3(std::size_t n, double gamma) {
  if (!(gamma > 0.0)) throw Error("gen_ex3: gamma must be positive");
  TestProblem p;
  p.family = "ex3";
  p.n = n;
  p.param = gamma;
  p.h = gamma / static_cast<double>(n + 1);
  p.M = {n, 1.0 / (p.h * p.h), 1};
  p.M_assembled = assemble_preconditioner(p.M);
  p.K = SparseMatrix::from_band(gen_Kskew(n)).scaled(-1.0 / (2.0 * p.h));
  if (is_power_of_two(p.h)) p.A = add(p.M_assembled, p.K);
  return p;
}

TestProblem gen_ex4(std::size_t n, std::int64_t rho) {
  TestProblem p;
  p.family = "ex4";
  p.n = n;
  p.param = static_cast<double>(rho);
  p.h = 1.0 / static_cast<double>(n + 1);
  const double np1 = static_cast<double>(n + 1);
  p.M = {n, np1 * np1 * np1 * np1, 2};
  p.M_assembled = assemble_preconditioner(p.M);
  p.K = rho == 0 ? SparseMatrix(n, n) : SparseMatrix::identity(n, static_cast<double>(rho));
  if (6.0 * p.M.alpha + std::abs(p.param) < kTwo53) {
    p.A = add(p.M_assembled, p.K);
    check_exact(*p.A, "gen_ex4");
    p.integer = true;
  }
  return p;
}

SplitSystem make_system(const TestProblem& p, PrecondMode mode, Vector b) {
  return make_split_system(build_handle(p.M, mode), p.K, std::move(b), p.M_assembled, p.A);
}

// ---------------------------------------------------------------------------
// Exact right-hand sides

namespace {

bool int128_product(const SparseMatrix& a, std::span<const double> x, std::vector<__int128>& out) {
  const auto& rp = a.row_ptr();
  const auto& ci = a.col_idx();
  const auto& av = a.values();
  out.assign(a.rows(), 0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    __int128 s = 0;
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p)
      s += static_cast<__int128>(static_cast<std::int64_t>(av[p])) *
           static_cast<__int128>(static_cast<std::int64_t>(x[ci[p]]));
    out[i] = s;
  }
  return true;
}

void require_integer(std::span<const double> v, const char* who) {
  for (double x : v)
    if (!std::isfinite(x) || std::trunc(x) != x || std::abs(x) >= 9.2e18)
      throw Error(std::string(who) + ": integer entries required");
}

}  // namespace

ExactRhs make_exact_rhs(const SparseMatrix& a, std::uint64_t seed, const SolveFn& solve) {
  if (a.rows() != a.cols()) throw DimensionMismatch("make_exact_rhs: matrix must be square");
  require_integer(a.values(), "make_exact_rhs");
  const std::size_t n = a.rows();
  Xoshiro256 rng(seed);
  Vector b0(n);
  for (double& v : b0) v = rng.uniform();
  const Vector x0 = solve(b0);
  if (x0.size() != n) throw DimensionMismatch("make_exact_rhs: solver returned the wrong size");
  require_finite(x0, "make_exact_rhs: x0");
  const double xinf = norm_inf(x0);
  if (xinf == 0.0) throw Error("make_exact_rhs: zero initial solution");

  std::vector<__int128> bi;
  for (double scale : {1e8, 1e5}) {
    ExactRhs out{Vector(n), Vector(n), scale};
    for (std::size_t i = 0; i < n; ++i) out.x[i] = std::round(x0[i] * scale / xinf);
    int128_product(a, out.x, bi);
    bool fits = true;
    for (std::size_t i = 0; i < n && fits; ++i) {
      const __int128 v = bi[i] < 0 ? -bi[i] : bi[i];
      fits = v <= static_cast<__int128>(1) << 53;
      out.b[i] = static_cast<double>(bi[i]);
    }
    if (fits) return out;
  }
  throw OverflowError("make_exact_rhs: A x exceeds the exactly representable range");
}

ExactRhs make_exact_rhs(const SparseMatrix& a, std::uint64_t seed) {
  const std::size_t n = a.rows();
  if (narrow_band(a)) {
    const BandLU lu(a.to_band());
    return make_exact_rhs(a, seed, [&](const Vector& v) { return lu.solve(v); });
  }
  if (n > 4096) throw Error("make_exact_rhs: no default solver for wide matrices with n > 4096");
  const DenseLU lu(a.to_dense());
  return make_exact_rhs(a, seed, [&](const Vector& v) { return lu.solve(v); });
}

bool verify_exact_rhs(const SparseMatrix& a, std::span<const double> x, std::span<const double> b) {
  if (x.size() != a.cols() || b.size() != a.rows()) return false;
  for (double v : x)
    if (!std::isfinite(v) || std::trunc(v) != v) return false;
  for (double v : b)
    if (!std::isfinite(v) || std::trunc(v) != v) return false;
  std::vector<__int128> bi;
  int128_product(a, x, bi);
  for (std::size_t i = 0; i < b.size(); ++i)
    if (bi[i] != static_cast<__int128>(static_cast<std::int64_t>(b[i]))) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Metrics

MetricSet metrics(std::span<const double> x_hat, std::span<const double> x, std::span<const double> b,
                  double norm_ainv2, const SparseMatrix& k) {
  if (x_hat.size() != x.size() || b.size() != x.size())
    throw DimensionMismatch("metrics: size mismatch");
  DoubleDouble d2;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const DoubleDouble d = dd_detail::two_sum(x_hat[i], -x[i]);
    d2 += d * d;
  }
  const double dn = dd_sqrt(d2).to_double();
  const double xn = dd_sqrt(dd_norm2_sq(x)).to_double();
  const double bn = dd_sqrt(dd_norm2_sq(b)).to_double();
  MetricSet m;
  const double den_ie = norm_ainv2 * bn;
  m.eta_ie = den_ie > 0.0 ? dn / den_ie : kMetricSentinel;
  m.eta_rel = xn > 0.0 ? dn / xn : kMetricSentinel;
  const double b1 = norm1(b);
  m.rho_factor = b1 > 0.0 ? norm1(k) * norm1(x) / b1 : kMetricSentinel;
  return m;
}

NormEstimate norm_Ainv_estimate(const SplitSystem& sys, bool symmetric, double tol) {
  const std::size_t n = sys.size();
  if (sys.A && (narrow_band(*sys.A) || n <= 2048)) {
    if (narrow_band(*sys.A)) {
      const BandLU lu(sys.A->to_band());
      return inverse_norm2_estimate(
          n, [&](const Vector& v) { return lu.solve(v); },
          [&](const Vector& v) { return lu.solve_transpose(v); }, tol);
    }
    const DenseLU lu(sys.A->to_dense());
    return inverse_norm2_estimate(
        n, [&](const Vector& v) { return lu.solve(v); },
        [&](const Vector& v) { return lu.solve_transpose(v); }, tol);
  }
  KrylovConfig cfg;
  cfg.tol = 1e-10;
  const KrylovMethod method = KrylovMethod::gmres;
  auto solve = [&](const Vector& v) { return solve_iterative(sys, v, method, cfg).x; };
  if (symmetric) return inverse_norm2_estimate(n, solve, solve, tol);
  const LinearOperator bt = bt_operator(sys);
  auto solve_t = [&](const Vector& v) {
    const SolveReport r = gmres(bt, v, cfg);
    return sys.M.solve_transpose(r.x);
  };
  return inverse_norm2_estimate(n, solve, solve_t, tol);
}

double kappa2_B_estimate(const SplitSystem& sys, double tol) {
  const std::size_t n = sys.size();
  if (n <= 2048) {
    const DenseSystem ds = form_B_dense(sys);
    const double nb = norm2_estimate(make_operator(ds.B), tol).value;
    const DenseLU lu(ds.B);
    const double ni = inverse_norm2_estimate(
                          n, [&](const Vector& v) { return lu.solve(v); },
                          [&](const Vector& v) { return lu.solve_transpose(v); }, tol)
                          .value;
    return nb * ni;
  }
  const LinearOperator b = b_operator(sys);
  const LinearOperator bt = bt_operator(sys);
  KrylovConfig cfg;
  cfg.tol = 1e-10;
  const double nb = norm2_estimate(b, tol).value;
  const double ni = inverse_norm2_estimate(
                        n, [&](const Vector& v) { return gmres(b, v, cfg).x; },
                        [&](const Vector& v) { return gmres(bt, v, cfg).x; }, tol)
                        .value;
  return nb * ni;
}

// ---------------------------------------------------------------------------
// Analytic eigenvalues

double exact_eig_cd(double gamma, int i) {
  const double k = std::numbers::pi * static_cast<double>(i) / gamma;
  return 0.25 + k * k;
}

double exact_eig_biharm(std::size_t n, std::size_t j, double rho) {
  const double h = 1.0 / static_cast<double>(n + 1);
  const double s = std::sin(static_cast<double>(j) * std::numbers::pi * h / 2.0) / h;
  return 16.0 * (s * s) * (s * s) + rho;
}

double exact_eig_biharm_absmin(std::size_t n, double rho) {
  double best = exact_eig_biharm(n, 1, rho);
  for (std::size_t j = 2; j <= n; ++j) {
    const double l = exact_eig_biharm(n, j, rho);
    if (std::abs(l) < std::abs(best)) best = l;
    if (l > 0.0 && l > std::abs(best)) break;
  }
  return best;
}

}  // namespace accprec
