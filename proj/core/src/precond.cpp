#include "accprec/precond.hpp"

#include <cmath>

#include "accprec/errors.hpp"
#include "accprec/oracle.hpp"

namespace accprec {

namespace {

constexpr double kTwo53 = 9007199254740992.0;

bool exact_integers(const SparseMatrix& a) {
  for (double x : a.values())
    if (!std::isfinite(x) || std::trunc(x) != x || std::abs(x) >= kTwo53) return false;
  return true;
}

SparseMatrix drop_zeros(const SparseMatrix& a) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p)
      if (a.values()[p] != 0.0) t.push_back({i, a.col_idx()[p], a.values()[p]});
  return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(t));
}

double rho_factor(const SplitSystem& sys, std::span<const double> x, std::span<const double> b) {
  const double bn = norm1(b);
  return bn == 0.0 ? 0.0 : norm1(sys.K) * norm1(x) / bn;
}

}  // namespace

SplitSystem make_split_system(PrecondHandle m, SparseMatrix k, Vector b,
                              std::optional<SparseMatrix> m_assembled,
                              std::optional<SparseMatrix> a) {
  const std::size_t n = m.size();
  if (k.rows() != n || k.cols() != n || b.size() != n)
    throw DimensionMismatch("SplitSystem: M, K and b must conform");
  if (m_assembled && (m_assembled->rows() != n || m_assembled->cols() != n))
    throw DimensionMismatch("SplitSystem: assembled M does not conform");
  if (a && (a->rows() != n || a->cols() != n))
    throw DimensionMismatch("SplitSystem: A does not conform");
  require_finite(b, "SplitSystem: b");
  SparseMatrix kt = k.transpose();
  return SplitSystem{std::move(m), std::move(k), std::move(kt), std::move(b), std::move(m_assembled),
                     std::move(a)};
}

SplitSystem split_from(const SparseMatrix& a, const SparseMatrix& m_assembled, PrecondHandle m,
                       Vector b) {
  if (a.rows() != m_assembled.rows() || a.cols() != m_assembled.cols())
    throw DimensionMismatch("split_from: A and M differ in shape");
  if (!exact_integers(a) || !exact_integers(m_assembled))
    throw RefuseInexactSplit("split_from: A - M is not exact for non-integer entries; pass K directly");
  SparseMatrix k = drop_zeros(add(a, m_assembled, -1.0));
  return make_split_system(std::move(m), std::move(k), std::move(b), m_assembled, a);
}

Vector apply_B(const SplitSystem& sys, std::span<const double> v) {
  if (v.size() != sys.size()) throw DimensionMismatch("apply_B: size mismatch");
  Vector out(v.begin(), v.end());
  if (sys.K.nonzeros() == 0) return out;
  const Vector w = sys.M.solve(spmv(sys.K, v));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += w[i];
  return out;
}

Vector apply_Bt(const SplitSystem& sys, std::span<const double> v) {
  if (v.size() != sys.size()) throw DimensionMismatch("apply_Bt: size mismatch");
  Vector out(v.begin(), v.end());
  if (sys.K.nonzeros() == 0) return out;
  const Vector w = spmv(sys.Kt, sys.M.solve_transpose(v));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += w[i];
  return out;
}

LinearOperator b_operator(const SplitSystem& sys, bool symmetric) {
  LinearOperator op;
  op.n = sys.size();
  op.symmetric = symmetric;
  op.apply = [&sys](std::span<const double> v, std::span<double> out) {
    const Vector r = apply_B(sys, v);
    std::copy(r.begin(), r.end(), out.begin());
  };
  op.apply_transpose = [&sys](std::span<const double> v, std::span<double> out) {
    const Vector r = apply_Bt(sys, v);
    std::copy(r.begin(), r.end(), out.begin());
  };
  return op;
}

DenseSystem form_B_dense(const SplitSystem& sys) {
  const std::size_t n = sys.size();
  if (n > 4096) throw Error("form_B_dense: limited to n <= 4096");
  DenseSystem out{DenseMatrix::identity(n), sys.M.solve(sys.b)};
  Vector kcol(n);
  const auto& rp = sys.Kt.row_ptr();
  const auto& ci = sys.Kt.col_idx();
  const auto& kv = sys.Kt.values();
  for (std::size_t j = 0; j < n; ++j) {
    if (rp[j] == rp[j + 1]) continue;
    std::fill(kcol.begin(), kcol.end(), 0.0);
    for (std::size_t p = rp[j]; p < rp[j + 1]; ++p) kcol[ci[p]] = kv[p];
    const Vector z = sys.M.solve(kcol);
    for (std::size_t i = 0; i < n; ++i) out.B(i, j) += z[i];
  }
  return out;
}

std::optional<double> original_residual(const SplitSystem& sys, std::span<const double> x) {
  return original_residual(sys, x, sys.b);
}

std::optional<double> original_residual(const SplitSystem& sys, std::span<const double> x,
                                        std::span<const double> b) {
  if (x.size() != sys.size() || b.size() != sys.size())
    throw DimensionMismatch("original_residual: size mismatch");
  const double bn = norm2(b);
  if (bn == 0.0) return 0.0;
  if (sys.A) return norm2(xp_residual(*sys.A, x, b)) / bn;
  if (!sys.M_assembled) return std::nullopt;
  const DDVector mx = xp_matvec(*sys.M_assembled, x);
  const DDVector kx = xp_matvec(sys.K, x);
  Vector r(sys.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = (DoubleDouble(b[i]) - mx[i] - kx[i]).to_double();
  return norm2(r) / bn;
}

SystemSolveReport solve_direct(const SplitSystem& sys) {
  SystemSolveReport rep;
  DenseSystem ds = form_B_dense(sys);
  rep.c = ds.c;
  const DenseLU lu(ds.B);
  rep.x = lu.solve(ds.c);
  rep.converged = true;
  rep.true_residual = [&] {
    const double cn = norm2(ds.c);
    if (cn == 0.0) return 0.0;
    Vector r = spmv(ds.B, rep.x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = ds.c[i] - r[i];
    return norm2(r) / cn;
  }();
  const std::size_t n = sys.size();
  rep.kappa1_B = norm1(ds.B) * inverse_norm1_estimate(
                                   n, [&](const Vector& v) { return lu.solve(v); },
                                   [&](const Vector& v) { return lu.solve_transpose(v); });
  rep.rho = rho_factor(sys, rep.x, sys.b);
  rep.original_residual = original_residual(sys, rep.x).value_or(std::nan(""));
  return rep;
}

SystemSolveReport solve_iterative(const SplitSystem& sys, KrylovMethod method,
                                  const KrylovConfig& cfg) {
  return solve_iterative(sys, sys.b, method, cfg);
}

SystemSolveReport solve_iterative(const SplitSystem& sys, std::span<const double> b,
                                  KrylovMethod method, const KrylovConfig& cfg) {
  SystemSolveReport rep;
  rep.c = sys.M.solve(b);
  const LinearOperator op = b_operator(sys, method != KrylovMethod::gmres);
  SolveReport kr;
  switch (method) {
    case KrylovMethod::gmres: kr = gmres(op, rep.c, cfg); break;
    case KrylovMethod::cg: kr = cg(op, rep.c, cfg); break;
    case KrylovMethod::minres: kr = minres(op, rep.c, cfg); break;
  }
  static_cast<SolveReport&>(rep) = std::move(kr);
  rep.rho = rho_factor(sys, rep.x, b);
  rep.original_residual = original_residual(sys, rep.x, b).value_or(std::nan(""));
  return rep;
}

}  // namespace accprec
