#include "accprec/dd_factor.hpp"

#include <cassert>
#include <cmath>

#include "accprec/errors.hpp"
#include "accprec/linalg.hpp"

namespace accprec {

namespace {

constexpr double kTwo53 = 9007199254740992.0;

bool is_integer(double x) { return std::isfinite(x) && std::trunc(x) == x; }

}  // namespace

DDRep make_dd_rep(SparseMatrix offdiag, Vector v) {
  if (offdiag.rows() != offdiag.cols() || offdiag.rows() != v.size())
    throw DimensionMismatch("make_dd_rep: offdiag must be square and match v");
  require_finite(offdiag.values(), "make_dd_rep: offdiag");
  require_finite(v, "make_dd_rep: v");
  const auto& rp = offdiag.row_ptr();
  const auto& ci = offdiag.col_idx();
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p)
      if (ci[p] == i) throw Error("make_dd_rep: offdiag has a stored diagonal entry");
    if (v[i] < 0.0) throw NotRowDominant(i);
  }
  return DDRep{std::move(offdiag), std::move(v)};
}

DDRep dd_from_assembled(const SparseMatrix& a, DominanceMode mode) {
  if (a.rows() != a.cols()) throw DimensionMismatch("dd_from_assembled: matrix must be square");
  require_finite(a.values(), "dd_from_assembled");
  const std::size_t n = a.rows();
  const auto& rp = a.row_ptr();
  const auto& ci = a.col_idx();
  const auto& av = a.values();

  std::vector<Triplet> off;
  off.reserve(a.nonzeros());
  Vector v(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double diag = 0.0;
    double sum = 0.0;
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) {
      const double x = av[p];
      if (mode == DominanceMode::exact && !is_integer(x))
        throw Error("dd_from_assembled: exact mode requires integer entries");
      if (ci[p] == i) {
        diag = x;
      } else {
        sum += std::abs(x);
        if (x != 0.0) off.push_back({i, ci[p], x});
      }
    }
    if (mode == DominanceMode::exact && (sum >= kTwo53 || diag >= kTwo53))
      throw OverflowError("dd_from_assembled: row sums exceed the exact integer range");
    if (!(diag > 0.0)) throw BadDiagonal(i);
    v[i] = diag - sum;
    if (v[i] < 0.0) throw NotRowDominant(i);
  }
  return DDRep{SparseMatrix::from_triplets(n, n, std::move(off)), std::move(v)};
}

SparseMatrix dd_assemble(const DDRep& rep) {
  const std::size_t n = rep.size();
  const auto& rp = rep.offdiag.row_ptr();
  const auto& ci = rep.offdiag.col_idx();
  const auto& av = rep.offdiag.values();
  std::vector<Triplet> t;
  t.reserve(rep.offdiag.nonzeros() + n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = rep.v[i];
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) {
      d += std::abs(av[p]);
      t.push_back({i, ci[p], av[p]});
    }
    t.push_back({i, i, d});
  }
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

double g_term(double s, double t) {
  if ((s > 0.0 && t > 0.0) || (s < 0.0 && t < 0.0)) return 2.0 * std::min(std::abs(s), std::abs(t));
  return 0.0;
}

double p_term(double l, double c) {
  if ((l > 0.0 && c < 0.0) || (l < 0.0 && c > 0.0)) return 2.0 * (std::abs(l) * std::abs(c));
  return 0.0;
}

RrdFactors accurate_ldu(const DDRep& rep, FactorLayout layout, LduTrace* trace) {
  const std::size_t n = rep.size();
  if (rep.offdiag.rows() != n || rep.offdiag.cols() != n)
    throw DimensionMismatch("accurate_ldu: offdiag does not match v");
  if (layout == FactorLayout::dense && n > 4096)
    throw Error("accurate_ldu: dense layout is limited to n <= 4096");
  if (n == 0) return RrdFactors{};

  std::size_t p = n - 1;
  std::size_t q = n - 1;
  if (layout == FactorLayout::banded) {
    p = rep.offdiag.lower_bandwidth();
    q = rep.offdiag.upper_bandwidth();
  }

  BandMatrix a(n, p, q);
  {
    const auto& rp = rep.offdiag.row_ptr();
    const auto& ci = rep.offdiag.col_idx();
    const auto& av = rep.offdiag.values();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) a.at(i, ci[k]) = av[k];
  }
  Vector v = rep.v;

  RrdFactors f{BandMatrix(n, p, 0), Vector(n, 0.0), BandMatrix(n, 0, q)};
  for (std::size_t i = 0; i < n; ++i) {
    f.L.at(i, i) = 1.0;
    f.U.at(i, i) = 1.0;
  }
  if (trace != nullptr)
    for (double x : v) trace->min_dominance = std::min(trace->min_dominance, x);

  for (std::size_t k = 0; k + 1 < n; ++k) {
    const std::size_t jend = a.row_end(k);
    double d = v[k];
    for (std::size_t j = k + 1; j < jend; ++j) d += std::abs(a(k, j));
    if (d == 0.0) throw SingularError(k, "accurate_ldu: zero pivot");
    f.D[k] = d;
    for (std::size_t j = k + 1; j < jend; ++j) f.U.at(k, j) = a(k, j) / d;

    const std::size_t iend = std::min(n, k + p + 1);
    for (std::size_t i = k + 1; i < iend; ++i) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double l = aik / d;
      f.L.at(i, k) = l;

      double vi = v[i] + std::abs(l) * v[k];
      vi += p_term(l, a(k, i));
      for (std::size_t j = k + 1; j < jend; ++j) {
        if (j == i) continue;
        double& aij = a.at(i, j);
        const double lakj = l * a(k, j);
        vi += g_term(aij, lakj);
        aij -= lakj;
      }
      assert(vi >= v[i]);
      v[i] = vi;
      a.at(i, k) = 0.0;
      if (trace != nullptr) {
        trace->min_dominance = std::min(trace->min_dominance, vi);
        ++trace->dominance_updates;
      }
    }
  }
  f.D[n - 1] = v[n - 1];
  return f;
}

Vector solve_unit_lower(const BandMatrix& l, std::span<const double> b) {
  const std::size_t n = l.size();
  if (b.size() != n) throw DimensionMismatch("solve_unit_lower: size mismatch");
  Vector x(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    double s = x[i];
    for (std::size_t j = l.row_begin(i); j < i; ++j) s -= l(i, j) * x[j];
    x[i] = s;
  }
  return x;
}

Vector solve_unit_upper(const BandMatrix& u, std::span<const double> b) {
  const std::size_t n = u.size();
  if (b.size() != n) throw DimensionMismatch("solve_unit_upper: size mismatch");
  Vector x(b.begin(), b.end());
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    const std::size_t end = u.row_end(i);
    for (std::size_t j = i + 1; j < end; ++j) s -= u(i, j) * x[j];
    x[i] = s;
  }
  return x;
}

Vector solve_unit_lower_transpose(const BandMatrix& l, std::span<const double> b) {
  const std::size_t n = l.size();
  if (b.size() != n) throw DimensionMismatch("solve_unit_lower_transpose: size mismatch");
  Vector x(b.begin(), b.end());
  // L^T is upper triangular; column-oriented elimination over rows of L.
  for (std::size_t i = n; i-- > 0;) {
    const double xi = x[i];
    for (std::size_t j = l.row_begin(i); j < i; ++j) x[j] -= l(i, j) * xi;
  }
  return x;
}

Vector solve_unit_upper_transpose(const BandMatrix& u, std::span<const double> b) {
  const std::size_t n = u.size();
  if (b.size() != n) throw DimensionMismatch("solve_unit_upper_transpose: size mismatch");
  Vector x(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    const std::size_t end = u.row_end(i);
    for (std::size_t j = i + 1; j < end; ++j) x[j] -= u(i, j) * xi;
  }
  return x;
}

FactorDiagnostics factor_diagnostics(const RrdFactors& f) {
  const std::size_t n = f.size();
  FactorDiagnostics d;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = f.L.row_begin(i); j < i; ++j)
      d.max_abs_L = std::max(d.max_abs_L, std::abs(f.L(i, j)));
    for (std::size_t j = i + 1; j < f.U.row_end(i); ++j)
      d.max_abs_U = std::max(d.max_abs_U, std::abs(f.U(i, j)));
  }
  if (n == 0) return d;
  const double inv_l = inverse_norm1_estimate(
      n, [&](const Vector& b) { return solve_unit_lower(f.L, b); },
      [&](const Vector& b) { return solve_unit_lower_transpose(f.L, b); });
  const double inv_u = inverse_norm1_estimate(
      n, [&](const Vector& b) { return solve_unit_upper(f.U, b); },
      [&](const Vector& b) { return solve_unit_upper_transpose(f.U, b); });
  d.kappa1_L = norm1(f.L) * inv_l;
  d.kappa1_U = norm1(f.U) * inv_u;
  return d;
}

}  // namespace accprec
