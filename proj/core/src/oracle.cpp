#include "accprec/oracle.hpp"

#include <cmath>

#include "accprec/errors.hpp"

namespace accprec {

namespace {

DoubleDouble dd_prod(double a, double b) { return dd_detail::two_prod(a, b); }

bool dd_positive(DoubleDouble x) { return x.hi > 0.0; }
bool dd_negative(DoubleDouble x) { return x.hi < 0.0; }

DoubleDouble dd_min_abs(DoubleDouble s, DoubleDouble t) {
  const DoubleDouble as = dd_abs(s);
  const DoubleDouble at = dd_abs(t);
  return as < at ? as : at;
}

DoubleDouble dd_g(DoubleDouble s, DoubleDouble t) {
  if ((dd_positive(s) && dd_positive(t)) || (dd_negative(s) && dd_negative(t)))
    return DoubleDouble(2.0) * dd_min_abs(s, t);
  return DoubleDouble(0.0);
}

DoubleDouble dd_p(DoubleDouble l, DoubleDouble c) {
  if ((dd_positive(l) && dd_negative(c)) || (dd_negative(l) && dd_positive(c)))
    return DoubleDouble(2.0) * dd_abs(l) * dd_abs(c);
  return DoubleDouble(0.0);
}

void check_vec(std::size_t n, std::size_t m, const char* what) {
  if (n != m) throw DimensionMismatch(what);
}

}  // namespace

DDMatrix to_dd(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("to_dd: matrix must be square");
  DDMatrix r(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = DoubleDouble(a(i, j));
  return r;
}

Vector round_to_double(const DDVector& x) {
  Vector r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i].to_double();
  return r;
}

DDVector xp_matvec(const SparseMatrix& a, std::span<const double> x) {
  check_vec(a.cols(), x.size(), "xp_matvec: size mismatch");
  DDVector y(a.rows());
  const auto& rp = a.row_ptr();
  const auto& ci = a.col_idx();
  const auto& av = a.values();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    DoubleDouble s;
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) s += dd_prod(av[p], x[ci[p]]);
    y[i] = s;
  }
  return y;
}

DDVector xp_matvec(const BandMatrix& a, std::span<const double> x) {
  check_vec(a.size(), x.size(), "xp_matvec: size mismatch");
  DDVector y(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    DoubleDouble s;
    for (std::size_t j = a.row_begin(i); j < a.row_end(i); ++j) s += dd_prod(a(i, j), x[j]);
    y[i] = s;
  }
  return y;
}

DDVector xp_matvec(const DenseMatrix& a, std::span<const double> x) {
  check_vec(a.cols(), x.size(), "xp_matvec: size mismatch");
  DDVector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    DoubleDouble s;
    for (std::size_t j = 0; j < a.cols(); ++j) s += dd_prod(a(i, j), x[j]);
    y[i] = s;
  }
  return y;
}

DDVector xp_solve_dd(DDMatrix a, DDVector b) {
  const std::size_t n = a.n;
  check_vec(n, b.size(), "xp_solve: size mismatch");
  if (n > 2048) throw Error("xp_solve: dense oracle is limited to n <= 2048");
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    DoubleDouble best = dd_abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const DoubleDouble c = dd_abs(a(i, k));
      if (c > best) {
        best = c;
        piv = i;
      }
    }
    if (best.hi == 0.0) throw SingularError(k, "xp_solve: singular to double-double precision");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[k], b[piv]);
    }
    const DoubleDouble pivot = a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (a(i, k).hi == 0.0) continue;
      const DoubleDouble l = a(i, k) / pivot;
      a(i, k) = DoubleDouble(0.0);
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= l * a(k, j);
      b[i] -= l * b[k];
    }
  }
  DDVector x(n);
  for (std::size_t i = n; i-- > 0;) {
    DoubleDouble s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

Vector xp_solve(const DenseMatrix& a, std::span<const double> b) {
  DDVector rhs(b.begin(), b.end());
  return round_to_double(xp_solve_dd(to_dd(a), std::move(rhs)));
}

Vector xp_solve(const SparseMatrix& a, std::span<const double> b) { return xp_solve(a.to_dense(), b); }

namespace {

template <class M>
Vector residual_impl(const M& a, std::span<const double> x, std::span<const double> b) {
  DDVector ax = xp_matvec(a, x);
  check_vec(ax.size(), b.size(), "xp_residual: size mismatch");
  Vector r(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) r[i] = (DoubleDouble(b[i]) - ax[i]).to_double();
  return r;
}

}  // namespace

Vector xp_residual(const SparseMatrix& a, std::span<const double> x, std::span<const double> b) {
  return residual_impl(a, x, b);
}
Vector xp_residual(const BandMatrix& a, std::span<const double> x, std::span<const double> b) {
  return residual_impl(a, x, b);
}
Vector xp_residual(const DenseMatrix& a, std::span<const double> x, std::span<const double> b) {
  return residual_impl(a, x, b);
}

DDRrdFactors xp_accurate_ldu_reference(const DDRep& rep, const LduObserver& observer) {
  const std::size_t n = rep.size();
  if (n > 256) throw Error("xp_accurate_ldu_reference: limited to n <= 256");
  DDMatrix a(n);
  {
    const auto& rp = rep.offdiag.row_ptr();
    const auto& ci = rep.offdiag.col_idx();
    const auto& av = rep.offdiag.values();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) a(i, ci[k]) = DoubleDouble(av[k]);
  }
  DDVector v(rep.v.begin(), rep.v.end());

  DDRrdFactors f{DDMatrix(n), DDVector(n), DDMatrix(n)};
  for (std::size_t i = 0; i < n; ++i) {
    f.L(i, i) = DoubleDouble(1.0);
    f.U(i, i) = DoubleDouble(1.0);
  }
  if (n == 0) return f;

  for (std::size_t k = 0; k + 1 < n; ++k) {
    DoubleDouble d = v[k];
    for (std::size_t j = k + 1; j < n; ++j) d += dd_abs(a(k, j));
    if (d.hi == 0.0) throw SingularError(k, "xp_accurate_ldu_reference: zero pivot");
    f.D[k] = d;
    for (std::size_t j = k + 1; j < n; ++j) f.U(k, j) = a(k, j) / d;
    for (std::size_t i = k + 1; i < n; ++i) {
      const DoubleDouble aik = a(i, k);
      if (aik.hi == 0.0) continue;
      const DoubleDouble l = aik / d;
      f.L(i, k) = l;
      DoubleDouble vi = v[i] + dd_abs(l) * v[k] + dd_p(l, a(k, i));
      for (std::size_t j = k + 1; j < n; ++j) {
        if (j == i) continue;
        const DoubleDouble lakj = l * a(k, j);
        vi += dd_g(a(i, j), lakj);
        a(i, j) -= lakj;
      }
      v[i] = vi;
      a(i, k) = DoubleDouble(0.0);
    }
    if (observer) observer(k, v, a);
  }
  f.D[n - 1] = v[n - 1];
  return f;
}

}  // namespace accprec
