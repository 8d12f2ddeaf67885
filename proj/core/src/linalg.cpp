#include "accprec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>

#include "accprec/errors.hpp"

namespace accprec {

Vector LinearOperator::operator()(std::span<const double> v) const {
  if (v.size() != n) throw DimensionMismatch("LinearOperator: input length mismatch");
  Vector out(n);
  apply(v, out);
  return out;
}

Vector LinearOperator::transpose_apply(std::span<const double> v) const {
  if (symmetric) return (*this)(v);
  if (!apply_transpose) throw Error("LinearOperator: transpose not available");
  if (v.size() != n) throw DimensionMismatch("LinearOperator: input length mismatch");
  Vector out(n);
  apply_transpose(v, out);
  return out;
}

LinearOperator make_operator(const SparseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("make_operator: matrix not square");
  auto shared = std::make_shared<const SparseMatrix>(a);
  auto shared_t = std::make_shared<const SparseMatrix>(a.transpose());
  LinearOperator op;
  op.n = a.rows();
  op.symmetric = a.is_symmetric();
  op.apply = [shared](std::span<const double> in, std::span<double> out) { spmv_into(*shared, in, out); };
  op.apply_transpose = [shared_t](std::span<const double> in, std::span<double> out) {
    spmv_into(*shared_t, in, out);
  };
  return op;
}

LinearOperator make_operator(const BandMatrix& a) {
  return make_operator(SparseMatrix::from_band(a, false));
}

LinearOperator make_operator(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("make_operator: matrix not square");
  auto shared = std::make_shared<const DenseMatrix>(a);
  LinearOperator op;
  op.n = a.rows();
  op.apply = [shared](std::span<const double> in, std::span<double> out) {
    const Vector y = spmv(*shared, in);
    std::copy(y.begin(), y.end(), out.begin());
  };
  op.apply_transpose = [shared](std::span<const double> in, std::span<double> out) {
    const Vector y = spmv_transpose(*shared, in);
    std::copy(y.begin(), y.end(), out.begin());
  };
  op.symmetric = [&] {
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (a(i, j) != a(j, i)) return false;
    return true;
  }();
  return op;
}

namespace {

// Deterministic start vector with no special alignment to structured
// eigenvectors (an all-ones start is orthogonal to the top singular vectors
// of skew-symmetric stencils).
Vector start_vector(std::size_t n) {
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.5 * std::sin(static_cast<double>(i) + 1.0);
  scale(1.0 / norm2(x), x);
  return x;
}

NormEstimate power_iteration(std::size_t n, const std::function<Vector(const Vector&)>& forward,
                             const std::function<Vector(const Vector&)>& backward, double tol,
                             int maxit) {
  NormEstimate est;
  if (n == 0) {
    est.converged = true;
    return est;
  }
  Vector x = start_vector(n);
  double previous = 0.0;
  for (int it = 1; it <= maxit; ++it) {
    const Vector y = forward(x);
    const double sigma = norm2(y);
    est.value = sigma;
    est.iterations = it;
    if (sigma == 0.0) {
      est.converged = true;
      return est;
    }
    if (it > 1 && std::abs(sigma - previous) < tol * sigma) {
      est.converged = true;
      return est;
    }
    previous = sigma;
    x = backward(y);
    const double nx = norm2(x);
    if (nx == 0.0) {
      est.converged = true;
      return est;
    }
    scale(1.0 / nx, x);
  }
  return est;
}

}  // namespace

NormEstimate norm2_estimate(const LinearOperator& op, double tol, int maxit) {
  if (!op.has_transpose()) throw Error("norm2_estimate: operator transpose required");
  return power_iteration(
      op.n, [&](const Vector& v) { return op(v); },
      [&](const Vector& v) { return op.transpose_apply(v); }, tol, maxit);
}

NormEstimate inverse_norm2_estimate(std::size_t n, const std::function<Vector(const Vector&)>& solve,
                                    const std::function<Vector(const Vector&)>& solve_transpose,
                                    double tol, int maxit) {
  return power_iteration(n, solve, solve_transpose, tol, maxit);
}

double inverse_norm1_estimate(std::size_t n, const std::function<Vector(const Vector&)>& solve,
                              const std::function<Vector(const Vector&)>& solve_transpose) {
  if (n == 0) return 0.0;
  Vector x(n, 1.0 / static_cast<double>(n));
  double estimate = 0.0;
  std::size_t last_j = n;
  for (int it = 0; it < 5; ++it) {
    const Vector y = solve(x);
    estimate = std::max(estimate, norm1(y));
    Vector xi(n);
    for (std::size_t i = 0; i < n; ++i) xi[i] = y[i] >= 0.0 ? 1.0 : -1.0;
    const Vector z = solve_transpose(xi);
    std::size_t j = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(z[i]) > std::abs(z[j])) j = i;
    if (std::abs(z[j]) <= dot(z, x) || j == last_j) break;
    last_j = j;
    x.assign(n, 0.0);
    x[j] = 1.0;
  }
  // Higham's extra test vector guards against underestimates on special structure.
  Vector alt(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    alt[i] = sign * (1.0 + static_cast<double>(i) / static_cast<double>(n > 1 ? n - 1 : 1));
  }
  const double alt_est = 2.0 * norm1(solve(alt)) / (3.0 * static_cast<double>(n));
  return std::max(estimate, alt_est);
}

// ---------------------------------------------------------------------------
// DenseLU

DenseLU::DenseLU(DenseMatrix a) : lu_(std::move(a)), perm_(lu_.rows()) {
  if (lu_.rows() != lu_.cols()) throw DimensionMismatch("DenseLU: matrix not square");
  const std::size_t n = lu_.rows();
  for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(lu_(i, k)) > best) {
        best = std::abs(lu_(i, k));
        p = i;
      }
    }
    if (best == 0.0) throw SingularError(k, "DenseLU: zero pivot");
    if (p != k) {
      auto rk = lu_.row(k);
      auto rp = lu_.row(p);
      std::swap_ranges(rk.begin(), rk.end(), rp.begin());
      std::swap(perm_[k], perm_[p]);
    }
    const double pivot = lu_(k, k);
    const auto rk = lu_.row(k);
    for (std::size_t i = k + 1; i < n; ++i) {
      auto ri = lu_.row(i);
      const double l = ri[k] / pivot;
      ri[k] = l;
      if (l == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) ri[j] -= l * rk[j];
    }
  }
}

Vector DenseLU::solve(std::span<const double> b) const {
  const std::size_t n = size();
  if (b.size() != n) throw DimensionMismatch("DenseLU::solve: length mismatch");
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
  for (std::size_t i = 0; i < n; ++i) {
    const auto ri = lu_.row(i);
    double s = x[i];
    for (std::size_t j = 0; j < i; ++j) s -= ri[j] * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    const auto ri = lu_.row(i);
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= ri[j] * x[j];
    x[i] = s / ri[i];
  }
  return x;
}

Vector DenseLU::solve_transpose(std::span<const double> b) const {
  // A = P^T L U  =>  A^T x = b  <=>  U^T L^T P x = b
  const std::size_t n = size();
  if (b.size() != n) throw DimensionMismatch("DenseLU::solve_transpose: length mismatch");
  Vector y(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    double s = y[i];
    for (std::size_t j = 0; j < i; ++j) s -= lu_(j, i) * y[j];
    y[i] = s / lu_(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = y[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= lu_(j, i) * y[j];
    y[i] = s;
  }
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[perm_[i]] = y[i];
  return x;
}

Vector gepp_solve(const DenseMatrix& a, std::span<const double> b) {
  if (a.rows() != b.size()) throw DimensionMismatch("gepp_solve: length mismatch");
  return DenseLU(a).solve(b);
}

// ---------------------------------------------------------------------------
// BandLU

BandLU::BandLU(const BandMatrix& a)
    : n_(a.size()), lower_(a.lower_bandwidth()), width_(a.lower_bandwidth() + a.upper_bandwidth()) {
  const std::size_t w = lower_ + width_ + 1;
  u_.assign(n_ * w, 0.0);
  l_.assign(n_ * lower_, 0.0);
  pivot_.resize(n_);
  // Working entry (i, j) lives at u_[i*w + j - i + lower_] for j in [i-lower_, i+width_].
  auto at = [&](std::size_t i, std::size_t j) -> double& { return u_[i * w + j + lower_ - i]; };
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = a.row_begin(i); j < a.row_end(i); ++j) at(i, j) = a(i, j);

  for (std::size_t k = 0; k < n_; ++k) {
    const std::size_t last_row = std::min(n_ - 1, k + lower_);
    const std::size_t last_col = std::min(n_ - 1, k + width_);
    std::size_t p = k;
    double best = std::abs(at(k, k));
    for (std::size_t i = k + 1; i <= last_row; ++i) {
      if (std::abs(at(i, k)) > best) {
        best = std::abs(at(i, k));
        p = i;
      }
    }
    if (best == 0.0) throw SingularError(k, "BandLU: zero pivot");
    pivot_[k] = p;
    if (p != k)
      for (std::size_t j = k; j <= last_col; ++j) std::swap(at(k, j), at(p, j));
    const double pivot = at(k, k);
    for (std::size_t i = k + 1; i <= last_row; ++i) {
      const double l = at(i, k) / pivot;
      at(i, k) = 0.0;
      l_[k * lower_ + (i - k - 1)] = l;
      if (l == 0.0) continue;
      for (std::size_t j = k + 1; j <= last_col; ++j) at(i, j) -= l * at(k, j);
    }
  }
}

Vector BandLU::solve(std::span<const double> b) const {
  if (b.size() != n_) throw DimensionMismatch("BandLU::solve: length mismatch");
  const std::size_t w = lower_ + width_ + 1;
  Vector x(b.begin(), b.end());
  for (std::size_t k = 0; k < n_; ++k) {
    std::swap(x[k], x[pivot_[k]]);
    const std::size_t last_row = std::min(n_ - 1, k + lower_);
    for (std::size_t i = k + 1; i <= last_row; ++i) x[i] -= l_[k * lower_ + (i - k - 1)] * x[k];
  }
  for (std::size_t i = n_; i-- > 0;) {
    const std::size_t last_col = std::min(n_ - 1, i + width_);
    double s = x[i];
    for (std::size_t j = i + 1; j <= last_col; ++j) s -= u_[i * w + j + lower_ - i] * x[j];
    x[i] = s / u_[i * w + lower_];
  }
  return x;
}

Vector BandLU::solve_transpose(std::span<const double> b) const {
  if (b.size() != n_) throw DimensionMismatch("BandLU::solve_transpose: length mismatch");
  const std::size_t w = lower_ + width_ + 1;
  Vector x(b.begin(), b.end());
  // U^T y = b
  for (std::size_t i = 0; i < n_; ++i) {
    double s = x[i];
    const std::size_t first = i > width_ ? i - width_ : 0;
    for (std::size_t j = first; j < i; ++j) s -= u_[j * w + i + lower_ - j] * x[j];
    x[i] = s / u_[i * w + lower_];
  }
  // Undo the eliminations and interchanges in reverse order.
  for (std::size_t k = n_; k-- > 0;) {
    const std::size_t last_row = std::min(n_ - 1, k + lower_);
    double s = x[k];
    for (std::size_t i = k + 1; i <= last_row; ++i) s -= l_[k * lower_ + (i - k - 1)] * x[i];
    x[k] = s;
    std::swap(x[k], x[pivot_[k]]);
  }
  return x;
}

// ---------------------------------------------------------------------------
// BandCholesky

BandCholesky::BandCholesky(const BandMatrix& m) {
  const std::size_t n = m.size();
  const std::size_t q = m.upper_bandwidth();
  if (m.lower_bandwidth() != q) throw Error("BandCholesky: band must be symmetric");
  r_ = BandMatrix(n, 0, q);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t first = k > q ? k - q : 0;
    double s = m(k, k);
    for (std::size_t i = first; i < k; ++i) s -= r_(i, k) * r_(i, k);
    if (!(s > 0.0)) throw NotPositiveDefinite(k);
    const double rkk = std::sqrt(s);
    r_.at(k, k) = rkk;
    const std::size_t last = std::min(n - 1, k + q);
    for (std::size_t j = k + 1; j <= last; ++j) {
      double t = m(k, j);
      const std::size_t lo = j > q ? j - q : 0;
      for (std::size_t i = std::max(first, lo); i < k; ++i) t -= r_(i, k) * r_(i, j);
      r_.at(k, j) = t / rkk;
    }
  }
}

Vector BandCholesky::pivots() const {
  Vector d(size());
  for (std::size_t k = 0; k < size(); ++k) d[k] = r_(k, k) * r_(k, k);
  return d;
}

Vector BandCholesky::solve(std::span<const double> b) const {
  const std::size_t n = size();
  const std::size_t q = r_.upper_bandwidth();
  if (b.size() != n) throw DimensionMismatch("BandCholesky::solve: length mismatch");
  Vector x(b.begin(), b.end());
  // R^T y = b
  for (std::size_t i = 0; i < n; ++i) {
    double s = x[i];
    const std::size_t first = i > q ? i - q : 0;
    for (std::size_t j = first; j < i; ++j) s -= r_(j, i) * x[j];
    x[i] = s / r_(i, i);
  }
  // R x = y
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    const std::size_t last = std::min(n - 1, i + q);
    for (std::size_t j = i + 1; j <= last; ++j) s -= r_(i, j) * x[j];
    x[i] = s / r_(i, i);
  }
  return x;
}

}  // namespace accprec
