#include "accprec/eigs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "accprec/errors.hpp"
#include "accprec/krylov.hpp"

namespace accprec {

namespace {

double resolve_tol(double tol, std::size_t n) { return tol > 0.0 ? tol : default_tolerance(n); }

void normalize_start(Vector& v, const char* who) {
  if (v.empty()) throw Error(std::string(who) + ": empty start vector");
  require_finite(v, who);
  const double nv = norm2(v);
  if (nv == 0.0) throw Error(std::string(who) + ": zero start vector");
  scale(1.0 / nv, v);
}

}  // namespace

Vector ones_start(std::size_t n) {
  Vector v(n, 1.0);
  if (n > 0) scale(1.0 / std::sqrt(static_cast<double>(n)), v);
  return v;
}

EigReport inverse_iteration(const ApplyFn& apply_h, Vector v0, const InverseIterationConfig& cfg) {
  normalize_start(v0, "inverse_iteration");
  const std::size_t n = v0.size();
  const double tol = resolve_tol(cfg.tol, n);

  EigReport rep;
  Vector x = std::move(v0);
  double best = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  while (rep.iterations < cfg.maxit) {
    Vector y = apply_h(x);
    if (y.size() != n) throw DimensionMismatch("inverse_iteration: apply_h changed the dimension");
    ++rep.iterations;
    const double theta = dot(x, y);
    if (theta == 0.0 || !std::isfinite(theta)) {
      rep.degenerate = true;
      break;
    }
    Vector r = y;
    axpy(-theta, x, r);
    const double res = norm2(r) / std::abs(theta);
    rep.residual_history.push_back(res);
    rep.theta = theta;
    rep.lambda = 1.0 / theta;
    rep.residual = res;
    rep.x = x;
    if (res <= tol) {
      rep.converged = true;
      break;
    }
    if (res < best) {
      best = res;
      since_best = 0;
    } else if (++since_best >= cfg.stagnation_window) {
      break;
    }
    const double ny = norm2(y);
    if (ny == 0.0) {
      rep.degenerate = true;
      break;
    }
    scale(1.0 / ny, y);
    x = std::move(y);
  }
  return rep;
}

SymmetricEigen jacobi_eigen(DenseMatrix a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw DimensionMismatch("jacobi_eigen: matrix not square");
  DenseMatrix v = DenseMatrix::identity(n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        total += a(i, j) * a(i, j);
        if (i != j) off += a(i, j) * a(i, j);
      }
    if (off <= 1e-32 * total || off == 0.0) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  SymmetricEigen out{Vector(n), DenseMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

std::vector<EigReport> lanczos_smallest(const ApplyFn& apply_h, Vector v0, std::size_t k,
                                        const LanczosConfig& cfg) {
  normalize_start(v0, "lanczos_smallest");
  const std::size_t n = v0.size();
  if (k == 0 || k > n) throw Error("lanczos_smallest: k must lie in [1, n]");
  const double tol = resolve_tol(cfg.tol, n);
  const std::size_t max_dim = std::min(n, std::max(cfg.maxit, k));

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal;
  std::vector<Vector> q{std::move(v0)};
  Vector alpha;
  Vector beta;
  bool restarted = false;

  auto orthogonalize = [&](Vector& w) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& qi : q) axpy(-dot(w, qi), qi, w);
  };

  // Ritz values of the tridiagonal block alpha/beta[first, m).
  auto ritz = [&](std::size_t first, std::size_t m) {
    const std::size_t d = m - first;
    DenseMatrix t(d, d);
    for (std::size_t i = 0; i < d; ++i) {
      t(i, i) = alpha[first + i];
      if (i + 1 < d) t(i, i + 1) = t(i + 1, i) = beta[first + i];
    }
    SymmetricEigen e = jacobi_eigen(std::move(t));
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(e.values[a]) > std::abs(e.values[b]);
    });
    return std::make_pair(std::move(e), std::move(order));
  };
  auto pair_converged = [&](const SymmetricEigen& e, std::size_t c, std::size_t d, double b) {
    return std::abs(b * e.vectors(d - 1, c)) <= tol * std::abs(e.values[c]);
  };

  std::size_t block_start = 0;
  while (q.size() <= max_dim) {
    const std::size_t j = q.size() - 1;
    Vector w = apply_h(q[j]);
    if (w.size() != n) throw DimensionMismatch("lanczos_smallest: apply_h changed the dimension");
    alpha.push_back(dot(q[j], w));
    orthogonalize(w);
    const double b = norm2(w);
    const std::size_t m = j + 1;
    const bool invariant = b <= 10.0 * kUnitRoundoff * std::abs(alpha.back()) || b == 0.0;

    if (m == max_dim) {
      beta.push_back(b);
      break;
    }
    if (!invariant && m >= k) {
      auto [e, order] = ritz(0, m);
      bool all = true;
      for (std::size_t i = 0; i < k; ++i) all = all && pair_converged(e, order[i], m, b);
      if (all && block_start > 0) {
        auto [eb, ob] = ritz(block_start, m);
        all = pair_converged(eb, ob[0], m - block_start, b);
      }
      if (all) {
        beta.push_back(b);
        break;
      }
    }
    if (invariant) {
      // Continue in a fresh direction orthogonal to the current basis.
      Vector r(n);
      for (double& x : r) x = normal(rng);
      orthogonalize(r);
      const double nr = norm2(r);
      beta.push_back(0.0);
      if (nr == 0.0) break;
      scale(1.0 / nr, r);
      q.push_back(std::move(r));
      block_start = m;
      restarted = true;
      continue;
    }
    beta.push_back(b);
    scale(1.0 / b, w);
    q.push_back(std::move(w));
  }

  const std::size_t m = alpha.size();
  auto [e, order] = ritz(0, m);
  std::vector<EigReport> out;
  for (std::size_t i = 0; i < std::min(k, m); ++i) {
    const std::size_t c = order[i];
    EigReport rep;
    rep.theta = e.values[c];
    rep.lambda = 1.0 / rep.theta;
    rep.iterations = m;
    rep.x.assign(n, 0.0);
    for (std::size_t l = 0; l < m; ++l) axpy(e.vectors(l, c), q[l], rep.x);
    const double nx = norm2(rep.x);
    if (nx > 0.0) scale(1.0 / nx, rep.x);
    Vector r = apply_h(rep.x);
    axpy(-rep.theta, rep.x, r);
    rep.residual = norm2(r) / std::abs(rep.theta);
    rep.converged = rep.residual <= std::max(tol, 10.0 * kUnitRoundoff * std::sqrt(double(n)));
    rep.degenerate = restarted;
    rep.residual_history.push_back(rep.residual);
    out.push_back(std::move(rep));
  }
  return out;
}

}  // namespace accprec
