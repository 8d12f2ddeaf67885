#include "accprec/krylov.hpp"

#include <algorithm>

#include "accprec/errors.hpp"

namespace accprec {

namespace {

struct Setup {
  double tol;
  double bnorm;
};

Setup prepare(const LinearOperator& op, std::span<const double> rhs, const KrylovConfig& cfg,
              SolveReport& rep) {
  if (rhs.size() != op.n) throw DimensionMismatch("krylov: rhs size does not match operator");
  if (cfg.restart == 0) throw Error("krylov: restart must be >= 1");
  if (cfg.tol < 0.0) throw Error("krylov: tol must be positive");
  require_finite(rhs, "krylov: rhs");
  rep.x.assign(op.n, 0.0);
  return {cfg.tol > 0.0 ? cfg.tol : default_tolerance(op.n), norm2(rhs)};
}

Vector residual(const LinearOperator& op, std::span<const double> rhs, const Vector& x) {
  Vector r = op(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - r[i];
  return r;
}

double operator_norm(const LinearOperator& op, const KrylovConfig& cfg) {
  if (cfg.op_norm > 0.0) return cfg.op_norm;
  if (!op.has_transpose()) return 1.0;
  return norm2_estimate(op, 0.1, 30).value;
}

void finish(const LinearOperator& op, std::span<const double> rhs, double bnorm, SolveReport& rep) {
  rep.true_residual = bnorm == 0.0 ? 0.0 : norm2(residual(op, rhs, rep.x)) / bnorm;
}

}  // namespace

double default_tolerance(std::size_t n) {
  return std::sqrt(static_cast<double>(n)) * kUnitRoundoff;
}

bool residual_replacement(ReplacementState& state, double op_norm, double step_norm,
                          double residual_norm, double threshold) {
  state.deviation += kUnitRoundoff * (op_norm * step_norm + residual_norm);
  if (state.deviation >= threshold * residual_norm && residual_norm < state.residual_at_last) {
    state.deviation = 0.0;
    state.residual_at_last = residual_norm;
    ++state.count;
    return true;
  }
  return false;
}

SolveReport gmres(const LinearOperator& op, std::span<const double> rhs, const KrylovConfig& cfg) {
  SolveReport rep;
  const auto [tol, bnorm] = prepare(op, rhs, cfg, rep);
  const std::size_t n = op.n;
  if (bnorm == 0.0) {
    rep.converged = true;
    return rep;
  }
  const std::size_t m = std::max<std::size_t>(1, std::min(cfg.restart, n));

  std::vector<Vector> v(m + 1);
  // Column j of the Hessenberg matrix has j + 2 entries.
  std::vector<Vector> h(m);
  Vector g(m + 1), cs(m), sn(m), y(m);
  Vector r(rhs.begin(), rhs.end());
  int false_convergence = 0;

  for (std::size_t cycle = 0;; ++cycle) {
    if (cycle > 0) r = residual(op, rhs, rep.x);
    const double beta = norm2(r);
    rep.true_residual = beta / bnorm;
    if (rep.true_residual <= tol) {
      rep.converged = true;
      break;
    }
    if (rep.iterations >= cfg.maxit) {
      rep.message = "iteration limit reached";
      break;
    }
    if (false_convergence >= 3) {
      rep.message = "true residual stagnates above tolerance";
      break;
    }

    // v0 = r 2^-e is exact; its norm nu weights row 0 of the least-squares problem.
    const double sc = std::ldexp(1.0, -std::ilogb(beta));
    v[0] = r;
    scale(sc, v[0]);
    const double nu2 = dot(v[0], v[0]);
    const double nu = std::sqrt(nu2);
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = nu / sc;
    double hfro2 = 0.0;
    std::size_t k = 0;
    bool updated_converged = false;

    for (std::size_t j = 0; j < m && rep.iterations < cfg.maxit; ++j) {
      Vector w = op(v[j]);
      ++rep.iterations;
      auto& hj = h[j];
      hj.assign(j + 2, 0.0);
      const double c0 = dot(w, v[0]) / nu2;
      axpy(-c0, v[0], w);
      hj[0] = c0 * nu;
      for (std::size_t i = 1; i <= j; ++i) {
        hj[i] = dot(w, v[i]);
        axpy(-hj[i], v[i], w);
      }
      const double hn = norm2(w);
      hj[j + 1] = hn;
      for (double x : hj) hfro2 += x * x;

      for (std::size_t i = 0; i < j; ++i) {
        const double t = cs[i] * hj[i] + sn[i] * hj[i + 1];
        hj[i + 1] = -sn[i] * hj[i] + cs[i] * hj[i + 1];
        hj[i] = t;
      }
      const double denom = std::hypot(hj[j], hj[j + 1]);
      if (denom == 0.0) {
        rep.breakdown = true;
        rep.message = "singular Hessenberg matrix";
        break;
      }
      cs[j] = hj[j] / denom;
      sn[j] = hj[j + 1] / denom;
      hj[j] = denom;
      hj[j + 1] = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      k = j + 1;

      const double rel = std::abs(g[j + 1]) / bnorm;
      rep.residual_history.push_back(rel);
      if (hn <= kUnitRoundoff * std::sqrt(hfro2)) break;
      if (rel <= tol) {
        updated_converged = true;
        break;
      }
      v[j + 1] = std::move(w);
      scale(1.0 / hn, v[j + 1]);
    }

    for (std::size_t i = k; i-- > 0;) {
      double s = g[i];
      for (std::size_t l = i + 1; l < k; ++l) s -= h[l][i] * y[l];
      y[i] = s / h[i][i];
    }
    for (std::size_t i = 0; i < k; ++i) axpy(y[i], v[i], rep.x);

    if (rep.breakdown) {
      finish(op, rhs, bnorm, rep);
      rep.converged = rep.true_residual <= tol;
      return rep;
    }
    if (updated_converged) ++false_convergence;
  }
  return rep;
}

SolveReport cg(const LinearOperator& op, std::span<const double> rhs, const KrylovConfig& cfg) {
  SolveReport rep;
  const auto [tol, bnorm] = prepare(op, rhs, cfg, rep);
  if (bnorm == 0.0) {
    rep.converged = true;
    return rep;
  }
  const bool replace = cfg.rr_policy == ReplacementPolicy::simple;
  const double op_norm = replace ? operator_norm(op, cfg) : 0.0;
  ReplacementState state;

  Vector r(rhs.begin(), rhs.end());
  Vector p = r;
  double rr = dot(r, r);
  while (rep.iterations < cfg.maxit) {
    const Vector q = op(p);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) {
      rep.breakdown = true;
      rep.message = "nonpositive curvature: operator is not positive definite";
      break;
    }
    const double alpha = rr / pq;
    axpy(alpha, p, rep.x);
    axpy(-alpha, q, r);
    ++rep.iterations;
    double rnorm = norm2(r);
    if (replace &&
        residual_replacement(state, op_norm, std::abs(alpha) * norm2(p), rnorm, cfg.rr_threshold)) {
      r = residual(op, rhs, rep.x);
      rnorm = norm2(r);
    }
    rep.residual_history.push_back(rnorm / bnorm);
    if (rnorm / bnorm <= tol) {
      rep.converged = true;
      break;
    }
    const double rr_new = dot(r, r);
    const double beta = rr_new / rr;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
    rr = rr_new;
  }
  rep.replacements = state.count;
  if (!rep.converged && rep.message.empty()) rep.message = "iteration limit reached";
  finish(op, rhs, bnorm, rep);
  return rep;
}

SolveReport minres(const LinearOperator& op, std::span<const double> rhs, const KrylovConfig& cfg) {
  SolveReport rep;
  const auto [tol, bnorm] = prepare(op, rhs, cfg, rep);
  if (bnorm == 0.0) {
    rep.converged = true;
    return rep;
  }
  const std::size_t n = op.n;
  const bool replace = cfg.rr_policy == ReplacementPolicy::simple;
  const double op_norm = replace ? operator_norm(op, cfg) : 0.0;
  ReplacementState state;

  // Lanczos vectors r1, r2 (unnormalized), search directions w, w1, w2.
  Vector r1(rhs.begin(), rhs.end());
  Vector r2 = r1;
  Vector y = r1;
  Vector v(n), w(n, 0.0), w1(n), w2(n, 0.0);
  // With replacement enabled the residual is carried explicitly, which needs op*w.
  Vector r_explicit, aw, aw1, aw2;
  if (replace) {
    r_explicit = r1;
    aw.assign(n, 0.0);
    aw1.assign(n, 0.0);
    aw2.assign(n, 0.0);
  }

  // The first Lanczos vector is rhs 2^-e (exact) with norm nu; it is only
  // normalized implicitly so that op = I reproduces rhs exactly.
  const double sc = std::ldexp(1.0, -std::ilogb(bnorm));
  Vector v0(rhs.begin(), rhs.end());
  scale(sc, v0);
  const double nu2 = dot(v0, v0);
  const double nu = std::sqrt(nu2);

  double beta = nu / sc;
  double oldb = 0.0;
  double dbar = 0.0;
  double epsln = 0.0;
  double phibar = beta;
  double cs = -1.0;
  double sn = 0.0;

  while (rep.iterations < cfg.maxit) {
    const bool first = rep.iterations == 0;
    Vector av;
    double alfa = 0.0;
    if (first) {
      y = op(v0);
      if (replace) {
        av = y;
        scale(1.0 / nu, av);
      }
      alfa = dot(v0, y) / nu2;
      for (std::size_t i = 0; i < n; ++i) y[i] = (y[i] - alfa * v0[i]) / nu;
    } else {
      const double s = 1.0 / beta;
      for (std::size_t i = 0; i < n; ++i) v[i] = s * y[i];
      y = op(v);
      if (replace) av = y;
      axpy(-beta / oldb, r1, y);
      alfa = dot(v, y);
      axpy(-alfa / beta, r2, y);
    }
    r1.swap(r2);
    r2 = y;
    oldb = beta;
    beta = norm2(y);
    ++rep.iterations;

    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    double gamma = std::hypot(gbar, beta);
    if (gamma == 0.0) {
      rep.breakdown = true;
      rep.message = "singular tridiagonal system";
      break;
    }
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;

    w1.swap(w2);
    w2.swap(w);
    if (first) {
      const double t = 1.0 / (nu * gamma);
      for (std::size_t i = 0; i < n; ++i) w[i] = v0[i] * t;
      axpy(phi / gamma / nu, v0, rep.x);
    } else {
      for (std::size_t i = 0; i < n; ++i) w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) / gamma;
      axpy(phi, w, rep.x);
    }

    double rnorm = std::abs(phibar);
    if (replace) {
      aw1.swap(aw2);
      aw2.swap(aw);
      for (std::size_t i = 0; i < n; ++i) aw[i] = (av[i] - oldeps * aw1[i] - delta * aw2[i]) / gamma;
      axpy(-phi, aw, r_explicit);
      rnorm = norm2(r_explicit);
      if (residual_replacement(state, op_norm, std::abs(phi) * norm2(w), rnorm, cfg.rr_threshold)) {
        r_explicit = residual(op, rhs, rep.x);
        rnorm = norm2(r_explicit);
      }
    }
    rep.residual_history.push_back(rnorm / bnorm);
    if (rnorm / bnorm <= tol) {
      rep.converged = true;
      break;
    }
    if (beta == 0.0) {
      rep.breakdown = true;
      rep.message = "Lanczos breakdown before reaching tolerance";
      break;
    }
  }
  rep.replacements = state.count;
  if (!rep.converged && rep.message.empty()) rep.message = "iteration limit reached";
  finish(op, rhs, bnorm, rep);
  return rep;
}

}  // namespace accprec
