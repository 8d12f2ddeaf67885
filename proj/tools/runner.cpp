#include "runner.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>
#include <sstream>

#include "accprec/dd_factor.hpp"
#include "accprec/errors.hpp"
#include "accprec/ie_solve.hpp"
#include "accprec/linalg.hpp"
#include "accprec/matrix_market.hpp"
#include "accprec/testbed.hpp"

namespace accprec::cli {

namespace {

constexpr std::size_t kMaxBandForBanded = 64;

std::int64_t integer_param(double v, const char* what) {
  if (std::trunc(v) != v || std::abs(v) > 9.0e15)
    throw Error(fmt::format("{} must be an integer, got {}", what, v));
  return static_cast<std::int64_t>(v);
}

bool is_integer_matrix(const SparseMatrix& a) {
  return std::all_of(a.values().begin(), a.values().end(),
                     [](double x) { return std::trunc(x) == x && std::abs(x) < 0x1p53; });
}

bool narrow(const SparseMatrix& a) {
  return a.lower_bandwidth() + a.upper_bandwidth() <= kMaxBandForBanded;
}

KrylovMethod parse_method(const std::string& s) {
  if (s == "gmres") return KrylovMethod::gmres;
  if (s == "cg") return KrylovMethod::cg;
  if (s == "minres") return KrylovMethod::minres;
  throw Error("unknown Krylov method '" + s + "'");
}

/// Backward-stable solver for an assembled matrix.
std::function<Vector(const Vector&)> plain_solver(const SparseMatrix& a) {
  if (narrow(a)) {
    auto lu = std::make_shared<const BandLU>(a.to_band());
    return [lu](const Vector& v) { return lu->solve(v); };
  }
  if (a.rows() > 4096) throw Error("plain mode needs a banded matrix or n <= 4096");
  auto lu = std::make_shared<const DenseLU>(a.to_dense());
  return [lu](const Vector& v) { return lu->solve(v); };
}

struct InnerStats {
  bool all_converged = true;
  std::size_t solves = 0;
  std::size_t iterations = 0;
};

/// x -> A^{-1} x for the inverse iteration, by the requested mode.
ApplyFn inverse_apply(const TestProblem& p, Mode mode, KrylovMethod method, double tol,
                      const std::shared_ptr<InnerStats>& stats) {
  if (mode == Mode::plain) {
    const SparseMatrix a = p.A ? *p.A : add(p.M_assembled, p.K);
    return plain_solver(a);
  }
  const PrecondMode pm = mode == Mode::accurate ? PrecondMode::accurate : PrecondMode::baseline;
  auto sys = std::make_shared<const SplitSystem>(make_system(p, pm, Vector(p.n, 0.0)));
  KrylovConfig kc;
  kc.tol = tol;
  return [sys, method, kc, stats](const Vector& v) {
    const SystemSolveReport r = solve_iterative(*sys, v, method, kc);
    ++stats->solves;
    stats->iterations += r.iterations;
    stats->all_converged = stats->all_converged && r.converged;
    return r.x;
  };
}

KrylovMethod eigen_method(const std::string& requested, const TestProblem& p) {
  if (requested != "auto") return parse_method(requested);
  if (p.family == "ex4") return p.param >= 0.0 ? KrylovMethod::cg : KrylovMethod::minres;
  return KrylovMethod::gmres;
}

void run_linear(const ExperimentConfig& cfg, double param, ExperimentResult& out) {
  const std::int64_t g = integer_param(param, "gamma");
  const TestProblem p = cfg.family == "ex1" ? gen_ex1(cfg.n, g) : gen_ex2(cfg.n, g, cfg.seed, cfg.density);
  const SparseMatrix& a = *p.A;
  const std::size_t n = cfg.n;

  ExactRhs rhs;
  if (narrow(a) || n <= 4096) {
    rhs = make_exact_rhs(a, cfg.seed);
  } else {
    const SplitSystem tmp = make_system(p, PrecondMode::accurate, Vector(n, 0.0));
    rhs = make_exact_rhs(a, cfg.seed, [&](const Vector& v) {
      return solve_iterative(tmp, v, KrylovMethod::gmres).x;
    });
  }
  if (!verify_exact_rhs(a, rhs.x, rhs.b)) throw Error("exact right-hand side failed verification");

  const SplitSystem acc = make_system(p, PrecondMode::accurate, rhs.b);
  const double ainv = norm_Ainv_estimate(acc, false).value;
  std::optional<double> kappa_a;
  if (cfg.estimate_kappa) kappa_a = norm2_estimate(make_operator(a)).value * ainv;

  KrylovConfig kc;
  kc.tol = cfg.tol;
  const bool direct = cfg.method == "direct";
  const KrylovMethod method = direct || cfg.method == "auto" ? KrylovMethod::gmres : parse_method(cfg.method);

  for (Mode mode : cfg.modes) {
    ExperimentRow row;
    row.family = cfg.family;
    row.n = n;
    row.param = param;
    row.h = p.h;
    row.mode = mode;
    row.kappaA = kappa_a;
    Vector xhat;
    if (mode == Mode::plain) {
      xhat = plain_solver(a)(rhs.b);
    } else {
      const SplitSystem sys =
          mode == Mode::accurate ? acc : make_system(p, PrecondMode::baseline, rhs.b);
      const SystemSolveReport r = direct ? solve_direct(sys) : solve_iterative(sys, method, kc);
      xhat = r.x;
      row.iterations = r.iterations;
      row.converged = r.converged;
      if (mode == Mode::accurate && cfg.estimate_kappa) row.kappaB = kappa2_B_estimate(acc);
    }
    const MetricSet m = metrics(xhat, rhs.x, rhs.b, ainv, p.K);
    row.eta_ie = m.eta_ie;
    row.eta_rel = m.eta_rel;
    row.rho = m.rho_factor;
    if (mode == Mode::accurate) out.all_converged = out.all_converged && row.converged;
    out.rows.push_back(std::move(row));
  }
}

void run_eigen_case(const ExperimentConfig& cfg, const TestProblem& p, double exact,
                    ExperimentResult& out) {
  const KrylovMethod method = eigen_method(cfg.method, p);
  for (Mode mode : cfg.modes) {
    auto stats = std::make_shared<InnerStats>();
    const ApplyFn apply = inverse_apply(p, mode, method, cfg.tol, stats);
    InverseIterationConfig ic;
    ic.tol = cfg.tol;
    const EigReport e = inverse_iteration(apply, ones_start(p.n), ic);
    ExperimentRow row;
    row.family = cfg.family;
    row.n = p.n;
    row.param = p.param;
    row.h = p.h;
    row.mode = mode;
    row.lambda_exact = exact;
    row.lambda = e.lambda;
    row.rel_err = std::abs(e.lambda - exact) / std::abs(exact);
    row.iterations = e.iterations;
    row.converged = e.converged && stats->all_converged;
    if (mode == Mode::accurate) out.all_converged = out.all_converged && row.converged;
    out.rows.push_back(std::move(row));
  }
}

std::string num(double v) { return fmt::format("{:.5e}", v); }
std::string full(double v) { return fmt::format("{:.17g}", v); }
std::string opt(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

SparseMatrix product_assembled(const std::vector<SparseMatrix>& fs, double alpha) {
  const std::size_t n = fs.front().rows();
  bool banded = true;
  std::size_t bw = 0;
  for (const auto& f : fs) {
    bw += std::max(f.lower_bandwidth(), f.upper_bandwidth());
    banded = banded && narrow(f);
  }
  if (banded && bw < n) {
    BandMatrix m = fs.front().to_band();
    for (std::size_t i = 1; i < fs.size(); ++i) m = multiply(m, fs[i].to_band());
    return SparseMatrix::from_band(m).scaled(alpha);
  }
  if (n > 4096) throw Error("product preconditioner too wide to assemble");
  DenseMatrix m = fs.front().to_dense();
  for (std::size_t i = 1; i < fs.size(); ++i) m = multiply(m, fs[i].to_dense());
  return SparseMatrix::from_dense(m).scaled(alpha);
}

SolveStep rrd_step_for(const SparseMatrix& f) {
  const DominanceMode dm = is_integer_matrix(f) ? DominanceMode::exact : DominanceMode::floating;
  const FactorLayout layout = narrow(f) ? FactorLayout::banded : FactorLayout::dense;
  return make_rrd_step(accurate_ldu(dd_from_assembled(f, dm), layout));
}

struct UserSystem {
  SplitSystem sys;
  bool symmetric = false;
};

/// Builds the split system for a user matrix and preconditioner files.
UserSystem user_system(const SparseMatrix& a, Vector b, const std::vector<std::string>& precond,
                       const std::string& diag, const std::string& explicit_inverse, double alpha,
                       const std::string& k_path, bool baseline) {
  const std::size_t n = a.rows();
  std::vector<SolveStep> chain;
  std::optional<SparseMatrix> m_assembled;
  bool k_zero = false;
  if (!diag.empty()) {
    const Vector d = mm_read_vector(diag);
    chain.push_back(make_diagonal_step(d));
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < d.size(); ++i) t.push_back({i, i, d[i]});
    m_assembled = SparseMatrix::from_triplets(d.size(), d.size(), std::move(t)).scaled(alpha);
  } else if (!explicit_inverse.empty()) {
    const SparseMatrix x = mm_read(explicit_inverse);
    chain.push_back(make_explicit_inverse_step(x.to_dense()));
  } else {
    std::vector<SparseMatrix> fs;
    if (precond.empty()) {
      fs.push_back(a);
      k_zero = alpha == 1.0;
    } else {
      for (const auto& path : precond) fs.push_back(mm_read(path));
    }
    for (const auto& f : fs) chain.push_back(baseline ? make_chol_step(f.to_band()) : rrd_step_for(f));
    m_assembled = product_assembled(fs, alpha);
  }
  PrecondHandle h(alpha, std::move(chain));
  if (h.size() != n) throw DimensionMismatch("preconditioner and matrix sizes differ");

  UserSystem out{SplitSystem{}, a.is_symmetric()};
  if (!k_path.empty()) {
    out.sys = make_split_system(std::move(h), mm_read(k_path), std::move(b), m_assembled, a);
  } else if (k_zero) {
    out.sys = make_split_system(std::move(h), SparseMatrix(n, n), std::move(b), m_assembled, a);
  } else {
    if (!m_assembled) throw Error("an explicit-inverse preconditioner needs K given with --k");
    out.sys = split_from(a, *m_assembled, std::move(h), std::move(b));
  }
  return out;
}

}  // namespace

std::string to_string(Mode m) {
  switch (m) {
    case Mode::plain: return "plain";
    case Mode::baseline: return "baseline";
    case Mode::accurate: return "accurate";
  }
  return "?";
}

Mode parse_mode(const std::string& s) {
  if (s == "plain") return Mode::plain;
  if (s == "baseline") return Mode::baseline;
  if (s == "accurate") return Mode::accurate;
  throw Error("unknown mode '" + s + "'");
}

std::vector<Mode> parse_modes(const std::string& s) {
  if (s == "all") return {Mode::plain, Mode::baseline, Mode::accurate};
  std::vector<Mode> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_mode(item));
  if (out.empty()) throw Error("empty mode list");
  return out;
}

double parse_number(const std::string& s) {
  const auto caret = s.find('^');
  std::size_t used = 0;
  if (caret == std::string::npos) {
    const double v = std::stod(s, &used);
    if (used != s.size()) throw Error("malformed number '" + s + "'");
    return v;
  }
  const std::string base_s = s.substr(0, caret);
  const std::string exp_s = s.substr(caret + 1);
  double base = std::stod(base_s, &used);
  if (used != base_s.size()) throw Error("malformed number '" + s + "'");
  const double e = std::stod(exp_s, &used);
  if (used != exp_s.size()) throw Error("malformed number '" + s + "'");
  const double sign = base < 0.0 ? -1.0 : 1.0;
  return sign * std::pow(std::abs(base), e);
}

std::vector<double> parse_number_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(parse_number(item));
    } catch (const std::logic_error&) {
      throw Error("malformed number '" + item + "'");
    }
  }
  return out;
}

bool is_eigen_family(const std::string& family) { return family == "ex3" || family == "ex4"; }

ExperimentConfig with_defaults(ExperimentConfig cfg) {
  if (cfg.family == "ex1") {
    if (cfg.n == 0) cfg.n = 8191;
    if (cfg.params.empty()) cfg.params = {10, 100, 1000};
  } else if (cfg.family == "ex2") {
    if (cfg.n == 0) cfg.n = 1023;
    if (cfg.params.empty()) cfg.params = {10, -100, 1000, -10000, 100000, -1000000, 10000000};
  } else if (cfg.family == "ex3") {
    if (cfg.params.empty()) cfg.params = {1.0};
  } else if (cfg.family == "ex4") {
    if (cfg.n == 0) cfg.n = 4095;
    if (cfg.params.empty()) cfg.params = {1, -100};
  } else {
    throw Error("unknown experiment family '" + cfg.family + "'");
  }
  return cfg;
}

ExperimentResult run_experiment(const ExperimentConfig& in) {
  const ExperimentConfig cfg = with_defaults(in);
  ExperimentResult out;
  if (cfg.family == "ex1" || cfg.family == "ex2") {
    if (cfg.n < 3) throw Error("n must be at least 3");
    for (double g : cfg.params) run_linear(cfg, g, out);
  } else if (cfg.family == "ex3") {
    if (!(cfg.hmin > 0.0) || cfg.hmin > 0x1p-6) throw Error("hmin must lie in (0, 2^-6]");
    for (double gamma : cfg.params) {
      if (!(gamma > 0.0)) throw Error("gamma must be positive for ex3");
      for (double h = 0x1p-6; h >= cfg.hmin * (1.0 - 1e-12); h /= 4.0) {
        const double np1 = std::round(gamma / h);
        if (np1 < 4.0) continue;
        const TestProblem p = gen_ex3(static_cast<std::size_t>(np1) - 1, gamma);
        run_eigen_case(cfg, p, exact_eig_cd(gamma, 1), out);
      }
    }
  } else {
    if (cfg.n < 3) throw Error("n must be at least 3");
    for (double rho : cfg.params) {
      const TestProblem p = gen_ex4(cfg.n, integer_param(rho, "rho"));
      run_eigen_case(cfg, p, exact_eig_biharm_absmin(cfg.n, rho), out);
    }
  }
  return out;
}

std::string format_table(const std::string& family, const std::vector<ExperimentRow>& rows,
                         OutputFormat style) {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> cells;
  if (is_eigen_family(family)) {
    header = {"family", "n",        "param",      "h",         "mode",        "lambda_exact",
              "lambda", "rel_err", "iterations", "converged", "lambda_full", "rel_err_full"};
    for (const auto& r : rows)
      cells.push_back({r.family, std::to_string(r.n), num(r.param), num(r.h), to_string(r.mode),
                       num(r.lambda_exact), num(r.lambda), num(r.rel_err), std::to_string(r.iterations),
                       r.converged ? "true" : "false", full(r.lambda), full(r.rel_err)});
  } else {
    header = {"family", "n",          "param",     "mode",        "kappaA",      "eta_ie",     "eta_rel",
              "kappaB", "rho",        "iterations", "converged", "eta_ie_full", "eta_rel_full"};
    for (const auto& r : rows)
      cells.push_back({r.family, std::to_string(r.n), num(r.param), to_string(r.mode), opt(r.kappaA),
                       num(r.eta_ie), num(r.eta_rel), opt(r.kappaB), num(r.rho),
                       std::to_string(r.iterations), r.converged ? "true" : "false", full(r.eta_ie),
                       full(r.eta_rel)});
  }
  std::string out;
  auto emit = [&](const std::vector<std::string>& line) {
    if (style == OutputFormat::csv) {
      out += fmt::format("{}\n", fmt::join(line, ","));
    } else {
      out += fmt::format("| {} |\n", fmt::join(line, " | "));
    }
  };
  emit(header);
  if (style == OutputFormat::markdown) emit(std::vector<std::string>(header.size(), "---"));
  for (const auto& c : cells) emit(c);
  return out;
}

SolveOutcome run_solve(const SolveConfig& cfg, std::ostream& diag) {
  const SparseMatrix a = mm_read(cfg.matrix);
  if (a.rows() != a.cols()) throw DimensionMismatch("matrix must be square");
  Vector b = cfg.rhs.empty() ? spmv(a, Vector(a.rows(), 1.0)) : mm_read_vector(cfg.rhs);
  if (b.size() != a.rows()) throw DimensionMismatch("right-hand side length differs from matrix size");
  const UserSystem us = user_system(a, std::move(b), cfg.precond, cfg.diag, cfg.explicit_inverse, cfg.alpha,
                                    cfg.k, cfg.baseline);
  SystemSolveReport r;
  if (cfg.method == "direct") {
    r = solve_direct(us.sys);
  } else {
    KrylovConfig kc;
    kc.tol = cfg.tol;
    kc.restart = cfg.restart;
    kc.maxit = cfg.maxit;
    kc.rr_policy = cfg.replace ? ReplacementPolicy::simple : ReplacementPolicy::off;
    r = solve_iterative(us.sys, parse_method(cfg.method), kc);
  }
  fmt::print(diag, "n={} method={} iterations={} converged={} replacements={}\n", a.rows(), cfg.method,
             r.iterations, r.converged, r.replacements);
  fmt::print(diag, "residual(B)={:.3e} residual(A)={:.3e} rho={:.3e}\n", r.true_residual,
             r.original_residual, r.rho);
  if (r.kappa1_B) fmt::print(diag, "kappa1(B)={:.3e}\n", *r.kappa1_B);
  return SolveOutcome{r.x, r.converged, r.iterations, r.original_residual};
}

RrdFactors run_factor(const FactorConfig& cfg, std::ostream& out, std::ostream& diag) {
  const SparseMatrix a = cfg.laplacian > 0 ? SparseMatrix::from_band(gen_T(cfg.laplacian)) : mm_read(cfg.matrix);
  const DDRep rep = dd_from_assembled(a, cfg.floating ? DominanceMode::floating : DominanceMode::exact);
  LduTrace trace;
  const FactorLayout layout = cfg.dense ? FactorLayout::dense : FactorLayout::banded;
  RrdFactors f = accurate_ldu(rep, layout, &trace);
  const FactorDiagnostics d = factor_diagnostics(f);
  fmt::print(diag, "n={} layout={} min_dominance={:.3e} kappa1(L)={:.3e} kappa1(U)={:.3e}\n", f.size(),
             cfg.dense ? "dense" : "banded", trace.min_dominance, d.kappa1_L, d.kappa1_U);
  if (cfg.prefix.empty()) {
    for (double x : f.D) fmt::print(out, "{:.17g}\n", x);
  } else {
    mm_write(SparseMatrix::from_band(f.L), cfg.prefix + "L.mtx");
    mm_write_vector(f.D, cfg.prefix + "D.mtx");
    mm_write(SparseMatrix::from_band(f.U), cfg.prefix + "U.mtx");
  }
  return f;
}

std::vector<EigReport> run_eig(const EigConfig& cfg, std::ostream& out, std::ostream& diag) {
  ApplyFn apply;
  std::size_t n = 0;
  std::optional<double> exact;
  auto stats = std::make_shared<InnerStats>();
  std::shared_ptr<UserSystem> us;

  if (!cfg.family.empty()) {
    TestProblem p;
    if (cfg.family == "ex3") {
      std::size_t dim = cfg.n;
      if (cfg.h > 0.0) dim = static_cast<std::size_t>(std::round(cfg.param / cfg.h)) - 1;
      if (dim < 3) throw Error("ex3 needs n >= 3 (set --n or --h)");
      p = gen_ex3(dim, cfg.param);
      exact = exact_eig_cd(cfg.param, 1);
    } else if (cfg.family == "ex4") {
      if (cfg.n < 3) throw Error("ex4 needs --n >= 3");
      p = gen_ex4(cfg.n, integer_param(cfg.param, "rho"));
      exact = exact_eig_biharm_absmin(cfg.n, cfg.param);
    } else {
      throw Error("eig supports the ex3 and ex4 families or a matrix file");
    }
    n = p.n;
    apply = inverse_apply(p, cfg.mode, eigen_method(cfg.method, p), cfg.tol, stats);
  } else {
    const SparseMatrix a = mm_read(cfg.matrix);
    n = a.rows();
    if (cfg.mode == Mode::plain) {
      apply = plain_solver(a);
    } else {
      us = std::make_shared<UserSystem>(user_system(a, Vector(n, 0.0), cfg.precond, "", "", cfg.alpha, cfg.k,
                                                    cfg.mode == Mode::baseline));
      const KrylovMethod method = cfg.method == "auto" ? (us->symmetric ? KrylovMethod::minres : KrylovMethod::gmres)
                                                       : parse_method(cfg.method);
      KrylovConfig kc;
      kc.tol = cfg.tol;
      apply = [us, method, kc, stats](const Vector& v) {
        const SystemSolveReport r = solve_iterative(us->sys, v, method, kc);
        ++stats->solves;
        stats->iterations += r.iterations;
        stats->all_converged = stats->all_converged && r.converged;
        return r.x;
      };
    }
  }

  std::vector<EigReport> reps;
  if (cfg.lanczos) {
    LanczosConfig lc;
    lc.tol = cfg.tol;
    reps = lanczos_smallest(apply, ones_start(n), cfg.k_eigs, lc);
  } else {
    InverseIterationConfig ic;
    ic.tol = cfg.tol;
    ic.maxit = cfg.maxit;
    reps.push_back(inverse_iteration(apply, ones_start(n), ic));
  }
  for (auto& r : reps) r.converged = r.converged && stats->all_converged;

  fmt::print(diag, "n={} inner_solves={} inner_iterations={}\n", n, stats->solves, stats->iterations);
  for (const auto& r : reps) {
    fmt::print(out, "lambda={:.17g} theta={:.17g} residual={:.3e} iterations={} converged={}", r.lambda,
               r.theta, r.residual, r.iterations, r.converged);
    if (exact) fmt::print(out, " exact={:.17g} rel_err={:.3e}", *exact, std::abs(r.lambda - *exact) / std::abs(*exact));
    fmt::print(out, "\n");
  }
  return reps;
}

}  // namespace accprec::cli
