#include <fmt/format.h>

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "accprec/errors.hpp"
#include "accprec/matrix_market.hpp"
#include "runner.hpp"

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kIo = 2, kSolver = 3, kUnconverged = 4 };

using namespace accprec;
using namespace accprec::cli;

/// Options given in a key=value file apply unless the command line set them.
void apply_config_file(CLI::App& sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  for (const CLI::ConfigItem& item : CLI::ConfigINI().from_config(in)) {
    if (item.name == "config") continue;
    CLI::Option* opt = sub.get_option_no_throw("--" + item.name);
    if (opt == nullptr) opt = sub.get_option_no_throw(item.name);
    if (opt == nullptr) throw CLI::ConfigError::Extras(item.fullname());
    if (opt->count() > 0) continue;
    if (item.inputs.size() > 1 && opt->get_items_expected_max() == 1) {
      std::string joined = item.inputs.front();
      for (std::size_t i = 1; i < item.inputs.size(); ++i) joined += "," + item.inputs[i];
      opt->add_result(joined);
    } else {
      opt->add_result(item.inputs);
    }
    opt->run_callback();
  }
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw IoError("cannot write " + path);
  return file;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Accurate preconditioning for ill-conditioned linear systems and eigenvalues"};
  app.require_subcommand(1);

  // experiment
  auto* exp = app.add_subcommand("experiment", "Reproduce an accuracy table for ex1, ex2, ex3 or ex4");
  ExperimentConfig ecfg;
  std::string exp_params, exp_modes = "all", exp_format = "csv", exp_output, exp_config, exp_hmin;
  bool no_kappa = false;
  exp->add_option("family", ecfg.family, "ex1 | ex2 | ex3 | ex4")->check(CLI::IsMember({"ex1", "ex2", "ex3", "ex4"}));
  exp->add_option("--n", ecfg.n, "Dimension (ex1, ex2, ex4)");
  exp->add_option("--gamma,--rho,--params", exp_params, "Comma-separated parameter list, e.g. 10,-10^6");
  exp->add_option("--seed", ecfg.seed, "Seed for random data")->capture_default_str();
  exp->add_option("--mode", exp_modes, "all or a list of plain, baseline, accurate")->capture_default_str();
  exp->add_option("--method", ecfg.method, "auto | gmres | cg | minres | direct")->capture_default_str();
  exp->add_option("--tol", ecfg.tol, "Relative residual tolerance (default sqrt(n) u)");
  exp->add_option("--hmin", exp_hmin, "Finest ex3 mesh size, e.g. 2^-14");
  exp->add_option("--density", ecfg.density, "Density of the ex2 random matrix")->capture_default_str();
  exp->add_flag("--no-kappa", no_kappa, "Skip condition number estimates");
  exp->add_option("--format", exp_format, "csv | markdown")->check(CLI::IsMember({"csv", "markdown"}));
  exp->add_option("--output,-o", exp_output, "Output file (default stdout)");
  exp->add_option("--config", exp_config, "key=value file with defaults for these options");

  // solve
  auto* sol = app.add_subcommand("solve", "Solve A x = b by accurate preconditioning");
  SolveConfig scfg;
  std::string sol_precond, sol_config;
  sol->add_option("--matrix,-A", scfg.matrix, "Matrix Market file with A");
  sol->add_option("--rhs,-b", scfg.rhs, "Matrix Market n x 1 right-hand side (default A * ones)");
  sol->add_option("--precond", sol_precond, "Comma-separated dominant factors of M = alpha F1 F2 ... (default A)");
  sol->add_option("--diag", scfg.diag, "Diagonal preconditioner as an n x 1 Matrix Market file");
  sol->add_option("--explicit-inverse", scfg.explicit_inverse, "Matrix Market file holding F^{-1}");
  sol->add_option("--alpha", scfg.alpha, "Scalar factor of M")->capture_default_str();
  sol->add_option("--k", scfg.k, "Matrix Market file with K = A - M");
  sol->add_flag("--baseline", scfg.baseline, "Use banded Cholesky for the factors instead of accurate LDU");
  sol->add_option("--method", scfg.method, "gmres | cg | minres | direct")
      ->check(CLI::IsMember({"gmres", "cg", "minres", "direct"}))
      ->capture_default_str();
  sol->add_option("--tol", scfg.tol, "Relative residual tolerance (default sqrt(n) u)");
  sol->add_option("--restart", scfg.restart, "GMRES restart length")->capture_default_str();
  sol->add_option("--maxit", scfg.maxit, "Iteration cap")->capture_default_str();
  sol->add_flag("--replace", scfg.replace, "Enable residual replacement");
  sol->add_option("--output,-o", scfg.output, "Write x as a Matrix Market vector (default stdout)");
  sol->add_option("--config", sol_config, "key=value file with defaults for these options");

  // factor
  auto* fac = app.add_subcommand("factor", "Accurate LDU factorization of a diagonally dominant matrix");
  FactorConfig fcfg;
  std::string fac_config;
  auto* fac_matrix = fac->add_option("--matrix,-A", fcfg.matrix, "Matrix Market file");
  auto* fac_lap = fac->add_option("--laplacian", fcfg.laplacian, "Factor tridiag(-1, 2, -1) of this size instead");
  fac_matrix->excludes(fac_lap);
  fac->add_option("--prefix", fcfg.prefix, "Write <prefix>L.mtx, <prefix>D.mtx, <prefix>U.mtx");
  fac->add_flag("--floating", fcfg.floating, "Accept non-integer data (accuracy guarantee void)");
  fac->add_flag("--dense", fcfg.dense, "Dense factor storage");
  fac->add_option("--config", fac_config, "key=value file with defaults for these options");

  // eig
  auto* eig = app.add_subcommand("eig", "Smallest-magnitude eigenvalues by inverse iteration");
  eig->set_help_flag("--help", "Print this help message and exit");
  EigConfig gcfg;
  std::string eig_precond, eig_mode = "accurate", eig_h, eig_config;
  eig->add_option("family", gcfg.family, "ex3 | ex4 (omit with --matrix)");
  eig->add_option("--matrix,-A", gcfg.matrix, "Matrix Market file with A");
  eig->add_option("--precond", eig_precond, "Comma-separated dominant factors of M (default A)");
  eig->add_option("--alpha", gcfg.alpha, "Scalar factor of M")->capture_default_str();
  eig->add_option("--k", gcfg.k, "Matrix Market file with K = A - M");
  eig->add_option("--n", gcfg.n, "Dimension for a family");
  eig->add_option("--gamma,--rho,--param", gcfg.param, "Family parameter")->capture_default_str();
  eig->add_option("--h", eig_h, "ex3 mesh size, e.g. 2^-10");
  eig->add_option("--mode", eig_mode, "plain | baseline | accurate")->capture_default_str();
  eig->add_option("--method", gcfg.method, "auto | gmres | cg | minres")->capture_default_str();
  eig->add_option("--tol", gcfg.tol, "Residual tolerance (default sqrt(n) u)");
  eig->add_option("--maxit", gcfg.maxit, "Iteration cap")->capture_default_str();
  eig->add_option("--count", gcfg.k_eigs, "Number of eigenvalues (Lanczos)")->capture_default_str();
  eig->add_flag("--lanczos", gcfg.lanczos, "Use Lanczos with full reorthogonalization");
  eig->add_option("--config", eig_config, "key=value file with defaults for these options");

  try {
    app.parse(argc, argv);
    if (exp->parsed() && !exp_config.empty()) apply_config_file(*exp, exp_config);
    if (sol->parsed() && !sol_config.empty()) apply_config_file(*sol, sol_config);
    if (fac->parsed() && !fac_config.empty()) apply_config_file(*fac, fac_config);
    if (eig->parsed() && !eig_config.empty()) apply_config_file(*eig, eig_config);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  } catch (const IoError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kIo;
  }

  try {
    if (exp->parsed()) {
      if (ecfg.family.empty()) throw CLI::RequiredError("family");
      try {
        ecfg.params = parse_number_list(exp_params);
        ecfg.modes = parse_modes(exp_modes);
        if (!exp_hmin.empty()) ecfg.hmin = parse_number(exp_hmin);
      } catch (const accprec::Error& e) {
        throw CLI::ValidationError("experiment", e.what());
      }
      ecfg.estimate_kappa = !no_kappa;
      const ExperimentResult r = run_experiment(ecfg);
      std::ofstream file;
      std::ostream& out = open_output(exp_output, file);
      out << format_table(ecfg.family, r.rows,
                          exp_format == "markdown" ? OutputFormat::markdown : OutputFormat::csv);
      return r.all_converged ? kOk : kUnconverged;
    }
    if (sol->parsed()) {
      if (scfg.matrix.empty()) throw CLI::RequiredError("--matrix");
      scfg.precond = sol_precond.empty() ? std::vector<std::string>{} : CLI::detail::split(sol_precond, ',');
      const SolveOutcome r = run_solve(scfg, std::cerr);
      if (scfg.output.empty() || scfg.output == "-") {
        mm_write_vector(r.x, std::cout);
      } else {
        mm_write_vector(r.x, scfg.output);
      }
      return r.converged ? kOk : kUnconverged;
    }
    if (fac->parsed()) {
      if (fcfg.matrix.empty() && fcfg.laplacian == 0) throw CLI::RequiredError("--matrix or --laplacian");
      run_factor(fcfg, std::cout, std::cerr);
      return kOk;
    }
    if (eig->parsed()) {
      if (gcfg.family.empty() == gcfg.matrix.empty())
        throw CLI::ValidationError("eig", "give exactly one of a family or --matrix");
      gcfg.precond = eig_precond.empty() ? std::vector<std::string>{} : CLI::detail::split(eig_precond, ',');
      try {
        gcfg.mode = parse_mode(eig_mode);
        if (!eig_h.empty()) gcfg.h = parse_number(eig_h);
      } catch (const accprec::Error& e) {
        throw CLI::ValidationError("eig", e.what());
      }
      const auto reps = run_eig(gcfg, std::cout, std::cerr);
      for (const auto& r : reps)
        if (!r.converged) return kUnconverged;
      return kOk;
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  } catch (const IoError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kIo;
  } catch (const accprec::ParseError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kIo;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kSolver;
  }
  return kOk;
}
