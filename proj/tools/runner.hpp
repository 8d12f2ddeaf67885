#pragma once

// Experiment tables and matrix-file utilities behind the accprec command line.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "accprec/eigs.hpp"
#include "accprec/precond.hpp"

namespace accprec::cli {

enum class Mode { plain, baseline, accurate };
enum class OutputFormat { csv, markdown };

std::string to_string(Mode m);
Mode parse_mode(const std::string& s);
/// "all" expands to plain, baseline, accurate.
std::vector<Mode> parse_modes(const std::string& s);
/// Accepts plain numbers and powers such as 2^-14 or -10^6.
double parse_number(const std::string& s);
std::vector<double> parse_number_list(const std::string& s);

struct ExperimentConfig {
  std::string family;
  std::size_t n = 0;
  /// gamma (ex1-ex3) or rho (ex4).
  std::vector<double> params;
  std::uint64_t seed = 7;
  std::vector<Mode> modes{Mode::plain, Mode::baseline, Mode::accurate};
  /// auto, gmres, cg, minres or direct.
  std::string method = "auto";
  /// Krylov and inverse-iteration tolerance; 0 selects sqrt(n) * u.
  double tol = 0.0;
  /// ex3: finest mesh, h runs over 2^-6, 2^-8, ... down to hmin.
  double hmin = 0x1p-14;
  double density = 0.001;
  bool estimate_kappa = true;
};

/// Fills in the family defaults for unset fields.
ExperimentConfig with_defaults(ExperimentConfig cfg);

struct ExperimentRow {
  std::string family;
  std::size_t n = 0;
  double param = 0.0;
  double h = 0.0;
  Mode mode = Mode::plain;
  // Linear-system families.
  std::optional<double> kappaA;
  double eta_ie = 0.0;
  double eta_rel = 0.0;
  std::optional<double> kappaB;
  double rho = 0.0;
  // Eigenvalue families.
  double lambda_exact = 0.0;
  double lambda = 0.0;
  double rel_err = 0.0;

  std::size_t iterations = 0;
  bool converged = true;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  /// Every accurate-mode solve converged; other modes are only flagged per row.
  bool all_converged = true;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

bool is_eigen_family(const std::string& family);
std::string format_table(const std::string& family, const std::vector<ExperimentRow>& rows,
                         OutputFormat style);

/// Solves A x = b by accurate preconditioning.
struct SolveConfig {
  std::string matrix;
  /// Matrix Market vector; empty selects b = A * ones.
  std::string rhs;
  /// Diagonally dominant factors of M = alpha * F_1 * F_2 ...; empty uses A itself.
  std::vector<std::string> precond;
  std::string diag;
  std::string explicit_inverse;
  double alpha = 1.0;
  /// K given directly; otherwise K = A - M for integer data.
  std::string k;
  bool baseline = false;
  std::string method = "gmres";
  double tol = 0.0;
  std::size_t restart = 50;
  std::size_t maxit = 5000;
  bool replace = false;
  std::string output;
};

struct SolveOutcome {
  Vector x;
  bool converged = false;
  std::size_t iterations = 0;
  double original_residual = 0.0;
};

SolveOutcome run_solve(const SolveConfig& cfg, std::ostream& diag);

struct FactorConfig {
  std::string matrix;
  /// When nonzero, factors tridiag(-1, 2, -1) of this size instead of reading a file.
  std::size_t laplacian = 0;
  /// Writes <prefix>L.mtx, <prefix>D.mtx and <prefix>U.mtx; empty prints D only.
  std::string prefix;
  bool floating = false;
  bool dense = false;
};

RrdFactors run_factor(const FactorConfig& cfg, std::ostream& out, std::ostream& diag);

struct EigConfig {
  /// Either a family (ex3, ex4) or a matrix path.
  std::string family;
  std::string matrix;
  std::vector<std::string> precond;
  double alpha = 1.0;
  std::string k;
  std::size_t n = 0;
  double param = 1.0;
  double h = 0.0;
  Mode mode = Mode::accurate;
  std::string method = "auto";
  double tol = 0.0;
  std::size_t maxit = 1000;
  std::size_t k_eigs = 1;
  bool lanczos = false;
};

std::vector<EigReport> run_eig(const EigConfig& cfg, std::ostream& out, std::ostream& diag);

}  // namespace accprec::cli
