#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <regex>
#include <sstream>

#include "accprec/dd_factor.hpp"
#include "accprec/ie_solve.hpp"
#include "accprec/matrix_market.hpp"
#include "accprec/testbed.hpp"
#include "runner.hpp"
#include "test_helpers.hpp"

using namespace accprec;
using namespace accprec::cli;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    Xoshiro256 rng(static_cast<std::uint64_t>(::getpid()));
    path_ = fs::temp_directory_path() / ("accprec_cli_" + std::to_string(rng.next()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_cli(const std::string& args, const fs::path& out = "/dev/null") {
  const std::string cmd = std::string("\"") + ACCPREC_CLI_PATH + "\" " + args + " > \"" + out.string() + "\" 2>/dev/null";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

double field(const std::string& text, const std::string& key) {
  const std::regex re(key + "=([-+0-9.eE]+)");
  std::smatch m;
  REQUIRE(std::regex_search(text, m, re));
  return std::stod(m[1].str());
}

}  // namespace

TEST_CASE("parse_number", "[cli]") {
  CHECK(parse_number("2^-14") == 0x1p-14);
  CHECK(parse_number("-10^6") == -1e6);
  CHECK(parse_number("1e3") == 1000.0);
  CHECK(parse_number("-100") == -100.0);
  CHECK_THROWS(parse_number("abc"));
  CHECK_THROWS(parse_number("10^x"));
  CHECK_THROWS(parse_number("3.5z"));
  CHECK(parse_number_list("10,-10^2,,1e3") == std::vector<double>{10, -100, 1000});
  CHECK(parse_modes("all") == std::vector<Mode>{Mode::plain, Mode::baseline, Mode::accurate});
  CHECK(parse_modes("accurate") == std::vector<Mode>{Mode::accurate});
  CHECK_THROWS(parse_modes("fast"));
}

TEST_CASE("experiment tables are deterministic", "[cli][property]") {
  ExperimentConfig cfg;
  cfg.family = "ex2";
  cfg.n = 127;
  cfg.params = {1000, -1000000};
  cfg.seed = 3;
  cfg.density = 0.01;
  const ExperimentResult a = run_experiment(cfg);
  const ExperimentResult b = run_experiment(cfg);
  REQUIRE(a.rows.size() == 6);
  const std::string ta = format_table("ex2", a.rows, OutputFormat::csv);
  CHECK(ta == format_table("ex2", b.rows, OutputFormat::csv));

  std::istringstream lines(ta);
  std::string header;
  std::getline(lines, header);
  CHECK(header ==
        "family,n,param,mode,kappaA,eta_ie,eta_rel,kappaB,rho,iterations,converged,eta_ie_full,eta_rel_full");
  std::size_t count = 0;
  for (std::string line; std::getline(lines, line);) {
    ++count;
    CHECK(std::count(line.begin(), line.end(), ',') == 12);
  }
  CHECK(count == 6);

  const std::string md = format_table("ex2", a.rows, OutputFormat::markdown);
  CHECK(md.rfind("| family | n |", 0) == 0);

  cfg.seed = 4;
  CHECK(format_table("ex2", run_experiment(cfg).rows, OutputFormat::csv) != ta);
}

TEST_CASE("experiment ex1 rows", "[cli]") {
  ExperimentConfig cfg;
  cfg.family = "ex1";
  cfg.n = 1023;
  cfg.params = {10, 100};
  const ExperimentResult r = run_experiment(cfg);
  CHECK(r.all_converged);
  REQUIRE(r.rows.size() == 6);
  for (const auto& row : r.rows) {
    if (row.mode != Mode::accurate) continue;
    CHECK(row.eta_ie <= 1e-13);
    CHECK(row.kappaB.has_value());
  }
}

TEST_CASE("experiment ex4 with indefinite rho", "[cli]") {
  ExperimentConfig cfg;
  cfg.family = "ex4";
  cfg.n = 4095;
  cfg.params = {-100};
  cfg.modes = {Mode::accurate};
  const ExperimentResult r = run_experiment(cfg);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].rel_err <= 1e-11);
  CHECK(std::abs(r.rows[0].lambda + 2.5909) <= 1e-3);
}

TEST_CASE("solve with M = A returns the accurate factor solve", "[cli]") {
  TempDir dir;
  Xoshiro256 rng(17);
  const SparseMatrix a = test::random_dd_integer(25, rng);
  const Vector b = test::random_vector(25, rng);
  mm_write(a, dir / "A.mtx");
  mm_write_vector(b, dir / "b.mtx");
  const Vector want = rrd_solve(accurate_ldu(dd_from_assembled(a, DominanceMode::exact)), b);

  SolveConfig cfg;
  cfg.matrix = (dir / "A.mtx").string();
  cfg.rhs = (dir / "b.mtx").string();
  std::ostringstream diag;
  for (const std::string method : {"gmres", "direct"}) {
    cfg.method = method;
    const SolveOutcome r = run_solve(cfg, diag);
    CHECK(r.converged);
    CHECK(r.x == want);
  }

  CHECK(run_cli("solve -A \"" + (dir / "A.mtx").string() + "\" -b \"" + (dir / "b.mtx").string() + "\" -o \"" +
                (dir / "x.mtx").string() + "\"") == 0);
  CHECK(mm_read_vector(dir / "x.mtx") == want);
}

TEST_CASE("factor on T10", "[cli]") {
  FactorConfig cfg;
  cfg.laplacian = 10;
  std::ostringstream out;
  std::ostringstream diag;
  const RrdFactors f = run_factor(cfg, out, diag);
  std::istringstream lines(out.str());
  std::size_t k = 1;
  for (std::string line; std::getline(lines, line); ++k)
    CHECK(test::rel_entry(std::stod(line), static_cast<double>(k + 1) / static_cast<double>(k)) <= 1e-15);
  CHECK(k == 11);
  CHECK(f.D.size() == 10);

  TempDir dir;
  const std::string prefix = (dir / "t10_").string();
  CHECK(run_cli("factor --laplacian 10 --prefix \"" + prefix + "\"") == 0);
  const Vector d = mm_read_vector(prefix + "D.mtx");
  CHECK(d == f.D);
  CHECK(mm_read(prefix + "L.mtx").to_dense().data() == f.L.to_dense().data());
  CHECK(mm_read(prefix + "U.mtx").to_dense().data() == f.U.to_dense().data());
}

TEST_CASE("eig on example 3", "[cli]") {
  auto run = [](double h) {
    EigConfig cfg;
    cfg.family = "ex3";
    cfg.param = 1.0;
    cfg.h = h;
    std::ostringstream out;
    std::ostringstream diag;
    const auto reps = run_eig(cfg, out, diag);
    REQUIRE(reps.size() == 1);
    CHECK(reps[0].converged);
    return std::make_pair(reps[0].lambda, out.str());
  };
  const double exact = 0.25 + std::numbers::pi * std::numbers::pi;
  const auto [coarse, coarse_text] = run(0x1p-6);
  const auto [fine, fine_text] = run(0x1p-10);
  CHECK(field(fine_text, "exact") == Catch::Approx(exact).epsilon(1e-15));
  // Error constant from the coarse mesh predicts the fine-mesh error.
  const double predicted = std::abs(coarse - exact) / 256.0;
  const double err = std::abs(fine - exact);
  CHECK(err >= predicted / 1.5);
  CHECK(err <= predicted * 1.5);
  CHECK(field(fine_text, "rel_err") == Catch::Approx(err / exact).epsilon(1e-3));

  TempDir dir;
  CHECK(run_cli("eig ex3 --h 2^-10", dir / "eig.txt") == 0);
  CHECK(field(slurp(dir / "eig.txt"), "lambda") == fine);
}

TEST_CASE("byte-identical CSV from the executable", "[cli][property]") {
  TempDir dir;
  const std::string args = "experiment ex2 --n 255 --gamma 1000,-10^6 --seed 11 --density 0.01 --mode all";
  CHECK(run_cli(args + " -o \"" + (dir / "a.csv").string() + "\"") == 0);
  CHECK(run_cli(args + " -o \"" + (dir / "b.csv").string() + "\"") == 0);
  const std::string a = slurp(dir / "a.csv");
  CHECK(!a.empty());
  CHECK(a == slurp(dir / "b.csv"));
  CHECK(run_cli(args, dir / "c.csv") == 0);
  CHECK(slurp(dir / "c.csv") == a);

  std::ofstream(dir / "cfg.txt") << "n=255\ngamma=1000,-10^6\nseed=11\ndensity=0.01\nmode=all\n";
  CHECK(run_cli("experiment ex2 --config \"" + (dir / "cfg.txt").string() + "\"", dir / "d.csv") == 0);
  CHECK(slurp(dir / "d.csv") == a);
}

TEST_CASE("exit codes", "[cli]") {
  TempDir dir;
  SECTION("usage errors") {
    CHECK(run_cli("") == 1);
    CHECK(run_cli("frobnicate") == 1);
    CHECK(run_cli("experiment ex1 --gamma abc") == 1);
    CHECK(run_cli("experiment ex9") == 1);
    CHECK(run_cli("eig") == 1);
    CHECK(run_cli("--help") == 0);
  }
  SECTION("I/O and parse errors") {
    CHECK(run_cli("solve -A \"" + (dir / "missing.mtx").string() + "\"") == 2);
    std::ofstream(dir / "bad.mtx") << "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 x 3\n";
    CHECK(run_cli("factor -A \"" + (dir / "bad.mtx").string() + "\"") == 2);
    CHECK(run_cli("experiment ex1 --n 15 --gamma 1 --config \"" + (dir / "none.txt").string() + "\"") == 2);
  }
  SECTION("solver errors") {
    mm_write(SparseMatrix::from_dense(DenseMatrix(2, 2, {1, -2, 0, 1})), dir / "nondd.mtx");
    CHECK(run_cli("factor -A \"" + (dir / "nondd.mtx").string() + "\"") == 3);
  }
  SECTION("converged and unconverged solves") {
    const std::size_t n = 63;
    mm_write(*gen_ex1(n, 10).A, dir / "A10.mtx");
    mm_write(*gen_ex1(n, 1000).A, dir / "A1000.mtx");
    mm_write(SparseMatrix::from_band(gen_T(n)), dir / "T.mtx");
    auto args = [&](const std::string& a) {
      return "solve -A \"" + (dir / a).string() + "\" --precond \"" + (dir / "T.mtx").string() + "\" --alpha 128";
    };
    CHECK(run_cli(args("A10.mtx")) == 0);
    CHECK(run_cli(args("A10.mtx") + " --maxit 1") == 4);
    CHECK(run_cli(args("A1000.mtx") + " --maxit 1") == 4);
  }
}
