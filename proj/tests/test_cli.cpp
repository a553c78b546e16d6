#include "cli.hpp"
#include "ecofire/errors.hpp"
#include "ecofire/stability.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace ecofire;
using namespace ecofire::cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

using Row = std::vector<std::string>;

std::vector<Row> parse_csv(const std::string& text) {
  std::vector<Row> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    Row row;
    std::string cell;
    std::istringstream cells(line);
    while (std::getline(cells, cell, ',')) row.push_back(cell);
    if (!line.empty() && line.back() == ',') row.emplace_back();
    rows.push_back(row);
  }
  return rows;
}

std::size_t column(const Row& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  FAIL("no column " << name);
  return 0;
}

std::vector<double> numeric_column(const std::vector<Row>& rows, const std::string& name) {
  const std::size_t c = column(rows.at(0), name);
  std::vector<double> out;
  for (std::size_t i = 1; i < rows.size(); ++i) out.push_back(std::stod(rows[i].at(c)));
  return out;
}

int sign_changes(const std::vector<double>& xs) {
  int n = 0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if ((xs[i - 1] > 0.0) != (xs[i] > 0.0)) ++n;
  }
  return n;
}

std::vector<std::string> unstable_flags() { return {"--alpha", "2", "--epsilon", "0.1", "--c", "1", "--d", "1"}; }

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// Upsilon from the Hurwitz gap of the finite-difference-free Jacobian of the
// oracle equilibrium.
double oracle_upsilon(const Rates& r) {
  const ModelParams p(r);
  const double w = oracle::coexistence_water(r);
  const State e{r.zeta * w / r.eta, r.beta * w / r.alpha, w};
  const MonicCubic a = oracle::charpoly(jacobian(e, p));
  return a.hurwitz_gap() / (r.delta * r.zeta * e.v * e.w);
}

}  // namespace

TEST_CASE("equilibria command") {
  const Result r = invoke({"equilibria"});
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == Row{"label", "f", "v", "w"});
  CHECK(rows[1] == Row{"E0", "0", "0", "1"});
  CHECK(rows[2][0] == "E1");
  const double w = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 1; i <= 3; ++i) CHECK(std::stod(rows[2][i]) == doctest::Approx(w).epsilon(1e-15));
}

TEST_CASE("stability command") {
  const Result r = invoke(concat({"stability"}, unstable_flags()));
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][0] == "E0");
  CHECK(rows[1][1].empty());
  CHECK(rows[1][2] == "Unstable");
  CHECK(rows[2][0] == "E1");
  CHECK(std::stod(rows[2][1]) == doctest::Approx(-0.558872343937891).epsilon(1e-12));
  CHECK(rows[2][2] == "Unstable");
  CHECK(rows[2].size() == 9);
}

TEST_CASE("wavetrain without a wave train exits 3") {
  const Result r = invoke({"wavetrain"});
  CHECK(r.code == kExitNumerical);
  CHECK(r.err.find("no wave train: Upsilon >= 0") != std::string::npos);
  CHECK(r.out.empty());
}

TEST_CASE("wavetrain at the unstable parameters") {
  const Result r = invoke(concat({"wavetrain"}, unstable_flags()));
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(std::stod(rows[1][column(rows[0], "mu_star")]) == doctest::Approx(0.137412802154024).epsilon(1e-10));
  CHECK(std::stod(rows[1][column(rows[0], "sigma_star")]) == doctest::Approx(1.65161667680209).epsilon(1e-10));
}

TEST_CASE("dispersion table changes sign once near the threshold") {
  const Result r = invoke(concat({"dispersion", "--mu-max", "2", "--samples", "201"}, unstable_flags()));
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 202);
  const auto mu = numeric_column(rows, "mu");
  const auto phi = numeric_column(rows, "phi");
  const auto stable = numeric_column(rows, "stable");
  CHECK(sign_changes(phi) == 1);
  const PhiCubic cubic = phi_cubic(ModelParams(oracle::unstable_rates()));
  const double root = oracle::bisect([&](double m) { return cubic(m); }, 0.0, 2.0, 1e-14);
  for (std::size_t i = 1; i < phi.size(); ++i) {
    if ((phi[i - 1] > 0.0) != (phi[i] > 0.0)) {
      CHECK(mu[i - 1] <= root);
      CHECK(mu[i] >= root);
      CHECK(std::abs(mu[i] - 0.137) < 0.01);
    }
  }
  for (std::size_t i = 0; i < phi.size(); ++i) CHECK((stable[i] == 1.0) == (phi[i] > 0.0));
}

TEST_CASE("sweep over alpha crosses the stability boundary once") {
  const Result r = invoke({"sweep", "--axis", "alpha", "--from", "0.1", "--to", "20", "--count", "200", "--epsilon",
                           "0.1"});
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 201);
  CHECK(rows[0] == Row{"alpha", "upsilon", "classification", "mu_threshold", "k0", "mu_star", "sigma_star"});
  const auto alpha = numeric_column(rows, "alpha");
  const auto ups = numeric_column(rows, "upsilon");
  CHECK(ups.front() > 0.0);
  CHECK(ups.back() < 0.0);
  CHECK(sign_changes(ups) == 1);
  for (std::size_t i = 0; i < ups.size(); ++i) {
    Rates rates;
    rates.alpha = alpha[i];
    rates.epsilon = 0.1;
    CHECK(ups[i] == doctest::Approx(oracle_upsilon(rates)).epsilon(1e-8));
    const Row& row = rows[i + 1];
    if (ups[i] < 0.0) {
      CHECK(row[2] == "Unstable");
      CHECK(std::stod(row[3]) > 0.0);
      CHECK_FALSE(row[5].empty());
    } else {
      CHECK(row[2] == "Stable");
      CHECK(std::stod(row[3]) == 0.0);
      CHECK(row[5].empty());
      CHECK(row[6].empty());
    }
  }
}

TEST_CASE("sweep with Upsilon positive has a zero threshold column") {
  const Result r = invoke({"sweep", "--axis", "gamma", "--from", "0.01", "--to", "100", "--count", "25", "--log",
                           "true"});
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 26);
  for (double u : numeric_column(rows, "upsilon")) CHECK(u > 0.0);
  for (double m : numeric_column(rows, "mu_threshold")) CHECK(m == 0.0);
  CHECK(numeric_column(rows, "gamma").front() == 0.01);
  CHECK(numeric_column(rows, "gamma").back() == 100.0);
}

TEST_CASE("sweep without diffusion leaves threshold columns blank") {
  const Result r = invoke({"sweep", "--axis", "alpha", "--from", "1", "--to", "3", "--count", "3", "--c", "0",
                           "--d", "0"});
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == 7);
    for (std::size_t c = 3; c < 7; ++c) CHECK(rows[i][c].empty());
  }
}

TEST_CASE("Upsilon limits along the alpha axis") {
  auto upsilon_at = [](const std::vector<std::string>& extra) {
    const Result r = invoke(concat({"sweep", "--axis", "alpha", "--count", "1"}, extra));
    REQUIRE(r.code == 0);
    return numeric_column(parse_csv(r.out), "upsilon").at(0);
  };
  // Large alpha: eps - beta gamma / eps.
  const double two = upsilon_at({"--from", "1000", "--to", "1000", "--epsilon", "2"});
  CHECK(std::abs(two - 1.5) <= 0.05 * 1.5);
  const double ones = upsilon_at({"--from", "1000", "--to", "1000"});
  CHECK(std::abs(ones - 0.0) <= 0.05 * 1.0);
  // Small alpha blows up like 1 / sqrt(alpha).
  CHECK(upsilon_at({"--from", "1e-6", "--to", "1e-6"}) > 100.0);
}

TEST_CASE("outputs are deterministic and independent of the thread count") {
  const std::vector<std::string> args{"sweep", "--axis", "delta", "--from", "0.5", "--to", "3", "--count", "40",
                                      "--epsilon", "0.1", "--alpha", "2"};
  const Result one = invoke(concat(args, {"--threads", "1"}));
  const Result four = invoke(concat(args, {"--threads", "4"}));
  const Result again = invoke(concat(args, {"--threads", "4"}));
  REQUIRE(one.code == 0);
  CHECK(one.out == four.out);
  CHECK(four.out == again.out);

  const std::vector<std::string> ode{"simulate-ode", "--method", "rk45", "--t-final", "5"};
  CHECK(invoke(ode).out == invoke(ode).out);
}

TEST_CASE("dump-config round trip") {
  RunConfig cfg;
  cfg.command = Command::SimulatePde;
  cfg.output = "fields.csv";
  cfg.params.alpha = 2.0;
  cfg.params.epsilon = 0.1;
  cfg.params.ell = 0.0;
  cfg.mu_max = 1.0 / 3.0;
  cfg.method = "rk45";
  cfg.rtol = 1e-11;
  cfg.grid_points = 512;
  cfg.clamp_dt = false;
  cfg.kernel = "exponential";
  cfg.log_spacing = true;
  cfg.threads = 3;
  CHECK(parse_config(dump_config(cfg)) == cfg);
  CHECK(parse_config(dump_config(RunConfig{})) == RunConfig{});

  const Result r = invoke({"--dump-config", "sweep", "--alpha", "2.5", "--count", "7"});
  REQUIRE(r.code == 0);
  const RunConfig parsed = parse_config(r.out);
  CHECK(parsed.command == Command::Sweep);
  CHECK(parsed.params.alpha == 2.5);
  CHECK(parsed.count == 7);
}

TEST_CASE("config files and flags") {
  const auto dir = std::filesystem::temp_directory_path() / "ecofire_cli_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "run.cfg";
  {
    std::ofstream f(path);
    f << "# unstable parameters\n[run]\ncommand = stability\n\n[params]\nalpha = 2\nepsilon = 0.1\n";
  }
  const Result from_file = invoke({"--config", path.string()});
  REQUIRE(from_file.code == 0);
  CHECK(from_file.out == invoke(concat({"stability"}, unstable_flags())).out);

  // Flags override the file.
  const Result overridden = invoke({"--config", path.string(), "--alpha", "1"});
  REQUIRE(overridden.code == 0);
  CHECK(overridden.out == invoke({"stability", "--epsilon", "0.1"}).out);

  CHECK_THROWS_WITH_AS(parse_config("[params]\nkappa = 1\n"), doctest::Contains("params.kappa"), ValidationError);
  CHECK_THROWS_WITH_AS(parse_config("[params]\nalpha = two\n"), doctest::Contains("params.alpha"), ValidationError);
  CHECK_THROWS_WITH_AS(parse_config("[params\n"), doctest::Contains("line 1"), ValidationError);
  CHECK_THROWS_WITH_AS(parse_config("alpha\n"), doctest::Contains("line 1"), ValidationError);
  CHECK_THROWS_WITH_AS(parse_config("command = explode\n"), doctest::Contains("run.command"), ValidationError);
  CHECK(parse_config("; comment\n[pde]\nclamp_dt = off\n").clamp_dt == false);
}

TEST_CASE("validation failures exit 2 and name the field") {
  auto check = [](const std::vector<std::string>& args, const std::string& field) {
    const Result r = invoke(args);
    CHECK(r.code == kExitValidation);
    CHECK_MESSAGE(r.err.find(field) != std::string::npos, r.err);
  };
  check({"dispersion", "--samples", "0"}, "dispersion.samples");
  check({"dispersion", "--mu-min", "-1"}, "dispersion.mu_min");
  check({"equilibria", "--alpha", "abc"}, "params.alpha");
  check({"equilibria", "--gamma", "0"}, "gamma");
  check({"competition", "--varsigma", "1.5"}, "varsigma");
  check({"competition", "--mu", "0"}, "competition.mu");
  check({"simulate-ode", "--method", "euler"}, "integrator.method");
  check({"simulate-ode", "--dt", "-1"}, "integrator.dt");
  check({"simulate-pde", "--mode", "200"}, "pde.mode");
  check({"simulate-pde", "--ell", "0.5"}, "params.ell");
  check({"simulate-pde", "--clamp-dt", "false"}, "dt");
  check({"kernel-moments", "--j-max", "9"}, "kernel.j_max");
  check({"sweep", "--axis", "kappa"}, "sweep.axis");
  check({"sweep", "--axis", "alpha", "--from", "-1"}, "alpha");
  check({}, "run.command");
}

TEST_CASE("output files honour the output directory variable") {
  const auto dir = std::filesystem::temp_directory_path() / "ecofire_cli_out";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  ::setenv(kOutputDirEnv, dir.string().c_str(), 1);
  const Result r = invoke({"equilibria", "--output", "eq.csv"});
  ::unsetenv(kOutputDirEnv);
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream f(dir / "eq.csv");
  std::stringstream text;
  text << f.rdbuf();
  CHECK(text.str() == invoke({"equilibria"}).out);

  const Result bad = invoke({"equilibria", "--output", (dir / "missing" / "x.csv").string()});
  CHECK(bad.code == kExitValidation);
  CHECK(bad.err.find("run.output") != std::string::npos);
}

TEST_CASE("competition command") {
  const Result r = invoke({"competition", "--gamma", "0.01", "--mu", "0.01", "--varsigma", "0.5"});
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][column(rows[0], "unstable")] == "1");
  CHECK(std::stod(rows[1][column(rows[0], "max_re")]) > 0.4);
}

TEST_CASE("simulation and kernel commands") {
  const Result ode = invoke({"simulate-ode", "--t-final", "1", "--dt", "0.1"});
  REQUIRE(ode.code == 0);
  const auto orow = parse_csv(ode.out);
  CHECK(orow[0] == Row{"t", "f", "v", "w"});
  CHECK(orow.size() == 12);

  const Result pde = invoke({"simulate-pde", "--grid-points", "32", "--t-final", "1", "--snapshots", "4", "--dt", "0.1"});
  REQUIRE(pde.code == 0);
  CHECK(pde.err.find("clamped") != std::string::npos);
  const auto prow = parse_csv(pde.out);
  CHECK(prow[0] == Row{"t", "x", "f", "v", "w"});
  CHECK(prow.size() == 1 + 5 * 32);
  CHECK(prow.back()[0] == "1");

  const Result kern = invoke({"kernel-moments"});
  REQUIRE(kern.code == 0);
  const auto krow = parse_csv(kern.out);
  CHECK(krow[0] == Row{"j", "C_nj", "ell_j"});
  REQUIRE(krow.size() == 4);
  CHECK(std::stod(krow[1][2]) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-10));
  CHECK(std::stod(krow[2][2]) == doctest::Approx(std::sqrt(std::numbers::pi) / 4.0).epsilon(1e-10));
}

TEST_CASE("help exits cleanly") {
  const Result r = invoke({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("sweep") != std::string::npos);
}
