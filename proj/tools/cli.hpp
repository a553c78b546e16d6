#pragma once

#include "ecofire/model.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ecofire::cli {

enum class Command {
  Equilibria,
  Stability,
  Dispersion,
  Wavetrain,
  Competition,
  SimulateOde,
  SimulatePde,
  KernelMoments,
  Sweep,
};

std::string_view to_string(Command c);
std::optional<Command> parse_command(std::string_view name);

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

// Everything a run needs. Loaded from a key = value file with [section]
// headers, then overridden by command-line flags.
struct RunConfig {
  Command command = Command::Equilibria;
  std::string output;  // empty: standard output

  Rates params;

  // [dispersion]
  double mu_min = 0.0;
  double mu_max = 2.0;
  int samples = 101;

  // [competition]
  double mu = 0.01;
  double varsigma = 0.5;

  // [integrator]
  std::string method = "rk4";  // rk4 | rk45
  double dt = 1e-2;
  double rtol = 1e-8;
  double atol = 1e-10;
  double t_final = 10.0;

  // [ode] start = e1 starts at E1 + offset in every component; start = custom
  // uses (f0, v0, w0).
  std::string start = "e1";
  double offset = 0.1;
  double f0 = 1.0;
  double v0 = 1.0;
  double w0 = 1.0;

  // [pde] E1 + rho sin(2 pi mode x / L) in every component.
  int grid_points = 256;
  double domain_length = 10.0;
  int mode = 1;
  double rho = 1e-3;
  int snapshots = 10;
  bool clamp_dt = true;

  // [kernel] gaussian: exp(-(r/scale)^2); exponential: exp(-r/scale)
  std::string kernel = "gaussian";
  double kernel_scale = 1.0;
  int dimension = 1;
  int j_max = 2;

  // [sweep]
  std::string axis = "alpha";
  double from = 0.1;
  double to = 20.0;
  int count = 50;
  bool log_spacing = false;
  int threads = 0;  // 0: hardware concurrency

  bool operator==(const RunConfig&) const = default;
};

// Parses the key = value format. Throws ValidationError naming the offending
// field ("section.key").
RunConfig parse_config(std::string_view text, RunConfig base = {});

std::string dump_config(const RunConfig& cfg);

// Validates every option the selected command uses.
void validate(const RunConfig& cfg);

// Executes cfg and writes CSV to `out` (or to cfg.output). Returns an exit
// status; diagnostics go to `err`.
int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Full command-line entry point (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Name of the environment variable holding the directory for relative output
// paths.
inline constexpr const char* kOutputDirEnv = "ECOFIRE_OUTPUT_DIR";

}  // namespace ecofire::cli
