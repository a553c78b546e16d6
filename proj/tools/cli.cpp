#include "cli.hpp"

#include "ecofire/csv.hpp"
#include "ecofire/errors.hpp"
#include "ecofire/kernel.hpp"
#include "ecofire/simulation.hpp"
#include "ecofire/stability.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

namespace ecofire::cli {

namespace {

// One configurable value: where it lives in the file, its flag, and how to
// read / write it as text.
struct Field {
  std::string section;
  std::string key;
  std::string flag;
  std::string help;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, std::string_view)> set;

  std::string name() const { return section + "." + key; }
};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

double parse_double(std::string_view text, const std::string& field) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ValidationError(field, "expected a number, got '" + t + "'");
  }
  return value;
}

int parse_int(std::string_view text, const std::string& field) {
  const std::string t = trim(text);
  int value = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ValidationError(field, "expected an integer, got '" + t + "'");
  }
  return value;
}

bool parse_bool(std::string_view text, const std::string& field) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ValidationError(field, "expected true or false, got '" + t + "'");
}

template <class T>
Field member_field(std::string section, std::string key, std::string flag, T RunConfig::*member,
                   std::string help) {
  Field f{section, key, std::move(flag), std::move(help), {}, {}};
  const std::string name = section + "." + key;
  f.get = [member](const RunConfig& c) -> std::string {
    if constexpr (std::is_same_v<T, double>) return format_double(c.*member);
    else if constexpr (std::is_same_v<T, int>) return std::to_string(c.*member);
    else if constexpr (std::is_same_v<T, bool>) return c.*member ? "true" : "false";
    else return c.*member;
  };
  f.set = [member, name](RunConfig& c, std::string_view text) {
    if constexpr (std::is_same_v<T, double>) c.*member = parse_double(text, name);
    else if constexpr (std::is_same_v<T, int>) c.*member = parse_int(text, name);
    else if constexpr (std::is_same_v<T, bool>) c.*member = parse_bool(text, name);
    else c.*member = trim(text);
  };
  return f;
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> t;
    Field cmd{"run", "command", "", "command to run", {}, {}};
    cmd.get = [](const RunConfig& c) { return std::string(to_string(c.command)); };
    cmd.set = [](RunConfig& c, std::string_view text) {
      const auto parsed = parse_command(trim(text));
      if (!parsed) throw ValidationError("run.command", "unknown command '" + trim(text) + "'");
      c.command = *parsed;
    };
    t.push_back(std::move(cmd));
    t.push_back(member_field("run", "output", "output", &RunConfig::output,
                             "output CSV path (relative paths resolve against $ECOFIRE_OUTPUT_DIR)"));

    for (const std::string_view rate : kRateNames) {
      const std::string key(rate);
      Field f{"params", key, key, "model parameter " + key, {}, {}};
      f.get = [key](const RunConfig& c) { return format_double(get_rate(c.params, key)); };
      f.set = [key](RunConfig& c, std::string_view text) {
        set_rate(c.params, key, parse_double(text, "params." + key));
      };
      t.push_back(std::move(f));
    }

    t.push_back(member_field("dispersion", "mu_min", "mu-min", &RunConfig::mu_min, "smallest mu = |k|^2"));
    t.push_back(member_field("dispersion", "mu_max", "mu-max", &RunConfig::mu_max, "largest mu = |k|^2"));
    t.push_back(member_field("dispersion", "samples", "samples", &RunConfig::samples, "number of mu samples"));

    t.push_back(member_field("competition", "mu", "mu", &RunConfig::mu, "squared wavenumber"));
    t.push_back(member_field("competition", "varsigma", "varsigma", &RunConfig::varsigma,
                             "competition strength, in (0, epsilon)"));

    t.push_back(member_field("integrator", "method", "method", &RunConfig::method, "rk4 or rk45"));
    t.push_back(member_field("integrator", "dt", "dt", &RunConfig::dt, "fixed (or initial) step"));
    t.push_back(member_field("integrator", "rtol", "rtol", &RunConfig::rtol, "rk45 relative tolerance"));
    t.push_back(member_field("integrator", "atol", "atol", &RunConfig::atol, "rk45 absolute tolerance"));
    t.push_back(member_field("integrator", "t_final", "t-final", &RunConfig::t_final, "integration horizon"));

    t.push_back(member_field("ode", "start", "start", &RunConfig::start, "e1 or custom"));
    t.push_back(member_field("ode", "offset", "offset", &RunConfig::offset, "offset from E1 (start = e1)"));
    t.push_back(member_field("ode", "f0", "f0", &RunConfig::f0, "initial fire (start = custom)"));
    t.push_back(member_field("ode", "v0", "v0", &RunConfig::v0, "initial vegetation (start = custom)"));
    t.push_back(member_field("ode", "w0", "w0", &RunConfig::w0, "initial water (start = custom)"));

    t.push_back(member_field("pde", "grid_points", "grid-points", &RunConfig::grid_points, "periodic grid size"));
    t.push_back(member_field("pde", "domain_length", "domain-length", &RunConfig::domain_length, "domain length"));
    t.push_back(member_field("pde", "mode", "mode", &RunConfig::mode, "perturbed grid mode"));
    t.push_back(member_field("pde", "rho", "rho", &RunConfig::rho, "perturbation amplitude"));
    t.push_back(member_field("pde", "snapshots", "snapshots", &RunConfig::snapshots,
                             "evenly spaced snapshots after t = 0"));
    t.push_back(member_field("pde", "clamp_dt", "clamp-dt", &RunConfig::clamp_dt,
                             "clamp dt to the diffusion bound instead of failing"));

    t.push_back(member_field("kernel", "shape", "kernel", &RunConfig::kernel, "gaussian or exponential"));
    t.push_back(member_field("kernel", "scale", "kernel-scale", &RunConfig::kernel_scale, "kernel length scale"));
    t.push_back(member_field("kernel", "dimension", "dimension", &RunConfig::dimension, "space dimension n"));
    t.push_back(member_field("kernel", "j_max", "j-max", &RunConfig::j_max, "highest Laplacian power"));

    t.push_back(member_field("sweep", "axis", "axis", &RunConfig::axis, "parameter to sweep"));
    t.push_back(member_field("sweep", "from", "from", &RunConfig::from, "first axis value"));
    t.push_back(member_field("sweep", "to", "to", &RunConfig::to, "last axis value"));
    t.push_back(member_field("sweep", "count", "count", &RunConfig::count, "number of axis values"));
    t.push_back(member_field("sweep", "log", "log", &RunConfig::log_spacing, "logarithmic spacing"));
    t.push_back(member_field("sweep", "threads", "threads", &RunConfig::threads, "worker threads (0 = auto)"));
    return t;
  }();
  return table;
}

constexpr std::pair<Command, std::string_view> kCommands[] = {
    {Command::Equilibria, "equilibria"},
    {Command::Stability, "stability"},
    {Command::Dispersion, "dispersion"},
    {Command::Wavetrain, "wavetrain"},
    {Command::Competition, "competition"},
    {Command::SimulateOde, "simulate-ode"},
    {Command::SimulatePde, "simulate-pde"},
    {Command::KernelMoments, "kernel-moments"},
    {Command::Sweep, "sweep"},
};

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

std::vector<double> logspace(double a, double b, int n) {
  std::vector<double> out = linspace(std::log(a), std::log(b), n);
  for (double& x : out) x = std::exp(x);
  out.front() = a;
  out.back() = b;
  return out;
}

IntegratorConfig integrator_config(const RunConfig& cfg) {
  IntegratorConfig ic;
  ic.method = cfg.method == "rk45" ? IntegratorMethod::RK45Adaptive : IntegratorMethod::RK4Fixed;
  ic.dt = cfg.dt;
  ic.rtol = cfg.rtol;
  ic.atol = cfg.atol;
  ic.t_final = cfg.t_final;
  return ic;
}

void require(bool ok, const char* field, const char* message) {
  if (!ok) throw ValidationError(field, message);
}

std::string roots_csv(const RootSet& roots) {
  std::string s;
  for (const Complex& r : roots) {
    s += ',' + format_double(r.real()) + ',' + format_double(r.imag());
  }
  return s;
}

void write_equilibria(const RunConfig& cfg, std::ostream& os) {
  const ModelParams p(cfg.params);
  const EquilibriumPair eq = equilibria(p);
  os << "label,f,v,w\n";
  for (const Equilibrium& e : {eq.trivial, eq.coexistence}) {
    os << to_string(e.kind) << ',' << format_double(e.point.f) << ',' << format_double(e.point.v) << ','
       << format_double(e.point.w) << '\n';
  }
}

void write_stability(const RunConfig& cfg, std::ostream& os) {
  const ModelParams p(cfg.params);
  os << "equilibrium,upsilon,classification,eig1_re,eig1_im,eig2_re,eig2_im,eig3_re,eig3_im\n";
  for (const EquilibriumKind kind : {EquilibriumKind::Trivial, EquilibriumKind::Coexistence}) {
    const StabilityVerdict v = classify_equilibrium(kind, p);
    // Upsilon only classifies E1.
    const std::string ups = kind == EquilibriumKind::Coexistence ? format_double(v.upsilon) : "";
    os << to_string(kind) << ',' << ups << ',' << to_string(v.classification)
       << roots_csv(v.eigenvalues) << '\n';
  }
}

void write_dispersion(const RunConfig& cfg, std::ostream& os) {
  const ModelParams p(cfg.params);
  const std::vector<double> grid = linspace(cfg.mu_min, cfg.mu_max, cfg.samples);
  os << "mu,a2,a1,a0,phi,max_re,stable\n";
  for (const DispersionSample& s : dispersion_curve(p, grid)) {
    os << format_double(s.mu) << ',' << format_double(s.a2) << ',' << format_double(s.a1) << ','
       << format_double(s.a0) << ',' << format_double(s.phi) << ',' << format_double(s.eigenvalues.max_real())
       << ',' << (s.stable ? 1 : 0) << '\n';
  }
}

void write_wavetrain(const RunConfig& cfg, std::ostream& os) {
  const ModelParams p(cfg.params);
  const WaveTrain wt = find_wavetrain(p);
  os << "mu_star,k_star,sigma_star,decay_eigenvalue,F0_re,F0_im,V0_re,V0_im,W0_re,W0_im\n";
  os << format_double(wt.mu_star) << ',' << format_double(std::sqrt(wt.mu_star)) << ','
     << format_double(wt.sigma_star) << ',' << format_double(wt.decay_eigenvalue);
  for (int i = 0; i < 3; ++i) {
    os << ',' << format_double(wt.eigvec[i].real()) << ',' << format_double(wt.eigvec[i].imag());
  }
  os << '\n';
}

void write_competition(const RunConfig& cfg, std::ostream& os) {
  const ModelParams p(cfg.params);
  const CompetitionSpectrum s = competition_instability(p, cfg.mu, cfg.varsigma);
  os << "varsigma,gamma,mu,ell,q2,q1,q0,eig1_re,eig1_im,eig2_re,eig2_im,eig3_re,eig3_im,"
        "max_re,continuation_root,unstable\n";
  os << format_double(s.varsigma) << ',' << format_double(s.gamma) << ',' << format_double(s.mu) << ','
     << format_double(s.ell) << ',' << format_double(s.q.a2) << ',' << format_double(s.q.a1) << ','
     << format_double(s.q.a0) << roots_csv(s.eigenvalues) << ',' << format_double(s.eigenvalues.max_real())
     << ',' << format_double(s.continuation_root) << ',' << (s.unstable ? 1 : 0) << '\n';
}

void write_ode(const RunConfig& cfg, std::ostream& os, std::ostream& err) {
  const ModelParams p(cfg.params);
  State s0{cfg.f0, cfg.v0, cfg.w0};
  if (cfg.start == "e1") s0 = coexistence_state(p) + State{cfg.offset, cfg.offset, cfg.offset};
  const Trajectory traj = integrate_ode(s0, p, integrator_config(cfg));
  if (traj.negativity_flag) err << "warning: trajectory left the nonnegative octant\n";
  write_trajectory_csv(os, traj);
}

void write_pde(const RunConfig& cfg, std::ostream& os, std::ostream& err) {
  const ModelParams p(cfg.params);
  const auto n = static_cast<std::size_t>(cfg.grid_points);
  ModeAmplitudes amp;
  amp.sine = Eigen::Vector3d::Constant(cfg.rho);
  const FieldState field0 = mode_field(n, cfg.domain_length, cfg.mode, coexistence_state(p), amp);

  PdeConfig pc;
  pc.integrator = integrator_config(cfg);
  pc.clamp_dt = cfg.clamp_dt;
  pc.snapshot_times.push_back(0.0);
  for (int i = 1; i <= cfg.snapshots; ++i) {
    pc.snapshot_times.push_back(i == cfg.snapshots ? cfg.t_final
                                                    : cfg.t_final * static_cast<double>(i) / cfg.snapshots);
  }
  const PdeRun run = simulate_pde(field0, p, pc);
  if (run.dt_clamped) {
    err << "warning: dt clamped to the diffusion bound " << format_double(run.dt_limit) << '\n';
  }
  if (run.negativity_flag) err << "warning: field left the nonnegative octant\n";
  write_fields_csv(os, run.snapshots);
}

void write_kernel(const RunConfig& cfg, std::ostream& os) {
  const double scale = cfg.kernel_scale;
  std::function<double(double)> k0;
  if (cfg.kernel == "gaussian") {
    k0 = [scale](double r) { return std::exp(-(r / scale) * (r / scale)); };
  } else {
    k0 = [scale](double r) { return std::exp(-r / scale); };
  }
  const std::vector<double> c = pizzetti_constants(cfg.dimension, cfg.j_max);
  const KernelMoments m = kernel_moments(k0, cfg.dimension, cfg.j_max);
  os << "j,C_nj,ell_j\n";
  for (const auto& [j, ell] : m.orders) {
    os << j << ',' << format_double(c[j]) << ',' << format_double(ell) << '\n';
  }
}

struct SweepRow {
  double value;
  double upsilon;
  Classification classification;
  std::optional<StabilizationThreshold> threshold;
  std::optional<WaveTrain> wave;
};

SweepRow sweep_row(const Rates& base, const std::string& axis, double value) {
  const ModelParams p = ModelParams(base).with(axis, value);
  SweepRow row{value, upsilon(p), classify_equilibrium(EquilibriumKind::Coexistence, p).classification, {}, {}};
  if (p.c() > 0.0 || p.d() > 0.0) {
    row.threshold = find_k0(p);
    if (row.threshold->mu_threshold > 0.0) row.wave = find_wavetrain(p);
  }
  return row;
}

void write_sweep(const RunConfig& cfg, std::ostream& os) {
  const std::vector<double> values =
      cfg.log_spacing ? logspace(cfg.from, cfg.to, cfg.count) : linspace(cfg.from, cfg.to, cfg.count);

  unsigned workers = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::thread::hardware_concurrency();
  workers = std::clamp(workers, 1u, static_cast<unsigned>(values.size()));

  // Rows are independent; each worker fills a strided subset and output is
  // written afterwards in input order.
  std::vector<std::optional<SweepRow>> rows(values.size());
  std::vector<std::future<void>> jobs;
  for (unsigned w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < values.size(); i += workers) {
        rows[i] = sweep_row(cfg.params, cfg.axis, values[i]);
      }
    }));
  }
  for (auto& j : jobs) j.get();

  os << cfg.axis << ",upsilon,classification,mu_threshold,k0,mu_star,sigma_star\n";
  for (const auto& row : rows) {
    os << format_double(row->value) << ',' << format_double(row->upsilon) << ','
       << to_string(row->classification) << ',';
    if (row->threshold) {
      os << format_double(row->threshold->mu_threshold) << ',' << format_double(row->threshold->k0);
    } else {
      os << ',';
    }
    os << ',';
    if (row->wave) os << format_double(row->wave->mu_star) << ',' << format_double(row->wave->sigma_star);
    else os << ',';
    os << '\n';
  }
}

std::filesystem::path resolve_output(const std::string& output) {
  std::filesystem::path path(output);
  if (path.is_relative()) {
    if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') {
      path = std::filesystem::path(dir) / path;
    }
  }
  return path;
}

}  // namespace

std::string_view to_string(Command c) {
  for (const auto& [cmd, name] : kCommands) {
    if (cmd == c) return name;
  }
  return "?";
}

std::optional<Command> parse_command(std::string_view name) {
  for (const auto& [cmd, n] : kCommands) {
    if (n == name) return cmd;
  }
  return std::nullopt;
}

namespace {

// Applies text to cfg; returns the "section.key" names it set.
std::vector<std::string> parse_into(std::string_view text, RunConfig& base) {
  std::vector<std::string> seen;
  std::string section = "run";
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ValidationError("line " + std::to_string(line_no), "unterminated section header");
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("line " + std::to_string(line_no), "expected key = value");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const auto& table = fields();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const Field& f) { return f.section == section && f.key == key; });
    if (it == table.end()) throw ValidationError(section + "." + key, "unknown configuration key");
    it->set(base, value);
    seen.push_back(it->name());
  }
  return seen;
}

}  // namespace

RunConfig parse_config(std::string_view text, RunConfig base) {
  parse_into(text, base);
  return base;
}

std::string dump_config(const RunConfig& cfg) {
  std::string out = "# ecofire run configuration\n";
  std::string section;
  for (const Field& f : fields()) {
    if (f.section != section) {
      section = f.section;
      out += "\n[" + section + "]\n";
    }
    out += f.key + " = " + f.get(cfg) + '\n';
  }
  return out;
}

void validate(const RunConfig& cfg) {
  const ModelParams p(cfg.params);
  switch (cfg.command) {
    case Command::Equilibria:
    case Command::Stability:
      break;
    case Command::Dispersion:
      require(cfg.samples >= 1, "dispersion.samples", "must be >= 1");
      require(std::isfinite(cfg.mu_min) && cfg.mu_min >= 0.0, "dispersion.mu_min", "must be finite and >= 0");
      require(std::isfinite(cfg.mu_max) && cfg.mu_max >= cfg.mu_min, "dispersion.mu_max",
              "must be finite and >= mu_min");
      break;
    case Command::Wavetrain:
      if (p.c() == 0.0 && p.d() == 0.0) throw DegenerateDiffusion();
      break;
    case Command::Competition:
      require(std::isfinite(cfg.mu) && cfg.mu > 0.0, "competition.mu", "must be finite and > 0");
      if (!(cfg.varsigma > 0.0 && cfg.varsigma < p.epsilon())) {
        throw VarsigmaOutOfRange("competition.varsigma", "must lie in (0, epsilon)");
      }
      break;
    case Command::SimulateOde:
    case Command::SimulatePde:
      require(cfg.method == "rk4" || cfg.method == "rk45", "integrator.method", "must be rk4 or rk45");
      require(std::isfinite(cfg.dt) && cfg.dt > 0.0, "integrator.dt", "must be finite and > 0");
      require(std::isfinite(cfg.t_final) && cfg.t_final > 0.0, "integrator.t_final", "must be finite and > 0");
      require(cfg.rtol > 0.0, "integrator.rtol", "must be > 0");
      require(cfg.atol > 0.0, "integrator.atol", "must be > 0");
      if (cfg.command == Command::SimulateOde) {
        require(cfg.start == "e1" || cfg.start == "custom", "ode.start", "must be e1 or custom");
        require(std::isfinite(cfg.offset), "ode.offset", "must be finite");
        require(std::isfinite(cfg.f0) && std::isfinite(cfg.v0) && std::isfinite(cfg.w0), "ode.f0",
                "initial state must be finite");
      } else {
        require(cfg.grid_points >= 8, "pde.grid_points", "must be >= 8");
        require(std::isfinite(cfg.domain_length) && cfg.domain_length > 0.0, "pde.domain_length",
                "must be finite and > 0");
        require(cfg.mode >= 1 && 2 * cfg.mode < cfg.grid_points, "pde.mode", "must satisfy 1 <= mode < N/2");
        require(std::isfinite(cfg.rho), "pde.rho", "must be finite");
        require(cfg.snapshots >= 1, "pde.snapshots", "must be >= 1");
        require(p.ell() == 0.0, "params.ell", "must be 0 for simulate-pde");
      }
      break;
    case Command::KernelMoments:
      require(cfg.kernel == "gaussian" || cfg.kernel == "exponential", "kernel.shape",
              "must be gaussian or exponential");
      require(std::isfinite(cfg.kernel_scale) && cfg.kernel_scale > 0.0, "kernel.scale", "must be finite and > 0");
      require(cfg.dimension >= 1, "kernel.dimension", "must be >= 1");
      require(cfg.j_max >= 0 && cfg.j_max <= 6, "kernel.j_max", "must lie in [0, 6]");
      break;
    case Command::Sweep: {
      const bool known = std::find(kRateNames.begin(), kRateNames.end(), cfg.axis) != kRateNames.end();
      require(known, "sweep.axis", "must name a model parameter");
      require(cfg.count >= 1, "sweep.count", "must be >= 1");
      require(cfg.threads >= 0, "sweep.threads", "must be >= 0");
      require(std::isfinite(cfg.from) && std::isfinite(cfg.to), "sweep.from", "range must be finite");
      if (cfg.log_spacing) require(cfg.from > 0.0 && cfg.to > 0.0, "sweep.from", "log spacing needs positive range");
      // Both ends must give valid parameters.
      (void)ModelParams(cfg.params).with(cfg.axis, cfg.from);
      (void)ModelParams(cfg.params).with(cfg.axis, cfg.to);
      break;
    }
  }
}

int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    validate(cfg);

    std::ofstream file;
    std::ostream* os = &out;
    std::ostringstream buffer;
    if (!cfg.output.empty()) os = &buffer;

    switch (cfg.command) {
      case Command::Equilibria: write_equilibria(cfg, *os); break;
      case Command::Stability: write_stability(cfg, *os); break;
      case Command::Dispersion: write_dispersion(cfg, *os); break;
      case Command::Wavetrain: write_wavetrain(cfg, *os); break;
      case Command::Competition: write_competition(cfg, *os); break;
      case Command::SimulateOde: write_ode(cfg, *os, err); break;
      case Command::SimulatePde: write_pde(cfg, *os, err); break;
      case Command::KernelMoments: write_kernel(cfg, *os); break;
      case Command::Sweep: write_sweep(cfg, *os); break;
    }

    if (!cfg.output.empty()) {
      const std::filesystem::path path = resolve_output(cfg.output);
      file.open(path, std::ios::binary);
      if (!file) throw ValidationError("run.output", "cannot open '" + path.string() + "' for writing");
      file << buffer.str();
      if (!file.flush()) throw ValidationError("run.output", "write failed for '" + path.string() + "'");
    }
    return kExitOk;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Vegetation / rainfall / bushfire model: stability analysis and simulation", "ecofire"};
  app.require_subcommand(0, 1);

  std::string config_path;
  bool dump = false;
  app.add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_flag("--dump-config", dump, "print the effective configuration and exit");

  const auto& table = fields();
  std::vector<std::string> values(table.size());
  std::vector<CLI::Option*> options(table.size(), nullptr);
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i].flag.empty()) continue;
    options[i] = app.add_option("--" + table[i].flag, values[i], table[i].help)->group(table[i].section);
  }

  std::vector<std::pair<Command, CLI::App*>> subs;
  for (const auto& [cmd, name] : kCommands) {
    CLI::App* sub = app.add_subcommand(std::string(name), "run " + std::string(name));
    sub->fallthrough();
    subs.emplace_back(cmd, sub);
  }

  std::vector<std::string> argv_storage{"ecofire"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  RunConfig cfg;
  bool have_command = false;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      std::stringstream text;
      text << in.rdbuf();
      const auto seen = parse_into(text.str(), cfg);
      have_command = std::find(seen.begin(), seen.end(), "run.command") != seen.end();
    }
    for (const auto& [cmd, sub] : subs) {
      if (sub->parsed()) {
        cfg.command = cmd;
        have_command = true;
      }
    }
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (options[i] != nullptr && options[i]->count() > 0) table[i].set(cfg, values[i]);
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  if (dump) {
    out << dump_config(cfg);
    return kExitOk;
  }
  if (!have_command) {
    err << "error: run.command: no command given\n" << app.help();
    return kExitValidation;
  }
  return execute(cfg, out, err);
}

}  // namespace ecofire::cli
