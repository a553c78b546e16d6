#include "ecofire/simulation.hpp"

#include "ecofire/errors.hpp"
#include "ecofire/stability.hpp"

#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace ecofire {

namespace odeint = boost::numeric::odeint;

namespace {

constexpr double kNegativityThreshold = -1e-9;
constexpr double kMinAdaptiveStep = 1e-14;

// Advances x from t0 through each time in `stops` (sorted, > t0), landing on
// every one exactly. `observe(t, x, stop_index)` runs after each accepted
// step; stop_index is -1 for intermediate steps.
template <class StateT>
bool all_finite(const StateT& x) {
  return std::all_of(std::begin(x), std::end(x), [](double u) { return std::isfinite(u); });
}

template <class StateT, class System, class Observer>
void advance(System&& sys, StateT& x, double t0, const std::vector<double>& stops,
             const IntegratorConfig& cfg, double max_dt, Observer&& observe) {
  double t = t0;
  double dt = std::min(cfg.dt, max_dt);

  if (cfg.method == IntegratorMethod::RK4Fixed) {
    odeint::runge_kutta4<StateT> stepper;
    for (std::size_t s = 0; s < stops.size(); ++s) {
      const double start = t;
      const double span = stops[s] - start;
      const auto steps = static_cast<long>(std::max(1.0, std::ceil(span / dt - 1e-9)));
      const double h = span / static_cast<double>(steps);
      for (long i = 0; i < steps; ++i) {
        stepper.do_step(sys, x, t, h);
        t = i + 1 == steps ? stops[s] : start + h * static_cast<double>(i + 1);
        observe(t, x, i + 1 == steps ? static_cast<long>(s) : -1L);
      }
    }
    return;
  }

  auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<StateT>>(cfg.atol, cfg.rtol);
  StateT trial = x;
  for (std::size_t s = 0; s < stops.size(); ++s) {
    const double stop = stops[s];
    while (stop - t > 1e-14 * std::max(1.0, std::abs(stop))) {
      const bool truncated = stop - t < dt;
      double h = std::min({dt, stop - t, max_dt});
      const double before = t;
      trial = x;
      auto result = stepper.try_step(sys, trial, t, h);
      // The error estimate is NaN once the state overflows, which the
      // controller would accept.
      if (result == odeint::success && !all_finite(trial)) {
        h = 0.2 * (t - before);
        t = before;
        stepper.reset();  // drop the cached derivative of the rejected state
        result = odeint::fail;
      }
      if (result == odeint::success) {
        std::swap(x, trial);
        dt = truncated ? std::max(dt, std::min(h, max_dt)) : std::min(h, max_dt);
        if (stop - t <= 1e-14 * std::max(1.0, std::abs(stop))) {
          t = stop;
          observe(t, x, static_cast<long>(s));
        } else {
          observe(t, x, -1L);
        }
      } else {
        if (h < kMinAdaptiveStep) {
          throw StepFailure("adaptive step underflow at t = " + std::to_string(before));
        }
        dt = h;
      }
    }
  }
}

}  // namespace

std::string_view to_string(IntegratorMethod m) {
  return m == IntegratorMethod::RK4Fixed ? "rk4" : "rk45";
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt", "must be finite and > 0");
  if (!(t_final > 0.0) || !std::isfinite(t_final)) throw ValidationError("t_final", "must be finite and > 0");
  if (method == IntegratorMethod::RK45Adaptive) {
    if (!(rtol > 0.0)) throw ValidationError("rtol", "must be > 0");
    if (!(atol > 0.0)) throw ValidationError("atol", "must be > 0");
  }
}

Trajectory integrate_ode(const State& s0, const ModelParams& p, const IntegratorConfig& cfg) {
  cfg.validate();
  using Vec = std::array<double, 3>;
  auto rhs = [&p](const Vec& x, Vec& dxdt, double) {
    const State d = reaction_rhs({x[0], x[1], x[2]}, p);
    dxdt = {d.f, d.v, d.w};
  };

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(s0);
  auto flag = [&traj](const State& s) {
    if (s.f < kNegativityThreshold || s.v < kNegativityThreshold || s.w < kNegativityThreshold) {
      traj.negativity_flag = true;
    }
  };
  flag(s0);

  Vec x{s0.f, s0.v, s0.w};
  advance(rhs, x, 0.0, {cfg.t_final}, cfg, std::numeric_limits<double>::infinity(),
          [&](double t, const Vec& y, long) {
            traj.times.push_back(t);
            traj.states.push_back({y[0], y[1], y[2]});
            flag(traj.states.back());
          });
  return traj;
}

void FieldState::validate() const {
  if (grid_points < 8) throw ValidationError("grid_points", "must be >= 8");
  if (!(domain_length > 0.0) || !std::isfinite(domain_length)) {
    throw ValidationError("domain_length", "must be finite and > 0");
  }
  if (f.size() != grid_points || v.size() != grid_points || w.size() != grid_points) {
    throw ValidationError("field", "component sizes must equal grid_points");
  }
}

FieldState FieldState::uniform(std::size_t n, double length, const State& s) {
  FieldState out{n, length, std::vector<double>(n, s.f), std::vector<double>(n, s.v),
                 std::vector<double>(n, s.w), 0.0};
  out.validate();
  return out;
}

double diffusion_dt_limit(const FieldState& field, const ModelParams& p) {
  const double diff = std::max(p.c(), p.d());
  if (diff == 0.0) return std::numeric_limits<double>::infinity();
  const double h = field.spacing();
  return h * h / (2.0 * diff);
}

PdeRun simulate_pde(const FieldState& field0, const ModelParams& p, const PdeConfig& cfg) {
  field0.validate();
  cfg.integrator.validate();
  if (p.ell() != 0.0) {
    throw ValidationError("ell", "the competition term is not supported by the PDE integrator");
  }

  const double t0 = field0.time;
  const double t_end = t0 + cfg.integrator.t_final;
  std::vector<double> requested = cfg.snapshot_times;
  if (requested.empty()) requested.push_back(t_end);
  std::sort(requested.begin(), requested.end());
  for (const double t : requested) {
    if (!(t >= t0 && t <= t_end * (1.0 + 1e-12))) {
      throw ValidationError("snapshot_times", "must lie in [start, start + t_final]");
    }
  }

  PdeRun run;
  run.dt_limit = diffusion_dt_limit(field0, p);
  if (cfg.integrator.dt > run.dt_limit) {
    if (!cfg.clamp_dt) {
      throw CflViolation("dt", "exceeds the explicit diffusion bound h^2/(2 max(c,d)) = " +
                                   std::to_string(run.dt_limit));
    }
    run.dt_clamped = true;
  }

  const std::size_t n = field0.grid_points;
  const double inv_h2 = 1.0 / (field0.spacing() * field0.spacing());
  using Vec = std::vector<double>;

  auto rhs = [&](const Vec& x, Vec& dxdt, double) {
    const double* f = x.data();
    const double* v = f + n;
    const double* w = v + n;
    double* df = dxdt.data();
    double* dv = df + n;
    double* dw = dv + n;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t im = i == 0 ? n - 1 : i - 1;
      const std::size_t ip = i + 1 == n ? 0 : i + 1;
      const State r = reaction_rhs({f[i], v[i], w[i]}, p);
      df[i] = r.f + p.c() * (f[im] - 2.0 * f[i] + f[ip]) * inv_h2;
      dv[i] = r.v;
      dw[i] = r.w + p.d() * (w[im] - 2.0 * w[i] + w[ip]) * inv_h2;
    }
  };

  auto unpack = [&](const Vec& x, double t) {
    FieldState s{n, field0.domain_length, Vec(x.begin(), x.begin() + n),
                 Vec(x.begin() + n, x.begin() + 2 * n), Vec(x.begin() + 2 * n, x.end()), t};
    return s;
  };

  Vec x;
  x.reserve(3 * n);
  x.insert(x.end(), field0.f.begin(), field0.f.end());
  x.insert(x.end(), field0.v.begin(), field0.v.end());
  x.insert(x.end(), field0.w.begin(), field0.w.end());
  run.negativity_flag = std::any_of(x.begin(), x.end(), [](double u) { return u < kNegativityThreshold; });

  std::vector<double> stops;
  for (const double t : requested) {
    if (t <= t0) {
      run.snapshots.push_back(unpack(x, t0));
    } else if (stops.empty() || t > stops.back()) {
      stops.push_back(t);
    }
  }
  // Repeated requests for the same time each get a snapshot.
  auto copies = [&](double t) { return std::count(requested.begin(), requested.end(), t); };

  if (!stops.empty()) {
    advance(rhs, x, t0, stops, cfg.integrator, run.dt_limit, [&](double t, const Vec& y, long stop) {
      if (!run.negativity_flag &&
          std::any_of(y.begin(), y.end(), [](double u) { return u < kNegativityThreshold; })) {
        run.negativity_flag = true;
      }
      if (stop >= 0) {
        for (long c = copies(stops[static_cast<std::size_t>(stop)]); c > 0; --c) {
          run.snapshots.push_back(unpack(y, t));
        }
      }
    });
  }
  return run;
}

Eigen::Matrix<double, 6, 6> DecoupledModeSystem::matrix() const {
  Eigen::Matrix<double, 6, 6> m = Eigen::Matrix<double, 6, 6>::Zero();
  m.topLeftCorner<3, 3>() = sine_block;
  m.bottomRightCorner<3, 3>() = cosine_block;
  return m;
}

DecoupledModeSystem linearized_mode_system(const ModelParams& p, double mu) {
  const Eigen::Matrix3d a = mode_matrix(p, mu);
  return {a, a};
}

double mode_wavenumber(double domain_length, int mode) {
  return 2.0 * std::numbers::pi * mode / domain_length;
}

double discrete_mode_mu(std::size_t n, double domain_length, int mode) {
  const double h = domain_length / static_cast<double>(n);
  const double s = std::sin(std::numbers::pi * mode / static_cast<double>(n));
  return 4.0 * s * s / (h * h);
}

namespace {

void check_mode(std::size_t n, int mode) {
  if (mode < 1 || 2 * static_cast<std::size_t>(mode) >= n) {
    throw ValidationError("mode", "must satisfy 1 <= mode < N/2");
  }
}

}  // namespace

FieldState mode_field(std::size_t n, double domain_length, int mode, const State& base,
                      const ModeAmplitudes& amplitudes) {
  check_mode(n, mode);
  FieldState out = FieldState::uniform(n, domain_length, base);
  const double k = mode_wavenumber(domain_length, mode);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = std::sin(k * out.x(i));
    const double c = std::cos(k * out.x(i));
    const Eigen::Vector3d d = amplitudes.sine * s + amplitudes.cosine * c;
    out.f[i] += d[0];
    out.v[i] += d[1];
    out.w[i] += d[2];
  }
  return out;
}

ModeAmplitudes project_mode(const FieldState& field, const State& base, int mode) {
  field.validate();
  check_mode(field.grid_points, mode);
  const double k = mode_wavenumber(field.domain_length, mode);
  ModeAmplitudes out;
  for (std::size_t i = 0; i < field.grid_points; ++i) {
    const double s = std::sin(k * field.x(i));
    const double c = std::cos(k * field.x(i));
    const Eigen::Vector3d d(field.f[i] - base.f, field.v[i] - base.v, field.w[i] - base.w);
    out.sine += d * s;
    out.cosine += d * c;
  }
  const double scale = 2.0 / static_cast<double>(field.grid_points);
  out.sine *= scale;
  out.cosine *= scale;
  return out;
}

ModeAmplitudes evolve_mode(const DecoupledModeSystem& system, const ModeAmplitudes& a0, double t) {
  Eigen::Matrix<double, 6, 1> x;
  x << a0.sine, a0.cosine;
  const Eigen::Matrix<double, 6, 6> m = system.matrix() * t;
  const Eigen::Matrix<double, 6, 1> y = m.exp() * x;
  return {y.head<3>(), y.tail<3>()};
}

double field_distance(const FieldState& a, const FieldState& b) {
  a.validate();
  b.validate();
  if (a.grid_points != b.grid_points) throw ValidationError("field", "grid sizes differ");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.grid_points; ++i) {
    const double df = a.f[i] - b.f[i];
    const double dv = a.v[i] - b.v[i];
    const double dw = a.w[i] - b.w[i];
    sum += df * df + dv * dv + dw * dw;
  }
  return std::sqrt(a.spacing() * sum);
}

double field_distance(const FieldState& a, const State& uniform) {
  return field_distance(a, FieldState::uniform(a.grid_points, a.domain_length, uniform));
}

}  // namespace ecofire
