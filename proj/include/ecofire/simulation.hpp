#pragma once

// Time integration of the reaction ODEs and of the reaction-diffusion system on
// a 1D periodic domain (method of lines, second-order central Laplacian).

#include "ecofire/model.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <string_view>
#include <vector>

namespace ecofire {

enum class IntegratorMethod { RK4Fixed, RK45Adaptive };

std::string_view to_string(IntegratorMethod m);

struct IntegratorConfig {
  IntegratorMethod method = IntegratorMethod::RK4Fixed;
  double dt = 1e-2;  // fixed step, or initial step for the adaptive method
  double rtol = 1e-8;
  double atol = 1e-10;
  double t_final = 1.0;

  void validate() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  bool negativity_flag = false;  // some component dropped below -1e-9
};

// Records every accepted step. Throws StepFailure if the adaptive step
// underflows below 1e-14.
Trajectory integrate_ode(const State& s0, const ModelParams& p, const IntegratorConfig& cfg);

struct FieldState {
  std::size_t grid_points = 0;
  double domain_length = 0.0;
  std::vector<double> f, v, w;
  double time = 0.0;

  double spacing() const { return domain_length / static_cast<double>(grid_points); }
  double x(std::size_t i) const { return spacing() * static_cast<double>(i); }

  // N >= 8, positive finite length, all three components of size N.
  void validate() const;

  static FieldState uniform(std::size_t n, double length, const State& s);
};

struct PdeConfig {
  IntegratorConfig integrator;
  // Absolute output times in [field0.time, field0.time + t_final]. Empty means
  // a single snapshot at the end.
  std::vector<double> snapshot_times;
  // Reduce dt to the explicit diffusion bound h^2 / (2 max(c, d)) instead of
  // throwing CflViolation.
  bool clamp_dt = true;
};

struct PdeRun {
  std::vector<FieldState> snapshots;
  double dt_limit = 0.0;  // diffusion bound; infinity without diffusion
  bool dt_clamped = false;
  bool negativity_flag = false;
};

double diffusion_dt_limit(const FieldState& field, const ModelParams& p);

// Requires p.ell() == 0.
PdeRun simulate_pde(const FieldState& field0, const ModelParams& p, const PdeConfig& cfg);

// The sine and cosine amplitudes of a single excited mode evolve under two
// identical copies of the mode matrix.
struct DecoupledModeSystem {
  Eigen::Matrix3d sine_block;
  Eigen::Matrix3d cosine_block;

  // Block-diagonal 6x6 form acting on (sine amplitudes, cosine amplitudes).
  Eigen::Matrix<double, 6, 6> matrix() const;
};

DecoupledModeSystem linearized_mode_system(const ModelParams& p, double mu);

// Amplitudes (f, v, w) multiplying sin(kx) and cos(kx).
struct ModeAmplitudes {
  Eigen::Vector3d sine = Eigen::Vector3d::Zero();
  Eigen::Vector3d cosine = Eigen::Vector3d::Zero();

  double norm() const { return std::sqrt(sine.squaredNorm() + cosine.squaredNorm()); }
};

// k = 2 pi m / L for grid mode m.
double mode_wavenumber(double domain_length, int mode);

// Symbol of the discrete periodic Laplacian on mode m: (2/h sin(pi m / N))^2.
// Equals k^2 up to O(h^2).
double discrete_mode_mu(std::size_t n, double domain_length, int mode);

// base + sum over components of sine sin(kx) + cosine cos(kx).
FieldState mode_field(std::size_t n, double domain_length, int mode, const State& base,
                      const ModeAmplitudes& amplitudes);

// Discrete Fourier projection of field - base onto grid mode m.
ModeAmplitudes project_mode(const FieldState& field, const State& base, int mode);

// Linearized prediction exp(D t) applied to the 6-vector of amplitudes.
ModeAmplitudes evolve_mode(const DecoupledModeSystem& system, const ModeAmplitudes& a0, double t);

// sqrt(h sum_i |a_i - b_i|^2) over all three components.
double field_distance(const FieldState& a, const FieldState& b);

// Same norm against a spatially uniform state.
double field_distance(const FieldState& a, const State& uniform);

}  // namespace ecofire
