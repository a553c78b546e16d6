#pragma once

// Vegetation / rainfall / bushfire reaction model: parameters, reaction terms,
// equilibria and Jacobians.
//
//   f' = f (alpha v - beta w)          + c f_xx
//   v' = v (zeta w - eta f)
//   w' = gamma - delta v w - epsilon w + d w_xx
//
// f is fire intensity, v vegetation, w water availability.

#include <Eigen/Dense>

#include <array>
#include <string_view>

namespace ecofire {

// Plain, unvalidated parameter bundle. Use ModelParams for anything that
// computes.
struct Rates {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;  // rainfall rate
  double delta = 1.0;
  double epsilon = 1.0;  // evaporation fraction per unit time
  double eta = 1.0;
  double zeta = 1.0;
  double c = 1.0;  // fire diffusion
  double d = 1.0;  // water diffusion
  double ell = 0.0;  // vegetation competition

  bool operator==(const Rates&) const = default;
};

// Names accepted by Rates::get / set, in declaration order.
inline constexpr std::array<std::string_view, 10> kRateNames = {
    "alpha", "beta", "gamma", "delta", "epsilon", "eta", "zeta", "c", "d", "ell"};

double get_rate(const Rates& r, std::string_view name);
void set_rate(Rates& r, std::string_view name, double value);

// Validated, immutable parameter record. The seven reaction rates are strictly
// positive and finite; c, d and ell are nonnegative and finite.
class ModelParams {
public:
  explicit ModelParams(const Rates& rates);

  static ModelParams all_ones() { return ModelParams(Rates{}); }

  double alpha() const noexcept { return r_.alpha; }
  double beta() const noexcept { return r_.beta; }
  double gamma() const noexcept { return r_.gamma; }
  double delta() const noexcept { return r_.delta; }
  double epsilon() const noexcept { return r_.epsilon; }
  double eta() const noexcept { return r_.eta; }
  double zeta() const noexcept { return r_.zeta; }
  double c() const noexcept { return r_.c; }
  double d() const noexcept { return r_.d; }
  double ell() const noexcept { return r_.ell; }

  const Rates& rates() const noexcept { return r_; }

  // Copy with a single field replaced (revalidated).
  ModelParams with(std::string_view name, double value) const;

  bool operator==(const ModelParams&) const = default;

private:
  Rates r_;
};

struct State {
  double f = 0.0;
  double v = 0.0;
  double w = 0.0;

  Eigen::Vector3d vec() const { return {f, v, w}; }
  static State from(const Eigen::Vector3d& x) { return {x[0], x[1], x[2]}; }

  friend State operator+(const State& a, const State& b) { return {a.f + b.f, a.v + b.v, a.w + b.w}; }
  friend State operator-(const State& a, const State& b) { return {a.f - b.f, a.v - b.v, a.w - b.w}; }
  friend State operator*(double s, const State& a) { return {s * a.f, s * a.v, s * a.w}; }
  bool operator==(const State&) const = default;
};

double norm(const State& s);

enum class EquilibriumKind { Trivial, Coexistence };

struct Equilibrium {
  EquilibriumKind kind;
  State point;
};

std::string_view to_string(EquilibriumKind kind);

// (f (alpha v - beta w), v (zeta w - eta f), gamma - delta v w - epsilon w)
State reaction_rhs(const State& s, const ModelParams& p);

// Water level of the coexistence state, in the cancellation-free form
// 2 alpha gamma / (sqrt(alpha^2 eps^2 + 4 alpha beta delta gamma) + alpha eps).
double coexistence_water(const ModelParams& p);

State trivial_state(const ModelParams& p);
State coexistence_state(const ModelParams& p);

struct EquilibriumPair {
  Equilibrium trivial;
  Equilibrium coexistence;
};

EquilibriumPair equilibria(const ModelParams& p);

// Jacobian of the reaction terms (diffusion excluded).
Eigen::Matrix3d jacobian(const State& s, const ModelParams& p);

}  // namespace ecofire
