#include "ecofire/model.hpp"

#include "ecofire/errors.hpp"

#include <cmath>
#include <string>

namespace ecofire {

namespace {

template <class R>
auto rate_slot(R& r, std::string_view name) -> decltype(&r.alpha) {
  if (name == "alpha") return &r.alpha;
  if (name == "beta") return &r.beta;
  if (name == "gamma") return &r.gamma;
  if (name == "delta") return &r.delta;
  if (name == "epsilon") return &r.epsilon;
  if (name == "eta") return &r.eta;
  if (name == "zeta") return &r.zeta;
  if (name == "c") return &r.c;
  if (name == "d") return &r.d;
  if (name == "ell") return &r.ell;
  return nullptr;
}

void require_positive(double value, const char* name) {
  if (!std::isfinite(value) || !(value > 0.0)) {
    throw ValidationError(name, "must be finite and > 0 (got " + std::to_string(value) + ")");
  }
}

void require_nonnegative(double value, const char* name) {
  if (!std::isfinite(value) || !(value >= 0.0)) {
    throw ValidationError(name, "must be finite and >= 0 (got " + std::to_string(value) + ")");
  }
}

}  // namespace

double get_rate(const Rates& r, std::string_view name) {
  const double* slot = rate_slot(r, name);
  if (slot == nullptr) throw ValidationError(std::string(name), "unknown parameter");
  return *slot;
}

void set_rate(Rates& r, std::string_view name, double value) {
  double* slot = rate_slot(r, name);
  if (slot == nullptr) throw ValidationError(std::string(name), "unknown parameter");
  *slot = value;
}

ModelParams::ModelParams(const Rates& rates) : r_(rates) {
  require_positive(r_.alpha, "alpha");
  require_positive(r_.beta, "beta");
  require_positive(r_.gamma, "gamma");
  require_positive(r_.delta, "delta");
  require_positive(r_.epsilon, "epsilon");
  require_positive(r_.eta, "eta");
  require_positive(r_.zeta, "zeta");
  require_nonnegative(r_.c, "c");
  require_nonnegative(r_.d, "d");
  require_nonnegative(r_.ell, "ell");
}

ModelParams ModelParams::with(std::string_view name, double value) const {
  Rates r = r_;
  set_rate(r, name, value);
  return ModelParams(r);
}

double norm(const State& s) { return std::sqrt(s.f * s.f + s.v * s.v + s.w * s.w); }

std::string_view to_string(EquilibriumKind kind) {
  return kind == EquilibriumKind::Trivial ? "E0" : "E1";
}

State reaction_rhs(const State& s, const ModelParams& p) {
  return {s.f * (p.alpha() * s.v - p.beta() * s.w),
          s.v * (p.zeta() * s.w - p.eta() * s.f),
          p.gamma() - p.delta() * s.v * s.w - p.epsilon() * s.w};
}

double coexistence_water(const ModelParams& p) {
  const double a = p.alpha();
  const double root = std::sqrt(a * a * p.epsilon() * p.epsilon() +
                                4.0 * a * p.beta() * p.delta() * p.gamma());
  return 2.0 * a * p.gamma() / (root + a * p.epsilon());
}

State trivial_state(const ModelParams& p) { return {0.0, 0.0, p.gamma() / p.epsilon()}; }

State coexistence_state(const ModelParams& p) {
  const double w = coexistence_water(p);
  return {p.zeta() * w / p.eta(), p.beta() * w / p.alpha(), w};
}

EquilibriumPair equilibria(const ModelParams& p) {
  return {{EquilibriumKind::Trivial, trivial_state(p)},
          {EquilibriumKind::Coexistence, coexistence_state(p)}};
}

Eigen::Matrix3d jacobian(const State& s, const ModelParams& p) {
  Eigen::Matrix3d j;
  j << p.alpha() * s.v - p.beta() * s.w, p.alpha() * s.f, -p.beta() * s.f,
      -p.eta() * s.v, p.zeta() * s.w - p.eta() * s.f, p.zeta() * s.v,
      0.0, -p.delta() * s.w, -p.delta() * s.v - p.epsilon();
  return j;
}

}  // namespace ecofire
