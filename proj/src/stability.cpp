#include "ecofire/stability.hpp"

#include "ecofire/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>

namespace ecofire {

namespace {

constexpr double kMaxBasisCondition = 1e12;

bool has_diffusion(const ModelParams& p) { return p.c() > 0.0 || p.d() > 0.0; }

// Unique nonnegative root of an increasing Phi with Phi(0) < 0: bracket by
// doubling, bisect to width 1e-12, then Newton polish.
double increasing_root(const PhiCubic& phi) {
  double lo = 0.0;
  double hi = 1.0;
  while (phi(hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NumericalError("Phi root bracket diverged");
  }
  while (hi - lo > 1e-12 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (phi(mid) > 0.0 ? hi : lo) = mid;
  }
  double mu = 0.5 * (lo + hi);
  for (int it = 0; it < 3; ++it) {
    const double slope = phi.derivative(mu);
    if (!(slope > 0.0)) break;
    const double next = mu - phi(mu) / slope;
    if (!(next >= 0.0) || std::abs(phi(next)) >= std::abs(phi(mu))) break;
    mu = next;
  }
  return mu;
}

// Scale so the largest-magnitude component is real positive, then normalize.
Eigen::Vector3cd normalize_phase(Eigen::Vector3cd x) {
  Eigen::Index k = 0;
  x.cwiseAbs().maxCoeff(&k);
  const Complex pivot = x[k];
  x *= std::conj(pivot) / std::abs(pivot);
  x[k] = Complex(x[k].real(), 0.0);
  return x.normalized();
}

// Eigenvector of `a` for eigenvalue `lambda` by inverse iteration. The shift
// is nudged off lambda so the LU stays nonsingular.
Eigen::Vector3cd eigenvector_for(const Eigen::Matrix3d& a, Complex lambda) {
  const double scale = 1.0 + a.cwiseAbs().maxCoeff() + std::abs(lambda);
  const Complex shift = lambda + Complex(1e-10 * scale, 0.0);
  const Eigen::Matrix3cd m = a.cast<Complex>() - shift * Eigen::Matrix3cd::Identity();
  const Eigen::PartialPivLU<Eigen::Matrix3cd> lu(m);
  Eigen::Vector3cd x(Complex(1.0, 0.0), Complex(0.7, 0.3), Complex(0.4, -0.2));
  for (int it = 0; it < 3; ++it) {
    x = lu.solve(x);
    x /= x.norm();
  }
  return normalize_phase(x);
}

double condition_number(const Eigen::Matrix3cd& m) {
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Eigen::MatrixXcd{m});
  const Eigen::VectorXd& s = svd.singularValues();
  if (s[2] == 0.0) return std::numeric_limits<double>::infinity();
  return s[0] / s[2];
}

void check_competition_inputs(const ModelParams& p, double mu, double varsigma) {
  if (!(varsigma > 0.0 && varsigma < p.epsilon())) {
    throw VarsigmaOutOfRange("varsigma", "must lie in (0, epsilon)");
  }
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ValidationError("mu", "must be finite and > 0");
}

}  // namespace

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::Stable: return "Stable";
    case Classification::Unstable: return "Unstable";
    case Classification::Neutral: return "Neutral";
  }
  return "?";
}

double upsilon(const ModelParams& p) {
  const double a = p.alpha();
  const double root = std::sqrt(a * a * p.epsilon() * p.epsilon() +
                                4.0 * a * p.beta() * p.gamma() * p.delta());
  return 2.0 * p.beta() * p.gamma() * (p.delta() - a) / (root + a * p.epsilon()) + p.epsilon();
}

double upsilon_tolerance(const ModelParams& p) {
  const State e1 = coexistence_state(p);
  return marginal_tolerance(mode_coefficients(p, 0.0)) / (p.delta() * p.zeta() * e1.v * e1.w);
}

StabilityVerdict classify_equilibrium(EquilibriumKind which, const ModelParams& p) {
  const double ups = upsilon(p);
  if (which == EquilibriumKind::Trivial) {
    // J(E0) is lower triangular.
    RootSet eig;
    eig.roots = {Complex(-p.beta() * p.gamma() / p.epsilon(), 0.0),
                 Complex(p.gamma() * p.zeta() / p.epsilon(), 0.0), Complex(-p.epsilon(), 0.0)};
    std::sort(eig.roots.begin(), eig.roots.end(),
              [](const Complex& x, const Complex& y) { return x.real() < y.real(); });
    return {ups, Classification::Unstable, eig};
  }

  const double tol = upsilon_tolerance(p);
  Classification cls = Classification::Neutral;
  if (ups > tol) cls = Classification::Stable;
  else if (ups < -tol) cls = Classification::Unstable;
  return {ups, cls, solve_cubic(mode_coefficients(p, 0.0))};
}

Eigen::Matrix3d mode_matrix(const ModelParams& p, double mu) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw ValidationError("mu", "must be finite and >= 0");
  Eigen::Matrix3d a = jacobian(coexistence_state(p), p);
  // J(E1) has exact zeros on the first two diagonal entries.
  a(0, 0) = -p.c() * mu;
  a(1, 1) = 0.0;
  a(2, 2) -= p.d() * mu;
  return a;
}

MonicCubic mode_coefficients(const ModelParams& p, double mu) {
  const State e = coexistence_state(p);
  const double damp = p.delta() * e.v + p.epsilon();
  const double fire_veg = p.alpha() * p.eta() * e.f * e.v;
  const double veg_water = p.delta() * p.zeta() * e.v * e.w;
  return {(p.c() + p.d()) * mu + damp,
          p.c() * mu * (p.d() * mu + damp) + fire_veg + veg_water,
          p.c() * mu * veg_water + fire_veg * (damp + p.d() * mu) +
              p.beta() * p.delta() * p.eta() * e.f * e.v * e.w};
}

PhiCubic phi_cubic(const ModelParams& p) {
  const State e = coexistence_state(p);
  const double c = p.c();
  const double d = p.d();
  const double damp = p.delta() * e.v + p.epsilon();
  const double veg_water = p.delta() * p.zeta() * e.v * e.w;
  return {c * d * (c + d), c * (c + 2.0 * d) * damp,
          c * damp * damp + d * veg_water + c * p.alpha() * p.eta() * e.f * e.v,
          veg_water * upsilon(p)};
}

std::vector<DispersionSample> dispersion_curve(const ModelParams& p, std::span<const double> mu_grid) {
  std::vector<DispersionSample> out;
  out.reserve(mu_grid.size());
  for (const double mu : mu_grid) {
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw ValidationError("mu", "must be finite and >= 0");
    const MonicCubic a = mode_coefficients(p, mu);
    const bool stable = hurwitz_negative(a) == HurwitzVerdict::AllNegativeRealPart;
    out.push_back({mu, a.a2, a.a1, a.a0, a.hurwitz_gap(), solve_cubic(a), stable});
  }
  return out;
}

StabilizationThreshold find_k0(const ModelParams& p) {
  if (!has_diffusion(p)) throw DegenerateDiffusion();
  const PhiCubic phi = phi_cubic(p);
  if (phi.b0 >= 0.0) return {0.0, 0.0};
  const double mu = increasing_root(phi);
  return {mu, std::sqrt(mu)};
}

WaveTrain find_wavetrain(const ModelParams& p) {
  if (!has_diffusion(p)) throw DegenerateDiffusion();
  const PhiCubic phi = phi_cubic(p);
  if (phi.b0 >= 0.0) throw NoWaveTrain();

  WaveTrain wt;
  wt.mu_star = increasing_root(phi);
  const MonicCubic a = mode_coefficients(p, wt.mu_star);
  wt.sigma_star = std::sqrt(a.a1);
  wt.decay_eigenvalue = -a.a2;

  const Eigen::Matrix3d am = mode_matrix(p, wt.mu_star);
  wt.eigvec = eigenvector_for(am, Complex(0.0, wt.sigma_star));
  wt.decay_eigvec = eigenvector_for(am, Complex(wt.decay_eigenvalue, 0.0)).real().normalized();
  wt.span_re = wt.eigvec.real();
  wt.span_im = wt.eigvec.imag();
  return wt;
}

ModeEvolution mode_attraction(const ModelParams& p, double mu, const Eigen::Vector3cd& theta0, double t) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ValidationError("mu", "must be finite and > 0");
  if (!(t > 0.0) || !std::isfinite(t)) throw ValidationError("t", "must be finite and > 0");

  const Eigen::Matrix3d am = mode_matrix(p, mu);
  ModeEvolution out;

  const MonicCubic coeffs = mode_coefficients(p, mu);
  if (const auto fac = imaginary_root_factorization(coeffs)) {
    const Eigen::Vector3cd x = eigenvector_for(am, Complex(0.0, fac->sigma));
    const Eigen::Vector3cd omega = eigenvector_for(am, Complex(fac->real_root, 0.0));
    Eigen::Matrix3cd basis;
    basis.col(0) = x;
    basis.col(1) = x.conjugate();
    basis.col(2) = omega;
    if (condition_number(basis) <= kMaxBasisCondition) {
      const Eigen::Vector3cd c = basis.partialPivLu().solve(theta0);
      const Complex rot = std::exp(Complex(0.0, fac->sigma * t));
      out.theta = c[0] * rot * basis.col(0) + c[1] * std::conj(rot) * basis.col(1) +
                  c[2] * std::exp(fac->real_root * t) * basis.col(2);
      out.spectral = true;
      return out;
    }
    out.defective = true;
  }

  const Eigen::Matrix3d e = (am * t).exp();
  out.theta = e.cast<Complex>() * theta0;
  return out;
}

Eigen::Matrix3d competition_matrix(const ModelParams& p, double mu, double varsigma) {
  check_competition_inputs(p, mu, varsigma);
  Eigen::Matrix3d l = mode_matrix(p, mu);
  l(1, 1) += varsigma;
  return l;
}

MonicCubic competition_coefficients(const ModelParams& p, double mu, double varsigma) {
  check_competition_inputs(p, mu, varsigma);
  const State e = coexistence_state(p);
  const MonicCubic a = mode_coefficients(p, mu);
  const double damp = p.delta() * e.v + p.epsilon();
  return {a.a2 - varsigma, a.a1 - varsigma * (damp + (p.c() + p.d()) * mu),
          a.a0 - p.c() * mu * varsigma * (damp + p.d() * mu)};
}

CompetitionSpectrum competition_instability(const ModelParams& p, double mu, double varsigma) {
  CompetitionSpectrum out;
  out.q = competition_coefficients(p, mu, varsigma);
  out.varsigma = varsigma;
  out.gamma = p.gamma();
  out.mu = mu;
  out.ell = varsigma / (mu * coexistence_state(p).v);
  out.eigenvalues = solve_cubic(out.q);
  out.unstable = out.eigenvalues.max_real() > marginal_tolerance(out.q);

  double best = std::numeric_limits<double>::infinity();
  out.continuation_root = std::numeric_limits<double>::quiet_NaN();
  for (const Complex& r : out.eigenvalues) {
    if (r.imag() != 0.0) continue;
    if (std::abs(r.real() - varsigma) < best) {
      best = std::abs(r.real() - varsigma);
      out.continuation_root = r.real();
    }
  }
  return out;
}

}  // namespace ecofire
