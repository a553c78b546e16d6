#pragma once

// Linear stability of the coexistence state, with and without diffusion.
//
// A single excited mode with squared wavenumber mu = |k|^2 evolves under the
// mode matrix A(mu) = J(E1) - mu diag(c, 0, d). Its characteristic polynomial
// has coefficients a2(mu), a1(mu), a0(mu), all positive, so stability of the
// mode is decided by the sign of Phi(mu) = a1 a2 - a0, a cubic in mu.

#include "ecofire/cubic.hpp"
#include "ecofire/model.hpp"

#include <Eigen/Dense>

#include <span>
#include <string_view>
#include <vector>

namespace ecofire {

enum class Classification { Stable, Unstable, Neutral };

std::string_view to_string(Classification c);

struct StabilityVerdict {
  double upsilon;
  Classification classification;
  RootSet eigenvalues;
};

// Scalar whose sign decides stability of the coexistence state for the ODE
// system: 2 beta gamma (delta - alpha) / (sqrt(...) + alpha eps) + eps.
double upsilon(const ModelParams& p);

// Half-width of the band around Upsilon = 0 reported as Neutral: the shared
// cubic marginal tolerance rescaled by delta zeta v* w*.
double upsilon_tolerance(const ModelParams& p);

StabilityVerdict classify_equilibrium(EquilibriumKind which, const ModelParams& p);

Eigen::Matrix3d mode_matrix(const ModelParams& p, double mu);

// Closed-form characteristic coefficients of mode_matrix(p, mu).
MonicCubic mode_coefficients(const ModelParams& p, double mu);

struct PhiCubic {
  double b3 = 0.0;
  double b2 = 0.0;
  double b1 = 0.0;
  double b0 = 0.0;

  double operator()(double mu) const { return ((b3 * mu + b2) * mu + b1) * mu + b0; }
  double derivative(double mu) const { return (3.0 * b3 * mu + 2.0 * b2) * mu + b1; }
};

PhiCubic phi_cubic(const ModelParams& p);

struct DispersionSample {
  double mu;
  double a2, a1, a0;
  double phi;
  RootSet eigenvalues;
  bool stable;
};

std::vector<DispersionSample> dispersion_curve(const ModelParams& p, std::span<const double> mu_grid);

struct StabilizationThreshold {
  double mu_threshold;  // Phi(mu) > 0 for every mu > mu_threshold
  double k0;            // sqrt(mu_threshold)
};

// Throws DegenerateDiffusion when c = d = 0.
StabilizationThreshold find_k0(const ModelParams& p);

struct WaveTrain {
  double mu_star;
  double sigma_star;
  Eigen::Vector3cd eigvec;      // unit norm, largest component real positive
  double decay_eigenvalue;      // -a2(mu_star)
  Eigen::Vector3d decay_eigvec; // unit norm real eigenvector for decay_eigenvalue
  Eigen::Vector3d span_re;      // Re eigvec
  Eigen::Vector3d span_im;      // Im eigvec
};

// Throws NoWaveTrain when Upsilon >= 0, DegenerateDiffusion when c = d = 0.
WaveTrain find_wavetrain(const ModelParams& p);

struct ModeEvolution {
  Eigen::Vector3cd theta;
  bool spectral = false;  // evolved in the {X*, conj X*, omega*} eigenbasis
  bool defective = false; // eigenbasis too ill-conditioned, dense exponential used
};

// exp(A(mu) t) theta0. At a wave-train point (mode coefficients marginal with
// a1 > 0) the evolution is done in the eigenbasis; elsewhere a dense
// exponential is used.
ModeEvolution mode_attraction(const ModelParams& p, double mu, const Eigen::Vector3cd& theta0, double t);

// A(mu) with varsigma added at the vegetation diagonal; this is the mode matrix
// of the competition model with ell = varsigma / (mu v*). Requires
// 0 < varsigma < epsilon and mu > 0.
Eigen::Matrix3d competition_matrix(const ModelParams& p, double mu, double varsigma);

// Closed-form characteristic coefficients of competition_matrix.
MonicCubic competition_coefficients(const ModelParams& p, double mu, double varsigma);

struct CompetitionSpectrum {
  double varsigma;
  double gamma;
  double mu;
  double ell;
  MonicCubic q;
  RootSet eigenvalues;
  bool unstable;
  double continuation_root;  // real root of q nearest varsigma
};

CompetitionSpectrum competition_instability(const ModelParams& p, double mu, double varsigma);

}  // namespace ecofire
