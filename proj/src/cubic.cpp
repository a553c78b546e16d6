#include "ecofire/cubic.hpp"

#include "ecofire/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ecofire {

namespace {

Complex derivative(const MonicCubic& p, Complex t) { return (3.0 * t + 2.0 * p.a2) * t + p.a1; }

// One Newton step, kept only if it lowers the residual.
Complex polish(const MonicCubic& p, Complex t) {
  const Complex dp = derivative(p, t);
  if (std::abs(dp) == 0.0) return t;
  const Complex next = t - p(t) / dp;
  return std::abs(p(next)) < std::abs(p(t)) ? next : t;
}

double polish(const MonicCubic& p, double t) {
  const double dp = (3.0 * t + 2.0 * p.a2) * t + p.a1;
  if (dp == 0.0) return t;
  const double next = t - p(t) / dp;
  return std::abs(p(next)) < std::abs(p(t)) ? next : t;
}

bool lex_less(const Complex& x, const Complex& y) {
  if (x.real() != y.real()) return x.real() < y.real();
  return x.imag() < y.imag();
}

}  // namespace

double marginal_tolerance(const MonicCubic& p) {
  return 1e-9 * (1.0 + std::abs(p.a1 * p.a2) + std::abs(p.a0));
}

double RootSet::max_real() const {
  return std::max({roots[0].real(), roots[1].real(), roots[2].real()});
}

RootSet solve_cubic(const MonicCubic& p) {
  if (!std::isfinite(p.a2) || !std::isfinite(p.a1) || !std::isfinite(p.a0)) {
    throw ValidationError("cubic", "coefficients must be finite");
  }

  // Depressed form x^3 + P x + Q with t = x - a2/3.
  const double shift = p.a2 / 3.0;
  const double P = p.a1 - p.a2 * shift;
  const double Q = (2.0 * shift * shift - p.a1) * shift + p.a0;
  const double half_q = Q / 2.0;
  const double third_p = P / 3.0;
  const double disc = half_q * half_q + third_p * third_p * third_p;

  RootSet out;
  if (disc > 0.0) {
    // One real root; take it from Cardano in the cancellation-free arrangement,
    // then deflate to a quadratic for the conjugate pair.
    const double big = -std::copysign(std::cbrt(std::abs(half_q) + std::sqrt(disc)), half_q);
    const double small = big != 0.0 ? -third_p / big : 0.0;
    const double r = polish(p, big + small - shift);

    // p(t) = (t - r)(t^2 + b t + e)
    const double b = p.a2 + r;
    const double e = std::abs(r) > 1.0 ? -p.a0 / r : p.a1 + r * b;
    const double qdisc = b * b - 4.0 * e;
    if (qdisc < 0.0) {
      Complex z(-b / 2.0, std::sqrt(-qdisc) / 2.0);
      z = polish(p, z);
      if (z.imag() < 0.0) z = std::conj(z);
      out.roots = {Complex(r, 0.0), z, std::conj(z)};
    } else {
      // Rounding can leave a nominally complex pair as two close reals.
      const double qq = -0.5 * (b + std::copysign(std::sqrt(qdisc), b));
      const double r2 = qq != 0.0 ? polish(p, qq) : 0.0;
      const double r3 = qq != 0.0 ? polish(p, e / qq) : polish(p, -b / 2.0);
      out.roots = {Complex(r, 0.0), Complex(r2, 0.0), Complex(r3, 0.0)};
    }
  } else if (P == 0.0) {
    const double r = -shift;
    out.roots = {Complex(r, 0.0), Complex(r, 0.0), Complex(r, 0.0)};
  } else {
    // Three real roots: trigonometric form.
    const double m = 2.0 * std::sqrt(-third_p);
    const double arg = std::clamp(3.0 * Q / (P * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) {
      const double x = m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0);
      out.roots[k] = Complex(polish(p, x - shift), 0.0);
    }
  }

  std::sort(out.roots.begin(), out.roots.end(), lex_less);
  return out;
}

std::string_view to_string(HurwitzVerdict v) {
  switch (v) {
    case HurwitzVerdict::AllNegativeRealPart: return "AllNegativeRealPart";
    case HurwitzVerdict::Marginal: return "Marginal";
    case HurwitzVerdict::HasNonnegativeRealPart: return "HasNonnegativeRealPart";
  }
  return "?";
}

HurwitzVerdict hurwitz_negative(const MonicCubic& p) {
  if (!(p.a2 > 0.0)) throw HypothesisViolated("a2", "must be > 0");
  if (!(p.a1 > 0.0)) throw HypothesisViolated("a1", "must be > 0");
  if (!(p.a0 > 0.0)) throw HypothesisViolated("a0", "must be > 0");
  const double gap = p.hurwitz_gap();
  if (std::abs(gap) <= marginal_tolerance(p)) return HurwitzVerdict::Marginal;
  return gap > 0.0 ? HurwitzVerdict::AllNegativeRealPart : HurwitzVerdict::HasNonnegativeRealPart;
}

std::optional<ImaginaryRootFactorization> imaginary_root_factorization(const MonicCubic& p) {
  if (!(p.a1 > 0.0)) return std::nullopt;
  if (std::abs(p.hurwitz_gap()) > marginal_tolerance(p)) return std::nullopt;
  return ImaginaryRootFactorization{std::sqrt(p.a1), -p.a2};
}

}  // namespace ecofire
