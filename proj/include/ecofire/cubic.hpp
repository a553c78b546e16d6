#pragma once

// Monic cubics t^3 + a2 t^2 + a1 t + a0: root solver and the two algebraic
// criteria used for stability (Routh-Hurwitz for cubics, and the purely
// imaginary root factorization).

#include <array>
#include <complex>
#include <optional>
#include <string_view>

namespace ecofire {

using Complex = std::complex<double>;

struct MonicCubic {
  double a2 = 0.0;
  double a1 = 0.0;
  double a0 = 0.0;

  Complex operator()(Complex t) const { return ((t + a2) * t + a1) * t + a0; }
  double operator()(double t) const { return ((t + a2) * t + a1) * t + a0; }

  // a1 a2 - a0; positive means stable when all coefficients are positive.
  double hurwitz_gap() const { return a1 * a2 - a0; }

  bool operator==(const MonicCubic&) const = default;
};

// Width of the band around a1 a2 = a0 treated as marginal:
// 1e-9 (1 + |a1 a2| + |a0|). Shared by every verdict in the library.
double marginal_tolerance(const MonicCubic& p);

// Three roots sorted lexicographically by (real, imag). Complex roots come in
// exact conjugate pairs.
struct RootSet {
  std::array<Complex, 3> roots{};

  const Complex& operator[](std::size_t i) const { return roots[i]; }
  auto begin() const { return roots.begin(); }
  auto end() const { return roots.end(); }

  double max_real() const;
};

RootSet solve_cubic(const MonicCubic& p);

enum class HurwitzVerdict { AllNegativeRealPart, Marginal, HasNonnegativeRealPart };

std::string_view to_string(HurwitzVerdict v);

// Requires a0, a1, a2 > 0; throws HypothesisViolated otherwise.
HurwitzVerdict hurwitz_negative(const MonicCubic& p);

struct ImaginaryRootFactorization {
  double sigma;      // roots +- i sigma
  double real_root;  // -a2
};

// Non-empty iff a1 > 0 and a1 a2 = a0 within the marginal band, in which case
// p(t) = (t^2 + a1)(t + a2).
std::optional<ImaginaryRootFactorization> imaginary_root_factorization(const MonicCubic& p);

}  // namespace ecofire
