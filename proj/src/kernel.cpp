#include "ecofire/kernel.hpp"

#include "ecofire/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace ecofire {

namespace {

constexpr double kRelativeCutoff = 1e-16;

// |S^{n-1}| from |S^0| = 2, |S^1| = 2 pi and |S^{n-1}| = 2 pi |S^{n-3}| / (n - 2).
double unit_sphere_area(int n) {
  double area = n % 2 == 1 ? 2.0 : 2.0 * std::numbers::pi;
  for (int m = n % 2 == 1 ? 3 : 4; m <= n; m += 2) area *= 2.0 * std::numbers::pi / (m - 2);
  return area;
}

}  // namespace

std::vector<double> pizzetti_constants(int n, int j_max) {
  if (n < 1) throw ValidationError("n", "dimension must be >= 1");
  if (j_max < 0 || j_max > 6) throw ValidationError("j_max", "must lie in [0, 6]");
  std::vector<double> out(static_cast<std::size_t>(j_max) + 1);
  out[0] = unit_sphere_area(n);
  for (int j = 1; j <= j_max; ++j) {
    out[j] = out[j - 1] / (2.0 * j * (n + 2.0 * j - 2.0));
  }
  return out;
}

KernelMoments kernel_moments(const std::function<double(double)>& k0, int n, int j_max,
                             const KernelQuadratureOptions& opts) {
  const std::vector<double> c = pizzetti_constants(n, j_max);
  if (!(opts.rel_tol > 0.0)) throw ValidationError("rel_tol", "must be > 0");
  if (!(opts.max_radius > 0.0)) throw ValidationError("max_radius", "must be > 0");

  const double k_origin = k0(0.0);
  if (!std::isfinite(k_origin) || k_origin < 0.0) {
    throw ValidationError("kernel", "K0(0) must be finite and nonnegative");
  }
  // Kernels vanishing at the origin are measured against the largest sampled
  // value instead.
  double reference = k_origin;
  double radius = 1.0;
  for (;;) {
    const double value = k0(radius);
    if (!std::isfinite(value) || value < 0.0) {
      throw ValidationError("kernel", "K0 must be finite and nonnegative (r = " + std::to_string(radius) + ")");
    }
    reference = std::max(reference, value);
    if (value < kRelativeCutoff * reference) break;
    radius *= 2.0;
    if (radius > opts.max_radius) {
      throw SlowDecay("kernel does not decay below 1e-16 K0(0) within radius " +
                      std::to_string(opts.max_radius));
    }
  }

  KernelMoments out;
  out.dimension = n;
  out.truncation_radius = radius;
  using Quadrature = boost::math::quadrature::gauss_kronrod<double, 61>;
  for (int j = 0; j <= j_max; ++j) {
    const double power = n - 1 + 2 * j;
    auto integrand = [&](double r) { return std::pow(r, power) * k0(r); };
    const double integral = Quadrature::integrate(integrand, 0.0, radius, 20, opts.rel_tol);
    out.orders.emplace_back(j, c[j] * integral);
  }
  return out;
}

}  // namespace ecofire
