#pragma once

// Reduction of a radial interaction kernel to a series of iterated Laplacians,
//   int K(y) v(x+y) dy ~ sum_j ell_j Lap^j v(x),
// via the sphere-mean expansion
//   int_{|y|=r} g = sum_j C_{n,j} r^{n-1+2j} Lap^j g(0) + O(r^{n+2N}).

#include <functional>
#include <utility>
#include <vector>

namespace ecofire {

// C_{n,0}, ..., C_{n,j_max}. C_{n,0} is the area of the unit sphere in R^n and
// C_{n,j} = C_{n,j-1} / (2j (n + 2j - 2)). Requires n >= 1, 0 <= j_max <= 6.
std::vector<double> pizzetti_constants(int n, int j_max);

struct KernelMoments {
  int dimension = 1;
  std::vector<std::pair<int, double>> orders;  // (j, ell_j)
  double truncation_radius = 0.0;
};

struct KernelQuadratureOptions {
  double rel_tol = 1e-10;
  // Search for the radius where K0 drops below 1e-16 K0(0) gives up (SlowDecay)
  // beyond this.
  double max_radius = 1e6;
};

// ell_j = C_{n,j} int_0^R r^{n-1+2j} K0(r) dr with R the truncation radius.
KernelMoments kernel_moments(const std::function<double(double)>& k0, int n, int j_max,
                             const KernelQuadratureOptions& opts = {});

}  // namespace ecofire
