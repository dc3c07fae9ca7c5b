#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "qelab/core.hpp"

namespace qe {

// Gauss-Legendre rule on [-1, 1]. Tables are built once per order and shared
// (read-only after construction, safe across threads).
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

const GaussRule& gauss_legendre(int n);

// Nodes/weights mapped to [a, b].
std::vector<std::pair<double, double>> gauss_nodes(double a, double b, int n);

// Composite rule: [a, b] split into `panels` equal panels, n points each.
std::vector<std::pair<double, double>> composite_gauss(double a, double b, int panels, int n);

// Fixed-order composite integral of a real or complex integrand.
template <class T, class F>
T integrate_panels(F&& f, double a, double b, int panels, int n = 16) {
  const GaussRule& g = gauss_legendre(n);
  std::vector<T> parts(static_cast<std::size_t>(panels));
  double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double lo = a + p * h;
    double c = lo + 0.5 * h, hw = 0.5 * h;
    T s{};
    for (int i = 0; i < n; ++i) s += g.w[i] * f(c + hw * g.x[i]);
    parts[p] = s * hw;
  }
  return pairwise_sum(parts);
}

struct AdaptiveResult {
  cplx value;
  double error;
  int evaluations;
};

// Adaptive Gauss-Kronrod-style bisection (Gauss n vs Gauss 2n on the same
// panel) for smooth complex integrands on a finite interval.
AdaptiveResult integrate_adaptive(const std::function<cplx(double)>& f, double a, double b,
                                  double abs_tol, double rel_tol, int max_depth = 30);

}  // namespace qe
