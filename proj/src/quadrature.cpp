#include "qelab/quadrature.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <mutex>

namespace qe {

namespace {

GaussRule build_rule(int n) {
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  // Newton iteration on P_n from the Tricomi initial guess; symmetric fill.
  int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute derivative at the converged node for the weight.
    double p1 = 1.0, p2 = 0.0;
    for (int j = 1; j <= n; ++j) {
      double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
    }
    pp = n * (z * p1 - p2) / (z * z - 1.0);
    double w = 2.0 / ((1.0 - z * z) * pp * pp);
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.x[n / 2] = 0.0;
  return r;
}

constexpr int kMaxOrder = 512;

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1 || n > kMaxOrder) throw RangeError("gauss_legendre: order out of range");
  static std::array<std::once_flag, kMaxOrder + 1> flags;
  static std::array<std::unique_ptr<GaussRule>, kMaxOrder + 1> rules;
  std::call_once(flags[n], [n] { rules[n] = std::make_unique<GaussRule>(build_rule(n)); });
  return *rules[n];
}

std::vector<std::pair<double, double>> gauss_nodes(double a, double b, int n) {
  const GaussRule& g = gauss_legendre(n);
  std::vector<std::pair<double, double>> out(n);
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) out[i] = {c + h * g.x[i], h * g.w[i]};
  return out;
}

std::vector<std::pair<double, double>> composite_gauss(double a, double b, int panels, int n) {
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(panels) * n);
  double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    auto nodes = gauss_nodes(a + p * h, a + (p + 1) * h, n);
    out.insert(out.end(), nodes.begin(), nodes.end());
  }
  return out;
}

namespace {

cplx gauss_panel(const std::function<cplx(double)>& f, double a, double b, int n, int& evals) {
  const GaussRule& g = gauss_legendre(n);
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  cplx s = 0.0;
  for (int i = 0; i < n; ++i) s += g.w[i] * f(c + h * g.x[i]);
  evals += n;
  return s * h;
}

void adapt(const std::function<cplx(double)>& f, double a, double b, double tol, int depth,
           int max_depth, std::vector<cplx>& parts, double& err, int& evals) {
  cplx lo = gauss_panel(f, a, b, 10, evals);
  cplx hi = gauss_panel(f, a, b, 20, evals);
  double e = std::abs(hi - lo);
  if (e <= tol || depth >= max_depth) {
    parts.push_back(hi);
    err += e;
    return;
  }
  double m = 0.5 * (a + b);
  adapt(f, a, m, 0.5 * tol, depth + 1, max_depth, parts, err, evals);
  adapt(f, m, b, 0.5 * tol, depth + 1, max_depth, parts, err, evals);
}

}  // namespace

AdaptiveResult integrate_adaptive(const std::function<cplx(double)>& f, double a, double b,
                                  double abs_tol, double rel_tol, int max_depth) {
  int evals = 0;
  cplx rough = gauss_panel(f, a, b, 20, evals);
  double tol = std::max(abs_tol, rel_tol * std::abs(rough));
  std::vector<cplx> parts;
  double err = 0.0;
  adapt(f, a, b, tol, 0, max_depth, parts, err, evals);
  return {pairwise_sum(parts), err, evals};
}

}  // namespace qe
