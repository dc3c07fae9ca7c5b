#include <algorithm>
#include <cmath>
#include <memory>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "qelab/quadrature.hpp"
#include "qelab/specfun.hpp"

namespace qe {

double standard_bump(double u) {
  if (!(std::abs(u) < 1.0)) return 0.0;
  return std::exp(-1.0 / (1.0 - u * u));
}

BumpSpec BumpSpec::smooth(double lo, double hi, double norm) {
  BumpSpec b;
  b.support_lo = lo;
  b.support_hi = hi;
  b.normalization = norm;
  b.validate();
  return b;
}

BumpSpec BumpSpec::gaussian(double lo, double hi, double sigma_u, double norm) {
  BumpSpec b = smooth(lo, hi, norm);
  b.shape = BumpShape::gaussian_truncated;
  b.gaussian_sigma = sigma_u;
  b.validate();
  return b;
}

BumpSpec BumpSpec::custom(double lo, double hi, std::vector<double> samples, double norm) {
  BumpSpec b = smooth(lo, hi, norm);
  b.shape = BumpShape::custom_samples;
  b.samples = std::move(samples);
  b.validate();
  return b;
}

void BumpSpec::validate() const {
  if (!(support_lo > 0.0)) throw DomainError("BumpSpec: need support_lo > 0");
  if (!(support_lo < support_hi)) throw DomainError("BumpSpec: need support_lo < support_hi");
  if (!(normalization >= 0.0)) throw DomainError("BumpSpec: normalization must be nonnegative");
  if (shape == BumpShape::gaussian_truncated && !(gaussian_sigma > 0.0))
    throw DomainError("BumpSpec: gaussian_sigma must be positive");
  if (shape == BumpShape::custom_samples) {
    // the endpoint-derivative spline needs five knots
    if (samples.size() < 5) throw DomainError("BumpSpec: custom shape needs at least 5 samples");
    for (double v : samples)
      if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("BumpSpec: samples must be finite and >= 0");
  }
}

double BumpSpec::operator()(double y) const {
  if (!(y > support_lo && y < support_hi)) return 0.0;
  double u = (y - center()) / half_width();
  switch (shape) {
    case BumpShape::smooth_bump:
      return normalization * standard_bump(u);
    case BumpShape::gaussian_truncated:
      return normalization * std::exp(-0.5 * u * u / (gaussian_sigma * gaussian_sigma));
    case BumpShape::custom_samples: {
      // spline through the samples over u in [-1, 1], clipped at zero so the
      // product stays nonnegative
      double h = 2.0 / static_cast<double>(samples.size() - 1);
      boost::math::interpolators::cardinal_cubic_b_spline<double> sp(samples.begin(), samples.end(), -1.0, h);
      return normalization * std::max(0.0, sp(u)) * standard_bump(u);
    }
  }
  return 0.0;
}

cplx mellin_of_bump(const BumpSpec& psi, cplx s) {
  auto f = [&](double y) -> cplx {
    double v = psi(y);
    if (v == 0.0) return 0.0;
    return v * std::exp(-(s + 1.0) * std::log(y));
  };
  // panel count follows the oscillation of y^{-i t} across the support
  double span = std::log(psi.support_hi / psi.support_lo);
  int panels = std::max(8, static_cast<int>(std::ceil(std::abs(s.imag()) * span / 2.0)) + 8);
  double h = (psi.support_hi - psi.support_lo) / panels;
  std::vector<cplx> parts(static_cast<std::size_t>(panels));
  for (int p = 0; p < panels; ++p) {
    double a = psi.support_lo + p * h;
    parts[p] = integrate_adaptive(f, a, a + h, 1e-17, 1e-14).value;
  }
  return pairwise_sum(parts);
}

// ---- profiles ----

double QuasimodeProfile::operator()(double r) const { return shape(r) / norm; }

double QuasimodeProfile::total() const {
  std::vector<double> v;
  v.reserve(nodes.size());
  for (auto& n : nodes) v.push_back(n.w * n.h);
  return pairwise_sum(v);
}

double QuasimodeProfile::first_moment() const {
  std::vector<double> v;
  v.reserve(nodes.size());
  for (auto& n : nodes) v.push_back(n.w * n.h * std::abs(n.r - center));
  return pairwise_sum(v);
}

double QuasimodeProfile::max_node_r() const {
  double m = 0.0;
  for (auto& n : nodes) m = std::max(m, std::abs(n.r));
  return m;
}

QuasimodeProfile make_profile(double center, const BumpSpec& shape, double width, int n_nodes) {
  if (!(width > 0.0)) throw DomainError("profile width must be positive");
  if (n_nodes < 8) throw DomainError("profile needs at least 8 nodes");
  shape.validate();
  QuasimodeProfile p;
  p.center = center;
  p.width = width;
  p.shape = shape;
  int per = std::min(n_nodes, 32);
  int panels = std::max(1, n_nodes / per);
  auto q = composite_gauss(shape.support_lo, shape.support_hi, panels, per);
  std::vector<double> mass;
  for (auto& [r, w] : q) {
    double v = shape(r);
    p.nodes.push_back({r, w, v});
    mass.push_back(w * v);
  }
  double total = pairwise_sum(mass);
  if (!(total > 0.0)) throw DomainError("profile has zero mass on its nodes");
  p.norm = total;
  for (auto& n : p.nodes) n.h /= total;
  return p;
}

QuasimodeProfile make_bump_profile(double center, double width, int n_nodes) {
  return make_profile(center, BumpSpec::smooth(center - width, center + width), width, n_nodes);
}

QuasimodeProfile make_gaussian_profile(double center, double width, int n_nodes) {
  return make_profile(center, BumpSpec::gaussian(center - 8.0 * width, center + 8.0 * width, 0.125), width,
                      n_nodes);
}

cplx profile_fourier(const QuasimodeProfile& h, double t) {
  std::vector<cplx> v;
  v.reserve(h.nodes.size());
  for (auto& n : h.nodes) {
    double ph = -(n.r - h.center) * t;
    v.push_back(n.w * n.h * cplx(std::cos(ph), std::sin(ph)));
  }
  double ph0 = -h.center * t;
  return pairwise_sum(v) * cplx(std::cos(ph0), std::sin(ph0));
}

// ---- divisors ----

std::vector<std::int64_t> divisors(std::int64_t n) {
  if (n < 1) throw DomainError("divisors: n must be positive");
  std::vector<std::int64_t> lo, hi;
  for (std::int64_t d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      lo.push_back(d);
      if (d * d != n) hi.push_back(n / d);
    }
  }
  lo.insert(lo.end(), hi.rbegin(), hi.rend());
  return lo;
}

std::int64_t divisor_count(std::int64_t n) { return static_cast<std::int64_t>(divisors(n).size()); }

cplx divisor_sum(std::int64_t n, cplx s) {
  cplx acc = 0.0;
  for (std::int64_t d : divisors(n)) {
    if (d == 1) {
      acc += 1.0;
      continue;
    }
    acc += std::exp(s * std::log(static_cast<double>(d)));
  }
  return acc;
}

}  // namespace qe
