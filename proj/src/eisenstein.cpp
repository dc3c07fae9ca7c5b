#include "qelab/eisenstein.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <numeric>

#include "qelab/quadrature.hpp"

namespace qe {

namespace {

// Exponent sign in (j/|j|)^{sign * 2k}. Fixed by matching the orbit sum against
// the Fourier expansions at Re s = 2 (see the weight-2k agreement tests).
constexpr int kFactorSign = 1;

bool nonpositive_integer(cplx z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

void check_point(UpperHalfPoint z) {
  if (!std::isfinite(z.x) || !std::isfinite(z.y)) throw DomainError("eisenstein: non-finite point");
  if (!(z.y > 0.0)) throw DomainError("eisenstein: point must lie in the upper half plane");
  if (z.y < kMinHeight) throw RangeError("eisenstein: Im z below the supported minimum height");
}

void check_order(cplx s) {
  if (std::abs(s.imag()) > kDefaultRMax) throw RangeError("eisenstein: |Im s| exceeds r_max");
}

cplx unit_power(cplx w, int m) {
  // (w/|w|)^m
  cplx u = w / std::abs(w);
  cplx out = 1.0;
  cplx base = m >= 0 ? u : std::conj(u);
  for (int i = 0; i < std::abs(m); ++i) out *= base;
  return out;
}

// bound on |sigma_{1-2s}(n)| n^{sigma - 1/2} / n^{a}: d(n) <= 2 sqrt(n)
double coefficient_growth(double sigma, double extra) {
  return sigma - 0.5 + std::max(0.0, 1.0 - 2.0 * sigma) + 0.5 + extra;
}

cplx e_of(double t) {
  double ph = 2.0 * kPi * t;
  return {std::cos(ph), std::sin(ph)};
}

double rounding_estimate(cplx constant, const std::vector<cplx>& terms) {
  double mass = std::abs(constant);
  for (auto& t : terms) mass += std::abs(t);
  double depth = std::log2(static_cast<double>(terms.size()) + 1.0) + 2.0;
  return 4.0 * 2.220446049250313e-16 * mass * depth;
}

}  // namespace

// ---- reduction ----------------------------------------------------------------

Reduction reduce_to_fundamental_domain(UpperHalfPoint p) {
  if (!(p.y > 0.0) || !std::isfinite(p.x) || !std::isfinite(p.y))
    throw DomainError("reduce_to_fundamental_domain: need a finite point with y > 0");
  Mat2 g;
  cplx z = p.z();
  for (int iter = 0; iter < 10000; ++iter) {
    double n = std::round(z.real());
    if (n != 0.0) {
      z -= n;
      g = Mat2{1, -static_cast<std::int64_t>(n), 0, 1} * g;
    }
    if (std::norm(z) < 1.0 - 1e-15) {
      z = -1.0 / z;
      g = Mat2{0, -1, 1, 0} * g;
      continue;
    }
    break;
  }
  // keep the sign normalization c > 0 or (c == 0, d > 0)
  if (g.c < 0 || (g.c == 0 && g.d < 0)) g = {-g.a, -g.b, -g.c, -g.d};
  return {UpperHalfPoint::from(z), g};
}

void TruncationPolicy::validate() const {
  if (!(tail_target > 0.0)) throw DomainError("TruncationPolicy: tail_target must be positive");
  if (n_max_cap < 1) throw DomainError("TruncationPolicy: n_max_cap must be positive");
  if (!(y_cap > 1.0)) throw DomainError("TruncationPolicy: height cap must exceed 1");
}

std::int64_t fourier_cutoff(double y, double r, const TruncationPolicy& policy) {
  double ra = std::abs(r);
  double n = std::ceil((ra + 40.0 * (std::cbrt(ra) + 1.0)) / (2.0 * kPi * y));
  n = std::max(n, 1.0);
  return std::min<std::int64_t>(static_cast<std::int64_t>(n), policy.n_max_cap);
}

cplx automorphy_factor(const Mat2& g, cplx z, int k) { return unit_power(g.j(z), kFactorSign * 2 * k); }

cplx eisenstein_constant_coefficient(cplx s, int k) {
  cplx lp = log_phi(s);
  if (k == 0) return std::exp(lp);
  if (nonpositive_integer(s - static_cast<double>(k)) || nonpositive_integer(s + static_cast<double>(k))) return 0.0;
  cplx lg = 2.0 * log_gamma(s) - log_gamma(s - static_cast<double>(k)) - log_gamma(s + static_cast<double>(k));
  double sign = (k % 2 == 0) ? 1.0 : -1.0;
  return sign * std::exp(lg + lp);
}

// ---- Fourier rows ------------------------------------------------------------------

namespace {

std::int64_t choose_terms(double y, double r_eff, const TruncationPolicy& policy, std::int64_t n_override,
                          const std::function<double(std::int64_t)>& tail_after) {
  if (n_override > 0) return n_override;
  if (y > policy.y_cap) return 0;
  std::int64_t n = fourier_cutoff(y, r_eff, policy);
  while (n < policy.n_max_cap && tail_after(n) > policy.tail_target)
    n = std::min<std::int64_t>(policy.n_max_cap, n + n / 4 + 1);
  return n;
}

FourierRow weight0_row(double y, cplx s, const TruncationPolicy& policy, std::int64_t n_override) {
  cplx mu = s - 0.5;
  FourierRow row;
  row.y = y;
  row.constant = std::exp(s * std::log(y)) + std::exp(log_phi(s) + (1.0 - s) * std::log(y));

  // cos(2 pi n x) = (e(nx) + e(-nx))/2
  cplx log_coef = std::log(2.0 * std::sqrt(y)) - log_xi(2.0 * s);
  double a = coefficient_growth(s.real(), 0.0);
  double alpha = std::abs(mu.real());
  // majorant of the dropped terms n > N (|K_{alpha+it}| <= K_alpha, e^x K decreasing)
  auto tail_after = [&](std::int64_t N) {
    double n1 = static_cast<double>(N + 1);
    ScaledK kb = bessel_k_scaled(cplx(alpha, 0.0), 2.0 * kPi * n1 * y);
    double log_m = log_coef.real() + kb.log_scale + std::log(4.0 * std::abs(kb.k)) + a * std::log(n1);
    double q = std::exp(-2.0 * kPi * y + a / n1);
    if (q >= 1.0) return HUGE_VAL;
    return std::exp(log_m) / (1.0 - q);
  };
  std::int64_t N = choose_terms(y, std::abs(mu), policy, n_override, tail_after);
  row.pos.resize(static_cast<std::size_t>(N));
  for (std::int64_t n = 1; n <= N; ++n) {
    double dn = static_cast<double>(n);
    ScaledK kb = bessel_k_scaled(mu, 2.0 * kPi * dn * y);
    row.pos[static_cast<std::size_t>(n - 1)] =
        std::exp(log_coef + kb.log_scale + (s - 0.5) * std::log(dn)) * kb.k * divisor_sum(n, 1.0 - 2.0 * s);
  }
  row.neg = row.pos;
  row.tail_bound = tail_after(N);
  return row;
}

FourierRow weight2k_row(double y, cplx s, int k, const TruncationPolicy& policy, std::int64_t n_override) {
  const int ka = std::abs(k);
  const double dk = static_cast<double>(k);
  cplx mu = s - 0.5;
  FourierRow row;
  row.y = y;
  row.constant = std::exp(s * std::log(y)) + eisenstein_constant_coefficient(s, k) * std::exp((1.0 - s) * std::log(y));

  // n < 0 carries W_{k}/Gamma(s+k), n > 0 carries W_{-k}/Gamma(s-k)
  double sign = (ka % 2 == 0) ? 1.0 : -1.0;
  cplx base = log_gamma(s) - log_xi(2.0 * s);
  bool zero_neg = nonpositive_integer(s + dk), zero_pos = nonpositive_integer(s - dk);
  cplx log_neg = zero_neg ? cplx(0.0) : base - log_gamma(s + dk);
  cplx log_pos = zero_pos ? cplx(0.0) : base - log_gamma(s - dk);

  double a = coefficient_growth(s.real(), -0.5 + ka + 1.0);
  auto tail_after = [&](std::int64_t N) {
    double n1 = static_cast<double>(N + 1);
    WhittakerFamily f = whittaker_family(ka, mu, 4.0 * kPi * n1 * y);
    double m = 0.0;
    if (!zero_neg) m += std::exp(log_neg.real() + f.log_scale) * std::abs(f.at(k));
    if (!zero_pos) m += std::exp(log_pos.real() + f.log_scale) * std::abs(f.at(-k));
    m *= 2.0 * std::exp(a * std::log(n1));
    double q = std::exp(-2.0 * kPi * y + a / n1);
    if (q >= 1.0) return HUGE_VAL;
    return m / (1.0 - q);
  };
  std::int64_t N = choose_terms(y, std::abs(mu), policy, n_override, tail_after);
  row.pos.assign(static_cast<std::size_t>(N), 0.0);
  row.neg.assign(static_cast<std::size_t>(N), 0.0);
  for (std::int64_t n = 1; n <= N; ++n) {
    double dn = static_cast<double>(n);
    WhittakerFamily f = whittaker_family(ka, mu, 4.0 * kPi * dn * y);
    cplx common = (s - 1.0) * std::log(dn) + f.log_scale;
    cplx dsum = sign * divisor_sum(n, 1.0 - 2.0 * s);
    auto i = static_cast<std::size_t>(n - 1);
    if (!zero_pos) row.pos[i] = dsum * std::exp(log_pos + common) * f.at(-k);
    if (!zero_neg) row.neg[i] = dsum * std::exp(log_neg + common) * f.at(k);
  }
  row.tail_bound = tail_after(N);
  return row;
}

}  // namespace

EisensteinValue FourierRow::evaluate(double x) const {
  std::vector<cplx> terms(pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i) {
    double n = static_cast<double>(i + 1);
    cplx e = e_of(n * x);
    terms[i] = pos[i] * e + neg[i] * std::conj(e);
  }
  EisensteinValue out;
  out.value = check_finite(constant + pairwise_sum(terms), "eisenstein");
  out.rounding = rounding_estimate(constant, terms);
  out.tail_bound = tail_bound;
  out.terms = static_cast<std::int64_t>(pos.size());
  return out;
}

FourierRow eisenstein_row(double y, cplx s, int k, const TruncationPolicy& policy, std::int64_t n_override) {
  check_point({0.0, y});
  check_order(s);
  policy.validate();
  if (std::abs(k) > kDefaultKMax) throw RangeError("eisenstein: |k| exceeds k_max");
  if (s == cplx(1.0, 0.0)) throw PoleError("eisenstein: pole at s = 1");
  return k == 0 ? weight0_row(y, s, policy, n_override) : weight2k_row(y, s, k, policy, n_override);
}

// ---- weight 0 -------------------------------------------------------------------

EisensteinValue eisenstein_weight0_expansion(UpperHalfPoint z, cplx s, const TruncationPolicy& policy,
                                             std::int64_t n_override) {
  check_point(z);
  return eisenstein_row(z.y, s, 0, policy, n_override).evaluate(z.x);
}

EisensteinValue eisenstein_weight0_detail(UpperHalfPoint z, cplx s, const TruncationPolicy& policy) {
  check_point(z);
  Reduction red = reduce_to_fundamental_domain(z);
  return eisenstein_weight0_expansion(red.point, s, policy);
}

cplx eisenstein_weight0(UpperHalfPoint z, cplx s, const TruncationPolicy& policy) {
  return eisenstein_weight0_detail(z, s, policy).value;
}

// ---- weight 2k ------------------------------------------------------------------

EisensteinValue eisenstein_weight2k_expansion(UpperHalfPoint z, cplx s, int k, const TruncationPolicy& policy,
                                              std::int64_t n_override) {
  check_point(z);
  return eisenstein_row(z.y, s, k, policy, n_override).evaluate(z.x);
}

EisensteinValue eisenstein_weight2k_detail(UpperHalfPoint z, cplx s, int k, const TruncationPolicy& policy) {
  check_point(z);
  Reduction red = reduce_to_fundamental_domain(z);
  EisensteinValue v = eisenstein_weight2k_expansion(red.point, s, k, policy);
  v.value *= automorphy_factor(red.gamma, z.z(), k);
  return v;
}

cplx eisenstein_weight2k(UpperHalfPoint z, double r, int k, const TruncationPolicy& policy) {
  return eisenstein_weight2k_detail(z, cplx(0.5, r), k, policy).value;
}

cplx eisenstein_weight2k_s(UpperHalfPoint z, cplx s, int k, const TruncationPolicy& policy) {
  return eisenstein_weight2k_detail(z, s, k, policy).value;
}

// ---- orbit sums -------------------------------------------------------------------

cplx eisenstein_orbit_sum(UpperHalfPoint z, cplx s, int k, const OrbitSumOptions& opt) {
  if (!(z.y > 0.0)) throw DomainError("orbit sum: need y > 0");
  if (!(s.real() > 1.0)) throw DomainError("orbit sum: needs Re s > 1");
  const double y = z.y, x = z.x;
  const int m = kFactorSign * 2 * k;
  const cplx two_s = 2.0 * s;
  const GaussRule& g = gauss_legendre(opt.tail_nodes);

  // int over theta in [lo, hi] of sin^{2s-2} theta e^{i m theta}; this is the
  // integral of |t + i|^{-2s} ((t+i)/|t+i|)^m dt over the matching t-range.
  auto theta_integral = [&](double lo, double hi) {
    double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    cplx acc = 0.0;
    for (int i = 0; i < opt.tail_nodes; ++i) {
      double th = c + h * g.x[i];
      acc += g.w[i] * std::exp((two_s - 2.0) * std::log(std::sin(th)) + cplx(0.0, m * th));
    }
    return acc * h;
  };

  auto term = [&](double t, double cy) {
    cplx w(t, cy);
    return std::exp(-s * std::log(std::norm(w))) * unit_power(w, m);
  };

  const std::int64_t c_switch = static_cast<std::int64_t>(std::ceil(opt.cy_switch / y));
  std::vector<cplx> rows;
  for (std::int64_t c = 1; c < c_switch; ++c) {
    double cy = static_cast<double>(c) * y;
    double cx = static_cast<double>(c) * x;
    double d0 = std::round(-cx);
    std::vector<cplx> row;
    row.reserve(static_cast<std::size_t>(2 * opt.d_direct + 3));
    for (int j = -opt.d_direct; j <= opt.d_direct; ++j) row.push_back(term(cx + d0 + j, cy));
    // midpoint-rule tails, in the angle variable t = cy cot(theta)
    double v_hi = cx + d0 + opt.d_direct + 0.5;
    double v_lo = cx + d0 - opt.d_direct - 0.5;
    cplx scale = std::exp((1.0 - two_s) * std::log(cy));
    row.push_back(scale * theta_integral(0.0, std::atan2(cy, v_hi)));
    row.push_back(scale * theta_integral(std::atan2(cy, v_lo), kPi));
    rows.push_back(pairwise_sum(row));
  }
  // rows with cy large: only the zero frequency survives Poisson summation
  GaussRule fine = gauss_legendre(256);
  cplx j_full = 0.0;
  for (int i = 0; i < 256; ++i) {
    double th = 0.5 * kPi * (1.0 + fine.x[i]);
    j_full += fine.w[i] * std::exp((two_s - 2.0) * std::log(std::sin(th)) + cplx(0.0, m * th));
  }
  j_full *= 0.5 * kPi;
  cplx far = std::exp((1.0 - two_s) * std::log(y)) * j_full *
             hurwitz_zeta(two_s - 1.0, static_cast<double>(c_switch));
  rows.push_back(far);
  cplx total = pairwise_sum(rows);
  cplx ys = std::exp(s * std::log(y));
  return ys * (1.0 + total / riemann_zeta(two_s));
}

// ---- incomplete Eisenstein series ---------------------------------------------------

cplx incomplete_eisenstein_eval(UpperHalfPoint z, const BumpSpec& psi, int k) {
  psi.validate();
  if (!(psi.support_lo > 0.0)) throw DomainError("incomplete_eisenstein_eval: support must lie in (0, inf)");
  if (!(z.y > 0.0)) throw DomainError("incomplete_eisenstein_eval: need y > 0");
  const double y = z.y, x = z.x, a = psi.support_lo;
  const int m = kFactorSign * 2 * k;
  std::vector<cplx> parts;
  parts.push_back(psi(y));
  // Im(g z) = y/|cz+d|^2 >= a forces c^2 y^2 <= |cz+d|^2 <= y/a
  auto c_max = static_cast<std::int64_t>(std::floor(1.0 / std::sqrt(a * y)));
  for (std::int64_t c = 1; c <= c_max; ++c) {
    double cy = static_cast<double>(c) * y, cx = static_cast<double>(c) * x;
    double room = y / a - cy * cy;
    if (room < 0.0) continue;
    double span = std::sqrt(room);
    auto d_lo = static_cast<std::int64_t>(std::ceil(-cx - span));
    auto d_hi = static_cast<std::int64_t>(std::floor(-cx + span));
    for (std::int64_t d = d_lo; d <= d_hi; ++d) {
      if (std::gcd(c, d) != 1) continue;
      cplx w(cx + static_cast<double>(d), cy);
      double v = psi(y / std::norm(w));
      if (v == 0.0) continue;
      parts.push_back(v * unit_power(w, m));
    }
  }
  cplx out = pairwise_sum(parts);
  if (k == 0) out = out.real();
  return out;
}

cplx incomplete_eisenstein_contour(UpperHalfPoint z, const BumpSpec& psi, double sigma, double t_max,
                                   const TruncationPolicy& policy) {
  if (!(sigma > 1.0)) throw DomainError("incomplete_eisenstein_contour: line must lie in Re s > 1");
  // (1/2 pi i) int L E ds = (1/pi) Re int_0^T L(s) E(z, s) dt for real psi
  int panels = std::max(1, static_cast<int>(std::ceil(t_max / 2.0)));
  auto f = [&](double t) {
    cplx s(sigma, t);
    return mellin_of_bump(psi, s) * eisenstein_weight0(z, s, policy);
  };
  cplx integral = integrate_panels<cplx>(f, 0.0, t_max, panels, 16);
  return integral.real() / kPi;
}

// ---- quasimodes ---------------------------------------------------------------------

cplx quasimode_eval(UpperHalfPoint z, const QuasimodeProfile& h, const TruncationPolicy& policy) {
  if (h.shape.support_hi > kDefaultRMax || h.shape.support_lo < -kDefaultRMax)
    throw RangeError("quasimode_eval: profile support exceeds r_max");
  check_point(z);
  Reduction red = reduce_to_fundamental_domain(z);
  auto q = gauss_nodes(h.shape.support_lo, h.shape.support_hi, kQuasimodeNodes);
  std::vector<cplx> parts;
  parts.reserve(q.size());
  for (auto& [r, w] : q) {
    double hv = h(r);
    if (hv == 0.0) continue;
    parts.push_back(w * hv * eisenstein_weight0_expansion(red.point, cplx(0.5, r), policy).value);
  }
  return pairwise_sum(parts);
}

}  // namespace qe
