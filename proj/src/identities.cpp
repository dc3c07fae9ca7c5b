#include "qelab/identities.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "qelab/asymptotics.hpp"
#include "qelab/quadrature.hpp"

namespace qe {

namespace {

std::string fmt_pair(const SpectralPair& p) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "r1=%.6g r2=%.6g", p.r1, p.r2);
  return buf;
}

std::string fmt_s(cplx s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "s=%.6g%+.6gi", s.real(), s.imag());
  return buf;
}

int panels_for(double length, double freq) {
  return std::max(4, static_cast<int>(std::ceil(length * freq / (1.5 * 2.0 * kPi)))) + 2;
}

}  // namespace

IdentityCheckResult make_identity_result(std::string name, cplx lhs, cplx rhs, double tolerance, double scale,
                                         std::string detail) {
  IdentityCheckResult r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.abs_err = std::abs(lhs - rhs);
  double denom = std::abs(rhs);
  r.rel_err = denom > 0.0 ? r.abs_err / denom : (r.abs_err == 0.0 ? 0.0 : INFINITY);
  r.tolerance = tolerance;
  r.scale = scale;
  r.pass = r.rel_err <= tolerance || r.abs_err <= tolerance * scale;
  r.detail = std::move(detail);
  return r;
}

IdentityCheckResult check_ramanujan(cplx s, const SpectralPair& pair, std::int64_t n_cap) {
  if (!(s.real() > 1.0)) throw DivergenceError("check_ramanujan: needs Re s > 1");
  if (n_cap < 1) throw DomainError("check_ramanujan: n_cap must be positive");
  const double r1 = pair.r1, r2 = pair.r2, d = pair.delta_r(), sr = pair.sum_r();
  const auto n = static_cast<std::size_t>(n_cap);
  // divisor sieve for sigma_{2ir1} and sigma_{-2ir2}
  std::vector<cplx> sa(n + 1, 0.0), sb(n + 1, 0.0);
  for (std::size_t dv = 1; dv <= n; ++dv) {
    double l = std::log(static_cast<double>(dv));
    cplx pa = std::polar(1.0, 2.0 * r1 * l), pb = std::polar(1.0, -2.0 * r2 * l);
    for (std::size_t m = dv; m <= n; m += dv) {
      sa[m] += pa;
      sb[m] += pb;
    }
  }
  std::vector<cplx> terms(n);
  const cplx e = s + cplx(0.0, d);
  for (std::size_t m = 1; m <= n; ++m) terms[m - 1] = sa[m] * sb[m] * std::exp(-e * std::log(static_cast<double>(m)));
  cplx lhs = pairwise_sum(terms);
  cplx rhs = riemann_zeta(s + cplx(0.0, d)) * riemann_zeta(s - cplx(0.0, sr)) * riemann_zeta(s + cplx(0.0, sr)) *
             riemann_zeta(s - cplx(0.0, d)) / riemann_zeta(2.0 * s);
  // d(n)^2 averages log^3 n / pi^2
  double ln = std::log(static_cast<double>(n_cap));
  double tail = ln * ln * ln / (kPi * kPi) * std::pow(static_cast<double>(n_cap), 1.0 - s.real()) / (s.real() - 1.0);
  char buf[64];
  std::snprintf(buf, sizeof buf, " n_cap=%lld tail_est=%.2e", static_cast<long long>(n_cap), tail);
  return make_identity_result("ramanujan", lhs, rhs, kTolSeries, 0.0, fmt_s(s) + " " + fmt_pair(pair) + buf);
}

IdentityCheckResult check_kbessel_mellin(cplx s, const SpectralPair& pair) {
  if (!(s.real() > 0.0)) throw DivergenceError("check_kbessel_mellin: needs Re s > 0");
  const double r1 = std::abs(pair.r1), r2 = std::abs(pair.r2);
  if (std::max(r1, r2) > kDefaultRMax) throw RangeError("check_kbessel_mellin: r exceeds r_max");
  // both sides carry the factor e^{pi (r1 + r2)/2}
  double t0 = (std::log(1e-17) - 3.0) / s.real();
  double u_hi = (std::max(r1, r2) + 30.0 + 2.0 * std::abs(s)) / (2.0 * kPi);
  double t1 = std::log(u_hi);
  auto f = [&](double t) -> cplx {
    double u = std::exp(t);
    double x = 2.0 * kPi * u;
    return bessel_k_imag_normalized(r1, x) * bessel_k_imag_normalized(r2, x) * std::exp(s * t);
  };
  int panels = panels_for(t1 - t0, r1 + r2 + std::abs(s.imag()) + 4.0);
  cplx lhs = integrate_panels<cplx>(f, t0, t1, panels, 16);
  const cplx i1(0.0, r1), i2(0.0, r2);
  cplx lr = log_gamma(0.5 * (s - i1 + i2)) + log_gamma(0.5 * (s + i1 + i2)) + log_gamma(0.5 * (s - i1 - i2)) +
            log_gamma(0.5 * (s + i1 - i2)) - std::log(8.0) - s * kLogPi - log_gamma(s) + 0.5 * kPi * (r1 + r2);
  return make_identity_result("kbessel_mellin", lhs, std::exp(lr), kTolSeries, 0.0,
                              fmt_s(s) + " " + fmt_pair(pair) + " (both sides times e^{pi(r1+r2)/2})");
}

IdentityCheckResult check_whittaker_mellin(int k, const SpectralPair& pair) {
  if (k < 1) throw DomainError("check_whittaker_mellin: k must be positive");
  const double r1 = pair.r1, r2 = pair.r2;
  if (std::max(std::abs(r1), std::abs(r2)) > kDefaultRMax) throw RangeError("check_whittaker_mellin: r exceeds r_max");
  const cplx nu(k - 0.5, r2);
  double t0 = (std::log(1e-17) - 3.0) / k;
  double t1 = std::log(60.0 + 4.0 * k + 2.0 * std::abs(r1));
  auto f = [&](double t) -> cplx {
    double u = std::exp(t);
    WhittakerFamily w = whittaker_family(0, cplx(0.0, -r1), u);
    return w.at(0) * std::exp(w.log_scale - 0.5 * u + nu * t);
  };
  int panels = panels_for(t1 - t0, std::abs(r1) + std::abs(r2) + 4.0);
  cplx lhs = integrate_panels<cplx>(f, t0, t1, panels, 16);
  cplx rhs = std::exp(log_gamma(cplx(k, pair.sum_r())) + log_gamma(cplx(k, -pair.delta_r())) -
                      log_gamma(cplx(k + 0.5, r2)));
  char buf[32];
  std::snprintf(buf, sizeof buf, "k=%d ", k);
  return make_identity_result("whittaker_mellin", lhs, rhs, kTolSeries, 0.0, buf + fmt_pair(pair));
}

IdentityCheckResult check_reflection_iteration(int k, double r) {
  if (k < 0) throw DomainError("check_reflection_iteration: k must be nonnegative");
  cplx lhs = gamma_fn(cplx(0.5 - k, -r)) * gamma_fn(cplx(0.5 + k, r));
  cplx rhs = (k % 2 == 0 ? 1.0 : -1.0) * gamma_fn(cplx(0.5, -r)) * gamma_fn(cplx(0.5, r));
  char buf[64];
  std::snprintf(buf, sizeof buf, "k=%d r=%.6g", k, r);
  return make_identity_result("reflection_iteration", lhs, rhs, kTolGammaZeta, 0.0, buf);
}

IdentityCheckResult check_scattering_unitarity(double r) {
  if (!(r > 2.0)) throw DomainError("check_scattering_unitarity: needs r > 2");
  double m = std::abs(phi_scattering(cplx(0.5, r)));
  char buf[48];
  std::snprintf(buf, sizeof buf, "r=%.6g", r);
  return make_identity_result("scattering_unitarity", m, 1.0, kTolGammaZeta, 0.0, buf);
}

IdentityCheckResult check_zeta_lower(double r) {
  if (!(r > 2.0)) throw DomainError("check_zeta_lower: needs r > 2");
  double v = std::abs(riemann_zeta(cplx(1.0, r))) * std::log(r);
  const double floor = 0.5;
  // one-sided: the error is the shortfall below the floor, with zero tolerance
  IdentityCheckResult res = make_identity_result("zeta_lower", v, floor, 0.0, 0.0);
  res.abs_err = std::max(0.0, floor - v);
  res.rel_err = res.abs_err / floor;
  res.pass = res.rel_err <= res.tolerance;
  char buf[64];
  std::snprintf(buf, sizeof buf, "r=%.6g |zeta(1+ir)| log r=%.6g", r, v);
  res.detail = buf;
  return res;
}

IdentityCheckResult check_stirling_modulus(double sigma, double r) {
  if (!(r > 2.0)) throw DomainError("check_stirling_modulus: needs r > 2");
  // compare after removing e^{-pi r/2}
  double lhs = std::exp(log_gamma(cplx(sigma, r)).real() + 0.5 * kPi * r);
  double rhs = std::sqrt(2.0 * kPi) * std::pow(r, sigma - 0.5);
  char buf[64];
  std::snprintf(buf, sizeof buf, "sigma=%.6g r=%.6g (both sides times e^{pi r/2})", sigma, r);
  return make_identity_result("stirling_modulus", lhs, rhs, 1.0 / (4.0 * r), 0.0, buf);
}

IdentityCheckResult check_bailey(cplx s, int k, const SpectralPair& pair) {
  IkValues a = ik3_ik4(s, k, pair, IkForm::direct);
  IkValues b = ik3_ik4(s, k, pair, IkForm::transformed);
  IdentityCheckResult r3 = make_identity_result("bailey", a.i3, b.i3, kTolSeries);
  double e4 = std::abs(a.i4 - b.i4) / std::abs(b.i4);
  char buf[160];
  std::snprintf(buf, sizeof buf, "k=%d %s %s I4 rel_err=%.3e", k, fmt_s(s).c_str(), fmt_pair(pair).c_str(), e4);
  // report the worse of I3 and I4
  if (e4 > r3.rel_err) {
    IdentityCheckResult r4 = make_identity_result("bailey", a.i4, b.i4, kTolSeries);
    std::snprintf(buf, sizeof buf, "k=%d %s %s I4 (I3 rel_err=%.3e)", k, fmt_s(s).c_str(), fmt_pair(pair).c_str(),
                  r3.rel_err);
    r4.detail = buf;
    return r4;
  }
  r3.detail = buf;
  return r3;
}

IdentityCheckResult check_xi_functional(cplx s) {
  cplx lhs = xi_completed(s), rhs = xi_completed(1.0 - s);
  return make_identity_result("xi_functional", lhs, rhs, kTolGammaZeta, 0.0, fmt_s(s));
}

std::vector<IdentityCheckResult> run_identity_suite() {
  std::vector<IdentityCheckResult> out;
  auto P = SpectralPair::of;
  for (auto [s, p] : std::vector<std::pair<cplx, SpectralPair>>{{2.5, P(3, 3.1)},
                                                                 {2.5, P(0, 0)},
                                                                 {3.0, P(5, 5)},
                                                                 {cplx(2.5, 1.0), P(2, 1)},
                                                                 {cplx(3.5, -2.0), P(10, 9.5)},
                                                                 {4.0, P(20, 20.3)}})
    out.push_back(check_ramanujan(s, p));
  for (auto [s, p] : std::vector<std::pair<cplx, SpectralPair>>{{1.5, P(5, 5)},
                                                                 {1.5, P(8, 8.2)},
                                                                 {2.0, P(0, 0)},
                                                                 {cplx(1.0, 2.0), P(3, 4)},
                                                                 {2.5, P(12, 12.1)}})
    out.push_back(check_kbessel_mellin(s, p));
  for (auto [k, p] : std::vector<std::pair<int, SpectralPair>>{
           {6, P(5, 5)}, {1, P(0, 0)}, {2, P(10, 10.05)}, {3, P(4, 6)}, {1, P(7, 7.3)}})
    out.push_back(check_whittaker_mellin(k, p));
  for (auto [k, r] : std::vector<std::pair<int, double>>{{0, 5.0}, {1, 7.0}, {3, 50.0}, {2, 20.0}, {5, 1.5}, {8, 100.0}})
    out.push_back(check_reflection_iteration(k, r));
  for (double r : {3.0, 10.0, 100.0, 1e3, 1e4}) out.push_back(check_scattering_unitarity(r));
  for (double r : {5.0, 50.0, 1e3, 1e5, 1e6}) out.push_back(check_zeta_lower(r));
  for (auto [sg, r] : std::vector<std::pair<double, double>>{{0.5, 10.0}, {1.0, 10.0}, {0.5, 50.0}, {1.0, 100.0}, {0.75, 30.0}})
    out.push_back(check_stirling_modulus(sg, r));
  for (auto [s, k, p] : std::vector<std::tuple<cplx, int, SpectralPair>>{{1.5, 1, P(8, 8)},
                                                                          {1.5, 1, P(3, 3.2)},
                                                                          {cplx(1.0, -0.1), 2, P(6, 5.9)},
                                                                          {1.2, 3, P(5, 5.5)},
                                                                          {2.0, 2, P(10, 10.2)}})
    out.push_back(check_bailey(s, k, p));
  for (cplx s : {cplx(0.3, 2.0), cplx(0.7, -5.0), cplx(2.0, 10.0), cplx(-1.0, 30.0), cplx(0.25, 100.0)})
    out.push_back(check_xi_functional(s));
  return out;
}

}  // namespace qe
