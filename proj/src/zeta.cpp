#include <algorithm>
#include <array>
#include <cmath>

#include "qelab/specfun.hpp"

namespace qe {

namespace {

// B_{2j} / (2j)!, j = 1..12 (Euler-Maclaurin correction order 12)
constexpr std::array<double, 12> kEM = {
    8.33333333333333287e-02,  -1.38888888888888894e-03, 3.30687830687830710e-05,
    -8.26719576719576754e-07, 2.08767569878681002e-08,  -5.28419013868749322e-10,
    1.33825365306846789e-11,  -3.38968029632258272e-13, 8.58606205627784517e-15,
    -2.17486869855806192e-16, 5.50900282836022953e-18,  -1.39544646858125223e-19,
};

// Above this |Im s| the phases t*log(n) are formed in extended precision.
constexpr double kLongPhase = 1.0e3;

// sum_{n=0}^{count-1} (n + a)^{-s}
cplx direct_sum(cplx s, double a, long count) {
  if (std::abs(s.imag()) < kLongPhase) {
    cplx acc = 0.0, comp = 0.0;
    for (long n = 0; n < count; ++n) {
      cplx term = std::exp(-s * std::log(static_cast<double>(n) + a));
      // Neumaier-style compensation on each component
      cplx t = acc + term;
      double cr = std::abs(acc.real()) >= std::abs(term.real()) ? (acc.real() - t.real()) + term.real()
                                                              : (term.real() - t.real()) + acc.real();
      double ci = std::abs(acc.imag()) >= std::abs(term.imag()) ? (acc.imag() - t.imag()) + term.imag()
                                                              : (term.imag() - t.imag()) + acc.imag();
      comp += cplx(cr, ci);
      acc = t;
    }
    return acc + comp;
  }
  long double sig = s.real(), tt = s.imag();
  long double re = 0.0L, im = 0.0L;
  for (long n = 0; n < count; ++n) {
    long double ln = std::log(static_cast<long double>(n) + static_cast<long double>(a));
    long double mag = std::exp(-sig * ln);
    long double ph = tt * ln;
    re += mag * std::cos(ph);
    im -= mag * std::sin(ph);
  }
  return cplx(static_cast<double>(re), static_cast<double>(im));
}

cplx pow_neg(cplx s, double base) {
  // base^{-s} with the phase formed in extended precision
  long double ln = std::log(static_cast<long double>(base));
  long double mag = std::exp(-static_cast<long double>(s.real()) * ln);
  long double ph = static_cast<long double>(s.imag()) * ln;
  return cplx(static_cast<double>(mag * std::cos(ph)), static_cast<double>(-mag * std::sin(ph)));
}

// Euler-Maclaurin remainder at cut point M: M^{1-s}/(s-1) + M^{-s}/2 + Bernoulli terms
cplx em_tail(cplx s, double m) {
  cplx ms = pow_neg(s, m);
  cplx acc = ms * m / (s - 1.0) + 0.5 * ms;
  cplx poch = s;  // s (s+1) ... (s+2j-2)
  cplx mpow = ms / m;
  double im2 = 1.0 / (m * m);
  for (std::size_t j = 0; j < kEM.size(); ++j) {
    acc += kEM[j] * poch * mpow;
    poch *= (s + static_cast<double>(2 * j + 1)) * (s + static_cast<double>(2 * j + 2));
    mpow *= im2;
  }
  return acc;
}

// d/ds of em_tail
cplx em_tail_deriv(cplx s, double m) {
  double lm = std::log(m);
  cplx ms = pow_neg(s, m);
  cplx acc = -lm * ms * m / (s - 1.0) - ms * m / ((s - 1.0) * (s - 1.0)) - 0.5 * lm * ms;
  cplx poch = s, dpoch = 1.0;
  cplx mpow = ms / m;
  double im2 = 1.0 / (m * m);
  for (std::size_t j = 0; j < kEM.size(); ++j) {
    acc += kEM[j] * (dpoch - lm * poch) * mpow;
    cplx f1 = s + static_cast<double>(2 * j + 1), f2 = s + static_cast<double>(2 * j + 2);
    dpoch = dpoch * f1 * f2 + poch * (f1 + f2);
    poch *= f1 * f2;
    mpow *= im2;
  }
  return acc;
}

// -sum_{k=1}^{count} log(k) k^{-s}
cplx direct_sum_deriv(cplx s, long count) {
  long double sig = s.real(), tt = s.imag();
  long double re = 0.0L, im = 0.0L;
  for (long n = 2; n <= count; ++n) {
    long double ln = std::log(static_cast<long double>(n));
    long double mag = -ln * std::exp(-sig * ln);
    long double ph = tt * ln;
    re += mag * std::cos(ph);
    im -= mag * std::sin(ph);
  }
  return cplx(static_cast<double>(re), static_cast<double>(im));
}

long em_cutoff(cplx s) {
  double n = std::max({20.0, std::ceil(2.0 * std::abs(s.imag())), std::ceil(std::abs(s.real())) + 20.0});
  return static_cast<long>(n);
}

}  // namespace

cplx riemann_zeta(cplx s) {
  if (!is_finite(s)) throw DomainError("riemann_zeta: non-finite argument");
  if (s == cplx(1.0, 0.0)) throw PoleError("riemann_zeta: pole at s = 1");
  long n = em_cutoff(s);
  // sum_{k=1}^{n-1} k^{-s} = direct_sum with a = 1, count = n-1
  cplx v = direct_sum(s, 1.0, n - 1) + em_tail(s, static_cast<double>(n));
  return check_finite(v, "riemann_zeta");
}

cplx zeta_log_derivative(cplx s) {
  if (s == cplx(1.0, 0.0)) throw PoleError("zeta_log_derivative: pole at s = 1");
  long n = em_cutoff(s);
  cplx z = direct_sum(s, 1.0, n - 1) + em_tail(s, static_cast<double>(n));
  cplx dz = direct_sum_deriv(s, n - 1) + em_tail_deriv(s, static_cast<double>(n));
  return check_finite(dz / z, "zeta_log_derivative");
}

cplx log_zeta_ratio(cplx a, cplx b) {
  cplx d = a - b;
  double len = std::abs(d);
  if (len == 0.0) return 0.0;
  if (len <= 1e-2) {
    // integrate zeta'/zeta along the segment; Gauss-Legendre, exact to
    // well below rounding for these lengths
    static const double x2 = 0.5773502691896257645;
    static const double x4[2] = {0.3399810435848562648, 0.8611363115940525752};
    static const double w4[2] = {0.6521451548625461427, 0.3478548451374538573};
    cplx mid = 0.5 * (a + b), h = 0.5 * d;
    if (len < 1e-6) return d * zeta_log_derivative(mid);
    if (len < 1e-4) return h * (zeta_log_derivative(mid - x2 * h) + zeta_log_derivative(mid + x2 * h));
    cplx acc = 0.0;
    for (int i = 0; i < 2; ++i)
      acc += w4[i] * (zeta_log_derivative(mid - x4[i] * h) + zeta_log_derivative(mid + x4[i] * h));
    return h * acc;
  }
  // principal logs of short steps, so the phase is continued along the segment
  double height = std::max(std::abs(a.imag()), std::abs(b.imag()));
  int steps = static_cast<int>(std::ceil(len * (std::log(2.0 + height) + 5.0)));
  cplx acc = 0.0;
  cplx prev = riemann_zeta(b);
  for (int j = 1; j <= steps; ++j) {
    cplx cur = riemann_zeta(b + d * (static_cast<double>(j) / steps));
    acc += std::log(cur / prev);
    prev = cur;
  }
  return acc;
}

cplx hurwitz_zeta(cplx s, double a) {
  if (!(a > 0.0)) throw DomainError("hurwitz_zeta: a must be positive");
  if (s.real() <= 1.0) throw DomainError("hurwitz_zeta: requires Re s > 1");
  long n = em_cutoff(s);
  long shift = std::max(0L, n - static_cast<long>(a));
  cplx v = direct_sum(s, a, shift) + em_tail(s, a + static_cast<double>(shift));
  return check_finite(v, "hurwitz_zeta");
}

cplx log_xi(cplx s) {
  if (s == cplx(0.0, 0.0) || s == cplx(1.0, 0.0)) throw PoleError("xi: pole at s = 0 or 1");
  return -0.5 * s * kLogPi + log_gamma(0.5 * s) + std::log(riemann_zeta(s));
}

cplx xi_completed(cplx s) { return std::exp(log_xi(s)); }

cplx log_phi(cplx s) {
  if (s == cplx(0.5, 0.0)) return cplx(0.0, kPi);  // removable: phi(1/2) = -1
  if (s == cplx(1.0, 0.0)) throw PoleError("phi: pole at s = 1");
  return log_xi(2.0 * s - 1.0) - log_xi(2.0 * s);
}

cplx phi_scattering(cplx s) { return std::exp(log_phi(s)); }

}  // namespace qe
