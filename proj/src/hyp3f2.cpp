// 3F2(a,b,c; e,f; 1). Terms decay like n^{-1-d}, d = e+f-a-b-c, so plain
// summation is hopeless for d near 1/2 at 1e-9 accuracy. Once n is past the
// parameter scale (n >> |param|^2) the terms follow
//   t_n = t_N (n/N)^{-1-d} exp(S(n) - S(N)),  S(n) = sum_m D_m n^{-m},
// from the Bernoulli-polynomial expansion of log Gamma(n + alpha); the tail
// is then a short combination of Hurwitz zeta values.
#include <algorithm>
#include <array>
#include <cmath>

#include "qelab/specfun.hpp"

namespace qe {

namespace {

constexpr int kTailOrder = 12;

// B_0 .. B_14
constexpr std::array<double, 15> kBern = {1.0,        -0.5,      1.0 / 6.0, 0.0, -1.0 / 30.0,
                                          0.0,        1.0 / 42.0, 0.0,      -1.0 / 30.0, 0.0,
                                          5.0 / 66.0, 0.0,       -691.0 / 2730.0, 0.0, 7.0 / 6.0};

double binom(int n, int k) {
  double v = 1.0;
  for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
  return v;
}

cplx bernoulli_poly(int m, cplx x) {
  cplx acc = 0.0;
  cplx xp = 1.0;  // x^{m-k} built from k = m downward
  for (int k = m; k >= 0; --k) {
    acc += binom(m, k) * kBern[k] * xp;
    xp *= x;
  }
  return acc;
}

bool nonpositive_integer(cplx z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

cplx asymptotic_tail(const std::array<cplx, 3>& num, const std::array<cplx, 2>& den, cplx d, cplx t_n,
                     double n, double& last_term) {
  // D_m, m = 1..kTailOrder
  std::array<cplx, kTailOrder + 1> dm{};
  for (int m = 1; m <= kTailOrder; ++m) {
    cplx s = 0.0;
    for (auto& p : num) s += bernoulli_poly(m + 1, p);
    for (auto& q : den) s -= bernoulli_poly(m + 1, q);
    s -= bernoulli_poly(m + 1, 1.0);
    double sign = (m % 2 == 1) ? 1.0 : -1.0;
    dm[m] = sign * s / static_cast<double>(m * (m + 1));
  }
  // exp(S) as a series in 1/n: j C_j = sum_{m=1}^{j} m D_m C_{j-m}
  std::array<cplx, kTailOrder + 1> cj{};
  cj[0] = 1.0;
  for (int j = 1; j <= kTailOrder; ++j) {
    cplx s = 0.0;
    for (int m = 1; m <= j; ++m) s += static_cast<double>(m) * dm[m] * cj[j - m];
    cj[j] = s / static_cast<double>(j);
  }
  cplx s_n = 0.0;
  double inv = 1.0 / n, p = inv;
  for (int m = 1; m <= kTailOrder; ++m) {
    s_n += dm[m] * p;
    p *= inv;
  }
  cplx pref = t_n * std::exp((1.0 + d) * std::log(n) - s_n);
  cplx acc = 0.0;
  for (int j = 0; j <= kTailOrder; ++j) {
    cplx term = cj[j] * hurwitz_zeta(1.0 + d + static_cast<double>(j), n + 1.0);
    acc += term;
    if (j == kTailOrder) last_term = std::abs(pref * term);
  }
  return pref * acc;
}

}  // namespace

Hyp3F2Result hyp3f2_unit(cplx a, cplx b, cplx c, cplx e, cplx f, long term_cap) {
  if (nonpositive_integer(e) || nonpositive_integer(f))
    throw DomainError("hyp3f2_unit: lower parameter is a nonpositive integer");
  Hyp3F2Result res;
  bool terminating = nonpositive_integer(a) || nonpositive_integer(b) || nonpositive_integer(c);
  cplx d = e + f - a - b - c;
  if (!terminating && d.real() <= 0.0)
    throw DivergenceError("hyp3f2_unit: Re(e+f-a-b-c) <= 0, series diverges at unit argument");
  res.slow_convergence = !terminating && d.real() < 0.25;

  double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(e), std::abs(f), 1.0});
  double want = std::max(100.0, std::ceil(4.0 * scale * scale));
  bool use_tail = !terminating && want <= static_cast<double>(term_cap);
  long n_direct = use_tail ? static_cast<long>(want) : term_cap;

  cplx sum = 1.0, comp = 0.0, t = 1.0;
  double abs_sum = 1.0;
  long n = 0;
  double prev_abs = 1.0;
  for (; n < n_direct; ++n) {
    double dn = static_cast<double>(n);
    t *= (a + dn) * (b + dn) * (c + dn) / ((e + dn) * (f + dn) * (dn + 1.0));
    if (t == 0.0) {
      ++n;
      res.value = sum + comp;
      res.terms = n;
      res.error_estimate = 4e-16 * abs_sum;
      return res;
    }
    cplx s2 = sum + t;
    comp += (sum - s2) + t;  // compensated, components rounded together
    sum = s2;
    prev_abs = std::abs(t);
    abs_sum += prev_abs;
    // Early exit once the algebraic tail bound is below rounding level.
    if (!use_tail && !terminating && n > 20 && prev_abs * (n + 1.0) / d.real() < 1e-17 * std::abs(sum)) {
      ++n;
      break;
    }
  }
  if (!is_finite(sum)) throw NumericalError("hyp3f2_unit: non-finite partial sum");
  res.terms = n;
  double rounding = 4e-16 * abs_sum * std::sqrt(static_cast<double>(std::max(n, 1L)));
  if (use_tail) {
    double last = 0.0;
    cplx tail = asymptotic_tail({a, b, c}, {e, f}, d, t, static_cast<double>(n), last);
    res.value = sum + comp + tail;
    res.tail_summed = true;
    res.error_estimate = last + rounding;
  } else {
    res.value = sum + comp;
    double nn = static_cast<double>(n);
    double algebraic = prev_abs * nn / d.real();
    res.error_estimate = algebraic + rounding;
  }
  if (!is_finite(res.value)) throw NumericalError("hyp3f2_unit: non-finite result");
  return res;
}

}  // namespace qe
