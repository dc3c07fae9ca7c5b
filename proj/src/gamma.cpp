#include <array>
#include <cmath>

#include "qelab/specfun.hpp"

namespace qe {

namespace {

// B_{2k} / (2k (2k-1)), k = 1..12
constexpr std::array<double, 12> kStirling = {
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
    77683.0 / 5796.0,
    -236364091.0 / 1506960.0,
};

// B_{2k} / (2k), k = 1..12, for the digamma series
constexpr std::array<double, 12> kDigamma = {
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
    43867.0 / 14364.0,
    -174611.0 / 6600.0,
    77683.0 / 276.0,
    -236364091.0 / 65520.0,
};

constexpr double kStirlingMin = 18.0;

// log(1 + q) without losing the small-q digits
cplx log1p_c(cplx q) {
  double re = 0.5 * std::log1p(2.0 * q.real() + std::norm(q));
  return {re, std::atan2(q.imag(), 1.0 + q.real())};
}

bool is_nonpositive_integer(cplx z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

cplx stirling_series(cplx z) {
  cplx iz = 1.0 / z, iz2 = iz * iz;
  cplx acc = 0.0;
  for (int k = static_cast<int>(kStirling.size()) - 1; k >= 0; --k) acc = acc * iz2 + kStirling[k];
  return acc * iz;
}

// Stirling for Re z >= 1/2 after upward shift.
cplx log_gamma_right(cplx z) {
  cplx shift_log = 0.0;
  // Shift until |z| is large; principal logs compose correctly here since
  // every z + j lies in the right half-plane.
  while (std::abs(z) < kStirlingMin) {
    shift_log += std::log(z);
    z += 1.0;
  }
  cplx lz = std::log(z);
  return (z - 0.5) * lz - z + kLogSqrt2Pi + stirling_series(z) - shift_log;
}

// log sin(pi z) continued from the upper half plane, Im z >= 0.
cplx log_sin_pi_upper(cplx z) {
  // sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 pi i z})
  cplx e = std::exp(cplx(0.0, 2.0 * kPi) * z);
  return cplx(-std::log(2.0), 0.5 * kPi) - cplx(0.0, kPi) * z + std::log(1.0 - e);
}

}  // namespace

cplx log_gamma(cplx z) {
  if (!is_finite(z)) throw DomainError("log_gamma: non-finite argument");
  if (is_nonpositive_integer(z)) throw PoleError("log_gamma: pole at nonpositive integer");
  if (z.real() >= 0.5) return log_gamma_right(z);
  if (z.imag() < 0.0) return std::conj(log_gamma(std::conj(z)));
  // Reflection with a branch of log sin that is continuous on Im z >= 0; the
  // two sides then agree identically (checked at z = 1/2).
  return kLogPi - log_sin_pi_upper(z) - log_gamma_right(1.0 - z);
}

cplx log_gamma_ratio(cplx a, cplx b) { return log_gamma_shift(b, a - b); }

cplx log_gamma_shift(cplx b, cplx d) {
  if (d == 0.0) return 0.0;
  cplx a = b + d;
  if (a.real() < 0.5 || b.real() < 0.5) return log_gamma(a) - log_gamma(b);
  cplx acc = 0.0;
  while (std::abs(a) < kStirlingMin || std::abs(b) < kStirlingMin) {
    acc -= log1p_c(d / b);
    a += 1.0;
    b += 1.0;
  }
  // (a-1/2)log a - (b-1/2)log b - d, rearranged around log(a/b)
  cplx lr = log1p_c(d / b);
  acc += (b - 0.5) * lr + d * std::log(a) - d;
  acc += stirling_series(a) - stirling_series(b);
  return acc;
}

cplx gamma_fn(cplx z) { return std::exp(log_gamma(z)); }

cplx rgamma(cplx z) {
  if (is_nonpositive_integer(z)) return 0.0;
  return std::exp(-log_gamma(z));
}

cplx digamma(cplx z) {
  if (is_nonpositive_integer(z)) throw PoleError("digamma: pole at nonpositive integer");
  if (z.real() < 0.5) {
    // psi(z) = psi(1-z) - pi cot(pi z)
    return digamma(1.0 - z) - kPi / std::tan(kPi * z);
  }
  cplx acc = 0.0;
  while (std::abs(z) < kStirlingMin) {
    acc -= 1.0 / z;
    z += 1.0;
  }
  cplx iz2 = 1.0 / (z * z);
  cplx series = 0.0;
  for (int k = static_cast<int>(kDigamma.size()) - 1; k >= 0; --k) series = series * iz2 + kDigamma[k];
  return acc + std::log(z) - 0.5 / z - series * iz2;
}

}  // namespace qe
