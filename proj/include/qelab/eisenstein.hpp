#pragma once

#include <cstdint>
#include <vector>

#include "qelab/core.hpp"
#include "qelab/specfun.hpp"

namespace qe {

struct UpperHalfPoint {
  double x = 0.0;
  double y = 1.0;

  cplx z() const { return {x, y}; }
  static UpperHalfPoint from(cplx z) { return {z.real(), z.imag()}; }
};

// Integer matrix [[a, b], [c, d]] acting by Moebius transformation.
struct Mat2 {
  std::int64_t a = 1, b = 0, c = 0, d = 1;

  cplx apply(cplx z) const {
    return (static_cast<double>(a) * z + static_cast<double>(b)) /
           (static_cast<double>(c) * z + static_cast<double>(d));
  }
  cplx j(cplx z) const { return static_cast<double>(c) * z + static_cast<double>(d); }
  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
};

struct Reduction {
  UpperHalfPoint point;
  Mat2 gamma;  // gamma.apply(input) == point
};

// Standard reduction: translate into |Re z| <= 1/2, invert while |z| < 1.
Reduction reduce_to_fundamental_domain(UpperHalfPoint z);

struct TruncationPolicy {
  double tail_target = 1e-10;
  std::int64_t n_max_cap = 100000;
  double y_cap = 50.0;  // points above this height keep only the constant term

  void validate() const;
};

// Evaluations below this height are rejected outright.
inline constexpr double kMinHeight = 1e-3;

struct SpectralPair {
  double r1 = 0.0;
  double r2 = 0.0;
  double center = 1.0;  // r_j, the scale entering log r_j

  double sum_r() const { return r1 + r2; }
  double delta_r() const { return r1 - r2; }

  // r1, r2 with the center at their mean
  static SpectralPair of(double r1, double r2) { return {r1, r2, 0.5 * (r1 + r2)}; }
  // r1, r2 = rj +- dr/2
  static SpectralPair around(double rj, double dr) { return {rj + 0.5 * dr, rj - 0.5 * dr, rj}; }
  void validate() const {
    if (!(center > 0.0)) throw DomainError("SpectralPair: center must be positive");
  }
};

struct EisensteinValue {
  cplx value;
  double tail_bound = 0.0;  // bound on the dropped Fourier terms
  double rounding = 0.0;    // floating-point error estimate of the retained sum
  std::int64_t terms = 0;   // number of n used
};

// Fourier data of E_{2k}(., s) along the line Im z = y:
//   E(x + iy) = constant + sum_{n>=1} (pos[n-1] e(nx) + neg[n-1] e(-nx)),  e(t) = exp(2 pi i t).
// Building a row costs the special-function work; evaluating it at many x is cheap.
struct FourierRow {
  double y = 1.0;
  cplx constant;
  std::vector<cplx> pos, neg;
  double tail_bound = 0.0;

  EisensteinValue evaluate(double x) const;
  cplx at(double x) const { return evaluate(x).value; }
};

// k = 0 uses the K-Bessel form, k != 0 the Whittaker form. No domain reduction.
FourierRow eisenstein_row(double y, cplx s, int k, const TruncationPolicy& policy = {}, std::int64_t n_override = 0);

// Fourier cutoff from the K-Bessel decay: beyond the transition zone the terms
// are below any reasonable target.
std::int64_t fourier_cutoff(double y, double r, const TruncationPolicy& policy);

// Automorphy factor for weight 2k: factor(g, z) = (j/|j|)^{2k}, j = cz + d.
// Orbit sums carry this factor, and E_{2k}(g z) = (j/|j|)^{-2k} E_{2k}(z).
// The exponent sign is the one under which the orbit sum reproduces the
// Fourier expansion (W_{-k} on n > 0); the opposite sign gives its conjugate.
cplx automorphy_factor(const Mat2& g, cplx z, int k);

// E(z, s), weight 0. Reduces z to the fundamental domain first.
EisensteinValue eisenstein_weight0_detail(UpperHalfPoint z, cplx s, const TruncationPolicy& policy = {});
cplx eisenstein_weight0(UpperHalfPoint z, cplx s, const TruncationPolicy& policy = {});

// The Fourier expansion evaluated at z as given (no reduction). n_override > 0
// forces the number of terms.
EisensteinValue eisenstein_weight0_expansion(UpperHalfPoint z, cplx s, const TruncationPolicy& policy = {},
                                             std::int64_t n_override = 0);

// E_{2k}(z, s) for signed k (k < 0 gives weight -2|k|), with reduction and the
// automorphy factor restoring the value at z.
EisensteinValue eisenstein_weight2k_detail(UpperHalfPoint z, cplx s, int k, const TruncationPolicy& policy = {});
cplx eisenstein_weight2k(UpperHalfPoint z, double r, int k, const TruncationPolicy& policy = {});
cplx eisenstein_weight2k_s(UpperHalfPoint z, cplx s, int k, const TruncationPolicy& policy = {});

EisensteinValue eisenstein_weight2k_expansion(UpperHalfPoint z, cplx s, int k, const TruncationPolicy& policy = {},
                                              std::int64_t n_override = 0);

// Constant-term coefficient of y^{1-s}: (-1)^k Gamma(s)^2/(Gamma(s-k)Gamma(s+k)) phi(s).
cplx eisenstein_constant_coefficient(cplx s, int k);

// Direct sum over the coset representatives, Re s > 1. Independent of the
// Fourier expansions; used as the reference for them.
struct OrbitSumOptions {
  int d_direct = 400;       // |d + cx| handled term by term up to this
  double cy_switch = 10.0;  // rows with c*y above this use the zero-frequency integral
  int tail_nodes = 64;
};
cplx eisenstein_orbit_sum(UpperHalfPoint z, cplx s, int k, const OrbitSumOptions& opt = {});

// F_psi(z) = sum over cosets of psi(Im g z) times the weight-2k factor. Finite sum.
cplx incomplete_eisenstein_eval(UpperHalfPoint z, const BumpSpec& psi, int k = 0);

// Same function from (1/2 pi i) int_{Re s = sigma} L_psi(s) E(z, s) ds, weight 0.
cplx incomplete_eisenstein_contour(UpperHalfPoint z, const BumpSpec& psi, double sigma = 2.0, double t_max = 120.0,
                                   const TruncationPolicy& policy = {});

// E_h(z) = int h(r) E(z, 1/2 + ir) dr, Gauss-Legendre across the profile support.
inline constexpr int kQuasimodeNodes = 64;
cplx quasimode_eval(UpperHalfPoint z, const QuasimodeProfile& h, const TruncationPolicy& policy = {});

}  // namespace qe
