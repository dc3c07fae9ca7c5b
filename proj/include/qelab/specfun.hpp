#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qelab/core.hpp"

namespace qe {

inline constexpr double kDefaultRMax = 200.0;
inline constexpr int kDefaultKMax = 8;

// value = mantissa * exp(log_scale), with 0.5 <= |mantissa| < 2 unless zero.
struct ScaledBesselValue {
  double mantissa = 0.0;
  double log_scale = 0.0;

  static ScaledBesselValue make(double v, double extra_log = 0.0);
  double value() const;
  // value * exp(shift), evaluated without intermediate overflow.
  double scaled(double shift) const;
  bool is_zero() const { return mantissa == 0.0; }
};

// ---- Gamma ---------------------------------------------------------------

// Principal branch of log Gamma: continuous off (-inf, 0], satisfies
// log_gamma(z+1) = log_gamma(z) + log(z) with the principal log.
cplx log_gamma(cplx z);

// log(Gamma(a)/Gamma(b)) on the branch obtained by continuing from a = b along
// the straight segment. Accurate when a - b is small relative to |b|.
cplx log_gamma_ratio(cplx a, cplx b);
// log(Gamma(b+d)/Gamma(b)) with the offset d passed exactly (b + d may not be
// representable to the precision of d when |b| is large).
cplx log_gamma_shift(cplx b, cplx d);

cplx gamma_fn(cplx z);
// 1/Gamma(z); zero at the poles instead of throwing.
cplx rgamma(cplx z);
// psi(z) = d/dz log Gamma(z).
cplx digamma(cplx z);

// ---- Zeta, xi, phi -----------------------------------------------------

cplx riemann_zeta(cplx s);
// zeta'(s)/zeta(s)
cplx zeta_log_derivative(cplx s);
// log zeta(a) - log zeta(b), continued along the segment from b to a (which
// must avoid zeros). Accurate relative to the difference when a is close to b.
cplx log_zeta_ratio(cplx a, cplx b);
// Hurwitz zeta sum_{n>=0} (n+a)^{-s}, a > 0, Re s > 1.
cplx hurwitz_zeta(cplx s, double a);

// xi(s) = pi^{-s/2} Gamma(s/2) zeta(s), returned as a log (principal-ish
// branch, only exp() of it is meaningful).
cplx log_xi(cplx s);
cplx xi_completed(cplx s);
// phi(s) = xi(2s-1)/xi(2s)
cplx log_phi(cplx s);
cplx phi_scattering(cplx s);

// ---- Divisor sums --------------------------------------------------------

cplx divisor_sum(std::int64_t n, cplx s);
std::int64_t divisor_count(std::int64_t n);
std::vector<std::int64_t> divisors(std::int64_t n);

// ---- Bessel K and Whittaker W ------------------------------------------

// K_nu(x) and its derivative companions, all sharing one exponential scale:
//   K_nu(x)      = e^{log_scale} * k
//   -K_nu'(x)    = e^{log_scale} * kd
//   -K_nu'(x) - K_nu(x) = e^{log_scale} * km  (computed without cancellation)
struct ScaledK {
  double log_scale = 0.0;
  cplx k, kd, km;
};

// General complex order, x > 0. Shifted-contour panel quadrature.
ScaledK bessel_k_scaled(cplx nu, double x);

// K_{ir}(x), real. Throws RangeError for r > r_max or x <= 0.
ScaledBesselValue bessel_k_imag(double r, double x, double r_max = kDefaultRMax);

// Plain value e^{pi r/2} K_{ir}(x) (the normalization used by the Fourier sums).
double bessel_k_imag_normalized(double r, double x);

cplx bessel_k(cplx nu, double x);

// W_{kappa,mu}(x) for kappa = -kmax..kmax sharing one log scale.
struct WhittakerFamily {
  int kmax = 0;
  double log_scale = 0.0;
  std::vector<cplx> w;  // index kappa + kmax
  cplx at(int kappa) const { return w[static_cast<std::size_t>(kappa + kmax)]; }
};

WhittakerFamily whittaker_family(int kmax, cplx mu, double x);

// W_{k,ir}(x), real for integer k and real r.
ScaledBesselValue whittaker_w(int k, double r, double x, int k_max = kDefaultKMax,
                              double r_max = kDefaultRMax);
cplx whittaker_w_complex(int k, cplx mu, double x);

// ---- 3F2 at unit argument -------------------------------------------------

struct Hyp3F2Result {
  cplx value;
  double error_estimate = 0.0;
  long terms = 0;
  bool slow_convergence = false;  // Re(e+f-a-b-c) < 0.25
  bool tail_summed = false;       // asymptotic tail added after direct terms
};

Hyp3F2Result hyp3f2_unit(cplx a, cplx b, cplx c, cplx e, cplx f, long term_cap = 100000);

// ---- Bumps, Mellin transforms, quasimode profiles ----------------------------

enum class BumpShape { smooth_bump, gaussian_truncated, custom_samples };

struct BumpSpec {
  double support_lo = 1.0;
  double support_hi = 2.0;
  BumpShape shape = BumpShape::smooth_bump;
  double normalization = 1.0;
  // gaussian_truncated: standard deviation in units of the half-support.
  double gaussian_sigma = 0.125;
  // custom_samples: values at equispaced points across the support (inclusive
  // endpoints); the realized function is the natural cubic spline through them
  // multiplied by the standard bump, so it stays smooth and compactly supported.
  std::vector<double> samples;

  static BumpSpec smooth(double lo, double hi, double norm = 1.0);
  static BumpSpec gaussian(double lo, double hi, double sigma_u = 0.125, double norm = 1.0);
  static BumpSpec custom(double lo, double hi, std::vector<double> samples, double norm = 1.0);

  double operator()(double y) const;
  void validate() const;
  double center() const { return 0.5 * (support_lo + support_hi); }
  double half_width() const { return 0.5 * (support_hi - support_lo); }
};

// Standard bump exp(-1/(1-u^2)) on (-1, 1).
double standard_bump(double u);

// L_psi(s) = int psi(y) y^{-s} dy/y
cplx mellin_of_bump(const BumpSpec& psi, cplx s);

struct ProfileNode {
  double r;
  double w;  // quadrature weight
  double h;  // profile value at r
};

struct QuasimodeProfile {
  double center = 0.0;
  double width = 0.0;
  BumpSpec shape;
  std::vector<ProfileNode> nodes;
  double norm = 1.0;  // h(r) = shape(r) / norm

  double operator()(double r) const;
  double total() const;           // sum w h, should be 1
  double first_moment() const;    // int h |r - center|
  double max_node_r() const;
};

// Bump profile supported on [center - width, center + width].
QuasimodeProfile make_bump_profile(double center, double width, int nodes = 128);
// Gaussian of standard deviation `width`, truncated at 8 widths.
QuasimodeProfile make_gaussian_profile(double center, double width, int nodes = 128);
QuasimodeProfile make_profile(double center, const BumpSpec& shape, double width, int nodes = 128);

// h^(t) = int h(r) e^{-irt} dr
cplx profile_fourier(const QuasimodeProfile& h, double t);

}  // namespace qe
