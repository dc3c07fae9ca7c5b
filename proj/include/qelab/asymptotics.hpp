#pragma once

#include <array>

#include "qelab/eisenstein.hpp"
#include "qelab/specfun.hpp"

namespace qe {

// s = 1 + i dr (plus) or s = 1 - i dr (minus)
enum class Side { plus, minus };
enum class Regime { exact_phase, log_window_approx };

inline cplx side_point(const SpectralPair& p, Side side) {
  return {1.0, side == Side::plus ? p.delta_r() : -p.delta_r()};
}

struct MainTermPrediction {
  double theta = 0.0;  // unwrapped phase
  cplx kernel_value;   // (e^{i theta} - 1)/(i theta), 1 at theta = 0
  cplx main_term;      // includes gamma_correction in the exact regime only
  cplx gamma_correction;
  Regime regime = Regime::exact_phase;
};

struct GammaRatioCheck {
  cplx actual;     // Gamma(sigma + i r1)/Gamma(sigma + i r2)
  cplx predicted;  // exp(i dr log center)
};
GammaRatioCheck gamma_ratio_check(double sigma, const SpectralPair& pair);

// theta with e^{i theta} = zeta(1+2ir1)zeta(1-2ir2)G(1/2+ir1)G(1/2-ir2) / (same with r1 <-> r2).
// Continued from dr = 0, exactly odd in dr. Requires |dr| <= 1.
double phase_theta(const SpectralPair& pair);
// d theta / d dr at dr = 0 for the given center, by a centered difference
double phase_theta_slope(double center);

// int psi(y) dy/y^2, which equals the integral of F_psi over the modular surface
double bump_area_integral(const BumpSpec& psi);

// Holomorphic cofactor of zeta(s + i dr) zeta(s - i dr) in the weight-0 Mellin
// integrand, evaluated at s = 1 -+ i dr.
cplx b0_residue(const BumpSpec& psi, const SpectralPair& pair, Side side);
// General s (log-scaled internally)
cplx b0_at(const BumpSpec& psi, const SpectralPair& pair, cplx s);

// Below this |dr log center| the exact regime switches to the cubic series.
inline constexpr double kSeriesThreshold = 1e-4;

MainTermPrediction main_term_weight0(const BumpSpec& psi, const SpectralPair& pair,
                                     Regime regime = Regime::exact_phase);

// D(dr) = (e^{2iL dr} - 1)/(2iL dr)
cplx kernel_d(double dr, double log_r);

// Mellin integrals of Whittaker products:
//   I3(s) = int W_{k,ir2}(u) W_{0,-ir1}(u) u^{s-2} du,  I4 the same with W_{-k,ir2}.
enum class IkForm { direct, transformed };
struct IkValues {
  cplx i3, i4;
};
IkValues ik3_ik4(cplx s, int k, const SpectralPair& pair, IkForm form = IkForm::transformed);
// Reference by quadrature in log u (moderate r only)
IkValues ik3_ik4_quadrature(cplx s, int k, const SpectralPair& pair);

// (1/G(1/2-ir1)) (I3/G(1/2+k+ir2) + I4/G(1/2-k+ir2)), exact, log-scaled
cplx bk_bracket(cplx s, int k, const SpectralPair& pair);

// The four dr -> 0 limit terms of the bracket at s = 1 - i dr, each kept separate
// so the cancellation between them can be inspected.
struct BkLimitTerms {
  cplx ik3_1, ik3_2, ik4_1, ik4_2;
  cplx sum() const { return ik3_1 + ik3_2 + ik4_1 + ik4_2; }
};
BkLimitTerms bk_limit_terms(int k, const SpectralPair& pair);

// Weight-2k analogue of b0_residue, normalized so that k = 0 reproduces B_0
// exactly. With this normalization B_k(1 -+ i dr) ~ (i dr / k) B_0.
cplx bk_residue(const BumpSpec& psi, int k, const SpectralPair& pair, Side side);
cplx bk_at(const BumpSpec& psi, int k, const SpectralPair& pair, cplx s);

// iint h(r1) h(r2) [e^{2iL(r1-r2)} - 1] dr1 dr2, L = log(center)
cplx kernel_double_integral(const QuasimodeProfile& h);
// (3/pi) int F_psi * (1/k) * kernel_double_integral
cplx weight_k_coefficient(const BumpSpec& psi, int k, const QuasimodeProfile& h);

// (1/2L) int_0^{2L} |h^(t)|^2 dt
double ehrenfest_mass(const QuasimodeProfile& h);
// iint h h D(r1 - r2), the same number by the kernel route
double ehrenfest_mass_kernel(const QuasimodeProfile& h);

}  // namespace qe
