#include "qelab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "qelab/quadrature.hpp"

namespace qe {

namespace {

cplx lg(cplx z) { return log_gamma(z); }

cplx log_hyp(cplx a, cplx b, cplx c, cplx e, cplx f) { return std::log(hyp3f2_unit(a, b, c, e, f).value); }

// sum exp(l_i) without overflow in the individual terms
cplx sum_exp(const std::vector<cplx>& logs) {
  double top = -INFINITY;
  for (auto& l : logs) top = std::max(top, l.real());
  if (!std::isfinite(top)) return 0.0;
  std::vector<cplx> v;
  v.reserve(logs.size());
  for (auto& l : logs) v.push_back(std::exp(l - top));
  return pairwise_sum(v) * std::exp(top);
}

void check_pair(const SpectralPair& p) {
  p.validate();
  if (!(p.r1 > 0.0) || !(p.r2 > 0.0)) throw DomainError("asymptotics: spectral parameters must be positive");
}

// (e^{i t} - 1)/(i t) without cancellation
cplx unit_kernel(double t) {
  if (std::abs(t) < 1e-4) return {1.0 - t * t / 6.0, 0.5 * t};
  double h = 0.5 * t;
  double sh = std::sin(h);
  // e^{it} - 1 = -2 sin^2(t/2) + i sin t
  return cplx(-2.0 * sh * sh, std::sin(t)) / cplx(0.0, t);
}

// e^{i t} - 1 without cancellation
cplx expm1_i(double t) {
  double sh = std::sin(0.5 * t);
  return {-2.0 * sh * sh, std::sin(t)};
}

// log of each of the four terms of I3 (two) and I4 (two), before division by
// the Gamma(1/2 +- k + i r2) factors.
std::array<cplx, 4> ik_log_terms(cplx s, int k, const SpectralPair& p, IkForm form) {
  const double r1 = p.r1, r2 = p.r2;
  const cplx iD(0.0, p.delta_r()), iS(0.0, p.sum_r());
  const cplx ir1(0.0, r1), ir2(0.0, r2);
  const double kk = k;
  std::array<cplx, 4> t;
  if (form == IkForm::transformed) {
    cplx lk = lg(kk + 1.0 - s);
    t[0] = lg(s - iD) + lg(s + iS) + lg(-2.0 * ir2) + lk - lg(0.5 - kk - ir2) - lg(0.5 + ir1) - lg(kk + 1.0 - iD) +
           log_hyp(s - iD, 1.0 - s - iD, 0.5 + kk + ir2, 1.0 + 2.0 * ir2, 1.0 + kk - iD);
    t[1] = lg(s - iS) + lg(s + iD) + lg(2.0 * ir2) + lk - lg(0.5 - kk + ir2) - lg(0.5 - ir1) - lg(kk + 1.0 + iD) +
           log_hyp(s + iD, 1.0 - s + iD, 0.5 + kk - ir2, 1.0 - 2.0 * ir2, 1.0 + kk + iD);
    t[2] = lg(s - iD) + lg(s - iS) + lg(2.0 * ir1) + lk - lg(0.5 + ir1) - lg(0.5 + kk - ir2) - lg(1.0 + kk - iD) +
           log_hyp(s - iD, 0.5 - ir1, 1.0 - s - iD, 1.0 + kk - iD, 1.0 - 2.0 * ir1);
    t[3] = lg(s + iS) + lg(s + iD) + lg(-2.0 * ir1) + lk - lg(0.5 - ir1) - lg(0.5 + kk + ir2) - lg(1.0 + kk + iD) +
           log_hyp(s + iD, 0.5 + ir1, 1.0 - s + iD, 1.0 + 2.0 * ir1, 1.0 + kk + iD);
  } else {
    t[0] = lg(s - iD) + lg(s + iS) + lg(-2.0 * ir2) - lg(0.5 - kk - ir2) - lg(s + 0.5 + ir2) +
           log_hyp(s - iD, s + iS, 0.5 - kk + ir2, 1.0 + 2.0 * ir2, s + 0.5 + ir2);
    t[1] = lg(s - iS) + lg(s + iD) + lg(2.0 * ir2) - lg(0.5 - kk + ir2) - lg(s + 0.5 - ir2) +
           log_hyp(s - iS, s + iD, 0.5 - kk - ir2, 1.0 - 2.0 * ir2, s + 0.5 - ir2);
    t[2] = lg(s - iD) + lg(s - iS) + lg(2.0 * ir1) - lg(0.5 + ir1) - lg(s + 0.5 + kk - ir1) +
           log_hyp(s - iD, s - iS, 0.5 - ir1, 1.0 - 2.0 * ir1, s + 0.5 + kk - ir1);
    t[3] = lg(s + iS) + lg(s + iD) + lg(-2.0 * ir1) - lg(0.5 - ir1) - lg(s + 0.5 + kk + ir1) +
           log_hyp(s + iS, s + iD, 0.5 + ir1, 1.0 + 2.0 * ir1, s + 0.5 + kk + ir1);
  }
  return t;
}

// log of X(s) terms: I3 pieces over Gamma(1/2+k+ir2), I4 pieces over Gamma(1/2-k+ir2)
std::vector<cplx> bracket_logs(cplx s, int k, const SpectralPair& p) {
  auto t = ik_log_terms(s, k, p, IkForm::transformed);
  cplx g3 = lg(cplx(0.5 + k, p.r2)), g4 = lg(cplx(0.5 - k, p.r2));
  return {t[0] - g3, t[1] - g3, t[2] - g4, t[3] - g4};
}

}  // namespace

// ---- Gamma ratio ----------------------------------------------------------------

GammaRatioCheck gamma_ratio_check(double sigma, const SpectralPair& pair) {
  pair.validate();
  GammaRatioCheck out;
  double d = pair.delta_r();
  out.actual = std::exp(log_gamma_shift(cplx(sigma, pair.r2), cplx(0.0, d)));
  double ph = d * std::log(pair.center);
  out.predicted = {std::cos(ph), std::sin(ph)};
  return out;
}

// ---- phase ---------------------------------------------------------------------

double phase_theta(const SpectralPair& pair) {
  check_pair(pair);
  double d = pair.delta_r();
  if (std::abs(d) > 1.0) throw RangeError("phase_theta: |dr| must be at most 1");
  if (d == 0.0) return 0.0;
  // evaluate for the ordered pair and apply the sign, so oddness is exact
  double hi = std::max(pair.r1, pair.r2), lo = std::min(pair.r1, pair.r2);
  double ad = std::abs(d);
  cplx l = log_zeta_ratio(cplx(1.0, 2.0 * hi), cplx(1.0, 2.0 * lo)) + log_gamma_shift(cplx(0.5, lo), cplx(0.0, ad));
  double th = 2.0 * l.imag();
  return d > 0.0 ? th : -th;
}

double phase_theta_slope(double center) {
  double h = kSeriesThreshold / std::max(1.0, std::log(center));
  return phase_theta(SpectralPair::around(center, h)) / h;
}

// ---- B_0 and the weight-0 main term ------------------------------------------

double bump_area_integral(const BumpSpec& psi) { return mellin_of_bump(psi, 1.0).real(); }

cplx b0_at(const BumpSpec& psi, const SpectralPair& pair, cplx s) {
  check_pair(pair);
  const cplx iD(0.0, pair.delta_r()), iS(0.0, pair.sum_r());
  cplx num = std::log(mellin_of_bump(psi, s)) + std::log(riemann_zeta(s - iS)) + std::log(riemann_zeta(s + iS)) +
             lg(0.5 * (s - iD)) + lg(0.5 * (s - iS)) + lg(0.5 * (s + iS)) + lg(0.5 * (s + iD));
  cplx den = cplx(0.0, 0.5 * kPi) + (s + iD) * kLogPi + lg(cplx(0.5, -pair.r1)) + lg(cplx(0.5, pair.r2)) +
             std::log(riemann_zeta(cplx(1.0, -2.0 * pair.r1))) + std::log(riemann_zeta(cplx(1.0, 2.0 * pair.r2))) +
             std::log(riemann_zeta(2.0 * s)) + lg(s);
  return 0.5 * std::exp(num - den);
}

cplx b0_residue(const BumpSpec& psi, const SpectralPair& pair, Side side) {
  return b0_at(psi, pair, side_point(pair, side));
}

cplx kernel_d(double dr, double log_r) { return unit_kernel(2.0 * log_r * dr); }

MainTermPrediction main_term_weight0(const BumpSpec& psi, const SpectralPair& pair, Regime regime) {
  check_pair(pair);
  double d = pair.delta_r();
  if (std::abs(d) > 1.0) throw RangeError("main_term_weight0: |dr| must be at most 1");
  double lr = std::log(pair.center);
  double area = (6.0 / kPi) * bump_area_integral(psi);
  MainTermPrediction out;
  out.regime = regime;
  if (regime == Regime::log_window_approx) {
    out.theta = 2.0 * d * lr;
    out.kernel_value = unit_kernel(out.theta);
    out.gamma_correction = (expm1_i(out.theta) + 2.0) * kEulerGamma * area;
    // (e^{i theta} - 1)/(2i dr) = kernel * log r
    out.main_term = out.kernel_value * lr * area;
    return out;
  }
  cplx lead;
  if (std::abs(d * lr) < kSeriesThreshold) {
    // removable singularity: theta/(2 dr) by centered differences of theta
    double half_slope;
    if (d == 0.0) {
      half_slope = 0.5 * phase_theta_slope(pair.center);
      out.theta = 0.0;
    } else {
      SpectralPair flipped{pair.r2, pair.r1, pair.center};
      out.theta = phase_theta(pair);
      half_slope = (out.theta - phase_theta(flipped)) / (4.0 * d);
    }
    double t = out.theta;
    lead = half_slope * cplx(1.0 - t * t / 6.0, 0.5 * t);
  } else {
    out.theta = phase_theta(pair);
    lead = expm1_i(out.theta) / cplx(0.0, 2.0 * d);
  }
  out.kernel_value = unit_kernel(out.theta);
  out.gamma_correction = (expm1_i(out.theta) + 2.0) * kEulerGamma * area;
  out.main_term = lead * area + out.gamma_correction;
  return out;
}

// ---- Whittaker-product integrals and B_k ------------------------------------

IkValues ik3_ik4(cplx s, int k, const SpectralPair& pair, IkForm form) {
  check_pair(pair);
  if (k < 1) throw DomainError("ik3_ik4: k must be positive");
  auto t = ik_log_terms(s, k, pair, form);
  return {check_finite(std::exp(t[0]) + std::exp(t[1]), "ik3_ik4"),
          check_finite(std::exp(t[2]) + std::exp(t[3]), "ik3_ik4")};
}

IkValues ik3_ik4_quadrature(cplx s, int k, const SpectralPair& pair) {
  check_pair(pair);
  if (s.real() <= 0.0) throw DivergenceError("ik3_ik4_quadrature: needs Re s > 0");
  // u = e^t; the integrand behaves like u^{Re s} at 0 and e^{-u} u^{k} at infinity
  double t_lo = std::log(1e-16) / s.real();
  double t_hi = std::log(80.0 + 4.0 * k + 2.0 * std::max(pair.r1, pair.r2));
  double freq = pair.r1 + pair.r2 + std::abs(s.imag()) + 4.0;
  int panels = static_cast<int>(std::ceil((t_hi - t_lo) * freq / (1.5 * 2.0 * kPi))) + 8;
  auto nodes = composite_gauss(t_lo, t_hi, panels, 16);
  std::vector<cplx> a3, a4;
  a3.reserve(nodes.size());
  a4.reserve(nodes.size());
  for (auto [t, w] : nodes) {
    double u = std::exp(t);
    WhittakerFamily fam = whittaker_family(k, cplx(0.0, pair.r2), u);
    WhittakerFamily f0 = whittaker_family(0, cplx(0.0, -pair.r1), u);
    cplx common = w * f0.at(0) * std::exp(fam.log_scale + f0.log_scale + (s - 1.0) * t);
    a3.push_back(common * fam.at(k));
    a4.push_back(common * fam.at(-k));
  }
  return {pairwise_sum(a3), pairwise_sum(a4)};
}

cplx bk_bracket(cplx s, int k, const SpectralPair& pair) {
  check_pair(pair);
  auto logs = bracket_logs(s, k, pair);
  cplx g = lg(cplx(0.5, -pair.r1));
  for (auto& l : logs) l -= g;
  return sum_exp(logs);
}

BkLimitTerms bk_limit_terms(int k, const SpectralPair& pair) {
  check_pair(pair);
  if (k < 1) throw DomainError("bk_limit_terms: k must be positive");
  const double r1 = pair.r1, r2 = pair.r2, kk = k;
  const cplx ir1(0.0, r1), ir2(0.0, r2);
  const double lk = std::log(kk);
  const double abs2 = 2.0 * lg(0.5 + ir1).real();  // log |G(1/2 + i r1)|^2
  BkLimitTerms out;
  out.ik3_1 = std::exp(lg(1.0 + 2.0 * ir2) + lg(-2.0 * ir2) - lk - lg(0.5 - kk - ir2) - abs2 - lg(0.5 + kk + ir2));
  out.ik3_2 = std::exp(lg(1.0 - 2.0 * ir1) + lg(2.0 * ir2) - lk - lg(0.5 - kk + ir2) - 2.0 * lg(0.5 - ir1) -
                       lg(0.5 + kk + ir2));
  out.ik4_1 = std::exp(lg(1.0 - 2.0 * ir1) + lg(2.0 * ir1) - lk - abs2 - lg(0.5 + kk - ir2) - lg(0.5 - kk + ir2));
  out.ik4_2 = std::exp(lg(1.0 + 2.0 * ir2) + lg(-2.0 * ir1) - lk - 2.0 * lg(0.5 - ir1) - lg(0.5 + kk + ir2) -
                       lg(0.5 - kk + ir2));
  return out;
}

cplx bk_at(const BumpSpec& psi, int k, const SpectralPair& pair, cplx s) {
  check_pair(pair);
  if (k < 1) throw DomainError("bk_residue: k must be positive");
  const cplx iS(0.0, pair.sum_r());
  // (-1)^k (4 pi)^{1-s} G(1/2+ir2) / (2 pi i xi(1-2ir1) xi(1+2ir2)) L(s) zeta(s-iS) zeta(s+iS)/zeta(2s) X(s)
  cplx pre = (1.0 - s) * std::log(4.0 * kPi) + lg(cplx(0.5, pair.r2)) - std::log(cplx(0.0, 2.0 * kPi)) -
             log_xi(cplx(1.0, -2.0 * pair.r1)) - log_xi(cplx(1.0, 2.0 * pair.r2)) +
             std::log(mellin_of_bump(psi, s)) + std::log(riemann_zeta(s - iS)) + std::log(riemann_zeta(s + iS)) -
             std::log(riemann_zeta(2.0 * s));
  auto logs = bracket_logs(s, k, pair);
  for (auto& l : logs) l += pre;
  cplx v = sum_exp(logs);
  return (k % 2 == 0) ? v : -v;
}

cplx bk_residue(const BumpSpec& psi, int k, const SpectralPair& pair, Side side) {
  return bk_at(psi, k, pair, side_point(pair, side));
}

// ---- quasimode kernels -----------------------------------------------------------

cplx kernel_double_integral(const QuasimodeProfile& h) {
  double L = std::log(h.center);
  std::vector<cplx> rows;
  rows.reserve(h.nodes.size());
  for (auto& a : h.nodes) {
    std::vector<cplx> row;
    row.reserve(h.nodes.size());
    for (auto& b : h.nodes) row.push_back(b.w * b.h * expm1_i(2.0 * L * (a.r - b.r)));
    rows.push_back(a.w * a.h * pairwise_sum(row));
  }
  return pairwise_sum(rows);
}

cplx weight_k_coefficient(const BumpSpec& psi, int k, const QuasimodeProfile& h) {
  if (k < 1) throw DomainError("weight_k_coefficient: k must be positive");
  return (3.0 / kPi) * bump_area_integral(psi) / static_cast<double>(k) * kernel_double_integral(h);
}

double ehrenfest_mass(const QuasimodeProfile& h) {
  double L = std::log(h.center);
  if (!(L > 0.0)) throw DomainError("ehrenfest_mass: center must exceed 1");
  double spread = 0.0;
  for (auto& n : h.nodes) spread = std::max(spread, std::abs(n.r - h.center));
  int panels = std::max(4, static_cast<int>(std::ceil(2.0 * L * spread)) + 4);
  auto f = [&](double t) {
    // modulus only, so the phase is taken relative to the center
    std::vector<cplx> v;
    v.reserve(h.nodes.size());
    for (auto& n : h.nodes) {
      double ph = -(n.r - h.center) * t;
      v.push_back(n.w * n.h * cplx(std::cos(ph), std::sin(ph)));
    }
    return std::norm(pairwise_sum(v));
  };
  return integrate_panels<double>(f, 0.0, 2.0 * L, panels, 16) / (2.0 * L);
}

double ehrenfest_mass_kernel(const QuasimodeProfile& h) {
  double L = std::log(h.center);
  if (!(L > 0.0)) throw DomainError("ehrenfest_mass_kernel: center must exceed 1");
  std::vector<double> rows;
  rows.reserve(h.nodes.size());
  for (auto& a : h.nodes) {
    std::vector<double> row;
    row.reserve(h.nodes.size());
    // the odd imaginary part of D cancels over the symmetric double sum
    for (auto& b : h.nodes) row.push_back(b.w * b.h * unit_kernel(2.0 * L * (a.r - b.r)).real());
    rows.push_back(a.w * a.h * pairwise_sum(row));
  }
  return pairwise_sum(rows);
}

}  // namespace qe
