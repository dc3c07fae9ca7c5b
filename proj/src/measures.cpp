#include "qelab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>

#include "qelab/quadrature.hpp"

namespace qe {

namespace {

// phase oscillations per 16-point panel
constexpr double kWavesPerPanel = 1.5;

int panels_for(double length, double freq, int min_panels) {
  return std::max(min_panels, static_cast<int>(std::ceil(length * freq / (kWavesPerPanel * 2.0 * kPi))));
}

// sum_{ab = n} (a/b)^{ir} = n^{-ir} sigma_{2ir}(n), real
double divisor_phase_sum(std::int64_t n, double r) {
  double acc = 0.0;
  for (auto d : divisors(n)) {
    double e = static_cast<double>(d) / static_cast<double>(n / d);
    acc += std::cos(r * std::log(e));
  }
  return acc;
}

// ---- fundamental-domain integration ----------------------------------------------

struct Slice {
  std::function<cplx(double)> g;  // integrand in x at this height, without the measure
  std::int64_t modes = 0;         // highest x-frequency present
  double tail = 0.0;              // bound on |g| error from series truncation
};

struct FdResult {
  cplx value;
  double tail = 0.0;
  std::int64_t nodes = 0;
};

cplx integrate_x(const Slice& s, double lo, double hi, int order, std::int64_t& nodes) {
  int panels = std::max(2, static_cast<int>(std::ceil(static_cast<double>(s.modes) * (hi - lo) / kWavesPerPanel)) + 1);
  nodes += static_cast<std::int64_t>(panels) * order;
  return integrate_panels<cplx>(s.g, lo, hi, panels, order);
}

// int over {|x| <= 1/2, |z| >= 1, y <= exp(t_breaks.back())} of g dx dy / y^2.
// t_breaks: increasing log-heights starting at 0; the upper part uses log y as
// variable, the lower arc region v = sqrt(1 - y^2).
FdResult integrate_fd(const std::vector<double>& t_breaks, double freq, bool bottom, int order,
                      const std::function<Slice(double)>& slice_at) {
  FdResult out;
  std::vector<cplx> parts;
  double tail = 0.0;
  for (std::size_t seg = 0; seg + 1 < t_breaks.size(); ++seg) {
    double t0 = t_breaks[seg], t1 = t_breaks[seg + 1];
    if (!(t1 > t0)) continue;
    for (auto [t, w] : composite_gauss(t0, t1, panels_for(t1 - t0, freq, 12), order)) {
      double y = std::exp(t);
      Slice s = slice_at(y);
      parts.push_back(w / y * integrate_x(s, -0.5, 0.5, order, out.nodes));
      tail += w / y * s.tail;
    }
  }
  if (bottom) {
    // y in [sqrt(3)/2, 1]: x in [-1/2, -v] and [v, 1/2], dy = (v/y) dv
    for (auto [v, w] : composite_gauss(0.0, 0.5, panels_for(0.2, freq, 12), order)) {
      double y = std::sqrt(1.0 - v * v);
      Slice s = slice_at(y);
      cplx in = integrate_x(s, v, 0.5, order, out.nodes) + integrate_x(s, -0.5, -v, order, out.nodes);
      double jac = w * v / (y * y * y);
      parts.push_back(jac * in);
      tail += jac * (1.0 - 2.0 * v) * s.tail;
    }
  }
  out.value = pairwise_sum(parts);
  out.tail = tail;
  return out;
}

double row_mass(const FourierRow& r) {
  double m = std::abs(r.constant);
  for (auto& c : r.pos) m += std::abs(c);
  for (auto& c : r.neg) m += std::abs(c);
  return m;
}

std::int64_t row_modes(const FourierRow& r) { return static_cast<std::int64_t>(std::max(r.pos.size(), r.neg.size())); }

void check_envelope(const SpectralPair& p) {
  p.validate();
  if (std::max(std::abs(p.r1), std::abs(p.r2)) > kDefaultRMax) throw RangeError("measures: pair exceeds r_max");
}

// ---- unfolded sums -----------------------------------------------------------------

struct YGrid {
  std::vector<double> t, y, wpsi;  // wpsi = weight * psi(y)
};

YGrid make_ygrid(const BumpSpec& psi, double freq) {
  YGrid g;
  double t0 = std::log(psi.support_lo), t1 = std::log(psi.support_hi);
  for (auto [t, w] : composite_gauss(t0, t1, panels_for(t1 - t0, freq, 12), 16)) {
    double y = std::exp(t);
    double p = psi(y);
    g.t.push_back(t);
    g.y.push_back(y);
    g.wpsi.push_back(w * p);
  }
  return g;
}

// Per-spectral-parameter data for the coefficient sums: divisor phases and
// special-function values at (n, y_j), scaled by e^{pi r/2}.
struct SideTable {
  double r = 0.0;
  std::int64_t n_max = 0;
  std::size_t ny = 0;
  std::vector<double> arith;  // n = 1..n_max
  std::vector<cplx> vals;     // [(n-1) * ny + j]
  std::vector<cplx> phase;    // e^{-i r t_j}
  // as the E(1/2 - ir) side: phi(1/2 - ir), log xi(1 - 2ir)
  cplx phi_left, lxi_left;
  // as the partner side: constant coefficient at 1/2 + ir, log xi(1 + 2ir)
  cplx coef_right, lxi_right;

  cplx at(std::int64_t n, std::size_t j) const { return vals[static_cast<std::size_t>(n - 1) * ny + j]; }
};

enum class TableKind { bessel, whittaker0, whittaker_pair };

SideTable make_table(double r, int k, TableKind kind, const YGrid& g, std::int64_t n_max) {
  SideTable tb;
  tb.r = r;
  tb.n_max = n_max;
  tb.ny = g.y.size();
  tb.arith.resize(static_cast<std::size_t>(n_max));
  for (std::int64_t n = 1; n <= n_max; ++n) tb.arith[static_cast<std::size_t>(n - 1)] = divisor_phase_sum(n, r);
  tb.vals.resize(static_cast<std::size_t>(n_max) * tb.ny);
  tb.phi_left = phi_scattering(cplx(0.5, -r));
  tb.lxi_left = log_xi(cplx(1.0, -2.0 * r));
  tb.coef_right = kind == TableKind::whittaker_pair ? eisenstein_constant_coefficient(cplx(0.5, r), -k)
                                                    : phi_scattering(cplx(0.5, r));
  tb.lxi_right = log_xi(cplx(1.0, 2.0 * r));
  for (std::size_t j = 0; j < tb.ny; ++j) tb.phase.push_back(std::exp(cplx(0.0, -r * g.t[j])));
  const cplx s2(0.5, r);
  cplx lg_plus = 0.0, lg_minus = 0.0;
  if (kind == TableKind::whittaker_pair) {
    cplx l0 = log_gamma(s2);
    lg_plus = l0 - log_gamma(s2 + static_cast<double>(k));
    lg_minus = l0 - log_gamma(s2 - static_cast<double>(k));
  }
  for (std::int64_t n = 1; n <= n_max; ++n) {
    for (std::size_t j = 0; j < tb.ny; ++j) {
      double y = g.y[j];
      double x = 2.0 * kPi * static_cast<double>(n) * y;
      cplx v;
      switch (kind) {
        case TableKind::bessel:
          v = bessel_k_imag_normalized(r, x);
          break;
        case TableKind::whittaker0:
          // e^{pi r/2} W_{0,ir}(4 pi n y) = sqrt(4ny) e^{pi r/2} K_{ir}(2 pi n y)
          v = std::sqrt(4.0 * static_cast<double>(n) * y) * bessel_k_imag_normalized(r, x);
          break;
        case TableKind::whittaker_pair: {
          WhittakerFamily f = whittaker_family(k, cplx(0.0, r), 2.0 * x);
          double base = f.log_scale + 0.5 * kPi * r;
          v = std::exp(base + lg_plus) * f.at(k) + std::exp(base + lg_minus) * f.at(-k);
          break;
        }
      }
      tb.vals[static_cast<std::size_t>(n - 1) * tb.ny + j] = v;
    }
  }
  return tb;
}

struct PairSums {
  cplx constant, nsum;
  cplx diagonal, cross;
  double tail = 0.0;
};

// a: the E(1/2 - i r1) side, b: the partner side
PairSums unfolded_pair(const YGrid& g, const SideTable& a, const SideTable& b, int k) {
  const double r1 = a.r, r2 = b.r;
  const cplx phi1 = a.phi_left, c2 = b.coef_right;
  PairSums out;
  std::vector<cplx> dparts(g.y.size()), sparts(g.y.size());
  for (std::size_t j = 0; j < g.y.size(); ++j) {
    cplx pa = a.phase[j], pb = b.phase[j];
    // y^{-i dr}, y^{i dr}, y^{-i sr}, y^{i sr}
    cplx m_d = pa * std::conj(pb), p_d = std::conj(m_d), m_s = pa * pb, p_s = std::conj(m_s);
    dparts[j] = g.wpsi[j] * (m_d + phi1 * c2 * p_d);
    sparts[j] = g.wpsi[j] * (c2 * m_s + phi1 * p_s);
  }
  out.diagonal = pairwise_sum(dparts);
  out.cross = pairwise_sum(sparts);
  out.constant = out.diagonal + out.cross;

  cplx lpre = -a.lxi_left - b.lxi_right - 0.5 * kPi * (r1 + r2);
  cplx pre = std::exp(lpre);
  if (k == 0) pre *= 8.0;
  else if (k % 2 != 0) pre = -pre;
  std::int64_t n_max = std::min(a.n_max, b.n_max);
  std::vector<cplx> terms(static_cast<std::size_t>(n_max));
  std::vector<cplx> ys(g.y.size());
  for (std::int64_t n = 1; n <= n_max; ++n) {
    for (std::size_t j = 0; j < g.y.size(); ++j) {
      double w = k == 0 ? g.wpsi[j] : g.wpsi[j] / g.y[j];
      ys[j] = w * a.at(n, j) * b.at(n, j);
    }
    double ar = a.arith[static_cast<std::size_t>(n - 1)] * b.arith[static_cast<std::size_t>(n - 1)];
    if (k != 0) ar /= static_cast<double>(n);
    terms[static_cast<std::size_t>(n - 1)] = ar * pairwise_sum(ys);
  }
  out.nsum = pre * pairwise_sum(terms);
  // beyond the transition the terms fall at least like e^{-4 pi n y_lo}, times
  // a divisor factor at most doubling per step
  double q = 2.0 * std::exp(-4.0 * kPi * g.y.front());
  double last = n_max > 0 ? std::abs(pre * terms.back()) : 0.0;
  double rounding = 0.0;
  for (auto& t : terms) rounding += std::abs(t);
  out.tail = last * q / std::max(1e-3, 1.0 - q) + 1e-15 * std::abs(pre) * rounding;
  return out;
}

double grid_freq(double r1, double r2) { return std::abs(r1) + std::abs(r2) + 10.0; }

MeasureReport finish_report(const PairSums& ps, cplx prediction) {
  MeasureReport rep;
  rep.constant_term_part = ps.constant;
  rep.incoming_outgoing_part = ps.diagonal;
  rep.cross_part = ps.cross;
  rep.coefficient_sum_part = ps.nsum;
  rep.value = ps.constant + ps.nsum;
  rep.tail_bound = ps.tail;
  rep.prediction = prediction;
  rep.rel_deviation = std::abs(rep.value - prediction) / std::max(std::abs(prediction), 1e-300);
  return rep;
}

// sup of psi: the standard bump and the gaussian are at most 1
double psi_sup(const BumpSpec& psi) {
  double m = 1.0;
  for (double v : psi.samples) m = std::max(m, std::abs(v));
  return psi.normalization * m;
}

void check_psi(const BumpSpec& psi) {
  psi.validate();
  if (!(psi.support_lo > 0.0)) throw DomainError("measures: bump support must lie in (0, inf)");
}

}  // namespace

// ---- test functions ----------------------------------------------------------------

void HolomorphicCuspFormTest::validate() const {
  if (n_max < 1 || static_cast<std::int64_t>(coefficients.size()) < n_max)
    throw DomainError("HolomorphicCuspForm: coefficient table shorter than n_max");
  if (c(1) != 1.0) throw DomainError("HolomorphicCuspForm: c(1) must be 1");
  for (std::int64_t m = 2; m * m <= n_max; ++m)
    for (std::int64_t n = m + 1; m * n <= n_max; ++n) {
      if (std::gcd(m, n) != 1) continue;
      double lhs = c(m * n), rhs = c(m) * c(n);
      if (std::abs(lhs - rhs) > 1e-9 * std::max(1.0, std::abs(rhs)))
        throw DomainError("HolomorphicCuspForm: coefficients not multiplicative");
    }
}

std::vector<double> ramanujan_tau(int n_max) {
  if (n_max < 1) throw DomainError("ramanujan_tau: n_max must be positive");
  // coefficients of prod_{m>=1} (1 - q^m)^24 up to q^{n_max - 1}
  std::vector<__int128> c(static_cast<std::size_t>(n_max), 0);
  c[0] = 1;
  for (int m = 1; m < n_max; ++m)
    for (int rep = 0; rep < 24; ++rep)
      for (int j = n_max - 1; j >= m; --j) c[static_cast<std::size_t>(j)] -= c[static_cast<std::size_t>(j - m)];
  std::vector<double> tau(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) tau[static_cast<std::size_t>(n - 1)] = static_cast<double>(c[static_cast<std::size_t>(n - 1)]);
  return tau;
}

HolomorphicCuspFormTest discriminant_form(int n_max) {
  HolomorphicCuspFormTest f;
  f.k = 6;
  f.coefficients = ramanujan_tau(n_max);
  f.n_max = n_max;
  return f;
}

// ---- quadrature route ---------------------------------------------------------------

QuadratureReport mu_pair_quadrature_detail(const TestFunction& f, const SpectralPair& pair,
                                           const MeasurePolicy& policy) {
  check_envelope(pair);
  policy.truncation.validate();
  if (!(policy.y_cut >= 1.0)) throw DomainError("mu_pair_quadrature: y_cut must be at least 1");
  const cplx s1(0.5, -pair.r1), s2(0.5, pair.r2);
  const TruncationPolicy& tp = policy.truncation;
  QuadratureReport rep;
  double freq = grid_freq(pair.r1, pair.r2);

  if (auto* ie = std::get_if<IncompleteEisensteinTest>(&f)) {
    const BumpSpec& psi = ie->psi;
    check_psi(psi);
    if (std::abs(ie->k) > kDefaultKMax) throw RangeError("mu_pair_quadrature: |k| exceeds k_max");
    double a = psi.support_lo, b = psi.support_hi;
    double y_need = std::max({1.0, b, 1.0 / a});
    double y_top = std::min(policy.y_cut, y_need);
    std::vector<double> breaks{0.0};
    for (double t : {std::log(a), std::log(b)})
      if (t > 0.0 && t < std::log(y_top)) breaks.push_back(t);
    breaks.push_back(std::log(y_top));
    std::sort(breaks.begin(), breaks.end());
    int k = ie->k;
    auto slice = [&](double y) {
      auto r1 = std::make_shared<FourierRow>(eisenstein_row(y, s1, 0, tp));
      auto r2 = std::make_shared<FourierRow>(eisenstein_row(y, s2, -k, tp));
      Slice s;
      s.modes = row_modes(*r1) + row_modes(*r2);
      s.g = [r1, r2, y, &psi, k](double x) {
        cplx fv = incomplete_eisenstein_eval({x, y}, psi, k);
        if (fv == 0.0) return cplx(0.0);
        return fv * r1->at(x) * r2->at(x);
      };
      double psi_max = psi_sup(psi);  // crude sup of |F| per coset
      s.tail = psi_max * (r1->tail_bound * row_mass(*r2) + r2->tail_bound * row_mass(*r1));
      return s;
    };
    FdResult res = integrate_fd(breaks, freq, a < 1.0, policy.gauss_order, slice);
    rep.value = res.value;
    rep.series_tail = res.tail;
    rep.nodes = res.nodes;
    if (y_top < y_need) {
      // |E(1/2 + ir)| <= 2 sqrt(y) from the constant term above Y
      auto bound = [&](double t) {
        double y = std::exp(t);
        double fb = psi(y);
        if (y <= 1.0 / a) fb += 2.0 * std::sqrt(y / a) * psi_sup(psi);
        return 4.0 * fb;
      };
      rep.cusp_tail_bound = integrate_panels<double>(bound, std::log(y_top), std::log(y_need), 16, 16);
    }
  } else {
    const auto& cf = std::get<HolomorphicCuspFormTest>(f);
    cf.validate();
    int k = cf.k;
    double y_need = 2.0 + (k + 35.0) / (2.0 * kPi);
    double y_top = std::min(policy.y_cut, y_need);
    std::vector<double> breaks{0.0, std::log(y_top)};
    auto slice = [&](double y) {
      auto r1 = std::make_shared<FourierRow>(eisenstein_row(y, s1, 0, tp));
      auto r2 = std::make_shared<FourierRow>(eisenstein_row(y, s2, k, tp));
      auto coef = std::make_shared<std::vector<double>>();
      double yk = std::pow(y, k);
      for (std::int64_t n = 1; n <= cf.n_max; ++n) {
        double a_n = cf.c(n) * yk * std::exp(-2.0 * kPi * static_cast<double>(n) * y);
        if (std::abs(a_n) < 1e-18 * yk * std::exp(-2.0 * kPi * y) && n > 1) break;
        coef->push_back(a_n);
      }
      Slice s;
      s.modes = row_modes(*r1) + row_modes(*r2) + static_cast<std::int64_t>(coef->size());
      s.g = [r1, r2, coef](double x) {
        std::vector<cplx> v(coef->size());
        for (std::size_t n = 0; n < coef->size(); ++n) {
          double ph = 2.0 * kPi * static_cast<double>(n + 1) * x;
          v[n] = (*coef)[n] * cplx(std::cos(ph), std::sin(ph));
        }
        return pairwise_sum(v) * r1->at(x) * r2->at(x);
      };
      double fm = 0.0;
      for (double c : *coef) fm += std::abs(c);
      s.tail = fm * (r1->tail_bound * row_mass(*r2) + r2->tail_bound * row_mass(*r1));
      return s;
    };
    FdResult res = integrate_fd(breaks, freq, true, policy.gauss_order, slice);
    rep.value = res.value;
    rep.series_tail = res.tail;
    rep.nodes = res.nodes;
    // sum_n |c(n)| int_Y^inf 4 y^{k-1} e^{-2 pi n y} dy
    double yv = y_top, acc = 0.0;
    for (std::int64_t n = 1; n <= cf.n_max; ++n) {
      double rate = 2.0 * kPi * static_cast<double>(n) - (k - 1.0) / yv;
      if (rate <= 0.0) rate = 1.0;
      acc += std::abs(cf.c(n)) * 4.0 * std::pow(yv, k - 1) * std::exp(-2.0 * kPi * static_cast<double>(n) * yv) / rate;
    }
    rep.cusp_tail_bound = acc;
  }
  rep.y_too_small = rep.cusp_tail_bound > policy.tail_tolerance * std::max(std::abs(rep.value), 1e-300);
  return rep;
}

cplx mu_pair_quadrature(const TestFunction& f, const SpectralPair& pair, const MeasurePolicy& policy) {
  return mu_pair_quadrature_detail(f, pair, policy).value;
}

// ---- unfolded route ---------------------------------------------------------------

std::int64_t unfolded_terms(double r, double y_lo) {
  double ra = std::abs(r);
  return static_cast<std::int64_t>(std::ceil((ra + 40.0 * std::cbrt(ra)) / (2.0 * kPi * y_lo))) + 2;
}

MeasureReport mu_pair_unfolded_weight0(const BumpSpec& psi, const SpectralPair& pair, const MeasurePolicy& policy) {
  check_envelope(pair);
  check_psi(psi);
  YGrid g = make_ygrid(psi, grid_freq(pair.r1, pair.r2));
  std::int64_t n = policy.unfolded_n_override > 0
                       ? policy.unfolded_n_override
                       : unfolded_terms(std::max(std::abs(pair.r1), std::abs(pair.r2)), psi.support_lo);
  SideTable a = make_table(pair.r1, 0, TableKind::bessel, g, n);
  SideTable b = make_table(pair.r2, 0, TableKind::bessel, g, n);
  PairSums ps = unfolded_pair(g, a, b, 0);
  cplx pred = 0.0;
  if (pair.r1 > 0.0 && pair.r2 > 0.0 && std::abs(pair.delta_r()) <= 1.0) pred = main_term_weight0(psi, pair).main_term;
  return finish_report(ps, pred);
}

MeasureReport mu_pair_unfolded_weight2k(const BumpSpec& psi, int k, const SpectralPair& pair,
                                        const MeasurePolicy& policy) {
  check_envelope(pair);
  check_psi(psi);
  if (k == 0) throw DomainError("mu_pair_unfolded_weight2k: k must be nonzero");
  if (std::abs(k) > kDefaultKMax) throw RangeError("mu_pair_unfolded_weight2k: |k| exceeds k_max");
  YGrid g = make_ygrid(psi, grid_freq(pair.r1, pair.r2));
  std::int64_t n = policy.unfolded_n_override > 0
                       ? policy.unfolded_n_override
                       : unfolded_terms(std::max(std::abs(pair.r1), std::abs(pair.r2)), psi.support_lo);
  SideTable a = make_table(pair.r1, 0, TableKind::whittaker0, g, n);
  SideTable b = make_table(pair.r2, k, TableKind::whittaker_pair, g, n);
  PairSums ps = unfolded_pair(g, a, b, k);
  cplx pred = 0.0;
  if (k > 0 && pair.r1 > 0.0 && pair.r2 > 0.0) pred = residue_prediction_weight_k(psi, k, pair);
  return finish_report(ps, pred);
}

MeasureReport mu_pair_unfolded(const IncompleteEisensteinTest& f, const SpectralPair& pair,
                               const MeasurePolicy& policy) {
  return f.k == 0 ? mu_pair_unfolded_weight0(f.psi, pair, policy)
                  : mu_pair_unfolded_weight2k(f.psi, f.k, pair, policy);
}

cplx residue_prediction_weight_k(const BumpSpec& psi, int k, const SpectralPair& pair) {
  double d = pair.delta_r();
  const cplx two_pi_i(0.0, 2.0 * kPi);
  if (std::abs(d) > 1e-6) {
    cplx zp = riemann_zeta(cplx(1.0, 2.0 * d)), zm = riemann_zeta(cplx(1.0, -2.0 * d));
    return two_pi_i * (zp * bk_residue(psi, k, pair, Side::plus) + zm * bk_residue(psi, k, pair, Side::minus));
  }
  // double pole of zeta(s)^2 at s = 1: residue B'(1) + 2 gamma B(1)
  SpectralPair p{pair.center, pair.center, pair.center};
  const double h = 1e-3;
  cplx bp = bk_at(psi, k, p, 1.0 + h), bm = bk_at(psi, k, p, 1.0 - h), b0 = bk_at(psi, k, p, 1.0);
  return two_pi_i * ((bp - bm) / (2.0 * h) + 2.0 * kEulerGamma * b0);
}

// ---- Rankin-Selberg ---------------------------------------------------------------------

RankinSelbergResult rankin_selberg_check(const HolomorphicCuspFormTest& f, const SpectralPair& pair, cplx s) {
  f.validate();
  check_envelope(pair);
  const double k = f.k;
  if (s.real() < k + 0.75) throw DivergenceError("rankin_selberg_check: needs Re s >= k + 3/4");
  const double r = pair.r1;
  const cplx w = k + s - 0.5;
  // J = int_0^inf W_{0,-ir}(u) e^{-u/2} u^{k+s-2} du by quadrature
  double u_hi = 40.0 + 4.0 * (k + s.real());
  auto integrand = [&](double u) -> cplx {
    if (u <= 0.0) return 0.0;
    WhittakerFamily fam = whittaker_family(0, cplx(0.0, -r), u);
    return fam.at(0) * std::exp(fam.log_scale - 0.5 * u + (k + s - 2.0) * std::log(u));
  };
  cplx J = integrate_panels<cplx>(integrand, 0.0, u_hi, 96, 16);
  cplx pre = std::exp(-(k + s - 1.0) * std::log(4.0 * kPi) - log_xi(cplx(1.0, -2.0 * r)));
  std::vector<cplx> ds, l1, l2;
  for (std::int64_t n = 1; n <= f.n_max; ++n) {
    double ln = std::log(static_cast<double>(n));
    double c = f.c(n);
    ds.push_back(c * divisor_phase_sum(n, r) * std::exp(-w * ln));
    l1.push_back(c * std::exp(-(w + cplx(0.0, r)) * ln));
    l2.push_back(c * std::exp(-(w - cplx(0.0, r)) * ln));
  }
  RankinSelbergResult out;
  out.lhs = pre * J * pairwise_sum(ds);
  cplx gam = std::exp(log_gamma(w - cplx(0.0, r)) + log_gamma(w + cplx(0.0, r)) - log_gamma(k + s));
  out.rhs = pre * pairwise_sum(l1) * pairwise_sum(l2) / riemann_zeta(2.0 * s) * gam;
  out.rel_err = std::abs(out.lhs - out.rhs) / std::abs(out.rhs);
  return out;
}

// ---- quasimodes ----------------------------------------------------------------------

cplx mu_quasimode(const TestFunction& f, const QuasimodeProfile& h, const MeasurePolicy&) {
  const auto* ie = std::get_if<IncompleteEisensteinTest>(&f);
  if (!ie) throw DomainError("mu_quasimode: only incomplete Eisenstein test functions are supported");
  check_psi(ie->psi);
  int k = ie->k;
  if (k < 0 || k > kDefaultKMax) throw RangeError("mu_quasimode: k out of range");
  std::vector<ProfileNode> nodes;
  for (auto& n : h.nodes)
    if (n.h != 0.0) nodes.push_back(n);
  if (nodes.empty()) return 0.0;
  double r_hi = 0.0;
  for (auto& n : nodes) r_hi = std::max(r_hi, std::abs(n.r));
  if (r_hi > kDefaultRMax) throw RangeError("mu_quasimode: profile nodes exceed r_max");
  YGrid g = make_ygrid(ie->psi, grid_freq(r_hi, r_hi));
  std::int64_t n_max = unfolded_terms(r_hi, ie->psi.support_lo);
  std::vector<SideTable> ta, tb;
  for (auto& n : nodes) {
    ta.push_back(make_table(n.r, 0, k == 0 ? TableKind::bessel : TableKind::whittaker0, g, n_max));
    if (k != 0) tb.push_back(make_table(n.r, k, TableKind::whittaker_pair, g, n_max));
  }
  const std::vector<SideTable>& partner = k == 0 ? ta : tb;
  std::vector<cplx> rows(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::vector<cplx> row(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      PairSums ps = unfolded_pair(g, ta[i], partner[j], k);
      row[j] = nodes[j].w * nodes[j].h * (ps.constant + ps.nsum);
    }
    rows[i] = nodes[i].w * nodes[i].h * pairwise_sum(row);
  }
  return pairwise_sum(rows);
}

cplx mu_quasimode_direct(const BumpSpec& psi, const QuasimodeProfile& h, const MeasurePolicy& policy) {
  check_psi(psi);
  std::vector<ProfileNode> nodes;
  for (auto& n : h.nodes)
    if (n.h != 0.0) nodes.push_back(n);
  double r_hi = 0.0;
  for (auto& n : nodes) r_hi = std::max(r_hi, std::abs(n.r));
  if (r_hi > kDefaultRMax) throw RangeError("mu_quasimode_direct: profile nodes exceed r_max");
  double a = psi.support_lo, b = psi.support_hi;
  double y_need = std::max({1.0, b, 1.0 / a});
  double y_top = std::min(policy.y_cut, y_need);
  std::vector<double> breaks{0.0};
  for (double t : {std::log(a), std::log(b)})
    if (t > 0.0 && t < std::log(y_top)) breaks.push_back(t);
  breaks.push_back(std::log(y_top));
  std::sort(breaks.begin(), breaks.end());
  auto slice = [&](double y) {
    // E_h is linear in the rows, so combine coefficients first
    auto comb = std::make_shared<FourierRow>();
    comb->y = y;
    double tail = 0.0;
    for (auto& n : nodes) {
      FourierRow r = eisenstein_row(y, cplx(0.5, n.r), 0, policy.truncation);
      double wt = n.w * n.h;
      comb->constant += wt * r.constant;
      if (comb->pos.size() < r.pos.size()) comb->pos.resize(r.pos.size());
      if (comb->neg.size() < r.neg.size()) comb->neg.resize(r.neg.size());
      for (std::size_t i = 0; i < r.pos.size(); ++i) comb->pos[i] += wt * r.pos[i];
      for (std::size_t i = 0; i < r.neg.size(); ++i) comb->neg[i] += wt * r.neg[i];
      tail += std::abs(wt) * r.tail_bound;
    }
    Slice s;
    s.modes = 2 * row_modes(*comb);
    s.g = [comb, y, &psi](double x) {
      cplx fv = incomplete_eisenstein_eval({x, y}, psi, 0);
      if (fv == 0.0) return cplx(0.0);
      return fv * std::norm(comb->at(x));
    };
    s.tail = 2.0 * tail * row_mass(*comb) * psi_sup(psi);
    return s;
  };
  FdResult res = integrate_fd(breaks, grid_freq(r_hi, r_hi), a < 1.0, policy.gauss_order, slice);
  return res.value;
}

}  // namespace qe
