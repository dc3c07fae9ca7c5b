#include <cmath>
#include <random>

#include <doctest.h>

#include "fixtures.hpp"
#include "qelab/asymptotics.hpp"
#include "qelab/quadrature.hpp"

using namespace qe;
using fx::check_close;

namespace {

const BumpSpec kPsi = BumpSpec::smooth(1, 2);

cplx xi_ratio(const SpectralPair& p) {
  return std::exp(log_xi({1, 2 * p.r1}) + log_xi({1, -2 * p.r2}) - log_xi({1, 2 * p.r2}) - log_xi({1, -2 * p.r1}));
}

}  // namespace

TEST_CASE("gamma ratio against the log-scale phase") {
  auto same = gamma_ratio_check(0.5, SpectralPair::around(1e6, 0.0));
  CHECK(same.actual == cplx(1, 0));
  CHECK(same.predicted == cplx(1, 0));

  for (double sigma : {0.5, 1.0}) {
    double prev = 1e300;
    for (double rj : {1e4, 1e6, 1e8}) {
      double dr = 1.0 / (std::log(rj) * std::log(rj));
      auto g = gamma_ratio_check(sigma, SpectralPair::around(rj, dr));
      double err = std::abs(g.actual - g.predicted);
      INFO("sigma=", sigma, " rj=", rj, " err=", err);
      CHECK(err <= 3 * dr);
      CHECK(err < prev);
      prev = err;
    }
  }
}

TEST_CASE("phase theta") {
  CHECK(phase_theta(SpectralPair::around(1e6, 0.0)) == 0.0);
  double rj = 1e6, dr = 1e-3, L = std::log(rj);
  double th = phase_theta(SpectralPair::around(rj, dr));
  CHECK(std::abs(th - 2 * dr * L) <= 8 * dr * L / std::log(L));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ur(5, 1e4), ud(-1, 1);
  for (int i = 0; i < 10; ++i) {
    double c = ur(rng), d = ud(rng);
    double a = phase_theta(SpectralPair::around(c, d)), b = phase_theta(SpectralPair::around(c, -d));
    CHECK(std::abs(a + b) <= 1e-12 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("B0 near s = 1") {
  double area = bump_area_integral(kPsi);
  // int psi dy / y^2 for the standard bump on [1, 2] (mpmath, Mellin at s = 1)
  CHECK(area == doctest::Approx(0.10421162692783925).epsilon(1e-12));
  auto p = SpectralPair::around(1e4, 1e-4);
  cplx minus = b0_residue(kPsi, p, Side::minus), plus = b0_residue(kPsi, p, Side::plus);
  cplx lead = 3.0 / (kI * kPi * kPi) * area;
  CHECK(std::abs(minus / lead - 1.0) <= 0.05);
  CHECK(std::abs(std::abs(plus) / std::abs(minus) - 1) <= 1e-3);
  // b0_at at the same point
  check_close(b0_at(kPsi, p, side_point(p, Side::minus)), minus, 1e-12);
}

TEST_CASE("B0 ratio against the xi ratio") {
  // the xi form is the leading term only; the gap is linear in dr with slope about 1.2
  for (double rj : {1e2, 1e3, 3e3, 1e4, 1e5})
    for (double dr : {1e-2, 1e-4, 1e-6}) {
      auto p = SpectralPair::around(rj, dr);
      cplx ratio = b0_residue(kPsi, p, Side::plus) / b0_residue(kPsi, p, Side::minus);
      double gap = std::abs(ratio / xi_ratio(p) - 1.0);
      INFO("rj=", rj, " dr=", dr, " gap=", gap);
      CHECK(gap <= 1.5 * dr);
      CHECK(std::abs(std::abs(ratio) - 1) <= 1e-3);
    }
}

TEST_CASE("main term") {
  double rj = 1e4, L = std::log(rj);
  double area = bump_area_integral(kPsi);
  auto at0 = main_term_weight0(kPsi, SpectralPair::around(rj, 0.0));
  CHECK(at0.theta == 0.0);
  check_close(at0.kernel_value, 1.0, 1e-14);
  cplx want = (0.5 * phase_theta_slope(rj) + 2 * kEulerGamma) * (6 / kPi) * area;
  check_close(at0.main_term, want, 1e-8);
  // slope grows like 2 log r
  CHECK(std::abs(phase_theta_slope(rj) / (2 * L) - 1) < 0.2);

  auto lw = main_term_weight0(kPsi, SpectralPair::around(rj, kPi / (2 * L)), Regime::log_window_approx);
  CHECK(std::abs(std::abs(lw.kernel_value) - 2 / kPi) < 1e-10);
  CHECK(std::abs(std::abs(kernel_d(kPi / (2 * L), L)) - 2 / kPi) < 1e-12);
  CHECK(std::abs(kernel_d(kPi / L, L)) < 1e-12);

  for (double dr : {1e-3, 1e-6, 1e-9}) CHECK(std::abs(main_term_weight0(kPsi, SpectralPair::around(rj, dr)).kernel_value - 1.0) < 20 * dr * L);
}

TEST_CASE("main term is continuous across the series switch") {
  // The main term moves with dr by about L * (step) relative, so the jump is
  // measured against the differences taken on either side of the switch.
  for (double rj : {1e2, 1e3, 1e4}) {
    double L = std::log(rj), d = 1e-6 / L, t = kSeriesThreshold / L;
    auto f = [&](double dr) { return main_term_weight0(kPsi, SpectralPair::around(rj, dr)).main_term; };
    cplx m3 = f(t - 3 * d), m1 = f(t - d), p1 = f(t + d), p3 = f(t + 3 * d);
    cplx across = p1 - m1;
    cplx sides = 0.5 * ((m1 - m3) + (p3 - p1));
    INFO("rj=", rj, " jump=", std::abs(across - sides));
    CHECK(std::abs(across - sides) < 1e-8 * std::abs(p1));
  }
}

TEST_CASE("kernel D bounded by one") {
  CHECK(kernel_d(0.0, 5.0) == cplx(1, 0));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3, 3), ul(0.5, 20);
  for (int i = 0; i < 500; ++i) {
    double d = u(rng);
    if (d == 0.0) continue;
    CHECK(std::abs(kernel_d(d, ul(rng))) < 1.0);
  }
}

TEST_CASE("Whittaker Mellin closed forms") {
  auto p = SpectralPair::of(8, 8);
  auto closed = ik3_ik4(1.5, 1, p);
  auto quad = ik3_ik4_quadrature(1.5, 1, p);
  check_close(closed.i3, quad.i3, 1e-6);
  check_close(closed.i4, quad.i4, 1e-6);
  for (auto [s, k, q] : {std::tuple{cplx(1.5, 0), 1, SpectralPair::of(3, 3.2)}, std::tuple{cplx(1, -0.1), 2, SpectralPair::of(6, 5.9)},
                         std::tuple{cplx(1.2, 0.3), 3, SpectralPair::of(5, 5.5)}}) {
    auto d = ik3_ik4(s, k, q, IkForm::direct);
    auto t = ik3_ik4(s, k, q, IkForm::transformed);
    check_close(d.i3, t.i3, 1e-8);
    check_close(d.i4, t.i4, 1e-8);
  }
}

TEST_CASE("Bk cancellation and limits") {
  auto p = SpectralPair::around(1e3, 1e-2);
  auto terms = bk_limit_terms(1, p);
  CHECK(std::abs(terms.sum()) <= 5 * std::abs(p.delta_r()));
  // the exact bracket at 1 - i dr shows the same cancellation
  CHECK(std::abs(bk_bracket(side_point(p, Side::minus), 1, p)) <= 5 * std::abs(p.delta_r()));

  for (int k : {1, 2, 3}) {
    cplx plus = bk_residue(kPsi, k, p, Side::plus), minus = bk_residue(kPsi, k, p, Side::minus);
    CHECK(std::abs(std::abs(plus) / std::abs(minus) - 1) <= 1e-2);
  }
}

TEST_CASE("Bk over B0 scales like i dr / k") {
  // Quadrature, unfolded sums and the Mellin contour all agree on this normalization.
  for (double dr : {1e-2, 1e-3}) {
    auto p = SpectralPair::around(1e4, dr);
    cplx b0 = b0_residue(kPsi, p, Side::minus);
    for (int k : {1, 2, 3}) {
      cplx ratio = bk_residue(kPsi, k, p, Side::minus) / b0;
      cplx want(0, dr / k);
      INFO("dr=", dr, " k=", k, " ratio/(i dr/k)=", (ratio / want).real(), " ", (ratio / want).imag());
      CHECK(std::abs(ratio / want - 1.0) <= 0.2);
    }
  }
}

TEST_CASE("weight-k double integral") {
  double L = 10.0, rj = std::exp(L);
  auto narrow = make_bump_profile(rj, 1 / (L * L));
  auto wide = make_bump_profile(rj, 1 / L);
  CHECK(std::abs(kernel_double_integral(narrow)) <= 0.05);
  double w = std::abs(kernel_double_integral(wide));
  CHECK(w >= 0.1);
  CHECK(w <= 2.0);
  CHECK(std::abs(kernel_double_integral(make_bump_profile(rj, 1e-9))) < 1e-12);
  // prefactor (3/pi) int F (1/k)
  double area = bump_area_integral(kPsi);
  check_close(weight_k_coefficient(kPsi, 2, wide), 3 / kPi * area / 2.0 * kernel_double_integral(wide), 1e-14);
}

TEST_CASE("Ehrenfest mass") {
  double L = 5.0, rj = std::exp(L);
  CHECK(std::abs(ehrenfest_mass(make_bump_profile(rj, 1e-7)) - 1) < 1e-10);
  auto b = make_bump_profile(rj, 0.3);
  CHECK(std::abs(ehrenfest_mass(b) - ehrenfest_mass_kernel(b)) < 1e-8);

  // gaussian of width K: |h^|^2 = e^{-K^2 t^2}, so the mass is sqrt(pi) erf(2LK) / (4LK)
  double K = 3 / L;
  auto g = make_gaussian_profile(rj, K);
  double closed = std::sqrt(kPi) * std::erf(2 * L * K) / (4 * L * K);
  CHECK(std::abs(ehrenfest_mass(g) - closed) < 1e-6);
  CHECK(ehrenfest_mass(g) < 1.0);

  for (double width : {1e-3, 0.05, 0.3, 1.0, 3.0})
    for (double Lw : {4.0, 6.0, 12.0}) {
      double m = ehrenfest_mass(make_gaussian_profile(std::exp(Lw), width));
      CHECK(m >= 0.0);
      CHECK(m <= 1 + 1e-10);
    }
}
