#include <cmath>

#include <doctest.h>

#include "fixtures.hpp"
#include "qelab/measures.hpp"

using namespace qe;
using fx::check_close;

namespace {

const BumpSpec kPsi = BumpSpec::smooth(1, 2);
const IncompleteEisensteinTest kF0{0, kPsi};

double log_mass(const BumpSpec& psi) {  // int psi dy/y
  return mellin_of_bump(psi, 0.0).real();
}

}  // namespace

TEST_CASE("zero test function") {
  IncompleteEisensteinTest zero{0, BumpSpec::smooth(1, 2, 0.0)};
  CHECK(mu_pair_quadrature(zero, SpectralPair::of(10, 10)) == cplx(0, 0));
  CHECK(std::abs(mu_pair_unfolded(zero, SpectralPair::of(10, 10)).value) == 0.0);
}

TEST_CASE("Hermitian symmetry of the quadrature route") {
  cplx a = mu_pair_quadrature(kF0, SpectralPair::of(10, 10.05));
  cplx b = mu_pair_quadrature(kF0, SpectralPair::of(10.05, 10));
  check_close(b, std::conj(a), 1e-10);
}

TEST_CASE("quadrature and unfolded routes agree") {
  auto q = mu_pair_quadrature_detail(kF0, SpectralPair::of(12, 12));
  auto u = mu_pair_unfolded(kF0, SpectralPair::of(12, 12));
  CHECK(std::abs(q.value - u.value) <= 1e-4 * std::abs(u.value));
  CHECK(std::abs(u.value - 0.6700858893867) < 1e-10);

  IncompleteEisensteinTest f1{1, kPsi};
  auto q1 = mu_pair_quadrature_detail(f1, SpectralPair::of(12, 12.02));
  auto u1 = mu_pair_unfolded(f1, SpectralPair::of(12, 12.02));
  CHECK(std::abs(q1.value - u1.value) <= 1e-3 * std::abs(u1.value));
}

TEST_CASE("report decomposition and the constant-term bound") {
  auto rep = mu_pair_unfolded_weight0(kPsi, SpectralPair::of(30, 30));
  CHECK(std::abs(rep.value - (rep.constant_term_part + rep.coefficient_sum_part)) <= rep.tail_bound + 1e-15);
  check_close(rep.constant_term_part, rep.incoming_outgoing_part + rep.cross_part, 1e-14, 1e-16);
  // equality case at dr = 0, so allow rounding
  CHECK(std::abs(rep.incoming_outgoing_part) <= 2 * log_mass(kPsi) * (1 + 1e-9));
  // main-term trend at the same pair
  CHECK(std::abs(rep.value / rep.prediction - 1.0) <= 1.5 / std::log(30.0));

  for (auto p : {SpectralPair::of(10, 10.3), SpectralPair::of(25, 24.9), SpectralPair::of(40, 40)}) {
    auto r = mu_pair_unfolded_weight0(kPsi, p);
    CHECK(std::abs(r.incoming_outgoing_part) <= 2 * log_mass(kPsi) * (1 + 1e-9));
  }
}

TEST_CASE("unfolded n-sum tail") {
  for (auto p : {SpectralPair::of(20, 20), SpectralPair::of(30, 29.9)}) {
    auto base = mu_pair_unfolded_weight0(kPsi, p);
    MeasurePolicy pol;
    pol.unfolded_n_override = 2 * unfolded_terms(30.0, kPsi.support_lo);
    auto ext = mu_pair_unfolded_weight0(kPsi, p, pol);
    CHECK(std::abs(base.value - ext.value) <= std::max(1e-12, base.tail_bound));
  }
}

TEST_CASE("weight 2 is a lower-order term") {
  auto w0 = mu_pair_unfolded_weight0(kPsi, SpectralPair::of(20, 20));
  auto w2 = mu_pair_unfolded_weight2k(kPsi, 1, SpectralPair::of(20, 20));
  CHECK(std::abs(w2.value) <= 0.2 * std::abs(w0.value));
  CHECK_THROWS_AS(mu_pair_unfolded_weight2k(kPsi, 0, SpectralPair::of(20, 20)), DomainError);
}

TEST_CASE("raising the domain cutoff stays inside the cusp-tail bound") {
  // a support reaching below 1 so that the cutoff matters
  IncompleteEisensteinTest f{0, BumpSpec::smooth(0.02, 0.5)};
  MeasurePolicy lo, hi;
  lo.y_cut = 30.0;
  hi.y_cut = 100.0;
  auto a = mu_pair_quadrature_detail(f, SpectralPair::of(5, 5.1), lo);
  auto b = mu_pair_quadrature_detail(f, SpectralPair::of(5, 5.1), hi);
  CHECK(a.cusp_tail_bound > 0.0);
  CHECK(std::abs(a.value - b.value) <= a.cusp_tail_bound + a.series_tail + b.series_tail);

  MeasurePolicy p50, p100;
  p100.y_cut = 100.0;
  auto c = mu_pair_quadrature_detail(kF0, SpectralPair::of(10, 10), p50);
  auto d = mu_pair_quadrature_detail(kF0, SpectralPair::of(10, 10), p100);
  CHECK(std::abs(c.value - d.value) <= c.cusp_tail_bound + c.series_tail + d.series_tail + 1e-14);
}

TEST_CASE("discriminant form and Rankin-Selberg") {
  auto tau = ramanujan_tau(200);
  CHECK(tau[0] == 1.0);
  CHECK(tau[1] == -24.0);
  CHECK(tau[2] == 252.0);
  CHECK(tau[10] == 534612.0);
  CHECK(tau[199] == -2154174528000.0);
  CHECK(tau[5] == tau[1] * tau[2]);
  CHECK(tau[34] == tau[4] * tau[6]);
  auto F = discriminant_form(200);
  F.validate();
  CHECK(F.k == 6);
  CHECK(F.c(1) == 1.0);

  for (auto p : {SpectralPair::of(5, 5), SpectralPair::of(8, 8.1)}) {
    auto rs = rankin_selberg_check(F, p, 6.75);
    CHECK(rs.rel_err <= 1e-4);
  }
  CHECK_THROWS_AS(rankin_selberg_check(F, SpectralPair::of(5, 5), 6.5), DivergenceError);

  auto bad = F;
  bad.coefficients[0] = 2.0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("quasimode pairing") {
  MeasurePolicy pol;
  // width -> 0 collapses to the diagonal pairing
  auto narrow = make_bump_profile(20, 1e-7, 16);
  cplx mq = mu_quasimode(kF0, narrow, pol);
  cplx diag = mu_pair_unfolded_weight0(kPsi, SpectralPair::of(20, 20)).value;
  CHECK(std::abs(mq - diag) <= 1e-4 * std::abs(diag));

  // positive and real for nonnegative psi
  auto g = make_gaussian_profile(12, 0.3, 16);
  cplx v = mu_quasimode(kF0, g, pol);
  CHECK(v.real() >= -1e-8);
  CHECK(std::abs(v.imag()) <= 1e-8);
  // the |E_h|^2 route at the same nodes
  check_close(mu_quasimode_direct(kPsi, g, pol), v, 1e-8);
}

TEST_CASE("quasimode pairing against the window prediction") {
  double rj = 40, L = std::log(rj);
  auto h = make_bump_profile(rj, 0.5 / L, 16);
  cplx v = mu_quasimode(kF0, h);
  double pred = 6 / kPi * bump_area_integral(kPsi) * L * ehrenfest_mass_kernel(h);
  INFO("value ", v.real(), " prediction ", pred);
  CHECK(std::abs(v.real() / pred - 1) <= 1.5 / L);
}
