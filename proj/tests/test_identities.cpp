#include <chrono>
#include <cmath>
#include <map>
#include <thread>

#include <doctest.h>

#include "qelab/identities.hpp"

using namespace qe;

namespace {

bool consistent(const IdentityCheckResult& r) {
  return r.pass == (r.rel_err <= r.tolerance || r.abs_err <= r.tolerance * r.scale);
}

}  // namespace

TEST_CASE("Ramanujan divisor-sum identity") {
  auto a = check_ramanujan(2.5, SpectralPair::of(3, 3.1), 100000);
  CHECK(a.pass);
  CHECK(a.rel_err <= 1e-6);
  // r' = r'' = 0: zeta(s)^4 / zeta(2s)
  // d(n)^2 makes this tail the slowest; 1e5 terms leave 2.5e-6
  auto b = check_ramanujan(2.5, SpectralPair::of(0, 0), 1000000);
  CHECK(b.rel_err <= 1e-6);
  cplx z = riemann_zeta(2.5);
  CHECK(std::abs(b.rhs - z * z * z * z / riemann_zeta(5.0)) < 1e-12 * std::abs(b.rhs));
  // swapping r' and r'' conjugates both sides for real s
  auto c = check_ramanujan(2.5, SpectralPair::of(3.1, 3), 100000);
  CHECK(std::abs(c.lhs - std::conj(a.lhs)) < 1e-12 * std::abs(a.lhs));
  CHECK(std::abs(c.rhs - std::conj(a.rhs)) < 1e-12 * std::abs(a.rhs));
  CHECK_THROWS_AS(check_ramanujan(1.0, SpectralPair::of(3, 3), 1000), DivergenceError);
}

TEST_CASE("K Bessel Mellin transform") {
  CHECK(check_kbessel_mellin(1.5, SpectralPair::of(5, 5)).rel_err <= 1e-7);
  CHECK(check_kbessel_mellin(1.5, SpectralPair::of(8, 8.2)).rel_err <= 1e-6);
  auto d = check_kbessel_mellin(2.0, SpectralPair::of(0, 0));
  CHECK(d.rel_err <= 1e-7);
  // Gamma(1)^4 / (8 pi^2 Gamma(2))
  CHECK(std::abs(d.rhs - 1.0 / (8 * kPi * kPi)) < 1e-14);
}

TEST_CASE("Whittaker Mellin transform") {
  CHECK(check_whittaker_mellin(6, SpectralPair::of(5, 5)).rel_err <= 1e-7);
  CHECK(check_whittaker_mellin(2, SpectralPair::of(10, 10.05)).rel_err <= 1e-6);
  auto d = check_whittaker_mellin(1, SpectralPair::of(0, 0));
  CHECK(d.rel_err <= 1e-7);
  CHECK(std::abs(d.rhs - 1.0 / std::tgamma(1.5)) < 1e-14);
}

TEST_CASE("reflection iteration") {
  CHECK(check_reflection_iteration(0, 5).rel_err == 0.0);
  CHECK(check_reflection_iteration(1, 7).rel_err <= 1e-12);
  CHECK(check_reflection_iteration(3, 50).rel_err <= 1e-10);
}

TEST_CASE("unitarity, zeta floor, Stirling") {
  CHECK(check_scattering_unitarity(100).abs_err <= 1e-10);
  auto z = check_zeta_lower(1e6);
  CHECK(z.pass);
  CHECK(z.lhs.real() >= 0.5);
  CHECK(check_stirling_modulus(0.5, 10).pass);
  CHECK(check_xi_functional({0.3, 7}).rel_err <= 1e-10);
}

TEST_CASE("Bailey transformation inside the closed forms") {
  auto r = check_bailey(1.5, 1, SpectralPair::of(8, 8));
  CHECK(r.pass);
  CHECK(r.rel_err <= 1e-6);
}

TEST_CASE("the published grid passes") {
  auto t0 = std::chrono::steady_clock::now();
  auto all = run_identity_suite();
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs <= 60.0);
  std::map<std::string, int> draws;
  for (auto& r : all) {
    INFO(r.name, " ", r.detail, " rel_err=", r.rel_err);
    CHECK(r.pass);
    CHECK(consistent(r));
    CHECK(std::isfinite(r.abs_err));
    ++draws[r.name];
  }
  CHECK(draws.size() >= 9);
  for (auto& [name, n] : draws) {
    INFO(name);
    CHECK(n >= 5);
  }
}

TEST_CASE("results do not depend on the calling thread") {
  auto run = [] {
    return std::vector<IdentityCheckResult>{check_ramanujan({3.5, -2}, SpectralPair::of(10, 9.5), 20000),
                                            check_kbessel_mellin({1, 2}, SpectralPair::of(3, 4)),
                                            check_bailey({1.2, 0}, 3, SpectralPair::of(5, 5.5))};
  };
  auto here = run();
  std::vector<IdentityCheckResult> there;
  std::thread t([&] { there = run(); });
  t.join();
  REQUIRE(here.size() == there.size());
  for (std::size_t i = 0; i < here.size(); ++i) {
    CHECK(here[i].lhs == there[i].lhs);
    CHECK(here[i].rhs == there[i].rhs);
  }
}
