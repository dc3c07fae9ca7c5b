#pragma once

#include <string>
#include <vector>

#include "qelab/eisenstein.hpp"

namespace qe {

struct IdentityCheckResult {
  std::string name;
  cplx lhs, rhs;
  double abs_err = 0.0;
  double rel_err = 0.0;
  bool pass = false;
  double tolerance = 0.0;
  double scale = 1.0;  // pass also when abs_err <= tolerance * scale
  std::string detail;  // parameters and any partial values
};

IdentityCheckResult make_identity_result(std::string name, cplx lhs, cplx rhs, double tolerance,
                                         double scale = 0.0, std::string detail = {});

// Per-identity tolerances. Gamma/zeta-only checks get the tight one; checks that
// go through a quadrature or a truncated series get the looser one.
inline constexpr double kTolSeries = 1e-6;
inline constexpr double kTolGammaZeta = 1e-9;

// sum_n sigma_{2ir1}(n) sigma_{-2ir2}(n) n^{-s-i dr} against
// zeta(s+i dr) zeta(s-i sr) zeta(s+i sr) zeta(s-i dr) / zeta(2s)
IdentityCheckResult check_ramanujan(cplx s, const SpectralPair& pair, std::int64_t n_cap = 1000000);

// int_0^inf K_{ir1}(2 pi u) K_{ir2}(2 pi u) u^{s-1} du against four Gammas over 8 pi^s Gamma(s)
IdentityCheckResult check_kbessel_mellin(cplx s, const SpectralPair& pair);

// int_0^inf W_{0,-ir1}(u) e^{-u/2} u^{k - 3/2 + ir2} du against
// Gamma(k + i sr) Gamma(k - i dr) / Gamma(k + 1/2 + ir2)
IdentityCheckResult check_whittaker_mellin(int k, const SpectralPair& pair);

// Gamma(1/2-k-ir) Gamma(1/2+k+ir) = (-1)^k Gamma(1/2-ir) Gamma(1/2+ir)
IdentityCheckResult check_reflection_iteration(int k, double r);

// |phi(1/2+ir)| = 1
IdentityCheckResult check_scattering_unitarity(double r);

// |zeta(1+ir)| log r against the floor 0.5 (an observation, not a bound); the
// error fields hold the shortfall below the floor
IdentityCheckResult check_zeta_lower(double r);

// |Gamma(sigma+ir)| against sqrt(2 pi) e^{-pi r/2} r^{sigma-1/2}, tolerance 1/(4r)
IdentityCheckResult check_stirling_modulus(double sigma, double r);

// I3, I4 from the direct 3F2 form against the transformed one
IdentityCheckResult check_bailey(cplx s, int k, const SpectralPair& pair);

// xi(s) = xi(1-s)
IdentityCheckResult check_xi_functional(cplx s);

// The fixed grid: at least five draws per identity.
std::vector<IdentityCheckResult> run_identity_suite();

}  // namespace qe
