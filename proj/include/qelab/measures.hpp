#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "qelab/asymptotics.hpp"
#include "qelab/eisenstein.hpp"

namespace qe {

// Incomplete Eisenstein series of weight 2k built from the bump psi.
struct IncompleteEisensteinTest {
  int k = 0;
  BumpSpec psi;
};

// y^k F(z) for F = sum_{n>=1} c(n) e(nz) of weight 2k; coefficients[n-1] = c(n).
struct HolomorphicCuspFormTest {
  int k = 6;
  std::vector<double> coefficients;
  std::int64_t n_max = 0;

  double c(std::int64_t n) const { return coefficients[static_cast<std::size_t>(n - 1)]; }
  // c(1) = 1 and c(mn) = c(m)c(n) on coprime pairs inside the table
  void validate() const;
};

using TestFunction = std::variant<IncompleteEisensteinTest, HolomorphicCuspFormTest>;

// tau(n), n = 1..n_max, from q prod (1 - q^m)^24
std::vector<double> ramanujan_tau(int n_max);
HolomorphicCuspFormTest discriminant_form(int n_max = 200);

struct MeasurePolicy {
  TruncationPolicy truncation;
  double y_cut = 50.0;          // domain truncation Y
  double tail_tolerance = 1e-6;  // relative; larger cusp tails raise the Y-too-small flag
  int gauss_order = 16;
  std::int64_t unfolded_n_override = 0;  // > 0 fixes the number of n in the unfolded sums
};

struct MeasureReport {
  cplx value;
  cplx constant_term_part;  // incoming_outgoing_part + cross_part
  cplx coefficient_sum_part;
  // y^{-+i dr} terms of the constant-term product; bounded by 2 int psi dy/y at weight 0
  cplx incoming_outgoing_part;
  // y^{-+i sr} cross terms, rapidly decreasing in r
  cplx cross_part;
  double tail_bound = 0.0;
  cplx prediction;
  double rel_deviation = 0.0;
};

struct QuadratureReport {
  cplx value;
  double cusp_tail_bound = 0.0;  // |contribution| above Y, from the constant terms
  double series_tail = 0.0;      // Fourier truncation, integrated
  bool y_too_small = false;
  std::int64_t nodes = 0;
};

// f * E(., 1/2 - i r1) * E_partner(., 1/2 + i r2) over the truncated fundamental
// domain. The partner carries the opposite weight of f.
QuadratureReport mu_pair_quadrature_detail(const TestFunction& f, const SpectralPair& pair,
                                           const MeasurePolicy& policy = {});
cplx mu_pair_quadrature(const TestFunction& f, const SpectralPair& pair, const MeasurePolicy& policy = {});

// Unfolded forms: constant-term piece plus the coefficient sum.
MeasureReport mu_pair_unfolded_weight0(const BumpSpec& psi, const SpectralPair& pair,
                                       const MeasurePolicy& policy = {});
MeasureReport mu_pair_unfolded_weight2k(const BumpSpec& psi, int k, const SpectralPair& pair,
                                        const MeasurePolicy& policy = {});
MeasureReport mu_pair_unfolded(const IncompleteEisensteinTest& f, const SpectralPair& pair,
                               const MeasurePolicy& policy = {});

// Number of Fourier terms kept by the unfolded sums for a support starting at y_lo
std::int64_t unfolded_terms(double r, double y_lo);

// Residue prediction for weight 2k: 2 pi i [zeta(1+2i dr) B_k(1+i dr) + zeta(1-2i dr) B_k(1-i dr)],
// with the double pole handled at dr = 0.
cplx residue_prediction_weight_k(const BumpSpec& psi, int k, const SpectralPair& pair);

struct RankinSelbergResult {
  cplx lhs;  // coefficient-by-coefficient integration
  cplx rhs;  // L-function factorization
  double rel_err = 0.0;
};
RankinSelbergResult rankin_selberg_check(const HolomorphicCuspFormTest& f, const SpectralPair& pair, cplx s);

// iint h(r1) h(r2) mu_{r1,r2}(f) dr1 dr2 over the profile nodes (unfolded route)
cplx mu_quasimode(const TestFunction& f, const QuasimodeProfile& h, const MeasurePolicy& policy = {});
// weight 0 only: int F_psi |E_h|^2 over the truncated domain
cplx mu_quasimode_direct(const BumpSpec& psi, const QuasimodeProfile& h, const MeasurePolicy& policy = {});

}  // namespace qe
