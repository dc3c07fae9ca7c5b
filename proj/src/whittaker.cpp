// Whittaker W_{kappa,mu}(x) for integer kappa from the K-Bessel reduction at
// kappa = 0, +-1 and the contiguous relation
//   W_{kappa+1} = (x - 2 kappa) W_kappa + (mu^2 - (kappa - 1/2)^2) W_{kappa-1}.
// Upward recurrence is stable. Going down it is only stable while x is below
// the turning region; beyond that a Miller-type run upward from deep negative
// kappa picks out W as the dominant solution.
#include <cmath>

#include "qelab/specfun.hpp"

namespace qe {

namespace {

constexpr int kMillerDepth = 60;

cplx coef(cplx mu, int kappa) {
  double h = kappa - 0.5;
  return mu * mu - h * h;
}

// Fills w[kappa] for kappa in [-kmax, -1] given w0, by Miller's method.
void miller_down(int kmax, cplx mu, double x, cplx w0, std::vector<cplx>& w) {
  int n = kmax + kMillerDepth;
  std::vector<cplx> f(static_cast<std::size_t>(n + 2));
  // f index j <-> kappa = j - n - 1 (so f[n+1] is kappa = 0)
  f[0] = 0.0;
  f[1] = 1.0;
  for (int j = 1; j <= n; ++j) {
    int kappa = j - n - 1 + 0;  // kappa of f[j]
    f[j + 1] = (x - 2.0 * kappa) * f[j] + coef(mu, kappa) * f[j - 1];
    if (std::abs(f[j + 1]) > 1e250) {
      for (int i = 0; i <= j + 1; ++i) f[i] *= 1e-250;
    }
  }
  cplx scale = w0 / f[n + 1];
  for (int kappa = -kmax; kappa <= -1; ++kappa) w[kappa + kmax] = f[kappa + n + 1] * scale;
}

}  // namespace

WhittakerFamily whittaker_family(int kmax, cplx mu, double x) {
  if (kmax < 0) throw DomainError("whittaker_family: kmax must be >= 0");
  if (!(x > 0.0)) throw DomainError("whittaker: x must be positive");
  ScaledK k = bessel_k_scaled(mu, 0.5 * x);
  double pre = std::sqrt(x / kPi);
  WhittakerFamily fam;
  fam.kmax = kmax;
  fam.log_scale = k.log_scale;
  fam.w.assign(static_cast<std::size_t>(2 * kmax + 1), 0.0);
  cplx w0 = pre * k.k;
  fam.w[kmax] = w0;
  if (kmax == 0) return fam;
  cplx w1 = pre * (0.5 * x * (k.k + k.kd) - 0.5 * k.k);
  fam.w[kmax + 1] = w1;
  for (int kappa = 1; kappa < kmax; ++kappa)
    fam.w[kmax + kappa + 1] = (x - 2.0 * kappa) * fam.w[kmax + kappa] + coef(mu, kappa) * fam.w[kmax + kappa - 1];

  // Downward side.
  bool degenerate = false;
  double mu_scale = 1.0 + std::norm(mu);
  for (int kappa = 0; kappa >= -kmax + 1; --kappa)
    if (std::abs(coef(mu, kappa)) < 1e-8 * mu_scale) degenerate = true;
  bool use_down = !degenerate && x <= 1.5 * std::abs(mu) + 2.0;
  if (use_down) {
    cplx wm1 = -pre * (0.5 * k.k - 0.5 * x * k.km) / coef(mu, 0);
    fam.w[kmax - 1] = wm1;
    for (int kappa = -1; kappa > -kmax; --kappa) {
      cplx up = fam.w[kmax + kappa + 1], cur = fam.w[kmax + kappa];
      fam.w[kmax + kappa - 1] = (up - (x - 2.0 * kappa) * cur) / coef(mu, kappa);
    }
  } else {
    miller_down(kmax, mu, x, w0, fam.w);
  }
  for (auto& v : fam.w)
    if (!is_finite(v)) throw NumericalError("whittaker: non-finite value");
  return fam;
}

ScaledBesselValue whittaker_w(int k, double r, double x, int k_max, double r_max) {
  if (std::abs(k) > k_max) throw RangeError("whittaker_w: |k| exceeds k_max");
  if (std::abs(r) > r_max) throw RangeError("whittaker_w: r exceeds r_max");
  WhittakerFamily fam = whittaker_family(std::abs(k), cplx(0.0, r), x);
  return ScaledBesselValue::make(fam.at(k).real(), fam.log_scale);
}

cplx whittaker_w_complex(int k, cplx mu, double x) {
  WhittakerFamily fam = whittaker_family(std::abs(k), mu, x);
  return fam.at(k) * std::exp(fam.log_scale);
}

}  // namespace qe
