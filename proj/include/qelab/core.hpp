#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qe {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kEulerGamma = 0.577215664901532860606512090082402431;
inline constexpr double kLogPi = 1.14472988584940017414342735135305871;
inline constexpr double kLogSqrt2Pi = 0.918938533204672741780329736405617640;
inline constexpr cplx kI{0.0, 1.0};

// Argument sits on a pole of the function being evaluated.
struct PoleError : std::domain_error {
  using std::domain_error::domain_error;
};

// Argument outside the mathematical domain of the function (x <= 0, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Parameter outside the supported envelope (r_max, k_max, y_min, ...).
struct RangeError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

// Series or integral that does not converge for the given parameters.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite intermediate result; thrown rather than letting NaN/Inf escape.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline bool is_finite(cplx z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline cplx check_finite(cplx z, const char* where) {
  if (!is_finite(z)) throw NumericalError(std::string("non-finite result in ") + where);
  return z;
}

// Pairwise summation in index order. Fixed association, so results are
// reproducible independent of how callers batch their work.
template <class T>
T pairwise_sum(const T* v, std::size_t n) {
  if (n == 0) return T{};
  if (n <= 8) {
    T s = v[0];
    for (std::size_t i = 1; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

template <class T>
T pairwise_sum(const std::vector<T>& v) {
  return pairwise_sum(v.data(), v.size());
}

}  // namespace qe
