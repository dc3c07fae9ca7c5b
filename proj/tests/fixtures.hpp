#pragma once

#include <complex>

#include <doctest.h>

// Reference values produced by oracles/make_fixtures.py (mpmath, 40 digits).
namespace fx {

inline void check_close(std::complex<double> got, std::complex<double> want, double rel, double abs_floor = 0.0) {
  double err = std::abs(got - want);
  double scale = std::abs(want);
  INFO("got ", got.real(), " ", got.imag(), "  want ", want.real(), " ", want.imag(), "  err ", err);
  CHECK(err <= rel * scale + abs_floor);
}

}  // namespace fx
