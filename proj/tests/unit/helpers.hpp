#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

namespace testhelp {

inline double rel_err(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

inline double rel_err(std::complex<double> a, std::complex<double> b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

// The standard demonstration system: Q = 1000 resonator at exact
// parametric resonance with unity feedback through a tau = 100 lock-in.
template <class Params>
Params standard() {
  Params p;
  p.omega0 = 1.0;
  p.gamma = 1e-3;
  p.Fp = 0.0;
  p.omega = 1.0;
  p.eta = 1.0;
  p.tau = 100.0;
  return p;
}

}  // namespace testhelp
