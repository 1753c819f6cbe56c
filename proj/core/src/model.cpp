#include "parasqueeze/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace parasqueeze {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

double ResonatorParams::period() const { return 2.0 * std::numbers::pi / omega; }

void ResonatorParams::validate() const {
  require(std::isfinite(omega0) && omega0 > 0.0, "omega0 must be finite and > 0");
  require(std::isfinite(gamma) && gamma > 0.0, "gamma must be finite and > 0");
  require(std::isfinite(omega) && omega > 0.0, "omega must be finite and > 0");
  require(std::isfinite(tau) && tau > 0.0, "tau must be finite and > 0");
  require(std::isfinite(Fp), "Fp must be finite");
  require(std::isfinite(eta), "eta must be finite");
}

double wrap_angle(double phi) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(phi, two_pi);
  if (r < 0.0) r += two_pi;
  // fmod can round up to exactly two_pi for tiny negative inputs.
  if (r >= two_pi) r -= two_pi;
  return r;
}

void DriveSignal::validate() const {
  require(std::isfinite(Fs) && Fs >= 0.0, "Fs must be finite and >= 0");
  require(std::isfinite(omega_s), "omega_s must be finite");
  require(std::isfinite(phi0) && phi0 >= 0.0 && phi0 < 2.0 * std::numbers::pi,
          "phi0 must lie in [0, 2*pi); use wrap_angle");
}

void NoiseSpec::validate() const {
  require(std::isfinite(D) && D >= 0.0, "noise intensity D must be finite and >= 0");
}

std::complex<double> susceptibility(const ResonatorParams& p, double nu) {
  return 1.0 / std::complex<double>(p.omega0 * p.omega0 - nu * nu, -p.gamma * nu);
}

Mat3 system_matrix(const ResonatorParams& p, double t) {
  Mat3 a;
  a[0][0] = 0.0;
  a[0][1] = 1.0;
  a[0][2] = 0.0;
  a[1][0] = -p.omega0 * p.omega0 + p.Fp * std::sin(2.0 * p.omega * t);
  a[1][1] = -p.gamma;
  a[1][2] = 2.0 * p.eta * std::sin(p.omega * t);
  a[2][0] = std::cos(p.omega * t) / p.tau;
  a[2][1] = 0.0;
  a[2][2] = -1.0 / p.tau;
  return a;
}

}  // namespace parasqueeze
