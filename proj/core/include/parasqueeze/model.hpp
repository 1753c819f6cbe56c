#pragma once

#include <complex>
#include <cstdint>

#include "parasqueeze/linalg.hpp"

namespace parasqueeze {

// Parameters of the parametrically pumped resonator with lock-in feedback.
// Everything is dimensionless with the effective mass normalized to one:
//
//   xddot + gamma*xdot + omega0^2 x - Fp*sin(2*omega*t)*x
//       = 2*eta*sin(omega*t)*z + external force,
//   zdot = -z/tau + cos(omega*t)*x/tau.
//
// z is the cosine-quadrature output of a lock-in amplifier with time
// constant tau demodulating x at the pump half-frequency omega; feeding it
// back with gain 2*eta*sin(omega*t) makes the parametric gain phase
// selective. The same coefficient 2*eta applies in the noise-driven model.
struct ResonatorParams {
  double omega0 = 1.0;  // natural frequency, > 0
  double gamma = 0.0;   // linear damping rate, > 0
  double Fp = 0.0;      // parametric pump amplitude (frequency^2, any sign)
  double omega = 1.0;   // pump half-frequency / demodulation frequency, > 0
  double eta = 0.0;     // feedback gain (frequency^2, any sign)
  double tau = 1.0;     // lock-in filter time constant, > 0

  // Detuning from parametric resonance, Omega = omega0^2 - omega^2.
  // Derived on demand; never stored.
  double detuning() const { return omega0 * omega0 - omega * omega; }
  double period() const;  // pump period 2*pi/omega

  // Throws std::invalid_argument unless omega0, gamma, omega, tau > 0 and
  // all fields are finite.
  void validate() const;
};

// Harmonic probe force Fs*cos(omega_s*t + phi0).
struct DriveSignal {
  double Fs = 0.0;       // amplitude, >= 0
  double omega_s = 1.0;  // drive frequency
  double phi0 = 0.0;     // drive phase, kept reduced to [0, 2*pi)

  // Signal detuning delta = omega_s - omega and idler frequency
  // omega_i = omega - delta = 2*omega - omega_s.
  double delta(const ResonatorParams& p) const { return omega_s - p.omega; }
  double idler(const ResonatorParams& p) const { return p.omega - delta(p); }

  void validate() const;  // Fs >= 0, phi0 in [0, 2*pi), finite fields
};

// Reduces an angle to [0, 2*pi).
double wrap_angle(double phi);

// White-noise force of intensity 2*D acting on the velocity:
// <r(t) r(t')> = 2*D*delta(t - t'). The seed fully determines the stream;
// equal seeds and step sizes reproduce bit-identical realizations.
struct NoiseSpec {
  double D = 0.0;  // noise intensity, >= 0
  std::uint64_t seed = 0;

  void validate() const;
};

// Instantaneous state (x, xdot, z).
struct StateVector {
  double x = 0.0;
  double xdot = 0.0;
  double z = 0.0;
};

// Linear response of the bare oscillator, chi(nu) = 1/(omega0^2 - nu^2
// - i*gamma*nu). Satisfies chi(-nu) = conj(chi(nu)) for real nu.
std::complex<double> susceptibility(const ResonatorParams& p, double nu);

// System matrix A(t) of the homogeneous model, state order (x, xdot, z):
//
//   ( 0                              1      0                )
//   ( -omega0^2 + Fp*sin(2*omega*t)  -gamma  2*eta*sin(omega*t) )
//   ( cos(omega*t)/tau               0      -1/tau           )
//
// trace A = -gamma - 1/tau independent of t. With eta = 0 the (x, xdot)
// block evolves independently of z.
Mat3 system_matrix(const ResonatorParams& p, double t);

}  // namespace parasqueeze
