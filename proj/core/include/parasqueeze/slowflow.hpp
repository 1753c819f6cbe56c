#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "parasqueeze/model.hpp"

namespace parasqueeze {

// Averaged (rotating-frame) state. x(t) = u(t)*cos(omega*t) -
// v(t)*sin(omega*t) plus the slowly varying lock-in output z.
struct SlowState {
  double u = 0.0;
  double v = 0.0;
  double z = 0.0;
};

// Right-hand side of the averaged flow, with drive phase
// phi(t) = delta*t + phi0, delta = omega_s - omega, Omega = omega0^2 -
// omega^2:
//
//   udot = -[ (Fp/2 + gamma*omega)u + 2*eta*z + Omega*v
//             - Fs*sin(phi(t)) ] / (2*omega)
//   vdot =  [ Omega*u + (Fp/2 - gamma*omega)v - Fs*cos(phi(t)) ] / (2*omega)
//   zdot = -z/tau + u/(2*tau)
SlowState averaged_rhs(const ResonatorParams& p, const DriveSignal& d,
                       const SlowState& s, double t);

// Stationary point of the averaged flow for a resonant drive (delta = 0):
//
//   (u, v) = Fs/den * ( Fp/2 - gamma*omega   -Omega              ) (sin phi0)
//                     ( -Omega               Fp/2 + gamma*omega + eta ) (cos phi0)
//   z = u/2,  den = (Fp/2 + gamma*omega + eta)(Fp/2 - gamma*omega) - Omega^2.
//
// Throws SingularThreshold when |den| < 1e-12 (on the averaged threshold).
SlowState fixed_point(const ResonatorParams& p, double Fs, double phi0);

// Phase-dependent stationary amplitude gain G(phi0) =
// sqrt(u^2 + v^2)/(|chi(omega)|*Fs), independent of Fs. Evaluated from the
// closed form
//
//   G = sqrt( Omega^2 + Fp^2/4 + gamma^2 omega^2 + eta^2/2
//             + eta*(Fp/2 + gamma*omega)
//             + [Fp*gamma*omega + (eta/2)(eta + Fp + 2*gamma*omega)]*cos(2 phi0)
//             - Omega*(Fp + eta)*sin(2 phi0) ) / (|den|*|chi(omega)|).
double gain_avg(const ResonatorParams& p, double phi0);

// Pump amplitudes where the averaged stationary response diverges
// (den = 0):  Fp = -eta +/- sqrt(4*Omega^2 + (eta + 2*gamma*omega)^2).
// Returned as (negative root, positive root). p.Fp is ignored.
std::pair<double, double> threshold_avg(const ResonatorParams& p);

struct GainExtrema {
  double gmin = 0.0;
  double gmax = 0.0;
};

// Gain extrema over phi0 at exact parametric resonance:
//   Gmin = gamma*omega/|Fp/2 + gamma*omega + eta|,
//   Gmax = gamma*omega/|Fp/2 - gamma*omega|.
// Throws DetunedInput when |Omega| > 1e-9*omega0^2. On the stationary
// instability line Gmax is +infinity while Gmin stays regular.
GainExtrema gain_extrema_avg(const ResonatorParams& p);

// Trajectory of the averaged flow. Divergence (non-finite state, which is
// the legitimate above-threshold outcome) is recorded, not thrown: samples
// are truncated at the last finite state and diverged_index is set.
struct SlowSeries {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<SlowState> states;
  std::optional<std::size_t> diverged_index;
};

// Fixed-step classic Runge-Kutta integration of the averaged flow.
// Requires 0 < dt <= 2*pi/(50*r) where r bounds the slow rates,
// r = max( (|Fp|/2 + gamma*omega + |Omega| + 2|eta|)/(2*omega), 1/tau,
// |delta| ).
SlowSeries integrate_slowflow(const ResonatorParams& p, const DriveSignal& d,
                              const SlowState& initial, double t0, double t1,
                              double dt);

}  // namespace parasqueeze
