#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "parasqueeze/model.hpp"

namespace parasqueeze {

// Single-harmonic stationary response x(t) = Re{A_x e^{-i omega t}} to a
// resonant drive (omega_s = omega). The lock-in output is eliminated
// exactly, which makes the ansatz self-consistent at the pump frequency:
//
//   B(omega) A_x - i (chi/2)(Fp + eta) conj(A_x) = chi Fs e^{-i phi0},
//   B(omega) = 1 - eta chi(omega) omega tau / (1 - 2 i omega tau).
struct HbmResponse {
  std::complex<double> A_x;
  double detM = 0.0;  // |B|^2 - |chi|^2 (Fp + eta)^2 / 4
};

// Determinant of the 2x2 balance system. Vanishes on the stationary
// (saddle-node) instability line.
double det_m(const ResonatorParams& p);

// Solves the balance system. Requires omega_s = omega (within 1e-9*omega)
// and |detM| > 1e-14.
HbmResponse hbm_response(const ResonatorParams& p, const DriveSignal& d);

// Pump amplitudes with det_m = 0, closed form Fp = -eta +/- 2|B|/|chi|,
// returned as (negative root, positive root). p.Fp is ignored. Throws
// NoRealRoot if the quadratic in Fp has no real solution.
std::pair<double, double> threshold_hbm(const ResonatorParams& p);

// Amplitude gain |A_x| / (|chi(omega)| Fs); independent of Fs.
double gain_hbm(const ResonatorParams& p, double phi0);

struct GainExtrema2 {
  double gmin = 0.0;
  double gmax = 0.0;
};

// Gain extrema over phi0:
//   Gmin = 1/(|B| + (|chi|/2)|Fp + eta|),
//   Gmax = 1/| |B| - (|chi|/2)|Fp + eta| |.
// Exactly on the stationary instability line Gmax is +infinity while Gmin
// stays regular (1/2 for the plain pump at threshold).
GainExtrema2 gain_extrema_hbm(const ResonatorParams& p);

// Point on the oscillatory (Hopf) instability line: at pump Fp the
// quasi-periodic mode x ~ A e^{-i(omega-Delta)t} + B e^{-i(omega+Delta)t}
// becomes marginal. residual is the final Euclidean norm of the two real
// characteristic equations.
struct HopfPoint {
  double Fp = 0.0;
  double Delta = 0.0;  // sideband offset, > 0 by convention
  double residual = 0.0;
  int iterations = 0;
};

// Real and imaginary parts of the Hopf characteristic condition
//   Fp^2 (1 + i tau Delta) + 2 Fp eta
//     = 4 eta omega (gamma + 2 i Delta) + 4 (1 + i tau Delta) W,
//   W = 1 / ( chi(omega-Delta) conj(chi(omega+Delta)) ),
// rearranged so both equations stay regular as Delta -> 0 (Im W is an odd
// polynomial in Delta, so Im W / Delta is evaluated exactly).
std::pair<double, double> hopf_residual(const ResonatorParams& p, double Fp,
                                        double Delta);

// Damped Newton solve of the two characteristic equations in (Fp, Delta)
// from one initial guess. Finite-difference Jacobian with relative step
// 1e-7, step halving (at most 20 halvings per iteration), success when the
// residual norm drops below 1e-10, at most 100 iterations (NoConvergence
// otherwise). p.Fp is ignored.
HopfPoint hopf_line(const ResonatorParams& p, double Fp_guess,
                    double Delta_guess);

// hopf_line retried over the standard initial-guess grid: Delta from a
// logarithmic grid in [1e-3, 1e-1]*omega, Fp from the negative root of
// threshold_avg scaled by {0.01, 0.02, 0.05}. First convergent solution
// with Delta > 1e-6*omega wins; NoConvergence if the whole grid fails.
HopfPoint find_hopf(const ResonatorParams& p);

// Marginal mode shape on the Hopf line, normalized to |A| = 1:
// x(t) = Re{A e^{-i(omega-Delta)t}} + Re{B e^{-i(omega+Delta)t}},
// z(t) = Re{C e^{-i Delta t}}, C = (conj(A) + B)/(2 (1 - i tau Delta)).
// Throws NotOnHopfLine unless (Fp, Delta) satisfies the complex
// characteristic equation to 1e-8.
struct HopfMode {
  std::complex<double> A;
  std::complex<double> B;
  std::complex<double> C;
};

HopfMode hopf_mode_shape(const ResonatorParams& p, const HopfPoint& pt);

// Complex residual of the unsimplified characteristic determinant
//   [1 - i eta chi(omega-Delta)/(2s)][1 + i eta conj(chi(omega+Delta))/(2s)]
//     - (chi(omega-Delta) conj(chi(omega+Delta))/4)[Fp + eta/s]^2,
// s = 1 + i tau Delta. Zero exactly on the Hopf line; kept separate from
// hopf_residual so the two forms can be checked against each other.
std::complex<double> hopf_characteristic(const ResonatorParams& p, double Fp,
                                         double Delta);

}  // namespace parasqueeze
