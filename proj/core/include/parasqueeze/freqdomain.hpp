#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "parasqueeze/model.hpp"

namespace parasqueeze {

// Coefficients of the frequency-lattice equation obeyed by the Fourier
// transform x~(nu) of the noise-driven resonator after exact elimination
// of the lock-in variable:
//
//   alpha(nu) x~(nu) + conj(beta)(-nu) x~(nu - 2 omega)
//     + beta(nu) x~(nu + 2 omega) = chi(nu) r~(nu),
//
//   alpha(nu) = 1 + (i eta chi(nu)/2) [ 1/(1 - i(nu+omega)tau)
//                                       - 1/(1 - i(nu-omega)tau) ],
//   beta(nu)  = (i chi(nu)/2) [ Fp + eta/(1 - i(nu+omega)tau) ].
struct AlphaBeta {
  std::complex<double> alpha;
  std::complex<double> beta;
};

AlphaBeta alpha_beta(const ResonatorParams& p, double nu);

// Transfer functions from the noise force to x~(nu):
//   x~(nu) = g0(nu) r~(nu) + gplus(nu) r~(nu - 2 omega)
//            + gminus(nu) r~(nu + 2 omega) + higher lattice orders.
// Reality ties them pairwise: g0(-nu) = conj(g0(nu)) and
// gplus(nu) = conj(gminus(-nu)).
struct GreensTriplet {
  std::complex<double> g0;
  std::complex<double> gplus;
  std::complex<double> gminus;
  int order = 1;  // lattice half-width K the values came from
};

// Closed-form triplet from the K = 1 truncation of the lattice:
//   g0(nu)    = chi(nu)/den(nu),
//   gplus(nu) = -conj(beta)(-nu) chi(nu-2w) / (alpha(nu-2w) den(nu)),
//   gminus(nu)= -beta(nu) chi(nu+2w) / (alpha(nu+2w) den(nu)),
//   den = alpha(nu) - conj(beta)(-nu) beta(nu-2w)/alpha(nu-2w)
//         - beta(nu) conj(beta)(-nu-2w)/alpha(nu+2w).
GreensTriplet greens_perturbative(const ResonatorParams& p, double nu);

// Full lattice solve on sites |k| <= K (site k carries frequency
// nu + 2*k*omega) by complex tridiagonal elimination. orders[j + K] is the
// transfer from a unit force at site j to x~(nu); the triplet is sites
// -1, 0, +1. At K = 1 this reproduces greens_perturbative exactly. Throws
// SingularThreshold when an elimination pivot falls below 1e-300 in
// modulus (the parameter point sits on an instability line).
struct LatticeGreens {
  GreensTriplet triplet;
  std::vector<std::complex<double>> orders;
  int K = 0;
  bool converged = false;  // set by greens_lattice_converged
};

LatticeGreens greens_lattice(const ResonatorParams& p, double nu, int K);

// Grows K by 2 until g0, gplus and gminus all change by less than 1e-10
// relative, then returns that solve with converged = true. Subthreshold
// parameters converge by K <= 12; NoConvergence beyond max_K.
LatticeGreens greens_lattice_converged(const ResonatorParams& p, double nu,
                                       int max_K = 40);

enum class GreensMethod {
  perturbative,  // K = 1 closed forms
  lattice,       // converged lattice solve
};

// Stationary noise spectral density of x under white noise of intensity
// 2*D, S_N(nu) = 2*D*(|g0|^2 + |gplus|^2 + |gminus|^2). With the lattice
// method the sum runs over every converged lattice order unless
// three_term_only restricts it to the displayed triplet.
double nsd(const ResonatorParams& p, double D, double nu,
           GreensMethod method = GreensMethod::lattice,
           bool three_term_only = false);

// Spectral densities of the demodulated quadratures (X_L: cosine channel,
// Y_L: sine channel) of a lock-in with the feedback time constant tau:
//   S_XL(nu) = (D/2) [ |g0(nu-w) + gplus(nu+w)|^2
//                      + |g0(nu+w) + gminus(nu-w)|^2 ] / (1 + tau^2 nu^2),
//   S_YL the same with minus signs inside the moduli.
std::pair<double, double> nsd_lockin(const ResonatorParams& p, double D,
                                     double nu,
                                     GreensMethod method = GreensMethod::lattice);

// Stationary covariances of the resonant quadratures (cosine, sine):
//   sigma_c^2 = 2 pi D [ |g0(w)|^2 + |gplus(w)|^2 + 2 Re{g0(w) gplus(w)} ],
//   sigma_s^2 = same with -2 Re{...},
//   sigma_cs  = 4 pi D Im{g0(w) gplus(w)},
// diagonalized as sigma_+-^2 = (sigma_c^2 + sigma_s^2)/2 +/-
// sqrt(((sigma_c^2 - sigma_s^2)/2)^2 + sigma_cs^2) with principal angle
// atan2(2 sigma_cs, sigma_c^2 - sigma_s^2)/2.
//
// The perturbative method uses the resonant two-site closed forms
//   g0(w) ~  conj(alpha)(w) chi(w) / (|alpha(w)|^2 - |beta(-w)|^2),
//   gplus(w) ~ -conj(beta)(-w) conj(chi)(w) / (|alpha(w)|^2 - |beta(-w)|^2);
// the lattice method uses converged lattice values at nu = omega. Both are
// kept because the truncations differ; the squeeze report prints the gap.
struct QuadratureStats {
  double sigma_c2 = 0.0;
  double sigma_s2 = 0.0;
  double sigma_cs = 0.0;
  double sigma_plus2 = 0.0;
  double sigma_minus2 = 0.0;
  double angle = 0.0;
};

QuadratureStats quadrature_covariance(const ResonatorParams& p, double D,
                                      GreensMethod method = GreensMethod::lattice);

// Phase-dependent amplitude gain for a resonant probe, from the lattice
// transfer functions: |g0(w) + gplus(w) e^{2 i phi0}| / |chi(w)|.
// Normalized so Fp = eta = 0 gives 1 at every phase.
double gain_ft(const ResonatorParams& p, double phi0,
               GreensMethod method = GreensMethod::lattice);

// Stationary response envelope for a detuned probe of amplitude Fs at
// omega_s = omega + delta:
//   E(t) = Fs |g0(omega_s) e^{-i phi0} e^{-i delta t}
//             + gplus(omega_i) e^{i phi0} e^{i delta t}|,
// the signal/idler beat that bounds x(t) from above and below (+-E).
double envelope_ft(const ResonatorParams& p, const DriveSignal& d, double t,
                   GreensMethod method = GreensMethod::lattice);

// Ratio of the noise power in [0, 4*omega] to the same integral for the
// bare oscillator (Fp = eta = 0): the effective temperature ratio of the
// feedback-cooled resonator. Adaptive Gauss-Kronrod quadrature, relative
// tolerance 1e-6; independent of D.
double effective_temperature_ratio(const ResonatorParams& p,
                                   GreensMethod method = GreensMethod::lattice);

}  // namespace parasqueeze
