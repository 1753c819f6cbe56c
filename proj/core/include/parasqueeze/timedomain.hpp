#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "parasqueeze/freqdomain.hpp"
#include "parasqueeze/model.hpp"

namespace parasqueeze {

// Uniformly sampled trajectory. dt is the sample spacing (integration step
// times record_stride). Divergence (|component| > blowup, the legitimate
// above-threshold outcome) truncates the series and sets diverged_index to
// the offending sample; it is recorded, never thrown.
struct TimeSeries {
  enum class Kind { deterministic, stochastic };

  double t0 = 0.0;
  double dt = 0.0;
  std::vector<StateVector> samples;
  Kind kind = Kind::deterministic;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> diverged_index;

  double time_at(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
};

struct IntegrationOptions {
  int record_stride = 1;    // keep every record_stride-th step
  double blowup = 1e12;     // divergence threshold on |x|, |xdot|, |z|
};

// Fixed-step classic Runge-Kutta integration of the driven deterministic
// model. Requires dt <= 2*pi/(200*omega).
TimeSeries integrate_deterministic(const ResonatorParams& p,
                                   const DriveSignal& d,
                                   const StateVector& initial, double t0,
                                   double t1, double dt,
                                   const IntegrationOptions& opts = {});

// Euler-Maruyama integration of the noise-driven model (no coherent
// drive): per step the velocity receives sqrt(2*D*dt)*n with n ~ N(0,1),
// and the deterministic part advances with the stochastic-consistent
// explicit scheme (velocity update first, then position with the updated
// velocity, so the undamped oscillator gains no spurious energy at
// Q >> 1). Noise enters only the velocity. dt <= 2*pi/(500*omega), pass
// dt = 0 for the default 2*pi/(1000*omega). Identical seed, dt and span
// reproduce the series bit for bit. With D = 0 the trajectory matches
// integrate_deterministic with O(dt) global error.
TimeSeries integrate_stochastic(const ResonatorParams& p, const NoiseSpec& n,
                                double t0, double t1, double dt = 0.0,
                                const IntegrationOptions& opts = {});

// Software lock-in demodulation of a recorded series at frequency omega
// with RC time constant tau, discretized exactly like the model's own
// feedback filter:
//   XL += (dt/tau) (cos(omega t) x - XL),  YL += (dt/tau) (sin(omega t) x - YL).
// Requires tau >= 10*dt. Demodulating at (p.omega, p.tau) reproduces the
// integrator's internal z on the cosine channel.
struct QuadratureSamples {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> XL;
  std::vector<double> YL;
};

QuadratureSamples software_lockin(const TimeSeries& series, double omega,
                                  double tau);

// Two-sided noise spectral density estimate in angular frequency,
// normalized so that white noise of intensity 2*D comes out flat at 2*D
// and the bare-oscillator run reproduces 2*D*|chi(nu)|^2. Hann window,
// mean removed per segment, segments averaged with the given overlap
// fraction in [0, 1). Throws TooShort when the data holds less than one
// segment. The grid covers [0, pi/dt] (the negative half is its mirror).
struct SpectrumSeries {
  std::vector<double> nu;
  std::vector<double> S;
};

SpectrumSeries welch_nsd(std::span<const double> x, double dt,
                         std::size_t segment_length, double overlap_fraction);
SpectrumSeries welch_nsd(const TimeSeries& series, std::size_t segment_length,
                         double overlap_fraction);

// Hann-windowed amplitude spectrum |x~(nu)| of one record, for locating
// spectral lines. Grid as in welch_nsd.
SpectrumSeries amplitude_spectrum(std::span<const double> x, double dt);

// Indices of local maxima of S exceeding threshold_frac times the global
// maximum, sorted by descending height.
std::vector<std::size_t> spectral_peaks(const SpectrumSeries& s,
                                        double threshold_frac);

// Stationary quadrature statistics measured the way an experiment would:
// M independent noise runs, each demodulated at (omega, tau_meas) with
// tau_meas >> 1/gamma, the (XL, YL) outputs averaged over the final
// `window` of each run, sample covariance of those end-window averages
// across runs, and the same for a bare-oscillator reference ensemble
// (Fp = eta = 0) on an offset seed block (feedback run i uses seed + 2i,
// reference run i uses seed + 2i + 1). dB ratios are against the
// isotropic reference variance.
//
// The window average matters: it narrows the measurement band well inside
// every quadrature linewidth, so the ratios estimate the zero-frequency
// quadrature spectral densities (the sigma^2 of quadrature_covariance)
// rather than linewidth-weighted variances, and its spectral sidelobes
// fall fast enough to keep the closed-loop resonance near sqrt(eta/(2
// omega tau)) from leaking into the squeezed channel.
struct EnsembleOptions {
  int runs = 1000;        // >= 100
  double tau_meas = 0.0;  // 0 -> 10/gamma
  double t_end = 0.0;     // 0 -> 4.5*tau_meas
  double window = 0.0;    // 0 -> t_end - 3*tau_meas
  double dt = 0.0;        // 0 -> 2*pi/(800*omega)
  int threads = 0;        // 0 -> hardware concurrency
};

struct EnsembleQuadratures {
  QuadratureStats measured;      // sample covariances, diagonalized
  double reference_variance = 0.0;
  double db_plus = 0.0;          // 10*log10(sigma_+^2/sigma_0^2)
  double db_minus = 0.0;
  double correlation = 0.0;      // Pearson rho of (XL, YL), feedback ensemble
  int runs = 0;
};

EnsembleQuadratures ensemble_quadrature_stats(const ResonatorParams& p,
                                              const NoiseSpec& n,
                                              const EnsembleOptions& opts = {});

// Per-period amplitude estimates of a recorded trajectory: for every full
// drive period the peak |x| and the period midpoint time.
struct PeriodPeak {
  double t = 0.0;
  double amplitude = 0.0;
};

std::vector<PeriodPeak> period_peaks(const TimeSeries& series, double omega);

// Phase-resolved gain measured from one deterministic run with a slightly
// detuned probe (0 < |delta| <= gamma/10): the drive phase delta*t + phi0
// sweeps slowly, the per-period peak amplitude traces the phase-dependent
// response, and each period maps to the point
// (phi = (delta*t_mid + phi0) mod pi, peak/(|chi(omega)| Fs)).
// The delta bound keeps the sweep quasi-static: per-period peak detection
// samples the instantaneous envelope once per period, so the phase must move
// slower than the response bandwidth or narrow gain notches are smeared.
// settle_time < 0 selects the default max(20/gamma, 20*tau); t_span = 0
// selects one half beat pi/|delta| so the full phase range is visited once.
// Points are sorted by phi.
struct GainPhasePoint {
  double phi = 0.0;
  double gain = 0.0;
};

struct GainPhaseOptions {
  double settle_time = -1.0;
  double dt = 0.0;      // 0 -> 2*pi/(1000*omega)
  double t_span = 0.0;  // 0 -> pi/|delta|
};

std::vector<GainPhasePoint> extract_gain_phase(const ResonatorParams& p,
                                               const DriveSignal& d,
                                               const GainPhaseOptions& opts = {});

}  // namespace parasqueeze
