#include "parasqueeze/timedomain.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>

#include <fftw3.h>

#include "parasqueeze/errors.hpp"
#include "parasqueeze/parallel.hpp"

namespace parasqueeze {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Deterministic standard normals: Box-Muller over mt19937_64. The stream is
// fully pinned down by the seed; std::normal_distribution is implementation
// defined and would break seed-stable records across toolchains.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - std::ldexp(static_cast<double>(rng_() >> 11), -53);
    const double u2 = std::ldexp(static_cast<double>(rng_() >> 11), -53);
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(two_pi * u2);
    have_spare_ = true;
    return r * std::cos(two_pi * u2);
  }

 private:
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// One Euler-Maruyama step of the noise-driven model. The velocity updates
// first and the position uses the updated velocity, so the undamped
// oscillator gains no energy from the drift part at any stable step size.
// The pump phase advances by complex rotation (renormalized every 4096
// steps) instead of per-step sin/cos calls.
class EmStepper {
 public:
  EmStepper(const ResonatorParams& p, double t0, double dt, double D)
      : p_(p),
        dt_(dt),
        noise_amp_(std::sqrt(2.0 * D * dt)),
        rot_(std::polar(1.0, p.omega * t0)),
        step_rot_(std::polar(1.0, p.omega * dt)) {}

  double cos_wt() const { return rot_.real(); }
  double sin_wt() const { return rot_.imag(); }

  void advance(StateVector& s, GaussianStream& g) {
    const double c = rot_.real();
    const double sn = rot_.imag();
    const double s2 = 2.0 * sn * c;  // sin(2 omega t)
    const double znew = s.z + dt_ / p_.tau * (c * s.x - s.z);
    s.xdot += dt_ * ((-p_.omega0 * p_.omega0 + p_.Fp * s2) * s.x -
                     p_.gamma * s.xdot + 2.0 * p_.eta * sn * s.z);
    if (noise_amp_ > 0.0) s.xdot += noise_amp_ * g();
    s.x += dt_ * s.xdot;
    s.z = znew;
    rot_ *= step_rot_;
    if (++count_ % 4096 == 0) rot_ /= std::abs(rot_);
  }

 private:
  ResonatorParams p_;
  double dt_;
  double noise_amp_;
  std::complex<double> rot_;
  std::complex<double> step_rot_;
  std::uint64_t count_ = 0;
};

bool out_of_range(const StateVector& s, double blowup) {
  return !(std::abs(s.x) <= blowup && std::abs(s.xdot) <= blowup &&
           std::abs(s.z) <= blowup);
}

void check_options(const IntegrationOptions& opts) {
  if (opts.record_stride < 1)
    throw std::invalid_argument("record_stride must be at least 1");
  if (!(opts.blowup > 0.0))
    throw std::invalid_argument("blowup threshold must be positive");
}

StateVector full_rhs(const ResonatorParams& p, const DriveSignal& d,
                     const StateVector& s, double t) {
  StateVector r;
  r.x = s.xdot;
  r.xdot = (-p.omega0 * p.omega0 + p.Fp * std::sin(2.0 * p.omega * t)) * s.x -
           p.gamma * s.xdot + 2.0 * p.eta * std::sin(p.omega * t) * s.z +
           d.Fs * std::cos(d.omega_s * t + d.phi0);
  r.z = (std::cos(p.omega * t) * s.x - s.z) / p.tau;
  return r;
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwRealDeleter {
  void operator()(double* p) const { fftw_free(p); }
};
struct FftwComplexDeleter {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

// Diagonalizes (sigma_c2, sigma_s2, sigma_cs) already stored in s.
void diagonalize(QuadratureStats& s) {
  const double mean = 0.5 * (s.sigma_c2 + s.sigma_s2);
  const double half_diff = 0.5 * (s.sigma_c2 - s.sigma_s2);
  const double split = std::hypot(half_diff, s.sigma_cs);
  s.sigma_plus2 = mean + split;
  s.sigma_minus2 = mean - split;
  s.angle = 0.5 * std::atan2(2.0 * s.sigma_cs, s.sigma_c2 - s.sigma_s2);
}

}  // namespace

TimeSeries integrate_deterministic(const ResonatorParams& p, const DriveSignal& d,
                                   const StateVector& initial, double t0,
                                   double t1, double dt,
                                   const IntegrationOptions& opts) {
  p.validate();
  d.validate();
  check_options(opts);
  if (!(t1 > t0)) throw std::invalid_argument("need t1 > t0");
  if (!(dt > 0.0) || dt > two_pi / (200.0 * p.omega) * (1.0 + 1e-12))
    throw std::invalid_argument("need 0 < dt <= 2*pi/(200*omega)");

  const auto n_steps = static_cast<std::size_t>(std::ceil((t1 - t0) / dt));
  TimeSeries out;
  out.kind = TimeSeries::Kind::deterministic;
  out.t0 = t0;
  out.dt = dt * opts.record_stride;
  out.samples.reserve(n_steps / opts.record_stride + 2);
  out.samples.push_back(initial);

  StateVector s = initial;
  for (std::size_t k = 1; k <= n_steps; ++k) {
    const double t = t0 + dt * static_cast<double>(k - 1);
    const StateVector k1 = full_rhs(p, d, s, t);
    const StateVector s2{s.x + 0.5 * dt * k1.x, s.xdot + 0.5 * dt * k1.xdot,
                         s.z + 0.5 * dt * k1.z};
    const StateVector k2 = full_rhs(p, d, s2, t + 0.5 * dt);
    const StateVector s3{s.x + 0.5 * dt * k2.x, s.xdot + 0.5 * dt * k2.xdot,
                         s.z + 0.5 * dt * k2.z};
    const StateVector k3 = full_rhs(p, d, s3, t + 0.5 * dt);
    const StateVector s4{s.x + dt * k3.x, s.xdot + dt * k3.xdot, s.z + dt * k3.z};
    const StateVector k4 = full_rhs(p, d, s4, t + dt);
    s.x += dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    s.xdot += dt / 6.0 * (k1.xdot + 2.0 * k2.xdot + 2.0 * k3.xdot + k4.xdot);
    s.z += dt / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z);
    if (out_of_range(s, opts.blowup)) {
      out.diverged_index = out.samples.size();
      break;
    }
    if (k % static_cast<std::size_t>(opts.record_stride) == 0)
      out.samples.push_back(s);
  }
  return out;
}

TimeSeries integrate_stochastic(const ResonatorParams& p, const NoiseSpec& n,
                                double t0, double t1, double dt,
                                const IntegrationOptions& opts) {
  p.validate();
  n.validate();
  check_options(opts);
  if (!(t1 > t0)) throw std::invalid_argument("need t1 > t0");
  const double step = dt == 0.0 ? two_pi / (1000.0 * p.omega) : dt;
  if (!(step > 0.0) || step > two_pi / (500.0 * p.omega) * (1.0 + 1e-12))
    throw std::invalid_argument("need 0 < dt <= 2*pi/(500*omega)");

  const auto n_steps = static_cast<std::size_t>(std::ceil((t1 - t0) / step));
  TimeSeries out;
  out.kind = TimeSeries::Kind::stochastic;
  out.seed = n.seed;
  out.t0 = t0;
  out.dt = step * opts.record_stride;
  out.samples.reserve(n_steps / opts.record_stride + 2);

  StateVector s{};
  out.samples.push_back(s);
  GaussianStream g(n.seed);
  EmStepper stepper(p, t0, step, n.D);
  for (std::size_t k = 1; k <= n_steps; ++k) {
    stepper.advance(s, g);
    if (out_of_range(s, opts.blowup)) {
      out.diverged_index = out.samples.size();
      break;
    }
    if (k % static_cast<std::size_t>(opts.record_stride) == 0)
      out.samples.push_back(s);
  }
  return out;
}

QuadratureSamples software_lockin(const TimeSeries& series, double omega,
                                  double tau) {
  if (!(omega > 0.0) || !(tau > 0.0))
    throw std::invalid_argument("need omega > 0 and tau > 0");
  if (!(series.dt > 0.0)) throw std::invalid_argument("series has no sample spacing");
  if (tau < 10.0 * series.dt)
    throw std::invalid_argument("lock-in needs tau >= 10*dt");

  QuadratureSamples q;
  q.t0 = series.t0;
  q.dt = series.dt;
  q.XL.resize(series.samples.size());
  q.YL.resize(series.samples.size());
  if (series.samples.empty()) return q;

  const double k = series.dt / tau;
  double xl = 0.0, yl = 0.0;
  q.XL[0] = 0.0;
  q.YL[0] = 0.0;
  for (std::size_t i = 1; i < series.samples.size(); ++i) {
    const double t = series.time_at(i - 1);
    const double x = series.samples[i - 1].x;
    xl += k * (std::cos(omega * t) * x - xl);
    yl += k * (std::sin(omega * t) * x - yl);
    q.XL[i] = xl;
    q.YL[i] = yl;
  }
  return q;
}

SpectrumSeries welch_nsd(std::span<const double> x, double dt,
                         std::size_t segment_length, double overlap_fraction) {
  if (!(dt > 0.0)) throw std::invalid_argument("need dt > 0");
  if (segment_length < 8 || segment_length % 2 != 0)
    throw std::invalid_argument("segment_length must be even and at least 8");
  if (!(overlap_fraction >= 0.0) || !(overlap_fraction < 1.0))
    throw std::invalid_argument("overlap_fraction must lie in [0, 1)");
  if (x.size() < segment_length)
    throw TooShort("record shorter than one Welch segment");

  const std::size_t L = segment_length;
  const std::size_t hop =
      L - static_cast<std::size_t>(std::floor(overlap_fraction * static_cast<double>(L)));
  const std::size_t n_seg = 1 + (x.size() - L) / hop;
  const std::size_t n_bins = L / 2 + 1;

  std::vector<double> w(L);
  double sumw2 = 0.0;
  for (std::size_t j = 0; j < L; ++j) {
    w[j] = 0.5 * (1.0 - std::cos(two_pi * static_cast<double>(j) / static_cast<double>(L)));
    sumw2 += w[j] * w[j];
  }

  std::unique_ptr<double, FftwRealDeleter> in(fftw_alloc_real(L));
  std::unique_ptr<fftw_complex, FftwComplexDeleter> fout(fftw_alloc_complex(n_bins));
  if (!in || !fout) throw std::bad_alloc();
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(L), in.get(), fout.get(),
                                FFTW_ESTIMATE);
  }

  std::vector<double> acc(n_bins, 0.0);
  for (std::size_t seg = 0; seg < n_seg; ++seg) {
    const double* src = x.data() + seg * hop;
    double mean = 0.0;
    for (std::size_t j = 0; j < L; ++j) mean += src[j];
    mean /= static_cast<double>(L);
    for (std::size_t j = 0; j < L; ++j) in.get()[j] = (src[j] - mean) * w[j];
    fftw_execute(plan);
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double re = fout.get()[k][0];
      const double im = fout.get()[k][1];
      acc[k] += re * re + im * im;
    }
  }
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  SpectrumSeries s;
  s.nu.resize(n_bins);
  s.S.resize(n_bins);
  const double norm = dt / (sumw2 * static_cast<double>(n_seg));
  for (std::size_t k = 0; k < n_bins; ++k) {
    s.nu[k] = two_pi * static_cast<double>(k) / (static_cast<double>(L) * dt);
    s.S[k] = norm * acc[k];
  }
  return s;
}

SpectrumSeries welch_nsd(const TimeSeries& series, std::size_t segment_length,
                         double overlap_fraction) {
  std::vector<double> x(series.samples.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = series.samples[i].x;
  return welch_nsd(std::span<const double>(x), series.dt, segment_length,
                   overlap_fraction);
}

SpectrumSeries amplitude_spectrum(std::span<const double> x, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("need dt > 0");
  if (x.size() < 8 || x.size() % 2 != 0)
    throw std::invalid_argument("record length must be even and at least 8");

  const std::size_t L = x.size();
  const std::size_t n_bins = L / 2 + 1;
  std::vector<double> w(L);
  double sumw = 0.0;
  for (std::size_t j = 0; j < L; ++j) {
    w[j] = 0.5 * (1.0 - std::cos(two_pi * static_cast<double>(j) / static_cast<double>(L)));
    sumw += w[j];
  }

  std::unique_ptr<double, FftwRealDeleter> in(fftw_alloc_real(L));
  std::unique_ptr<fftw_complex, FftwComplexDeleter> fout(fftw_alloc_complex(n_bins));
  if (!in || !fout) throw std::bad_alloc();
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(L), in.get(), fout.get(),
                                FFTW_ESTIMATE);
  }
  for (std::size_t j = 0; j < L; ++j) in.get()[j] = x[j] * w[j];
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  SpectrumSeries s;
  s.nu.resize(n_bins);
  s.S.resize(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) {
    const double re = fout.get()[k][0];
    const double im = fout.get()[k][1];
    // Amplitude calibration: a bin-centered cosine of amplitude A reads A.
    const double pair_weight = (k == 0 || k == L / 2) ? 1.0 : 2.0;
    s.nu[k] = two_pi * static_cast<double>(k) / (static_cast<double>(L) * dt);
    s.S[k] = pair_weight * std::hypot(re, im) / sumw;
  }
  return s;
}

std::vector<std::size_t> spectral_peaks(const SpectrumSeries& s,
                                        double threshold_frac) {
  if (!(threshold_frac >= 0.0))
    throw std::invalid_argument("threshold_frac must be >= 0");
  const std::size_t n = s.S.size();
  if (n == 0) return {};
  double smax = 0.0;
  for (double v : s.S) smax = std::max(smax, v);
  const double floor_level = threshold_frac * smax;

  std::vector<std::size_t> peaks;
  for (std::size_t k = 0; k < n; ++k) {
    const bool left_ok = k == 0 || s.S[k] >= s.S[k - 1];
    const bool right_ok = k + 1 == n || s.S[k] >= s.S[k + 1];
    if (left_ok && right_ok && s.S[k] > floor_level) peaks.push_back(k);
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [&](std::size_t a, std::size_t b) { return s.S[a] > s.S[b]; });
  return peaks;
}

EnsembleQuadratures ensemble_quadrature_stats(const ResonatorParams& p,
                                              const NoiseSpec& n,
                                              const EnsembleOptions& opts) {
  p.validate();
  n.validate();
  if (opts.runs < 100) throw std::invalid_argument("ensemble needs at least 100 runs");
  const double tau_m = opts.tau_meas == 0.0 ? 10.0 / p.gamma : opts.tau_meas;
  const double t_end = opts.t_end == 0.0 ? 4.5 * tau_m : opts.t_end;
  const double window = opts.window == 0.0 ? t_end - 3.0 * tau_m : opts.window;
  const double dt = opts.dt == 0.0 ? two_pi / (800.0 * p.omega) : opts.dt;
  if (!(tau_m > 0.0) || !(t_end > 0.0)) throw std::invalid_argument("need tau_meas > 0 and t_end > 0");
  if (!(window > 0.0) || window >= t_end)
    throw std::invalid_argument("need 0 < window < t_end (t_end over 3*tau_meas when defaulted)");
  if (!(dt > 0.0) || dt > two_pi / (500.0 * p.omega) * (1.0 + 1e-12))
    throw std::invalid_argument("need 0 < dt <= 2*pi/(500*omega)");
  if (tau_m < 10.0 * dt) throw std::invalid_argument("lock-in needs tau_meas >= 10*dt");
  if (window < 10.0 * dt) throw std::invalid_argument("window needs at least 10 steps");

  const auto n_steps = static_cast<std::size_t>(std::ceil(t_end / dt));
  const auto n_win = std::min(
      n_steps, static_cast<std::size_t>(std::llround(window / dt)));
  auto lockin_run = [&](const ResonatorParams& q, std::uint64_t seed,
                        double* xl_out, double* yl_out) {
    StateVector s{};
    GaussianStream g(seed);
    EmStepper stepper(q, 0.0, dt, n.D);
    const double k = dt / tau_m;
    double xl = 0.0, yl = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n_steps; ++i) {
      xl += k * (stepper.cos_wt() * s.x - xl);
      yl += k * (stepper.sin_wt() * s.x - yl);
      if (i + n_win >= n_steps) {
        sx += xl;
        sy += yl;
      }
      stepper.advance(s, g);
    }
    *xl_out = sx / static_cast<double>(n_win);
    *yl_out = sy / static_cast<double>(n_win);
  };

  ResonatorParams bare = p;
  bare.Fp = 0.0;
  bare.eta = 0.0;

  const auto M = static_cast<std::size_t>(opts.runs);
  std::vector<double> xf(M), yf(M), xr(M), yr(M);
  parallel_for(M, opts.threads, [&](std::size_t i) {
    lockin_run(p, n.seed + 2 * i, &xf[i], &yf[i]);
    lockin_run(bare, n.seed + 2 * i + 1, &xr[i], &yr[i]);
  });

  auto mean_of = [M](const std::vector<double>& v) {
    double s = 0.0;
    for (double q : v) s += q;
    return s / static_cast<double>(M);
  };
  auto cov_of = [M](const std::vector<double>& a, double ma,
                    const std::vector<double>& b, double mb) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
    return s / static_cast<double>(M - 1);
  };

  const double mxf = mean_of(xf), myf = mean_of(yf);
  const double mxr = mean_of(xr), myr = mean_of(yr);

  EnsembleQuadratures out;
  out.runs = opts.runs;
  out.measured.sigma_c2 = cov_of(xf, mxf, xf, mxf);
  out.measured.sigma_s2 = cov_of(yf, myf, yf, myf);
  out.measured.sigma_cs = cov_of(xf, mxf, yf, myf);
  diagonalize(out.measured);
  out.reference_variance = 0.5 * (cov_of(xr, mxr, xr, mxr) + cov_of(yr, myr, yr, myr));
  out.db_plus = 10.0 * std::log10(out.measured.sigma_plus2 / out.reference_variance);
  out.db_minus = 10.0 * std::log10(out.measured.sigma_minus2 / out.reference_variance);
  const double denom = std::sqrt(out.measured.sigma_c2 * out.measured.sigma_s2);
  out.correlation = denom > 0.0 ? out.measured.sigma_cs / denom : 0.0;
  return out;
}

std::vector<PeriodPeak> period_peaks(const TimeSeries& series, double omega) {
  if (!(omega > 0.0)) throw std::invalid_argument("need omega > 0");
  if (series.samples.size() < 2 || !(series.dt > 0.0)) return {};

  const double T = two_pi / omega;
  const std::size_t N = series.samples.size();
  const double duration = series.dt * static_cast<double>(N - 1);
  const auto n_periods = static_cast<std::size_t>(std::floor(duration / T + 1e-9));

  std::vector<PeriodPeak> out;
  out.reserve(n_periods);
  for (std::size_t m = 0; m < n_periods; ++m) {
    const auto i_begin = static_cast<std::size_t>(
        std::ceil(static_cast<double>(m) * T / series.dt - 1e-9));
    auto i_end = static_cast<std::size_t>(
        std::ceil(static_cast<double>(m + 1) * T / series.dt - 1e-9));
    i_end = std::min(i_end, N);
    if (i_begin >= i_end) continue;

    std::size_t best = i_begin;
    double best_val = std::abs(series.samples[i_begin].x);
    for (std::size_t i = i_begin + 1; i < i_end; ++i) {
      const double v = std::abs(series.samples[i].x);
      if (v > best_val) {
        best_val = v;
        best = i;
      }
    }
    // Three-point parabolic refinement removes the sampling bias of the
    // discrete maximum.
    if (best > 0 && best + 1 < N) {
      const double a = std::abs(series.samples[best - 1].x);
      const double b = best_val;
      const double c = std::abs(series.samples[best + 1].x);
      const double den = a - 2.0 * b + c;
      if (den < 0.0) {
        const double offset = 0.5 * (a - c) / den;
        if (std::abs(offset) <= 1.0) best_val = b - 0.25 * (a - c) * offset;
      }
    }
    out.push_back({series.t0 + (static_cast<double>(m) + 0.5) * T, best_val});
  }
  return out;
}

std::vector<GainPhasePoint> extract_gain_phase(const ResonatorParams& p,
                                               const DriveSignal& d,
                                               const GainPhaseOptions& opts) {
  p.validate();
  d.validate();
  const double delta = d.delta(p);
  if (!(std::abs(delta) > 0.0) || std::abs(delta) > 0.1 * p.gamma * (1.0 + 1e-12))
    throw std::invalid_argument("phase sweep needs 0 < |delta| <= gamma/10");
  if (!(d.Fs > 0.0)) throw std::invalid_argument("phase sweep needs Fs > 0");

  const double dt = opts.dt == 0.0 ? two_pi / (1000.0 * p.omega) : opts.dt;
  const double settle =
      opts.settle_time < 0.0 ? std::max(20.0 / p.gamma, 20.0 * p.tau) : opts.settle_time;
  const double T = p.period();

  StateVector start{};
  double t_start = 0.0;
  if (settle > 0.0) {
    const auto n1 = static_cast<std::size_t>(std::ceil(settle / dt));
    IntegrationOptions o1;
    o1.record_stride = static_cast<int>(std::min<std::size_t>(n1, 1u << 30));
    const TimeSeries s1 = integrate_deterministic(
        p, d, StateVector{}, 0.0, static_cast<double>(n1) * dt, dt, o1);
    if (s1.diverged_index)
      throw NoConvergence("trajectory diverged while settling: pump above threshold?");
    start = s1.samples.back();
    t_start = s1.time_at(s1.samples.size() - 1);
  }

  const double span =
      opts.t_span > 0.0 ? opts.t_span : std::numbers::pi / std::abs(delta);
  const auto periods = static_cast<std::size_t>(std::ceil(span / T)) + 1;
  IntegrationOptions o2;
  o2.record_stride = std::max(1, static_cast<int>(std::floor(T / (200.0 * dt))));
  const TimeSeries s2 =
      integrate_deterministic(p, d, start, t_start,
                              t_start + static_cast<double>(periods) * T, dt, o2);
  if (s2.diverged_index)
    throw NoConvergence("trajectory diverged during the phase sweep: pump above threshold?");

  const double chi_abs = std::abs(susceptibility(p, p.omega));
  std::vector<GainPhasePoint> out;
  for (const PeriodPeak& pk : period_peaks(s2, p.omega)) {
    double phi = wrap_angle(delta * pk.t + d.phi0);
    if (phi >= std::numbers::pi) phi -= std::numbers::pi;
    out.push_back({phi, pk.amplitude / (chi_abs * d.Fs)});
  }
  std::sort(out.begin(), out.end(),
            [](const GainPhasePoint& a, const GainPhasePoint& b) { return a.phi < b.phi; });
  return out;
}

}  // namespace parasqueeze
