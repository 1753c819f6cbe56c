#include "parasqueeze/validate.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "parasqueeze/errors.hpp"
#include "parasqueeze/floquet.hpp"
#include "parasqueeze/freqdomain.hpp"
#include "parasqueeze/harmonic_balance.hpp"
#include "parasqueeze/model.hpp"
#include "parasqueeze/slowflow.hpp"
#include "parasqueeze/timedomain.hpp"

namespace parasqueeze {

namespace {

using cplx = std::complex<double>;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

double rel_err(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

double rel_err(cplx a, cplx b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

// Standard working point used throughout the battery.
ResonatorParams standard_params() {
  ResonatorParams p;
  p.omega0 = 1.0;
  p.gamma = 1e-3;
  p.omega = 1.0;
  p.eta = 1.0;
  p.tau = 100.0;
  p.Fp = 0.0;
  return p;
}

bool check_multiplier_product(std::string& detail) {
  std::mt19937_64 rng(20260815u);
  auto uni = [&](double lo, double hi) {
    return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  };
  double worst_product = 0.0;
  double worst_det = 0.0;
  for (int draw = 0; draw < 10; ++draw) {
    ResonatorParams p;
    p.omega0 = uni(0.5, 2.0);
    p.omega = p.omega0 * uni(0.8, 1.25);
    p.gamma = uni(1e-4, 0.05);
    p.Fp = uni(-0.1, 0.1);
    p.eta = uni(-0.5, 0.5);
    p.tau = uni(1.0, 200.0);
    const MonodromyResult m = monodromy(p);
    const double expected =
        std::exp(-2.0 * std::numbers::pi * (p.gamma + 1.0 / p.tau) / p.omega);
    const cplx product = m.multipliers[0] * m.multipliers[1] * m.multipliers[2];
    worst_product = std::max(worst_product, rel_err(product, cplx(expected)));
    worst_det = std::max(worst_det, rel_err(m.monodromy.det(), expected));
  }
  detail = fmt("max rel err over 10 draws: eigenvalue product %.2e, determinant %.2e (tol 1e-8)",
               worst_product, worst_det);
  return worst_product < 1e-8 && worst_det < 1e-8;
}

bool check_degenerate_limits(std::string& detail) {
  ResonatorParams p = standard_params();
  p.Fp = 0.0;
  p.eta = 0.0;
  const double T = p.period();
  const MonodromyResult m = monodromy(p);
  double mods[3];
  for (int i = 0; i < 3; ++i) mods[i] = std::abs(m.multipliers[i]);
  std::sort(mods, mods + 3);
  // Decoupled limit: oscillator pair at exp(-gamma*T/2), filter at exp(-T/tau).
  const double err_osc = std::max(rel_err(mods[1], std::exp(-0.5 * p.gamma * T)),
                                  rel_err(mods[2], std::exp(-0.5 * p.gamma * T)));
  const double err_fil = rel_err(mods[0], std::exp(-T / p.tau));

  double err_gain = 0.0;
  for (double phi : {0.0, 0.7, 1.9, 3.0}) {
    err_gain = std::max(err_gain, rel_err(gain_avg(p, phi), 1.0));
    err_gain = std::max(err_gain, rel_err(gain_hbm(p, phi), 1.0));
    err_gain = std::max(err_gain, rel_err(gain_ft(p, phi), 1.0));
  }
  detail = fmt("multiplier moduli rel err %.2e/%.2e, unit-gain rel err %.2e",
               err_osc, err_fil, err_gain);
  return err_osc < 1e-9 && err_fil < 1e-9 && err_gain < 1e-9;
}

bool check_threshold_agreement(std::string& detail) {
  const ResonatorParams p = standard_params();
  const double th_avg = threshold_avg(p).second;
  const double th_hbm = threshold_hbm(p).second;
  const ThresholdFt th_ft = threshold_ft(p, {0.5 * th_hbm, 2.0 * th_hbm});
  const double gap_hbm_ft = rel_err(th_hbm, th_ft.Fp);
  const double gap_avg_ft = rel_err(th_avg, th_ft.Fp);
  // All three sit within 2e-5 of 2*gamma*omega; the leading split between
  // the resonant balance and the exact Floquet answer is genuinely ~7e-4.
  const double anchor = 2.0 * p.gamma * p.omega;
  const double worst_abs = std::max({std::abs(th_avg - anchor), std::abs(th_hbm - anchor),
                                     std::abs(th_ft.Fp - anchor)});
  detail = fmt("Fp+: avg %.6e, hbm %.6e, floquet %.6e; worst |Fp - 2 gamma omega| %.1e (tol 2e-5), hbm-ft gap %.1e (tol 2e-3), avg-ft gap %.1e (tol 2e-2)",
               th_avg, th_hbm, th_ft.Fp, worst_abs, gap_hbm_ft, gap_avg_ft);
  return worst_abs < 2e-5 && gap_hbm_ft < 2e-3 && gap_avg_ft < 2e-2 &&
         th_ft.at_threshold.classification == BifurcationKind::saddle_node;
}

bool check_gain_agreement(std::string& detail) {
  ResonatorParams p = standard_params();
  p.Fp = -0.02;
  double gap_hbm = 0.0;
  double gap_avg = 0.0;
  for (double phi : {0.0, 0.5, 1.1, 1.57, 2.3, 3.0}) {
    const double g_lat = gain_ft(p, phi);
    gap_hbm = std::max(gap_hbm, rel_err(gain_hbm(p, phi), g_lat));
    gap_avg = std::max(gap_avg, rel_err(gain_avg(p, phi), g_lat));
  }
  const GainExtrema ea = gain_extrema_avg(p);
  const GainExtrema2 eh = gain_extrema_hbm(p);
  const double gap_min = rel_err(ea.gmin, eh.gmin);
  const double gap_max = rel_err(ea.gmax, eh.gmax);
  // The averaged form shifts the deep notch phase by O(1/(omega tau)), so
  // its pointwise relative error peaks near the notch even though the
  // extrema agree to 1e-5; 5e-2 reflects that, not a looseness in hbm.
  detail = fmt("phase gains: hbm-lattice gap %.1e (tol 1e-3), avg-lattice gap %.1e (tol 5e-2); extrema gaps %.1e/%.1e (tol 1e-2)",
               gap_hbm, gap_avg, gap_min, gap_max);
  return gap_hbm < 1e-3 && gap_avg < 5e-2 && gap_min < 1e-2 && gap_max < 1e-2;
}

bool check_hopf_cross_form(std::string& detail) {
  const ResonatorParams p = standard_params();
  const HopfPoint pt = find_hopf(p);
  const double char_abs = std::abs(hopf_characteristic(p, pt.Fp, pt.Delta));
  const MonodromyResult at_line = monodromy([&] {
    ResonatorParams q = p;
    q.Fp = pt.Fp;
    return q;
  }());
  const ThresholdFt ft = threshold_ft(p, {1.3 * pt.Fp, 0.7 * pt.Fp});
  const double fp_gap = rel_err(pt.Fp, ft.Fp);
  bool has_pair = false;
  for (const auto& mu : at_line.multipliers) has_pair = has_pair || mu.imag() != 0.0;
  detail = fmt("Fp %.5e Delta %.5e, |characteristic| %.1e (tol 1e-9), |mu|max-1 %.1e (tol 1e-3), floquet Fp gap %.1e (tol 2e-2), floquet label %s",
               pt.Fp, pt.Delta, char_abs, std::abs(at_line.max_modulus - 1.0),
               fp_gap, ft.at_threshold.classification_label().c_str());
  return char_abs < 1e-9 && std::abs(at_line.max_modulus - 1.0) < 1e-3 && has_pair &&
         fp_gap < 2e-2 && ft.at_threshold.classification == BifurcationKind::hopf;
}

bool check_quadrature_identities(std::string& detail) {
  ResonatorParams p = standard_params();
  p.Fp = -0.02;
  const double D = 3.08e-8;
  double worst = 0.0;
  for (GreensMethod m : {GreensMethod::perturbative, GreensMethod::lattice}) {
    const QuadratureStats s = quadrature_covariance(p, D, m);
    worst = std::max(worst, rel_err(s.sigma_plus2 + s.sigma_minus2,
                                    s.sigma_c2 + s.sigma_s2));
    worst = std::max(worst, rel_err(s.sigma_plus2 * s.sigma_minus2,
                                    s.sigma_c2 * s.sigma_s2 - s.sigma_cs * s.sigma_cs));
    if (!(s.sigma_minus2 > 0.0) || s.sigma_plus2 < s.sigma_minus2) {
      detail = "diagonalized variances lost positivity or ordering";
      return false;
    }
  }
  const QuadratureStats lat = quadrature_covariance(p, D, GreensMethod::lattice);
  const QuadratureStats pert = quadrature_covariance(p, D, GreensMethod::perturbative);
  const double method_gap = rel_err(lat.sigma_c2, pert.sigma_c2);

  // Zero-frequency lock-in spectra are tied to the stationary covariances.
  const auto [sx0, sy0] = nsd_lockin(p, D, 0.0);
  const double lockin_gap =
      std::max(rel_err(2.0 * std::numbers::pi * sx0, lat.sigma_c2),
               rel_err(2.0 * std::numbers::pi * sy0, lat.sigma_s2));

  // Plain degenerate amplification squeezes the cosine quadrature for Fp > 0.
  // The resonant two-site form has sigma_cs = 0 exactly; the full lattice
  // keeps a tiny tilt from the nonresonant +-3 omega sites.
  ResonatorParams plain = standard_params();
  plain.eta = 0.0;
  plain.Fp = 1e-3;
  const QuadratureStats sq2 = quadrature_covariance(plain, D, GreensMethod::perturbative);
  const QuadratureStats sqL = quadrature_covariance(plain, D, GreensMethod::lattice);
  const bool squeezed = sq2.sigma_c2 < sq2.sigma_s2 && sqL.sigma_c2 < sqL.sigma_s2 &&
                        std::abs(sq2.sigma_cs) < 1e-12 * sq2.sigma_s2 &&
                        std::abs(sqL.sigma_cs) < 1e-3 * sqL.sigma_s2;

  detail = fmt("diagonalization identity err %.1e (tol 1e-12), method gap %.1e (tol 1e-3), lockin S(0) gap %.1e (tol 1e-10), plain-pump cosine squeezed %s",
               worst, method_gap, lockin_gap, squeezed ? "yes" : "no");
  return worst < 1e-12 && method_gap < 1e-3 && lockin_gap < 1e-10 && squeezed;
}

bool check_reality_symmetry(std::string& detail) {
  ResonatorParams p = standard_params();
  p.Fp = -0.02;
  double worst = 0.0;
  for (double nu : {0.3, 1.0, 2.2}) {
    const AlphaBeta ab_p = alpha_beta(p, nu);
    const AlphaBeta ab_m = alpha_beta(p, -nu);
    worst = std::max(worst, rel_err(ab_m.alpha, std::conj(ab_p.alpha)));
    worst = std::max(worst, rel_err(susceptibility(p, -nu), std::conj(susceptibility(p, nu))));
    for (GreensMethod m : {GreensMethod::perturbative, GreensMethod::lattice}) {
      GreensTriplet gp, gm;
      if (m == GreensMethod::perturbative) {
        gp = greens_perturbative(p, nu);
        gm = greens_perturbative(p, -nu);
      } else {
        gp = greens_lattice_converged(p, nu).triplet;
        gm = greens_lattice_converged(p, -nu).triplet;
      }
      worst = std::max(worst, rel_err(gm.g0, std::conj(gp.g0)));
      worst = std::max(worst, rel_err(gp.gplus, std::conj(gm.gminus)));
    }
  }
  detail = fmt("max rel asymmetry %.2e (tol 1e-10)", worst);
  return worst < 1e-10;
}

bool check_reduction_k1(std::string& detail) {
  ResonatorParams p = standard_params();
  p.Fp = -0.02;
  double worst = 0.0;
  for (double nu : {0.3, 0.9, 1.0, 1.7, 2.5}) {
    const GreensTriplet closed = greens_perturbative(p, nu);
    const GreensTriplet lat = greens_lattice(p, nu, 1).triplet;
    worst = std::max({worst, rel_err(closed.g0, lat.g0),
                      rel_err(closed.gplus, lat.gplus),
                      rel_err(closed.gminus, lat.gminus)});
  }
  detail = fmt("max rel gap closed form vs K=1 lattice %.2e (tol 1e-13)", worst);
  return worst < 1e-13;
}

bool check_lattice_convergence(std::string& detail) {
  ResonatorParams p = standard_params();
  p.Fp = -0.02;
  int worst_k = 0;
  bool all_converged = true;
  for (double nu : {0.1, 0.5, 1.0, 1.5, 3.0}) {
    const LatticeGreens lat = greens_lattice_converged(p, nu);
    worst_k = std::max(worst_k, lat.K);
    all_converged = all_converged && lat.converged;
  }
  detail = fmt("converged everywhere with K <= %d (tol 12)", worst_k);
  return all_converged && worst_k <= 12;
}

bool check_slowflow_fixed_point(std::string& detail) {
  ResonatorParams p = standard_params();
  p.Fp = -0.02;
  DriveSignal d;
  d.Fs = 1e-3;
  d.omega_s = p.omega;
  d.phi0 = 0.7;
  const SlowState target = fixed_point(p, d.Fs, d.phi0);
  const double rate =
      (0.5 * std::abs(p.Fp) + p.gamma * p.omega + 2.0 * std::abs(p.eta)) / (2.0 * p.omega);
  const double dt = 2.0 * std::numbers::pi / (60.0 * std::max(rate, 1.0 / p.tau));
  const SlowSeries run = integrate_slowflow(p, d, SlowState{}, 0.0, 30.0 / p.gamma, dt);
  if (run.diverged_index) {
    detail = "slow flow diverged below threshold";
    return false;
  }
  const SlowState& end = run.states.back();
  const double scale = std::max({std::abs(target.u), std::abs(target.v),
                                 std::abs(target.z), 1e-300});
  const double gap = std::max({std::abs(end.u - target.u), std::abs(end.v - target.v),
                               std::abs(end.z - target.z)}) / scale;
  detail = fmt("relaxed to the algebraic fixed point within %.2e relative (tol 1e-6)", gap);
  return gap < 1e-6;
}

bool check_scan_smoke(std::string& detail, int threads) {
  const ResonatorParams p = standard_params();
  const std::vector<double> grid{0.995, 1.0, 1.005};
  const auto scan = threshold_scan(p, grid, {{5e-4, 5e-3}}, 2048, threads);
  for (const ScanPoint& pt : scan) {
    if (!pt.error.empty() || !pt.Fp || pt.classification != "saddle-node") {
      detail = fmt("scan point omega=%.3f failed: %s", pt.omega,
                   pt.error.empty() ? pt.classification.c_str() : pt.error.c_str());
      return false;
    }
  }
  detail = fmt("3/3 points bracketed, all saddle-node, Fp+(resonance) %.4e",
               scan[1].Fp.value());
  return true;
}

bool check_temperature_ratio_limits(std::string& detail) {
  ResonatorParams bare = standard_params();
  bare.eta = 0.0;
  const double unit = effective_temperature_ratio(bare);
  ResonatorParams p = standard_params();
  p.Fp = -0.02;
  const double cooled = effective_temperature_ratio(p);
  detail = fmt("bare ratio %.15f (tol 1e-12 from 1), cooled ratio %.4f (< 1 expected)",
               unit, cooled);
  return std::abs(unit - 1.0) < 1e-12 && cooled < 1.0;
}

bool check_em_determinism(std::string& detail) {
  ResonatorParams p = standard_params();
  p.Fp = -0.01;
  NoiseSpec n;
  n.D = 1e-6;
  n.seed = 42;
  const TimeSeries a = integrate_stochastic(p, n, 0.0, 50.0);
  const TimeSeries b = integrate_stochastic(p, n, 0.0, 50.0);
  n.seed = 43;
  const TimeSeries c = integrate_stochastic(p, n, 0.0, 50.0);
  if (a.samples.size() != b.samples.size()) {
    detail = "same seed produced different sample counts";
    return false;
  }
  bool identical = true;
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    identical = identical && a.samples[i].x == b.samples[i].x &&
                a.samples[i].xdot == b.samples[i].xdot &&
                a.samples[i].z == b.samples[i].z;
  bool distinct = false;
  for (std::size_t i = 0; i < std::min(a.samples.size(), c.samples.size()); ++i)
    distinct = distinct || a.samples[i].x != c.samples[i].x;
  detail = fmt("same seed bit-identical: %s; different seed differs: %s",
               identical ? "yes" : "no", distinct ? "yes" : "no");
  return identical && distinct;
}

bool check_lockin_reproduces_z(std::string& detail) {
  ResonatorParams p = standard_params();
  p.Fp = -0.01;
  NoiseSpec n;
  n.D = 1e-6;
  n.seed = 7;
  const TimeSeries run = integrate_stochastic(p, n, 0.0, 300.0);
  const QuadratureSamples q = software_lockin(run, p.omega, p.tau);
  double zmax = 0.0;
  for (const StateVector& s : run.samples) zmax = std::max(zmax, std::abs(s.z));
  double gap = 0.0;
  for (std::size_t i = 0; i < run.samples.size(); ++i)
    gap = std::max(gap, std::abs(q.XL[i] - run.samples[i].z));
  detail = fmt("max |XL - z| = %.2e against |z|max = %.2e (tol 1e-8 relative)", gap, zmax);
  return gap <= 1e-8 * std::max(zmax, 1e-300);
}

bool check_welch_sine_parseval(std::string& detail) {
  const double dt = 0.01;
  const std::size_t L = 4096;
  const std::size_t N = 3 * L;
  const double A = 2.0;
  const double nu0 = 77.5 * 2.0 * std::numbers::pi / (static_cast<double>(L) * dt);
  std::vector<double> x(N);
  for (std::size_t j = 0; j < N; ++j)
    x[j] = A * std::cos(nu0 * dt * static_cast<double>(j) + 0.3);
  const SpectrumSeries s = welch_nsd(x, dt, L, 0.5);
  const double dnu = s.nu[1] - s.nu[0];
  double total = s.S.front() + s.S.back();
  for (std::size_t k = 1; k + 1 < s.S.size(); ++k) total += 2.0 * s.S[k];
  total *= dnu / (2.0 * std::numbers::pi);
  const double grid_err = rel_err(s.nu.back(), std::numbers::pi / dt);
  detail = fmt("two-sided power %.6f vs A^2/2 = %.6f (tol 1e-4), Nyquist grid err %.1e",
               total, 0.5 * A * A, grid_err);
  return rel_err(total, 0.5 * A * A) < 1e-4 && grid_err < 1e-12;
}

double stationary_var_x(const TimeSeries& run) {
  const std::size_t half = run.samples.size() / 2;
  double mean = 0.0;
  for (std::size_t i = half; i < run.samples.size(); ++i) mean += run.samples[i].x;
  mean /= static_cast<double>(run.samples.size() - half);
  double var = 0.0;
  for (std::size_t i = half; i < run.samples.size(); ++i) {
    const double d = run.samples[i].x - mean;
    var += d * d;
  }
  return var / static_cast<double>(run.samples.size() - half - 1);
}

bool check_equipartition(std::string& detail) {
  ResonatorParams p;
  p.omega0 = 1.0;
  p.omega = 1.0;
  p.gamma = 0.01;
  p.tau = 100.0;
  NoiseSpec n;
  n.D = 1e-5;
  IntegrationOptions opts;
  opts.record_stride = 10;
  // The energy autocorrelation time is 1/gamma, so a single 4e4 run carries
  // roughly 14% relative standard deviation on var(x). Pool four seeds and
  // test against three standard errors estimated from the seed scatter.
  std::array<double, 4> vars{};
  for (std::size_t i = 0; i < vars.size(); ++i) {
    n.seed = 2026 + i;
    vars[i] = stationary_var_x(integrate_stochastic(p, n, 0.0, 4e4, 0.0, opts));
  }
  double pooled = 0.0;
  for (double v : vars) pooled += v;
  pooled /= static_cast<double>(vars.size());
  double scatter = 0.0;
  for (double v : vars) scatter += (v - pooled) * (v - pooled);
  const double se = std::sqrt(scatter / (vars.size() - 1)) / std::sqrt(double(vars.size()));
  const double expected = n.D / (p.gamma * p.omega0 * p.omega0);
  const double bound = std::max(3.0 * se, 0.12 * expected);
  bool singles_ok = true;
  for (double v : vars) singles_ok = singles_ok && rel_err(v, expected) < 0.3;
  detail = fmt("pooled var(x) %.3e vs D/(gamma*omega0^2) = %.3e, |gap| %.2e vs bound %.2e, worst single-seed rel %.2f (tol 0.30)",
               pooled, expected, std::abs(pooled - expected), bound,
               std::max({rel_err(vars[0], expected), rel_err(vars[1], expected),
                         rel_err(vars[2], expected), rel_err(vars[3], expected)}));
  return singles_ok && std::abs(pooled - expected) <= bound;
}

bool check_high_q_stability(std::string& detail) {
  ResonatorParams p = standard_params();
  p.eta = 0.0;
  NoiseSpec n;
  n.D = 3.08e-8;
  n.seed = 11;
  IntegrationOptions opts;
  opts.record_stride = 20;
  const TimeSeries run = integrate_stochastic(p, n, 0.0, 5000.0, 0.0, opts);
  if (run.diverged_index) {
    detail = "bare high-Q run diverged: drift scheme is unstable at this step size";
    return false;
  }
  const std::size_t half = run.samples.size() / 2;
  double var = 0.0;
  for (std::size_t i = half; i < run.samples.size(); ++i)
    var += run.samples[i].x * run.samples[i].x;
  var /= static_cast<double>(run.samples.size() - half);
  const double expected = n.D / (p.gamma * p.omega0 * p.omega0);
  detail = fmt("Q=1000 var(x) %.2e vs equilibrium %.2e (tol factor 10)", var, expected);
  return var < 10.0 * expected && var > 0.1 * expected;
}

bool check_model_identities(std::string& detail) {
  ResonatorParams p = standard_params();
  p.Fp = -0.02;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unu(-4.0, 4.0);
  double worst_chi = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double nu = unu(rng);
    worst_chi = std::max(worst_chi,
                         rel_err(susceptibility(p, -nu), std::conj(susceptibility(p, nu))));
  }
  std::uniform_real_distribution<double> ut(0.0, 50.0);
  double worst_tr = 0.0;
  for (int i = 0; i < 100; ++i) {
    Mat3 A = system_matrix(p, ut(rng));
    worst_tr = std::max(worst_tr, std::abs(A.trace() - (-p.gamma - 1.0 / p.tau)));
  }
  ResonatorParams q = p;
  q.eta = 0.0;
  double worst_dec = 0.0;
  for (int i = 0; i < 100; ++i) {
    Mat3 A = system_matrix(q, ut(rng));
    worst_dec = std::max({worst_dec, std::abs(A[0][2]), std::abs(A[1][2])});
  }
  detail = fmt("chi reality %.1e (tol 1e-15), trace defect %.1e (tol 1e-15), eta=0 coupling %.1e (exact)",
               worst_chi, worst_tr, worst_dec);
  return worst_chi < 1e-15 && worst_tr < 1e-15 && worst_dec == 0.0;
}

bool check_slowflow_identities(std::string& detail) {
  ResonatorParams p = standard_params();
  p.Fp = -0.02;
  // Dense phase grid against the closed-form extrema. The grid resolution
  // limits agreement, not the formulas, so the tolerance is loose.
  const GainExtrema ex = gain_extrema_avg(p);
  double gmin = std::numeric_limits<double>::infinity();
  double gmax = 0.0;
  const int n = 7200;
  for (int i = 0; i < n; ++i) {
    const double g = gain_avg(p, std::numbers::pi * i / n);
    gmin = std::min(gmin, g);
    gmax = std::max(gmax, g);
  }
  const double extrema_gap = std::max(rel_err(gmin, ex.gmin), rel_err(gmax, ex.gmax));

  // The stationary thresholds must zero the fixed-point denominator, on
  // and off pump-cavity resonance.
  double worst_den = 0.0;
  for (double w : {1.0, 1.002}) {
    ResonatorParams q = p;
    q.omega = w;
    const auto roots = threshold_avg(q);
    const double Om = q.detuning();
    for (double fp : {roots.first, roots.second}) {
      const double u = 0.5 * fp;
      worst_den = std::max(worst_den,
                           std::abs((u + q.gamma * q.omega + q.eta) * (u - q.gamma * q.omega) -
                                    Om * Om));
    }
  }

  double worst_per = 0.0;
  for (double phi : {0.3, 1.1, 2.9})
    worst_per = std::max(worst_per, rel_err(gain_avg(p, phi), gain_avg(p, phi + std::numbers::pi)));

  // Linear response: the fixed point scales with the drive amplitude.
  double worst_lin = 0.0;
  const SlowState ref = fixed_point(p, 1.0, 0.7);
  const double rr = std::hypot(ref.u, ref.v);
  const double ra = std::atan2(ref.v, ref.u);
  for (double fs : {1e-6, 1e6}) {
    const SlowState s = fixed_point(p, fs, 0.7);
    worst_lin = std::max(worst_lin, rel_err(std::hypot(s.u, s.v) / fs, rr));
    worst_lin = std::max(worst_lin, std::abs(std::atan2(s.v, s.u) - ra));
    worst_lin = std::max(worst_lin, rel_err(s.z / fs, ref.z));
  }
  detail = fmt("grid extrema gap %.1e (tol 1e-3), threshold denominator %.1e (tol 1e-12), pi-periodicity %.1e (tol 1e-12), drive linearity %.1e (tol 1e-12)",
               extrema_gap, worst_den, worst_per, worst_lin);
  return extrema_gap < 1e-3 && worst_den < 1e-12 && worst_per < 1e-12 && worst_lin < 1e-12;
}

bool check_hbm_identities(std::string& detail) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ug(1e-4, 1e-2);
  std::uniform_real_distribution<double> utau(10.0, 1000.0);
  std::uniform_real_distribution<double> uw(0.8, 1.2);
  std::uniform_real_distribution<double> ueta(0.0, 2.0);
  std::uniform_real_distribution<double> ufp(-0.05, 0.05);
  std::uniform_real_distribution<double> uphi(0.0, 2.0 * std::numbers::pi);
  double worst_struct = 0.0, worst_gain = 0.0, worst_det = 0.0, worst_flip = 0.0;
  int accepted = 0;
  const cplx I(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    ResonatorParams p;
    p.omega0 = 1.0;
    p.gamma = ug(rng);
    p.tau = utau(rng);
    p.omega = uw(rng);
    p.eta = ueta(rng);
    p.Fp = ufp(rng);
    const double phi = uphi(rng);
    const double det = det_m(p);
    const double chi_abs = std::abs(susceptibility(p, p.omega));
    const double fe = p.Fp + p.eta;
    const double scale = std::abs(det) + 0.5 * chi_abs * chi_abs * fe * fe + 1.0;
    if (std::abs(det) < 1e-6 * scale) continue;
    ++accepted;
    DriveSignal d;
    d.Fs = 1.0;
    d.omega_s = p.omega;
    auto at = [&](double ph) {
      DriveSignal dd = d;
      dd.phi0 = wrap_angle(ph);
      return hbm_response(p, dd).A_x;
    };
    // Any response is a two-sideband combination P e^{-i phi} + Q e^{i phi}.
    const cplx A0 = at(0.0);
    const cplx A90 = at(0.5 * std::numbers::pi);
    const cplx P = 0.5 * (A0 + I * A90);
    const cplx Q = 0.5 * (A0 - I * A90);
    const cplx Aphi = at(phi);
    worst_struct = std::max(worst_struct,
                            rel_err(Aphi, P * std::exp(-I * phi) + Q * std::exp(I * phi)));
    worst_flip = std::max(worst_flip, rel_err(at(phi + std::numbers::pi), -Aphi));
    worst_gain = std::max(worst_gain, rel_err(std::abs(Aphi), gain_hbm(p, phi) * chi_abs));
    d.phi0 = wrap_angle(phi);
    worst_det = std::max(worst_det, rel_err(hbm_response(p, d).detM, det));
  }

  // eta = 0 removes the lock-in from the balance entirely.
  double worst_tau = 0.0;
  {
    ResonatorParams p = standard_params();
    p.eta = 0.0;
    p.tau = 10.0;
    const auto a = threshold_hbm(p);
    p.tau = 1000.0;
    const auto b = threshold_hbm(p);
    worst_tau = std::max(rel_err(a.first, b.first), rel_err(a.second, b.second));
  }

  // End-to-end convention check: project a settled trajectory onto the
  // drive harmonic. The converged lattice must match to integration
  // accuracy; the resonant balance carries a genuine truncation error of
  // order 1/(omega tau)^2 at these deliberately harsh parameters.
  double conv_hbm = 0.0;
  double conv_lat = 0.0;
  {
    ResonatorParams p;
    p.omega0 = 1.0;
    p.omega = 1.0;
    p.gamma = 0.01;
    p.tau = 10.0;
    p.eta = 1.0;
    p.Fp = 0.01;
    DriveSignal d;
    d.Fs = 1e-3;
    d.omega_s = 1.0;
    d.phi0 = 0.9;
    const int per = 400;
    const double dt = 2.0 * std::numbers::pi / per;
    const TimeSeries run = integrate_deterministic(p, d, StateVector{}, 0.0, 6000.0, dt);
    const std::size_t nwin = 100 * per;
    const std::size_t off = run.samples.size() - nwin;
    cplx acc = 0.0;
    for (std::size_t j = 0; j < nwin; ++j) {
      const double t = run.time_at(off + j);
      acc += run.samples[off + j].x * cplx(std::cos(t), std::sin(t));
    }
    const cplx A_meas = 2.0 * acc / static_cast<double>(nwin);
    conv_hbm = rel_err(A_meas, hbm_response(p, d).A_x);
    const GreensTriplet g = greens_lattice_converged(p, p.omega).triplet;
    const cplx A_lat = d.Fs * std::exp(-I * d.phi0) *
                       (g.g0 + g.gplus * std::exp(2.0 * I * d.phi0));
    conv_lat = rel_err(A_meas, A_lat);
  }

  detail = fmt("accepted %d/1000, sideband structure %.1e (tol 1e-9), sign flip %.1e (tol 1e-9), gain coherence %.1e (tol 1e-12), detM %.1e (tol 1e-9), eta=0 tau dependence %.1e (tol 1e-15), projection gap lattice %.1e (tol 1e-4) hbm %.1e (tol 0.05)",
               accepted, worst_struct, worst_flip, worst_gain, worst_det, worst_tau,
               conv_lat, conv_hbm);
  return accepted >= 800 && worst_struct < 1e-9 && worst_flip < 1e-9 &&
         worst_gain < 1e-12 && worst_det < 1e-9 && worst_tau < 1e-15 &&
         conv_lat < 1e-4 && conv_hbm < 0.05;
}

bool check_liouville_product_100(std::string& detail) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ug(1e-4, 1e-2);
  std::uniform_real_distribution<double> utau(10.0, 1000.0);
  std::uniform_real_distribution<double> uw(0.8, 1.2);
  std::uniform_real_distribution<double> ufp(-0.05, 0.05);
  std::uniform_real_distribution<double> ueta(0.0, 2.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    ResonatorParams p;
    p.omega0 = 1.0;
    p.gamma = ug(rng);
    p.tau = utau(rng);
    p.omega = uw(rng);
    p.Fp = ufp(rng);
    p.eta = ueta(rng);
    const MonodromyResult m = monodromy(p, 2048);
    const cplx prod = m.multipliers[0] * m.multipliers[1] * m.multipliers[2];
    const double exact =
        std::exp(-2.0 * std::numbers::pi * (p.gamma + 1.0 / p.tau) / p.omega);
    worst = std::max(worst, std::abs(prod - exact) / exact);
  }
  detail = fmt("worst multiplier-product defect over 100 draws %.2e (tol 1e-7)", worst);
  return worst < 1e-7;
}

bool check_liouville_order4(std::string& detail) {
  ResonatorParams p = standard_params();
  p.Fp = -0.02;
  // Richardson ratio on the monodromy entries. The determinant is no use
  // here: its per-step defect oscillates and cancels over the period,
  // which makes it superconverge past order 4.
  auto mono_at = [&](int steps) { return monodromy(p, steps).monodromy; };
  const Mat3 m256 = mono_at(256);
  const Mat3 m512 = mono_at(512);
  const Mat3 m1024 = mono_at(1024);
  Mat3 coarse = m256 + (-1.0) * m512;
  Mat3 fine = m512 + (-1.0) * m1024;
  double nc = 0.0, nf = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      nc = std::max(nc, std::abs(coarse[i][j]));
      nf = std::max(nf, std::abs(fine[i][j]));
    }
  const double ratio = nc / nf;
  detail = fmt("monodromy entry differences %.2e / %.2e, Richardson ratio %.1f (expect 16, window [12,20])",
               nc, nf, ratio);
  return ratio > 12.0 && ratio < 20.0;
}

bool check_multiplier_continuity(std::string& detail) {
  ResonatorParams p = standard_params();
  std::array<cplx, 3> prev{};
  bool first = true;
  double worst = 0.0;
  static constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                      {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (double fp = -0.043; fp <= 0.0021 + 1e-12; fp += 1e-4) {
    p.Fp = fp;
    const MonodromyResult m = monodromy(p, 512);
    if (!first) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& perm : perms) {
        double cost = 0.0;
        for (int k = 0; k < 3; ++k)
          cost = std::max(cost, std::abs(m.multipliers[perm[k]] - prev[k]));
        best = std::min(best, cost);
      }
      worst = std::max(worst, best);
    }
    prev = m.multipliers;
    first = false;
  }
  detail = fmt("largest matched multiplier jump along the pump sweep %.2e (tol 0.05)", worst);
  return worst < 0.05;
}

bool check_classical_limit(std::string& detail) {
  double worst = 0.0;
  for (const auto& [g, w] : std::array<std::pair<double, double>, 3>{
           {{1e-3, 1.0}, {1e-2, 1.2}, {2e-4, 0.7}}}) {
    ResonatorParams p;
    p.omega0 = w;
    p.omega = w;
    p.gamma = g;
    p.tau = 100.0;
    p.eta = 0.0;
    p.Fp = 2.0 * g * w;
    worst = std::max({worst, std::abs(gain_extrema_avg(p).gmin - 0.5),
                      std::abs(gain_extrema_hbm(p).gmin - 0.5)});
  }
  detail = fmt("deamplification at the bare-pump threshold: worst |Gmin - 1/2| %.2e (tol 1e-6)", worst);
  return worst < 1e-6;
}

bool check_squeeze_baseline(std::string& detail) {
  ResonatorParams p = standard_params();
  p.eta = 0.0;
  const double D = 3.08e-8;
  const double base = 2.0 * std::numbers::pi * D * std::norm(susceptibility(p, p.omega));
  double worst_base = 0.0;
  for (GreensMethod m : {GreensMethod::perturbative, GreensMethod::lattice}) {
    const QuadratureStats qs = quadrature_covariance(p, D, m);
    worst_base = std::max({worst_base, rel_err(qs.sigma_c2, base), rel_err(qs.sigma_s2, base),
                           std::abs(qs.sigma_cs) / base});
  }

  // eta = 0 collapses the lattice couplings to the bare pump.
  ResonatorParams q = p;
  q.eta = 0.0;
  q.Fp = 1.3e-3;
  double worst_ab = 0.0;
  for (double nu : {0.2, 1.0, 1.9}) {
    const AlphaBeta ab = alpha_beta(q, nu);
    worst_ab = std::max(worst_ab, std::abs(ab.alpha - 1.0));
    worst_ab = std::max(worst_ab,
                        rel_err(ab.beta, cplx(0.0, 0.5) * susceptibility(q, nu) * q.Fp));
  }

  // Squeezed-variance limit 1/4 approached from below threshold. The
  // two-site law is exact for the perturbative form; the lattice keeps
  // nonresonant corrections of order (chi(3w) Fp/2)^2 ~ 1e-8.
  const double eps_th = 1e-3;
  q.Fp = 2.0 * q.gamma * q.omega * (1.0 - eps_th);
  const double expect = 1.0 / ((2.0 - eps_th) * (2.0 - eps_th));
  double worst_lim = 0.0;
  for (GreensMethod m : {GreensMethod::perturbative, GreensMethod::lattice}) {
    const QuadratureStats qs = quadrature_covariance(q, D, m);
    worst_lim = std::max(worst_lim, rel_err(qs.sigma_minus2 / base, expect));
  }

  // Diagonalization determinant identity on random stable draws.
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ug(1e-4, 1e-2);
  std::uniform_real_distribution<double> utau(10.0, 1000.0);
  std::uniform_real_distribution<double> uw(0.8, 1.2);
  std::uniform_real_distribution<double> ueta(0.0, 2.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int accepted = 0;
  double worst_det = 0.0;
  for (int i = 0; i < 1000 && accepted < 1000; ++i) {
    ResonatorParams r;
    r.omega0 = 1.0;
    r.gamma = ug(rng);
    r.tau = utau(rng);
    r.omega = uw(rng);
    r.eta = ueta(rng);
    const auto th = threshold_avg(r);
    const double cap_pos = 0.8 * th.second;
    const double cap_neg =
        -0.8 * std::min(-th.first, 2.0 * r.gamma * r.omega + 4.0 * r.omega / r.tau);
    r.Fp = cap_neg + u01(rng) * (cap_pos - cap_neg);
    if (det_m(r) <= 0.0) continue;
    if (monodromy(r, 512).max_modulus >= 1.0 - 1e-9) continue;
    QuadratureStats qs;
    try {
      qs = quadrature_covariance(r, 1e-8, GreensMethod::perturbative);
    } catch (const Error&) {
      continue;
    }
    const double mid = 0.5 * (qs.sigma_c2 + qs.sigma_s2);
    const double lhs = qs.sigma_plus2 * qs.sigma_minus2;
    const double rhs = qs.sigma_c2 * qs.sigma_s2 - qs.sigma_cs * qs.sigma_cs;
    worst_det = std::max(worst_det, std::abs(lhs - rhs) / (mid * mid));
    ++accepted;
  }

  detail = fmt("flat baseline gap %.1e (tol 1e-12), eta=0 couplings %.1e (tol 1e-14), squeezed limit gap %.1e (tol 1e-6), determinant defect %.1e over %d draws (tol 64 eps)",
               worst_base, worst_ab, worst_lim, worst_det, accepted);
  return worst_base < 1e-12 && worst_ab < 1e-14 && worst_lim < 1e-6 &&
         worst_det < 64.0 * std::numeric_limits<double>::epsilon() && accepted >= 600;
}

bool check_nsd_method_agreement(std::string& detail) {
  ResonatorParams p = standard_params();
  p.Fp = -0.02;
  const double D = 1e-8;
  const int n = 601;
  const double lo = p.omega - 30.0 * p.gamma;
  const double hi = p.omega + 30.0 * p.gamma;
  std::vector<double> nus(n), slat(n), spert(n);
  for (int i = 0; i < n; ++i) {
    nus[i] = lo + (hi - lo) * i / (n - 1);
    slat[i] = nsd(p, D, nus[i], GreensMethod::lattice);
    spert[i] = nsd(p, D, nus[i], GreensMethod::perturbative);
  }
  // Mask the two tallest local maxima; tips are controlled by resonant
  // denominators where any higher-order shift is amplified.
  std::vector<int> tips;
  for (int i = 1; i + 1 < n; ++i)
    if (slat[i] > slat[i - 1] && slat[i] > slat[i + 1]) tips.push_back(i);
  std::sort(tips.begin(), tips.end(), [&](int a, int b) { return slat[a] > slat[b]; });
  if (tips.size() > 2) tips.resize(2);
  double worst_db = 0.0;
  int used = 0;
  for (int i = 0; i < n; ++i) {
    bool masked = false;
    for (int tip : tips) masked = masked || std::abs(nus[i] - nus[tip]) <= 3.0 * p.gamma;
    if (masked) continue;
    ++used;
    worst_db = std::max(worst_db, std::abs(10.0 * std::log10(slat[i] / spert[i])));
  }
  detail = fmt("max |lattice/perturbative| NSD gap %.3f dB over %d of %d points, %zu tips masked (tol 0.5 dB)",
               worst_db, used, n, tips.size());
  return worst_db < 0.5 && used > 500;
}

bool check_rk4_order(std::string& detail) {
  ResonatorParams p = standard_params();
  p.Fp = -0.042;
  DriveSignal d;
  d.Fs = 0.0;
  d.omega_s = 1.0;
  StateVector s0;
  s0.x = 0.05;
  const double t1 = 40.0 * p.period();
  auto end_state = [&](double dt) {
    const TimeSeries run = integrate_deterministic(p, d, s0, 0.0, t1, dt);
    return run.samples.back();
  };
  const double dt0 = 2.0 * std::numbers::pi / 200.0;
  const StateVector a = end_state(dt0);
  const StateVector b = end_state(0.5 * dt0);
  const StateVector c = end_state(0.25 * dt0);
  auto dist = [](const StateVector& u, const StateVector& v) {
    return std::max({std::abs(u.x - v.x), std::abs(u.xdot - v.xdot), std::abs(u.z - v.z)});
  };
  const double e_coarse = dist(a, b);
  const double e_fine = dist(b, c);
  const double ratio = e_coarse / e_fine;
  detail = fmt("end-state self-convergence %.2e / %.2e, ratio %.1f (expect 16, window [12,20])",
               e_coarse, e_fine, ratio);
  return ratio > 12.0 && ratio < 20.0;
}

bool check_welch_matches_nsd(std::string& detail) {
  ResonatorParams p;
  p.omega0 = 1.0;
  p.omega = 1.0;
  p.gamma = 0.01;
  p.tau = 10.0;
  p.eta = 1.0;
  p.Fp = 0.01;
  NoiseSpec n;
  n.D = 1e-6;
  n.seed = 99;
  const double dt = 2.0 * std::numbers::pi / 1000.0;
  IntegrationOptions opts;
  opts.record_stride = 160;
  const double sdt = opts.record_stride * dt;
  const std::size_t L = 3126;
  const std::size_t nseg = 1536;
  const std::size_t burn = static_cast<std::size_t>(std::ceil(2000.0 / sdt));
  const std::size_t need = L + (nseg - 1) * (L / 2);
  const double t1 = (burn + need + 4) * sdt;
  const TimeSeries run = integrate_stochastic(p, n, 0.0, t1, dt, opts);
  if (run.diverged_index || run.samples.size() < burn + need) {
    detail = "stochastic run diverged or came up short";
    return false;
  }
  std::vector<double> xs(need);
  for (std::size_t i = 0; i < need; ++i) xs[i] = run.samples[burn + i].x;
  const SpectrumSeries S = welch_nsd(std::span<const double>(xs), sdt, L, 0.5);

  std::vector<std::size_t> band;
  for (std::size_t k = 0; k < S.nu.size(); ++k)
    if (std::abs(S.nu[k] - p.omega) <= 20.0 * p.gamma) band.push_back(k);
  std::vector<double> Sa(band.size());
  for (std::size_t j = 0; j < band.size(); ++j)
    Sa[j] = nsd(p, n.D, S.nu[band[j]], GreensMethod::lattice);
  std::vector<std::size_t> tips;
  for (std::size_t j = 1; j + 1 < band.size(); ++j)
    if (Sa[j] > Sa[j - 1] && Sa[j] > Sa[j + 1]) tips.push_back(j);
  std::sort(tips.begin(), tips.end(), [&](std::size_t a, std::size_t b) { return Sa[a] > Sa[b]; });
  if (tips.size() > 2) tips.resize(2);
  double worst = 0.0;
  std::size_t used = 0;
  for (std::size_t j = 0; j < band.size(); ++j) {
    bool masked = false;
    for (std::size_t tip : tips)
      masked = masked || std::abs(S.nu[band[j]] - S.nu[band[tip]]) <= 2.0 * p.gamma;
    if (masked) continue;
    ++used;
    worst = std::max(worst, std::abs(S.S[band[j]] / Sa[j] - 1.0));
  }
  detail = fmt("max |Welch/analytic - 1| %.3f over %zu of %zu band bins, %zu segments (tol 0.10)",
               worst, used, band.size(), nseg);
  return worst < 0.10 && used > 150;
}

}  // namespace

std::vector<CheckResult> run_validation(int threads) {
  struct Item {
    const char* name;
    std::function<bool(std::string&)> body;
  };
  const std::vector<Item> items{
      {"multiplier-product", check_multiplier_product},
      {"degenerate-limits", check_degenerate_limits},
      {"threshold-agreement", check_threshold_agreement},
      {"gain-agreement", check_gain_agreement},
      {"hopf-cross-form", check_hopf_cross_form},
      {"quadrature-identities", check_quadrature_identities},
      {"reality-symmetry", check_reality_symmetry},
      {"reduction-k1", check_reduction_k1},
      {"lattice-convergence", check_lattice_convergence},
      {"slowflow-fixed-point", check_slowflow_fixed_point},
      {"scan-smoke", [threads](std::string& d) { return check_scan_smoke(d, threads); }},
      {"temperature-ratio-limits", check_temperature_ratio_limits},
      {"em-determinism", check_em_determinism},
      {"lockin-reproduces-z", check_lockin_reproduces_z},
      {"welch-sine-parseval", check_welch_sine_parseval},
      {"equipartition", check_equipartition},
      {"high-q-stability", check_high_q_stability},
      {"model-identities", check_model_identities},
      {"slowflow-identities", check_slowflow_identities},
      {"hbm-identities", check_hbm_identities},
      {"liouville-product", check_liouville_product_100},
      {"liouville-order4", check_liouville_order4},
      {"multiplier-continuity", check_multiplier_continuity},
      {"classical-limit", check_classical_limit},
      {"squeeze-baseline", check_squeeze_baseline},
      {"nsd-method-agreement", check_nsd_method_agreement},
      {"rk4-order", check_rk4_order},
      {"welch-matches-nsd", check_welch_matches_nsd},
  };

  std::vector<CheckResult> results;
  results.reserve(items.size());
  for (const Item& item : items) {
    CheckResult r;
    r.name = item.name;
    const auto start = std::chrono::steady_clock::now();
    try {
      r.passed = item.body(r.detail);
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = fmt("threw: %s", e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results.push_back(std::move(r));
  }
  return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const CheckResult& r : results)
    if (!r.passed) return false;
  return true;
}

}  // namespace parasqueeze
