#include "commands.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "config.hpp"
#include "output.hpp"
#include "parasqueeze/errors.hpp"
#include "parasqueeze/floquet.hpp"
#include "parasqueeze/freqdomain.hpp"
#include "parasqueeze/harmonic_balance.hpp"
#include "parasqueeze/model.hpp"
#include "parasqueeze/slowflow.hpp"
#include "parasqueeze/timedomain.hpp"
#include "parasqueeze/validate.hpp"

namespace parasqueeze::cli {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return g;
}

LoadedConfig resolve(const CommandArgs& args, const std::string& command) {
  return args.config_path.empty() ? default_config(command)
                                  : load_config(args.config_path, command);
}

std::filesystem::path prepare_out(const CommandArgs& args) {
  std::error_code ec;
  std::filesystem::create_directories(args.out_dir, ec);  // best effort, open reports failure
  return args.out_dir;
}

void note(const std::filesystem::path& p) { std::printf("wrote %s\n", p.string().c_str()); }

double db_power(double ratio) { return 10.0 * std::log10(ratio); }
double db_amplitude(double ratio) { return 20.0 * std::log10(ratio); }

}  // namespace

int cmd_threshold(const CommandArgs& args) {
  auto [c, resolved] = resolve(args, "threshold");
  const auto out = prepare_out(args);
  const auto grid = linspace(c.scan_omega_min, c.scan_omega_max, c.scan_points);
  const std::pair<double, double> bracket{c.scan_bracket_lo, c.scan_bracket_hi};
  const bool negative_branch = 0.5 * (bracket.first + bracket.second) < 0.0;

  const auto scan = threshold_scan(c.resonator, grid, {bracket}, c.scan_steps, args.threads);

  CsvFile csv(out / "threshold.csv", "threshold", resolved);
  csv.columns({"omega", "fp_avg", "fp_hbm", "fp_ft", "classification"});
  std::vector<double> avg_y(grid.size(), kNan), hbm_y(grid.size(), kNan), ft_y(grid.size(), kNan);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ResonatorParams p = c.resonator;
    p.omega = grid[i];
    std::string avg_s, hbm_s;
    try {
      const auto roots = threshold_avg(p);
      avg_y[i] = negative_branch ? roots.first : roots.second;
      avg_s = fmt_g17(avg_y[i]);
    } catch (const Error&) {
    }
    try {
      const auto roots = threshold_hbm(p);
      hbm_y[i] = negative_branch ? roots.first : roots.second;
      hbm_s = fmt_g17(hbm_y[i]);
    } catch (const Error&) {
    }
    std::string ft_s;
    if (scan[i].Fp) {
      ft_y[i] = *scan[i].Fp;
      ft_s = fmt_g17(ft_y[i]);
    }
    csv.row({fmt_g17(grid[i]), avg_s, hbm_s, ft_s, scan[i].classification});
  }
  csv.close();
  note(out / "threshold.csv");

  if (write_svg_plot(out / "threshold.svg", "instability threshold", "omega", "Fp",
                     {{"averaging", series_color(0), grid, avg_y},
                      {"harmonic balance", series_color(1), grid, hbm_y},
                      {"Floquet", series_color(2), grid, ft_y}}))
    note(out / "threshold.svg");
  return 0;
}

int cmd_multipliers(const CommandArgs& args) {
  auto [c, resolved] = resolve(args, "multipliers");
  const auto out = prepare_out(args);
  const auto grid = linspace(c.sweep_fp_min, c.sweep_fp_max, c.sweep_points);

  // Track each multiplier along the sweep: the characteristic-cubic root
  // order is arbitrary per point, so match to the previous point by the
  // permutation with the smallest worst-case jump.
  static constexpr std::array<std::array<int, 3>, 6> perms = {
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  std::array<std::complex<double>, 3> prev{};
  bool have_prev = false;

  CsvFile csv(out / "multipliers.csv", "multipliers", resolved);
  csv.columns({"fp", "mu1_re", "mu1_im", "mu2_re", "mu2_im", "mu3_re", "mu3_im", "max_modulus",
               "classification"});
  std::array<std::vector<double>, 3> path_re, path_im;
  for (auto& v : path_re) v.reserve(grid.size());
  for (auto& v : path_im) v.reserve(grid.size());

  for (double fp : grid) {
    ResonatorParams p = c.resonator;
    p.Fp = fp;
    const auto m = monodromy(p, c.sweep_steps);
    auto mu = m.multipliers;
    if (!have_prev) {
      std::sort(mu.begin(), mu.end(), [](const auto& a, const auto& b) {
        return std::imag(a) != std::imag(b) ? std::imag(a) < std::imag(b)
                                            : std::real(a) < std::real(b);
      });
      have_prev = true;
    } else {
      double best = std::numeric_limits<double>::infinity();
      std::array<std::complex<double>, 3> chosen = mu;
      for (const auto& perm : perms) {
        double worst = 0.0;
        for (int k = 0; k < 3; ++k)
          worst = std::max(worst, std::abs(mu[static_cast<std::size_t>(perm[k])] -
                                           prev[static_cast<std::size_t>(k)]));
        if (worst < best) {
          best = worst;
          for (int k = 0; k < 3; ++k)
            chosen[static_cast<std::size_t>(k)] = mu[static_cast<std::size_t>(perm[k])];
        }
      }
      mu = chosen;
    }
    prev = mu;
    for (int k = 0; k < 3; ++k) {
      path_re[static_cast<std::size_t>(k)].push_back(mu[static_cast<std::size_t>(k)].real());
      path_im[static_cast<std::size_t>(k)].push_back(mu[static_cast<std::size_t>(k)].imag());
    }
    csv.row({fmt_g17(fp), fmt_g17(mu[0].real()), fmt_g17(mu[0].imag()), fmt_g17(mu[1].real()),
             fmt_g17(mu[1].imag()), fmt_g17(mu[2].real()), fmt_g17(mu[2].imag()),
             fmt_g17(m.max_modulus), m.classification_label()});
  }
  csv.close();
  note(out / "multipliers.csv");

  std::vector<double> cx(129), cy(129);
  for (int i = 0; i <= 128; ++i) {
    const double t = 2.0 * std::numbers::pi * i / 128.0;
    cx[static_cast<std::size_t>(i)] = std::cos(t);
    cy[static_cast<std::size_t>(i)] = std::sin(t);
  }
  if (write_svg_plot(out / "multipliers.svg", "Floquet multiplier paths", "Re mu", "Im mu",
                     {{"unit circle", series_color(5), cx, cy},
                      {"mu1", series_color(0), path_re[0], path_im[0]},
                      {"mu2", series_color(1), path_re[1], path_im[1]},
                      {"mu3", series_color(2), path_re[2], path_im[2]}},
                     560, 560))
    note(out / "multipliers.svg");
  return 0;
}

int cmd_transient(const CommandArgs& args) {
  auto [c, resolved] = resolve(args, "transient");
  const auto out = prepare_out(args);
  const double dt = c.time_dt > 0.0 ? c.time_dt : c.resonator.period() / 400.0;
  IntegrationOptions opts;
  opts.record_stride = c.time_stride;
  const TimeSeries run =
      integrate_deterministic(c.resonator, c.drive, c.initial, 0.0, c.time_t_end, dt, opts);

  CsvFile csv(out / "transient_timeseries.csv", "transient", resolved);
  csv.columns({"t", "x", "xdot", "z"});
  std::vector<double> ts(run.samples.size()), xs(run.samples.size());
  for (std::size_t i = 0; i < run.samples.size(); ++i) {
    ts[i] = run.time_at(i);
    xs[i] = run.samples[i].x;
    csv.row({fmt_g17(ts[i]), fmt_g17(run.samples[i].x), fmt_g17(run.samples[i].xdot),
             fmt_g17(run.samples[i].z)});
  }
  csv.close();
  note(out / "transient_timeseries.csv");
  if (run.diverged_index)
    std::printf("trajectory diverged at t = %s (recorded up to the blowup)\n",
                fmt_g6(run.time_at(*run.diverged_index)).c_str());

  if (write_svg_plot(out / "transient_timeseries.svg", "transient response", "t", "x",
                     {{"x(t)", series_color(0), ts, xs}}))
    note(out / "transient_timeseries.svg");

  const auto skip =
      static_cast<std::size_t>(c.spectrum_skip_fraction * static_cast<double>(xs.size()));
  if (xs.size() - skip < 8)
    throw TooShort(
        "stationary tail holds fewer than 8 samples; raise time.t_end or lower "
        "spectrum.skip_fraction");
  const std::span<const double> tail(xs.data() + skip, xs.size() - skip);
  const SpectrumSeries spec = amplitude_spectrum(tail, run.dt);
  CsvFile scsv(out / "transient_spectrum.csv", "transient", resolved);
  scsv.columns({"nu", "amplitude"});
  for (std::size_t i = 0; i < spec.nu.size(); ++i)
    scsv.row({fmt_g17(spec.nu[i]), fmt_g17(spec.S[i])});
  scsv.close();
  note(out / "transient_spectrum.csv");

  if (write_svg_plot(out / "transient_spectrum.svg", "stationary response spectrum", "nu",
                     "|x(nu)|", {{"amplitude", series_color(0), spec.nu, spec.S}}))
    note(out / "transient_spectrum.svg");
  return 0;
}

int cmd_gain(const CommandArgs& args) {
  auto [c, resolved] = resolve(args, "gain");
  const auto out = prepare_out(args);
  const int n = c.curve_points;

  CsvFile csv(out / "gain.csv", "gain", resolved);
  csv.columns({"phi", "gain_avg", "gain_hbm", "gain_ft", "db_avg", "db_hbm", "db_ft"});
  std::vector<double> phis(static_cast<std::size_t>(n));
  std::vector<double> db_avg(phis.size(), kNan), db_hbm(phis.size(), kNan),
      db_ft(phis.size(), kNan);
  for (int i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const double phi = std::numbers::pi * i / n;  // the gain is pi-periodic
    phis[idx] = phi;
    std::array<std::string, 6> cell{};
    try {
      const double g = gain_avg(c.resonator, phi);
      db_avg[idx] = db_amplitude(g);
      cell[0] = fmt_g17(g);
      cell[3] = fmt_g17(db_avg[idx]);
    } catch (const Error&) {
    }
    try {
      const double g = gain_hbm(c.resonator, phi);
      db_hbm[idx] = db_amplitude(g);
      cell[1] = fmt_g17(g);
      cell[4] = fmt_g17(db_hbm[idx]);
    } catch (const Error&) {
    }
    try {
      const double g = gain_ft(c.resonator, phi);
      db_ft[idx] = db_amplitude(g);
      cell[2] = fmt_g17(g);
      cell[5] = fmt_g17(db_ft[idx]);
    } catch (const Error&) {
    }
    csv.row({fmt_g17(phi), cell[0], cell[1], cell[2], cell[3], cell[4], cell[5]});
  }
  csv.close();
  note(out / "gain.csv");

  std::vector<double> mphi, mdb;
  if (c.measure_enabled) {
    GainPhaseOptions opts;
    opts.settle_time = c.measure_settle_time;
    opts.dt = c.measure_dt;
    opts.t_span = c.measure_span;
    const auto pts = extract_gain_phase(c.resonator, c.drive, opts);
    CsvFile mcsv(out / "gain_measured.csv", "gain", resolved);
    mcsv.columns({"phi", "gain", "gain_db"});
    mphi.reserve(pts.size());
    mdb.reserve(pts.size());
    for (const auto& pt : pts) {
      mphi.push_back(pt.phi);
      mdb.push_back(db_amplitude(pt.gain));
      mcsv.row({fmt_g17(pt.phi), fmt_g17(pt.gain), fmt_g17(mdb.back())});
    }
    mcsv.close();
    note(out / "gain_measured.csv");
  }

  std::vector<PlotSeries> series = {{"averaging", series_color(0), phis, db_avg},
                                    {"harmonic balance", series_color(1), phis, db_hbm},
                                    {"frequency lattice", series_color(2), phis, db_ft}};
  if (!mphi.empty()) series.push_back({"measured", series_color(3), mphi, mdb});
  if (write_svg_plot(out / "gain.svg", "phase-dependent gain", "phi0", "gain [dB]", series))
    note(out / "gain.svg");
  return 0;
}

int cmd_nsd(const CommandArgs& args) {
  auto [c, resolved] = resolve(args, "nsd");
  const auto out = prepare_out(args);
  const auto grid = linspace(c.band_nu_min, c.band_nu_max, c.band_points);
  const double D = c.noise.D;
  const double ref = 2.0 * D;  // white-noise floor, the 0 dB reference

  CsvFile csv(out / "nsd.csv", "nsd", resolved);
  csv.columns({"nu", "s_lattice", "s_perturbative", "s_bare"});
  std::vector<double> lat_db(grid.size(), kNan), pert_db(grid.size(), kNan),
      bare_db(grid.size(), kNan);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double nu = grid[i];
    ResonatorParams bare = c.resonator;
    bare.Fp = 0.0;
    bare.eta = 0.0;
    const double s_bare = 2.0 * D * std::norm(susceptibility(bare, nu));
    bare_db[i] = db_power(s_bare / ref);
    std::string lat_s, pert_s;
    try {
      const double s = nsd(c.resonator, D, nu, GreensMethod::lattice);
      lat_db[i] = db_power(s / ref);
      lat_s = fmt_g17(s);
    } catch (const Error&) {
    }
    try {
      const double s = nsd(c.resonator, D, nu, GreensMethod::perturbative);
      pert_db[i] = db_power(s / ref);
      pert_s = fmt_g17(s);
    } catch (const Error&) {
    }
    csv.row({fmt_g17(nu), lat_s, pert_s, fmt_g17(s_bare)});
  }
  csv.close();
  note(out / "nsd.csv");

  if (write_svg_plot(out / "nsd.svg", "noise spectral density", "nu", "S_x / 2D [dB]",
                     {{"lattice", series_color(0), grid, lat_db},
                      {"perturbative", series_color(1), grid, pert_db},
                      {"bare oscillator", series_color(5), grid, bare_db}}))
    note(out / "nsd.svg");

  // Demodulated quadrature densities live at baseband: shift the band by
  // the demodulation frequency.
  const auto base = linspace(c.band_nu_min - c.resonator.omega,
                             c.band_nu_max - c.resonator.omega, c.band_points);
  CsvFile lcsv(out / "nsd_lockin.csv", "nsd", resolved);
  lcsv.columns({"nu", "s_xl", "s_yl"});
  std::vector<double> xl_db(base.size(), kNan), yl_db(base.size(), kNan);
  for (std::size_t i = 0; i < base.size(); ++i) {
    std::string xs, ys;
    try {
      const auto [sxl, syl] = nsd_lockin(c.resonator, D, base[i], GreensMethod::lattice);
      xl_db[i] = db_power(sxl / ref);
      yl_db[i] = db_power(syl / ref);
      xs = fmt_g17(sxl);
      ys = fmt_g17(syl);
    } catch (const Error&) {
    }
    lcsv.row({fmt_g17(base[i]), xs, ys});
  }
  lcsv.close();
  note(out / "nsd_lockin.csv");

  if (write_svg_plot(out / "nsd_lockin.svg", "lock-in quadrature spectra", "nu (baseband)",
                     "S / 2D [dB]",
                     {{"cosine channel", series_color(0), base, xl_db},
                      {"sine channel", series_color(1), base, yl_db}}))
    note(out / "nsd_lockin.svg");
  return 0;
}

int cmd_squeeze(const CommandArgs& args) {
  auto [c, resolved] = resolve(args, "squeeze");
  const auto out = prepare_out(args);
  const auto grid = linspace(c.sweep_fp_min, c.sweep_fp_max, c.sweep_points);
  const double D = c.noise.D;
  const double sigma0 =
      2.0 * std::numbers::pi * D * std::norm(susceptibility(c.resonator, c.resonator.omega));

  CsvFile csv(out / "squeeze.csv", "squeeze", resolved);
  csv.columns({"fp", "sigma_c2", "sigma_s2", "sigma_cs", "sigma_plus2", "sigma_minus2", "angle",
               "db_plus", "db_minus", "db_plus_pert", "db_minus_pert"});
  std::vector<double> dbp(grid.size(), kNan), dbm(grid.size(), kNan), dbp_p(grid.size(), kNan),
      dbm_p(grid.size(), kNan);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ResonatorParams p = c.resonator;
    p.Fp = grid[i];
    std::vector<std::string> cells(11);
    cells[0] = fmt_g17(grid[i]);
    try {
      const auto q = quadrature_covariance(p, D, GreensMethod::lattice);
      dbp[i] = db_power(q.sigma_plus2 / sigma0);
      dbm[i] = db_power(q.sigma_minus2 / sigma0);
      cells[1] = fmt_g17(q.sigma_c2);
      cells[2] = fmt_g17(q.sigma_s2);
      cells[3] = fmt_g17(q.sigma_cs);
      cells[4] = fmt_g17(q.sigma_plus2);
      cells[5] = fmt_g17(q.sigma_minus2);
      cells[6] = fmt_g17(q.angle);
      cells[7] = fmt_g17(dbp[i]);
      cells[8] = fmt_g17(dbm[i]);
    } catch (const Error&) {
    }
    try {
      const auto q = quadrature_covariance(p, D, GreensMethod::perturbative);
      dbp_p[i] = db_power(q.sigma_plus2 / sigma0);
      dbm_p[i] = db_power(q.sigma_minus2 / sigma0);
      cells[9] = fmt_g17(dbp_p[i]);
      cells[10] = fmt_g17(dbm_p[i]);
    } catch (const Error&) {
    }
    csv.row(cells);
  }
  csv.close();
  note(out / "squeeze.csv");

  if (write_svg_plot(out / "squeeze.svg", "quadrature squeezing and heating", "Fp",
                     "variance / baseline [dB]",
                     {{"sigma+ lattice", series_color(0), grid, dbp},
                      {"sigma- lattice", series_color(1), grid, dbm},
                      {"sigma+ perturbative", series_color(2), grid, dbp_p},
                      {"sigma- perturbative", series_color(3), grid, dbm_p}}))
    note(out / "squeeze.svg");
  return 0;
}

int cmd_validate(const CommandArgs& args) {
  if (!args.config_path.empty())
    throw ConfigError("the validate command takes no config file");
  const auto out = prepare_out(args);
  const auto results = run_validation(args.threads);

  double total = 0.0;
  int passed = 0;
  for (const auto& r : results) {
    std::printf("%-26s %s %7.2fs  %s\n", r.name.c_str(), r.passed ? "PASS" : "FAIL", r.seconds,
                r.detail.c_str());
    total += r.seconds;
    passed += r.passed ? 1 : 0;
  }
  std::printf("%d/%zu checks passed in %.1fs\n", passed, results.size(), total);

  // The JSON report drops the timings so identical builds rewrite
  // identical bytes.
  nlohmann::ordered_json doc;
  doc["schema"] = "parasqueeze-json 1";
  doc["artifact"] = std::string("parasqueeze ") + PARASQUEEZE_VERSION;
  doc["command"] = "validate";
  doc["all_passed"] = all_passed(results);
  doc["checks"] = nlohmann::ordered_json::array();
  for (const auto& r : results)
    doc["checks"].push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
  std::ofstream jf(out / "validate.json", std::ios::binary);
  if (!jf) throw std::runtime_error("cannot open output file 'validate.json'");
  jf << doc.dump(2) << "\n";
  jf.flush();
  if (!jf) throw std::runtime_error("write failure on 'validate.json'");
  note(out / "validate.json");

  return all_passed(results) ? 0 : 4;
}

}  // namespace parasqueeze::cli
