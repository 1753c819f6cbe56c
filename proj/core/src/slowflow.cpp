#include "parasqueeze/slowflow.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "parasqueeze/errors.hpp"

namespace parasqueeze {

namespace {

// Denominator of the averaged stationary response.
double response_denominator(const ResonatorParams& p) {
  const double gw = p.gamma * p.omega;
  const double Om = p.detuning();
  return (0.5 * p.Fp + gw + p.eta) * (0.5 * p.Fp - gw) - Om * Om;
}

}  // namespace

SlowState averaged_rhs(const ResonatorParams& p, const DriveSignal& d,
                       const SlowState& s, double t) {
  const double gw = p.gamma * p.omega;
  const double Om = p.detuning();
  const double phi = d.delta(p) * t + d.phi0;
  SlowState r;
  r.u = -((0.5 * p.Fp + gw) * s.u + 2.0 * p.eta * s.z + Om * s.v -
          d.Fs * std::sin(phi)) /
        (2.0 * p.omega);
  r.v = (Om * s.u + (0.5 * p.Fp - gw) * s.v - d.Fs * std::cos(phi)) /
        (2.0 * p.omega);
  r.z = (-s.z + 0.5 * s.u) / p.tau;
  return r;
}

SlowState fixed_point(const ResonatorParams& p, double Fs, double phi0) {
  p.validate();
  const double den = response_denominator(p);
  if (std::abs(den) < 1e-12)
    throw SingularThreshold("averaged response denominator vanishes: on the stationary instability line");
  const double gw = p.gamma * p.omega;
  const double Om = p.detuning();
  const double sp = std::sin(phi0);
  const double cp = std::cos(phi0);
  SlowState s;
  s.u = Fs * ((0.5 * p.Fp - gw) * sp - Om * cp) / den;
  s.v = Fs * (-Om * sp + (0.5 * p.Fp + gw + p.eta) * cp) / den;
  s.z = 0.5 * s.u;
  return s;
}

double gain_avg(const ResonatorParams& p, double phi0) {
  p.validate();
  const double den = response_denominator(p);
  if (std::abs(den) < 1e-12)
    throw SingularThreshold("averaged response denominator vanishes: on the stationary instability line");
  const double gw = p.gamma * p.omega;
  const double Om = p.detuning();
  const double num2 =
      Om * Om + 0.25 * p.Fp * p.Fp + gw * gw + 0.5 * p.eta * p.eta +
      p.eta * (0.5 * p.Fp + gw) +
      (p.Fp * gw + 0.5 * p.eta * (p.eta + p.Fp + 2.0 * gw)) * std::cos(2.0 * phi0) -
      Om * (p.Fp + p.eta) * std::sin(2.0 * phi0);
  const double chi_abs = std::abs(susceptibility(p, p.omega));
  return std::sqrt(std::max(num2, 0.0)) / (std::abs(den) * chi_abs);
}

std::pair<double, double> threshold_avg(const ResonatorParams& p) {
  p.validate();
  const double gw = p.gamma * p.omega;
  const double Om = p.detuning();
  const double root = std::sqrt(4.0 * Om * Om + (p.eta + 2.0 * gw) * (p.eta + 2.0 * gw));
  return {-p.eta - root, -p.eta + root};
}

GainExtrema gain_extrema_avg(const ResonatorParams& p) {
  p.validate();
  const double Om = p.detuning();
  if (std::abs(Om) > 1e-9 * p.omega0 * p.omega0)
    throw DetunedInput("gain extrema require exact parametric resonance (omega0^2 = omega^2)");
  const double gw = p.gamma * p.omega;
  GainExtrema g;
  g.gmin = gw / std::abs(0.5 * p.Fp + gw + p.eta);
  g.gmax = gw / std::abs(0.5 * p.Fp - gw);
  return g;
}

SlowSeries integrate_slowflow(const ResonatorParams& p, const DriveSignal& d,
                              const SlowState& initial, double t0, double t1,
                              double dt) {
  p.validate();
  d.validate();
  if (!(dt > 0.0) || !(t1 > t0)) throw std::invalid_argument("need t1 > t0 and dt > 0");
  const double rate =
      std::max({(0.5 * std::abs(p.Fp) + p.gamma * p.omega + std::abs(p.detuning()) +
                 2.0 * std::abs(p.eta)) /
                    (2.0 * p.omega),
                1.0 / p.tau, std::abs(d.delta(p))});
  if (dt > 2.0 * std::numbers::pi / (50.0 * rate))
    throw std::invalid_argument("dt too coarse for the slow rates of this flow");

  const auto n = static_cast<std::size_t>(std::ceil((t1 - t0) / dt));
  SlowSeries out;
  out.t0 = t0;
  out.dt = dt;
  out.states.reserve(n + 1);
  out.states.push_back(initial);

  SlowState s = initial;
  for (std::size_t i = 1; i <= n; ++i) {
    const double t = t0 + dt * static_cast<double>(i - 1);
    const SlowState k1 = averaged_rhs(p, d, s, t);
    const SlowState s2{s.u + 0.5 * dt * k1.u, s.v + 0.5 * dt * k1.v, s.z + 0.5 * dt * k1.z};
    const SlowState k2 = averaged_rhs(p, d, s2, t + 0.5 * dt);
    const SlowState s3{s.u + 0.5 * dt * k2.u, s.v + 0.5 * dt * k2.v, s.z + 0.5 * dt * k2.z};
    const SlowState k3 = averaged_rhs(p, d, s3, t + 0.5 * dt);
    const SlowState s4{s.u + dt * k3.u, s.v + dt * k3.v, s.z + dt * k3.z};
    const SlowState k4 = averaged_rhs(p, d, s4, t + dt);
    s.u += dt / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
    s.v += dt / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
    s.z += dt / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z);
    if (!std::isfinite(s.u) || !std::isfinite(s.v) || !std::isfinite(s.z)) {
      out.diverged_index = i;
      break;
    }
    out.states.push_back(s);
  }
  return out;
}

}  // namespace parasqueeze
