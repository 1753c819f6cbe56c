#include "parasqueeze/harmonic_balance.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "parasqueeze/errors.hpp"
#include "parasqueeze/slowflow.hpp"

namespace parasqueeze {

namespace {

using cplx = std::complex<double>;

// B(omega) from the header comment; the lock-in channel eliminated at the
// pump frequency.
cplx bracket(const ResonatorParams& p) {
  const cplx chi = susceptibility(p, p.omega);
  const cplx lockin = p.eta * chi * p.omega * p.tau / cplx(1.0, -2.0 * p.omega * p.tau);
  return 1.0 - lockin;
}

struct WParts {
  double re = 0.0;             // Re W
  double im_over_delta = 0.0;  // Im W / Delta, an even polynomial in Delta
};

// W = 1/(chi(omega-Delta) conj(chi(omega+Delta))) expanded so that the
// odd-in-Delta imaginary part never suffers 0/0 at Delta = 0.
WParts w_parts(const ResonatorParams& p, double Delta) {
  const double w02 = p.omega0 * p.omega0;
  const double a = w02 - (p.omega - Delta) * (p.omega - Delta);
  const double b = w02 - (p.omega + Delta) * (p.omega + Delta);
  WParts w;
  w.re = a * b + p.gamma * p.gamma * (p.omega * p.omega - Delta * Delta);
  w.im_over_delta = 2.0 * p.gamma * (w02 + p.omega * p.omega - Delta * Delta);
  return w;
}

}  // namespace

double det_m(const ResonatorParams& p) {
  p.validate();
  const cplx B = bracket(p);
  const double chi_abs = std::abs(susceptibility(p, p.omega));
  const double fe = p.Fp + p.eta;
  return std::norm(B) - chi_abs * chi_abs * fe * fe / 4.0;
}

HbmResponse hbm_response(const ResonatorParams& p, const DriveSignal& d) {
  p.validate();
  d.validate();
  if (std::abs(d.omega_s - p.omega) > 1e-9 * p.omega)
    throw DetunedInput("harmonic balance needs a resonant drive (omega_s = omega)");
  const cplx B = bracket(p);
  const cplx chi = susceptibility(p, p.omega);
  const double fe = p.Fp + p.eta;
  const double det = std::norm(B) - std::norm(chi) * fe * fe / 4.0;
  if (std::abs(det) < 1e-14)
    throw SingularThreshold("balance system singular: pump on the stationary instability line");
  const cplx rhs = chi * d.Fs * std::exp(cplx(0.0, -d.phi0));
  HbmResponse r;
  r.detM = det;
  r.A_x = (rhs * std::conj(B) + cplx(0.0, 0.5 * fe) * chi * std::conj(rhs)) / det;
  return r;
}

std::pair<double, double> threshold_hbm(const ResonatorParams& p) {
  p.validate();
  const double chi_abs = std::abs(susceptibility(p, p.omega));
  if (!(chi_abs > 0.0) || !std::isfinite(chi_abs))
    throw NoRealRoot("susceptibility degenerate: threshold quadratic has no real root");
  const double half_width = 2.0 * std::abs(bracket(p)) / chi_abs;
  return {-p.eta - half_width, -p.eta + half_width};
}

double gain_hbm(const ResonatorParams& p, double phi0) {
  DriveSignal d;
  d.Fs = 1.0;
  d.omega_s = p.omega;
  d.phi0 = wrap_angle(phi0);
  const HbmResponse r = hbm_response(p, d);
  return std::abs(r.A_x) / std::abs(susceptibility(p, p.omega));
}

GainExtrema2 gain_extrema_hbm(const ResonatorParams& p) {
  p.validate();
  const double B_abs = std::abs(bracket(p));
  const double half = 0.5 * std::abs(susceptibility(p, p.omega)) * std::abs(p.Fp + p.eta);
  GainExtrema2 g;
  g.gmin = 1.0 / (B_abs + half);
  // On the stationary instability line the anti-squeezed phase diverges but
  // the squeezed one stays regular, so report infinity instead of throwing.
  g.gmax = 1.0 / std::abs(B_abs - half);
  return g;
}

std::pair<double, double> hopf_residual(const ResonatorParams& p, double Fp,
                                        double Delta) {
  const WParts w = w_parts(p, Delta);
  const double w02 = p.omega0 * p.omega0;
  const double e1 = Fp * Fp + 2.0 * p.eta * Fp - 4.0 * p.eta * p.omega * p.gamma -
                    4.0 * w.re + 4.0 * p.tau * Delta * Delta * w.im_over_delta;
  const double e2 = Fp * Fp - 8.0 * p.eta * p.omega / p.tau -
                    8.0 * p.gamma * (w02 + p.omega * p.omega - Delta * Delta) / p.tau -
                    4.0 * w.re;
  return {e1, e2};
}

HopfPoint hopf_line(const ResonatorParams& p, double Fp_guess, double Delta_guess) {
  p.validate();
  double x0 = Fp_guess;
  double x1 = Delta_guess;
  auto [r0, r1] = hopf_residual(p, x0, x1);
  double rn = std::hypot(r0, r1);

  HopfPoint pt;
  for (int iter = 0; iter < 100; ++iter) {
    if (rn < 1e-10) {
      pt.Fp = x0;
      pt.Delta = std::abs(x1);  // residual is even in Delta
      pt.residual = rn;
      pt.iterations = iter;
      return pt;
    }
    const double h0 = 1e-7 * (1.0 + std::abs(x0));
    const double h1 = 1e-7 * (1.0 + std::abs(x1));
    const auto [a0, a1] = hopf_residual(p, x0 + h0, x1);
    const auto [b0, b1] = hopf_residual(p, x0, x1 + h1);
    const double j00 = (a0 - r0) / h0, j01 = (b0 - r0) / h1;
    const double j10 = (a1 - r1) / h0, j11 = (b1 - r1) / h1;
    const double det = j00 * j11 - j01 * j10;
    if (!(std::abs(det) > 1e-300))
      throw NoConvergence("hopf_line: singular Jacobian");
    const double dx0 = -(j11 * r0 - j01 * r1) / det;
    const double dx1 = -(-j10 * r0 + j00 * r1) / det;

    double lambda = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= 20; ++halving) {
      const double t0 = x0 + lambda * dx0;
      const double t1 = x1 + lambda * dx1;
      const auto [q0, q1] = hopf_residual(p, t0, t1);
      const double qn = std::hypot(q0, q1);
      if (std::isfinite(qn) && qn < rn) {
        x0 = t0;
        x1 = t1;
        r0 = q0;
        r1 = q1;
        rn = qn;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) throw NoConvergence("hopf_line: line search stalled");
  }
  if (rn < 1e-10) {
    pt.Fp = x0;
    pt.Delta = std::abs(x1);
    pt.residual = rn;
    pt.iterations = 100;
    return pt;
  }
  throw NoConvergence("hopf_line: no convergence in 100 iterations");
}

HopfPoint find_hopf(const ResonatorParams& p) {
  p.validate();
  const double fp_neg = threshold_avg(p).first;
  const std::array<double, 3> fp_scales{0.01, 0.02, 0.05};
  constexpr int n_delta = 7;
  for (double scale : fp_scales) {
    for (int k = 0; k < n_delta; ++k) {
      const double f = static_cast<double>(k) / (n_delta - 1);
      const double delta = p.omega * std::pow(10.0, -3.0 + 2.0 * f);
      try {
        HopfPoint pt = hopf_line(p, fp_neg * scale, delta);
        if (pt.Delta > 1e-6 * p.omega) return pt;
      } catch (const NoConvergence&) {
      }
    }
  }
  throw NoConvergence("find_hopf: no oscillatory instability found from the standard guess grid");
}

std::complex<double> hopf_characteristic(const ResonatorParams& p, double Fp,
                                         double Delta) {
  const cplx chi1 = susceptibility(p, p.omega - Delta);
  const cplx chi2c = std::conj(susceptibility(p, p.omega + Delta));
  const cplx s(1.0, p.tau * Delta);
  const cplx i(0.0, 1.0);
  const cplx fe = Fp + p.eta / s;
  return (1.0 - i * p.eta * chi1 / (2.0 * s)) * (1.0 + i * p.eta * chi2c / (2.0 * s)) -
         chi1 * chi2c / 4.0 * fe * fe;
}

HopfMode hopf_mode_shape(const ResonatorParams& p, const HopfPoint& pt) {
  p.validate();
  if (std::abs(hopf_characteristic(p, pt.Fp, pt.Delta)) > 1e-8)
    throw NotOnHopfLine("mode shape requested off the oscillatory instability line");
  const cplx chi1 = susceptibility(p, p.omega - pt.Delta);
  const cplx chi2c = std::conj(susceptibility(p, p.omega + pt.Delta));
  const cplx s(1.0, p.tau * pt.Delta);
  const cplx i(0.0, 1.0);
  const cplx fe = pt.Fp + p.eta / s;

  HopfMode m;
  m.A = 1.0;
  // Row 1 of the marginal 2x2 system links A to conj(B); fall back to row 2
  // if its coupling happens to vanish.
  const cplx c1 = i * chi1 / 2.0 * fe;
  cplx B_conj;
  if (std::abs(c1) > 1e-14) {
    B_conj = (1.0 - i * p.eta * chi1 / (2.0 * s)) * m.A / c1;
  } else {
    const cplx c2 = 1.0 + i * p.eta * chi2c / (2.0 * s);
    if (std::abs(c2) < 1e-14)
      throw NotOnHopfLine("marginal system degenerate: mode shape undefined");
    B_conj = -i * chi2c / 2.0 * fe * m.A / c2;
  }
  m.B = std::conj(B_conj);
  m.C = (std::conj(m.A) + m.B) / (2.0 * cplx(1.0, -p.tau * pt.Delta));
  return m;
}

}  // namespace parasqueeze
