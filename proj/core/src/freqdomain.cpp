#include "parasqueeze/freqdomain.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "parasqueeze/errors.hpp"

namespace parasqueeze {

namespace {

using cplx = std::complex<double>;

// Lock-in filter response 1/(1 - i x tau).
cplx lockin_filter(double x, double tau) { return 1.0 / cplx(1.0, -x * tau); }

// Source frequency of lattice site k relative to the base frequency nu.
double site_freq(double nu, double omega, int k) { return nu + 2.0 * k * omega; }

GreensTriplet triplet_for(const ResonatorParams& p, double nu, GreensMethod method) {
  if (method == GreensMethod::perturbative) return greens_perturbative(p, nu);
  return greens_lattice_converged(p, nu).triplet;
}

}  // namespace

AlphaBeta alpha_beta(const ResonatorParams& p, double nu) {
  const cplx chi = susceptibility(p, nu);
  const cplx lp = lockin_filter(nu + p.omega, p.tau);
  const cplx lm = lockin_filter(nu - p.omega, p.tau);
  AlphaBeta ab;
  ab.alpha = 1.0 + cplx(0.0, 0.5 * p.eta) * chi * (lp - lm);
  ab.beta = cplx(0.0, 0.5) * chi * (p.Fp + p.eta * lp);
  return ab;
}

GreensTriplet greens_perturbative(const ResonatorParams& p, double nu) {
  p.validate();
  const double w2 = 2.0 * p.omega;
  const AlphaBeta c0 = alpha_beta(p, nu);
  const AlphaBeta cm = alpha_beta(p, nu - w2);
  const AlphaBeta cp = alpha_beta(p, nu + w2);
  const cplx lo = std::conj(alpha_beta(p, -nu).beta);        // couples to nu - 2w
  const cplx lo_p = std::conj(alpha_beta(p, -nu - w2).beta); // row nu + 2w back-coupling
  const cplx den = c0.alpha - lo * cm.beta / cm.alpha - c0.beta * lo_p / cp.alpha;
  GreensTriplet g;
  g.order = 1;
  g.g0 = susceptibility(p, nu) / den;
  g.gplus = -lo * susceptibility(p, nu - w2) / (cm.alpha * den);
  g.gminus = -c0.beta * susceptibility(p, nu + w2) / (cp.alpha * den);
  return g;
}

LatticeGreens greens_lattice(const ResonatorParams& p, double nu, int K) {
  p.validate();
  if (K < 1) throw std::invalid_argument("lattice half-width K must be >= 1");

  const int n = 2 * K + 1;
  // Row k of the lattice operator M: alpha_k x_k + lo_k x_{k-1} + up_k x_{k+1}.
  // The transfer row of the inverse comes from one tridiagonal solve of
  // M^T y = e_center; then orders[j] = y_j chi_j.
  std::vector<cplx> sub(n), diag(n), sup(n), rhs(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const int k = i - K;
    const double fk = site_freq(nu, p.omega, k);
    diag[i] = alpha_beta(p, fk).alpha;
    if (i > 0) sub[i] = alpha_beta(p, site_freq(nu, p.omega, k - 1)).beta;
    if (i < n - 1)
      sup[i] = std::conj(alpha_beta(p, -site_freq(nu, p.omega, k + 1)).beta);
  }
  rhs[K] = 1.0;

  std::vector<cplx> cp(n), dp(n);
  if (std::abs(diag[0]) < 1e-300)
    throw SingularThreshold("lattice elimination pivot vanished: on an instability line");
  cp[0] = sup[0] / diag[0];
  dp[0] = rhs[0] / diag[0];
  for (int i = 1; i < n; ++i) {
    const cplx pivot = diag[i] - sub[i] * cp[i - 1];
    if (std::abs(pivot) < 1e-300)
      throw SingularThreshold("lattice elimination pivot vanished: on an instability line");
    cp[i] = sup[i] / pivot;
    dp[i] = (rhs[i] - sub[i] * dp[i - 1]) / pivot;
  }
  std::vector<cplx> y(n);
  y[n - 1] = dp[n - 1];
  for (int i = n - 2; i >= 0; --i) y[i] = dp[i] - cp[i] * y[i + 1];

  LatticeGreens out;
  out.K = K;
  out.orders.resize(n);
  for (int i = 0; i < n; ++i)
    out.orders[i] = y[i] * susceptibility(p, site_freq(nu, p.omega, i - K));
  out.triplet.g0 = out.orders[K];
  out.triplet.gplus = out.orders[K - 1];
  out.triplet.gminus = out.orders[K + 1];
  out.triplet.order = K;
  return out;
}

LatticeGreens greens_lattice_converged(const ResonatorParams& p, double nu, int max_K) {
  auto close = [](cplx a, cplx b) {
    return std::abs(a - b) <= 1e-10 * std::max(std::abs(a), std::abs(b));
  };
  LatticeGreens prev = greens_lattice(p, nu, 1);
  for (int K = 3; K <= max_K; K += 2) {
    LatticeGreens next = greens_lattice(p, nu, K);
    if (close(next.triplet.g0, prev.triplet.g0) &&
        close(next.triplet.gplus, prev.triplet.gplus) &&
        close(next.triplet.gminus, prev.triplet.gminus)) {
      next.converged = true;
      return next;
    }
    prev = std::move(next);
  }
  throw NoConvergence("frequency lattice not converged: is the pump above threshold?");
}

double nsd(const ResonatorParams& p, double D, double nu, GreensMethod method,
           bool three_term_only) {
  if (!(D >= 0.0)) throw std::invalid_argument("noise intensity D must be >= 0");
  if (method == GreensMethod::perturbative) {
    const GreensTriplet g = greens_perturbative(p, nu);
    return 2.0 * D * (std::norm(g.g0) + std::norm(g.gplus) + std::norm(g.gminus));
  }
  const LatticeGreens lat = greens_lattice_converged(p, nu);
  if (three_term_only) {
    const GreensTriplet& g = lat.triplet;
    return 2.0 * D * (std::norm(g.g0) + std::norm(g.gplus) + std::norm(g.gminus));
  }
  double sum = 0.0;
  for (const cplx& g : lat.orders) sum += std::norm(g);
  return 2.0 * D * sum;
}

std::pair<double, double> nsd_lockin(const ResonatorParams& p, double D, double nu,
                                     GreensMethod method) {
  if (!(D >= 0.0)) throw std::invalid_argument("noise intensity D must be >= 0");
  const GreensTriplet below = triplet_for(p, nu - p.omega, method);
  const GreensTriplet above = triplet_for(p, nu + p.omega, method);
  const double filt = 1.0 + p.tau * p.tau * nu * nu;
  const cplx a = below.g0;      // g0(nu - w)
  const cplx b = above.gplus;   // gplus(nu + w)
  const cplx c = above.g0;      // g0(nu + w)
  const cplx d = below.gminus;  // gminus(nu - w)
  const double sx = 0.5 * D * (std::norm(a + b) + std::norm(c + d)) / filt;
  const double sy = 0.5 * D * (std::norm(a - b) + std::norm(c - d)) / filt;
  return {sx, sy};
}

QuadratureStats quadrature_covariance(const ResonatorParams& p, double D,
                                      GreensMethod method) {
  if (!(D >= 0.0)) throw std::invalid_argument("noise intensity D must be >= 0");
  p.validate();
  cplx g0, gplus;
  if (method == GreensMethod::perturbative) {
    const AlphaBeta c0 = alpha_beta(p, p.omega);
    const cplx beta_m = alpha_beta(p, -p.omega).beta;
    const double den = std::norm(c0.alpha) - std::norm(beta_m);
    if (std::abs(den) < 1e-14)
      throw SingularThreshold("resonant two-site system singular: on the stationary instability line");
    const cplx chi = susceptibility(p, p.omega);
    g0 = std::conj(c0.alpha) * chi / den;
    gplus = -std::conj(beta_m) * std::conj(chi) / den;
  } else {
    const GreensTriplet g = greens_lattice_converged(p, p.omega).triplet;
    g0 = g.g0;
    gplus = g.gplus;
  }

  const double pre = 2.0 * std::numbers::pi * D;
  const double cross = (g0 * gplus).real();
  QuadratureStats s;
  s.sigma_c2 = pre * (std::norm(g0) + std::norm(gplus) + 2.0 * cross);
  s.sigma_s2 = pre * (std::norm(g0) + std::norm(gplus) - 2.0 * cross);
  s.sigma_cs = 2.0 * pre * (g0 * gplus).imag();
  const double mean = 0.5 * (s.sigma_c2 + s.sigma_s2);
  const double half_diff = 0.5 * (s.sigma_c2 - s.sigma_s2);
  const double split = std::hypot(half_diff, s.sigma_cs);
  s.sigma_plus2 = mean + split;
  s.sigma_minus2 = mean - split;
  s.angle = 0.5 * std::atan2(2.0 * s.sigma_cs, s.sigma_c2 - s.sigma_s2);
  return s;
}

double gain_ft(const ResonatorParams& p, double phi0, GreensMethod method) {
  const GreensTriplet g = triplet_for(p, p.omega, method);
  const cplx rot = std::exp(cplx(0.0, 2.0 * phi0));
  return std::abs(g.g0 + g.gplus * rot) / std::abs(susceptibility(p, p.omega));
}

double envelope_ft(const ResonatorParams& p, const DriveSignal& d, double t,
                   GreensMethod method) {
  p.validate();
  d.validate();
  const double delta = d.delta(p);
  const cplx g0 = triplet_for(p, d.omega_s, method).g0;
  const cplx gp = triplet_for(p, d.idler(p), method).gplus;
  const cplx ph = std::exp(cplx(0.0, d.phi0 + delta * t));
  return d.Fs * std::abs(g0 / ph + gp * ph);
}

double effective_temperature_ratio(const ResonatorParams& p, GreensMethod method) {
  p.validate();
  using quad = boost::math::quadrature::gauss_kronrod<double, 15>;
  const double hi = 4.0 * p.omega;

  auto fb_power = [&](double nu) { return nsd(p, 0.5, nu, method); };
  ResonatorParams bare = p;
  bare.Fp = 0.0;
  bare.eta = 0.0;
  auto bare_power = [&](double nu) { return std::norm(susceptibility(bare, nu)); };

  const double num = quad::integrate(fb_power, 0.0, hi, 15, 1e-6);
  const double den = quad::integrate(bare_power, 0.0, hi, 15, 1e-6);
  return num / den;
}

}  // namespace parasqueeze
