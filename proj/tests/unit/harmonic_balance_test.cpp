#include <cmath>
#include <complex>
#include <numbers>
#include <utility>

#include "doctest.h"
#include "helpers.hpp"
#include "parasqueeze/errors.hpp"
#include "parasqueeze/harmonic_balance.hpp"
#include "parasqueeze/model.hpp"

using namespace parasqueeze;
using testhelp::rel_err;
using cplx = std::complex<double>;

namespace {

// Independent oracle: rebuild the single-harmonic balance system from the
// model definition and solve it as a real 2x2 linear system. Shares no
// code path with the library's complex-conjugate elimination.
cplx balance_oracle(const ResonatorParams& p, double Fs, double phi0) {
  const cplx chi = 1.0 / cplx(p.omega0 * p.omega0 - p.omega * p.omega, -p.gamma * p.omega);
  const cplx B = 1.0 - p.eta * chi * p.omega * p.tau / cplx(1.0, -2.0 * p.omega * p.tau);
  const cplx C = cplx(0.0, -0.5) * chi * (p.Fp + p.eta);  // couples conj(A)
  const cplx r = chi * Fs * std::exp(cplx(0.0, -phi0));
  const double m00 = B.real() + C.real();
  const double m01 = -B.imag() + C.imag();
  const double m10 = B.imag() + C.imag();
  const double m11 = B.real() - C.real();
  const double det = m00 * m11 - m01 * m10;
  const double a = (r.real() * m11 - m01 * r.imag()) / det;
  const double b = (m00 * r.imag() - r.real() * m10) / det;
  return {a, b};
}

}  // namespace

TEST_CASE("balance response matches an independent real-valued solve") {
  auto p = testhelp::standard<ResonatorParams>();
  DriveSignal d;
  d.omega_s = p.omega;
  for (auto [fp, eta, phi0] :
       {std::tuple{-0.02, 1.0, 0.3}, {0.0015, 1.0, 1.2}, {0.03, 0.0, 2.6}, {-0.01, 1.7, 0.0}}) {
    p.Fp = fp;
    p.eta = eta;
    d.Fs = 0.004;
    d.phi0 = phi0;
    const auto got = hbm_response(p, d).A_x;
    const auto want = balance_oracle(p, d.Fs, d.phi0);
    CAPTURE(fp);
    CAPTURE(eta);
    CHECK(rel_err(got, want) < 1e-12);
  }
}

TEST_CASE("balance response satisfies its defining equation") {
  auto p = testhelp::standard<ResonatorParams>();
  p.Fp = -0.017;
  DriveSignal d;
  d.Fs = 0.1;
  d.omega_s = p.omega;
  d.phi0 = 0.9;
  const cplx A = hbm_response(p, d).A_x;
  const cplx chi = susceptibility(p, p.omega);
  const cplx B = 1.0 - p.eta * chi * p.omega * p.tau / cplx(1.0, -2.0 * p.omega * p.tau);
  const cplx lhs = B * A - cplx(0.0, 0.5) * chi * (p.Fp + p.eta) * std::conj(A);
  const cplx rhs = chi * d.Fs * std::exp(cplx(0.0, -d.phi0));
  CHECK(rel_err(lhs, rhs) < 1e-12);
}

TEST_CASE("balance determinant follows the closed form") {
  auto p = testhelp::standard<ResonatorParams>();
  p.Fp = 0.0012;
  const cplx chi = susceptibility(p, p.omega);
  const cplx B = 1.0 - p.eta * chi * p.omega * p.tau / cplx(1.0, -2.0 * p.omega * p.tau);
  const double want = std::norm(B) - 0.25 * std::norm(chi) * (p.Fp + p.eta) * (p.Fp + p.eta);
  CHECK(rel_err(det_m(p), want) < 1e-9);

  DriveSignal d;
  d.Fs = 1.0;
  d.omega_s = p.omega;
  CHECK(rel_err(hbm_response(p, d).detM, det_m(p)) < 1e-9);
}

TEST_CASE("thresholds zero the balance determinant") {
  auto p = testhelp::standard<ResonatorParams>();
  const auto roots = threshold_hbm(p);
  CHECK(roots.first < 0.0);
  CHECK(roots.second > 0.0);
  for (double root : {roots.first, roots.second}) {
    p.Fp = root;
    // zero relative to the size of the cancelling terms, which is what a
    // rounded root can deliver (the terms are ~|B|^2 ~ 2.5e5 here)
    const cplx chi = susceptibility(p, p.omega);
    const cplx B = 1.0 - p.eta * chi * p.omega * p.tau /
                             cplx(1.0, -2.0 * p.omega * p.tau);
    const double scale =
        std::norm(B) + 0.25 * std::norm(chi) * (p.Fp + p.eta) * (p.Fp + p.eta);
    CHECK(std::abs(det_m(p)) < 1e-13 * scale);
  }
}

TEST_CASE("feedback-free threshold is twice the damping") {
  // With eta = 0 the balance factor is 1 and |chi(omega)| = 1/(gamma*omega)
  // at resonance, so the roots must be -2*gamma*omega and +2*gamma*omega.
  ResonatorParams p;
  p.omega0 = 1.2;
  p.omega = 1.2;
  p.gamma = 0.003;
  p.eta = 0.0;
  p.tau = 55.0;
  const auto roots = threshold_hbm(p);
  CHECK(rel_err(roots.first, -2.0 * p.gamma * p.omega) < 1e-12);
  CHECK(rel_err(roots.second, 2.0 * p.gamma * p.omega) < 1e-12);
}

TEST_CASE("gain is the response amplitude over the bare response") {
  auto p = testhelp::standard<ResonatorParams>();
  p.Fp = -0.02;
  DriveSignal d;
  d.omega_s = p.omega;
  const double chi_abs = std::abs(susceptibility(p, p.omega));
  for (double phi : {0.1, 1.4, 2.8}) {
    d.phi0 = phi;
    d.Fs = 0.2;
    const double via_response = std::abs(hbm_response(p, d).A_x) / (chi_abs * d.Fs);
    CHECK(rel_err(gain_hbm(p, phi), via_response) < 1e-12);
    d.Fs = 5e-7;  // gain does not depend on the drive amplitude
    CHECK(rel_err(std::abs(hbm_response(p, d).A_x) / (chi_abs * d.Fs), via_response) < 1e-11);
  }
}

TEST_CASE("gain extrema bound a fine phase scan") {
  auto p = testhelp::standard<ResonatorParams>();
  p.Fp = -0.02;
  const auto ex = gain_extrema_hbm(p);
  double lo = 1e300, hi = 0.0;
  for (int i = 0; i < 4096; ++i) {
    const double g = gain_hbm(p, std::numbers::pi * i / 4096.0);
    lo = std::min(lo, g);
    hi = std::max(hi, g);
  }
  CHECK(ex.gmin <= lo * (1.0 + 1e-12));
  CHECK(ex.gmax >= hi * (1.0 - 1e-12));
  // the notch is sharp: a 4096-point grid lands only O((gmax/gmin)^2 dphi^2)
  // above the true minimum, which is ~1e-4 relative here
  CHECK(rel_err(ex.gmin, lo) < 2e-3);
  CHECK(rel_err(ex.gmax, hi) < 1e-5);
}

TEST_CASE("plain pump at twice the damping deamplifies to one half") {
  ResonatorParams p;
  p.omega0 = 0.7;
  p.omega = 0.7;
  p.gamma = 2e-4;
  p.eta = 0.0;
  p.tau = 100.0;
  p.Fp = 2.0 * p.gamma * p.omega;
  CHECK(std::abs(gain_extrema_hbm(p).gmin - 0.5) < 1e-12);
}

TEST_CASE("amplified quadrature diverges on the threshold") {
  // Binary-exact point on the instability line: gamma = 1/2 at omega =
  // omega0 = 1 gives chi = 2i, so the threshold root, det_m = 0 and the
  // extrema are all representable without rounding.
  ResonatorParams p;
  p.omega0 = 1.0;
  p.omega = 1.0;
  p.gamma = 0.5;
  p.eta = 0.0;
  p.tau = 8.0;
  p.Fp = threshold_hbm(p).second;
  CHECK(p.Fp == 1.0);
  CHECK(det_m(p) == 0.0);
  const auto ex = gain_extrema_hbm(p);
  CHECK(std::isinf(ex.gmax));
  CHECK(ex.gmin == 0.5);

  DriveSignal d;
  d.Fs = 1e-3;
  d.omega_s = p.omega;
  CHECK_THROWS_AS(hbm_response(p, d), SingularThreshold);

  // At a high-Q point the rounded root cannot land det_m exactly on zero,
  // but the amplified quadrature still blows past any physical gain.
  auto q = testhelp::standard<ResonatorParams>();
  q.Fp = threshold_hbm(q).second;
  const auto near_ex = gain_extrema_hbm(q);
  CHECK(near_ex.gmax > 1e9);
  CHECK(near_ex.gmin > 0.0);
  CHECK(std::isfinite(near_ex.gmin));
}

TEST_CASE("balance response demands a resonant drive") {
  auto p = testhelp::standard<ResonatorParams>();
  DriveSignal d;
  d.Fs = 1e-3;
  d.omega_s = p.omega * 1.001;
  CHECK_THROWS_AS(hbm_response(p, d), DetunedInput);
}

TEST_CASE("oscillatory instability point solves both characteristic forms") {
  auto p = testhelp::standard<ResonatorParams>();
  const HopfPoint pt = find_hopf(p);
  CHECK(pt.Delta > 0.0);
  CHECK(pt.residual < 1e-10);
  // the paper's oscillatory threshold for this system
  CHECK(std::abs(pt.Fp - (-0.042)) < 1e-3);

  const auto [re, im_over] = hopf_residual(p, pt.Fp, pt.Delta);
  CHECK(std::abs(re) < 1e-9);
  CHECK(std::abs(im_over) < 1e-9);
  CHECK(std::abs(hopf_characteristic(p, pt.Fp, pt.Delta)) < 1e-9);

  const HopfPoint direct = hopf_line(p, pt.Fp * 1.05, pt.Delta * 0.9);
  CHECK(rel_err(direct.Fp, pt.Fp) < 1e-8);
  CHECK(rel_err(direct.Delta, pt.Delta) < 1e-8);
}

TEST_CASE("mode shape is normalized and ties the lock-in amplitude") {
  auto p = testhelp::standard<ResonatorParams>();
  const HopfPoint pt = find_hopf(p);
  const HopfMode mode = hopf_mode_shape(p, pt);
  CHECK(rel_err(std::abs(mode.A), 1.0) < 1e-10);
  const cplx want_c = (std::conj(mode.A) + mode.B) / (2.0 * cplx(1.0, -p.tau * pt.Delta));
  CHECK(rel_err(mode.C, want_c) < 1e-9);

  HopfPoint off = pt;
  off.Fp *= 1.2;
  CHECK_THROWS_AS(hopf_mode_shape(p, off), NotOnHopfLine);
}
