#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "parasqueeze/errors.hpp"
#include "parasqueeze/freqdomain.hpp"
#include "parasqueeze/harmonic_balance.hpp"
#include "parasqueeze/model.hpp"

using namespace parasqueeze;
using testhelp::rel_err;
using cplx = std::complex<double>;

namespace {

// Independent oracle: assemble the truncated lattice system as a dense
// matrix and solve it by Gaussian elimination with partial pivoting. The
// library uses tridiagonal elimination; only the equations are shared.
std::vector<cplx> dense_orders(const ResonatorParams& p, double nu, int K) {
  const int n = 2 * K + 1;
  std::vector<std::vector<cplx>> rows(static_cast<std::size_t>(n),
                                      std::vector<cplx>(static_cast<std::size_t>(n), 0.0));
  std::vector<double> nus(static_cast<std::size_t>(n));
  for (int k = -K; k <= K; ++k) {
    const auto r = static_cast<std::size_t>(k + K);
    const double nuk = nu + 2.0 * k * p.omega;
    nus[r] = nuk;
    rows[r][r] = alpha_beta(p, nuk).alpha;
    if (k > -K) rows[r][r - 1] = std::conj(alpha_beta(p, -nuk).beta);
    if (k < K) rows[r][r + 1] = alpha_beta(p, nuk).beta;
  }
  std::vector<cplx> out(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    auto m = rows;
    std::vector<cplx> rhs(static_cast<std::size_t>(n), 0.0);
    rhs[static_cast<std::size_t>(j)] =
        susceptibility(p, nus[static_cast<std::size_t>(j)]);
    for (std::size_t col = 0; col + 1 < static_cast<std::size_t>(n); ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < static_cast<std::size_t>(n); ++r)
        if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
      std::swap(m[col], m[piv]);
      std::swap(rhs[col], rhs[piv]);
      for (std::size_t r = col + 1; r < static_cast<std::size_t>(n); ++r) {
        const cplx f = m[r][col] / m[col][col];
        for (std::size_t c = col; c < static_cast<std::size_t>(n); ++c) m[r][c] -= f * m[col][c];
        rhs[r] -= f * rhs[col];
      }
    }
    for (std::size_t r = static_cast<std::size_t>(n); r-- > 0;) {
      cplx acc = rhs[r];
      for (std::size_t c = r + 1; c < static_cast<std::size_t>(n); ++c) acc -= m[r][c] * rhs[c];
      rhs[r] = acc / m[r][r];
    }
    out[static_cast<std::size_t>(j)] = rhs[static_cast<std::size_t>(K)];
  }
  return out;
}

}  // namespace

TEST_CASE("lattice coefficients match their closed forms") {
  auto p = testhelp::standard<ResonatorParams>();
  p.Fp = -0.013;
  for (double nu : {0.2, 0.97, 1.0, 1.8}) {
    const cplx chi = susceptibility(p, nu);
    const cplx lp = 1.0 / cplx(1.0, -(nu + p.omega) * p.tau);
    const cplx lm = 1.0 / cplx(1.0, -(nu - p.omega) * p.tau);
    const auto ab = alpha_beta(p, nu);
    CHECK(rel_err(ab.alpha, 1.0 + cplx(0.0, 0.5) * p.eta * chi * (lp - lm)) < 1e-13);
    CHECK(rel_err(ab.beta, cplx(0.0, 0.5) * chi * (p.Fp + p.eta * lp)) < 1e-13);
  }
}

TEST_CASE("tridiagonal lattice solve matches a dense elimination") {
  auto p = testhelp::standard<ResonatorParams>();
  p.Fp = -0.02;
  const int K = 3;
  for (double nu : {0.995, 1.0, 1.31}) {
    const auto want = dense_orders(p, nu, K);
    const auto got = greens_lattice(p, nu, K);
    REQUIRE(got.orders.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(rel_err(got.orders[i], want[i]) < 1e-11);
    CHECK(rel_err(got.triplet.g0, want[K]) < 1e-11);
    CHECK(rel_err(got.triplet.gplus, want[K - 1]) < 1e-11);
    CHECK(rel_err(got.triplet.gminus, want[K + 1]) < 1e-11);
  }
}

TEST_CASE("first lattice truncation reproduces the closed-form triplet") {
  auto p = testhelp::standard<ResonatorParams>();
  p.Fp = 0.0011;
  for (double nu : {0.98, 1.0, 1.02}) {
    const auto closed = greens_perturbative(p, nu);
    const auto lattice = greens_lattice(p, nu, 1).triplet;
    CHECK(rel_err(closed.g0, lattice.g0) < 1e-12);
    CHECK(rel_err(closed.gplus, lattice.gplus) < 1e-12);
    CHECK(rel_err(closed.gminus, lattice.gminus) < 1e-12);
  }
}

TEST_CASE("converged lattice transfer obeys the reality pairing") {
  auto p = testhelp::standard<ResonatorParams>();
  p.Fp = -0.018;
  for (double nu : {0.4, 1.0, 1.6}) {
    const auto fwd = greens_lattice_converged(p, nu);
    const auto rev = greens_lattice_converged(p, -nu);
    CHECK(fwd.converged);
    CHECK(rel_err(fwd.triplet.g0, std::conj(rev.triplet.g0)) < 1e-10);
    CHECK(rel_err(fwd.triplet.gplus, std::conj(rev.triplet.gminus)) < 1e-10);
  }
}

TEST_CASE("pump-free spectral density collapses to the bare oscillator") {
  auto p = testhelp::standard<ResonatorParams>();
  p.eta = 0.0;
  const double D = 3.08e-8;
  for (double nu : {0.9, 1.0, 1.05}) {
    const double want = 2.0 * D * std::norm(susceptibility(p, nu));
    CHECK(rel_err(nsd(p, D, nu, GreensMethod::lattice), want) < 1e-12);
    CHECK(rel_err(nsd(p, D, nu, GreensMethod::perturbative), want) < 1e-12);
  }
}

TEST_CASE("three-term restriction sums exactly the displayed triplet") {
  auto p = testhelp::standard<ResonatorParams>();
  p.Fp = -0.02;
  const double D = 1e-6;
  const double nu = 1.003;
  const auto g = greens_lattice_converged(p, nu).triplet;
  const double want =
      2.0 * D * (std::norm(g.g0) + std::norm(g.gplus) + std::norm(g.gminus));
  CHECK(rel_err(nsd(p, D, nu, GreensMethod::lattice, true), want) < 1e-12);
  // the full lattice sum can only add nonnegative power
  CHECK(nsd(p, D, nu, GreensMethod::lattice, false) >= want * (1.0 - 1e-12));
}

TEST_CASE("lock-in quadrature densities are symmetric and positive") {
  auto p = testhelp::standard<ResonatorParams>();
  p.Fp = -0.02;
  const double D = 1e-6;
  for (double nu : {0.001, 0.004, 0.02}) {
    const auto [sxl_p, syl_p] = nsd_lockin(p, D, nu);
    const auto [sxl_m, syl_m] = nsd_lockin(p, D, -nu);
    CHECK(sxl_p > 0.0);
    CHECK(syl_p > 0.0);
    CHECK(rel_err(sxl_p, sxl_m) < 1e-10);
    CHECK(rel_err(syl_p, syl_m) < 1e-10);
  }
}

TEST_CASE("quadrature covariances diagonalize consistently") {
  auto p = testhelp::standard<ResonatorParams>();
  p.Fp = -0.02;
  const double D = 3.08e-8;
  for (auto method : {GreensMethod::perturbative, GreensMethod::lattice}) {
    const auto q = quadrature_covariance(p, D, method);
    const double mean = 0.5 * (q.sigma_c2 + q.sigma_s2);
    const double h = std::hypot(0.5 * (q.sigma_c2 - q.sigma_s2), q.sigma_cs);
    CHECK(rel_err(q.sigma_plus2, mean + h) < 1e-12);
    CHECK(rel_err(q.sigma_minus2, mean - h) < 1e-12);
    CHECK(rel_err(std::tan(2.0 * q.angle) * (q.sigma_c2 - q.sigma_s2), 2.0 * q.sigma_cs) <
          1e-9);
    CHECK(q.sigma_plus2 >= q.sigma_minus2);
  }
}

TEST_CASE("pump-free quadratures are isotropic at the bare variance") {
  auto p = testhelp::standard<ResonatorParams>();
  p.eta = 0.0;
  const double D = 3.08e-8;
  const double want =
      2.0 * std::numbers::pi * D * std::norm(susceptibility(p, p.omega));
  for (auto method : {GreensMethod::perturbative, GreensMethod::lattice}) {
    const auto q = quadrature_covariance(p, D, method);
    CHECK(rel_err(q.sigma_c2, want) < 1e-12);
    CHECK(rel_err(q.sigma_s2, want) < 1e-12);
    CHECK(q.sigma_cs == 0.0);
  }
}

TEST_CASE("covariance is singular on the stationary threshold") {
  auto p = testhelp::standard<ResonatorParams>();
  p.Fp = threshold_hbm(p).second;
  CHECK_THROWS_AS(quadrature_covariance(p, 1e-8, GreensMethod::perturbative),
                  SingularThreshold);
}

TEST_CASE("pump-free gain is unity at every phase") {
  auto p = testhelp::standard<ResonatorParams>();
  p.eta = 0.0;
  for (double phi : {0.0, 0.9, 2.2})
    CHECK(rel_err(gain_ft(p, phi), 1.0) < 1e-10);
}

TEST_CASE("resonant envelope is constant and detuned envelope beats") {
  auto p = testhelp::standard<ResonatorParams>();
  p.Fp = -0.02;
  DriveSignal d;
  d.Fs = 1e-4;
  d.phi0 = 0.7;

  d.omega_s = p.omega;
  const double e0 = envelope_ft(p, d, 3.0);
  CHECK(rel_err(envelope_ft(p, d, 250.0), e0) < 1e-12);
  const double chi_abs = std::abs(susceptibility(p, p.omega));
  CHECK(rel_err(e0, gain_ft(p, d.phi0) * chi_abs * d.Fs) < 1e-10);

  d.omega_s = p.omega + 5e-5;
  const double beat = std::numbers::pi / d.delta(p);
  const double e1 = envelope_ft(p, d, 123.4);
  CHECK(rel_err(envelope_ft(p, d, 123.4 + beat), e1) < 1e-9);
  CHECK(rel_err(envelope_ft(p, d, 123.4 + 0.5 * beat), e1) > 1e-3);
}

TEST_CASE("feedback cooling lowers the effective temperature") {
  auto p = testhelp::standard<ResonatorParams>();
  p.eta = 0.0;
  p.Fp = 0.0;
  CHECK(rel_err(effective_temperature_ratio(p), 1.0) < 1e-5);
  auto cooled = testhelp::standard<ResonatorParams>();
  cooled.Fp = -0.02;
  const double ratio = effective_temperature_ratio(cooled);
  CHECK(ratio < 0.5);
  CHECK(ratio > 0.0);
}
