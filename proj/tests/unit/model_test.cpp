#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "helpers.hpp"
#include "parasqueeze/model.hpp"

using namespace parasqueeze;
using testhelp::rel_err;
using cplx = std::complex<double>;

TEST_CASE("susceptibility inverts its defining denominator") {
  ResonatorParams p;
  p.omega0 = 1.3;
  p.gamma = 0.02;
  for (double nu : {-2.4, -1.3, -0.4, 0.1, 0.7, 1.3, 3.1}) {
    const cplx den(p.omega0 * p.omega0 - nu * nu, -p.gamma * nu);
    CHECK(std::abs(susceptibility(p, nu) * den - 1.0) < 1e-14);
  }
}

TEST_CASE("susceptibility peaks at 1/(gamma*omega0) on resonance") {
  ResonatorParams p;
  p.omega0 = 0.7;
  p.gamma = 4e-3;
  CHECK(rel_err(std::abs(susceptibility(p, p.omega0)), 1.0 / (p.gamma * p.omega0)) < 1e-14);
  // slightly off resonance the response is strictly smaller
  CHECK(std::abs(susceptibility(p, p.omega0 * 1.001)) < std::abs(susceptibility(p, p.omega0)));
}

TEST_CASE("susceptibility obeys the reality pairing") {
  ResonatorParams p;
  p.omega0 = 1.1;
  p.gamma = 0.05;
  for (double nu : {0.3, 0.9, 1.1, 2.2})
    CHECK(std::abs(susceptibility(p, -nu) - std::conj(susceptibility(p, nu))) < 1e-15);
}

TEST_CASE("system matrix entries match the equations of motion") {
  ResonatorParams p;
  p.omega0 = 1.2;
  p.gamma = 0.01;
  p.Fp = 0.03;
  p.omega = 1.1;
  p.eta = 0.8;
  p.tau = 25.0;
  const double t = 0.37;
  const Mat3 a = system_matrix(p, t);
  CHECK(a[0][0] == 0.0);
  CHECK(a[0][1] == 1.0);
  CHECK(a[0][2] == 0.0);
  CHECK(rel_err(a[1][0], -p.omega0 * p.omega0 + p.Fp * std::sin(2.0 * p.omega * t)) < 1e-15);
  CHECK(a[1][1] == -p.gamma);
  CHECK(rel_err(a[1][2], 2.0 * p.eta * std::sin(p.omega * t)) < 1e-15);
  CHECK(rel_err(a[2][0], std::cos(p.omega * t) / p.tau) < 1e-15);
  CHECK(a[2][1] == 0.0);
  CHECK(rel_err(a[2][2], -1.0 / p.tau) < 1e-15);
}

TEST_CASE("system matrix trace is time independent") {
  auto p = testhelp::standard<ResonatorParams>();
  p.Fp = -0.03;
  const double expect = -p.gamma - 1.0 / p.tau;
  for (double t : {0.0, 0.6, 2.9, 17.3})
    CHECK(rel_err(system_matrix(p, t).trace(), expect) < 1e-15);
}

TEST_CASE("zero feedback decouples the lock-in column") {
  auto p = testhelp::standard<ResonatorParams>();
  p.eta = 0.0;
  p.Fp = 0.01;
  CHECK(system_matrix(p, 1.234)[1][2] == 0.0);
}

TEST_CASE("wrap_angle reduces to [0, 2*pi)") {
  constexpr double tau = 2.0 * std::numbers::pi;
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(rel_err(wrap_angle(tau + 0.25), 0.25) < 1e-12);
  CHECK(rel_err(wrap_angle(-0.25), tau - 0.25) < 1e-12);
  CHECK(rel_err(wrap_angle(7.0 * tau + 1.0), 1.0) < 1e-10);
  CHECK(wrap_angle(tau) == 0.0);
}

TEST_CASE("derived frequencies follow the conventions") {
  ResonatorParams p;
  p.omega0 = 1.2;
  p.omega = 0.9;
  p.gamma = 0.01;
  CHECK(rel_err(p.detuning(), 1.2 * 1.2 - 0.9 * 0.9) < 1e-15);
  CHECK(rel_err(p.period(), 2.0 * std::numbers::pi / 0.9) < 1e-15);

  DriveSignal d;
  d.omega_s = 1.05;
  CHECK(rel_err(d.delta(p), 0.15) < 1e-13);
  CHECK(rel_err(d.idler(p), 0.75) < 1e-13);
}

TEST_CASE("parameter validation rejects unphysical values") {
  auto good = testhelp::standard<ResonatorParams>();
  CHECK_NOTHROW(good.validate());

  auto bad = good;
  bad.gamma = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = good;
  bad.tau = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = good;
  bad.omega0 = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = good;
  bad.Fp = std::nan("");
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  DriveSignal d;
  CHECK_NOTHROW(d.validate());
  d.Fs = -1e-3;
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  d.Fs = 0.0;
  d.phi0 = 7.0;
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);

  NoiseSpec n;
  CHECK_NOTHROW(n.validate());
  n.D = -1.0;
  CHECK_THROWS_AS(n.validate(), std::invalid_argument);
}
