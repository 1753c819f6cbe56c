#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "parasqueeze/model.hpp"

namespace parasqueeze {

enum class BifurcationKind {
  stable,
  saddle_node,      // real multiplier crossing +1
  period_doubling,  // real multiplier crossing -1
  hopf,             // conjugate pair crossing |mu| = 1
};

const char* to_string(BifurcationKind k);

// Monodromy matrix Phi(T), T = 2*pi/omega, of the homogeneous model and
// its Floquet multipliers. classification reports the multiplier family
// with the largest modulus among those within 1e-3 of the unit circle
// (stable when none is); critical lists every family within tolerance, so
// codimension-two points carry both labels instead of a guessed priority.
struct MonodromyResult {
  Mat3 monodromy;
  std::array<std::complex<double>, 3> multipliers;
  double max_modulus = 0.0;
  BifurcationKind classification = BifurcationKind::stable;
  std::vector<BifurcationKind> critical;

  // "stable", "hopf", or e.g. "saddle-node+hopf" at codimension two.
  std::string classification_label() const;
};

// Integrates Phidot = A(t) Phi over one pump period with fixed-step classic
// Runge-Kutta. steps_per_period >= 256 (default 2048). Multipliers come
// from the closed-form characteristic cubic of the result. The exact
// product identity mu1*mu2*mu3 = exp(-2*pi*(gamma + 1/tau)/omega) holds to
// 1e-8 relative at the default step count.
MonodromyResult monodromy(const ResonatorParams& p, int steps_per_period = 2048);

// Pump amplitude in [bracket.first, bracket.second] where max_modulus
// crosses 1, located by bisection to |dFp| < 1e-7. Throws NoSignChange when
// max_modulus - 1 has the same sign at both ends.
struct ThresholdFt {
  double Fp = 0.0;
  MonodromyResult at_threshold;
};

ThresholdFt threshold_ft(const ResonatorParams& p,
                         std::pair<double, double> bracket,
                         int steps_per_period = 2048);

// threshold_ft mapped over an omega grid. Failures (no sign change in the
// bracket) are recorded per point and the scan continues. brackets must
// hold either one bracket (reused everywhere) or one per grid point.
// Deterministic output ordering by grid index regardless of thread count.
struct ScanPoint {
  double omega = 0.0;
  std::optional<double> Fp;
  std::string classification;  // empty on failure
  std::string error;           // empty on success
};

std::vector<ScanPoint> threshold_scan(ResonatorParams p,
                                      const std::vector<double>& omega_grid,
                                      const std::vector<std::pair<double, double>>& brackets,
                                      int steps_per_period = 2048,
                                      int threads = 0);

}  // namespace parasqueeze
