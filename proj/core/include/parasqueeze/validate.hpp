#pragma once

#include <string>
#include <vector>

namespace parasqueeze {

// One named internal-consistency check. Checks are cheap enough to run as
// a batch (the full set finishes in minutes) and are shared between the
// command line tool's validate subcommand and the test suite.
struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // one-line summary, includes the measured numbers
  double seconds = 0.0;
};

// Runs the full cross-method validation battery: the exact multiplier
// product identity on random parameter draws, the degenerate parametric
// amplifier limits, quadrature covariance identities, and the per-module
// invariant suites (reality symmetries, route agreements, reduction
// limits, determinism of the stochastic integrator).
std::vector<CheckResult> run_validation(int threads = 0);

// True when every check passed.
bool all_passed(const std::vector<CheckResult>& results);

}  // namespace parasqueeze
