#include "parasqueeze/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "parasqueeze/errors.hpp"
#include "parasqueeze/parallel.hpp"

namespace parasqueeze {

const char* to_string(BifurcationKind k) {
  switch (k) {
    case BifurcationKind::stable: return "stable";
    case BifurcationKind::saddle_node: return "saddle-node";
    case BifurcationKind::period_doubling: return "period-doubling";
    case BifurcationKind::hopf: return "hopf";
  }
  return "stable";
}

std::string MonodromyResult::classification_label() const {
  if (critical.empty()) return "stable";
  std::string label;
  for (std::size_t i = 0; i < critical.size(); ++i) {
    if (i) label += '+';
    label += to_string(critical[i]);
  }
  return label;
}

MonodromyResult monodromy(const ResonatorParams& p, int steps_per_period) {
  p.validate();
  if (steps_per_period < 256)
    throw std::invalid_argument("monodromy needs at least 256 steps per period");

  const double dt = p.period() / steps_per_period;
  Mat3 phi = Mat3::identity();
  for (int i = 0; i < steps_per_period; ++i) {
    const double t = dt * i;
    const Mat3 a0 = system_matrix(p, t);
    const Mat3 ah = system_matrix(p, t + 0.5 * dt);
    const Mat3 a1 = system_matrix(p, t + dt);
    const Mat3 k1 = a0 * phi;
    const Mat3 k2 = ah * (phi + 0.5 * dt * k1);
    const Mat3 k3 = ah * (phi + 0.5 * dt * k2);
    const Mat3 k4 = a1 * (phi + dt * k3);
    phi += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  MonodromyResult r;
  r.monodromy = phi;
  r.multipliers = eigenvalues(phi);
  r.max_modulus = 0.0;
  for (const auto& mu : r.multipliers)
    r.max_modulus = std::max(r.max_modulus, std::abs(mu));

  // Group into families (a conjugate pair is one family; the solver returns
  // complex roots as exact conjugates after any real roots).
  struct Family {
    double modulus;
    BifurcationKind kind;
  };
  std::vector<Family> near_unit;
  constexpr double tol = 1e-3;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto mu = r.multipliers[i];
    if (mu.imag() != 0.0) {
      // First member of the conjugate pair (the solver emits exact
      // conjugates, real roots first); skip its mirror.
      if (std::abs(std::abs(mu) - 1.0) <= tol)
        near_unit.push_back({std::abs(mu), BifurcationKind::hopf});
      ++i;
      continue;
    }
    const double mod = std::abs(mu.real());
    if (std::abs(mod - 1.0) <= tol)
      near_unit.push_back({mod, mu.real() > 0.0 ? BifurcationKind::saddle_node
                                                : BifurcationKind::period_doubling});
  }
  std::stable_sort(near_unit.begin(), near_unit.end(),
                   [](const Family& a, const Family& b) { return a.modulus > b.modulus; });
  for (const Family& f : near_unit) r.critical.push_back(f.kind);
  r.classification = r.critical.empty() ? BifurcationKind::stable : r.critical.front();
  return r;
}

ThresholdFt threshold_ft(const ResonatorParams& p, std::pair<double, double> bracket,
                         int steps_per_period) {
  p.validate();
  if (!(bracket.second > bracket.first))
    throw std::invalid_argument("threshold bracket must have bracket.first < bracket.second");

  ResonatorParams q = p;
  auto excess = [&](double fp) {
    q.Fp = fp;
    return monodromy(q, steps_per_period).max_modulus - 1.0;
  };

  double lo = bracket.first;
  double hi = bracket.second;
  double flo = excess(lo);
  double fhi = excess(hi);
  if (flo == 0.0) hi = lo;
  else if (fhi == 0.0) lo = hi;
  else if ((flo > 0.0) == (fhi > 0.0))
    throw NoSignChange("stability margin has equal signs at both bracket ends");

  while (hi - lo > 1e-7) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = excess(mid);
    if (fmid == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }

  ThresholdFt out;
  out.Fp = 0.5 * (lo + hi);
  q.Fp = out.Fp;
  out.at_threshold = monodromy(q, steps_per_period);
  return out;
}

std::vector<ScanPoint> threshold_scan(ResonatorParams p,
                                      const std::vector<double>& omega_grid,
                                      const std::vector<std::pair<double, double>>& brackets,
                                      int steps_per_period, int threads) {
  if (omega_grid.empty()) return {};
  if (brackets.size() != 1 && brackets.size() != omega_grid.size())
    throw std::invalid_argument("need one shared bracket or one bracket per grid point");

  std::vector<ScanPoint> out(omega_grid.size());
  parallel_for(omega_grid.size(), threads, [&](std::size_t i) {
    ResonatorParams q = p;
    q.omega = omega_grid[i];
    ScanPoint& pt = out[i];
    pt.omega = q.omega;
    const auto& bracket = brackets.size() == 1 ? brackets[0] : brackets[i];
    try {
      ThresholdFt th = threshold_ft(q, bracket, steps_per_period);
      pt.Fp = th.Fp;
      pt.classification = th.at_threshold.classification_label();
    } catch (const Error& e) {
      pt.error = e.what();
    }
  });
  return out;
}

}  // namespace parasqueeze
