#include "parasqueeze/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace parasqueeze {

double Vec3::norm_inf() const {
  return std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
}

Mat3 Mat3::identity() {
  Mat3 r;
  r.m[0][0] = r.m[1][1] = r.m[2][2] = 1.0;
  return r;
}

Mat3& Mat3::operator+=(const Mat3& o) {
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m[r][c] += o.m[r][c];
  return *this;
}

Mat3 operator*(double s, const Mat3& a) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.m[i][j] = s * a.m[i][j];
  return r;
}

Mat3 Mat3::operator*(const Mat3& o) const {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      r.m[i][j] = m[i][0] * o.m[0][j] + m[i][1] * o.m[1][j] + m[i][2] * o.m[2][j];
    }
  return r;
}

Vec3 Mat3::operator*(const Vec3& x) const {
  Vec3 r;
  for (int i = 0; i < 3; ++i)
    r.v[i] = m[i][0] * x.v[0] + m[i][1] * x.v[1] + m[i][2] * x.v[2];
  return r;
}

double Mat3::det() const {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

double Mat3::minor_sum() const {
  const double m00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
  const double m11 = m[0][0] * m[2][2] - m[0][2] * m[2][0];
  const double m22 = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  return m00 + m11 + m22;
}

namespace {

// Characteristic polynomial p(x) = x^3 + a x^2 + b x + c and derivative.
struct Cubic {
  double a, b, c;
  double eval(double x) const { return ((x + a) * x + b) * x + c; }
  std::complex<double> eval(std::complex<double> x) const {
    return ((x + a) * x + b) * x + c;
  }
  double deriv(double x) const { return (3.0 * x + 2.0 * a) * x + b; }
  std::complex<double> deriv(std::complex<double> x) const {
    return (3.0 * x + 2.0 * a) * x + b;
  }
};

double polish_real(const Cubic& p, double x) {
  const double d = p.deriv(x);
  if (d != 0.0) {
    const double step = p.eval(x) / d;
    if (std::isfinite(step)) x -= step;
  }
  return x;
}

std::complex<double> polish_complex(const Cubic& p, std::complex<double> x) {
  const std::complex<double> d = p.deriv(x);
  if (std::abs(d) > 0.0) {
    const std::complex<double> step = p.eval(x) / d;
    if (std::isfinite(step.real()) && std::isfinite(step.imag())) x -= step;
  }
  return x;
}

}  // namespace

std::array<std::complex<double>, 3> eigenvalues(const Mat3& a) {
  const Cubic p{-a.trace(), a.minor_sum(), -a.det()};

  // Depressed form y^3 + q1 y + q0 with x = y - a/3.
  const double shift = -p.a / 3.0;
  const double q1 = p.b - p.a * p.a / 3.0;
  const double q0 = p.c + p.a * (2.0 * p.a * p.a - 9.0 * p.b) / 27.0;
  const double disc = 0.25 * q0 * q0 + q1 * q1 * q1 / 27.0;

  std::array<std::complex<double>, 3> out;
  if (disc > 0.0) {
    // One real root, one conjugate pair. Evaluate the Cardano branch that
    // avoids cancellation, recovering the partner factor from u*w = -q1/3.
    const double s = std::sqrt(disc);
    double y;
    if (q0 <= 0.0) {
      const double u = std::cbrt(-0.5 * q0 + s);
      y = u + (u != 0.0 ? -q1 / (3.0 * u) : 0.0);
    } else {
      const double w = std::cbrt(-0.5 * q0 - s);
      y = w + (w != 0.0 ? -q1 / (3.0 * w) : 0.0);
    }
    double r = polish_real(p, y + shift);
    // Deflate by (x - r); the quadratic factor carries the pair.
    const double B = p.a + r;
    const double C = p.b + r * B;
    const double qd = B * B - 4.0 * C;
    if (qd < 0.0) {
      std::complex<double> z{-0.5 * B, 0.5 * std::sqrt(-qd)};
      z = polish_complex(p, z);
      out = {std::complex<double>{r, 0.0}, z, std::conj(z)};
    } else {
      // Rounding pushed the pair onto the real axis; report three reals.
      const double sq = std::sqrt(qd);
      const double r1 = polish_real(p, 0.5 * (-B + sq));
      const double r2 = polish_real(p, 0.5 * (-B - sq));
      out = {std::complex<double>{r, 0.0}, std::complex<double>{r1, 0.0},
             std::complex<double>{r2, 0.0}};
    }
  } else {
    // Three real roots (trigonometric form).
    const double mp = std::max(-q1 / 3.0, 0.0);
    const double rho = 2.0 * std::sqrt(mp);
    double cosarg = 0.0;
    if (mp > 0.0) cosarg = std::clamp(3.0 * q0 / (q1 * rho), -1.0, 1.0);
    const double theta = std::acos(cosarg) / 3.0;
    constexpr double two_pi_3 = 2.0943951023931953;
    for (int k = 0; k < 3; ++k) {
      const double y = rho * std::cos(theta - two_pi_3 * k);
      out[k] = polish_real(p, y + shift);
    }
  }
  return out;
}

}  // namespace parasqueeze
