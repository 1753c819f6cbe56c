#pragma once

#include <array>
#include <complex>

namespace parasqueeze {

struct Vec3 {
  double v[3]{};

  double& operator[](int i) { return v[i]; }
  double operator[](int i) const { return v[i]; }

  Vec3& operator+=(const Vec3& o) {
    v[0] += o.v[0];
    v[1] += o.v[1];
    v[2] += o.v[2];
    return *this;
  }
  friend Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend Vec3 operator*(double s, const Vec3& a) {
    return {s * a.v[0], s * a.v[1], s * a.v[2]};
  }
  double norm_inf() const;
};

struct Mat3 {
  double m[3][3]{};

  static Mat3 identity();

  double* operator[](int r) { return m[r]; }
  const double* operator[](int r) const { return m[r]; }

  Mat3& operator+=(const Mat3& o);
  friend Mat3 operator+(Mat3 a, const Mat3& b) { return a += b; }
  friend Mat3 operator*(double s, const Mat3& a);
  Mat3 operator*(const Mat3& o) const;
  Vec3 operator*(const Vec3& x) const;

  double trace() const { return m[0][0] + m[1][1] + m[2][2]; }
  double det() const;
  // Sum of the three principal 2x2 minors (second invariant).
  double minor_sum() const;
};

// Roots of the characteristic polynomial of a real 3x3 matrix, computed
// from the closed-form cubic solution (trigonometric for three real roots,
// Cardano otherwise) with one Newton polish step per root. A real cubic has
// either three real roots or one real root and a conjugate pair; complex
// roots are returned as exact conjugates, ordered real roots first.
std::array<std::complex<double>, 3> eigenvalues(const Mat3& a);

}  // namespace parasqueeze
