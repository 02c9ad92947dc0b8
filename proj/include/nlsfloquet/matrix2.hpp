#pragma once

#include <cmath>
#include <complex>

namespace nlsf {

using cplx = std::complex<double>;

inline constexpr cplx I_unit{0.0, 1.0};

/// Dense 2x2 complex matrix stored row-major.
struct Matrix2 {
  cplx m11{}, m12{}, m21{}, m22{};

  static Matrix2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Matrix2 zero() { return {}; }
  static Matrix2 diag(cplx a, cplx b) { return {a, 0.0, 0.0, b}; }
  static Matrix2 sigma1() { return {0.0, 1.0, 1.0, 0.0}; }
  static Matrix2 sigma3() { return {1.0, 0.0, 0.0, -1.0}; }

  cplx trace() const { return m11 + m22; }
  cplx det() const { return m11 * m22 - m12 * m21; }

  Matrix2 inverse() const {
    const cplx d = det();
    return {m22 / d, -m12 / d, -m21 / d, m11 / d};
  }
  Matrix2 conj() const {
    return {std::conj(m11), std::conj(m12), std::conj(m21), std::conj(m22)};
  }
  double max_abs() const {
    return std::max(std::max(std::abs(m11), std::abs(m12)),
                    std::max(std::abs(m21), std::abs(m22)));
  }
  bool finite() const {
    auto ok = [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
    return ok(m11) && ok(m12) && ok(m21) && ok(m22);
  }

  Matrix2& operator+=(const Matrix2& o) {
    m11 += o.m11; m12 += o.m12; m21 += o.m21; m22 += o.m22;
    return *this;
  }
  Matrix2& operator-=(const Matrix2& o) {
    m11 -= o.m11; m12 -= o.m12; m21 -= o.m21; m22 -= o.m22;
    return *this;
  }
  Matrix2& operator*=(cplx s) {
    m11 *= s; m12 *= s; m21 *= s; m22 *= s;
    return *this;
  }
};

inline Matrix2 operator+(Matrix2 a, const Matrix2& b) { return a += b; }
inline Matrix2 operator-(Matrix2 a, const Matrix2& b) { return a -= b; }
inline Matrix2 operator*(Matrix2 a, cplx s) { return a *= s; }
inline Matrix2 operator*(cplx s, Matrix2 a) { return a *= s; }
inline Matrix2 operator*(const Matrix2& a, const Matrix2& b) {
  return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
          a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
}

/// Largest entrywise modulus of a - b.
inline double max_abs_diff(const Matrix2& a, const Matrix2& b) { return (a - b).max_abs(); }

/// e^{i theta sigma3} for complex theta.
inline Matrix2 exp_i_sigma3(cplx theta) {
  return Matrix2::diag(std::exp(I_unit * theta), std::exp(-I_unit * theta));
}

}  // namespace nlsf
