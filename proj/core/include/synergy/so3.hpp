#pragma once

// Fixed-size 3-vector / 3x3 matrix algebra and rotation-group kernels.
//
// Conventions:
//   hat(w) v = w x v
//   psi(A)   = vex((A - A^T) / 2)
//   R_a(theta, u) = I + sin(theta) hat(u) + (1 - cos(theta)) hat(u)^2
//   quaternion (eta, eps) maps to I + 2 hat(eps)^2 + 2 eta hat(eps)

#include <array>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <random>

namespace synergy {

inline constexpr double kPi = 3.14159265358979323846;

// Type invariants are checked at this tolerance, algebraic identities are
// expected to hold to roughly 1e-12.
inline constexpr double kInvariantTol = 1e-9;
inline constexpr double kQuaternionNormTol = 1e-12;
inline constexpr double kAxisNormTol = 1e-12;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  static constexpr Vec3 zero() { return {}; }
  static constexpr Vec3 unit(int i) {
    return {i == 0 ? 1.0 : 0.0, i == 1 ? 1.0 : 0.0, i == 2 ? 1.0 : 0.0};
  }

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }

  friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend constexpr Vec3 operator/(const Vec3& a, double s) { return {a.x / s, a.y / s, a.z / s}; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;

  constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  constexpr Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  constexpr double squared_norm() const { return dot(*this); }
  Vec3 normalized() const { return *this / norm(); }
};

std::ostream& operator<<(std::ostream& os, const Vec3& v);

// General 3x3 matrix, row-major storage.
class Mat3 {
 public:
  constexpr Mat3() = default;
  constexpr explicit Mat3(const std::array<double, 9>& entries) : m_(entries) {}

  static constexpr Mat3 zero() { return Mat3{}; }
  static constexpr Mat3 identity() { return diag(1.0, 1.0, 1.0); }
  static constexpr Mat3 diag(double a, double b, double c) {
    return Mat3({a, 0, 0, 0, b, 0, 0, 0, c});
  }
  static constexpr Mat3 from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
    return Mat3({r0.x, r0.y, r0.z, r1.x, r1.y, r1.z, r2.x, r2.y, r2.z});
  }
  static constexpr Mat3 from_cols(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
    return Mat3({c0.x, c1.x, c2.x, c0.y, c1.y, c2.y, c0.z, c1.z, c2.z});
  }
  // a b^T
  static constexpr Mat3 outer(const Vec3& a, const Vec3& b) {
    return Mat3({a.x * b.x, a.x * b.y, a.x * b.z, a.y * b.x, a.y * b.y, a.y * b.z, a.z * b.x,
                 a.z * b.y, a.z * b.z});
  }

  constexpr double operator()(int r, int c) const { return m_[static_cast<std::size_t>(3 * r + c)]; }
  constexpr double& operator()(int r, int c) { return m_[static_cast<std::size_t>(3 * r + c)]; }
  constexpr const std::array<double, 9>& data() const { return m_; }

  constexpr Vec3 row(int r) const { return {(*this)(r, 0), (*this)(r, 1), (*this)(r, 2)}; }
  constexpr Vec3 col(int c) const { return {(*this)(0, c), (*this)(1, c), (*this)(2, c)}; }

  constexpr Mat3 transpose() const {
    Mat3 t;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) t(c, r) = (*this)(r, c);
    return t;
  }
  constexpr double trace() const { return m_[0] + m_[4] + m_[8]; }
  constexpr double det() const {
    return m_[0] * (m_[4] * m_[8] - m_[5] * m_[7]) - m_[1] * (m_[3] * m_[8] - m_[5] * m_[6]) +
           m_[2] * (m_[3] * m_[7] - m_[4] * m_[6]);
  }
  // Adjugate: adj(M) M = det(M) I.
  constexpr Mat3 adjugate() const {
    const Vec3 r0 = row(0), r1 = row(1), r2 = row(2);
    return Mat3::from_cols(r1.cross(r2), r2.cross(r0), r0.cross(r1));
  }
  // Throws DomainError when |det| is below 1e-300.
  Mat3 inverse() const;
  double frobenius_norm() const;

  constexpr Mat3& operator+=(const Mat3& o) {
    for (std::size_t i = 0; i < 9; ++i) m_[i] += o.m_[i];
    return *this;
  }
  constexpr Mat3& operator-=(const Mat3& o) {
    for (std::size_t i = 0; i < 9; ++i) m_[i] -= o.m_[i];
    return *this;
  }
  constexpr Mat3& operator*=(double s) {
    for (auto& e : m_) e *= s;
    return *this;
  }

  friend constexpr Mat3 operator+(Mat3 a, const Mat3& b) { return a += b; }
  friend constexpr Mat3 operator-(Mat3 a, const Mat3& b) { return a -= b; }
  friend constexpr Mat3 operator-(Mat3 a) { return a *= -1.0; }
  friend constexpr Mat3 operator*(Mat3 a, double s) { return a *= s; }
  friend constexpr Mat3 operator*(double s, Mat3 a) { return a *= s; }
  friend constexpr Mat3 operator*(const Mat3& a, const Mat3& b) {
    Mat3 p;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c)
        p(r, c) = a(r, 0) * b(0, c) + a(r, 1) * b(1, c) + a(r, 2) * b(2, c);
    return p;
  }
  friend constexpr Vec3 operator*(const Mat3& a, const Vec3& v) {
    return {a.row(0).dot(v), a.row(1).dot(v), a.row(2).dot(v)};
  }
  friend constexpr bool operator==(const Mat3&, const Mat3&) = default;

 private:
  std::array<double, 9> m_{};
};

std::ostream& operator<<(std::ostream& os, const Mat3& m);

// <<A, B>> = tr(A^T B)
constexpr double inner(const Mat3& a, const Mat3& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < 9; ++i) s += a.data()[i] * b.data()[i];
  return s;
}

// Proper rotation matrix. Construction through from_matrix() validates
// orthonormality and orientation; products of rotations are trusted.
class Rotation {
 public:
  Rotation() : m_(Mat3::identity()) {}

  static Rotation identity() { return Rotation(); }
  // Throws DomainError unless ||M^T M - I||_F < tol and det(M) > 0.
  static Rotation from_matrix(const Mat3& m, double tol = kInvariantTol);
  // Skips validation. Only for matrices that are rotations by construction.
  static Rotation trusted(const Mat3& m) { return Rotation(m); }

  const Mat3& matrix() const { return m_; }
  double operator()(int r, int c) const { return m_(r, c); }
  Rotation transpose() const { return Rotation(m_.transpose()); }
  Rotation inverse() const { return transpose(); }

  // ||R^T R - I||_F
  double orthonormality_error() const;

  friend Rotation operator*(const Rotation& a, const Rotation& b) {
    return Rotation(a.m_ * b.m_);
  }
  friend Vec3 operator*(const Rotation& r, const Vec3& v) { return r.m_ * v; }
  friend Mat3 operator*(const Rotation& r, const Mat3& m) { return r.m_ * m; }
  friend Mat3 operator*(const Mat3& m, const Rotation& r) { return m * r.m_; }
  friend bool operator==(const Rotation&, const Rotation&) = default;

 private:
  explicit Rotation(const Mat3& m) : m_(m) {}
  Mat3 m_;
};

class UnitQuaternion {
 public:
  UnitQuaternion() = default;

  // Throws DomainError unless |eta^2 + |eps|^2 - 1| < 1e-12.
  static UnitQuaternion from_components(double eta, const Vec3& eps);
  // Normalizes (eta, eps); throws DomainError on a zero 4-vector.
  static UnitQuaternion normalized(double eta, const Vec3& eps);
  static UnitQuaternion identity() { return {}; }

  double eta() const { return eta_; }
  const Vec3& eps() const { return eps_; }

  UnitQuaternion inverse() const { return UnitQuaternion(eta_, -eps_); }
  UnitQuaternion operator-() const { return UnitQuaternion(-eta_, -eps_); }

 private:
  UnitQuaternion(double eta, const Vec3& eps) : eta_(eta), eps_(eps) {}
  double eta_ = 1.0;
  Vec3 eps_{};
};

struct AxisAngle {
  double theta = 0.0;
  Vec3 axis{1.0, 0.0, 0.0};
};

Mat3 hat(const Vec3& w);
// Throws DomainError when ||S + S^T||_F >= 1e-9.
Vec3 vex(const Mat3& s);
Mat3 pa(const Mat3& a);
Vec3 psi(const Mat3& a);

// Throws DomainError when | ||u|| - 1 | >= 1e-12.
Rotation rodrigues(double theta, const Vec3& axis);
inline Rotation rodrigues(const AxisAngle& aa) { return rodrigues(aa.theta, aa.axis); }

Rotation quat_to_rot(const UnitQuaternion& q);
UnitQuaternion quat_mul(const UnitQuaternion& q1, const UnitQuaternion& q2);
UnitQuaternion rot_to_quat(const Rotation& r);

// theta in [0, pi]. The identity maps to (0, e1). At theta = pi the axis sign
// is chosen so that its first nonzero component is positive.
AxisAngle rot_to_axis_angle(const Rotation& r);

// Haar-distributed rotation from a normalized 4-d Gaussian quaternion.
Rotation random_rotation(std::mt19937_64& rng);
Vec3 random_unit_vector(std::mt19937_64& rng);

// Nearest rotation to M by the iteration M <- (M + M^-T) / 2. Throws
// DomainError when det(M) <= 0 or the iteration does not converge.
Rotation project_so3(const Mat3& m);

}  // namespace synergy
