#include "synergy/so3.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "synergy/error.hpp"

namespace synergy {

std::ostream& operator<<(std::ostream& os, const Vec3& v) {
  return os << '[' << v.x << ", " << v.y << ", " << v.z << ']';
}

std::ostream& operator<<(std::ostream& os, const Mat3& m) {
  os << '[';
  for (int r = 0; r < 3; ++r) {
    if (r > 0) os << "; ";
    os << m(r, 0) << ", " << m(r, 1) << ", " << m(r, 2);
  }
  return os << ']';
}

Mat3 Mat3::inverse() const {
  const double d = det();
  if (std::abs(d) < 1e-300) throw DomainError("Mat3::inverse: singular matrix");
  return adjugate() * (1.0 / d);
}

double Mat3::frobenius_norm() const { return std::sqrt(inner(*this, *this)); }

double Rotation::orthonormality_error() const {
  return (m_.transpose() * m_ - Mat3::identity()).frobenius_norm();
}

Rotation Rotation::from_matrix(const Mat3& m, double tol) {
  Rotation r(m);
  const double err = r.orthonormality_error();
  if (!(err < tol)) {
    throw DomainError("Rotation: matrix is not orthonormal (||R^T R - I||_F = " +
                      std::to_string(err) + ")");
  }
  if (!(m.det() > 0.0)) throw DomainError("Rotation: matrix is not a proper rotation");
  return r;
}

UnitQuaternion UnitQuaternion::from_components(double eta, const Vec3& eps) {
  const double n2 = eta * eta + eps.squared_norm();
  if (!(std::abs(n2 - 1.0) < kQuaternionNormTol)) {
    throw DomainError("UnitQuaternion: components are not unit norm");
  }
  return UnitQuaternion(eta, eps);
}

UnitQuaternion UnitQuaternion::normalized(double eta, const Vec3& eps) {
  const double n = std::sqrt(eta * eta + eps.squared_norm());
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("UnitQuaternion: zero or non-finite");
  return UnitQuaternion(eta / n, eps / n);
}

Mat3 hat(const Vec3& w) { return Mat3({0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0}); }

Vec3 vex(const Mat3& s) {
  const double asym = (s + s.transpose()).frobenius_norm();
  if (!(asym < kInvariantTol)) throw DomainError("vex: matrix is not skew-symmetric");
  return {s(2, 1), s(0, 2), s(1, 0)};
}

Mat3 pa(const Mat3& a) { return (a - a.transpose()) * 0.5; }

Vec3 psi(const Mat3& a) {
  return {0.5 * (a(2, 1) - a(1, 2)), 0.5 * (a(0, 2) - a(2, 0)), 0.5 * (a(1, 0) - a(0, 1))};
}

Rotation rodrigues(double theta, const Vec3& axis) {
  if (!(std::abs(axis.norm() - 1.0) < kAxisNormTol)) {
    throw DomainError("rodrigues: axis is not a unit vector");
  }
  const Mat3 k = hat(axis);
  // The double nearest pi is an exact half-turn, so R_a(pi, e_i) is diagonal.
  const bool half_turn = std::abs(theta) == kPi;
  const double s = half_turn ? 0.0 : std::sin(theta);
  const double c = half_turn ? -1.0 : std::cos(theta);
  return Rotation::trusted(Mat3::identity() + s * k + (1.0 - c) * (k * k));
}

Rotation quat_to_rot(const UnitQuaternion& q) {
  const Mat3 e = hat(q.eps());
  return Rotation::trusted(Mat3::identity() + 2.0 * (e * e) + 2.0 * q.eta() * e);
}

UnitQuaternion quat_mul(const UnitQuaternion& q1, const UnitQuaternion& q2) {
  const double eta = q1.eta() * q2.eta() - q1.eps().dot(q2.eps());
  const Vec3 eps = q1.eta() * q2.eps() + q2.eta() * q1.eps() + q1.eps().cross(q2.eps());
  return UnitQuaternion::normalized(eta, eps);
}

UnitQuaternion rot_to_quat(const Rotation& r) {
  // Shepperd's method: pivot on the largest of (tr, R00, R11, R22).
  const Mat3& m = r.matrix();
  const double tr = m.trace();
  const double d[4] = {tr, m(0, 0), m(1, 1), m(2, 2)};
  const int k = static_cast<int>(std::max_element(d, d + 4) - d);
  double eta = 0.0;
  Vec3 eps;
  if (k == 0) {
    const double s = 2.0 * std::sqrt(1.0 + tr);
    eta = 0.25 * s;
    eps = {(m(2, 1) - m(1, 2)) / s, (m(0, 2) - m(2, 0)) / s, (m(1, 0) - m(0, 1)) / s};
  } else {
    const int i = k - 1;
    const int j = (i + 1) % 3;
    const int l = (i + 2) % 3;
    const double s = 2.0 * std::sqrt(1.0 + m(i, i) - m(j, j) - m(l, l));
    eps[i] = 0.25 * s;
    eps[j] = (m(j, i) + m(i, j)) / s;
    eps[l] = (m(l, i) + m(i, l)) / s;
    eta = (m(l, j) - m(j, l)) / s;
  }
  if (eta < 0.0) return UnitQuaternion::normalized(-eta, -eps);
  return UnitQuaternion::normalized(eta, eps);
}

namespace {

Vec3 canonical_sign_first_nonzero(Vec3 v) {
  for (int i = 0; i < 3; ++i) {
    if (std::abs(v[i]) > 1e-12) return v[i] < 0.0 ? -v : v;
  }
  return v;
}

}  // namespace

AxisAngle rot_to_axis_angle(const Rotation& r) {
  const Mat3& m = r.matrix();
  const Vec3 s = psi(m);  // sin(theta) * axis
  const double c = 0.5 * (m.trace() - 1.0);
  const double sin_theta = s.norm();
  const double theta = std::atan2(sin_theta, c);

  if (sin_theta == 0.0 && c > 0.0) return {0.0, Vec3::unit(0)};

  if (c >= 0.0) return {theta, s / sin_theta};

  // Past pi/2 the symmetric part is better conditioned:
  // (R + R^T)/2 = cos(theta) I + (1 - cos(theta)) u u^T.
  const Mat3 b = (0.5 * (m + m.transpose()) - c * Mat3::identity()) * (1.0 / (1.0 - c));
  int k = 0;
  for (int i = 1; i < 3; ++i)
    if (b(i, i) > b(k, k)) k = i;
  Vec3 axis = b.col(k).normalized();
  if (sin_theta > 1e-12) {
    if (axis.dot(s) < 0.0) axis = -axis;
  } else {
    axis = canonical_sign_first_nonzero(axis);
  }
  return {theta, axis};
}

Rotation random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  for (;;) {
    const double w = g(rng);
    const Vec3 v{g(rng), g(rng), g(rng)};
    const double n2 = w * w + v.squared_norm();
    if (n2 > 1e-24) return quat_to_rot(UnitQuaternion::normalized(w, v));
  }
}

Vec3 random_unit_vector(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  for (;;) {
    const Vec3 v{g(rng), g(rng), g(rng)};
    const double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

Rotation project_so3(const Mat3& m) {
  if (!(m.det() > 0.0)) throw DomainError("project_so3: determinant must be positive");
  Mat3 x = m;
  for (int it = 0; it < 100; ++it) {
    const Mat3 next = 0.5 * (x + x.inverse().transpose());
    const double step = (next - x).frobenius_norm();
    x = next;
    if (step < 1e-14) return Rotation::from_matrix(x);
  }
  throw DomainError("project_so3: polar iteration did not converge");
}

}  // namespace synergy
