#include "synergy/trace_potential.hpp"

#include <algorithm>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "synergy/error.hpp"

namespace synergy {

std::string_view to_string(SpectrumClass c) {
  switch (c) {
    case SpectrumClass::Isotropic:
      return "Isotropic";
    case SpectrumClass::TwoDistinct:
      return "TwoDistinct";
    case SpectrumClass::ThreeDistinct:
      return "ThreeDistinct";
  }
  return "?";
}

namespace {

Vec3 canonical_sign(const Vec3& v) {
  int k = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(v[i]) > std::abs(v[k])) k = i;
  return v[k] < 0.0 ? -v : v;
}

}  // namespace

SymmetricEigen symmetric_eigen(const Mat3& a) {
  SymmetricEigen out{};
  const double off = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);

  if (off == 0.0) {
    std::array<int, 3> idx{0, 1, 2};
    std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) { return a(i, i) < a(j, j); });
    for (std::size_t k = 0; k < 3; ++k) {
      out.values[k] = a(idx[k], idx[k]);
      out.vectors[k] = Vec3::unit(idx[k]);
    }
    return out;
  }

  // Tridiagonal QR iteration stays accurate at repeated eigenvalues, where
  // closed-form trigonometric roots lose half the digits.
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = a(i, j);
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(m);
  for (int k = 0; k < 3; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    out.values[ku] = solver.eigenvalues()(k);
    const auto& c = solver.eigenvectors().col(k);
    out.vectors[ku] = canonical_sign(Vec3(c(0), c(1), c(2)).normalized());
  }
  return out;
}

WeightMatrix WeightMatrix::build(const Mat3& a, double tau_spec) {
  if (!((a - a.transpose()).frobenius_norm() < 1e-12)) {
    throw DomainError("WeightMatrix: A must be symmetric");
  }
  WeightMatrix w;
  w.a_ = a;
  w.trace_ = a.trace();
  w.tau_spec_ = tau_spec;
  w.eig_ = symmetric_eigen(a);

  auto& v = w.eig_.values;
  const double tol = tau_spec * std::max(1.0, std::abs(v[2]));
  const bool eq01 = std::abs(v[1] - v[0]) <= tol;
  const bool eq12 = std::abs(v[2] - v[1]) <= tol;
  if ((eq01 && eq12) || std::abs(v[2] - v[0]) <= tol) {
    w.class_ = SpectrumClass::Isotropic;
    const double m = (v[0] + v[1] + v[2]) / 3.0;
    v = {m, m, m};
    w.eig_.vectors = {Vec3::unit(0), Vec3::unit(1), Vec3::unit(2)};
  } else if (eq01 || eq12) {
    w.class_ = SpectrumClass::TwoDistinct;
    w.simple_index_ = eq01 ? 2 : 0;
    const std::size_t i = eq01 ? 0 : 1;
    const double m = 0.5 * (v[i] + v[i + 1]);
    v[i] = v[i + 1] = m;
  } else {
    w.class_ = SpectrumClass::ThreeDistinct;
  }

  if (!(w.w_min() > 0.0)) {
    throw PreconditionError("WeightMatrix: tr(A) I - A must be positive definite");
  }
  return w;
}

double WeightMatrix::w_eigenvalue_of(const Vec3& v) const {
  if (!(std::abs(v.norm() - 1.0) < 1e-9)) throw DomainError("eigendirection must be unit");
  const double lambda = v.dot(a_ * v);
  const double tol = 1e-8 * std::max(1.0, std::abs(eigenvalue(2)));
  if (!((a_ * v - lambda * v).norm() < tol)) {
    throw DomainError("vector is not an eigendirection of A");
  }
  return trace_ - lambda;
}

double v_a(const Mat3& a, const Rotation& r) {
  return a.trace() - inner(a.transpose(), r.matrix());
}

double v_a(const WeightMatrix& w, const Rotation& r) { return v_a(w.a(), r); }

Mat3 grad_v_a(const WeightMatrix& w, const Rotation& r) { return r * pa(w.a() * r); }

CriticalSet critical_set(const WeightMatrix& w) {
  CriticalSet cs;
  cs.points.push_back(Rotation::identity());
  switch (w.spectrum()) {
    case SpectrumClass::Isotropic:
      cs.whole_sphere = true;
      break;
    case SpectrumClass::TwoDistinct: {
      const int s = w.simple_index();
      cs.axes.push_back(w.eigenvector(s));
      const int p0 = s == 0 ? 1 : 0;
      cs.plane = std::array<Vec3, 2>{w.eigenvector(p0), w.eigenvector(p0 + 1)};
      break;
    }
    case SpectrumClass::ThreeDistinct:
      for (int i = 0; i < 3; ++i) cs.axes.push_back(w.eigenvector(i));
      break;
  }
  for (std::size_t k = 0; k < cs.axes.size(); ++k) cs.points.push_back(rodrigues(kPi, cs.axes[k]));
  return cs;
}

double delta(const WeightMatrix& w, const Vec3& v, const Vec3& u) {
  if (!(std::abs(u.norm() - 1.0) < 1e-9)) throw DomainError("delta: u must be unit");
  if (!(std::abs(v.norm() - 1.0) < 1e-9)) throw DomainError("delta: v must be unit");
  constexpr double kAlign = 1e-9;

  switch (w.spectrum()) {
    case SpectrumClass::Isotropic: {
      const double c = u.dot(v);
      return w.w_eigenvalue(0) * c * c;
    }
    case SpectrumClass::TwoDistinct: {
      const int s = w.simple_index();
      const Vec3& vs = w.eigenvector(s);
      const int d = s == 0 ? 1 : 0;
      const double ls = w.w_eigenvalue(s);
      const double ld = w.w_eigenvalue(d);
      const double as = u.dot(vs);
      const double proj = std::abs(v.dot(vs));
      if (proj > 1.0 - kAlign) return ls - ld * (1.0 - as * as);
      if (proj < kAlign) {
        // (1 - a_s^2) [ld - ls sin^2(phi)] with phi the angle between v and
        // the in-plane part of u; written without dividing by |u_perp|.
        const double perp2 = 1.0 - as * as;
        const double vu = v.dot(u);
        return perp2 * ld - ls * (perp2 - vu * vu);
      }
      throw DomainError("delta: v is neither the simple eigenvector nor in the eigenplane");
    }
    case SpectrumClass::ThreeDistinct: {
      int m = -1;
      for (int i = 0; i < 3; ++i)
        if (std::abs(v.dot(w.eigenvector(i))) > 1.0 - kAlign) m = i;
      if (m < 0) throw DomainError("delta: v is not an eigenvector of A");
      const int n = (m + 1) % 3;
      const int l = (m + 2) % 3;
      const double an = u.dot(w.eigenvector(n));
      const double al = u.dot(w.eigenvector(l));
      return w.w_eigenvalue(m) - an * an * w.w_eigenvalue(l) - al * al * w.w_eigenvalue(n);
    }
  }
  return 0.0;
}

}  // namespace synergy
