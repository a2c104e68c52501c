#pragma once

// The modified trace potential V_A(R) = tr(A (I - R)) and the spectral data of
// its weight matrix A.

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "synergy/so3.hpp"

namespace synergy {

enum class SpectrumClass { Isotropic, TwoDistinct, ThreeDistinct };

std::string_view to_string(SpectrumClass c);

struct SymmetricEigen {
  std::array<double, 3> values;   // ascending
  std::array<Vec3, 3> vectors;    // orthonormal, vectors[i] pairs with values[i]
};

// Closed-form eigendecomposition of a symmetric 3x3 matrix: trigonometric
// roots of the characteristic polynomial, one Newton polish per root,
// eigenvectors from cross products of shifted rows. Each eigenvector has its
// largest-magnitude component positive.
SymmetricEigen symmetric_eigen(const Mat3& a);

// Symmetric weight A with tr(A) I - A positive definite.
class WeightMatrix {
 public:
  static constexpr double kDefaultSpectrumTol = 1e-9;

  // Throws DomainError if A is not symmetric (||A - A^T||_F >= 1e-12) and
  // PreconditionError if W = tr(A) I - A is not positive definite.
  static WeightMatrix build(const Mat3& a, double tau_spec = kDefaultSpectrumTol);

  const Mat3& a() const { return a_; }
  Mat3 w() const { return a_.trace() * Mat3::identity() - a_; }

  const std::array<double, 3>& eigenvalues() const { return eig_.values; }
  const std::array<Vec3, 3>& eigenvectors() const { return eig_.vectors; }
  const Vec3& eigenvector(int i) const { return eig_.vectors[static_cast<std::size_t>(i)]; }
  double eigenvalue(int i) const { return eig_.values[static_cast<std::size_t>(i)]; }
  // lambda_i^W = tr(A) - lambda_i^A, so descending when A's are ascending.
  double w_eigenvalue(int i) const { return trace_ - eigenvalue(i); }
  std::array<double, 3> w_eigenvalues() const {
    return {w_eigenvalue(0), w_eigenvalue(1), w_eigenvalue(2)};
  }

  double w_max() const { return w_eigenvalue(0); }
  double w_min() const { return w_eigenvalue(2); }
  // xi = lambda_min^W / lambda_max^W
  double xi() const { return w_min() / w_max(); }

  SpectrumClass spectrum() const { return class_; }
  double spectrum_tol() const { return tau_spec_; }

  // TwoDistinct only: index (0 or 2) of the simple eigenvalue; the other two
  // indices span the degenerate eigenplane.
  int simple_index() const { return simple_index_; }

  // lambda^W of the eigendirection v; throws DomainError if v is not a unit
  // eigenvector of A.
  double w_eigenvalue_of(const Vec3& v) const;

 private:
  WeightMatrix() = default;
  Mat3 a_;
  SymmetricEigen eig_{};
  double trace_ = 0.0;
  double tau_spec_ = kDefaultSpectrumTol;
  SpectrumClass class_ = SpectrumClass::ThreeDistinct;
  int simple_index_ = -1;
};

double v_a(const WeightMatrix& w, const Rotation& r);
// V_A for a raw symmetric A, without the spectral bookkeeping.
double v_a(const Mat3& a, const Rotation& r);

// grad V_A(R) = R P_a(A R), an element of T_R SO(3).
Mat3 grad_v_a(const WeightMatrix& w, const Rotation& r);

// {I} together with R_a(pi, E(A)). Continua of eigendirections are flagged,
// not enumerated.
struct CriticalSet {
  std::vector<Rotation> points;        // I first, then R_a(pi, axes[k])
  std::vector<Vec3> axes;              // isolated unit eigendirections
  std::optional<std::array<Vec3, 2>> plane;  // orthonormal basis of a degenerate eigenplane
  bool whole_sphere = false;           // every unit vector is an eigendirection
};

CriticalSet critical_set(const WeightMatrix& w);

// Delta(v, u) for an eigendirection v of A and a unit warping axis u, so that
//   V_A(R_a(pi, v) R_a(theta, u)) = 2 lambda^W(v) - 2 sin^2(theta / 2) Delta(v, u).
// Throws DomainError if v is not an eigendirection compatible with the
// spectrum class or u is not unit.
double delta(const WeightMatrix& w, const Vec3& v, const Vec3& u);

}  // namespace synergy
