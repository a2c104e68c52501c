#pragma once

// Velocity-free hybrid attitude controller driven by inertial vector
// measurements.
//
// With body readings b_i = R^T r_i, weights A_h = sum_i rho_ih r_i r_i^T and
// the auxiliary attitudes Y_1 = R_hat, Y_2 = R_d, the attitude errors are
// X_h = R Y_h^T. Every quantity the law needs is available from (b_i, r_i,
// rho_ih, Y_h) alone:
//
//   V_{A_h}(X_h)        = 1/2 sum rho_ih |b_i - Y_h^T r_i|^2
//   psi(A_h X_h)        = 1/2 Y_h sum rho_ih (b_i x Y_h^T r_i)
//   U_h(X_h, q)         = 1/2 sum rho_ih |b_i - b_hat_ih(q)|^2
//   psi(A_h Gamma_h)    = 1/2 R_a^T Y_h sum rho_ih (b_i x b_hat_ih(q))
//
// with b_hat_ih(q) = Y_h^T R_a(theta_hq(X_h), u_h) r_i. The "_from_state"
// functions evaluate the same quantities through X_h and serve as oracles.

#include <array>
#include <optional>
#include <vector>

#include "synergy/so3.hpp"
#include "synergy/warping.hpp"

namespace synergy {

struct Measurement {
  Vec3 r;             // inertial reference
  Vec3 b;             // body-frame reading
  double rho1 = 1.0;  // weight in A_1
  double rho2 = 1.0;  // weight in A_2

  double rho(int h) const { return h == 1 ? rho1 : rho2; }
};

struct VectorMeasurementSet {
  std::vector<Measurement> entries;

  std::size_t size() const { return entries.size(); }
  // Copy with every b_i replaced by R^T r_i.
  VectorMeasurementSet observed_at(const Rotation& r) const;
};

// True when the references span R^3, which makes every A_h positive definite.
bool spans_space(const VectorMeasurementSet& ms);

// Adds r = r_i x r_j / |r_i x r_j| (and the matching b) for the first
// non-collinear pair when the references do not already span R^3. Throws
// PreconditionError when all references are collinear.
VectorMeasurementSet augment_measurements(const VectorMeasurementSet& ms, double rho1 = 1.0,
                                          double rho2 = 1.0);

// sum_i rho_ih r_i r_i^T. Throws PreconditionError if the result is singular.
Mat3 build_a_h(const VectorMeasurementSet& ms, int h);

double va_from_measurements(const VectorMeasurementSet& ms, int h, const Rotation& y);
Vec3 psi_from_measurements(const VectorMeasurementSet& ms, int h, const Rotation& y);
double u_h_from_measurements(const VectorMeasurementSet& ms, int h, const WarpedPotential& wp,
                             const Rotation& y, LogicIndex q);
Vec3 psi_gamma_from_measurements(const VectorMeasurementSet& ms, int h, const WarpedPotential& wp,
                                 const Rotation& y, LogicIndex q);
Mat3 big_theta_from_measurements(const VectorMeasurementSet& ms, int h, const WarpedPotential& wp,
                                 const Rotation& y, LogicIndex q);

struct LogicState {
  LogicIndex q1 = 1;
  LogicIndex q2 = 1;

  LogicIndex operator[](int h) const { return h == 1 ? q1 : q2; }
  friend bool operator==(const LogicState&, const LogicState&) = default;
};

class ControllerConfig {
 public:
  // Requires Q = {1, 2} for both families and 0 < delta_h < gap(wp_h).
  // With unclamped the gap bound is not enforced, only delta_h > 0.
  static ControllerConfig make(WarpedPotential wp1, WarpedPotential wp2, double delta1,
                               double delta2, bool unclamped = false);

  const WarpedPotential& wp(int h) const { return h == 1 ? wp1_ : wp2_; }
  double delta(int h) const { return h == 1 ? delta1_ : delta2_; }
  double min_delta() const { return delta1_ < delta2_ ? delta1_ : delta2_; }

 private:
  ControllerConfig(WarpedPotential wp1, WarpedPotential wp2, double d1, double d2)
      : wp1_(std::move(wp1)), wp2_(std::move(wp2)), delta1_(d1), delta2_(d2) {}
  WarpedPotential wp1_;
  WarpedPotential wp2_;
  double delta1_;
  double delta2_;
};

// tau = -2 sum_h Y_h^T Theta_h^T psi(A_h Gamma_h)
Vec3 torque(const VectorMeasurementSet& ms, const ControllerConfig& cfg, const LogicState& logic,
            const Rotation& y1, const Rotation& y2);
// beta = Y_1^T Theta_1^T psi(A_1 Gamma_1)
Vec3 beta(const VectorMeasurementSet& ms, const ControllerConfig& cfg, const LogicState& logic,
          const Rotation& y1);

// Same law evaluated through X_h = R Y_h^T.
Vec3 torque_from_state(const ControllerConfig& cfg, const LogicState& logic, const Rotation& r,
                       const Rotation& y1, const Rotation& y2);
Vec3 beta_from_state(const ControllerConfig& cfg, const LogicState& logic, const Rotation& r,
                     const Rotation& y1);

// (mu_1, mu_2) with mu_h = U_h(X_h, q_h) - min_p U_h(X_h, p).
std::array<double, 2> mu_from_measurements(const VectorMeasurementSet& ms,
                                           const ControllerConfig& cfg, const LogicState& logic,
                                           const Rotation& y1, const Rotation& y2);
std::array<double, 2> mu_from_state(const ControllerConfig& cfg, const LogicState& logic,
                                    const Rotation& x1, const Rotation& x2);

// C: mu_1 <= delta_1 and mu_2 <= delta_2.  D: mu_1 >= delta_1 or mu_2 >= delta_2.
bool in_flow_set(const ControllerConfig& cfg, const std::array<double, 2>& mu);
bool in_jump_set(const ControllerConfig& cfg, const std::array<double, 2>& mu);
bool in_flow_set(const ControllerConfig& cfg, const Rotation& x1, const Rotation& x2,
                 const LogicState& logic);
bool in_jump_set(const ControllerConfig& cfg, const Rotation& x1, const Rotation& x2,
                 const LogicState& logic);

// q_h = argmin_p U_h(X_h, p), lowest index on ties.
LogicState jump_map_g(const ControllerConfig& cfg, const VectorMeasurementSet& ms,
                      const Rotation& y1, const Rotation& y2);
LogicState jump_map_g(const ControllerConfig& cfg, const Rotation& x1, const Rotation& x2);

// Smooth baseline: tau = -sum_h sum_i rho_ih (b_i x Y_h^T r_i),
// beta = sum_i rho_i1 (b_i x Y_1^T r_i).
Vec3 smooth_torque(const VectorMeasurementSet& ms, const Rotation& y1, const Rotation& y2);
Vec3 smooth_beta(const VectorMeasurementSet& ms, const Rotation& y1);

}  // namespace synergy
