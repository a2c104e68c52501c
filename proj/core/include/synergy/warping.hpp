#pragma once

// Angular warping of the modified trace potential.
//
// For a weight A, a unit warping axis u and nonzero indexed gains k_q, the
// warp Gamma(R, q) = R R_a(theta_q(R), u) with theta_q(R) = 2 asin(k_q V_A(R))
// yields the family U(R, q) = V_A(Gamma(R, q)). With |k_q| below k_bound(A)
// every member is a potential function relative to {I} x Q whose undesired
// critical points are known in closed form; when min_v Delta(v, u) > 0 the
// family is synergistic and, for Q = {1, 2} with k_1 = -k_2, its gap is
// min_v sigma(k, lambda^W(v), Delta(v, u)).

#include <optional>
#include <vector>

#include "synergy/so3.hpp"
#include "synergy/trace_potential.hpp"

namespace synergy {

// Logic index q in Q = {1, ..., n}.
using LogicIndex = int;

class WarpedPotential {
 public:
  enum class GainPolicy {
    // |k_q| < k_bound(A) is required.
    Strict,
    // Only |k_q| < 1 / (2 lambda_max^W) is required, so theta_q stays defined.
    // Used to reproduce hand-picked gains that exceed the bound.
    AllowAboveBound,
  };

  // Throws DomainError for a non-unit axis and PreconditionError for zero,
  // repeated or inadmissible gains. gains[q - 1] is k_q.
  static WarpedPotential make(WeightMatrix weight, const Vec3& u, std::vector<double> gains,
                              GainPolicy policy = GainPolicy::Strict);

  const WeightMatrix& weight() const { return weight_; }
  const Vec3& u() const { return u_; }
  const std::vector<double>& gains() const { return gains_; }
  double gain(LogicIndex q) const;
  int index_count() const { return static_cast<int>(gains_.size()); }
  double k_bar() const { return k_bar_; }
  bool within_gain_bound() const;

  // min over E(A) of Delta(v, u); for a degenerate eigenplane the worst
  // in-plane direction is used.
  double delta_min() const { return delta_min_; }
  // Present when Q = {1, 2}, k_1 = -k_2 and the family is synergistic.
  std::optional<double> gap() const { return gap_; }

 private:
  WarpedPotential(WeightMatrix w) : weight_(std::move(w)) {}
  WeightMatrix weight_;
  Vec3 u_;
  std::vector<double> gains_;
  double k_bar_ = 0.0;
  double delta_min_ = 0.0;
  std::optional<double> gap_;
};

// k_bar = 1 / (2 lambda_max^W sqrt(6 - max(1, 4 xi^2)))
double k_bound(const WeightMatrix& w);

// 0.95 k_bar.
double default_gain(const WeightMatrix& w);
// Keeps the sign of k and caps its magnitude at 0.99 k_bar.
double clamp_gain(double k, const WeightMatrix& w);

double theta_q(const WarpedPotential& wp, const Rotation& r, LogicIndex q);
Rotation gamma(const WarpedPotential& wp, const Rotation& r, LogicIndex q);
// Theta(R, q) with d/dt Gamma = Gamma hat(Theta omega) along dR/dt = R hat(omega).
Mat3 big_theta(const WarpedPotential& wp, const Rotation& r, LogicIndex q);
// R^T grad theta_q(R) = 2 k_q P_a(A R) / sqrt(1 - k_q^2 V_A(R)^2)
Mat3 grad_theta_body(const WarpedPotential& wp, const Rotation& r, LogicIndex q);

double u_value(const WarpedPotential& wp, const Rotation& r, LogicIndex q);
// U(R, q) - min_p U(R, p)
double mu(const WarpedPotential& wp, const Rotation& r, LogicIndex q);
// argmin_p U(R, p), lowest index on ties.
LogicIndex argmin_index(const WarpedPotential& wp, const Rotation& r);
// psi(A Gamma(R, q)); U decreases fastest along -Theta^T of this vector.
Vec3 psi_gamma(const WarpedPotential& wp, const Rotation& r, LogicIndex q);

// All eigendirections of A paired with their Delta(v, u). A degenerate
// eigenplane contributes its worst direction (orthogonal to the in-plane part
// of u) first, then the best one.
struct EigenDirection {
  Vec3 v;
  double lambda_w = 0.0;
  double delta = 0.0;
  bool from_plane = false;
};
std::vector<EigenDirection> eigendirections(const WeightMatrix& w, const Vec3& u);

struct Feasibility {
  bool feasible = false;
  SpectrumClass spectrum = SpectrumClass::ThreeDistinct;
  std::vector<EigenDirection> directions;
  // Bounds on the squared eigen-coordinates of u that are equivalent to
  // Delta > 0 (TwoDistinct: lower < (u^T v_s)^2 < 1; ThreeDistinct:
  // lower < (u^T v_2)^2 < upper at the given (u^T v_1)^2).
  double lower = 0.0;
  double upper = 0.0;
  const char* reason = "";
};

Feasibility feasibility(const WeightMatrix& w, const Vec3& u);

struct OptimalAxis {
  Vec3 u;
  double min_delta = 0.0;
  // ThreeDistinct: whether lambda_2 >= lambda_1 lambda_3 / (lambda_3 - lambda_1)
  // selected the two-coordinate solution.
  bool boundary_branch = false;
};

// The axis maximizing min_v Delta(v, u). Components are non-negative in the
// eigenbasis. Throws PreconditionError when no synergistic axis exists
// (isotropic A, or a repeated largest eigenvalue).
OptimalAxis optimal_u(const WeightMatrix& w);

struct CriticalPoint {
  Rotation rotation;
  LogicIndex q = 1;
  Vec3 v;                 // eigendirection with Gamma(rotation, q) = R_a(pi, v)
  double lambda_w = 0.0;
  double delta = 0.0;
  double v_bar = 0.0;     // V_A(rotation)
  double theta = 0.0;     // theta_q(rotation)
  double u_value = 0.0;   // U(rotation, q) = 2 lambda^W
};

// V_bar = (-1 + sqrt(1 + 16 lambda^W k^2 Delta)) / (4 k^2 Delta)
double critical_v_bar(double k, double lambda_w, double delta);
// sigma = 8 k^2 V_bar^2 (1 - k^2 V_bar^2) Delta
double sigma(double k, double lambda_w, double delta);

// One point per (eigendirection, q). Throws PreconditionError when some
// Delta(v, u) = 0, or for an isotropic weight.
std::vector<CriticalPoint> critical_points(const WarpedPotential& wp);

bool synergism_check(const WarpedPotential& wp);

// Throws PreconditionError unless Q = {1, 2}, k_1 = -k_2 and the family is
// synergistic.
double gap(const WarpedPotential& wp);
// sigma(k, min lambda^W, min Delta), a lower bound on gap().
double gap_lower_bound(const WarpedPotential& wp);

}  // namespace synergy
