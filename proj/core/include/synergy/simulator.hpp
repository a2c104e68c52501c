#pragma once

// Closed-loop simulation of
//
//   dR/dt     = R hat(omega)
//   J domega/dt = hat(J omega) omega + tau
//   dR_hat/dt = R_hat hat(beta)
//
// under the hybrid law, the smooth baseline or no control. Flows use one
// classical Runge-Kutta step of fixed size followed by projection of R and
// R_hat onto SO(3). The jump set is tested before every flow step and jumps
// take priority on the overlap C n D.

#include <cstdint>
#include <optional>
#include <vector>

#include "synergy/hybrid_controller.hpp"
#include "synergy/so3.hpp"

namespace synergy {

enum class ControllerKind { Hybrid, Smooth, Passive };

struct PlantState {
  Rotation r;
  Vec3 omega;
  Rotation r_hat;
};

struct ScenarioConfig {
  Mat3 inertia = Mat3::diag(1.0, 1.0, 2.0);
  // References r_i and weights rho_ih; the b_i are regenerated from R.
  VectorMeasurementSet measurements;
  ControllerKind controller = ControllerKind::Hybrid;
  // Required for ControllerKind::Hybrid.
  std::optional<ControllerConfig> hybrid;

  Rotation r0;
  Vec3 omega0;
  Rotation r_hat0;
  Rotation r_d;
  LogicState q0;

  double dt = 1e-3;
  double t_end = 20.0;
  int max_jumps = 100;
  std::int64_t max_steps = 1'000'000;
  // Standard deviation of the Gaussian perturbation added to each b_i before
  // renormalization to |r_i|; 0 disables noise.
  double noise_std = 0.0;
  std::uint64_t seed = 0;

  // Throws PreconditionError on an inconsistent configuration.
  void validate() const;
};

struct LogRecord {
  double t = 0.0;
  int j = 0;
  int q1 = 1;
  int q2 = 1;
  double e1 = 0.0;
  double e2 = 0.0;
  Vec3 omega;
  Vec3 tau;
  double v = 0.0;
  double u1 = 0.0;
  double u2 = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;

  friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

// Records every dt along flows; a jump appends a second record with the same
// t, j + 1 and the post-jump logic state.
struct TrajectoryLog {
  std::vector<LogRecord> records;
  int jumps = 0;
  std::int64_t steps = 0;
};

// |I - X|_F / sqrt(8), equal to |eps| of the quaternion of X.
double error_metric(const Rotation& x);

// Hybrid: sum_h U_h(X_h, q_h) + 1/2 omega^T J omega. Otherwise the smooth
// counterpart sum_h V_{A_h}(X_h) + 1/2 omega^T J omega.
double lyapunov(const PlantState& s, const LogicState& logic, const ScenarioConfig& cfg);

// One Runge-Kutta step with the logic state held. noise, when given, holds one
// perturbation per measurement for the whole step.
PlantState flow_step(const PlantState& s, const LogicState& logic, const ScenarioConfig& cfg,
                     double dt, const std::vector<Vec3>* noise = nullptr);

// Body readings at attitude R with optional held noise.
VectorMeasurementSet measure(const ScenarioConfig& cfg, const Mat3& r,
                             const std::vector<Vec3>* noise = nullptr);

// Throws ZenoError when the jump or step budget is exhausted.
TrajectoryLog run(const ScenarioConfig& cfg);

// Runs the configurations concurrently, at most `threads` at a time
// (0 = hardware concurrency). Results keep the input order.
std::vector<TrajectoryLog> run_batch(const std::vector<ScenarioConfig>& cfgs, unsigned threads = 0);

// R_a(pi + eps, e_1): the quaternion vector part is cos(eps / 2) e_1 up to sign.
Rotation sweep_initial_attitude(double eps);

// One smooth-baseline run per eps from sweep_initial_attitude(eps); run i is
// seeded from (cfg.seed, i). Throws PreconditionError unless cfg selects the
// smooth baseline.
std::vector<TrajectoryLog> sweep_epsilon(const ScenarioConfig& cfg, const std::vector<double>& eps,
                                         unsigned threads = 0);

// First t with e2 < threshold.
std::optional<double> first_time_below(const TrajectoryLog& log, double threshold);
// Earliest t after which e2 stays below threshold until the end of the log.
std::optional<double> settling_time(const TrajectoryLog& log, double threshold);

}  // namespace synergy
