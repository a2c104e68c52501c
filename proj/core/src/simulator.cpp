#include "synergy/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <thread>

#include "synergy/error.hpp"
#include "synergy/trace_potential.hpp"

namespace synergy {

namespace {

struct Derivative {
  Mat3 dr;
  Vec3 domega;
  Mat3 dr_hat;
};

struct RawState {
  Mat3 r;
  Vec3 omega;
  Mat3 r_hat;
};

struct Inputs {
  Vec3 tau;
  Vec3 beta;
};

Inputs control(const ScenarioConfig& cfg, const LogicState& logic, const Mat3& r, const Mat3& r_hat,
               const std::vector<Vec3>* noise) {
  const VectorMeasurementSet ms = measure(cfg, r, noise);
  const Rotation y1 = Rotation::trusted(r_hat);
  switch (cfg.controller) {
    case ControllerKind::Hybrid:
      return {torque(ms, *cfg.hybrid, logic, y1, cfg.r_d), beta(ms, *cfg.hybrid, logic, y1)};
    case ControllerKind::Smooth:
      return {smooth_torque(ms, y1, cfg.r_d), smooth_beta(ms, y1)};
    case ControllerKind::Passive:
      break;
  }
  return {};
}

Derivative derivative(const RawState& x, const LogicState& logic, const ScenarioConfig& cfg,
                      const Mat3& j_inv, const std::vector<Vec3>* noise) {
  const Inputs in = control(cfg, logic, x.r, x.r_hat, noise);
  const Vec3 jw = cfg.inertia * x.omega;
  return {x.r * hat(x.omega), j_inv * (jw.cross(x.omega) + in.tau), x.r_hat * hat(in.beta)};
}

RawState advance(const RawState& x, const Derivative& d, double h) {
  return {x.r + h * d.dr, x.omega + h * d.domega, x.r_hat + h * d.dr_hat};
}

std::vector<Vec3> draw_noise(std::mt19937_64& rng, std::size_t n, double std_dev) {
  std::normal_distribution<double> g(0.0, std_dev);
  std::vector<Vec3> out(n);
  for (auto& v : out) v = {g(rng), g(rng), g(rng)};
  return out;
}

std::array<double, 2> potentials(const PlantState& s, const LogicState& logic,
                                 const ScenarioConfig& cfg) {
  const Rotation x1 = s.r * s.r_hat.transpose();
  const Rotation x2 = s.r * cfg.r_d.transpose();
  if (cfg.controller == ControllerKind::Hybrid) {
    return {u_value(cfg.hybrid->wp(1), x1, logic.q1), u_value(cfg.hybrid->wp(2), x2, logic.q2)};
  }
  return {v_a(build_a_h(cfg.measurements, 1), x1), v_a(build_a_h(cfg.measurements, 2), x2)};
}

double kinetic(const PlantState& s, const ScenarioConfig& cfg) {
  return 0.5 * s.omega.dot(cfg.inertia * s.omega);
}

LogRecord make_record(double t, int j, const PlantState& s, const LogicState& logic,
                      const ScenarioConfig& cfg) {
  LogRecord rec;
  rec.t = t;
  rec.j = j;
  rec.q1 = logic.q1;
  rec.q2 = logic.q2;
  const Rotation x1 = s.r * s.r_hat.transpose();
  const Rotation x2 = s.r * cfg.r_d.transpose();
  rec.e1 = error_metric(x1);
  rec.e2 = error_metric(x2);
  rec.omega = s.omega;
  rec.tau = control(cfg, logic, s.r.matrix(), s.r_hat.matrix(), nullptr).tau;
  const auto u = potentials(s, logic, cfg);
  rec.u1 = u[0];
  rec.u2 = u[1];
  rec.v = u[0] + u[1] + kinetic(s, cfg);
  if (cfg.controller == ControllerKind::Hybrid) {
    const auto m = mu_from_state(*cfg.hybrid, logic, x1, x2);
    rec.mu1 = m[0];
    rec.mu2 = m[1];
  }
  return rec;
}

}  // namespace

void ScenarioConfig::validate() const {
  if (!((inertia - inertia.transpose()).frobenius_norm() < 1e-12)) {
    throw PreconditionError("inertia must be symmetric");
  }
  const Mat3& j = inertia;
  const double m1 = j(0, 0);
  const double m2 = j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0);
  if (!(m1 > 0.0 && m2 > 0.0 && j.det() > 0.0)) throw PreconditionError("inertia must be positive definite");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionError("dt must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw PreconditionError("t_end must be non-negative");
  if (max_jumps < 0 || max_steps <= 0) throw PreconditionError("jump and step budgets must be positive");
  if (!(noise_std >= 0.0)) throw PreconditionError("noise_std must be non-negative");
  if (measurements.size() < 2) throw PreconditionError("at least two vector measurements are required");
  if (controller == ControllerKind::Hybrid) {
    if (!hybrid) throw PreconditionError("hybrid controller selected without a controller configuration");
    if (q0.q1 < 1 || q0.q1 > 2 || q0.q2 < 1 || q0.q2 > 2) throw PreconditionError("q0 must lie in {1, 2}");
    for (int h = 1; h <= 2; ++h) {
      const Mat3 a = build_a_h(measurements, h);
      if (!((a - hybrid->wp(h).weight().a()).frobenius_norm() <= 1e-12 * (1.0 + a.frobenius_norm()))) {
        throw PreconditionError("controller weight A_" + std::to_string(h) +
                                " does not match the measurement weights");
      }
    }
  } else {
    build_a_h(measurements, 1);
    build_a_h(measurements, 2);
  }
}

double error_metric(const Rotation& x) {
  return std::min(1.0, (Mat3::identity() - x.matrix()).frobenius_norm() / std::sqrt(8.0));
}

double lyapunov(const PlantState& s, const LogicState& logic, const ScenarioConfig& cfg) {
  const auto u = potentials(s, logic, cfg);
  return u[0] + u[1] + kinetic(s, cfg);
}

VectorMeasurementSet measure(const ScenarioConfig& cfg, const Mat3& r, const std::vector<Vec3>* noise) {
  VectorMeasurementSet ms = cfg.measurements;
  const Mat3 rt = r.transpose();
  for (std::size_t i = 0; i < ms.entries.size(); ++i) {
    auto& m = ms.entries[i];
    m.b = rt * m.r;
    if (noise) {
      const Vec3 perturbed = m.b + (*noise)[i];
      const double n = perturbed.norm();
      if (n > 0.0) m.b = perturbed * (m.r.norm() / n);
    }
  }
  return ms;
}

PlantState flow_step(const PlantState& s, const LogicState& logic, const ScenarioConfig& cfg,
                     double dt, const std::vector<Vec3>* noise) {
  const Mat3 j_inv = cfg.inertia.inverse();
  const RawState x0{s.r.matrix(), s.omega, s.r_hat.matrix()};
  const Derivative k1 = derivative(x0, logic, cfg, j_inv, noise);
  const Derivative k2 = derivative(advance(x0, k1, 0.5 * dt), logic, cfg, j_inv, noise);
  const Derivative k3 = derivative(advance(x0, k2, 0.5 * dt), logic, cfg, j_inv, noise);
  const Derivative k4 = derivative(advance(x0, k3, dt), logic, cfg, j_inv, noise);
  const double c = dt / 6.0;
  const Mat3 r = x0.r + c * (k1.dr + 2.0 * k2.dr + 2.0 * k3.dr + k4.dr);
  const Vec3 w = x0.omega + c * (k1.domega + 2.0 * k2.domega + 2.0 * k3.domega + k4.domega);
  const Mat3 rh = x0.r_hat + c * (k1.dr_hat + 2.0 * k2.dr_hat + 2.0 * k3.dr_hat + k4.dr_hat);
  return {project_so3(r), w, project_so3(rh)};
}

TrajectoryLog run(const ScenarioConfig& cfg) {
  cfg.validate();
  TrajectoryLog log;
  PlantState s{cfg.r0, cfg.omega0, cfg.r_hat0};
  LogicState logic = cfg.q0;
  const bool hybrid = cfg.controller == ControllerKind::Hybrid;

  const auto n_steps = static_cast<std::int64_t>(std::ceil(cfg.t_end / cfg.dt - 1e-9));
  if (n_steps > cfg.max_steps) {
    throw ZenoError("step budget exceeded: t_end / dt = " + std::to_string(n_steps) + " > " +
                    std::to_string(cfg.max_steps));
  }
  log.records.reserve(static_cast<std::size_t>(n_steps) + 8);

  std::mt19937_64 rng(cfg.seed);
  std::vector<Vec3> noise;
  const std::vector<Vec3>* noise_ptr = nullptr;

  double t = 0.0;
  log.records.push_back(make_record(t, 0, s, logic, cfg));
  for (std::int64_t step = 0;; ++step) {
    if (cfg.noise_std > 0.0) {
      noise = draw_noise(rng, cfg.measurements.size(), cfg.noise_std);
      noise_ptr = &noise;
    }
    if (hybrid) {
      const VectorMeasurementSet ms = measure(cfg, s.r.matrix(), noise_ptr);
      const auto m = mu_from_measurements(ms, *cfg.hybrid, logic, s.r_hat, cfg.r_d);
      if (in_jump_set(*cfg.hybrid, m)) {
        if (log.jumps >= cfg.max_jumps) {
          throw ZenoError("jump budget of " + std::to_string(cfg.max_jumps) +
                          " exhausted at t = " + std::to_string(t));
        }
        logic = jump_map_g(*cfg.hybrid, ms, s.r_hat, cfg.r_d);
        ++log.jumps;
        log.records.push_back(make_record(t, log.jumps, s, logic, cfg));
      }
    }
    if (step >= n_steps) break;
    s = flow_step(s, logic, cfg, cfg.dt, noise_ptr);
    ++log.steps;
    t = static_cast<double>(step + 1) * cfg.dt;
    log.records.push_back(make_record(t, log.jumps, s, logic, cfg));
  }
  return log;
}

std::vector<TrajectoryLog> run_batch(const std::vector<ScenarioConfig>& cfgs, unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<TrajectoryLog> out(cfgs.size());
  for (std::size_t begin = 0; begin < cfgs.size(); begin += threads) {
    const std::size_t end = std::min(cfgs.size(), begin + threads);
    std::vector<std::future<TrajectoryLog>> futures;
    for (std::size_t i = begin; i < end; ++i) {
      futures.push_back(std::async(std::launch::async, [&cfgs, i] { return run(cfgs[i]); }));
    }
    for (std::size_t i = begin; i < end; ++i) out[i] = futures[i - begin].get();
  }
  return out;
}

Rotation sweep_initial_attitude(double eps) { return rodrigues(kPi + eps, Vec3::unit(0)); }

std::vector<TrajectoryLog> sweep_epsilon(const ScenarioConfig& cfg, const std::vector<double>& eps,
                                         unsigned threads) {
  if (cfg.controller != ControllerKind::Smooth) {
    throw PreconditionError("sweep_epsilon: the smooth baseline must be selected");
  }
  std::vector<ScenarioConfig> cfgs;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    ScenarioConfig c = cfg;
    c.r0 = sweep_initial_attitude(eps[i]);
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::uint32_t raw[2];
    seq.generate(raw, raw + 2);
    c.seed = (static_cast<std::uint64_t>(raw[0]) << 32) | raw[1];
    cfgs.push_back(std::move(c));
  }
  return run_batch(cfgs, threads);
}

std::optional<double> first_time_below(const TrajectoryLog& log, double threshold) {
  for (const auto& r : log.records)
    if (r.e2 < threshold) return r.t;
  return std::nullopt;
}

std::optional<double> settling_time(const TrajectoryLog& log, double threshold) {
  std::optional<double> t;
  for (const auto& r : log.records) {
    if (r.e2 < threshold) {
      if (!t) t = r.t;
    } else {
      t.reset();
    }
  }
  return t;
}

}  // namespace synergy
