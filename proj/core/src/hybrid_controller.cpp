#include "synergy/hybrid_controller.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "synergy/error.hpp"

namespace synergy {

namespace {

constexpr double kCollinearTol = 1e-9;

void check_index(int h) {
  if (h != 1 && h != 2) throw DomainError("measurement family index must be 1 or 2");
}

Rotation warp_rotation(const VectorMeasurementSet& ms, int h, const WarpedPotential& wp,
                       const Rotation& y, LogicIndex q) {
  const double s = wp.gain(q) * va_from_measurements(ms, h, y);
  if (!(std::abs(s) < 1.0)) throw DomainError("theta_q: |k_q V_A| >= 1, gain is inadmissible");
  return rodrigues(2.0 * std::asin(s), wp.u());
}

}  // namespace

VectorMeasurementSet VectorMeasurementSet::observed_at(const Rotation& r) const {
  VectorMeasurementSet out = *this;
  const Rotation rt = r.transpose();
  for (auto& m : out.entries) m.b = rt * m.r;
  return out;
}

bool spans_space(const VectorMeasurementSet& ms) {
  const std::size_t n = ms.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        const Vec3& a = ms.entries[i].r;
        const Vec3& b = ms.entries[j].r;
        const Vec3& c = ms.entries[k].r;
        const double scale = a.norm() * b.norm() * c.norm();
        if (scale > 0.0 && std::abs(a.cross(b).dot(c)) > kCollinearTol * scale) return true;
      }
  return false;
}

VectorMeasurementSet augment_measurements(const VectorMeasurementSet& ms, double rho1,
                                          double rho2) {
  if (spans_space(ms)) return ms;
  if (!(rho1 > 0.0) || !(rho2 > 0.0)) throw PreconditionError("augment_measurements: weights must be positive");
  for (std::size_t i = 0; i < ms.size(); ++i)
    for (std::size_t j = i + 1; j < ms.size(); ++j) {
      const Measurement& mi = ms.entries[i];
      const Measurement& mj = ms.entries[j];
      const Vec3 rc = mi.r.cross(mj.r);
      const double scale = mi.r.norm() * mj.r.norm();
      if (!(scale > 0.0) || !(rc.norm() > kCollinearTol * scale)) continue;
      const Vec3 bc = mi.b.cross(mj.b);
      if (!(bc.norm() > 0.0)) throw PreconditionError("augment_measurements: body readings are collinear");
      VectorMeasurementSet out = ms;
      out.entries.push_back({rc.normalized(), bc.normalized(), rho1, rho2});
      return out;
    }
  throw PreconditionError("augment_measurements: all reference vectors are collinear");
}

Mat3 build_a_h(const VectorMeasurementSet& ms, int h) {
  check_index(h);
  Mat3 a;
  for (const auto& m : ms.entries) {
    if (!(m.rho(h) > 0.0)) throw PreconditionError("build_a_h: weights rho_ih must be positive");
    a += m.rho(h) * Mat3::outer(m.r, m.r);
  }
  const double scale = std::max(1e-300, a.trace());
  if (!(a.det() > 1e-12 * scale * scale * scale)) {
    throw PreconditionError("build_a_h: A_h is singular, the references do not span R^3");
  }
  return a;
}

double va_from_measurements(const VectorMeasurementSet& ms, int h, const Rotation& y) {
  check_index(h);
  const Rotation yt = y.transpose();
  double v = 0.0;
  for (const auto& m : ms.entries) v += m.rho(h) * (m.b - yt * m.r).squared_norm();
  return 0.5 * v;
}

Vec3 psi_from_measurements(const VectorMeasurementSet& ms, int h, const Rotation& y) {
  check_index(h);
  const Rotation yt = y.transpose();
  Vec3 s;
  for (const auto& m : ms.entries) s += m.rho(h) * m.b.cross(yt * m.r);
  return 0.5 * (y * s);
}

double u_h_from_measurements(const VectorMeasurementSet& ms, int h, const WarpedPotential& wp,
                             const Rotation& y, LogicIndex q) {
  const Rotation m = y.transpose() * warp_rotation(ms, h, wp, y, q);
  double u = 0.0;
  for (const auto& e : ms.entries) u += e.rho(h) * (e.b - m * e.r).squared_norm();
  return 0.5 * u;
}

Vec3 psi_gamma_from_measurements(const VectorMeasurementSet& ms, int h, const WarpedPotential& wp,
                                 const Rotation& y, LogicIndex q) {
  const Rotation warp = warp_rotation(ms, h, wp, y, q);
  const Rotation m = y.transpose() * warp;
  Vec3 s;
  for (const auto& e : ms.entries) s += e.rho(h) * e.b.cross(m * e.r);
  return 0.5 * (warp.transpose() * (y * s));
}

Mat3 big_theta_from_measurements(const VectorMeasurementSet& ms, int h, const WarpedPotential& wp,
                                 const Rotation& y, LogicIndex q) {
  const double k = wp.gain(q);
  const double v = va_from_measurements(ms, h, y);
  const Rotation warp = warp_rotation(ms, h, wp, y, q);
  const Vec3 p = psi_from_measurements(ms, h, y);
  return warp.transpose().matrix() + Mat3::outer(wp.u(), p) * (4.0 * k / std::sqrt(1.0 - k * k * v * v));
}

ControllerConfig ControllerConfig::make(WarpedPotential wp1, WarpedPotential wp2, double delta1,
                                        double delta2, bool unclamped) {
  const WarpedPotential* wps[2] = {&wp1, &wp2};
  const double deltas[2] = {delta1, delta2};
  for (int i = 0; i < 2; ++i) {
    const auto& wp = *wps[i];
    const std::string h = std::to_string(i + 1);
    if (wp.index_count() != 2) throw PreconditionError("ControllerConfig: family " + h + " must have Q = {1, 2}");
    if (!(deltas[i] > 0.0)) throw PreconditionError("ControllerConfig: delta_" + h + " must be positive");
    if (unclamped) continue;
    if (!wp.gap()) {
      throw PreconditionError("ControllerConfig: family " + h + " is not synergistic with k_1 = -k_2");
    }
    if (!(deltas[i] < *wp.gap())) {
      throw PreconditionError("ControllerConfig: delta_" + h + " = " + std::to_string(deltas[i]) +
                              " must be below the gap " + std::to_string(*wp.gap()));
    }
  }
  return ControllerConfig(std::move(wp1), std::move(wp2), delta1, delta2);
}

Vec3 torque(const VectorMeasurementSet& ms, const ControllerConfig& cfg, const LogicState& logic,
            const Rotation& y1, const Rotation& y2) {
  const Rotation* ys[2] = {&y1, &y2};
  Vec3 tau;
  for (int h = 1; h <= 2; ++h) {
    const Rotation& y = *ys[h - 1];
    const auto& wp = cfg.wp(h);
    const Mat3 th = big_theta_from_measurements(ms, h, wp, y, logic[h]);
    tau -= 2.0 * (y.transpose() * (th.transpose() * psi_gamma_from_measurements(ms, h, wp, y, logic[h])));
  }
  return tau;
}

Vec3 beta(const VectorMeasurementSet& ms, const ControllerConfig& cfg, const LogicState& logic,
          const Rotation& y1) {
  const auto& wp = cfg.wp(1);
  const Mat3 th = big_theta_from_measurements(ms, 1, wp, y1, logic.q1);
  return y1.transpose() * (th.transpose() * psi_gamma_from_measurements(ms, 1, wp, y1, logic.q1));
}

Vec3 torque_from_state(const ControllerConfig& cfg, const LogicState& logic, const Rotation& r,
                       const Rotation& y1, const Rotation& y2) {
  const Rotation* ys[2] = {&y1, &y2};
  Vec3 tau;
  for (int h = 1; h <= 2; ++h) {
    const Rotation& y = *ys[h - 1];
    const Rotation x = r * y.transpose();
    const auto& wp = cfg.wp(h);
    tau -= 2.0 * (y.transpose() * (big_theta(wp, x, logic[h]).transpose() * psi_gamma(wp, x, logic[h])));
  }
  return tau;
}

Vec3 beta_from_state(const ControllerConfig& cfg, const LogicState& logic, const Rotation& r,
                     const Rotation& y1) {
  const Rotation x = r * y1.transpose();
  const auto& wp = cfg.wp(1);
  return y1.transpose() * (big_theta(wp, x, logic.q1).transpose() * psi_gamma(wp, x, logic.q1));
}

std::array<double, 2> mu_from_measurements(const VectorMeasurementSet& ms,
                                           const ControllerConfig& cfg, const LogicState& logic,
                                           const Rotation& y1, const Rotation& y2) {
  const Rotation* ys[2] = {&y1, &y2};
  std::array<double, 2> out{};
  for (int h = 1; h <= 2; ++h) {
    const auto& wp = cfg.wp(h);
    double lowest = std::numeric_limits<double>::infinity();
    double current = 0.0;
    for (LogicIndex p = 1; p <= wp.index_count(); ++p) {
      const double u = u_h_from_measurements(ms, h, wp, *ys[h - 1], p);
      lowest = std::min(lowest, u);
      if (p == logic[h]) current = u;
    }
    out[static_cast<std::size_t>(h - 1)] = current - lowest;
  }
  return out;
}

std::array<double, 2> mu_from_state(const ControllerConfig& cfg, const LogicState& logic,
                                    const Rotation& x1, const Rotation& x2) {
  return {mu(cfg.wp(1), x1, logic.q1), mu(cfg.wp(2), x2, logic.q2)};
}

bool in_flow_set(const ControllerConfig& cfg, const std::array<double, 2>& m) {
  return m[0] <= cfg.delta(1) && m[1] <= cfg.delta(2);
}

bool in_jump_set(const ControllerConfig& cfg, const std::array<double, 2>& m) {
  return m[0] >= cfg.delta(1) || m[1] >= cfg.delta(2);
}

bool in_flow_set(const ControllerConfig& cfg, const Rotation& x1, const Rotation& x2,
                 const LogicState& logic) {
  return in_flow_set(cfg, mu_from_state(cfg, logic, x1, x2));
}

bool in_jump_set(const ControllerConfig& cfg, const Rotation& x1, const Rotation& x2,
                 const LogicState& logic) {
  return in_jump_set(cfg, mu_from_state(cfg, logic, x1, x2));
}

LogicState jump_map_g(const ControllerConfig& cfg, const VectorMeasurementSet& ms,
                      const Rotation& y1, const Rotation& y2) {
  const Rotation* ys[2] = {&y1, &y2};
  LogicIndex q[2] = {1, 1};
  for (int h = 1; h <= 2; ++h) {
    const auto& wp = cfg.wp(h);
    double best = u_h_from_measurements(ms, h, wp, *ys[h - 1], 1);
    for (LogicIndex p = 2; p <= wp.index_count(); ++p) {
      const double u = u_h_from_measurements(ms, h, wp, *ys[h - 1], p);
      if (u < best) {
        best = u;
        q[h - 1] = p;
      }
    }
  }
  return {q[0], q[1]};
}

LogicState jump_map_g(const ControllerConfig& cfg, const Rotation& x1, const Rotation& x2) {
  return {argmin_index(cfg.wp(1), x1), argmin_index(cfg.wp(2), x2)};
}

Vec3 smooth_torque(const VectorMeasurementSet& ms, const Rotation& y1, const Rotation& y2) {
  const Rotation yt[2] = {y1.transpose(), y2.transpose()};
  Vec3 tau;
  for (int h = 1; h <= 2; ++h)
    for (const auto& m : ms.entries) tau -= m.rho(h) * m.b.cross(yt[h - 1] * m.r);
  return tau;
}

Vec3 smooth_beta(const VectorMeasurementSet& ms, const Rotation& y1) {
  const Rotation yt = y1.transpose();
  Vec3 b;
  for (const auto& m : ms.entries) b += m.rho1 * m.b.cross(yt * m.r);
  return b;
}

}  // namespace synergy
