#include "synergy/warping.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "synergy/error.hpp"

namespace synergy {

double k_bound(const WeightMatrix& w) {
  const double xi = w.xi();
  return 1.0 / (2.0 * w.w_max() * std::sqrt(6.0 - std::max(1.0, 4.0 * xi * xi)));
}

double default_gain(const WeightMatrix& w) { return 0.95 * k_bound(w); }

double clamp_gain(double k, const WeightMatrix& w) {
  const double cap = 0.99 * k_bound(w);
  if (std::abs(k) <= cap) return k;
  return k < 0.0 ? -cap : cap;
}

std::vector<EigenDirection> eigendirections(const WeightMatrix& w, const Vec3& u) {
  std::vector<EigenDirection> out;
  auto push = [&](const Vec3& v, bool plane) {
    out.push_back({v, w.w_eigenvalue_of(v), delta(w, v, u), plane});
  };
  switch (w.spectrum()) {
    case SpectrumClass::ThreeDistinct:
      for (int i = 0; i < 3; ++i) push(w.eigenvector(i), false);
      break;
    case SpectrumClass::TwoDistinct: {
      const int s = w.simple_index();
      const Vec3& vs = w.eigenvector(s);
      push(vs, false);
      const Vec3 perp = u - u.dot(vs) * vs;
      if (perp.norm() > 1e-12) {
        const Vec3 best = perp.normalized();
        push(vs.cross(best).normalized(), true);
        push(best, true);
      } else {
        const int p0 = s == 0 ? 1 : 0;
        push(w.eigenvector(p0), true);
        push(w.eigenvector(p0 + 1), true);
      }
      break;
    }
    case SpectrumClass::Isotropic: {
      const double lw = w.w_eigenvalue(0);
      const Vec3 worst = u.cross(std::abs(u.x) < 0.9 ? Vec3::unit(0) : Vec3::unit(1)).normalized();
      out.push_back({worst, lw, delta(w, worst, u), true});
      out.push_back({u, lw, delta(w, u, u), true});
      break;
    }
  }
  return out;
}

WarpedPotential WarpedPotential::make(WeightMatrix weight, const Vec3& u, std::vector<double> gains,
                                      GainPolicy policy) {
  if (!(std::abs(u.norm() - 1.0) < kAxisNormTol)) {
    throw DomainError("WarpedPotential: warping axis must be a unit vector");
  }
  if (gains.empty()) throw PreconditionError("WarpedPotential: at least one gain is required");
  WarpedPotential wp(std::move(weight));
  wp.u_ = u;
  wp.k_bar_ = k_bound(wp.weight_);
  const double hard_cap = 1.0 / (2.0 * wp.weight_.w_max());
  for (std::size_t i = 0; i < gains.size(); ++i) {
    const double k = gains[i];
    if (!(k != 0.0) || !std::isfinite(k)) throw PreconditionError("WarpedPotential: gains must be nonzero");
    for (std::size_t j = 0; j < i; ++j) {
      if (gains[j] == k) throw PreconditionError("WarpedPotential: gains must be distinct across indices");
    }
    if (policy == GainPolicy::Strict && !(std::abs(k) < wp.k_bar_)) {
      throw PreconditionError("WarpedPotential: |k_" + std::to_string(i + 1) + "| = " +
                              std::to_string(std::abs(k)) + " is not below k_bar = " +
                              std::to_string(wp.k_bar_));
    }
    if (!(std::abs(k) < hard_cap)) {
      throw PreconditionError("WarpedPotential: |k| must stay below 1/(2 lambda_max^W) for the warp angle to exist");
    }
  }
  wp.gains_ = std::move(gains);

  const auto dirs = eigendirections(wp.weight_, wp.u_);
  wp.delta_min_ = std::numeric_limits<double>::infinity();
  for (const auto& d : dirs) wp.delta_min_ = std::min(wp.delta_min_, d.delta);

  if (wp.gains_.size() == 2 && wp.gains_[0] == -wp.gains_[1] && wp.delta_min_ > 0.0) {
    double g = std::numeric_limits<double>::infinity();
    for (const auto& d : dirs) g = std::min(g, sigma(wp.gains_[0], d.lambda_w, d.delta));
    wp.gap_ = g;
  }
  return wp;
}

double WarpedPotential::gain(LogicIndex q) const {
  if (q < 1 || q > index_count()) throw DomainError("logic index out of range");
  return gains_[static_cast<std::size_t>(q - 1)];
}

bool WarpedPotential::within_gain_bound() const {
  return std::all_of(gains_.begin(), gains_.end(), [&](double k) { return std::abs(k) < k_bar_; });
}

double theta_q(const WarpedPotential& wp, const Rotation& r, LogicIndex q) {
  const double s = wp.gain(q) * v_a(wp.weight(), r);
  if (!(std::abs(s) < 1.0)) throw DomainError("theta_q: |k_q V_A(R)| >= 1, gain is inadmissible");
  return 2.0 * std::asin(s);
}

Rotation gamma(const WarpedPotential& wp, const Rotation& r, LogicIndex q) {
  return r * rodrigues(theta_q(wp, r, q), wp.u());
}

Mat3 grad_theta_body(const WarpedPotential& wp, const Rotation& r, LogicIndex q) {
  const double k = wp.gain(q);
  const double v = v_a(wp.weight(), r);
  return pa(wp.weight().a() * r) * (2.0 * k / std::sqrt(1.0 - k * k * v * v));
}

Mat3 big_theta(const WarpedPotential& wp, const Rotation& r, LogicIndex q) {
  const Rotation warp = rodrigues(theta_q(wp, r, q), wp.u());
  return warp.transpose().matrix() + 2.0 * Mat3::outer(wp.u(), psi(grad_theta_body(wp, r, q)));
}

double u_value(const WarpedPotential& wp, const Rotation& r, LogicIndex q) {
  return v_a(wp.weight(), gamma(wp, r, q));
}

LogicIndex argmin_index(const WarpedPotential& wp, const Rotation& r) {
  LogicIndex best = 1;
  double best_u = u_value(wp, r, 1);
  for (LogicIndex p = 2; p <= wp.index_count(); ++p) {
    const double up = u_value(wp, r, p);
    if (up < best_u) {
      best_u = up;
      best = p;
    }
  }
  return best;
}

double mu(const WarpedPotential& wp, const Rotation& r, LogicIndex q) {
  double lowest = std::numeric_limits<double>::infinity();
  for (LogicIndex p = 1; p <= wp.index_count(); ++p) lowest = std::min(lowest, u_value(wp, r, p));
  return u_value(wp, r, q) - lowest;
}

Vec3 psi_gamma(const WarpedPotential& wp, const Rotation& r, LogicIndex q) {
  return psi(wp.weight().a() * gamma(wp, r, q));
}

Feasibility feasibility(const WeightMatrix& w, const Vec3& u) {
  Feasibility f;
  f.spectrum = w.spectrum();
  f.directions = eigendirections(w, u);
  f.feasible = std::all_of(f.directions.begin(), f.directions.end(),
                           [](const EigenDirection& d) { return d.delta > 0.0; });
  const double l1 = w.eigenvalue(0), l2 = w.eigenvalue(1), l3 = w.eigenvalue(2);
  switch (w.spectrum()) {
    case SpectrumClass::Isotropic:
      f.reason = "isotropic spectrum: some eigendirection is orthogonal to every axis";
      break;
    case SpectrumClass::TwoDistinct:
      if (w.simple_index() == 2) {
        f.lower = (l3 - l1) / (l3 + l2);
        f.upper = 1.0;
        f.reason = f.feasible ? "" : "(u^T v3)^2 outside the admissible interval";
      } else {
        f.lower = 1.0;
        f.upper = 1.0;
        f.reason = "repeated largest eigenvalue: the eigenplane always has Delta <= 0";
      }
      break;
    case SpectrumClass::ThreeDistinct: {
      const double a1 = u.dot(w.eigenvector(0));
      const double s = l3 + l2;
      f.lower = -((l3 - l1) / s) * a1 * a1 + (l2 - l1) / s;
      f.upper = -((l3 + l1) / s) * a1 * a1 + (l2 + l1) / s;
      f.reason = f.feasible ? "" : "(u^T v2)^2 outside the admissible interval";
      break;
    }
  }
  return f;
}

OptimalAxis optimal_u(const WeightMatrix& w) {
  const double l1 = w.eigenvalue(0), l2 = w.eigenvalue(1), l3 = w.eigenvalue(2);
  std::array<double, 3> alpha2{};
  OptimalAxis out;
  switch (w.spectrum()) {
    case SpectrumClass::Isotropic:
      throw PreconditionError("optimal_u: isotropic weight admits no synergistic warping axis");
    case SpectrumClass::TwoDistinct:
      if (w.simple_index() != 2) {
        throw PreconditionError("optimal_u: repeated largest eigenvalue admits no synergistic warping axis");
      }
      alpha2[2] = 1.0 - l2 / l3;
      alpha2[0] = 1.0 - alpha2[2];
      out.min_delta = (l3 - l1) * l1 / l3;
      break;
    case SpectrumClass::ThreeDistinct: {
      out.boundary_branch = l2 >= l1 * l3 / (l3 - l1);
      if (out.boundary_branch) {
        alpha2 = {0.0, l2 / (l2 + l3), l3 / (l2 + l3)};
        out.min_delta = l1;
      } else {
        const std::array<double, 3> l{l1, l2, l3};
        double pair_sum = 0.0;  // sum over ordered pairs j != k
        for (int j = 0; j < 3; ++j)
          for (int k = 0; k < 3; ++k)
            if (j != k) pair_sum += l[static_cast<std::size_t>(j)] * l[static_cast<std::size_t>(k)];
        for (std::size_t i = 0; i < 3; ++i) {
          const double prod_others = l[(i + 1) % 3] * l[(i + 2) % 3];
          alpha2[i] = std::max(0.0, 1.0 - 4.0 * prod_others / pair_sum);
        }
        out.min_delta = 4.0 * l1 * l2 * l3 / pair_sum;
      }
      break;
    }
  }
  Vec3 u;
  for (int i = 0; i < 3; ++i) u += std::sqrt(alpha2[static_cast<std::size_t>(i)]) * w.eigenvector(i);
  out.u = u.normalized();
  return out;
}

double critical_v_bar(double k, double lambda_w, double delta) {
  if (delta == 0.0 || k == 0.0) {
    throw PreconditionError("critical_v_bar: Delta(v, u) = 0, the critical-point equation degenerates");
  }
  const double disc = 1.0 + 16.0 * lambda_w * k * k * delta;
  if (!(disc >= 0.0)) throw PreconditionError("critical_v_bar: no real critical value");
  // Same root as (-1 + sqrt(disc)) / (4 k^2 Delta) without the cancellation.
  return 4.0 * lambda_w / (1.0 + std::sqrt(disc));
}

double sigma(double k, double lambda_w, double delta) {
  const double kv = k * critical_v_bar(k, lambda_w, delta);
  return 8.0 * kv * kv * (1.0 - kv * kv) * delta;
}

std::vector<CriticalPoint> critical_points(const WarpedPotential& wp) {
  const auto& w = wp.weight();
  if (w.spectrum() == SpectrumClass::Isotropic) {
    throw PreconditionError("critical_points: isotropic weight has a continuum of critical points");
  }
  const double scale = w.w_max();
  std::vector<CriticalPoint> out;
  for (const auto& d : eigendirections(w, wp.u())) {
    if (std::abs(d.delta) <= 1e-12 * scale) {
      throw PreconditionError("critical_points: Delta(v, u) = 0 for some eigendirection");
    }
    for (LogicIndex q = 1; q <= wp.index_count(); ++q) {
      const double k = wp.gain(q);
      CriticalPoint cp;
      cp.q = q;
      cp.v = d.v;
      cp.lambda_w = d.lambda_w;
      cp.delta = d.delta;
      cp.v_bar = critical_v_bar(k, d.lambda_w, d.delta);
      const double s = k * cp.v_bar;
      if (!(std::abs(s) < 1.0)) throw PreconditionError("critical_points: |k V_bar| >= 1");
      cp.theta = 2.0 * std::asin(s);
      cp.rotation = rodrigues(kPi, d.v) * rodrigues(cp.theta, wp.u()).transpose();
      cp.u_value = 2.0 * d.lambda_w;
      out.push_back(cp);
    }
  }
  return out;
}

bool synergism_check(const WarpedPotential& wp) { return wp.delta_min() > 0.0; }

double gap(const WarpedPotential& wp) {
  if (wp.index_count() != 2 || wp.gains()[0] != -wp.gains()[1]) {
    throw PreconditionError("gap: requires Q = {1, 2} with k_1 = -k_2");
  }
  if (!wp.gap()) throw PreconditionError("gap: the family is not synergistic");
  return *wp.gap();
}

double gap_lower_bound(const WarpedPotential& wp) {
  const auto dirs = eigendirections(wp.weight(), wp.u());
  double lmin = std::numeric_limits<double>::infinity();
  for (const auto& d : dirs) lmin = std::min(lmin, d.lambda_w);
  return sigma(wp.gains()[0], lmin, wp.delta_min());
}

}  // namespace synergy
