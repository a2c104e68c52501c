#include "synergy/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>

#include "synergy/error.hpp"
#include "synergy/hybrid_controller.hpp"
#include "synergy/so3.hpp"
#include "synergy/trace_potential.hpp"
#include "synergy/warping.hpp"

namespace synergy {

namespace {

std::string fmt(const char* f, double x) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Q diag(l) Q^T with Haar-random Q and eigenvalues in [lo, hi].
Mat3 random_weight(std::mt19937_64& rng, double lo, double hi) {
  const Mat3 q = random_rotation(rng).matrix();
  return q * Mat3::diag(uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi)) * q.transpose();
}

Mat3 random_matrix(std::mt19937_64& rng) {
  std::array<double, 9> a{};
  for (auto& x : a) x = uniform(rng, -1.0, 1.0);
  return Mat3(a);
}

Mat3 exp_series(const Mat3& s) {
  Mat3 sum = Mat3::identity();
  Mat3 term = Mat3::identity();
  for (int n = 1; n < 40; ++n) {
    term = term * s * (1.0 / n);
    sum += term;
  }
  return sum;
}

// A synergistic (A, u, k) with u near the optimal axis.
WarpedPotential random_feasible(std::mt19937_64& rng) {
  for (;;) {
    const WeightMatrix w = WeightMatrix::build(random_weight(rng, 0.3, 5.0));
    const Vec3 u = (optimal_u(w).u + 0.05 * random_unit_vector(rng)).normalized();
    if (!feasibility(w, u).feasible) continue;
    const double k = uniform(rng, 0.1, 0.99) * k_bound(w);
    return WarpedPotential::make(w, u, {k, -k});
  }
}

using Suite = std::function<void(SuiteResult&, std::mt19937_64&, std::size_t)>;

void kernel_identities(SuiteResult& r, std::mt19937_64& rng, std::size_t n) {
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Mat3 a = random_matrix(rng);
    const Vec3 u = random_unit_vector(rng) * uniform(rng, 0.1, 2.0);
    worst = std::max(worst, std::abs(inner(a, hat(u)) - 2.0 * psi(a).dot(u)));

    const double th = uniform(rng, -kPi, kPi);
    const Vec3 ax = random_unit_vector(rng);
    worst = std::max(worst, (rodrigues(th, ax).matrix() - exp_series(th * hat(ax))).frobenius_norm());

    const UnitQuaternion q1 = rot_to_quat(random_rotation(rng));
    const UnitQuaternion q2 = rot_to_quat(random_rotation(rng));
    worst = std::max(worst, (quat_to_rot(quat_mul(q1, q2)).matrix() -
                             (quat_to_rot(q1) * quat_to_rot(q2)).matrix()).frobenius_norm());

    const WeightMatrix w = WeightMatrix::build(random_weight(rng, 0.1, 5.0));
    const double lhs = v_a(w, quat_to_rot(q1));
    const double rhs = 2.0 * q1.eps().dot(w.w() * q1.eps());
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
  }
  r.samples = n;
  r.passed = worst < 1e-10;
  r.detail = fmt("max residual %.3e (tol 1e-10)", worst);
}

void gradient_fd(SuiteResult& r, std::mt19937_64& rng, std::size_t n) {
  constexpr double h = 1e-6;
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const WarpedPotential wp = random_feasible(rng);
    const Rotation rot = random_rotation(rng);
    const Vec3 xi = random_unit_vector(rng);
    const Rotation plus = rot * rodrigues(h, xi);
    const Rotation minus = rot * rodrigues(-h, xi);
    const Mat3& a = wp.weight().a();

    const double fd_v = (v_a(wp.weight(), plus) - v_a(wp.weight(), minus)) / (2.0 * h);
    const double an_v = 2.0 * psi(a * rot).dot(xi);
    worst = std::max(worst, std::abs(fd_v - an_v) / std::max(1.0, std::abs(an_v)));

    const LogicIndex q = 1 + static_cast<int>(i % 2);
    const double fd_u = (u_value(wp, plus, q) - u_value(wp, minus, q)) / (2.0 * h);
    const double an_u = 2.0 * psi_gamma(wp, rot, q).dot(big_theta(wp, rot, q) * xi);
    worst = std::max(worst, std::abs(fd_u - an_u) / std::max(1.0, std::abs(an_u)));
  }
  r.samples = n;
  r.passed = worst < 1e-5;
  r.detail = fmt("max relative error %.3e (tol 1e-5)", worst);
}

VectorMeasurementSet random_measurements(std::mt19937_64& rng) {
  VectorMeasurementSet ms;
  const std::size_t n = 3 + rng() % 3;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 r = random_unit_vector(rng) * uniform(rng, 0.5, 2.0);
    ms.entries.push_back({r, r, uniform(rng, 0.2, 3.0), uniform(rng, 0.2, 3.0)});
  }
  return ms;
}

void dual_path(SuiteResult& r, std::mt19937_64& rng, std::size_t n) {
  std::vector<VectorMeasurementSet> sets;
  VectorMeasurementSet canonical;
  const double rho1[3] = {1.0, 3.0, 5.0};
  const double rho2[3] = {0.1, 0.3, 0.5};
  for (int i = 0; i < 3; ++i) canonical.entries.push_back({Vec3::unit(i), Vec3::unit(i), rho1[i], rho2[i]});
  sets.push_back(canonical);
  while (sets.size() < 6) {
    auto ms = random_measurements(rng);
    if (spans_space(ms)) sets.push_back(ms);
  }

  double worst = 0.0;
  std::size_t count = 0;
  for (const auto& base : sets) {
    std::vector<WarpedPotential> wps;
    for (int h = 1; h <= 2; ++h) {
      const WeightMatrix w = WeightMatrix::build(build_a_h(base, h));
      const double k = 0.9 * k_bound(w);
      Vec3 u = random_unit_vector(rng);
      if (w.spectrum() != SpectrumClass::Isotropic) {
        try {
          u = optimal_u(w).u;
        } catch (const PreconditionError&) {
        }
      }
      wps.push_back(WarpedPotential::make(w, u, {k, -k}));
    }
    const ControllerConfig cfg = ControllerConfig::make(wps[0], wps[1], 1.0, 1.0, true);
    for (std::size_t i = 0; i < n; ++i, ++count) {
      const Rotation rot = random_rotation(rng);
      const Rotation y1 = random_rotation(rng);
      const Rotation y2 = random_rotation(rng);
      const VectorMeasurementSet ms = base.observed_at(rot);
      const LogicState logic{1 + static_cast<int>(rng() % 2), 1 + static_cast<int>(rng() % 2)};
      const Rotation* ys[2] = {&y1, &y2};
      for (int h = 1; h <= 2; ++h) {
        const Rotation& y = *ys[h - 1];
        const Rotation x = rot * y.transpose();
        const auto& wp = cfg.wp(h);
        const Mat3 a = wp.weight().a();
        const double scale = 1.0 + a.trace();
        worst = std::max(worst, std::abs(va_from_measurements(ms, h, y) - v_a(a, x)) / scale);
        worst = std::max(worst, (psi_from_measurements(ms, h, y) - psi(a * x)).norm() / scale);
        for (LogicIndex q = 1; q <= 2; ++q) {
          worst = std::max(worst, std::abs(u_h_from_measurements(ms, h, wp, y, q) - u_value(wp, x, q)) / scale);
          worst = std::max(worst, (psi_gamma_from_measurements(ms, h, wp, y, q) - psi_gamma(wp, x, q)).norm() / scale);
        }
      }
      worst = std::max(worst, (torque(ms, cfg, logic, y1, y2) - torque_from_state(cfg, logic, rot, y1, y2)).norm());
      worst = std::max(worst, (beta(ms, cfg, logic, y1) - beta_from_state(cfg, logic, rot, y1)).norm());
    }
  }
  r.samples = count;
  r.passed = worst < 1e-10;
  r.detail = fmt("max discrepancy %.3e (tol 1e-10)", worst);
}

void gap_brute_force(SuiteResult& r, std::mt19937_64& rng, std::size_t n) {
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const WarpedPotential wp = random_feasible(rng);
    double direct = std::numeric_limits<double>::infinity();
    for (const auto& cp : critical_points(wp)) direct = std::min(direct, mu(wp, cp.rotation, cp.q));
    worst = std::max(worst, std::abs(direct - gap(wp)));
  }
  r.samples = n;
  r.passed = worst < 1e-9;
  r.detail = fmt("max |gap - min mu| %.3e (tol 1e-9)", worst);
}

void det_theta(SuiteResult& r, std::mt19937_64& rng, std::size_t n, double gain_scale) {
  const WeightMatrix w = WeightMatrix::build(Mat3::diag(1.0, 3.0, 5.0));
  const double k = 0.99 * gain_scale * k_bound(w);
  const Vec3 u = optimal_u(w).u;
  std::string precondition;
  std::optional<WarpedPotential> wp;
  try {
    wp = WarpedPotential::make(w, u, {k, -k});
  } catch (const PreconditionError& e) {
    precondition = e.what();
    try {
      wp = WarpedPotential::make(w, u, {k, -k}, WarpedPotential::GainPolicy::AllowAboveBound);
    } catch (const PreconditionError&) {
    }
  }
  double min_det = std::numeric_limits<double>::infinity();
  double worst = 0.0;
  if (wp) {
    for (std::size_t i = 0; i < n; ++i) {
      const Rotation rot = random_rotation(rng);
      const LogicIndex q = 1 + static_cast<int>(i % 2);
      const double d = big_theta(*wp, rot, q).det();
      const double id = 1.0 + 2.0 * u.dot(psi(grad_theta_body(*wp, rot, q)));
      min_det = std::min(min_det, std::abs(d));
      worst = std::max(worst, std::abs(d - id));
    }
  }
  r.samples = wp ? n : 0;
  r.passed = precondition.empty() && min_det > 0.0 && worst < 1e-10;
  r.detail = fmt("min |det Theta| %.4f", min_det) + fmt(", identity residual %.3e", worst);
  if (!precondition.empty()) r.detail = "precondition failure: " + precondition + "; " + r.detail;
}

Vec3 fibonacci_point(std::size_t i, std::size_t n) {
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double phi = golden * static_cast<double>(i);
  return {rad * std::cos(phi), rad * std::sin(phi), z};
}

void sphere_grid(SuiteResult& r, std::mt19937_64& rng, std::size_t n) {
  std::vector<WeightMatrix> weights{WeightMatrix::build(Mat3::diag(1.0, 3.0, 5.0))};
  for (int i = 0; i < 3; ++i) weights.push_back(WeightMatrix::build(random_weight(rng, 0.3, 5.0)));
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& w : weights) {
    const double closed = optimal_u(w).min_delta;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const auto dirs = eigendirections(w, fibonacci_point(i, n));
      double m = std::numeric_limits<double>::infinity();
      for (const auto& d : dirs) m = std::min(m, d.delta);
      best = std::max(best, m);
    }
    worst = std::max(worst, best - closed);
  }
  r.samples = n * weights.size();
  r.passed = worst <= 1e-3;
  r.detail = fmt("max (grid - closed form) %.3e (tol 1e-3)", worst);
}

}  // namespace

std::vector<SuiteResult> run_verification(const VerifyOptions& opts) {
  const bool full = opts.level == VerifyLevel::Full;
  struct Entry {
    const char* name;
    std::size_t quick;
    std::size_t full;
    Suite run;
  };
  std::vector<Entry> suites = {
      {"kernel-identities", 10'000, 1'000'000, kernel_identities},
      {"gradient-fd", 100, 100'000, gradient_fd},
      {"dual-path", 1'000, 100'000, dual_path},
      {"gap-brute-force", 20, 10'000, gap_brute_force},
      {"det-theta", 100'000, 1'000'000,
       [&](SuiteResult& r, std::mt19937_64& g, std::size_t n) { det_theta(r, g, n, opts.gain_scale); }},
  };
  if (full) suites.push_back({"sphere-grid", 0, 1'000'000, sphere_grid});

  std::vector<SuiteResult> out;
  std::uint64_t stream = 0;
  for (const auto& s : suites) {
    SuiteResult r;
    r.name = s.name;
    std::mt19937_64 rng(opts.seed ^ (0x9e3779b97f4a7c15ULL * ++stream));
    const auto t0 = std::chrono::steady_clock::now();
    try {
      s.run(r, rng, full ? s.full : s.quick);
    } catch (const Error& e) {
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace synergy
