#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace synergy::oracle {

Mat3 exp_series(const Mat3& s, int terms) {
  Mat3 sum = Mat3::identity();
  Mat3 term = Mat3::identity();
  for (int n = 1; n < terms; ++n) {
    term = term * s * (1.0 / n);
    sum += term;
  }
  return sum;
}

double directional_fd(const std::function<double(const Rotation&)>& f, const Rotation& r,
                      const Vec3& xi, double h) {
  const Rotation plus = Rotation::trusted(r.matrix() * exp_series(hat(xi * h)));
  const Rotation minus = Rotation::trusted(r.matrix() * exp_series(hat(xi * -h)));
  return (f(plus) - f(minus)) / (2.0 * h);
}

double trace_potential(const Mat3& a, const Mat3& r) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += a(i, j) * ((i == j ? 1.0 : 0.0) - r(j, i));
  return s;
}

double delta_from_potential(const Mat3& a, const Vec3& v, double lambda_w, const Vec3& u) {
  const Mat3 half_turn = exp_series(hat(v * kPi));
  const Mat3 quarter = exp_series(hat(u * (kPi / 2.0)));
  // sin^2(pi / 4) = 1 / 2
  return 2.0 * lambda_w - trace_potential(a, half_turn * quarter);
}

std::vector<Vec3> fibonacci_sphere(std::size_t n) {
  std::vector<Vec3> pts;
  pts.reserve(n);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(i);
    pts.emplace_back(rho * std::cos(phi), rho * std::sin(phi), z);
  }
  return pts;
}

LpResult simplex_max(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
                     const std::vector<double>& c) {
  const std::size_t m = a.size();
  const std::size_t n = c.size();
  const std::size_t cols = n + m + 1;
  // Rows 0..m-1 are constraints with slacks; row m is the objective -c.
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(cols, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (b[i] < 0.0) throw std::invalid_argument("simplex_max needs b >= 0");
    for (std::size_t j = 0; j < n; ++j) t[i][j] = a[i][j];
    t[i][n + i] = 1.0;
    t[i][cols - 1] = b[i];
    basis[i] = n + i;
  }
  for (std::size_t j = 0; j < n; ++j) t[m][j] = -c[j];

  constexpr double eps = 1e-14;
  for (int iter = 0; iter < 1000; ++iter) {
    // Bland: lowest-index improving column.
    std::size_t enter = cols;
    for (std::size_t j = 0; j + 1 < cols; ++j)
      if (t[m][j] < -eps) {
        enter = j;
        break;
      }
    if (enter == cols) break;
    std::size_t leave = m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] <= eps) continue;
      const double ratio = t[i][cols - 1] / t[i][enter];
      if (ratio < best - eps || (std::abs(ratio - best) <= eps && leave < m && basis[i] < basis[leave])) {
        best = ratio;
        leave = i;
      }
    }
    if (leave == m) return {std::numeric_limits<double>::infinity(), {}, false};
    const double piv = t[leave][enter];
    for (auto& e : t[leave]) e /= piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave || t[i][enter] == 0.0) continue;
      const double f = t[i][enter];
      for (std::size_t j = 0; j < cols; ++j) t[i][j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }
  LpResult res;
  res.value = t[m][cols - 1];
  res.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) res.x[basis[i]] = t[i][cols - 1];
  return res;
}

Vec3 random_vec(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  return {g(rng), g(rng), g(rng)};
}

Mat3 random_mat(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  std::array<double, 9> e{};
  for (auto& x : e) x = g(rng);
  return Mat3(e);
}

Mat3 random_rotation_qr(std::mt19937_64& rng) {
  const Mat3 g = random_mat(rng);
  Vec3 c0 = g.col(0).normalized();
  Vec3 c1 = g.col(1) - c0 * c0.dot(g.col(1));
  c1 = c1.normalized();
  Vec3 c2 = g.col(2) - c0 * c0.dot(g.col(2)) - c1 * c1.dot(g.col(2));
  c2 = c2.normalized();
  if (c0.cross(c1).dot(c2) < 0.0) c2 = -c2;
  return Mat3::from_cols(c0, c1, c2);
}

PlantedWeight planted_weight(const std::array<double, 3>& lambda, std::mt19937_64& rng) {
  const Mat3 q = random_rotation_qr(rng);
  PlantedWeight pw;
  pw.lambda = lambda;
  for (int i = 0; i < 3; ++i) pw.v[static_cast<std::size_t>(i)] = q.col(i);
  const Mat3 d = Mat3::diag(lambda[0], lambda[1], lambda[2]);
  pw.a = q * d * q.transpose();
  // Exact symmetry.
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) pw.a(j, i) = pw.a(i, j);
  return pw;
}

PlantedWeight random_three_distinct(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(0.2, 5.0);
  for (;;) {
    std::array<double, 3> l{d(rng), d(rng), d(rng)};
    std::sort(l.begin(), l.end());
    const double gap = std::min(l[1] - l[0], l[2] - l[1]);
    if (gap < 0.05 * l[2]) continue;
    return planted_weight(l, rng);
  }
}

PlantedWeight random_two_distinct(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(0.2, 5.0);
  std::uniform_real_distribution<double> f(1.1, 1.9);
  const double a = d(rng);
  return planted_weight({a, a, f(rng) * a}, rng);
}

double min_delta_over_eigendirections(const PlantedWeight& pw, const Vec3& u) {
  const double tr = pw.lambda[0] + pw.lambda[1] + pw.lambda[2];
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t j = (i + 1) % 3;
    if (pw.lambda[i] != pw.lambda[j]) continue;
    // Delta is a quadratic form in v on the eigenplane span{v_i, v_j}.
    const std::size_t k = (i + 2) % 3;
    const double lw = tr - pw.lambda[i];
    const double p = delta_from_potential(pw.a, pw.v[i], lw, u);
    const double q = delta_from_potential(pw.a, pw.v[j], lw, u);
    const double pq = delta_from_potential(pw.a, (pw.v[i] + pw.v[j]) / std::sqrt(2.0), lw, u);
    const double off = pq - 0.5 * (p + q);
    const double plane_min = 0.5 * (p + q) - std::hypot(0.5 * (p - q), off);
    return std::min(plane_min, delta_from_potential(pw.a, pw.v[k], tr - pw.lambda[k], u));
  }
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 3; ++i) m = std::min(m, delta_from_potential(pw.a, pw.v[i], tr - pw.lambda[i], u));
  return m;
}

OracleCritical solve_critical(const Mat3& a, const Vec3& v, double lambda_w, const Vec3& u, double k) {
  const Mat3 half_turn = exp_series(hat(v * kPi));
  auto point = [&](double vv) { return half_turn * exp_series(hat(u * (-2.0 * std::asin(k * vv)))); };
  auto f = [&](double vv) { return trace_potential(a, point(vv)) - vv; };
  double lo = 0.0;
  double hi = std::min(2.0 * lambda_w, (1.0 - 1e-12) / std::abs(k));
  if (!(f(lo) > 0.0) || !(f(hi) < 0.0)) throw std::runtime_error("solve_critical: no sign change");
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  const double vb = 0.5 * (lo + hi);
  return {point(vb), vb};
}

double warped_potential(const Mat3& a, const Mat3& r, const Vec3& u, double k) {
  const double theta = 2.0 * std::asin(k * trace_potential(a, r));
  return trace_potential(a, r * exp_series(hat(u * theta)));
}

}  // namespace synergy::oracle
