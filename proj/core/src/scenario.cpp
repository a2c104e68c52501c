#include "synergy/scenario.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <variant>

#include "synergy/error.hpp"
#include "synergy/trace_potential.hpp"
#include "synergy/warping.hpp"

namespace synergy {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Strips `name(` ... `)` and returns the inside, or nothing.
std::optional<std::string_view> call_args(std::string_view s, std::string_view name) {
  s = trim(s);
  if (s.size() < name.size() + 2 || s.substr(0, name.size()) != name) return std::nullopt;
  const auto rest = trim(s.substr(name.size()));
  if (rest.empty() || rest.front() != '(' || rest.back() != ')') return std::nullopt;
  return rest.substr(1, rest.size() - 2);
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string brief(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string fmt(const Vec3& v) { return fmt(v.x) + "," + fmt(v.y) + "," + fmt(v.z); }

std::string fmt(const Mat3& m) {
  std::string s;
  for (std::size_t i = 0; i < 9; ++i) s += (i ? "," : "") + fmt(m.data()[i]);
  return s;
}

const std::map<std::string, std::set<std::string>, std::less<>> kSchema = {
    {"weights", {"a1", "a2"}},
    {"warping", {"u1", "u2", "k1", "k2"}},
    {"hysteresis", {"delta1", "delta2"}},
    {"plant", {"inertia", "r", "rho1", "rho2", "augment_rho"}},
    {"init", {"R0", "Rhat0", "Rd", "omega0", "q0"}},
    {"sim", {"controller", "dt", "t_end", "noise_std", "seed", "max_jumps"}},
};

struct Entry {
  std::string value;
  int line = 0;
};

using Sections = std::map<std::string, std::map<std::string, Entry>, std::less<>>;

struct CriticalRef {
  int index = 0;
  int q = 0;
};

using RotationSpec = std::variant<Rotation, CriticalRef>;

class Reader {
 public:
  Reader(std::string name, Sections sections) : name_(std::move(name)), sections_(std::move(sections)) {}

  const Entry* find(std::string_view section, std::string_view key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    const auto k = s->second.find(std::string(key));
    return k == s->second.end() ? nullptr : &k->second;
  }

  bool has_section(std::string_view section) const { return sections_.count(section) > 0; }

  [[noreturn]] void fail(const Entry* e, std::string_view section, std::string_view key,
                         const std::string& msg) const {
    std::string where = name_;
    if (e) where += ":" + std::to_string(e->line);
    throw ParseError(where + ": [" + std::string(section) + "] " + std::string(key) + ": " + msg);
  }

  template <class F>
  auto get(std::string_view section, std::string_view key, F&& parse) const
      -> std::optional<decltype(parse(std::string_view{}))> {
    const Entry* e = find(section, key);
    if (!e) return std::nullopt;
    try {
      return parse(std::string_view(e->value));
    } catch (const ParseError& err) {
      fail(e, section, key, err.what());
    }
  }

  template <class F>
  auto require(std::string_view section, std::string_view key, F&& parse) const {
    auto v = get(section, key, std::forward<F>(parse));
    if (!v) fail(nullptr, section, key, "required key is missing");
    return *v;
  }

  const std::string& name() const { return name_; }

 private:
  std::string name_;
  Sections sections_;
};

Sections tokenize(std::string_view text, const std::string& name) {
  Sections out;
  std::string current;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? text.size() - start : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = name + ":" + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(where + "malformed section header");
      current = std::string(trim(line.substr(1, line.size() - 2)));
      if (!kSchema.count(current)) throw ParseError(where + "unknown section [" + current + "]");
      if (out.count(current)) throw ParseError(where + "duplicate section [" + current + "]");
      out[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(where + "expected `key = value`");
    if (current.empty()) throw ParseError(where + "key outside of any section");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (!kSchema.at(current).count(key)) {
      throw ParseError(where + "unknown key `" + key + "` in [" + current + "]");
    }
    if (value.empty()) throw ParseError(where + "empty value for `" + key + "`");
    if (!out[current].emplace(key, Entry{value, line_no}).second) {
      throw ParseError(where + "duplicate key `" + key + "`");
    }
  }
  return out;
}

RotationSpec parse_rotation(std::string_view s) {
  s = trim(s);
  if (s == "identity") return Rotation::identity();
  if (auto args = call_args(s, "quat")) {
    const auto v = parse_reals(*args);
    if (v.size() != 4) throw ParseError("quat(...) needs 4 components");
    try {
      return quat_to_rot(UnitQuaternion::normalized(v[0], {v[1], v[2], v[3]}));
    } catch (const DomainError&) {
      throw ParseError("quat(...) must be nonzero");
    }
  }
  if (auto args = call_args(s, "critical")) {
    const auto v = parse_reals(*args);
    if (v.size() != 2 || v[0] != std::floor(v[0]) || v[1] != std::floor(v[1])) {
      throw ParseError("critical(i,q) needs two integers");
    }
    return CriticalRef{static_cast<int>(v[0]), static_cast<int>(v[1])};
  }
  const auto v = parse_reals(s);
  if (v.size() != 4) throw ParseError("rotation must be `identity`, `angle,ax,ay,az`, quat(...) or critical(...)");
  const Vec3 axis{v[1], v[2], v[3]};
  if (!(axis.norm() > 0.0)) throw ParseError("rotation axis must be nonzero");
  return rodrigues(v[0], axis.normalized());
}

std::uint64_t parse_u64(std::string_view s) {
  s = trim(s);
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ParseError("expected a non-negative integer");
  return v;
}

int parse_int(std::string_view s) {
  s = trim(s);
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ParseError("expected an integer");
  return v;
}

std::vector<Vec3> parse_vec3_list(std::string_view s) {
  std::vector<Vec3> out;
  for (const auto part : split(s, ';')) out.push_back(parse_vec3(part));
  return out;
}

bool is_auto(const Reader& rd, std::string_view section, std::string_view key) {
  const Entry* e = rd.find(section, key);
  return !e || e->value == "auto";
}

}  // namespace

double parse_real(std::string_view s) {
  s = trim(s);
  if (s == "pi") return kPi;
  if (s == "-pi") return -kPi;
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
    throw ParseError("expected a real number, got `" + std::string(s) + "`");
  }
  return v;
}

std::vector<double> parse_reals(std::string_view s) {
  std::vector<double> out;
  for (const auto part : split(s, ',')) out.push_back(parse_real(part));
  return out;
}

Vec3 parse_vec3(std::string_view s) {
  const auto v = parse_reals(s);
  if (v.size() != 3) throw ParseError("expected 3 comma-separated reals");
  return {v[0], v[1], v[2]};
}

Mat3 parse_matrix(std::string_view s) {
  if (auto args = call_args(s, "diag")) {
    const Vec3 d = parse_vec3(*args);
    return Mat3::diag(d.x, d.y, d.z);
  }
  const auto v = parse_reals(s);
  if (v.size() != 9) throw ParseError("expected diag(x,y,z) or 9 comma-separated reals");
  std::array<double, 9> a{};
  std::copy(v.begin(), v.end(), a.begin());
  return Mat3(a);
}

std::vector<std::string> Scenario::header_lines() const {
  std::vector<std::string> out;
  out.push_back("scenario: " + name);
  for (const auto& s : summary) out.push_back(s);
  for (const auto& n : notes) out.push_back("note: " + n);
  return out;
}

Scenario parse_scenario(std::string_view text, const ScenarioOptions& opts, std::string name) {
  const Reader rd(name, tokenize(text, name));
  Scenario sc;
  sc.name = name;
  ScenarioConfig& cfg = sc.config;
  auto& notes = sc.notes;
  auto& summary = sc.summary;

  // [plant]
  cfg.inertia = rd.require("plant", "inertia", parse_matrix);
  const auto refs = rd.require("plant", "r", parse_vec3_list);
  const auto rho1 = rd.require("plant", "rho1", parse_reals);
  const auto rho2 = rd.require("plant", "rho2", parse_reals);
  if (rho1.size() != refs.size() || rho2.size() != refs.size()) {
    rd.fail(rd.find("plant", "rho1"), "plant", "rho1/rho2", "need one weight per reference vector");
  }
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (!(rho1[i] > 0.0) || !(rho2[i] > 0.0)) rd.fail(rd.find("plant", "rho1"), "plant", "rho", "weights must be positive");
    if (!(refs[i].norm() > 0.0)) rd.fail(rd.find("plant", "r"), "plant", "r", "reference vectors must be nonzero");
    cfg.measurements.entries.push_back({refs[i], refs[i], rho1[i], rho2[i]});
  }
  if (refs.size() < 2) rd.fail(rd.find("plant", "r"), "plant", "r", "at least two references are required");
  if (!spans_space(cfg.measurements)) {
    const auto aug = rd.get("plant", "augment_rho", parse_reals).value_or(std::vector<double>{1.0, 1.0});
    if (aug.size() != 2) rd.fail(rd.find("plant", "augment_rho"), "plant", "augment_rho", "expected 2 weights");
    cfg.measurements = augment_measurements(cfg.measurements, aug[0], aug[1]);
    notes.push_back("references do not span R^3; added r_1 x r_2 with weights " + brief(aug[0]) + "," +
                    brief(aug[1]));
  }
  const Mat3 a1 = build_a_h(cfg.measurements, 1);
  const Mat3 a2 = build_a_h(cfg.measurements, 2);

  // [weights] cross-check
  const Mat3* built[2] = {&a1, &a2};
  for (int h = 1; h <= 2; ++h) {
    const std::string key = "a" + std::to_string(h);
    if (auto a = rd.get("weights", key, parse_matrix)) {
      const Mat3& b = *built[h - 1];
      if (!((*a - b).frobenius_norm() <= 1e-9 * (1.0 + b.frobenius_norm()))) {
        rd.fail(rd.find("weights", key), "weights", key,
                "does not match sum rho_i" + std::to_string(h) + " r_i r_i^T = " + fmt(b));
      }
    }
  }

  // [sim]
  const auto controller = rd.get("sim", "controller", [](std::string_view s) {
    const auto t = trim(s);
    if (t == "hybrid") return ControllerKind::Hybrid;
    if (t == "smooth") return ControllerKind::Smooth;
    if (t == "passive") return ControllerKind::Passive;
    throw ParseError("expected hybrid, smooth or passive");
  });
  cfg.controller = controller.value_or(ControllerKind::Hybrid);
  cfg.dt = rd.get("sim", "dt", parse_real).value_or(cfg.dt);
  cfg.t_end = rd.get("sim", "t_end", parse_real).value_or(cfg.t_end);
  cfg.noise_std = rd.get("sim", "noise_std", parse_real).value_or(0.0);
  cfg.seed = rd.get("sim", "seed", parse_u64).value_or(0);
  cfg.max_jumps = rd.get("sim", "max_jumps", parse_int).value_or(cfg.max_jumps);

  // [warping] and [hysteresis]
  try {
    std::vector<WarpedPotential> wps;
    for (int h = 1; h <= 2; ++h) {
      const std::string hs = std::to_string(h);
      const WeightMatrix w = WeightMatrix::build(h == 1 ? a1 : a2);
      Vec3 u;
      if (is_auto(rd, "warping", "u" + hs)) {
        u = optimal_u(w).u;
      } else {
        const Vec3 raw = rd.require("warping", "u" + hs, parse_vec3);
        if (!(raw.norm() > 0.0)) rd.fail(rd.find("warping", "u" + hs), "warping", "u" + hs, "axis must be nonzero");
        u = raw.normalized();
      }
      std::vector<double> gains;
      if (is_auto(rd, "warping", "k" + hs)) {
        const double k = default_gain(w);
        gains = {k, -k};
      } else {
        gains = rd.require("warping", "k" + hs, parse_reals);
        if (gains.size() == 1) gains.push_back(-gains[0]);
        if (gains.size() != 2) rd.fail(rd.find("warping", "k" + hs), "warping", "k" + hs, "expected k or k,-k");
      }
      const double kb = k_bound(w);
      if (!opts.unclamped) {
        const auto before = gains;
        for (auto& k : gains) k = clamp_gain(k, w);
        if (gains != before) {
          notes.push_back("k" + hs + " = " + brief(before[0]) + "," + brief(before[1]) + " is not below k_bar = " +
                          brief(kb) + "; clamped to " + brief(gains[0]) + "," + brief(gains[1]));
        }
      }
      wps.push_back(WarpedPotential::make(w, u, gains,
                                          opts.unclamped ? WarpedPotential::GainPolicy::AllowAboveBound
                                                           : WarpedPotential::GainPolicy::Strict));
    }
    double deltas[2];
    for (int h = 1; h <= 2; ++h) {
      const std::string key = "delta" + std::to_string(h);
      const auto& wp = wps[static_cast<std::size_t>(h - 1)];
      const auto g = wp.gap();
      if (is_auto(rd, "hysteresis", key)) {
        if (!g) throw PreconditionError(key + " = auto needs a synergistic family");
        deltas[h - 1] = 0.5 * *g;
      } else {
        double d = rd.require("hysteresis", key, parse_real);
        if (!opts.unclamped && g && d >= *g) {
          notes.push_back(key + " = " + brief(d) + " is not below the gap " + brief(*g) + "; replaced by " +
                          brief(0.5 * *g));
          d = 0.5 * *g;
        }
        deltas[h - 1] = d;
      }
    }
    cfg.hybrid = ControllerConfig::make(wps[0], wps[1], deltas[0], deltas[1], opts.unclamped);
  } catch (const PreconditionError& e) {
    if (cfg.controller == ControllerKind::Hybrid) throw;
    notes.push_back(std::string("hybrid configuration unavailable: ") + e.what());
  }

  // [init]
  auto rotation = [&](std::string_view key) -> std::optional<RotationSpec> {
    return rd.get("init", key, parse_rotation);
  };
  auto plain = [&](std::string_view key) {
    const auto r = rotation(key);
    if (!r) return Rotation::identity();
    if (!std::holds_alternative<Rotation>(*r)) rd.fail(rd.find("init", key), "init", key, "critical(...) is only accepted for R0");
    return std::get<Rotation>(*r);
  };
  cfg.r_hat0 = plain("Rhat0");
  cfg.r_d = plain("Rd");
  cfg.omega0 = rd.get("init", "omega0", parse_vec3).value_or(Vec3{});
  if (auto q = rd.get("init", "q0", parse_reals)) {
    if (q->size() != 2 || (*q)[0] != std::floor((*q)[0]) || (*q)[1] != std::floor((*q)[1])) {
      rd.fail(rd.find("init", "q0"), "init", "q0", "expected two integers");
    }
    cfg.q0 = {static_cast<int>((*q)[0]), static_cast<int>((*q)[1])};
  }
  if (const auto r0 = rotation("R0")) {
    if (const auto* c = std::get_if<CriticalRef>(&*r0)) {
      if (!cfg.hybrid) throw PreconditionError("critical(...) needs a hybrid configuration");
      const auto& wp = cfg.hybrid->wp(1);
      const auto points = critical_points(wp);
      const auto per_dir = static_cast<std::size_t>(wp.index_count());
      const std::size_t n_dirs = points.size() / per_dir;
      if (c->index < 1 || static_cast<std::size_t>(c->index) > n_dirs || c->q < 1 || c->q > wp.index_count()) {
        rd.fail(rd.find("init", "R0"), "init", "R0", "critical(i,q) index out of range");
      }
      const auto& cp = points[static_cast<std::size_t>(c->index - 1) * per_dir + static_cast<std::size_t>(c->q - 1)];
      cfg.r0 = cp.rotation * cfg.r_hat0;
      notes.push_back("R0 = critical point of U_1(., " + std::to_string(c->q) + ") for v = " + fmt(cp.v) +
                      ", theta = " + brief(cp.theta));
    } else {
      cfg.r0 = std::get<Rotation>(*r0);
    }
  }

  const char* kind = cfg.controller == ControllerKind::Hybrid ? "hybrid"
                     : cfg.controller == ControllerKind::Smooth ? "smooth"
                                                                : "passive";
  summary.push_back(std::string("controller = ") + kind);
  summary.push_back("unclamped = " + std::string(opts.unclamped ? "true" : "false"));
  summary.push_back("A1 = " + fmt(a1));
  summary.push_back("A2 = " + fmt(a2));
  if (cfg.hybrid) {
    for (int h = 1; h <= 2; ++h) {
      const auto& wp = cfg.hybrid->wp(h);
      const std::string hs = std::to_string(h);
      summary.push_back("u" + hs + " = " + fmt(wp.u()));
      summary.push_back("k" + hs + " = " + fmt(wp.gain(1)) + "," + fmt(wp.gain(2)) + " (k_bar = " + fmt(wp.k_bar()) + ")");
      summary.push_back("gap" + hs + " = " + (wp.gap() ? fmt(*wp.gap()) : std::string("none")));
      summary.push_back("delta" + hs + " = " + fmt(cfg.hybrid->delta(h)));
    }
  }
  summary.push_back("J = " + fmt(cfg.inertia));
  summary.push_back("R0 = " + fmt(cfg.r0.matrix()));
  summary.push_back("Rhat0 = " + fmt(cfg.r_hat0.matrix()));
  summary.push_back("Rd = " + fmt(cfg.r_d.matrix()));
  summary.push_back("omega0 = " + fmt(cfg.omega0));
  summary.push_back("q0 = " + std::to_string(cfg.q0.q1) + "," + std::to_string(cfg.q0.q2));
  summary.push_back("dt = " + fmt(cfg.dt) + ", t_end = " + fmt(cfg.t_end) + ", max_jumps = " +
                    std::to_string(cfg.max_jumps));
  summary.push_back("noise_std = " + fmt(cfg.noise_std) + ", seed = " + std::to_string(cfg.seed));

  cfg.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path, const ScenarioOptions& opts) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), opts, path.filename().string());
}

}  // namespace synergy
