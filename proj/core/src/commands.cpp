#include "synergy/commands.hpp"

#include <cstdio>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "synergy/error.hpp"
#include "synergy/scenario.hpp"
#include "synergy/simulator.hpp"
#include "synergy/trajectory_csv.hpp"
#include "synergy/warping.hpp"

namespace synergy {

namespace {

using nlohmann::json;

std::string num(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::string vec(const Vec3& v, int digits = 6) {
  return "[" + num(v.x, digits) + ", " + num(v.y, digits) + ", " + num(v.z, digits) + "]";
}

json to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Scenario load(const std::filesystem::path& p, const CommandOptions& opts) {
  Scenario sc = load_scenario(p, ScenarioOptions{opts.unclamped});
  if (opts.seed) {
    sc.config.seed = *opts.seed;
    sc.summary.push_back("seed overridden to " + std::to_string(*opts.seed));
  }
  return sc;
}

std::string time_or_none(const std::optional<double>& t) { return t ? num(*t, 6) : "none"; }

}  // namespace

int report_error(const std::exception& e, std::ostream& err) {
  int code = kExitFailure;
  const char* kind = "error";
  if (dynamic_cast<const ParseError*>(&e)) {
    code = kExitParse;
    kind = "parse error";
  } else if (dynamic_cast<const PreconditionError*>(&e) || dynamic_cast<const DomainError*>(&e)) {
    code = kExitPrecondition;
    kind = "precondition failed";
  } else if (dynamic_cast<const ZenoError*>(&e)) {
    code = kExitZeno;
    kind = "jump guard";
  }
  err << kind << ": " << e.what() << '\n';
  return code;
}

int cmd_gap(const std::string& weight, std::optional<double> k_opt, const CommandOptions& opts,
            std::ostream& out, std::ostream& err) {
  try {
    const Mat3 a = parse_matrix(weight);
    const WeightMatrix w = WeightMatrix::build(a);
    const auto lw = w.w_eigenvalues();
    json summary;
    summary["spectrum"] = std::string(to_string(w.spectrum()));
    summary["eigenvalues_a"] = json::array({w.eigenvalue(0), w.eigenvalue(1), w.eigenvalue(2)});
    summary["eigenvalues_w"] = json::array({lw[0], lw[1], lw[2]});
    summary["k_bar"] = k_bound(w);

    out << "weight A        " << a << '\n';
    out << "spectrum        " << to_string(w.spectrum()) << '\n';
    out << "eigenvalues A   " << vec({w.eigenvalue(0), w.eigenvalue(1), w.eigenvalue(2)}) << '\n';
    out << "eigenvalues W   " << vec({lw[0], lw[1], lw[2]}) << '\n';
    out << "xi              " << num(w.xi()) << '\n';
    out << "k_bar           " << num(k_bound(w)) << '\n';

    std::optional<OptimalAxis> best;
    std::string reason;
    try {
      best = optimal_u(w);
    } catch (const PreconditionError&) {
      if (w.spectrum() == SpectrumClass::Isotropic) {
        reason = "isotropic spectrum";
        out << "infeasible: isotropic spectrum\n"
            << "  every unit vector is an eigendirection of A, so for any axis u some\n"
            << "  eigendirection v is orthogonal to u and Delta(v, u) = 0\n";
      } else {
        reason = "repeated largest eigenvalue";
        out << "infeasible: repeated largest eigenvalue\n"
            << "  the eigenplane of the repeated eigenvalue always contains a direction\n"
            << "  with Delta(v, u) <= 0\n";
      }
    }
    if (!best) {
      summary["feasible"] = false;
      summary["reason"] = reason;
      out << summary.dump() << '\n';
      return kExitPrecondition;
    }

    const Vec3& u = best->u;
    const Feasibility fz = feasibility(w, u);
    out << "optimal u       " << vec(u) << '\n';
    out << "eigen coords    ";
    for (int i = 0; i < 3; ++i) out << (i ? ", " : "(") << "(u^T v" << i + 1 << ")^2 = " << num(u.dot(w.eigenvector(i)) * u.dot(w.eigenvector(i)));
    out << ")\n";
    if (w.spectrum() == SpectrumClass::ThreeDistinct) {
      out << "branch          " << (best->boundary_branch ? "lambda2 >= lambda1 lambda3 / (lambda3 - lambda1)" : "interior")
          << '\n';
    }
    out << "feasible        " << (fz.feasible ? "yes" : "no") << " (bounds " << num(fz.lower) << " .. " << num(fz.upper)
        << ")\n";
    out << "min Delta       " << num(best->min_delta) << '\n';

    double k = k_opt.value_or(default_gain(w));
    json notes = json::array();
    if (!opts.unclamped && std::abs(k) >= k_bound(w)) {
      const double c = clamp_gain(k, w);
      notes.push_back("k = " + num(k) + " is not below k_bar; clamped to " + num(c));
      out << "note            k = " << num(k) << " is not below k_bar; clamped to " << num(c) << '\n';
      k = c;
    }
    const WarpedPotential wp =
        WarpedPotential::make(w, u, {k, -k},
                              opts.unclamped ? WarpedPotential::GainPolicy::AllowAboveBound
                                               : WarpedPotential::GainPolicy::Strict);
    out << "gains           k1 = " << num(k) << ", k2 = " << num(-k)
        << (wp.within_gain_bound() ? "" : "  (above k_bar)") << '\n';

    out << "eigendirections\n";
    json dirs = json::array();
    for (const auto& d : eigendirections(w, u)) {
      out << "  v = " << vec(d.v) << "  lambda^W = " << num(d.lambda_w) << "  Delta = " << num(d.delta)
          << (d.from_plane ? "  (eigenplane)" : "") << '\n';
      dirs.push_back({{"v", to_json(d.v)}, {"lambda_w", d.lambda_w}, {"delta", d.delta}});
    }
    out << "critical points\n";
    json cps = json::array();
    for (const auto& cp : critical_points(wp)) {
      out << "  v = " << vec(cp.v) << "  q = " << cp.q << "  V_bar = " << num(cp.v_bar) << "  theta = " << num(cp.theta)
          << "  mu = " << num(mu(wp, cp.rotation, cp.q)) << '\n';
      cps.push_back({{"v", to_json(cp.v)}, {"q", cp.q}, {"v_bar", cp.v_bar}, {"theta", cp.theta}});
    }
    const double g = gap(wp);
    out << "gap             " << num(g) << '\n';
    out << "gap lower bound " << num(gap_lower_bound(wp)) << '\n';
    out << "suggested delta " << num(0.5 * g) << '\n';

    summary["feasible"] = fz.feasible;
    summary["u"] = to_json(u);
    summary["min_delta"] = best->min_delta;
    summary["k"] = k;
    summary["eigendirections"] = dirs;
    summary["critical_points"] = cps;
    summary["gap"] = g;
    summary["suggested_delta"] = 0.5 * g;
    summary["notes"] = notes;
    out << summary.dump() << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
}

int cmd_simulate(const std::filesystem::path& scenario, const std::string& out_csv, const CommandOptions& opts,
                 std::ostream& out, std::ostream& err) {
  try {
    const Scenario sc = load(scenario, opts);
    for (const auto& n : sc.notes) err << "note: " << n << '\n';
    const TrajectoryLog log = run(sc.config);
    write_csv_file(out_csv, log, sc.header_lines());
    const auto& last = log.records.back();
    out << "wrote " << out_csv << ": " << log.records.size() << " records, " << log.jumps << " jumps, e2(" << num(last.t)
        << ") = " << num(last.e2) << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
}

int cmd_compare(const std::filesystem::path& scenario, const std::string& out_prefix, double threshold,
                const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const Scenario sc = load(scenario, opts);
    for (const auto& n : sc.notes) err << "note: " << n << '\n';
    if (!sc.config.hybrid) throw PreconditionError("compare needs a hybrid configuration");
    ScenarioConfig hybrid = sc.config;
    hybrid.controller = ControllerKind::Hybrid;
    ScenarioConfig smooth = sc.config;
    smooth.controller = ControllerKind::Smooth;
    const auto logs = run_batch({hybrid, smooth}, 2);
    const char* names[2] = {"hybrid", "smooth"};
    out << "controller  jumps  settle(e2<" << num(threshold) << ")  first(e2<" << num(threshold) << ")  e2(end)\n";
    for (std::size_t i = 0; i < 2; ++i) {
      auto header = sc.header_lines();
      header.push_back(std::string("compare run: ") + names[i]);
      write_csv_file(out_prefix + "_" + names[i] + ".csv", logs[i], header);
      char line[160];
      std::snprintf(line, sizeof line, "%-10s  %5d  %14s  %13s  %.6g\n", names[i], logs[i].jumps,
                    time_or_none(settling_time(logs[i], threshold)).c_str(),
                    time_or_none(first_time_below(logs[i], threshold)).c_str(), logs[i].records.back().e2);
      out << line;
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
}

int cmd_sweep(const std::filesystem::path& scenario, const std::vector<double>& eps, const std::string& out_prefix,
              unsigned threads, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    if (eps.empty()) throw ParseError("sweep needs at least one eps value");
    const Scenario sc = load(scenario, opts);
    for (const auto& n : sc.notes) err << "note: " << n << '\n';
    const auto logs = sweep_epsilon(sc.config, eps, threads);
    out << "eps            first(e2<0.5)  first(e2<0.1)  e2(end)\n";
    std::vector<std::optional<double>> onset;
    for (std::size_t i = 0; i < eps.size(); ++i) {
      auto header = sc.header_lines();
      header.push_back("sweep eps = " + num(eps[i], 17) + ", R0 = R_a(pi + eps, e1)");
      write_csv_file(out_prefix + "_" + std::to_string(i) + ".csv", logs[i], header);
      onset.push_back(first_time_below(logs[i], 0.5));
      char line[160];
      std::snprintf(line, sizeof line, "%-13.6g  %13s  %13s  %.6g\n", eps[i], time_or_none(onset.back()).c_str(),
                    time_or_none(first_time_below(logs[i], 0.1)).c_str(), logs[i].records.back().e2);
      out << line;
    }
    // Smaller eps starts closer to the unstable equilibrium and must take longer.
    bool monotone = true;
    for (std::size_t i = 0; i < eps.size(); ++i)
      for (std::size_t j = 0; j < eps.size(); ++j) {
        if (!(eps[i] < eps[j])) continue;
        const double ti = onset[i].value_or(std::numeric_limits<double>::infinity());
        const double tj = onset[j].value_or(std::numeric_limits<double>::infinity());
        if (!(ti > tj)) monotone = false;
      }
    out << "onset strictly decreasing in eps: " << (monotone ? "yes" : "no") << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
}

int cmd_verify(const VerifyOptions& vopts, std::ostream& out, std::ostream& err) {
  try {
    bool ok = true;
    for (const auto& r : run_verification(vopts)) {
      char line[64];
      std::snprintf(line, sizeof line, "%-18s %-4s %9zu samples %7.2fs  ", r.name.c_str(), r.passed ? "PASS" : "FAIL",
                    r.samples, r.seconds);
      out << line << r.detail << '\n';
      ok = ok && r.passed;
    }
    out << (ok ? "all suites passed" : "some suites failed") << '\n';
    return ok ? kExitOk : kExitFailure;
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
}

}  // namespace synergy
