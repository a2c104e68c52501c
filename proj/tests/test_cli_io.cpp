#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "synergy/commands.hpp"
#include "synergy/error.hpp"
#include "synergy/scenario.hpp"
#include "synergy/trajectory_csv.hpp"

namespace synergy {
namespace {

namespace fs = std::filesystem;

const std::string kScenarioDir = SYNERGY_SCENARIO_DIR;

const char* kMinimal = R"(
[plant]
inertia = diag(1,1,2)
r = 1,0,0; 0,1,0; 0,0,1
rho1 = 1,3,5
rho2 = 0.1,0.3,0.5

[warping]
u1 = auto
u2 = auto
k1 = auto
k2 = auto

[hysteresis]
delta1 = auto
delta2 = auto

[init]
R0 = pi,1,0,0

[sim]
t_end = 1
)";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("synergy_test_" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& s) const { return path_ / s; }

 private:
  fs::path path_;
};

std::string with_line(std::string text, const std::string& after, const std::string& line) {
  const auto pos = text.find(after);
  text.insert(pos + after.size(), "\n" + line);
  return text;
}

bool has_line_containing(const std::vector<std::string>& lines, const std::string& needle) {
  for (const auto& l : lines)
    if (l.find(needle) != std::string::npos) return true;
  return false;
}

TEST(Scenario, AutoResolution) {
  const Scenario sc = parse_scenario(kMinimal);
  const auto& cfg = sc.config;
  ASSERT_TRUE(cfg.hybrid.has_value());
  const auto& wp1 = cfg.hybrid->wp(1);
  EXPECT_LT((wp1.u() - Vec3(0, std::sqrt(3.0 / 8), std::sqrt(5.0 / 8))).norm(), 1e-12);
  EXPECT_NEAR(wp1.gain(1), 0.95 * wp1.k_bar(), 1e-16);
  EXPECT_EQ(wp1.gain(2), -wp1.gain(1));
  EXPECT_NEAR(cfg.hybrid->delta(1), 0.5 * *wp1.gap(), 1e-16);
  EXPECT_NEAR(cfg.hybrid->delta(2), 0.5 * *cfg.hybrid->wp(2).gap(), 1e-16);
  EXPECT_EQ(cfg.controller, ControllerKind::Hybrid);
  EXPECT_EQ(cfg.t_end, 1.0);
  EXPECT_EQ(cfg.dt, 1e-3);
  EXPECT_EQ(cfg.r0.matrix(), Mat3::diag(1, -1, -1));
  EXPECT_TRUE(sc.notes.empty());
  // Resolved values are echoed for the output header.
  const auto header = sc.header_lines();
  EXPECT_TRUE(has_line_containing(header, "u1 = "));
  EXPECT_TRUE(has_line_containing(header, "k1 = "));
  EXPECT_TRUE(has_line_containing(header, "delta1 = "));
  EXPECT_TRUE(has_line_containing(header, "gap2 = "));
}

TEST(Scenario, GainsAboveBoundAreClampedWithNotes) {
  const Scenario sc = load_scenario(kScenarioDir + "/half_turn_hybrid.scn");
  const auto& wp1 = sc.config.hybrid->wp(1);
  EXPECT_NEAR(wp1.gain(1), 0.99 * wp1.k_bar(), 1e-16);
  EXPECT_NEAR(sc.config.hybrid->wp(2).gain(1), 0.99 * sc.config.hybrid->wp(2).k_bar(), 1e-15);
  EXPECT_NEAR(sc.config.hybrid->delta(1), 0.5 * *wp1.gap(), 1e-15);
  EXPECT_TRUE(has_line_containing(sc.notes, "k1 = 0.03,-0.03 is not below k_bar"));
  EXPECT_TRUE(has_line_containing(sc.notes, "k2 = 0.3,-0.3 is not below k_bar"));
  EXPECT_TRUE(has_line_containing(sc.notes, "delta1 = 0.5 is not below the gap"));
  EXPECT_TRUE(has_line_containing(sc.notes, "delta2 = 0.05 is not below the gap"));

  const Scenario exact = load_scenario(kScenarioDir + "/half_turn_hybrid.scn", {true});
  EXPECT_EQ(exact.config.hybrid->wp(1).gain(1), 0.03);
  EXPECT_EQ(exact.config.hybrid->wp(2).gain(1), 0.3);
  EXPECT_EQ(exact.config.hybrid->delta(1), 0.5);
  EXPECT_EQ(exact.config.hybrid->delta(2), 0.05);
  EXPECT_TRUE(exact.notes.empty());
}

TEST(Scenario, RotationGrammar) {
  const auto r0 = [](const std::string& spec) {
    std::string text = kMinimal;
    text.replace(text.find("R0 = pi,1,0,0"), 13, "R0 = " + spec);
    return parse_scenario(text).config.r0.matrix();
  };
  EXPECT_EQ(r0("identity"), Mat3::identity());
  EXPECT_LT((r0("1.5707963267948966,0,0,2") - rodrigues(kPi / 2, Vec3::unit(2)).matrix()).frobenius_norm(), 1e-15);
  EXPECT_LT((r0("quat(0,0,0,3)") - Mat3::diag(-1, -1, 1)).frobenius_norm(), 1e-15);
  EXPECT_THROW(r0("1,0,0,0"), ParseError);
  EXPECT_THROW(r0("quat(0,0,0,0)"), ParseError);
  EXPECT_THROW(r0("1,2,3"), ParseError);
  EXPECT_THROW(r0("critical(1)"), ParseError);
  EXPECT_THROW(r0("critical(4,1)"), ParseError);

  // critical(i, q) places X_1 = R0 Rhat0^T at the critical point of U_1(., q).
  const Scenario sc = parse_scenario(std::string(kMinimal).replace(std::string(kMinimal).find("R0 = pi,1,0,0"), 13,
                                                                   "R0 = critical(3,1)\nRhat0 = 0.3,0,1,0"));
  const auto& wp = sc.config.hybrid->wp(1);
  const Rotation x1 = sc.config.r0 * sc.config.r_hat0.transpose();
  EXPECT_LT(psi(wp.weight().a() * gamma(wp, x1, 1)).norm(), 1e-9);
  EXPECT_NEAR(u_value(wp, x1, 1), 2.0 * wp.weight().w_min(), 1e-9);
  EXPECT_TRUE(has_line_containing(sc.notes, "R0 = critical point"));

  std::string bad = kMinimal;
  bad.replace(bad.find("R0 = pi,1,0,0"), 13, "R0 = identity\nRd = critical(1,1)");
  EXPECT_THROW(parse_scenario(bad), ParseError);
}

TEST(Scenario, RejectsMalformedInput) {
  const std::string base = kMinimal;
  EXPECT_THROW(parse_scenario(with_line(base, "[sim]", "bogus = 1")), ParseError);
  EXPECT_THROW(parse_scenario(with_line(base, "[sim]", "t_end = 2")), ParseError);
  EXPECT_THROW(parse_scenario(with_line(base, "[sim]", "t_end")), ParseError);
  EXPECT_THROW(parse_scenario(with_line(base, "[sim]", "dt = fast")), ParseError);
  EXPECT_THROW(parse_scenario(with_line(base, "[sim]", "controller = pid")), ParseError);
  EXPECT_THROW(parse_scenario(base + "\n[extra]\n"), ParseError);
  EXPECT_THROW(parse_scenario(base + "\n[sim]\n"), ParseError);
  EXPECT_THROW(parse_scenario(base + "\n[sim\n"), ParseError);
  EXPECT_THROW(parse_scenario("x = 1\n" + base), ParseError);
  EXPECT_THROW(parse_scenario(with_line(base, "[init]", "q0 = 1.5,1")), ParseError);
  EXPECT_THROW(parse_scenario(with_line(base, "[init]", "omega0 = 1,2")), ParseError);
  std::string no_rho = base;
  no_rho.erase(no_rho.find("rho2 = 0.1,0.3,0.5"), 18);
  EXPECT_THROW(parse_scenario(no_rho), ParseError);
  std::string short_rho = base;
  short_rho.replace(short_rho.find("rho1 = 1,3,5"), 12, "rho1 = 1,3");
  EXPECT_THROW(parse_scenario(short_rho), ParseError);
  std::string neg_rho = base;
  neg_rho.replace(neg_rho.find("rho1 = 1,3,5"), 12, "rho1 = 1,-3,5");
  EXPECT_THROW(parse_scenario(neg_rho), ParseError);

  // Errors carry the file name and line number.
  try {
    parse_scenario(with_line(base, "[sim]", "bogus = 1"), {}, "demo.scn");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("demo.scn:"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos) << e.what();
  }
}

TEST(Scenario, WeightCrossCheck) {
  const std::string base = kMinimal;
  EXPECT_NO_THROW(parse_scenario("[weights]\na1 = diag(1,3,5)\na2 = 0.1,0,0, 0,0.3,0, 0,0,0.5\n" + base));
  EXPECT_THROW(parse_scenario("[weights]\na1 = diag(1,3,6)\n" + base), ParseError);
}

TEST(Scenario, AugmentsTwoReferences) {
  std::string text = kMinimal;
  text.replace(text.find("r = 1,0,0; 0,1,0; 0,0,1"), 23, "r = 1,0,0; 0,1,0\naugment_rho = 5,0.5");
  text.replace(text.find("rho1 = 1,3,5"), 12, "rho1 = 1,3");
  text.replace(text.find("rho2 = 0.1,0.3,0.5"), 18, "rho2 = 0.1,0.3");
  const Scenario sc = parse_scenario(text);
  ASSERT_EQ(sc.config.measurements.size(), 3u);
  EXPECT_EQ(build_a_h(sc.config.measurements, 1), Mat3::diag(1, 3, 5));
  EXPECT_TRUE(has_line_containing(sc.notes, "added r_1 x r_2"));
}

TEST(Scenario, PreconditionsSurfaceOnlyForHybrid) {
  std::string iso = kMinimal;
  iso.replace(iso.find("rho1 = 1,3,5"), 12, "rho1 = 2,2,2");
  EXPECT_THROW(parse_scenario(iso), PreconditionError);
  const Scenario smooth = parse_scenario(with_line(iso, "[sim]", "controller = smooth"));
  EXPECT_FALSE(smooth.config.hybrid.has_value());
  EXPECT_TRUE(has_line_containing(smooth.notes, "hybrid configuration unavailable"));
}

TEST(Scenario, BundledFilesParse) {
  for (const char* f : {"half_turn_sweep.scn", "half_turn_hybrid.scn", "half_turn_smooth.scn", "critical_start.scn"}) {
    EXPECT_NO_THROW(load_scenario(kScenarioDir + "/" + f)) << f;
    EXPECT_NO_THROW(load_scenario(kScenarioDir + "/" + f, {true})) << f;
  }
  EXPECT_THROW(load_scenario(kScenarioDir + "/missing.scn"), ParseError);
}

TEST(ValueGrammar, MatricesAndReals) {
  EXPECT_EQ(parse_matrix("diag(1, 3, 5)"), Mat3::diag(1, 3, 5));
  EXPECT_EQ(parse_matrix("1,2,3,4,5,6,7,8,9"), Mat3({1, 2, 3, 4, 5, 6, 7, 8, 9}));
  EXPECT_THROW(parse_matrix("diag(1,3)"), ParseError);
  EXPECT_THROW(parse_matrix("1,2,3"), ParseError);
  EXPECT_EQ(parse_vec3(" 1, -2.5 ,3e-1"), Vec3(1, -2.5, 0.3));
  EXPECT_EQ(parse_real("1e-3"), 1e-3);
  EXPECT_THROW(parse_real("1e-3x"), ParseError);
  EXPECT_THROW(parse_real(""), ParseError);
  EXPECT_THROW(parse_real("nan"), ParseError);
  EXPECT_EQ(parse_reals("1,2,3").size(), 3u);
}

TrajectoryLog small_log() {
  TrajectoryLog log;
  std::mt19937_64 rng(81);
  std::normal_distribution<double> g;
  for (int i = 0; i < 50; ++i) {
    LogRecord r;
    r.t = i * 1e-3;
    r.j = i >= 20 ? 1 : 0;
    r.q1 = i >= 20 ? 2 : 1;
    r.q2 = 1;
    r.e1 = g(rng);
    r.e2 = std::abs(g(rng));
    r.omega = {g(rng), g(rng), g(rng)};
    r.tau = {g(rng), g(rng) * 1e-300, g(rng) * 1e300};
    r.v = g(rng);
    r.u1 = 1.0 / 3.0;
    r.u2 = g(rng);
    r.mu1 = g(rng);
    r.mu2 = -0.0;
    log.records.push_back(r);
    if (i == 19) {
      r.j = 1;
      r.q1 = 2;
      log.records.push_back(r);
    }
  }
  log.jumps = 1;
  log.steps = 49;
  return log;
}

TEST(Csv, ExactHeaderAndRoundTrip) {
  const auto log = small_log();
  std::stringstream ss;
  write_csv(ss, log, {"first comment", "second"});
  const std::string text = ss.str();
  EXPECT_EQ(text.rfind("# first comment\n# second\n", 0), 0u);
  EXPECT_NE(text.find("\nt,j,q1,q2,e1,e2,wx,wy,wz,taux,tauy,tauz,V,U1,U2,mu1,mu2\n"), std::string::npos);

  std::vector<std::string> comments;
  const auto back = read_csv(ss, &comments);
  EXPECT_EQ(back.records, log.records);
  EXPECT_EQ(back.jumps, 1);
  EXPECT_EQ(back.steps, 49);
  EXPECT_EQ(comments, (std::vector<std::string>{"first comment", "second"}));
}

TEST(Csv, RejectsMalformedFiles) {
  const auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return read_csv(in);
  };
  const std::string h(kCsvHeader);
  const std::string row = "0,0,1,1,0,0,0,0,0,0,0,0,0,0,0,0,0";
  EXPECT_NO_THROW(parse(h + "\n" + row + "\n"));
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("t,j\n" + row + "\n"), ParseError);
  EXPECT_THROW(parse(h + "\n0,0,1,1\n"), ParseError);
  EXPECT_THROW(parse(h + "\n" + row + ",7\n"), ParseError);
  EXPECT_THROW(parse(h + "\n0.002,0,1,1,0,0,0,0,0,0,0,0,0,0,0,0,0\n" + row + "\n"), ParseError);
  EXPECT_THROW(parse(h + "\n0,1,1,1,0,0,0,0,0,0,0,0,0,0,0,0,0\n" + row + "\n"), ParseError);
  EXPECT_THROW(parse(h + "\n0,0,1,1,x,0,0,0,0,0,0,0,0,0,0,0,0\n"), ParseError);
}

TEST(Csv, SimulationRoundTripAndDeterminism) {
  Scenario sc = parse_scenario(with_line(kMinimal, "[sim]", "noise_std = 0.01\nseed = 5"));
  const auto a = run(sc.config);
  const auto b = run(sc.config);
  std::stringstream sa, sb;
  write_csv(sa, a, sc.header_lines());
  write_csv(sb, b, sc.header_lines());
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(read_csv(sa).records, a.records);
}

TEST(Commands, GapReports) {
  std::ostringstream out, err;
  EXPECT_EQ(cmd_gap("diag(1,3,5)", std::nullopt, {}, out, err), kExitOk);
  const std::string s = out.str();
  EXPECT_NE(s.find("optimal u       [0, 0.612372, 0.790569]"), std::string::npos) << s;
  EXPECT_NE(s.find("min Delta       1\n"), std::string::npos);
  EXPECT_NE(s.find("k_bar           0.0279508"), std::string::npos);
  EXPECT_NE(s.find("\"gap\":"), std::string::npos);

  std::ostringstream o2, e2;
  EXPECT_EQ(cmd_gap("diag(1,3,5)", 0.03, {true, std::nullopt}, o2, e2), kExitOk);
  EXPECT_NE(o2.str().find("theta = 0.477"), std::string::npos) << o2.str();
  EXPECT_NE(o2.str().find("(above k_bar)"), std::string::npos);

  std::ostringstream o3, e3;
  EXPECT_EQ(cmd_gap("diag(1,3,5)", 0.03, {}, o3, e3), kExitOk);
  EXPECT_NE(o3.str().find("clamped to"), std::string::npos);

  std::ostringstream o4, e4;
  EXPECT_EQ(cmd_gap("diag(2,2,2)", std::nullopt, {}, o4, e4), kExitPrecondition);
  EXPECT_NE(o4.str().find("infeasible: isotropic spectrum"), std::string::npos);
  std::ostringstream o5, e5;
  EXPECT_EQ(cmd_gap("diag(1,2,2)", std::nullopt, {}, o5, e5), kExitPrecondition);
  std::ostringstream o6, e6;
  EXPECT_EQ(cmd_gap("diag(1,1,5)", std::nullopt, {}, o6, e6), kExitOk);
  EXPECT_NE(o6.str().find("(u^T v3)^2 = 0.8"), std::string::npos) << o6.str();
  std::ostringstream o7, e7;
  EXPECT_EQ(cmd_gap("diag(1,3", std::nullopt, {}, o7, e7), kExitParse);
  std::ostringstream o8, e8;
  EXPECT_EQ(cmd_gap("diag(3,-1,-1)", std::nullopt, {}, o8, e8), kExitPrecondition);
}

TEST(Commands, SimulateWritesSelfDocumentingCsv) {
  TempDir dir;
  const auto scn = dir / "s.scn";
  std::ofstream(scn) << kMinimal;
  std::ostringstream out, err;
  const auto csv = (dir / "a.csv").string();
  ASSERT_EQ(cmd_simulate(scn, csv, {}, out, err), kExitOk) << err.str();
  const std::string text = slurp(csv);
  EXPECT_EQ(text.rfind("# scenario: ", 0), 0u);
  EXPECT_NE(text.find("# u1 = "), std::string::npos);
  std::ifstream in(csv);
  const auto log = read_csv(in);
  EXPECT_EQ(log.records.size(), 1001u);

  // Identical scenario and seed give identical bytes.
  const auto csv2 = (dir / "b.csv").string();
  ASSERT_EQ(cmd_simulate(scn, csv2, {}, out, err), kExitOk);
  EXPECT_EQ(slurp(csv2), text);
  const auto csv3 = (dir / "c.csv").string();
  ASSERT_EQ(cmd_simulate(scn, csv3, {false, 42}, out, err), kExitOk);
  EXPECT_NE(slurp(csv3).find("seed overridden to 42"), std::string::npos);
}

TEST(Commands, ExitCodes) {
  TempDir dir;
  std::ostringstream out, err;
  const auto bad = dir / "bad.scn";
  std::ofstream(bad) << "[nope]\n";
  EXPECT_EQ(cmd_simulate(bad, (dir / "x.csv").string(), {}, out, err), kExitParse);

  const auto zeno = dir / "zeno.scn";
  std::string text = kMinimal;
  text.replace(text.find("R0 = pi,1,0,0"), 13, "R0 = critical(3,1)");
  std::ofstream(zeno) << with_line(text, "[sim]", "max_jumps = 0");
  EXPECT_EQ(cmd_simulate(zeno, (dir / "z.csv").string(), {}, out, err), kExitZeno);
  EXPECT_NE(err.str().find("jump guard"), std::string::npos);

  const auto iso = dir / "iso.scn";
  std::string itext = kMinimal;
  itext.replace(itext.find("rho1 = 1,3,5"), 12, "rho1 = 2,2,2");
  std::ofstream(iso) << itext;
  EXPECT_EQ(cmd_simulate(iso, (dir / "i.csv").string(), {}, out, err), kExitPrecondition);

  EXPECT_EQ(report_error(ParseError("p"), err), kExitParse);
  EXPECT_EQ(report_error(DomainError("d"), err), kExitPrecondition);
  EXPECT_EQ(report_error(PreconditionError("c"), err), kExitPrecondition);
  EXPECT_EQ(report_error(ZenoError("z"), err), kExitZeno);
  EXPECT_EQ(report_error(std::runtime_error("x"), err), kExitFailure);
}

TEST(Commands, CompareFromTarget) {
  TempDir dir;
  const auto scn = dir / "id.scn";
  std::string text = kMinimal;
  text.replace(text.find("R0 = pi,1,0,0"), 13, "R0 = identity");
  std::ofstream(scn) << text;
  std::ostringstream out, err;
  const std::string prefix = (dir / "cmp").string();
  ASSERT_EQ(cmd_compare(scn, prefix, 0.01, {}, out, err), kExitOk) << err.str();
  EXPECT_TRUE(fs::exists(prefix + "_hybrid.csv"));
  EXPECT_TRUE(fs::exists(prefix + "_smooth.csv"));
  // Both controllers are at the target from t = 0.
  std::istringstream table(out.str());
  std::string line;
  std::getline(table, line);
  for (const char* name : {"hybrid", "smooth"}) {
    ASSERT_TRUE(std::getline(table, line));
    std::istringstream cols(line);
    std::string who, jumps, settle, first;
    cols >> who >> jumps >> settle >> first;
    EXPECT_EQ(who, name);
    EXPECT_EQ(jumps, "0");
    EXPECT_EQ(settle, "0");
    EXPECT_EQ(first, "0");
  }
}

TEST(Commands, SweepReportsOrdering) {
  TempDir dir;
  std::ostringstream out, err;
  const std::string prefix = (dir / "sw").string();
  ASSERT_EQ(cmd_sweep(kScenarioDir + "/half_turn_sweep.scn", {1e-1, 1e-2}, prefix, 2, {}, out, err), kExitOk)
      << err.str();
  EXPECT_NE(out.str().find("onset strictly decreasing in eps: yes"), std::string::npos) << out.str();
  EXPECT_TRUE(fs::exists(prefix + "_0.csv"));
  EXPECT_TRUE(fs::exists(prefix + "_1.csv"));
  EXPECT_EQ(cmd_sweep(kScenarioDir + "/half_turn_sweep.scn", {}, prefix, 2, {}, out, err), kExitParse);
  EXPECT_EQ(cmd_sweep(kScenarioDir + "/half_turn_hybrid.scn", {0.1}, prefix, 2, {}, out, err), kExitPrecondition);
}

}  // namespace
}  // namespace synergy
