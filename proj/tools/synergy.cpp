#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "synergy/commands.hpp"
#include "synergy/error.hpp"
#include "synergy/scenario.hpp"

int main(int argc, char** argv) {
  using namespace synergy;

  CLI::App app{"Synergistic potential functions on SO(3) and velocity-free hybrid attitude control"};
  app.require_subcommand(1);

  CommandOptions opts;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_flag("--unclamped", opts.unclamped, "keep gains above k_bar and thresholds above the gap");
    cmd->add_option("--seed", seed, "override the scenario RNG seed");
  };

  std::string weight;
  double k = 0.0;
  auto* gap = app.add_subcommand("gap", "report spectrum, gain bound, optimal axis and gap for a weight");
  gap->add_option("weight", weight, "diag(x,y,z) or 9 comma-separated reals")->required();
  auto* k_opt = gap->add_option("--k", k, "gain k (k_1 = k, k_2 = -k); default 0.95 k_bar");
  add_common(gap);

  std::string scenario, out;
  auto* simulate = app.add_subcommand("simulate", "run a scenario and write its trajectory CSV");
  simulate->add_option("scenario", scenario, "scenario file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", out, "output CSV")->required();
  add_common(simulate);

  double threshold = 0.01;
  auto* compare = app.add_subcommand("compare", "run hybrid and smooth controllers from the same state");
  compare->add_option("scenario", scenario, "scenario file")->required()->check(CLI::ExistingFile);
  compare->add_option("--out", out, "output prefix")->required();
  compare->add_option("--threshold", threshold, "e2 threshold for the timing table")->capture_default_str();
  add_common(compare);

  std::string eps_list = "1e-1,1e-2,1e-3";
  unsigned threads = 0;
  auto* sweep = app.add_subcommand("sweep", "smooth-baseline runs from R_a(pi + eps, e1)");
  sweep->add_option("scenario", scenario, "scenario file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--eps", eps_list, "comma-separated eps values")->capture_default_str();
  sweep->add_option("--out", out, "output prefix")->required();
  sweep->add_option("--threads", threads, "parallel runs (0 = all cores)");
  add_common(sweep);

  std::string level = "quick";
  VerifyOptions vopts;
  auto* verify = app.add_subcommand("verify", "run the built-in oracle suites");
  verify->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}))->capture_default_str();
  verify->add_option("--gain-scale", vopts.gain_scale, "scale of k relative to 0.99 k_bar in the det-Theta suite");
  verify->add_option("--seed", vopts.seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitParse;
  }

  for (auto* cmd : {gap, simulate, compare, sweep}) {
    if (cmd->parsed() && cmd->count("--seed") > 0) opts.seed = seed;
  }

  if (gap->parsed()) {
    return cmd_gap(weight, k_opt->count() ? std::optional<double>(k) : std::nullopt, opts, std::cout, std::cerr);
  }
  if (simulate->parsed()) return cmd_simulate(scenario, out, opts, std::cout, std::cerr);
  if (compare->parsed()) return cmd_compare(scenario, out, threshold, opts, std::cout, std::cerr);
  if (sweep->parsed()) {
    std::vector<double> eps;
    try {
      eps = parse_reals(eps_list);
    } catch (const std::exception& e) {
      return report_error(e, std::cerr);
    }
    return cmd_sweep(scenario, eps, out, threads, opts, std::cout, std::cerr);
  }
  vopts.level = level == "full" ? VerifyLevel::Full : VerifyLevel::Quick;
  return cmd_verify(vopts, std::cout, std::cerr);
}
