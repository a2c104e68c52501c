#pragma once

// Command implementations behind the `synergy` executable. Each returns the
// process exit code: 0 success, 2 parse error, 3 precondition failure,
// 4 jump or step budget exhausted, 1 any other failure or a failed check.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "synergy/verification.hpp"

namespace synergy {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitParse = 2,
  kExitPrecondition = 3,
  kExitZeno = 4,
};

struct CommandOptions {
  bool unclamped = false;
  std::optional<std::uint64_t> seed;
};

// Spectral report, gain bound, optimal axis, critical points and gap for one
// weight, followed by a one-line JSON summary.
int cmd_gap(const std::string& weight, std::optional<double> k, const CommandOptions& opts,
            std::ostream& out, std::ostream& err);

// Runs the scenario and writes its trajectory CSV.
int cmd_simulate(const std::filesystem::path& scenario, const std::string& out_csv,
                 const CommandOptions& opts, std::ostream& out, std::ostream& err);

// Runs the hybrid law and the smooth baseline from the same initial state and
// writes <prefix>_hybrid.csv and <prefix>_smooth.csv.
int cmd_compare(const std::filesystem::path& scenario, const std::string& out_prefix, double threshold,
                const CommandOptions& opts, std::ostream& out, std::ostream& err);

// One smooth-baseline run per eps, written to <prefix>_<i>.csv.
int cmd_sweep(const std::filesystem::path& scenario, const std::vector<double>& eps,
              const std::string& out_prefix, unsigned threads, const CommandOptions& opts,
              std::ostream& out, std::ostream& err);

int cmd_verify(const VerifyOptions& vopts, std::ostream& out, std::ostream& err);

// Maps a caught exception to its exit code and prints it.
int report_error(const std::exception& e, std::ostream& err);

}  // namespace synergy
