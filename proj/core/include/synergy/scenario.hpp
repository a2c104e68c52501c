#pragma once

// Line-oriented scenario files.
//
//   # comment
//   [section]
//   key = value
//
// Sections and keys:
//   [weights]    a1, a2            optional cross-check of sum rho_ih r_i r_i^T
//   [warping]    u1, u2            unit axis or `auto` (gap-maximizing axis)
//                k1, k2            k or `k,-k` pair, or `auto` (0.95 k_bar)
//   [hysteresis] delta1, delta2    value or `auto` (half the gap)
//   [plant]      inertia           9 reals or diag(x,y,z)
//                r                 references separated by `;`
//                rho1, rho2        one weight per reference
//                augment_rho       weights of the r_1 x r_2 entry added when
//                                  the references do not span R^3
//   [init]       R0, Rhat0, Rd     rotation (see below)
//                omega0            3 reals
//                q0                2 indices
//   [sim]        controller        hybrid | smooth | passive
//                dt, t_end, noise_std, seed, max_jumps
//
// Rotations: `identity`, `angle,ax,ay,az` (radians; the angle may be `pi`,
// the axis is normalized), `quat(w,x,y,z)` (normalized), or `critical(i,q)`
// which places X_1 = R0 Rhat0^T at the critical point of U_1(., q) for the
// i-th eigendirection (1-based, ascending eigenvalues of A_1). Only R0
// accepts it.
//
// Unknown sections or keys, duplicate keys and malformed values are
// ParseErrors; nothing is returned unless the whole file parses.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "synergy/simulator.hpp"

namespace synergy {

struct ScenarioOptions {
  // Keep gains above k_bar and thresholds above the gap instead of clamping.
  bool unclamped = false;
};

struct Scenario {
  std::string name;
  ScenarioConfig config;
  // Resolved parameters and clamp notes, echoed into output headers.
  std::vector<std::string> summary;
  std::vector<std::string> notes;

  std::vector<std::string> header_lines() const;
};

Scenario parse_scenario(std::string_view text, const ScenarioOptions& opts = {},
                        std::string name = "<memory>");
Scenario load_scenario(const std::filesystem::path& path, const ScenarioOptions& opts = {});

// Value grammars shared with the command line.
Mat3 parse_matrix(std::string_view s);
Vec3 parse_vec3(std::string_view s);
double parse_real(std::string_view s);
std::vector<double> parse_reals(std::string_view s);

}  // namespace synergy
