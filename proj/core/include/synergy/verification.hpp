#pragma once

// Self-checks run by `synergy verify`: randomized oracles for the kernel
// identities, gradients, measurement-path equivalence, the gap formula, the
// differential of the warp and, at the full level, a sphere grid search for
// the gap-maximizing axis.

#include <cstdint>
#include <string>
#include <vector>

namespace synergy {

enum class VerifyLevel { Quick, Full };

struct VerifyOptions {
  VerifyLevel level = VerifyLevel::Quick;
  // The det-Theta suite samples at |k| = 0.99 * gain_scale * k_bar; a scale
  // that pushes |k| to k_bar or beyond is reported as a precondition failure.
  double gain_scale = 1.0;
  std::uint64_t seed = 1;
};

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
  std::size_t samples = 0;
  double seconds = 0.0;
};

std::vector<SuiteResult> run_verification(const VerifyOptions& opts);

}  // namespace synergy
