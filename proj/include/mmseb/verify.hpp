#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mmseb/infodensity.hpp"

namespace mmseb {

struct VerifyConfig {
  std::uint64_t seed = 42;
  /// Number of consecutive seeds used by the soundness sweep.
  std::size_t sweep_seeds = 1;
  unsigned workers = 1;
  /// Random points per identity suite and joint.
  std::size_t identity_points = 1'000;
  /// Sample budget of the route-agreement suite.
  std::size_t route_samples = 100'000;
  /// Nested budget of the soundness suite.
  std::size_t sweep_outer = 500;
  std::size_t sweep_inner = 500;
};

struct SuiteResult {
  std::string name;
  bool passed = true;
  std::size_t checks = 0;
  std::size_t failures = 0;
  /// Largest normalized deviation seen (suite-specific units).
  double worst = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::vector<SuiteResult> suites;

  bool passed() const;
  /// Machine-readable summary.
  std::string to_json() const;
};

/// Joints covering every built-in channel and prior.
std::vector<JointModel> builtin_joints();

/// Identity, gradient and normalization suites on the given joints.
VerifyReport verify_joints(const VerifyConfig& config, const std::vector<JointModel>& joints);

/// All suites on the built-in joints, including constant exactness, MMSE
/// route agreement and the lower-bound soundness sweep.
VerifyReport run_verification(const VerifyConfig& config);

}  // namespace mmseb
