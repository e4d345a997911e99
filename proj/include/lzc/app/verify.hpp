#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "lzc/model.hpp"

namespace lzc::app {

struct PropertyResult {
  std::string name;
  double max_residual = 0.0;
  double threshold = 0.0;
  bool pass = true;
};

struct VerifyFailure {
  std::string property;
  double k2, g1, g2, b1, b2;
  double residual;
  std::string message;
};

struct VerifyReport {
  std::uint64_t seed = 0;
  long trials = 0;
  std::vector<PropertyResult> properties;
  std::vector<VerifyFailure> failures;

  bool all_pass() const;
};

/// Deterministic draws cycling through the three slope cases:
/// k2 in [0, 2], g in (0, 1.5], |beta| in [0.1, 1], |beta1 - beta2| >= 0.05.
/// Level labels are not sorted by slope.
std::vector<ModelParams> sample_parameter_sets(std::uint64_t seed, long trials);

/// Draws restricted to beta2 > beta1 > 0.
std::vector<ModelParams> sample_case1_sets(std::uint64_t seed, long count);

VerifyReport run_verify(std::uint64_t seed, long trials, unsigned threads);

nlohmann::json to_json(const VerifyReport& report);

}  // namespace lzc::app
