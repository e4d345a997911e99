#include "lzc/app/verify.hpp"

#include <array>
#include <cmath>
#include <random>

#include "lzc/app/commands.hpp"
#include "lzc/app/config.hpp"
#include "lzc/app/parallel.hpp"
#include "lzc/contour.hpp"
#include "lzc/propagator.hpp"

namespace lzc::app {
namespace {

// Bit-exact across standard libraries, unlike std::uniform_real_distribution.
double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * unit(rng);
}

// Magnitude in (0, 1.5].
double coupling(std::mt19937_64& rng) { return 1.5 * (1.0 - unit(rng)); }

ModelParams draw(std::mt19937_64& rng, int slope_case) {
  const double k2 = uniform(rng, 0.0, 2.0);
  const double g1 = coupling(rng);
  const double g2 = coupling(rng);
  double b1 = 0.0, b2 = 0.0;
  do {
    b1 = uniform(rng, 0.1, 1.0);
    b2 = uniform(rng, 0.1, 1.0);
    if (slope_case == 1) b1 = -b1;
    if (slope_case == 2) {
      b1 = -b1;
      b2 = -b2;
    }
  } while (std::abs(b1 - b2) < 0.05);
  if (rng() & 1u) return ModelParams(k2, g2, g1, b2, b1);
  return ModelParams(k2, g1, g2, b1, b2);
}

struct Property {
  const char* name;
  double threshold;
};

constexpr std::array<Property, 8> kProperties = {{
    {"double_stochasticity", 1e-6},
    {"row0_identity", 1e-6},
    {"entry_range", 1e-6},
    {"reflection_symmetry", 1e-9},
    {"negation_symmetry", 1e-9},
    {"oracle_agreement", kOracleThreshold},
    {"forward_reversed_transpose", kOracleThreshold},
    {"i_squared_identity", 1e-6},
}};

struct TrialOutcome {
  std::array<double, kProperties.size()> residual{};
  std::array<bool, kProperties.size()> applicable{};
  std::array<std::string, kProperties.size()> error{};
};

template <class Fn>
void measure(TrialOutcome& t, std::size_t k, Fn&& fn) {
  t.applicable[k] = true;
  try {
    t.residual[k] = fn();
  } catch (const std::exception& e) {
    t.error[k] = e.what();
  }
}

TrialOutcome run_trial(const ModelParams& params) {
  TrialOutcome t;
  TransitionMatrix closed;
  try {
    closed = transition_matrix(params);
  } catch (const std::exception& e) {
    for (std::size_t k = 0; k < kProperties.size(); ++k) {
      t.applicable[k] = true;
      t.error[k] = e.what();
    }
    return t;
  }

  measure(t, 0, [&] { return closed.stochastic_residual(); });
  measure(t, 1, [&] { return std::abs(closed.col_sum(0) - 1.0); });
  measure(t, 2, [&] {
    double r = 0.0;
    for (const auto& row : closed.p)
      for (double v : row) r = std::max({r, -v, v - 1.0});
    return r;
  });
  measure(t, 3, [&] {
    const auto [reflected, perm] = reflected_params(params);
    return max_abs_diff(transition_matrix(reflected).permuted(perm), closed);
  });
  measure(t, 4, [&] {
    const ModelParams negated(-params.k2(), params.caller_g(1), params.caller_g(2),
                              -params.caller_beta(1), -params.caller_beta(2));
    return max_abs_diff(transition_matrix(negated), closed);
  });
  oracle::NumericMatrix forward;
  measure(t, 5, [&] {
    forward = oracle::numeric_transition_matrix(params);
    return max_abs_diff(forward.matrix, closed);
  });
  if (t.error[5].empty()) {
    measure(t, 6, [&] {
      const oracle::NumericMatrix reversed =
          oracle::numeric_transition_matrix(params, {}, oracle::Direction::reversed);
      return max_abs_diff(reversed.matrix, forward.matrix.transposed());
    });
  }
  if (classify(params) == SlopeCase::BothPositive) {
    measure(t, 7, [&] {
      const contour::IdentitySides s = contour::i_squared_identity(params);
      return std::abs(s.lhs - s.rhs) / s.rhs;
    });
  }
  return t;
}

}  // namespace

bool VerifyReport::all_pass() const {
  for (const PropertyResult& p : properties)
    if (!p.pass) return false;
  return failures.empty();
}

std::vector<ModelParams> sample_parameter_sets(std::uint64_t seed, long trials) {
  std::mt19937_64 rng(seed);
  std::vector<ModelParams> out;
  out.reserve(static_cast<std::size_t>(std::max(trials, 0L)));
  for (long i = 0; i < trials; ++i) out.push_back(draw(rng, static_cast<int>(i % 3)));
  return out;
}

std::vector<ModelParams> sample_case1_sets(std::uint64_t seed, long count) {
  std::mt19937_64 rng(seed);
  std::vector<ModelParams> out;
  for (long i = 0; i < count; ++i) out.push_back(draw(rng, 0));
  return out;
}

VerifyReport run_verify(std::uint64_t seed, long trials, unsigned threads) {
  if (trials < 1) throw UsageError("trials must be >= 1");
  const std::vector<ModelParams> sets = sample_parameter_sets(seed, trials);
  std::vector<TrialOutcome> outcomes(sets.size());
  parallel_for(sets.size(), threads,
               [&](std::size_t i) { outcomes[i] = run_trial(sets[i]); });

  VerifyReport report;
  report.seed = seed;
  report.trials = trials;
  for (const Property& p : kProperties) report.properties.push_back({p.name, 0.0, p.threshold, true});

  for (std::size_t i = 0; i < sets.size(); ++i) {
    const ModelParams& params = sets[i];
    for (std::size_t k = 0; k < kProperties.size(); ++k) {
      if (!outcomes[i].applicable[k]) continue;
      PropertyResult& prop = report.properties[k];
      const bool errored = !outcomes[i].error[k].empty();
      const double r = outcomes[i].residual[k];
      if (!errored) prop.max_residual = std::max(prop.max_residual, r);
      if (errored || !(r <= prop.threshold)) {
        prop.pass = false;
        report.failures.push_back({prop.name, params.k2(), params.caller_g(1),
                                   params.caller_g(2), params.caller_beta(1),
                                   params.caller_beta(2), errored ? 0.0 : r,
                                   outcomes[i].error[k]});
      }
    }
  }
  return report;
}

nlohmann::json to_json(const VerifyReport& report) {
  nlohmann::json j;
  j["seed"] = report.seed;
  j["trials"] = report.trials;
  j["properties"] = nlohmann::json::array();
  for (const PropertyResult& p : report.properties) {
    j["properties"].push_back({{"name", p.name},
                               {"max_residual", p.max_residual},
                               {"threshold", p.threshold},
                               {"pass", p.pass}});
  }
  j["failures"] = nlohmann::json::array();
  for (const VerifyFailure& f : report.failures) {
    nlohmann::json entry = {{"property", f.property},
                            {"params", {{"k2", f.k2}, {"g1", f.g1}, {"g2", f.g2},
                                        {"b1", f.b1}, {"b2", f.b2}}},
                            {"residual", f.residual}};
    if (!f.message.empty()) entry["error"] = f.message;
    j["failures"].push_back(entry);
  }
  return j;
}

}  // namespace lzc::app
