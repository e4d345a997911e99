#pragma once

#include <array>
#include <complex>

#include "lzc/model.hpp"

namespace lzc::oracle {

using Complex = std::complex<double>;

/// Amplitudes (a, b1, b2) of levels 0, 1, 2.
using StateVector = std::array<Complex, 3>;

enum class Direction {
  forward,   // tau: 0+ -> +infinity
  reversed,  // tau: -infinity -> 0-
};

struct IntegrationSettings {
  /// Start time; 0 selects min(1e-3, target_tol / (10 max(g1, g2, 1))).
  /// Ignored (integration starts at tau = 0) when k2 == 0.
  double epsilon = 0.0;
  /// End time T; 0 selects an automatic value from the slopes and couplings.
  double t_final = 0.0;
  double rel_tol = 1e-13;
  double abs_tol = 1e-15;
  long max_steps = 40'000'000;
  /// Apply the asymptotic correction for the (T, infinity) tail.
  bool tail_correction = true;
  /// Accuracy target for populations; drives the automatic epsilon and T.
  double target_tol = 1e-4;
};

struct PropagationResult {
  std::array<double, 3> populations{};
  /// Estimated distance of the populations from the T -> infinity limit.
  double conv_err = 0.0;
  double norm_drift = 0.0;
  long steps_used = 0;
};

/// Couplings with phases, for the gauge-invariance check.
struct ComplexCouplings {
  Complex g1;
  Complex g2;
};

/// Resolved start and end times for a parameter set.
double start_time(const ModelParams& params, const IntegrationSettings& settings);
double end_time(const ModelParams& params, const IntegrationSettings& settings);

/// Integrates the Schroedinger equation in the interaction picture starting
/// from `initial_level` (caller labeling). Forward runs from 0+ to +infinity,
/// reversed from -infinity to 0-. Populations are in the caller's labeling.
PropagationResult propagate(const ModelParams& params, int initial_level,
                            Direction direction,
                            const IntegrationSettings& settings = {});

struct NumericMatrix {
  TransitionMatrix matrix;
  double max_conv_err = 0.0;
  double max_norm_drift = 0.0;
  long steps_used = 0;
};

/// All three initial levels, integrated together as the columns of the
/// evolution operator. For the reversed direction entry (i, j) is the
/// probability of going from level i at -infinity to level j at 0-.
NumericMatrix numeric_transition_matrix(const ModelParams& params,
                                        const IntegrationSettings& settings = {},
                                        Direction direction = Direction::forward);

/// Same as numeric_transition_matrix but with complex couplings; only the
/// slopes and k2 are taken from `params`.
NumericMatrix numeric_transition_matrix(const ModelParams& params,
                                        const ComplexCouplings& couplings,
                                        const IntegrationSettings& settings,
                                        Direction direction = Direction::forward);

/// Propagates with couplings |g_i| e^{i phase_i} and returns the largest
/// entrywise deviation from the run with real couplings |g_i|.
double gauge_check(const ModelParams& params, double phase1, double phase2,
                   const IntegrationSettings& settings = {});

/// Lab-frame amplitudes evolved from tau0 to tau1 (same sign, both nonzero),
/// in the internal (slope-ordered) labeling.
StateVector evolve(const ModelParams& params, const StateVector& state,
                   double tau0, double tau1,
                   const IntegrationSettings& settings = {});

}  // namespace lzc::oracle
