#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lzc/model.hpp"
#include "lzc/propagator.hpp"

namespace lzc::app {

/// Entrywise closed-form vs oracle threshold used by matrix, sweep and verify.
inline constexpr double kOracleThreshold = 2e-3;

struct MatrixReport {
  ModelParams params{0.0, 0.0, 0.0, 1.0, 2.0};
  SlopeCase slope_case = SlopeCase::BothPositive;
  Shorthands shorthands{};
  TransitionMatrix closed;
  std::optional<oracle::NumericMatrix> oracle;
  double oracle_deviation = 0.0;
  /// Empty when every invariant holds, else names the first violated one.
  std::string violation;
};

MatrixReport compute_matrix(const ModelParams& params, bool verify);
void print_matrix_report(const MatrixReport& report, std::ostream& out);

struct SweepSpec {
  std::string variable = "k2";  // "k2" or "g"
  double from = 0.0;
  double to = 1.0;
  long steps = 101;
  double c1 = 1.0;  // g-sweeps: g1 = c1 g, g2 = c2 g
  double c2 = 1.0;
  double k2 = 0.0;
  double g1 = 1.0;
  double g2 = 1.0;
  double b1 = 0.9;
  double b2 = 1.0;
  long verify_every = 10;

  /// Throws UsageError.
  void validate() const;
  double x(long i) const;
  ModelParams params_at(double x) const;
};

struct SweepRow {
  double x = 0.0;
  bool ok = true;
  std::string error;
  TransitionMatrix closed;
  bool has_oracle = false;
  TransitionMatrix oracle;
  double residual = 0.0;
};

/// Rows in grid order; points are distributed over `threads` workers.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, bool verify, unsigned threads);
void write_sweep_csv(const std::vector<SweepRow>& rows, bool verify, std::ostream& out);

/// 12 significant digits.
std::string format_number(double v);

/// Interior maxima of the 3-point moving average: strictly greater than both
/// neighbors.
int count_local_maxima(const std::vector<double>& y);

/// Ascending eigenvalues of H(tau).
std::array<double, 3> adiabatic_energies(const ModelParams& params, double tau);

struct SpectrumRow {
  double tau;
  std::array<double, 3> energies;
};

std::vector<SpectrumRow> run_spectrum(const ModelParams& params, double from,
                                      double to, long steps);
void write_spectrum_csv(const std::vector<SpectrumRow>& rows, std::ostream& out);

/// Entry point of the command-line tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lzc::app
