#include "lzc/app/commands.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "lzc/app/config.hpp"
#include "lzc/app/parallel.hpp"
#include "lzc/app/verify.hpp"

namespace lzc::app {

// ---- matrix ----------------------------------------------------------------

MatrixReport compute_matrix(const ModelParams& params, bool verify) {
  MatrixReport r;
  r.params = params;
  r.slope_case = classify(params);
  r.shorthands = shorthands(params);
  r.closed = transition_matrix(params);

  const double tol = r.closed.tol;
  for (int i = 0; i < 3 && r.violation.empty(); ++i) {
    for (int j = 0; j < 3; ++j) {
      const double v = r.closed.p[i][j];
      if (v < -tol || v > 1.0 + tol) {
        std::ostringstream msg;
        msg << "entry P" << i << j << " = " << v << " outside [0, 1]";
        r.violation = msg.str();
        break;
      }
    }
  }
  if (r.violation.empty() && r.closed.stochastic_residual() > tol) {
    r.violation = "row/column sums differ from 1 by more than the matrix tolerance";
  }
  if (verify) {
    r.oracle = oracle::numeric_transition_matrix(params);
    r.oracle_deviation = max_abs_diff(r.closed, r.oracle->matrix);
    if (r.violation.empty() && r.oracle_deviation > kOracleThreshold) {
      r.violation = "closed form deviates from the ODE oracle by more than 2e-3";
    }
  }
  return r;
}

void print_matrix_report(const MatrixReport& r, std::ostream& out) {
  const Shorthands& s = r.shorthands;
  out << "case: " << to_string(r.slope_case) << "\n";
  out << "params: " << r.params.describe() << "\n";
  if (r.closed.extended_domain) out << "note: k2 < 0, extended domain\n";
  out << "shorthands: kappa=" << format_number(s.kappa) << " q1=" << format_number(s.q1)
      << " q2=" << format_number(s.q2) << " p1=" << format_number(s.p1)
      << " p2=" << format_number(s.p2) << " C1=" << format_number(s.C1)
      << " C2=" << format_number(s.C2) << "\n";
  out << "P[i->j]";
  for (int j = 0; j < 3; ++j) out << std::setw(16) << ("j=" + std::to_string(j));
  out << "\n";
  for (int i = 0; i < 3; ++i) {
    out << "i=" << i << "    ";
    for (int j = 0; j < 3; ++j) out << std::setw(16) << format_number(r.closed.p[i][j]);
    out << "\n";
  }
  out << "stochastic residual: " << format_number(r.closed.stochastic_residual())
      << " (tol " << format_number(r.closed.tol) << ")\n";
  if (r.oracle) {
    out << "oracle deviation: " << format_number(r.oracle_deviation) << " (threshold "
        << format_number(kOracleThreshold) << ", conv_err "
        << format_number(r.oracle->max_conv_err) << ")\n";
  }
  out << "status: " << (r.violation.empty() ? "ok" : "FAIL: " + r.violation) << "\n";
}

// ---- sweep -----------------------------------------------------------------

void SweepSpec::validate() const {
  if (variable != "k2" && variable != "g") {
    throw UsageError("var must be 'k2' or 'g'");
  }
  if (!(from < to)) throw UsageError("sweep requires from < to");
  if (steps < 2 || steps > 100000) throw UsageError("steps must lie in [2, 100000]");
  if (verify_every < 1) throw UsageError("verify_every must be >= 1");
  params_at(from);  // surfaces degenerate slopes early
}

double SweepSpec::x(long i) const {
  if (i == steps - 1) return to;
  return from + (to - from) * static_cast<double>(i) / static_cast<double>(steps - 1);
}

ModelParams SweepSpec::params_at(double x) const {
  if (variable == "k2") return ModelParams(x, g1, g2, b1, b2);
  return ModelParams(k2, c1 * x, c2 * x, b1, b2);
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, bool verify, unsigned threads) {
  spec.validate();
  std::vector<SweepRow> rows(static_cast<std::size_t>(spec.steps));
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.x = spec.x(static_cast<long>(i));
    try {
      const ModelParams params = spec.params_at(row.x);
      row.closed = transition_matrix(params);
      if (verify && static_cast<long>(i) % spec.verify_every == 0) {
        row.oracle = oracle::numeric_transition_matrix(params).matrix;
        row.has_oracle = true;
        row.residual = max_abs_diff(row.closed, row.oracle);
      }
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
  });
  return rows;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, bool verify, std::ostream& out) {
  out << "x,P00,P01,P02,P10,P11,P12,P20,P21,P22";
  if (verify) out << ",O00,O01,O02,O10,O11,O12,O20,O21,O22,residual";
  out << "\n";
  const int fields = verify ? 19 : 9;
  for (const SweepRow& row : rows) {
    out << format_number(row.x);
    if (!row.ok) {
      for (int k = 0; k < fields; ++k) out << ",ERR";
      out << "\n";
      continue;
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out << "," << format_number(row.closed.p[i][j]);
    if (verify) {
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          out << "," << (row.has_oracle ? format_number(row.oracle.p[i][j]) : "");
      out << "," << (row.has_oracle ? format_number(row.residual) : "");
    }
    out << "\n";
  }
}

int count_local_maxima(const std::vector<double>& y) {
  const std::size_t n = y.size();
  if (n < 3) return 0;
  std::vector<double> s(y);
  for (std::size_t i = 1; i + 1 < n; ++i) s[i] = (y[i - 1] + y[i] + y[i + 1]) / 3.0;
  int count = 0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (s[i] > s[i - 1] && s[i] > s[i + 1]) ++count;
  }
  return count;
}

// ---- spectrum --------------------------------------------------------------

std::array<double, 3> adiabatic_energies(const ModelParams& params, double tau) {
  if (tau == 0.0 || !std::isfinite(tau)) throw UsageError("spectrum: tau must be nonzero");
  Eigen::Matrix3d h;
  const double g1 = params.caller_g(1), g2 = params.caller_g(2);
  h << params.k2() / tau, g1, g2,
       g1, params.caller_beta(1) * tau, 0.0,
       g2, 0.0, params.caller_beta(2) * tau;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(h, Eigen::EigenvaluesOnly);
  const Eigen::Vector3d ev = solver.eigenvalues();  // ascending
  return {ev(0), ev(1), ev(2)};
}

std::vector<SpectrumRow> run_spectrum(const ModelParams& params, double from,
                                      double to, long steps) {
  if (!(from > 0.0)) throw UsageError("spectrum: tau grid must be > 0");
  if (!(from < to)) throw UsageError("spectrum requires from < to");
  if (steps < 2 || steps > 100000) throw UsageError("steps must lie in [2, 100000]");
  std::vector<SpectrumRow> rows;
  rows.reserve(static_cast<std::size_t>(steps));
  for (long i = 0; i < steps; ++i) {
    const double tau = i == steps - 1 ? to : from + (to - from) * i / (steps - 1.0);
    rows.push_back({tau, adiabatic_energies(params, tau)});
  }
  return rows;
}

void write_spectrum_csv(const std::vector<SpectrumRow>& rows, std::ostream& out) {
  out << "tau,E0,E1,E2\n";
  for (const SpectrumRow& r : rows) {
    out << format_number(r.tau) << "," << format_number(r.energies[0]) << ","
        << format_number(r.energies[1]) << "," << format_number(r.energies[2]) << "\n";
  }
}

// ---- command line ------------------------------------------------------------

namespace {

using Values = std::map<std::string, std::string>;

// Flag values (as text) override config-file values.
struct ValueSource {
  Values flags;
  std::string config_path;

  Values merged() const {
    Values v;
    if (!config_path.empty()) v = load_config(config_path);
    for (const auto& [k, val] : flags) v[k] = val;
    return v;
  }
};

void add_value(CLI::App* sub, ValueSource& src, const std::string& key,
               const std::string& flag, const std::string& help) {
  sub->add_option_function<std::string>(
      flag, [&src, key](const std::string& v) { src.flags[key] = v; }, help);
}

double require_double(const Values& v, const std::string& key) {
  const auto it = v.find(key);
  if (it == v.end()) throw UsageError("missing required value: " + key);
  return to_double(key, it->second);
}

double optional_double(const Values& v, const std::string& key, double fallback) {
  const auto it = v.find(key);
  return it == v.end() ? fallback : to_double(key, it->second);
}

long optional_long(const Values& v, const std::string& key, long fallback) {
  const auto it = v.find(key);
  return it == v.end() ? fallback : to_long(key, it->second);
}

ModelParams params_from(const Values& v) {
  return ModelParams(require_double(v, "k2"), require_double(v, "g1"),
                     require_double(v, "g2"), require_double(v, "b1"),
                     require_double(v, "b2"));
}

void add_model_flags(CLI::App* sub, ValueSource& src) {
  add_value(sub, src, "k2", "--k2", "coefficient k^2 of the 1/tau level");
  add_value(sub, src, "g1", "--g1", "coupling of level 1");
  add_value(sub, src, "g2", "--g2", "coupling of level 2");
  add_value(sub, src, "b1", "--b1", "slope of level 1");
  add_value(sub, src, "b2", "--b2", "slope of level 2");
  sub->add_option("--config", src.config_path, "file of 'key = value' lines");
}

// Writes to --out when given, else to `out`.
template <class Fn>
void emit(const std::string& path, std::ostream& out, Fn&& write) {
  if (path.empty()) {
    write(out);
    return;
  }
  std::ofstream file(path);
  if (!file) throw UsageError("cannot open output file " + path);
  write(file);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Three-state Landau-Zener-Coulomb transition probabilities"};
  app.require_subcommand(1);

  ValueSource matrix_src, sweep_src, spectrum_src;
  bool matrix_verify = false, sweep_verify = false;
  std::string matrix_out, sweep_out, spectrum_out, verify_out;
  unsigned sweep_threads = default_threads(), verify_threads = default_threads();
  std::uint64_t seed = 7;
  long trials = 60;

  CLI::App* matrix = app.add_subcommand("matrix", "closed-form transition matrix");
  add_model_flags(matrix, matrix_src);
  matrix->add_flag("--verify", matrix_verify, "compare with the ODE oracle");
  matrix->add_option("--out", matrix_out, "output file");

  CLI::App* sweep = app.add_subcommand("sweep", "CSV of matrices over a k2 or g grid");
  add_model_flags(sweep, sweep_src);
  add_value(sweep, sweep_src, "var", "--var", "swept variable: k2 or g");
  add_value(sweep, sweep_src, "from", "--from", "first grid value");
  add_value(sweep, sweep_src, "to", "--to", "last grid value");
  add_value(sweep, sweep_src, "steps", "--steps", "number of grid points");
  add_value(sweep, sweep_src, "c1", "--c1", "g-sweeps: g1 = c1 g");
  add_value(sweep, sweep_src, "c2", "--c2", "g-sweeps: g2 = c2 g");
  add_value(sweep, sweep_src, "verify_every", "--verify-every",
            "oracle on every Nth point (default 10)");
  sweep->add_flag("--verify", sweep_verify, "add oracle columns");
  sweep->add_option("--threads", sweep_threads, "worker threads");
  sweep->add_option("--out", sweep_out, "output file");

  CLI::App* spectrum = app.add_subcommand("spectrum", "adiabatic energies over a tau grid");
  add_model_flags(spectrum, spectrum_src);
  add_value(spectrum, spectrum_src, "from", "--from", "first tau (> 0)");
  add_value(spectrum, spectrum_src, "to", "--to", "last tau");
  add_value(spectrum, spectrum_src, "steps", "--steps", "number of tau points");
  spectrum->add_option("--out", spectrum_out, "output file");

  CLI::App* verify = app.add_subcommand("verify", "seeded property suite, JSON report");
  verify->add_option("--seed", seed, "generator seed");
  verify->add_option("--trials", trials, "number of parameter sets");
  verify->add_option("--threads", verify_threads, "worker threads");
  verify->add_option("--out", verify_out, "output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*matrix) {
      const MatrixReport r = compute_matrix(params_from(matrix_src.merged()), matrix_verify);
      emit(matrix_out, out, [&](std::ostream& o) { print_matrix_report(r, o); });
      return r.violation.empty() ? kExitOk : kExitVerification;
    }
    if (*sweep) {
      const Values v = sweep_src.merged();
      SweepSpec spec;
      const auto var = v.find("var");
      if (var == v.end()) throw UsageError("missing required value: var");
      spec.variable = var->second;
      spec.from = require_double(v, "from");
      spec.to = require_double(v, "to");
      spec.steps = optional_long(v, "steps", spec.steps);
      spec.c1 = optional_double(v, "c1", spec.c1);
      spec.c2 = optional_double(v, "c2", spec.c2);
      spec.b1 = require_double(v, "b1");
      spec.b2 = require_double(v, "b2");
      if (spec.variable == "k2") {
        spec.g1 = require_double(v, "g1");
        spec.g2 = require_double(v, "g2");
      } else {
        spec.k2 = require_double(v, "k2");
      }
      spec.verify_every = optional_long(v, "verify_every", spec.verify_every);
      spec.validate();
      const std::vector<SweepRow> rows = run_sweep(spec, sweep_verify, sweep_threads);
      emit(sweep_out, out, [&](std::ostream& o) { write_sweep_csv(rows, sweep_verify, o); });
      bool failed = false, deviated = false;
      for (const SweepRow& row : rows) {
        if (!row.ok) {
          failed = true;
          err << "x=" << format_number(row.x) << ": " << row.error << "\n";
        }
        if (row.has_oracle && row.residual > kOracleThreshold) deviated = true;
      }
      if (failed) return kExitNumerical;
      return deviated ? kExitVerification : kExitOk;
    }
    if (*spectrum) {
      const Values v = spectrum_src.merged();
      const ModelParams params = params_from(v);
      const auto rows = run_spectrum(params, require_double(v, "from"),
                                     require_double(v, "to"), optional_long(v, "steps", 201));
      emit(spectrum_out, out, [&](std::ostream& o) { write_spectrum_csv(rows, o); });
      return kExitOk;
    }
    if (*verify) {
      if (trials < 1) throw UsageError("--trials must be >= 1");
      const VerifyReport report = run_verify(seed, trials, verify_threads);
      emit(verify_out, out, [&](std::ostream& o) { o << to_json(report).dump(2) << "\n"; });
      return report.all_pass() ? kExitOk : kExitVerification;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "invalid parameters: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << " [" << e.diagnostics() << "]\n";
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace lzc::app
