#include "lzc/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

namespace lzc::oracle {
namespace {

namespace odeint = boost::numeric::odeint;

constexpr Complex kI{0.0, 1.0};
using Matrix3 = std::array<std::array<Complex, 3>, 3>;

// Slopes, k2 and complex couplings in the internal (slope-ordered) labeling.
struct Model {
  double k2;
  std::array<Complex, 2> g;
  std::array<double, 2> beta;

  double phase(int j, double tau) const {
    const double log_part = k2 == 0.0 ? 0.0 : k2 * std::log(std::abs(tau));
    return log_part - 0.5 * beta[j] * tau * tau;
  }
  double dphase(int j, double tau) const { return k2 / tau - beta[j] * tau; }
  double ddphase(int j, double tau) const { return -k2 / (tau * tau) - beta[j]; }
};

Model make_model(const ModelParams& params, const ComplexCouplings& caller) {
  Model m{params.k2(), {caller.g1, caller.g2}, {params.beta1(), params.beta2()}};
  if (params.relabeled()) std::swap(m.g[0], m.g[1]);
  return m;
}

Model make_model(const ModelParams& params) {
  return {params.k2(), {params.g1(), params.g2()}, {params.beta1(), params.beta2()}};
}

// Interaction-picture amplitudes of N independent columns, stored as
// (re a, im a, re b1, im b1, re b2, im b2) per column.
template <int N>
using OdeState = std::array<double, 6 * N>;

template <int N>
struct InteractionRhs {
  const Model* model;

  void operator()(const OdeState<N>& x, OdeState<N>& dxdt, double tau) const {
    const Complex c1 = model->g[0] * std::polar(1.0, model->phase(0, tau));
    const Complex c2 = model->g[1] * std::polar(1.0, model->phase(1, tau));
    const Complex d1 = std::conj(c1);
    const Complex d2 = std::conj(c2);
    for (int col = 0; col < N; ++col) {
      const int o = 6 * col;
      const Complex a{x[o], x[o + 1]};
      const Complex b1{x[o + 2], x[o + 3]};
      const Complex b2{x[o + 4], x[o + 5]};
      const Complex da = -kI * (c1 * b1 + c2 * b2);
      const Complex db1 = -kI * d1 * a;
      const Complex db2 = -kI * d2 * a;
      dxdt[o] = da.real();
      dxdt[o + 1] = da.imag();
      dxdt[o + 2] = db1.real();
      dxdt[o + 3] = db1.imag();
      dxdt[o + 4] = db2.real();
      dxdt[o + 5] = db2.imag();
    }
  }
};

template <int N>
std::array<StateVector, N> unpack(const OdeState<N>& x) {
  std::array<StateVector, N> out;
  for (int col = 0; col < N; ++col) {
    for (int l = 0; l < 3; ++l) {
      out[col][l] = {x[6 * col + 2 * l], x[6 * col + 2 * l + 1]};
    }
  }
  return out;
}

template <int N>
OdeState<N> pack(const std::array<StateVector, N>& cols) {
  OdeState<N> x{};
  for (int col = 0; col < N; ++col) {
    for (int l = 0; l < 3; ++l) {
      x[6 * col + 2 * l] = cols[col][l].real();
      x[6 * col + 2 * l + 1] = cols[col][l].imag();
    }
  }
  return x;
}

StateVector mul(const Matrix3& m, const StateVector& v) {
  StateVector out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i] += m[i][j] * v[j];
  return out;
}

double norm2(const StateVector& v) {
  return std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]);
}

// Integrates tau0 -> tau1 (tau0 < tau1) with a controlled Fehlberg 7(8) pair.
// Returns the number of accepted steps.
template <int N>
long integrate(const Model& model, OdeState<N>& x, double tau0, double tau1,
               const IntegrationSettings& settings) {
  auto stepper = odeint::make_controlled(
      settings.abs_tol, settings.rel_tol,
      odeint::runge_kutta_fehlberg78<OdeState<N>>());
  InteractionRhs<N> rhs{&model};
  double tau = tau0;
  double dt = std::min(1e-2, 0.1 * (tau1 - tau0));
  if (tau0 != 0.0) dt = std::min(dt, 0.1 * std::abs(tau0));
  long accepted = 0;
  long attempts = 0;
  while (tau < tau1) {
    if (tau + dt > tau1) dt = tau1 - tau;
    if (stepper.try_step(rhs, x, tau, dt) == odeint::success) ++accepted;
    if (++attempts > settings.max_steps) {
      std::ostringstream diag;
      diag << "tau=" << tau << " of [" << tau0 << ", " << tau1
           << "] steps=" << accepted << " dt=" << dt;
      throw NumericalError("propagate: step budget exhausted", diag.str());
    }
  }
  return accepted;
}

Matrix3 product(const Matrix3& x, const Matrix3& y) {
  Matrix3 out{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j) out[i][j] += x[i][k] * y[k][j];
  return out;
}

// Nearest unitary matrix by Newton-Schulz steps X <- X (3 - X^H X) / 2; the
// truncated expansions below are unitary only up to their neglected order.
Matrix3 unitarize(Matrix3 x) {
  for (int iter = 0; iter < 6; ++iter) {
    Matrix3 gram{};
    double defect = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) gram[i][j] += std::conj(x[k][i]) * x[k][j];
        defect = std::max(defect, std::abs(gram[i][j] - (i == j ? 1.0 : 0.0)));
      }
    if (defect < 1e-15) break;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) gram[i][j] = 0.5 * ((i == j ? 3.0 : 0.0) - gram[i][j]);
    x = product(x, gram);
  }
  return x;
}

// Leakage during (0, eps): int_0^eps tau^{i k2} dtau = eps^{1+i k2} / (1 + i k2).
// The same matrix closes the reversed run over (-eps, 0).
Matrix3 near_zero_matrix(const Model& m, double eps) {
  const Complex w = std::exp((1.0 + kI * m.k2) * std::log(eps)) / (1.0 + kI * m.k2);
  Matrix3 s{};
  for (int i = 0; i < 3; ++i) s[i][i] = 1.0;
  for (int j = 0; j < 2; ++j) {
    s[0][j + 1] = -kI * m.g[j] * w;
    s[j + 1][0] = -kI * std::conj(m.g[j]) * std::conj(w);
  }
  return unitarize(s);
}

// int_tau^inf e^{i theta} (outgoing) or int_-inf^tau e^{i theta} (incoming),
// two terms of the integration-by-parts expansion.
Complex oscillatory_tail(double theta, double dtheta, double ddtheta, bool outgoing) {
  const Complex v = std::polar(1.0, theta) *
                    (kI / dtheta + ddtheta / (dtheta * dtheta * dtheta));
  return outgoing ? v : -v;
}

// Second-order Dyson approximation to the evolution over the tail beyond
// tau_b: x(+inf) = M x(tau_b) when outgoing, x(tau_b) = M x(-inf) otherwise.
// Level-shift phases that diverge logarithmically are dropped; they do not
// affect populations.
Matrix3 tail_matrix(const Model& m, double tau_b, bool outgoing) {
  Matrix3 t{};
  std::array<double, 2> ph{}, dph{};
  for (int j = 0; j < 2; ++j) {
    ph[j] = m.phase(j, tau_b);
    dph[j] = m.dphase(j, tau_b);
    const double ddph = m.ddphase(j, tau_b);
    t[0][j + 1] = -kI * m.g[j] * oscillatory_tail(ph[j], dph[j], ddph, outgoing);
    t[j + 1][0] =
        -kI * std::conj(m.g[j]) * oscillatory_tail(-ph[j], -dph[j], -ddph, outgoing);
    const double shrink = std::norm(m.g[j]) / (2.0 * dph[j] * dph[j]);
    t[j + 1][j + 1] = 1.0 - shrink;
    t[0][0] -= shrink;
  }
  t[0][0] += 1.0;
  const Complex g12 = std::conj(m.g[0]) * m.g[1];
  const Complex g21 = std::conj(m.g[1]) * m.g[0];
  const Complex e12 = std::polar(1.0, ph[1] - ph[0]);
  if (outgoing) {
    t[1][2] = -g12 * e12 / (dph[0] * (dph[1] - dph[0]));
    t[2][1] = -g21 * std::conj(e12) / (dph[1] * (dph[0] - dph[1]));
  } else {
    t[1][2] = g12 * e12 / (dph[1] * (dph[1] - dph[0]));
    t[2][1] = g21 * std::conj(e12) / (dph[0] * (dph[0] - dph[1]));
  }
  return unitarize(t);
}

// Size of the first neglected order of the tail expansion, as a bound on
// the population error.
double tail_error_estimate(const Model& m, double tau_b) {
  double est = 0.0;
  double r_sum = 0.0;
  for (int j = 0; j < 2; ++j) {
    const double dph = std::abs(m.dphase(j, tau_b));
    const double r = std::abs(m.g[j]) / dph;
    const double curv = std::abs(m.ddphase(j, tau_b)) / (dph * dph);
    r_sum += r;
    est += r * r * r + r * curv * curv;
  }
  const double split = std::abs(m.dphase(1, tau_b) - m.dphase(0, tau_b));
  const double cross = std::abs(m.g[0] * m.g[1]) /
                       (std::min(std::abs(m.dphase(0, tau_b)),
                                 std::abs(m.dphase(1, tau_b))) * split);
  est += r_sum * cross;
  return 2.0 * est;
}

double first_order_tail(const Model& m, double tau_b) {
  double r = 0.0;
  for (int j = 0; j < 2; ++j) r += std::abs(m.g[j]) / std::abs(m.dphase(j, tau_b));
  return 2.0 * r;
}

void validate(const IntegrationSettings& s, double eps, double t_final) {
  auto tol_ok = [](double t) { return t > 0.0 && t <= 1e-2; };
  if (!tol_ok(s.rel_tol) || !tol_ok(s.abs_tol) || !tol_ok(s.target_tol)) {
    throw DomainError("integration tolerances must lie in (0, 1e-2]");
  }
  if (!(eps >= 0.0) || !(eps < t_final)) {
    throw DomainError("integration window requires 0 <= epsilon < t_final");
  }
  if (s.max_steps <= 0) throw DomainError("max_steps must be positive");
}

constexpr double kNormDriftLimit = 1e-6;

template <int N>
struct RunResult {
  std::array<StateVector, N> cols;
  double conv_err = 0.0;
  double norm_drift = 0.0;
  long steps = 0;
};

// Runs N columns with initial basis vectors given by `levels` (internal labels).
template <int N>
RunResult<N> run(const Model& model, const ModelParams& params,
                 const std::array<int, N>& levels, Direction direction,
                 const IntegrationSettings& settings) {
  const double eps = model.k2 == 0.0 ? 0.0 : start_time(params, settings);
  const double t_final = end_time(params, settings);
  validate(settings, eps, t_final);

  std::array<StateVector, N> cols{};
  for (int c = 0; c < N; ++c) cols[c][levels[c]] = 1.0;

  RunResult<N> out;
  const Matrix3 near_zero = near_zero_matrix(model, eps > 0.0 ? eps : 1.0);

  if (direction == Direction::forward) {
    if (eps > 0.0)
      for (auto& c : cols) c = mul(near_zero, c);
  } else if (settings.tail_correction) {
    const Matrix3 tail = tail_matrix(model, -t_final, false);
    for (auto& c : cols) c = mul(tail, c);
  }

  std::array<double, N> norm_before{};
  for (int c = 0; c < N; ++c) norm_before[c] = norm2(cols[c]);

  OdeState<N> x = pack<N>(cols);
  if (direction == Direction::forward) {
    out.steps = integrate<N>(model, x, eps, t_final, settings);
  } else {
    out.steps = integrate<N>(model, x, -t_final, -eps, settings);
  }
  cols = unpack<N>(x);

  for (int c = 0; c < N; ++c) {
    out.norm_drift = std::max(out.norm_drift, std::abs(norm2(cols[c]) - norm_before[c]));
  }
  if (out.norm_drift > kNormDriftLimit) {
    std::ostringstream diag;
    diag << params.describe() << " norm_drift=" << out.norm_drift;
    throw NumericalError("propagate: norm drift exceeds 1e-6", diag.str());
  }

  const double tau_b = direction == Direction::forward ? t_final : -t_final;
  if (direction == Direction::forward) {
    if (settings.tail_correction) {
      const Matrix3 tail = tail_matrix(model, t_final, true);
      for (auto& c : cols) c = mul(tail, c);
    }
  } else if (eps > 0.0) {
    for (auto& c : cols) c = mul(near_zero, c);
  }

  const double g_max = std::max(std::abs(model.g[0]), std::abs(model.g[1]));
  const double start_err = 2.0 * (g_max * eps) * (g_max * eps);
  out.conv_err = (settings.tail_correction ? tail_error_estimate(model, tau_b)
                                           : first_order_tail(model, tau_b)) +
                 start_err;
  out.cols = cols;
  return out;
}

NumericMatrix assemble(const ModelParams& params, const RunResult<3>& r) {
  // Column c of the run started in internal level c.
  NumericMatrix out;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      out.matrix.p[i][j] =
          std::norm(r.cols[params.internal_level(i)][params.internal_level(j)]);
    }
  }
  // The start and tail factors are unitary only to the order kept, so rows
  // are checked against three times the norm-drift limit.
  for (int i = 0; i < 3; ++i) {
    if (std::abs(out.matrix.row_sum(i) - 1.0) > 3.0 * kNormDriftLimit) {
      std::ostringstream diag;
      diag << params.describe() << " row " << i << " sum=" << out.matrix.row_sum(i);
      throw NumericalError("numeric_transition_matrix: row sum differs from 1", diag.str());
    }
  }
  out.matrix.tol = r.conv_err;
  out.max_conv_err = r.conv_err;
  out.max_norm_drift = r.norm_drift;
  out.steps_used = r.steps;
  return out;
}

}  // namespace

double start_time(const ModelParams& params, const IntegrationSettings& settings) {
  if (settings.epsilon > 0.0) return settings.epsilon;
  const double g_max = std::max({params.g1(), params.g2(), 1.0});
  return std::min(1e-3, settings.target_tol / (10.0 * g_max));
}

double end_time(const ModelParams& params, const IntegrationSettings& settings) {
  if (settings.t_final > 0.0) return settings.t_final;
  // Third-order tail terms scale like g^3 / (beta T)^3 and
  // g^3 / (beta^2 dbeta T^3); pick T so that both stay below target_tol.
  const double b_min = std::min(std::abs(params.beta1()), std::abs(params.beta2()));
  const double split = std::abs(params.beta2() - params.beta1());
  const double g_max = std::max({params.g1(), params.g2(), 0.1});
  const double cube = g_max * g_max * g_max / (b_min * std::min(b_min, split));
  const double t = std::cbrt(cube / settings.target_tol) / std::sqrt(b_min);
  return std::clamp(t, 50.0, 4000.0);
}

PropagationResult propagate(const ModelParams& params, int initial_level,
                            Direction direction,
                            const IntegrationSettings& settings) {
  const Model model = make_model(params);
  const int start = params.internal_level(initial_level);
  const RunResult<1> r = run<1>(model, params, {start}, direction, settings);
  PropagationResult out;
  for (int j = 0; j < 3; ++j) {
    out.populations[j] = std::norm(r.cols[0][params.internal_level(j)]);
  }
  out.conv_err = r.conv_err;
  out.norm_drift = r.norm_drift;
  out.steps_used = r.steps;
  return out;
}

NumericMatrix numeric_transition_matrix(const ModelParams& params,
                                        const IntegrationSettings& settings,
                                        Direction direction) {
  const Model model = make_model(params);
  return assemble(params, run<3>(model, params, {0, 1, 2}, direction, settings));
}

NumericMatrix numeric_transition_matrix(const ModelParams& params,
                                        const ComplexCouplings& couplings,
                                        const IntegrationSettings& settings,
                                        Direction direction) {
  const Model model = make_model(params, couplings);
  return assemble(params, run<3>(model, params, {0, 1, 2}, direction, settings));
}

double gauge_check(const ModelParams& params, double phase1, double phase2,
                   const IntegrationSettings& settings) {
  const ComplexCouplings phased{std::polar(params.caller_g(1), phase1),
                                std::polar(params.caller_g(2), phase2)};
  const NumericMatrix with_phase =
      numeric_transition_matrix(params, phased, settings);
  const NumericMatrix plain = numeric_transition_matrix(params, settings);
  return max_abs_diff(with_phase.matrix, plain.matrix);
}

StateVector evolve(const ModelParams& params, const StateVector& state,
                   double tau0, double tau1, const IntegrationSettings& settings) {
  if (tau0 == 0.0 || tau1 == 0.0 || (tau0 > 0.0) != (tau1 > 0.0) ||
      tau1 < tau0) {
    throw DomainError("evolve: requires nonzero tau0 <= tau1 of the same sign");
  }
  const Model model = make_model(params);
  // lab -> interaction picture: a~ = a e^{i k2 ln|tau|}, b~_j = b_j e^{i beta_j tau^2 / 2}
  auto to_interaction = [&](const StateVector& s, double tau) {
    const double log_part = model.k2 == 0.0 ? 0.0 : model.k2 * std::log(std::abs(tau));
    return StateVector{s[0] * std::polar(1.0, log_part),
                       s[1] * std::polar(1.0, 0.5 * model.beta[0] * tau * tau),
                       s[2] * std::polar(1.0, 0.5 * model.beta[1] * tau * tau)};
  };
  auto to_lab = [&](const StateVector& s, double tau) {
    const double log_part = model.k2 == 0.0 ? 0.0 : model.k2 * std::log(std::abs(tau));
    return StateVector{s[0] * std::polar(1.0, -log_part),
                       s[1] * std::polar(1.0, -0.5 * model.beta[0] * tau * tau),
                       s[2] * std::polar(1.0, -0.5 * model.beta[1] * tau * tau)};
  };
  OdeState<1> x = pack<1>({to_interaction(state, tau0)});
  integrate<1>(model, x, tau0, tau1, settings);
  return to_lab(unpack<1>(x)[0], tau1);
}

}  // namespace lzc::oracle
