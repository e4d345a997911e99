#include "lzc/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace lzc {
namespace {

constexpr double kPi = std::numbers::pi;
using sf::Complex;

// expm1(c S) / S with its S -> 0 limit.
double expm1_ratio(double c, double s) {
  return s == 0.0 ? c : std::expm1(c * s) / s;
}

}  // namespace

const char* to_string(SlopeCase c) {
  switch (c) {
    case SlopeCase::BothPositive: return "BothPositive";
    case SlopeCase::Mixed: return "Mixed";
    case SlopeCase::BothNegative: return "BothNegative";
  }
  return "?";
}

const char* to_string(HFactor h) {
  switch (h) {
    case HFactor::H10: return "H10";
    case HFactor::H20: return "H20";
    case HFactor::H12: return "H12";
    case HFactor::H21: return "H21";
  }
  return "?";
}

ModelParams::ModelParams(double k2, double g1, double g2, double beta1,
                         double beta2)
    : k2_(k2), g_{std::abs(g1), std::abs(g2)}, beta_{beta1, beta2} {
  for (double v : {k2, g1, g2, beta1, beta2}) {
    if (!std::isfinite(v)) throw DomainError("model parameters must be finite");
  }
  if (beta1 == 0.0 || beta2 == 0.0) {
    throw DomainError("degenerate slopes: beta1 and beta2 must be nonzero");
  }
  if (beta1 == beta2) {
    throw DomainError("degenerate slopes: beta1 must differ from beta2");
  }
  if (beta1 > beta2) {
    std::swap(g_[0], g_[1]);
    std::swap(beta_[0], beta_[1]);
    relabeled_ = true;
  }
}

int ModelParams::internal_level(int caller_level) const {
  if (caller_level < 0 || caller_level > 2) {
    throw DomainError("level index must be 0, 1 or 2");
  }
  if (!relabeled_ || caller_level == 0) return caller_level;
  return 3 - caller_level;
}

double ModelParams::caller_g(int i) const {
  return g_[internal_level(i) - 1];
}

double ModelParams::caller_beta(int i) const {
  return beta_[internal_level(i) - 1];
}

std::string ModelParams::describe() const {
  std::ostringstream out;
  out.precision(12);
  out << "k2=" << k2_ << " g1=" << caller_g(1) << " g2=" << caller_g(2)
      << " b1=" << caller_beta(1) << " b2=" << caller_beta(2);
  return out.str();
}

TransitionMatrix TransitionMatrix::identity() {
  TransitionMatrix m;
  for (int i = 0; i < 3; ++i) m.p[i][i] = 1.0;
  return m;
}

double TransitionMatrix::clamped(int i, int j) const {
  return std::clamp(p[i][j], 0.0, 1.0);
}

double TransitionMatrix::row_sum(int i) const {
  return p[i][0] + p[i][1] + p[i][2];
}

double TransitionMatrix::col_sum(int j) const {
  return p[0][j] + p[1][j] + p[2][j];
}

double TransitionMatrix::stochastic_residual() const {
  double r = 0.0;
  for (int i = 0; i < 3; ++i) {
    r = std::max({r, std::abs(row_sum(i) - 1.0), std::abs(col_sum(i) - 1.0)});
  }
  return r;
}

TransitionMatrix TransitionMatrix::transposed() const {
  TransitionMatrix t = *this;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t.p[i][j] = p[j][i];
  return t;
}

TransitionMatrix TransitionMatrix::permuted(const std::array<int, 3>& perm) const {
  TransitionMatrix t = *this;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t.p[i][j] = p[perm[i]][perm[j]];
  return t;
}

double max_abs_diff(const TransitionMatrix& x, const TransitionMatrix& y) {
  double d = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) d = std::max(d, std::abs(x.p[i][j] - y.p[i][j]));
  return d;
}

Shorthands shorthands(const ModelParams& params) {
  const double k2 = params.k2();
  const double g1 = params.g1(), g2 = params.g2();
  const double b1 = params.beta1(), b2 = params.beta2();
  Shorthands s{};
  s.kappa = std::exp(-kPi * k2);
  s.q1 = g1 * g1 / b1;
  s.q2 = g2 * g2 / b2;
  s.p1 = std::exp(-kPi * g1 * g1 / std::abs(b1));
  s.p2 = std::exp(-kPi * g2 * g2 / std::abs(b2));
  s.C1 = k2 - s.q1;
  s.C2 = k2 - s.q2;
  return s;
}

SlopeCase classify(const ModelParams& params) {
  const double b1 = params.beta1(), b2 = params.beta2();
  if (b1 == 0.0 || b2 == 0.0 || b1 >= b2) {
    throw DomainError("degenerate slopes");
  }
  if (b1 > 0.0) return SlopeCase::BothPositive;
  if (b2 > 0.0) return SlopeCase::Mixed;
  return SlopeCase::BothNegative;
}

sf::Hyp2F1Input h_factor_input(HFactor which, const ModelParams& params,
                               sf::CutSide cut_side) {
  const double half_k2 = 0.5 * params.k2();
  const double b1 = params.beta1(), b2 = params.beta2();
  const double x1 = params.g1() * params.g1() / (2.0 * b1);
  const double x2 = params.g2() * params.g2() / (2.0 * b2);
  const Complex i{0.0, 1.0};
  switch (which) {
    case HFactor::H10:
      return {1.0 - i * x1, 0.5 - i * half_k2, 1.0 - i * (x1 + x2),
              (b2 - b1) / b2, cut_side};
    case HFactor::H20:
      return {1.0 + i * x2, 0.5 + i * half_k2, 1.0 + i * (x1 + x2),
              (b1 - b2) / b1, cut_side};
    case HFactor::H12:
      return {0.5 - i * (half_k2 - x1 - x2), 0.5 - i * half_k2,
              1.5 - i * (half_k2 - x2), b1 / (b1 - b2), cut_side};
    case HFactor::H21:
      return {0.5 + i * (half_k2 - x1 - x2), 0.5 + i * half_k2,
              1.5 + i * (half_k2 - x1), b2 / (b2 - b1), cut_side};
  }
  throw DomainError("unknown H factor");
}

HValue h_factor(HFactor which, const ModelParams& params, sf::CutSide cut_side) {
  const sf::EvalResult r = sf::hyp2f1(h_factor_input(which, params, cut_side));
  const double mag = std::abs(r.value);
  return {mag * mag, 2.0 * mag * r.abs_err + r.abs_err * r.abs_err};
}

TransitionMatrix transition_matrix(const ModelParams& params,
                                   sf::CutSide mixed_cut_side) {
  TransitionMatrix m;
  m.extended_domain = params.k2() < 0.0;
  if (params.g1() == 0.0 && params.g2() == 0.0) {
    TransitionMatrix id = TransitionMatrix::identity();
    id.extended_domain = m.extended_domain;
    return id;
  }

  const SlopeCase slope_case = classify(params);
  const Shorthands s = shorthands(params);
  const double g1sq = params.g1() * params.g1();
  const double g2sq = params.g2() * params.g2();
  const double b1 = params.beta1(), b2 = params.beta2();
  const double kappa = s.kappa;
  const double one_k = 1.0 + kappa;
  const double q_sum = s.q1 + s.q2;
  auto& p = m.p;
  double err = 0.0;

  const HValue h10 = h_factor(HFactor::H10, params, mixed_cut_side);
  const HValue h20 = h_factor(HFactor::H20, params, mixed_cut_side);

  switch (slope_case) {
    case SlopeCase::BothPositive: {
      // (1 - p1 p2) / (q1 + q2), p1 p2 = exp(-pi (q1 + q2))
      const double ratio = -expm1_ratio(-kPi, q_sum);
      const HValue h12 = h_factor(HFactor::H12, params, mixed_cut_side);
      p[0][0] = (s.p1 * s.p2 + kappa) / one_k;
      p[0][1] = s.p2 * (1.0 - s.p1) / one_k;
      p[0][2] = (1.0 - s.p2) / one_k;
      const double c10 = g1sq * ratio / (b2 * one_k);
      const double c20 = g2sq * ratio / (b1 * one_k);
      const double c12 =
          g1sq * s.q2 * (s.p2 + kappa) / ((b2 - b1) * (1.0 + s.C2 * s.C2) * one_k);
      p[1][0] = c10 * h10.value;
      p[2][0] = c20 * h20.value;
      p[1][2] = c12 * h12.value;
      err = std::abs(c10) * h10.abs_err + std::abs(c20) * h20.abs_err +
            std::abs(c12) * h12.abs_err;
      p[1][1] = 1.0 - p[1][0] - p[1][2];
      p[2][1] = p[1][2] + p[1][0] - p[0][1];
      p[2][2] = 1.0 - p[0][2] - p[1][2];
      break;
    }
    case SlopeCase::Mixed: {
      // (p1 - p2) / (q1 + q2), p1 / p2 = exp(pi (q1 + q2))
      const double ratio = s.p2 * expm1_ratio(kPi, q_sum);
      const HValue h12 = h_factor(HFactor::H12, params, mixed_cut_side);
      p[0][0] = (s.p2 + kappa * s.p1) / one_k;
      p[0][1] = (1.0 - s.p1) * kappa / one_k;
      p[0][2] = (1.0 - s.p2) / one_k;
      const double c10 = g1sq * ratio / (b2 * one_k);
      const double c20 = -g2sq * ratio * kappa / (b1 * one_k);
      const double c12 =
          g1sq * s.q2 * (s.p2 + kappa) / ((b2 - b1) * (1.0 + s.C2 * s.C2) * one_k);
      p[1][0] = c10 * h10.value;
      p[2][0] = c20 * h20.value;
      p[1][2] = c12 * h12.value;
      err = std::abs(c10) * h10.abs_err + std::abs(c20) * h20.abs_err +
            std::abs(c12) * h12.abs_err;
      p[1][1] = 1.0 - p[1][0] - p[1][2];
      p[2][1] = p[1][2] + p[1][0] - p[0][1];
      p[2][2] = 1.0 - p[0][2] - p[1][2];
      break;
    }
    case SlopeCase::BothNegative: {
      // (1 - p1 p2) / (q1 + q2), p1 p2 = exp(pi (q1 + q2))
      const double ratio = -expm1_ratio(kPi, q_sum);
      const HValue h21 = h_factor(HFactor::H21, params, mixed_cut_side);
      p[0][0] = (1.0 + kappa * s.p1 * s.p2) / one_k;
      p[0][1] = (1.0 - s.p1) * kappa / one_k;
      p[0][2] = s.p1 * (1.0 - s.p2) * kappa / one_k;
      const double c10 = g1sq * ratio * kappa / (b2 * one_k);
      const double c20 = g2sq * ratio * kappa / (b1 * one_k);
      const double c21 =
          g2sq * s.q1 * (kappa * s.p1 + 1.0) / ((b1 - b2) * (1.0 + s.C1 * s.C1) * one_k);
      p[1][0] = c10 * h10.value;
      p[2][0] = c20 * h20.value;
      p[2][1] = c21 * h21.value;
      err = std::abs(c10) * h10.abs_err + std::abs(c20) * h20.abs_err +
            std::abs(c21) * h21.abs_err;
      p[1][2] = p[2][1] + p[0][1] - p[1][0];
      p[1][1] = 1.0 - p[1][0] - p[1][2];
      p[2][2] = 1.0 - p[0][2] - p[1][2];
      break;
    }
  }
  m.tol = std::max(1e-6, 4.0 * err);

  if (params.relabeled()) m = m.permuted({0, 2, 1});
  return m;
}

std::pair<ModelParams, std::array<int, 3>> reflected_params(const ModelParams& params) {
  ModelParams reflected(-params.k2(), params.caller_g(2), params.caller_g(1),
                        -params.caller_beta(2), -params.caller_beta(1));
  return {reflected, {0, 2, 1}};
}

}  // namespace lzc
