#pragma once

#include <array>
#include <string>
#include <utility>

#include "lzc/special_functions.hpp"

namespace lzc {

/// Ordering of the two linear slopes; the closed forms differ per case.
enum class SlopeCase {
  BothPositive,  // beta2 > beta1 > 0
  Mixed,         // beta2 > 0 > beta1
  BothNegative,  // 0 > beta2 > beta1
};

const char* to_string(SlopeCase c);

/// Parameters of the three-level Landau-Zener-Coulomb Hamiltonian
///
///       | k2/tau   g1         g2        |
///   H = | g1       beta1 tau  0         |
///       | g2       0          beta2 tau |
///
/// The constructor relabels levels 1 and 2 so that beta2() > beta1(); the
/// values passed in are kept as the caller's labeling. Couplings enter only
/// through their magnitudes (a phase is a gauge choice).
class ModelParams {
 public:
  ModelParams(double k2, double g1, double g2, double beta1, double beta2);

  double k2() const { return k2_; }
  double g1() const { return g_[0]; }
  double g2() const { return g_[1]; }
  double beta1() const { return beta_[0]; }
  double beta2() const { return beta_[1]; }

  /// True when the caller's levels 1 and 2 were swapped to order the slopes.
  bool relabeled() const { return relabeled_; }

  /// Internal level index for a level in the caller's labeling (an involution).
  int internal_level(int caller_level) const;

  /// Coupling and slope of level i in {1, 2} in the caller's labeling.
  double caller_g(int i) const;
  double caller_beta(int i) const;

  std::string describe() const;

 private:
  double k2_;
  std::array<double, 2> g_;
  std::array<double, 2> beta_;
  bool relabeled_ = false;
};

/// Combinations of the model parameters that appear in the closed forms.
struct Shorthands {
  double kappa;  // exp(-pi k2)
  double q1, q2; // g_i^2 / beta_i
  double p1, p2; // exp(-pi g_i^2 / |beta_i|)
  double C1, C2; // k2 - q_i
};

/// 3x3 matrix of transition probabilities; p[i][j] is the probability of
/// ending in level j at tau -> infinity after starting in level i at
/// tau -> 0+. Raw values are kept (they may stray outside [0, 1] by rounding);
/// clamped() is for reporting.
struct TransitionMatrix {
  std::array<std::array<double, 3>, 3> p{};
  double tol = 1e-6;
  /// Set when k2 < 0: closed forms are used outside the range they were
  /// derived for.
  bool extended_domain = false;

  static TransitionMatrix identity();

  double operator()(int i, int j) const { return p[i][j]; }
  double clamped(int i, int j) const;
  double row_sum(int i) const;
  double col_sum(int j) const;
  /// max over rows and columns of |sum - 1|.
  double stochastic_residual() const;
  TransitionMatrix transposed() const;
  /// Entry (i, j) of the result is entry (perm[i], perm[j]) of this matrix.
  TransitionMatrix permuted(const std::array<int, 3>& perm) const;
};

double max_abs_diff(const TransitionMatrix& x, const TransitionMatrix& y);

enum class HFactor { H10, H20, H12, H21 };

const char* to_string(HFactor h);

struct HValue {
  double value;    // |2F1(...)|^2
  double abs_err;  // propagated from the 2F1 evaluation
};

/// Side of the 2F1 branch cut taken when an H factor's argument exceeds 1,
/// which happens only for H10 and H20 in the Mixed case. Fixed by comparing
/// against the numerical propagation (the other side gives probabilities
/// outside [0, 1]).
inline constexpr sf::CutSide kMixedCaseCutSide = sf::CutSide::below_cut;

Shorthands shorthands(const ModelParams& params);

/// Throws DomainError for degenerate slopes.
SlopeCase classify(const ModelParams& params);

/// The 2F1 argument tuple behind an H factor, in internal labels.
sf::Hyp2F1Input h_factor_input(HFactor which, const ModelParams& params,
                               sf::CutSide cut_side = kMixedCaseCutSide);

HValue h_factor(HFactor which, const ModelParams& params,
                sf::CutSide cut_side = kMixedCaseCutSide);

/// Closed-form transition matrix, in the caller's level labeling.
TransitionMatrix transition_matrix(const ModelParams& params,
                                   sf::CutSide mixed_cut_side = kMixedCaseCutSide);

/// Time-axis reflection: beta1 -> -beta2, beta2 -> -beta1, g1 <-> g2,
/// k2 -> -k2 (caller labels). The returned permutation swaps levels 1 and 2;
/// transition_matrix(reflected).permuted(perm) reproduces the original.
std::pair<ModelParams, std::array<int, 3>> reflected_params(const ModelParams& params);

}  // namespace lzc
