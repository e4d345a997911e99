#pragma once

#include <complex>

#include "lzc/model.hpp"

namespace lzc::contour {

using Complex = std::complex<double>;

/// Exponents of the contour-integral solution,
///   alpha = -1/2 + i (k2/2 - g1^2/(2 beta1) - g2^2/(2 beta2)),
///   xi_i  = i g_i^2 / (2 beta_i),
/// in the internal (slope-ordered) labeling.
struct Exponents {
  Complex alpha;
  Complex xi1;
  Complex xi2;
};

Exponents exponents(const ModelParams& params);

/// x^alpha (x - i beta1)^(xi1 + shift1) (x - i beta2)^(xi2 + shift2) on the
/// positive real axis; shift_i in {-1, 0}.
struct ContourIntegrand {
  Complex alpha;
  Complex xi1;
  Complex xi2;
  double beta1 = 1.0;
  double beta2 = 2.0;
  int shift1 = -1;
  int shift2 = 0;
};

ContourIntegrand integrand_for(const ModelParams& params, int shift1, int shift2);

struct QuadValue {
  Complex value;
  double abs_err = 0.0;
};

/// J = int_0^inf x^alpha (x - i beta1)^mu1 (x - i beta2)^mu2 dx with
/// mu_i = xi_i + shift_i and principal branches, by adaptive quadrature in
/// log x. Requires Re(alpha + mu1 + mu2) < -1.
QuadValue real_axis_integral(const ContourIntegrand& integrand);

/// |Q|^2 = 1 / (4 pi [exp(pi (k2 - q1 - q2)) + 1]), stated for
/// beta2 > beta1 > 0 only; other slope cases throw DomainError.
double normalization_q2(const ModelParams& params);

struct IdentitySides {
  double lhs;  // |I|^2 from quadrature of the gamma_0 contour
  double rhs;  // 4 pi (1 - p1 p2) H10 [e^{pi(k2-q1-q2)} + 1] / (beta2 (q1+q2) (1+kappa))
};

/// Both sides of the |I|^2 identity behind P10 (BothPositive case only).
IdentitySides i_squared_identity(const ModelParams& params);

enum class Contour { gamma0, gamma1, gamma2 };

/// Amplitudes (b0, b1, b2) at transformed time t = tau^2 / 2.
struct AmplitudeTriple {
  Complex b0;
  Complex b1;
  Complex b2;
  double t = 0.0;
};

/// Evaluates the three contour integrals along the contour that hugs the
/// branch cut from {0, beta1, beta2}[j] down to -i infinity, counterclockwise,
/// with Q = 1. The level-0 amplitude in the original time is a = tau * b0.
AmplitudeTriple contour_amplitudes(const ModelParams& params, Contour contour,
                                   double t);

}  // namespace lzc::contour
