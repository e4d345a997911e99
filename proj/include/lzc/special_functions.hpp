#pragma once

#include <complex>

#include "lzc/errors.hpp"

namespace lzc::sf {

using Complex = std::complex<double>;

/// Which one-sided limit of 2F1 to return on its branch cut z > 1.
/// `above_cut` is the limit z + i0 and `below_cut` the limit z - i0.
/// `principal` is rejected for z > 1, so that callers must pick a side.
enum class CutSide { principal, above_cut, below_cut };

enum class Method { series, transform, quadrature };

struct Hyp2F1Input {
  Complex a;
  Complex b;
  Complex c;
  double z = 0.0;
  CutSide cut_side = CutSide::principal;
};

struct EvalResult {
  Complex value;
  double abs_err = 0.0;
  Method method = Method::series;
};

const char* to_string(Method m);
const char* to_string(CutSide s);

bool is_nonpositive_integer(Complex z, double tol = 1e-14);

/// Complex gamma function. Lanczos approximation (g = 7, nine terms) with the
/// reflection formula for Re(z) < 1/2. Throws DomainError at the poles.
Complex gamma_c(Complex z);

/// log Gamma(z) on some branch; only exp() of it is meaningful. Safe for
/// large |Im z| where gamma_c itself would under/overflow.
Complex log_gamma_c(Complex z);

/// 1 / Gamma(z); exactly zero at the poles of Gamma.
Complex rgamma_c(Complex z);

/// Maclaurin series of 2F1 at real |z| < 1. Stops once three consecutive
/// terms fall below 1e-16 of the partial sum (cap 10 000 terms).
EvalResult hyp2f1_series(Complex a, Complex b, Complex c, double z);

/// Gauss hypergeometric function for complex parameters and real argument.
///
/// |z| <= 1/2 is summed directly. z < -1/2 goes through the Pfaff
/// transformation, 1/2 < z < 1 and 1 < z <= 3/2 through the 1 - z connection
/// formula and z > 3/2 through the 1/z connection formula. When the gamma
/// coefficients of a connection formula are near-singular (parameter
/// differences within 1e-3 of an integer) the Euler integral is used instead.
EvalResult hyp2f1(const Hyp2F1Input& input);

/// 2F1 from the Euler integral
///   Gamma(c) / (Gamma(b) Gamma(c-b)) * int_0^1 t^(b-1) (1-t)^(c-b-1) (1-zt)^(-a) dt,
/// requiring Re(c) > Re(b) > 0. For z > 1 the path is bent into the upper
/// (above_cut) or lower (below_cut) half t-plane around t = 1/z.
/// rel_tol is measured against the integral of |integrand|, so strongly
/// cancelling integrals return a larger relative abs_err instead of failing.
EvalResult hyp2f1_euler_quadrature(const Hyp2F1Input& input,
                                   double rel_tol = 1e-12);

}  // namespace lzc::sf
