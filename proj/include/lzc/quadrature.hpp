#pragma once

#include <complex>
#include <functional>

namespace lzc::quad {

using Complex = std::complex<double>;

struct Tolerance {
  double abs = 1e-14;
  double rel = 1e-12;
  int max_intervals = 4000;
};

struct QuadResult {
  Complex value;
  double abs_err = 0.0;
  /// Kronrod estimate of the integral of |f|.
  double l1_norm = 0.0;
  int intervals = 0;
  /// Reached the tolerance, or stopped at the rounding floor (see below).
  bool converged = false;
  /// The tolerance lies below the rounding floor ~ 50 eps * l1_norm, which
  /// happens when cancellation makes |value| much smaller than l1_norm;
  /// abs_err then reports that floor honestly.
  bool rounding_limited = false;
};

/// Globally adaptive 15-point Gauss-Kronrod integration of a complex-valued
/// integrand over the finite interval [lo, hi]. The interval with the largest
/// error estimate is bisected until the summed estimate drops below
/// max(tol.abs, tol.rel * |value|), the truncation part of the estimate
/// falls below the rounding floor, or the interval budget is spent.
/// The integrand is never evaluated at the endpoints.
QuadResult integrate(const std::function<Complex(double)>& f, double lo,
                     double hi, const Tolerance& tol = {});

}  // namespace lzc::quad
