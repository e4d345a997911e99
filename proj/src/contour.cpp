#include "lzc/contour.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "lzc/quadrature.hpp"

namespace lzc::contour {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

// Decay budget: integrands are cut where they have fallen by e^-40.
constexpr double kDecay = 40.0;

Complex expm1_c(Complex z) {
  if (std::abs(z) < 1e-5) return z * (1.0 + z * (0.5 + z / 6.0));
  return std::exp(z) - 1.0;
}

// log(z) on the branch cut along the positive imaginary axis:
// arg(z) in (-3 pi / 2, pi / 2].
Complex log_cut_down(Complex z) {
  Complex l = std::log(z);
  if (l.imag() > 0.5 * kPi) l -= 2.0 * kPi * kI;
  return l;
}

void require_case1(const ModelParams& params, const char* what) {
  if (classify(params) != SlopeCase::BothPositive) {
    throw DomainError(std::string(what) + ": only stated for beta2 > beta1 > 0");
  }
}

// int_lo^hi over [lo, hi] split at the given interior breakpoints.
quad::QuadResult integrate_pieces(const std::function<Complex(double)>& f,
                                  std::vector<double> points,
                                  const quad::Tolerance& tol) {
  std::sort(points.begin(), points.end());
  quad::QuadResult total;
  total.converged = true;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (points[i + 1] <= points[i]) continue;
    const quad::QuadResult r = quad::integrate(f, points[i], points[i + 1], tol);
    total.value += r.value;
    total.abs_err += r.abs_err;
    total.intervals += r.intervals;
    total.converged = total.converged && r.converged;
  }
  return total;
}

}  // namespace

Exponents exponents(const ModelParams& params) {
  const double x1 = params.g1() * params.g1() / (2.0 * params.beta1());
  const double x2 = params.g2() * params.g2() / (2.0 * params.beta2());
  return {Complex(-0.5, 0.5 * params.k2() - x1 - x2), Complex(0.0, x1),
          Complex(0.0, x2)};
}

ContourIntegrand integrand_for(const ModelParams& params, int shift1, int shift2) {
  const Exponents e = exponents(params);
  return {e.alpha, e.xi1, e.xi2, params.beta1(), params.beta2(), shift1, shift2};
}

QuadValue real_axis_integral(const ContourIntegrand& in) {
  const Complex mu1 = in.xi1 + static_cast<double>(in.shift1);
  const Complex mu2 = in.xi2 + static_cast<double>(in.shift2);
  const double lower_rate = in.alpha.real() + 1.0;
  const double upper_rate = -(in.alpha + mu1 + mu2).real() - 1.0;
  if (!(lower_rate > 0.0) || !(upper_rate > 0.0)) {
    throw DomainError(
        "real_axis_integral: requires Re(alpha) > -1 and Re(alpha + mu1 + mu2) < -1");
  }
  // Both branch points i beta_j on one side of the real axis: rotate the path
  // onto the opposite imaginary half-axis. The arcs at 0 and infinity vanish
  // under the rate conditions above, and the principal branches stay
  // continuous across the sector. On the rotated ray the factors
  // e^{-Im(mu) arg} no longer blow up, which removes a cancellation of order
  // e^{pi (|Im mu1| + |Im mu2|) / 2}.
  double phi = 0.0;
  if (in.beta1 > 0.0 && in.beta2 > 0.0) phi = -0.5 * kPi;
  if (in.beta1 < 0.0 && in.beta2 < 0.0) phi = 0.5 * kPi;
  // x = e^{v + i phi}; dx = x dv.
  auto f = [&](double v) -> Complex {
    const Complex log_x(v, phi);
    const Complex x = std::exp(log_x);
    const Complex log_val = (in.alpha + 1.0) * log_x +
                            mu1 * std::log(x - kI * in.beta1) +
                            mu2 * std::log(x - kI * in.beta2);
    return std::exp(log_val);
  };
  const double l1 = std::log(std::abs(in.beta1));
  const double l2 = std::log(std::abs(in.beta2));
  const double lo = std::min(l1, l2) - kDecay / lower_rate;
  const double hi = std::max(l1, l2) + kDecay / upper_rate;
  quad::Tolerance tol;
  tol.rel = 1e-12;
  tol.abs = 1e-300;
  tol.max_intervals = 20000;
  const quad::QuadResult r = integrate_pieces(f, {lo, l1, l2, hi}, tol);
  if (!r.converged || r.abs_err > 1e-8 * std::abs(r.value)) {
    std::ostringstream diag;
    diag << "value=" << r.value << " err=" << r.abs_err;
    throw NumericalError("real_axis_integral: tolerance not reached", diag.str());
  }
  return {r.value, r.abs_err};
}

double normalization_q2(const ModelParams& params) {
  require_case1(params, "normalization_q2");
  const Shorthands s = shorthands(params);
  return 1.0 / (4.0 * kPi * (std::exp(kPi * (params.k2() - s.q1 - s.q2)) + 1.0));
}

IdentitySides i_squared_identity(const ModelParams& params) {
  require_case1(params, "i_squared_identity");
  const ContourIntegrand in = integrand_for(params, -1, 0);
  const QuadValue j = real_axis_integral(in);
  // I = -(i)^(alpha + xi1 + xi2) (1 - e^{-2 pi i alpha}) J, principal power of i.
  const Complex w = in.alpha + in.xi1 + in.xi2;
  const Complex i_pow = std::exp(0.5 * kPi * kI * w);
  const Complex integral = -i_pow * (1.0 - std::exp(-2.0 * kPi * kI * in.alpha)) * j.value;

  const Shorthands s = shorthands(params);
  const double q_sum = s.q1 + s.q2;
  // (1 - p1 p2) / (q1 + q2) with p1 p2 = exp(-pi (q1 + q2))
  const double ratio = q_sum == 0.0 ? kPi : -std::expm1(-kPi * q_sum) / q_sum;
  const double h10 = h_factor(HFactor::H10, params).value;
  const double rhs = 4.0 * kPi * ratio * h10 *
                     (std::exp(kPi * (params.k2() - q_sum)) + 1.0) /
                     (params.beta2() * (1.0 + s.kappa));
  return {std::norm(integral), rhs};
}

AmplitudeTriple contour_amplitudes(const ModelParams& params, Contour contour,
                                   double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw DomainError("contour_amplitudes: requires t > 0");
  }
  const Exponents ex = exponents(params);
  const std::array<double, 3> points = {0.0, params.beta1(), params.beta2()};
  const std::array<Complex, 3> base = {ex.alpha, ex.xi1, ex.xi2};
  const std::array<double, 3> prefactor = {1.0, -params.g1(), -params.g2()};
  const int j = static_cast<int>(contour);
  const double w = points[j];

  std::array<Complex, 3> amp{};
  for (int level = 0; level < 3; ++level) {
    std::array<Complex, 3> e = base;
    if (level > 0) e[level] -= 1.0;
    const Complex ej = e[j];

    // On the cut u = w - i s: factors of the other branch points, their
    // logarithmic derivative in s, and the discontinuity across the cut.
    auto others = [&](double s, Complex& dlog) {
      const Complex u = w - kI * s;
      Complex log_f = 0.0;
      dlog = 0.0;
      for (int k = 0; k < 3; ++k) {
        if (k == j) continue;
        const Complex d = points[k] - u;
        log_f += e[k] * log_cut_down(d);
        dlog += kI * e[k] / d;
      }
      return log_f;
    };

    // int_gamma_j e^{-iut} prod (w_k - u)^{e_k} du
    //   = -i e^{i pi e_j / 2} (1 - e^{-2 pi i e_j}) e^{-i w t}
    //     * int_0^inf s^{e_j} e^{-s t} F(w - i s) ds.
    // For Re(e_j) near -1 the s-integral is continued by one integration by
    // parts: int s^e G = -1/(e+1) int s^(e+1) G'.
    const bool continued = ej.real() < -0.75;
    const Complex power = continued ? ej + 1.0 : ej;
    Complex jump;
    if (continued) {
      // (1 - e^{-2 pi i e}) / (e + 1) with e + 1 -> 0 handled smoothly.
      const Complex xi = ej + 1.0;
      jump = std::abs(xi) < 1e-12 ? Complex(2.0 * kPi * kI)
                                  : -expm1_c(-2.0 * kPi * kI * xi) / xi;
      jump = -jump;
    } else {
      jump = -expm1_c(-2.0 * kPi * kI * ej);
    }
    const Complex outer = -kI * std::exp(0.5 * kPi * kI * ej) * jump *
                          std::polar(1.0, -w * t);

    // s = e^v; ds = e^v dv.
    auto f = [&](double v) -> Complex {
      const double s = std::exp(v);
      Complex dlog;
      const Complex log_f = others(s, dlog);
      Complex g = std::exp((power + 1.0) * v - s * t + log_f);
      if (continued) g *= (dlog - t);
      return g;
    };
    const double rate = power.real() + 1.0;
    const double scale = std::log(1.0 / t);
    const double lo = scale - kDecay / rate;
    const double hi = std::log(kDecay / t);
    std::vector<double> pts = {lo, scale, hi};
    for (int k = 0; k < 3; ++k) {
      const double dist = std::abs(points[k] - w);
      if (k != j && dist > 0.0 && std::log(dist) > lo && std::log(dist) < hi) {
        pts.push_back(std::log(dist));
      }
    }
    quad::Tolerance tol;
    tol.rel = 1e-12;
    tol.abs = 1e-300;
    tol.max_intervals = 20000;
    const quad::QuadResult r = integrate_pieces(f, pts, tol);
    if (!r.converged) {
      std::ostringstream diag;
      diag << "level=" << level << " contour=" << j << " t=" << t
           << " value=" << r.value << " err=" << r.abs_err;
      throw NumericalError("contour_amplitudes: quadrature did not converge",
                           diag.str());
    }
    amp[level] = prefactor[level] * outer * r.value;
  }
  return {amp[0], amp[1], amp[2], t};
}

}  // namespace lzc::contour
