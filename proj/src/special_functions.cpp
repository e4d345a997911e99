#include "lzc/special_functions.hpp"

#include <array>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "lzc/quadrature.hpp"

namespace lzc::sf {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr Complex kI{0.0, 1.0};

// Parameter differences closer than this to an integer make the gamma
// coefficients of the connection formulas blow up.
constexpr double kNearInteger = 1e-3;

constexpr int kSeriesCap = 10000;
constexpr double kSeriesStop = 1e-16;

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

struct NearSingular {};

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

bool near_integer(Complex s) {
  return std::abs(s - std::round(s.real())) < kNearInteger;
}

// log Gamma(z) for Re(z) >= 1/2.
Complex log_gamma_lanczos(Complex z) {
  z -= 1.0;
  Complex series = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) {
    series += kLanczos[i] / (z + static_cast<double>(i));
  }
  const Complex t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t +
         std::log(series);
}

// log(sin(pi z)) without overflow for large |Im z|.
Complex log_sin_pi(Complex z) {
  if (std::abs(z.imag()) < 20.0) return std::log(std::sin(kPi * z));
  const Complex log_2i = std::log(2.0 * kI);
  if (z.imag() > 0.0) {
    return -kI * kPi * z - log_2i + std::log(1.0 - std::exp(2.0 * kI * kPi * z));
  }
  return kI * kPi * z - log_2i + std::log(1.0 - std::exp(-2.0 * kI * kPi * z));
}

// prod Gamma(num) / prod Gamma(den); zero when a denominator sits on a pole.
Complex gamma_ratio(std::initializer_list<Complex> num,
                    std::initializer_list<Complex> den) {
  for (const Complex& d : den) {
    if (is_nonpositive_integer(d)) return 0.0;
  }
  Complex log_value = 0.0;
  for (const Complex& n : num) log_value += log_gamma_c(n);
  for (const Complex& d : den) log_value -= log_gamma_c(d);
  return std::exp(log_value);
}

// Relative accuracy assumed for one gamma_ratio evaluation.
constexpr double kGammaRatioRelErr = 1e-13;

void validate(const Hyp2F1Input& in) {
  if (!finite(in.a) || !finite(in.b) || !finite(in.c) || !std::isfinite(in.z)) {
    throw DomainError("hyp2f1: parameters and argument must be finite");
  }
  if (is_nonpositive_integer(in.c)) {
    throw DomainError("hyp2f1: c is a nonpositive integer");
  }
}

// |1 - z|^s e^{-+ i pi s} for real z, choosing the side of the cut for z > 1.
Complex one_minus_z_pow(double z, Complex s, CutSide side) {
  const double w = 1.0 - z;
  if (w > 0.0) return std::exp(s * std::log(w));
  const double sign = side == CutSide::above_cut ? -1.0 : 1.0;
  return std::exp(s * (std::log(-w) + sign * kI * kPi));
}

// (-z)^(-p) for z > 1 on the requested side of the cut.
Complex minus_z_pow(double z, Complex p, CutSide side) {
  const double sign = side == CutSide::above_cut ? 1.0 : -1.0;
  return std::exp(-p * std::log(z) + sign * kI * kPi * p);
}

// 1 - z connection formula; valid for 0 < z < 2.
EvalResult via_one_minus_z(const Hyp2F1Input& in) {
  const Complex a = in.a, b = in.b, c = in.c;
  const Complex s = c - a - b;
  if (near_integer(s)) throw NearSingular{};
  const double w = 1.0 - in.z;
  const Complex coef1 = gamma_ratio({c, s}, {c - a, c - b});
  const Complex coef2 = gamma_ratio({c, -s}, {a, b});
  const EvalResult f1 = hyp2f1_series(a, b, 1.0 - s, w);
  const EvalResult f2 = hyp2f1_series(c - a, c - b, 1.0 + s, w);
  const Complex power = one_minus_z_pow(in.z, s, in.cut_side);
  const Complex t1 = coef1 * f1.value;
  const Complex t2 = coef2 * power * f2.value;
  EvalResult out;
  out.value = t1 + t2;
  out.abs_err = std::abs(coef1) * f1.abs_err +
                std::abs(coef2 * power) * f2.abs_err +
                kGammaRatioRelErr * (std::abs(t1) + std::abs(t2));
  out.method = Method::transform;
  return out;
}

// 1/z connection formula; valid for |z| > 1.
EvalResult via_inverse_z(const Hyp2F1Input& in) {
  const Complex a = in.a, b = in.b, c = in.c;
  if (near_integer(a - b)) throw NearSingular{};
  const double w = 1.0 / in.z;
  const Complex coef1 = gamma_ratio({c, b - a}, {b, c - a});
  const Complex coef2 = gamma_ratio({c, a - b}, {a, c - b});
  const EvalResult f1 = hyp2f1_series(a, a - c + 1.0, a - b + 1.0, w);
  const EvalResult f2 = hyp2f1_series(b, b - c + 1.0, b - a + 1.0, w);
  const Complex p1 = minus_z_pow(in.z, a, in.cut_side);
  const Complex p2 = minus_z_pow(in.z, b, in.cut_side);
  const Complex t1 = coef1 * p1 * f1.value;
  const Complex t2 = coef2 * p2 * f2.value;
  EvalResult out;
  out.value = t1 + t2;
  out.abs_err = std::abs(coef1 * p1) * f1.abs_err +
                std::abs(coef2 * p2) * f2.abs_err +
                kGammaRatioRelErr * (std::abs(t1) + std::abs(t2));
  out.method = Method::transform;
  return out;
}

EvalResult analytic(const Hyp2F1Input& in) {
  const double z = in.z;
  if (std::abs(z) <= 0.5) return hyp2f1_series(in.a, in.b, in.c, z);
  if (z < 0.0) {
    // Pfaff: F(a,b;c;z) = (1-z)^(-a) F(a, c-b; c; z/(z-1)), z/(z-1) in (1/3, 1).
    Hyp2F1Input inner{in.a, in.c - in.b, in.c, z / (z - 1.0), CutSide::principal};
    EvalResult r = analytic(inner);
    const Complex scale = std::exp(-in.a * std::log(1.0 - z));
    r.value *= scale;
    r.abs_err *= std::abs(scale);
    r.method = Method::transform;
    return r;
  }
  if (z == 1.0) {
    const Complex s = in.c - in.a - in.b;
    if (s.real() <= 0.0) {
      throw DomainError("hyp2f1: series diverges at z = 1 unless Re(c-a-b) > 0");
    }
    EvalResult out;
    out.value = gamma_ratio({in.c, s}, {in.c - in.a, in.c - in.b});
    out.abs_err = kGammaRatioRelErr * std::abs(out.value);
    out.method = Method::transform;
    return out;
  }
  if (z > 1.0 && in.cut_side == CutSide::principal) {
    throw DomainError(
        "hyp2f1: z > 1 lies on the branch cut; select above_cut or below_cut");
  }
  if (z <= 1.5) return via_one_minus_z(in);
  return via_inverse_z(in);
}

}  // namespace

const char* to_string(Method m) {
  switch (m) {
    case Method::series: return "series";
    case Method::transform: return "transform";
    case Method::quadrature: return "quadrature";
  }
  return "?";
}

const char* to_string(CutSide s) {
  switch (s) {
    case CutSide::principal: return "principal";
    case CutSide::above_cut: return "above_cut";
    case CutSide::below_cut: return "below_cut";
  }
  return "?";
}

bool is_nonpositive_integer(Complex z, double tol) {
  if (std::abs(z.imag()) > tol) return false;
  const double n = std::round(z.real());
  return n <= 0.0 && std::abs(z.real() - n) <= tol;
}

Complex log_gamma_c(Complex z) {
  if (!finite(z)) throw DomainError("gamma: non-finite argument");
  if (is_nonpositive_integer(z, 0.0)) {
    throw DomainError("gamma: pole at a nonpositive integer");
  }
  if (z.real() < 0.5) {
    return std::log(kPi) - log_sin_pi(z) - log_gamma_lanczos(1.0 - z);
  }
  return log_gamma_lanczos(z);
}

Complex gamma_c(Complex z) {
  if (!finite(z)) throw DomainError("gamma: non-finite argument");
  if (is_nonpositive_integer(z, 0.0)) {
    throw DomainError("gamma: pole at a nonpositive integer");
  }
  if (z.real() < 0.5) {
    return kPi / (std::sin(kPi * z) * std::exp(log_gamma_lanczos(1.0 - z)));
  }
  return std::exp(log_gamma_lanczos(z));
}

Complex rgamma_c(Complex z) {
  if (is_nonpositive_integer(z, 0.0)) return 0.0;
  return std::exp(-log_gamma_c(z));
}

EvalResult hyp2f1_series(Complex a, Complex b, Complex c, double z) {
  if (is_nonpositive_integer(c)) {
    throw DomainError("hyp2f1: c is a nonpositive integer");
  }
  if (!(std::abs(z) < 1.0)) {
    throw DomainError("hyp2f1_series: requires |z| < 1");
  }
  Complex term = 1.0;
  Complex sum = 1.0;
  double abs_sum = 1.0;
  int small_run = 0;
  int n = 0;
  for (; n < kSeriesCap && small_run < 3; ++n) {
    const double k = static_cast<double>(n);
    term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
    sum += term;
    abs_sum += std::abs(term);
    if (std::abs(term) < kSeriesStop * std::abs(sum)) {
      ++small_run;
    } else {
      small_run = 0;
    }
  }
  if (small_run < 3 || !finite(sum)) {
    std::ostringstream diag;
    diag << "terms=" << n << " last_term=" << std::abs(term)
         << " partial_sum=" << sum;
    throw NumericalError("hyp2f1_series: no convergence within term budget",
                         diag.str());
  }
  EvalResult out;
  out.value = sum;
  out.abs_err = std::abs(term) / (1.0 - std::abs(z)) + 2.0 * kEps * abs_sum;
  out.method = Method::series;
  return out;
}

EvalResult hyp2f1(const Hyp2F1Input& input) {
  validate(input);
  if (input.z == 0.0) return {1.0, 0.0, Method::series};
  try {
    return analytic(input);
  } catch (const NearSingular&) {
  }
  if (input.c.real() > input.b.real() && input.b.real() > 0.0) {
    return hyp2f1_euler_quadrature(input);
  }
  if (input.c.real() > input.a.real() && input.a.real() > 0.0) {
    Hyp2F1Input swapped = input;
    std::swap(swapped.a, swapped.b);
    return hyp2f1_euler_quadrature(swapped);
  }
  if (std::abs(input.z) < 0.95) {
    return hyp2f1_series(input.a, input.b, input.c, input.z);
  }
  std::ostringstream diag;
  diag << "a=" << input.a << " b=" << input.b << " c=" << input.c
       << " z=" << input.z;
  throw NumericalError(
      "hyp2f1: connection coefficients near-singular and no fallback applies",
      diag.str());
}

EvalResult hyp2f1_euler_quadrature(const Hyp2F1Input& input, double rel_tol) {
  validate(input);
  const Complex a = input.a, b = input.b, c = input.c;
  const double z = input.z;
  if (!(c.real() > b.real() && b.real() > 0.0)) {
    throw DomainError("hyp2f1_euler_quadrature: requires Re(c) > Re(b) > 0");
  }
  double bend = 0.0;
  if (z > 1.0) {
    if (input.cut_side == CutSide::principal) {
      throw DomainError(
          "hyp2f1_euler_quadrature: z > 1 lies on the branch cut; select a side");
    }
    bend = input.cut_side == CutSide::above_cut ? 1.0 : -1.0;
  }

  // Path t(s) = s (1 + i*bend*(1-s)), s in [0, 1]; real when bend == 0.
  // log t, log(1-t) and 1 - z t are formed from factored expressions so the
  // endpoint behaviour survives rounding.
  auto log_integrand = [&](double s, double log_s, double one_minus_s,
                           double log_one_minus_s) {
    const Complex tf = 1.0 + kI * bend * one_minus_s;
    const Complex uf = 1.0 - kI * bend * s;
    const Complex t = s * tf;
    const Complex log_t = log_s + std::log(tf);
    const Complex log_1mt = log_one_minus_s + std::log(uf);
    const Complex one_minus_zt = (z == 1.0 && bend == 0.0) ? Complex(one_minus_s)
                                                            : 1.0 - z * t;
    const Complex dt = 1.0 + kI * bend * (1.0 - 2.0 * s);
    return std::make_pair((b - 1.0) * log_t + (c - b - 1.0) * log_1mt -
                              a * std::log(one_minus_zt),
                          dt);
  };

  // Left half: s = u^m absorbs s^(b-1); right half: 1 - s = v^n absorbs
  // (1-s)^(c-b-1).
  const double m = std::max(1.0, 2.0 / b.real());
  // At z = 1 the factor (1 - zt)^(-a) joins the right endpoint power.
  const Complex right_power = z == 1.0 ? c - b - a : c - b;
  if (!(right_power.real() > 0.0)) {
    throw DomainError("hyp2f1_euler_quadrature: integral diverges at t = 1");
  }
  const double n = std::max(1.0, 2.0 / right_power.real());
  auto left = [&](double u) -> Complex {
    const double log_u = std::log(u);
    const double s = std::pow(u, m);
    auto [log_f, dt] = log_integrand(s, m * log_u, 1.0 - s, std::log1p(-s));
    // ds = m u^(m-1) du; fold u^(m-1) into the exponent.
    return m * dt * std::exp(log_f + (m - 1.0) * log_u);
  };
  auto right = [&](double v) -> Complex {
    const double log_v = std::log(v);
    const double one_minus_s = std::pow(v, n);
    const double s = 1.0 - one_minus_s;
    auto [log_f, dt] = log_integrand(s, std::log1p(-one_minus_s), one_minus_s,
                                     n * log_v);
    return n * dt * std::exp(log_f + (n - 1.0) * log_v);
  };

  quad::Tolerance tol;
  tol.rel = rel_tol;
  tol.abs = 1e-300;
  tol.max_intervals = 20000;
  const quad::QuadResult q1 = quad::integrate(left, 0.0, std::pow(0.5, 1.0 / m), tol);
  const quad::QuadResult q2 = quad::integrate(right, 0.0, std::pow(0.5, 1.0 / n), tol);
  const Complex integral = q1.value + q2.value;
  const double err = q1.abs_err + q2.abs_err;
  const double l1 = q1.l1_norm + q2.l1_norm;
  if (!finite(integral) || !q1.converged || !q2.converged ||
      err > 10.0 * rel_tol * l1 + 1e-300) {
    std::ostringstream diag;
    diag << "integral=" << integral << " err=" << err << " l1=" << l1
         << " intervals=" << q1.intervals << "+" << q2.intervals
         << " converged=" << q1.converged << q2.converged
         << " errs=" << q1.abs_err << "," << q2.abs_err;
    throw NumericalError("hyp2f1_euler_quadrature: tolerance not reached",
                         diag.str());
  }
  const Complex prefactor = gamma_ratio({c}, {b, c - b});
  EvalResult out;
  out.value = prefactor * integral;
  out.abs_err = std::abs(prefactor) * err +
                kGammaRatioRelErr * std::abs(out.value);
  out.method = Method::quadrature;
  return out;
}

}  // namespace lzc::sf
