#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lzc/errors.hpp"
#include "lzc/special_functions.hpp"
#include "oracles.hpp"

using namespace lzc::sf;
using oracle_ref::rel_diff;

namespace {

constexpr double kPi = std::numbers::pi;

// Values computed once with mpmath at 30 digits.
struct Frozen {
  Complex z;
  Complex value;
};

}  // namespace

TEST(Gamma, TrivialValues) {
  EXPECT_NEAR(std::abs(gamma_c(1.0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(gamma_c(0.5).real(), std::sqrt(kPi), 1e-14);
  EXPECT_NEAR(gamma_c(0.5).imag(), 0.0, 1e-15);
  EXPECT_NEAR(gamma_c(5.0).real(), 24.0, 24.0 * 1e-14);
}

TEST(Gamma, AgreesWithEulerIntegral) {
  for (Complex z : {Complex(1.0, 1.0), Complex(2.5, -0.7), Complex(0.8, 3.0), Complex(7.0, 2.0)}) {
    EXPECT_LT(rel_diff(gamma_c(z), oracle_ref::gamma_by_quadrature(z)), 1e-12) << z;
  }
}

TEST(Gamma, FrozenReferenceValues) {
  const Frozen cases[] = {
      {{1.0, 1.0}, {0.49801566811835607, -0.15494982830181067}},
      {{-2.5, 0.3}, {-0.6138229974377415, -0.2112326149370418}},
      {{0.2, -7.0}, {2.3250429498946336e-05, 3.1232440015091573e-06}},
      {{30.0, 40.0}, {1.8741997673037803e+21, -1.5108445033328678e+21}},
  };
  for (const Frozen& c : cases) EXPECT_LT(rel_diff(gamma_c(c.z), c.value), 1e-12) << c.z;
  const Complex lg = log_gamma_c({3.0, 60.0});
  EXPECT_NEAR(lg.real(), -83.09228555218952, 1e-11);
  EXPECT_NEAR(lg.imag(), 189.5362895289711, 1e-11);
}

TEST(Gamma, PolesThrow) {
  EXPECT_THROW(gamma_c(0.0), lzc::DomainError);
  EXPECT_THROW(gamma_c(-3.0), lzc::DomainError);
  EXPECT_EQ(rgamma_c(-3.0), Complex(0.0));
}

TEST(Gamma, Recurrence) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const Complex z = oracle_ref::random_complex(rng, 20.0);
    if (is_nonpositive_integer(z, 1e-6) || is_nonpositive_integer(z + 1.0, 1e-6)) continue;
    EXPECT_LT(rel_diff(gamma_c(z + 1.0), z * gamma_c(z)), 1e-12) << z;
  }
}

TEST(Hyp2F1, ZeroArgumentIsOne) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const Complex a = oracle_ref::random_complex(rng, 5.0);
    const Complex b = oracle_ref::random_complex(rng, 5.0);
    const Complex c = oracle_ref::random_complex(rng, 5.0);
    if (is_nonpositive_integer(c, 1e-6)) continue;
    const EvalResult r = hyp2f1({a, b, c, 0.0});
    EXPECT_LE(std::abs(r.value - 1.0), 1e-15);
  }
}

TEST(Hyp2F1, ElementaryIdentities) {
  const EvalResult r = hyp2f1({1.0, 1.0, 2.0, 0.5});
  EXPECT_NEAR(r.value.real(), 2.0 * std::log(2.0), 1e-14);
  EXPECT_LE(r.abs_err, 1e-12);
  for (double z : {-4.0, -0.3, 0.2, 0.7, 0.95}) {
    const Complex expected = -std::log1p(-z) / z;
    EXPECT_LT(rel_diff(hyp2f1({1.0, 1.0, 2.0, z}).value, expected), 1e-12) << z;
  }
}

TEST(Hyp2F1, GaussSummationPoint) {
  const Complex expected = oracle_ref::gauss_sum(0.5, 0.25, 2.0);
  const double direct = std::tgamma(2.0) * std::tgamma(1.25) /
                        (std::tgamma(1.5) * std::tgamma(1.75));
  EXPECT_NEAR(expected.real(), direct, 1e-14);
  EXPECT_LT(rel_diff(hyp2f1({0.5, 0.25, 2.0, 1.0}).value, direct), 1e-13);
  EXPECT_THROW(hyp2f1({0.5, 1.0, 1.2, 1.0}), lzc::DomainError);
}

TEST(Hyp2F1, FrozenReferenceValues) {
  struct Case {
    Complex a, b, c;
    double z;
    CutSide side;
    Complex value;
  };
  const Case cases[] = {
      {{1.0, -0.5556}, {0.5, -0.05}, {1.0, -0.6106}, 0.1, CutSide::principal,
       {1.0529555456166728, -0.0031406839323530646}},
      {{0.3, 0.2}, {-0.7, 1.0}, {1.4, -0.5}, -3.0, CutSide::principal,
       {1.7055202883103737, -0.44102087633227055}},
      {{0.3, 0.2}, {-0.7, 1.0}, {1.4, -0.5}, 0.75, CutSide::principal,
       {0.7971953813407533, -0.04611251761858288}},
      {{1.2, -0.4}, {0.5, 0.3}, {2.1, 0.2}, 0.97, CutSide::principal,
       {2.1193094371560783, -0.0538593356549505}},
      {{0.5, 0.1}, {0.5, 0.1}, 1.5, 3.0, CutSide::above_cut,
       {0.7362059823124265, 0.5095036562325209}},
      {{0.5, 0.1}, {0.5, 0.1}, 1.5, 3.0, CutSide::below_cut,
       {1.1719861606171083, -0.8385195867589529}},
  };
  for (const Case& c : cases) {
    const EvalResult r = hyp2f1({c.a, c.b, c.c, c.z, c.side});
    EXPECT_LT(rel_diff(r.value, c.value), 1e-12) << "z=" << c.z << " side=" << to_string(c.side);
    EXPECT_LE(std::abs(r.value - c.value), r.abs_err + 1e-14);
  }
}

TEST(Hyp2F1, H10TupleSeriesMatchesQuadrature) {
  const Hyp2F1Input in{{1.0, -0.5556}, {0.5, -0.05}, {1.0, -0.6106}, 0.1};
  const EvalResult s = hyp2f1(in);
  const EvalResult q = hyp2f1_euler_quadrature(in);
  EXPECT_EQ(s.method, Method::series);
  EXPECT_EQ(q.method, Method::quadrature);
  EXPECT_LT(rel_diff(s.value, q.value), 1e-10);
}

TEST(Hyp2F1, InvalidInputs) {
  EXPECT_THROW(hyp2f1({1.0, 1.0, -2.0, 0.3}), lzc::DomainError);
  EXPECT_THROW(hyp2f1({1.0, 1.0, 2.0, 1.5, CutSide::principal}), lzc::DomainError);
  EXPECT_THROW(hyp2f1({1.0, 1.0, 2.0, std::nan("")}), lzc::DomainError);
  EXPECT_THROW(hyp2f1_euler_quadrature({1.0, 2.0, 1.5, 0.3}), lzc::DomainError);
}

TEST(Hyp2F1, SeriesBudgetExhaustionCarriesDiagnostics) {
  try {
    hyp2f1_series({2.0, 3.0}, 2.5, 1.0, 0.9999);
    FAIL() << "expected NumericalError";
  } catch (const lzc::NumericalError& e) {
    EXPECT_FALSE(e.diagnostics().empty());
  }
}

TEST(Hyp2F1, CutSidesDifferInMagnitude) {
  const Complex a(0.5, 0.1);
  for (CutSide side : {CutSide::above_cut, CutSide::below_cut}) {
    const Hyp2F1Input in{a, a, 1.5, 1.5, side};
    const EvalResult transform = hyp2f1(in);
    const EvalResult quad = hyp2f1_euler_quadrature(in);
    EXPECT_LT(rel_diff(transform.value, quad.value), 1e-10) << to_string(side);
  }
  const double above = std::abs(hyp2f1({a, a, 1.5, 1.5, CutSide::above_cut}).value);
  const double below = std::abs(hyp2f1({a, a, 1.5, 1.5, CutSide::below_cut}).value);
  EXPECT_GT(std::abs(above - below), 0.1);
}

TEST(Hyp2F1, BothConnectionFormulasAcrossTheCut) {
  // 1/z and 1-z transformations meet around z = 1.5.
  const Complex a(0.4, -0.3), b(0.6, 0.2), c(1.7, 0.1);
  for (CutSide side : {CutSide::above_cut, CutSide::below_cut}) {
    for (double z : {1.2, 1.49, 1.51, 2.5, 8.0}) {
      const Hyp2F1Input in{a, b, c, z, side};
      EXPECT_LT(rel_diff(hyp2f1(in).value, hyp2f1_euler_quadrature(in).value), 1e-10)
          << z << " " << to_string(side);
    }
  }
}

TEST(Hyp2F1, NearIntegerExponentFallsBackToQuadrature) {
  // c - a - b = 1e-5 is within the near-integer band of the 1 - z formula.
  const Complex a(0.3, 0.2), b(0.5, -0.1);
  const Complex c = a + b + 1e-5;
  const EvalResult r = hyp2f1({a, b, c, 0.8});
  EXPECT_EQ(r.method, Method::quadrature);
  const EvalResult s = hyp2f1_series(a, b, c, 0.8);
  EXPECT_LT(rel_diff(r.value, s.value), 1e-9);
}

TEST(Hyp2F1Property, GaussSummation) {
  std::mt19937_64 rng(21);
  int checked = 0;
  while (checked < 100) {
    const Complex a = oracle_ref::random_complex(rng, 3.0);
    const Complex b(oracle_ref::uniform(rng, 0.2, 3.0), oracle_ref::uniform(rng, -3.0, 3.0));
    const Complex c(oracle_ref::uniform(rng, 0.2, 6.0), oracle_ref::uniform(rng, -3.0, 3.0));
    if ((c - a - b).real() <= 0.2 || c.real() <= b.real()) continue;
    ++checked;
    const Complex expected = oracle_ref::gauss_sum(a, b, c);
    EXPECT_LE(rel_diff(hyp2f1({a, b, c, 1.0}).value, expected), 1e-10);
    // Independent route: the Euler integral at z = 1.
    EXPECT_LE(rel_diff(hyp2f1_euler_quadrature({a, b, c, 1.0}).value, expected), 1e-10)
        << a << b << c;
  }
}

TEST(Hyp2F1Property, PfaffConsistency) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const Complex a = oracle_ref::random_complex(rng, 3.0);
    const Complex b = oracle_ref::random_complex(rng, 3.0);
    Complex c = oracle_ref::random_complex(rng, 3.0);
    if (is_nonpositive_integer(c, 1e-2)) c += 0.5;
    const double z = oracle_ref::uniform(rng, -5.0, 0.5);
    const EvalResult lhs = hyp2f1({a, b, c, z});
    const EvalResult rhs_f = hyp2f1({a, c - b, c, z / (z - 1.0)});
    const Complex factor = std::pow(1.0 - z, -a);
    const Complex rhs = factor * rhs_f.value;
    const double allowed = lhs.abs_err + std::abs(factor) * rhs_f.abs_err +
                           1e-13 * std::max(std::abs(lhs.value), std::abs(rhs));
    EXPECT_LE(std::abs(lhs.value - rhs), allowed) << a << b << c << " z=" << z;
  }
}

TEST(Hyp2F1Property, SeriesMatchesEulerQuadrature) {
  std::mt19937_64 rng(99);
  int checked = 0;
  while (checked < 100) {
    Complex a = oracle_ref::random_complex(rng, 5.0);
    Complex b = oracle_ref::random_complex(rng, 5.0);
    const Complex c = oracle_ref::random_complex(rng, 5.0);
    if (!(c.real() > b.real() && b.real() > 0.0)) std::swap(a, b);
    if (!(c.real() > b.real() && b.real() > 0.0)) continue;
    ++checked;
    const double z = oracle_ref::uniform(rng, 0.0, 0.9);
    const EvalResult s = hyp2f1_series(a, b, c, z);
    const EvalResult q = hyp2f1_euler_quadrature({a, b, c, z});
    EXPECT_LE(rel_diff(s.value, q.value), 1e-8) << a << b << c << " z=" << z;
  }
}

TEST(Hyp2F1Property, ContiguousRelation) {
  // (c - a) F(a-1) + (2a - c + (b - a) z) F(a) + a (z - 1) F(a+1) = 0
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    const Complex a = oracle_ref::random_complex(rng, 5.0);
    const Complex b = oracle_ref::random_complex(rng, 5.0);
    Complex c = oracle_ref::random_complex(rng, 5.0);
    if (is_nonpositive_integer(c, 1e-2)) c += 0.5;
    const double z = oracle_ref::uniform(rng, 0.0, 0.9);
    const Complex t1 = (c - a) * hyp2f1({a - 1.0, b, c, z}).value;
    const Complex t2 = (2.0 * a - c + (b - a) * z) * hyp2f1({a, b, c, z}).value;
    const Complex t3 = a * (z - 1.0) * hyp2f1({a + 1.0, b, c, z}).value;
    const double scale = std::max({std::abs(t1), std::abs(t2), std::abs(t3)});
    EXPECT_LE(std::abs(t1 + t2 + t3), 1e-9 * scale) << a << b << c << " z=" << z;
  }
}
