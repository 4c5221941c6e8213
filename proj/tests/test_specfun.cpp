#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <gtest/gtest.h>

#include "fiducial/randvar.hpp"
#include "fiducial/specfun.hpp"

using namespace fiducial;
using namespace fiducial::specfun;

namespace {

std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> out;
  for (int i = 0; i < points; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1)));
  return out;
}

}  // namespace

TEST(LnGamma, KnownValues) {
  EXPECT_EQ(ln_gamma(1.0), 0.0);
  EXPECT_EQ(ln_gamma(2.0), 0.0);
  EXPECT_NEAR(ln_gamma(0.5), 0.5 * std::log(std::numbers::pi), 1e-14);
  EXPECT_NEAR(ln_gamma(0.5), 0.5723649429, 1e-10);
}

// Absolute 1e-12 for moderate arguments; beyond ~1e3 the value itself is large
// enough that one ulp exceeds 1e-12, so the check becomes relative there.
TEST(LnGamma, MatchesBoostOverRange) {
  for (double x : log_grid(1e-3, 1e6, 400)) {
    const double ref = boost::math::lgamma(x);
    if (x <= 100.0) {
      EXPECT_NEAR(ln_gamma(x), ref, 1e-12) << "x=" << x;
    } else {
      EXPECT_NEAR(ln_gamma(x), ref, 4e-15 * std::abs(ref)) << "x=" << x;
    }
  }
}

TEST(Digamma, KnownValuesAndRecurrence) {
  EXPECT_NEAR(digamma(1.0), -0.57721566490153286, 1e-14);
  EXPECT_NEAR(digamma(2.0), 0.42278433509846714, 1e-14);
  EXPECT_NEAR(digamma(10.0), digamma(9.0) + 1.0 / 9.0, 1e-12);
  for (double x : {0.5, 1.0, 2.0, 10.0, 100.0}) EXPECT_NEAR(digamma(x + 1.0), digamma(x) + 1.0 / x, 1e-12);
}

TEST(Digamma, MatchesBoostOverRange) {
  for (double x : log_grid(1e-3, 1e6, 400)) EXPECT_NEAR(digamma(x), boost::math::digamma(x), 1e-10) << "x=" << x;
}

TEST(Trigamma, KnownValuesAndRecurrence) {
  EXPECT_NEAR(trigamma(1.0), std::numbers::pi * std::numbers::pi / 6.0, 1e-13);
  EXPECT_NEAR(trigamma(4.0), trigamma(3.0) - 1.0 / 9.0, 1e-12);
  for (double x : {0.5, 1.0, 2.0, 10.0, 100.0}) EXPECT_NEAR(trigamma(x + 1.0), trigamma(x) - 1.0 / (x * x), 1e-12);
  EXPECT_NEAR(trigamma(1e6) / 1e-6, 1.0, 1e-5);
}

TEST(Trigamma, MatchesBoostOverRange) {
  for (double x : log_grid(1e-3, 1e6, 400)) {
    const double ref = boost::math::trigamma(x);
    EXPECT_NEAR(trigamma(x), ref, std::max(1e-10, 1e-13 * ref)) << "x=" << x;
  }
}

TEST(SpecialFunctions, RejectBadArguments) {
  for (double bad : {0.0, -1.0, double(INFINITY), double(NAN)}) {
    EXPECT_THROW(ln_gamma(bad), DomainError);
    EXPECT_THROW(digamma(bad), DomainError);
    EXPECT_THROW(trigamma(bad), DomainError);
  }
  EXPECT_THROW(normal_quantile(0.0), DomainError);
  EXPECT_THROW(normal_quantile(1.0), DomainError);
}

TEST(Normal, QuantileInvertsCdf) {
  for (double p : {1e-300, 1e-12, 1e-3, 0.1, 0.5, 0.77, 0.999, 1.0 - 1e-12}) {
    const double z = normal_quantile(p);
    if (p < 0.5) {
      EXPECT_NEAR(normal_cdf(z) / p, 1.0, 1e-13) << p;
    } else {
      EXPECT_NEAR(normal_sf(z) / (1.0 - p), 1.0, 1e-4) << p;
    }
  }
  EXPECT_EQ(normal_quantile(0.5), 0.0);
}

TEST(IncompleteFunctions, MatchBoost) {
  for (double a : {0.3, 1.0, 4.5, 30.0, 200.0}) {
    for (double x : {0.01, 0.5, 2.0, 10.0, 60.0, 250.0}) {
      EXPECT_NEAR(gamma_p(a, x), boost::math::gamma_p(a, x), 1e-13) << a << " " << x;
      EXPECT_NEAR(gamma_q(a, x), boost::math::gamma_q(a, x), 1e-13) << a << " " << x;
    }
  }
  for (double a : {0.5, 2.0, 8.0, 50.0}) {
    for (double b : {0.5, 3.0, 20.0}) {
      for (double x : {0.01, 0.2, 0.5, 0.9, 0.999}) {
        EXPECT_NEAR(beta_inc(a, b, x), boost::math::ibeta(a, b, x), 1e-12) << a << " " << b << " " << x;
      }
    }
  }
}

TEST(SolveMonotone, SimpleTargets) {
  EXPECT_NEAR(solve_monotone([](double x) { return x * x * x; }, 8.0, {0.0, 10.0}), 2.0, 1e-9);
  EXPECT_NEAR(solve_monotone([](double x) { return x; }, 0.5, {0.0, 1.0}), 0.5, 1e-10);
  EXPECT_NEAR(solve_monotone([](double x) { return -std::exp(x); }, -3.0, {-5.0, 5.0}), std::log(3.0), 1e-9);
}

TEST(SolveMonotone, Errors) {
  EXPECT_THROW(solve_monotone([](double x) { return x; }, 5.0, {0.0, 1.0}), BracketError);
  EXPECT_THROW(solve_monotone([](double x) { return x; }, 0.5, {1.0, 0.0}), BracketError);
  EXPECT_THROW(solve_monotone([](double x) { return x > 0.7 ? NAN : x; }, 0.5, {0.0, 1.0}), BracketError);
}

// Gamma-shape equation with gamma = 0: psi(alpha) = sum log x / n + log beta.
TEST(SolveMonotone, GammaShapeEquationAtZeroPrimary) {
  const double n = 20.0, beta = 0.5, sum_log = 12.3;
  const double alpha = solve_monotone_positive([&](double a) { return n * (digamma(a) - std::log(beta)); }, sum_log);
  EXPECT_NEAR(digamma(alpha), sum_log / n + std::log(beta), 1e-10 / n);
  EXPECT_NEAR(n * (digamma(alpha) - std::log(beta)), sum_log, 1e-10);
}

TEST(SolveMonotone, RandomMonotoneFunctionsMeetTolerance) {
  RngStream rng(11, 0);
  for (int rep = 0; rep < 200; ++rep) {
    const double a = 0.1 + 5.0 * rng.uniform(), b = -3.0 + 6.0 * rng.uniform(), c = 2.0 + 3.0 * rng.uniform();
    auto f = [&](double x) { return a * std::sinh(x / c) + b + 0.1 * x; };
    const double lo = -10.0, hi = 10.0;
    const double target = f(lo) + (f(hi) - f(lo)) * rng.uniform();
    const double x = solve_monotone(f, target, {lo, hi}, 1e-10);
    EXPECT_LE(std::abs(f(x) - target), 1e-10);
  }
}

// Slopes near 1e9: the residual cannot reach 1e-10, so the solver must instead
// stop with the root pinned to adjacent doubles.
TEST(SolveMonotone, SteepFunctionStopsAtResolution) {
  auto f = [](double x) { return 3.0 * std::sinh(2.0 * x); };
  const double target = 1234567.891;
  const double x = solve_monotone(f, target, {-10.0, 10.0}, 1e-10);
  const double below = std::nextafter(x, -INFINITY), above = std::nextafter(x, INFINITY);
  EXPECT_TRUE(std::abs(f(x) - target) <= 1e-10 ||
              ((f(below) - target) * (f(x) - target) <= 0.0 || (f(x) - target) * (f(above) - target) <= 0.0))
      << x;
  EXPECT_NEAR(x, 0.5 * std::asinh(target / 3.0), 1e-14);
}

TEST(SolveQuadraticPositive, Cases) {
  EXPECT_NEAR(solve_quadratic_positive(1.0, 0.0, -4.0), 2.0, 1e-15);
  // rho = 0: n s^2 - sum x'^2 = 0 with n = 4, sum x'^2 = 8.
  EXPECT_NEAR(solve_quadratic_positive(4.0, 0.0, -8.0), std::sqrt(2.0), 1e-15);
  EXPECT_THROW(solve_quadratic_positive(1.0, 3.0, 2.0), DegenerateDataError);
  EXPECT_THROW(solve_quadratic_positive(1.0, -3.0, 2.0), DegenerateDataError);
  EXPECT_NEAR(solve_quadratic_positive(0.0, 2.0, -3.0), 1.5, 1e-15);
}

TEST(SolveQuadraticPositive, ResidualBound) {
  RngStream rng(3, 0);
  for (int rep = 0; rep < 500; ++rep) {
    const double a = std::exp(6.0 * rng.uniform() - 3.0);
    const double b = (rng.uniform() - 0.5) * std::exp(8.0 * rng.uniform() - 4.0);
    const double c = -std::exp(6.0 * rng.uniform() - 3.0);
    const double t = solve_quadratic_positive(a, b, c);
    ASSERT_GT(t, 0.0);
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
    EXPECT_LE(std::abs((a * t + b) * t + c), 1e-12 * scale) << a << " " << b << " " << c;
  }
}

TEST(SolveCubic, Cases) {
  // (r - 0.5)(r^2 + 1) = r^3 - 0.5 r^2 + r - 0.5, scaled by -3.
  EXPECT_NEAR(solve_cubic_in_interval({-3.0, 1.5, -3.0, 1.5}, {-1.0, 1.0}), 0.5, 1e-12);
  // -n r^3 - n r with n = 10.
  EXPECT_NEAR(solve_cubic_in_interval({-10.0, 0.0, -10.0, 0.0}, {-1.0, 1.0}), 0.0, 1e-12);
  // (r - 2)(r^2 + 1) has no root in (-1, 1).
  EXPECT_THROW(solve_cubic_in_interval({1.0, -2.0, 1.0, -2.0}, {-1.0, 1.0}), DegenerateDataError);
}

TEST(SolveCubic, PicksHighestScoringRoot) {
  // Roots at -0.6, 0.1 and 0.7.
  const std::array<double, 4> c{1.0, -0.2, -0.41, 0.042};
  EXPECT_NEAR(solve_cubic_in_interval(c, {-1.0, 1.0}, [](double r) { return -(r - 0.65) * (r - 0.65); }), 0.7, 1e-10);
  EXPECT_NEAR(solve_cubic_in_interval(c, {-1.0, 1.0}, [](double r) { return -(r + 0.5) * (r + 0.5); }), -0.6, 1e-10);
  EXPECT_NEAR(solve_cubic_in_interval(c, {-1.0, 1.0}, [](double r) { return -r * r; }), 0.1, 1e-10);
}

TEST(SolveCubic, ResidualOnRandomCubics) {
  RngStream rng(5, 0);
  for (int rep = 0; rep < 300; ++rep) {
    const double n = 5.0 + 100.0 * rng.uniform();
    const double a = n * (0.2 + 2.0 * rng.uniform()), b = n * (0.2 + 2.0 * rng.uniform());
    const double cr = (rng.uniform() - 0.5) * 2.0 * std::sqrt(a * b);
    const std::array<double, 4> c{-n, cr, n - a - b, cr};
    const double r = solve_cubic_in_interval(c, {-1.0, 1.0});
    const double p = ((c[0] * r + c[1]) * r + c[2]) * r + c[3];
    EXPECT_LE(std::abs(p), 1e-10 * std::max({n, a, b})) << rep;
  }
}
