#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fiducial/catalog.hpp"
#include "fiducial/fiducial_core.hpp"
#include "oracles.hpp"

using namespace fiducial;
using namespace fiducial::models;

namespace {

ConditionalFiducialSampler tagged(const char* name) {
  ConditionalFiducialSampler s;
  s.target = name;
  return s;
}

}  // namespace

TEST(Interval, Contains) {
  EXPECT_TRUE(Interval::positive().contains(1e-300));
  EXPECT_FALSE(Interval::positive().contains(0.0));
  EXPECT_TRUE(Interval::closed(0, 1).contains(1.0));
  EXPECT_FALSE(Interval::open(0, 1).contains(1.0));
  EXPECT_FALSE(Interval::real_line().contains(NAN));
}

TEST(Draw, NormalMeanAtZeroPrimary) {
  const StructuralEquation eq = normal_mu_equation(2.0, 8);
  EXPECT_DOUBLE_EQ(draw_with_primary(tagged("mu"), eq, 3.25, 0.0), 3.25);
}

TEST(Draw, NormalVarianceIsNSigmaHatOverGamma) {
  const Dataset d = Dataset::univariate({1.0, 2.0, 4.0, 7.0});
  const ModelSpec m = make_normal_model();
  const std::vector<double> theta{3.0, 1.0};
  const auto& s2 = m.conditionals[1];
  const double q = s2.statistic.compute(d, theta);
  EXPECT_DOUBLE_EQ(q, (4.0 + 1.0 + 1.0 + 16.0) / 4.0);
  RngStream a(3, 0), b(3, 0);
  const double g = sample(dist::ChiSquare{4.0}, b);
  EXPECT_DOUBLE_EQ(draw(s2, d, theta, a), 4.0 * q / g);
}

TEST(Draw, NormalMeanMatchesAnalyticConditional) {
  // sigma^2 = 1, n = 4, x_bar = 0 -> N(0, 0.25).
  const Dataset d = Dataset::univariate({-1.5, 0.5, 0.25, 0.75});
  const ModelSpec m = make_normal_model();
  const std::vector<double> theta{0.0, 1.0};
  RngStream rng(17, 0);
  std::vector<double> v(100000);
  for (auto& x : v) x = draw(m.conditionals[0], d, theta, rng);
  const auto ks = oracle::ks_one_sample(v, [](double x) { return cdf(dist::Normal{0.0, 0.25}, x); });
  EXPECT_GT(ks.p, 1e-3) << "D=" << ks.d;
}

TEST(Draw, SameQAndGammaGiveSameTheta) {
  const StructuralEquation eq = gamma_alpha_equation(0.5, 20);
  EXPECT_EQ(eq.invert(10.0, 0.3), eq.invert(10.0, 0.3));
  const StructuralEquation eq2 = gamma_alpha_equation(0.5, 20);
  EXPECT_EQ(eq.invert(10.0, -1.7), eq2.invert(10.0, -1.7));
}

TEST(Draw, InversionFailureIsStructuralError) {
  const StructuralEquation eq = pareto_alpha_equation(2.0, 5);
  try {
    // sum log x below n log beta.
    draw_with_primary(tagged("alpha"), eq, 1.0, 3.0);
    FAIL() << "expected StructuralError";
  } catch (const StructuralError& e) {
    EXPECT_EQ(e.param(), "alpha");
    EXPECT_EQ(e.statistic(), 1.0);
    EXPECT_EQ(e.primary(), 3.0);
  }
}

// Sum versus mean as the statistic: Definition of the fiducial distribution
// must not depend on the one-to-one choice.
TEST(Draw, StatisticChoiceDoesNotMatter) {
  const Dataset d = Dataset::univariate({0.3, 1.9, -0.4, 2.2, 1.1, 0.0});
  const std::vector<double> theta{0.0, 1.7};
  const auto by_mean = normal_mu_sampler(0, 1, MeanStatistic::mean);
  const auto by_sum = normal_mu_sampler(0, 1, MeanStatistic::sum);
  RngStream r1(1, 0), r2(1, 0), r3(2, 0);
  std::vector<double> a(100000), b(100000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = draw(by_mean, d, theta, r1);
    b[i] = draw(by_sum, d, theta, r2);
    EXPECT_NEAR(a[i], b[i], 1e-12);
  }
  for (auto& x : b) x = draw(by_sum, d, theta, r3);
  EXPECT_GT(oracle::ks_two_sample(a, b).p, 1e-3);
}

TEST(Injectivity, NormalMeanIsMonotone) {
  const auto rep = check_injectivity(normal_mu_equation(1.0, 10), 0.4);
  EXPECT_TRUE(rep.injective);
  EXPECT_EQ(rep.nonfinite, 0u);
  EXPECT_LT(rep.max_round_trip, 1e-15);
  EXPECT_THROW(check_injectivity(normal_mu_equation(1.0, 10), 0.4, 8), DomainError);
}

// The printed [-5, 5] truncation has no solution for gamma >= sqrt(n); the
// library narrows G to [-5, sqrt(n)) and flags it.
TEST(Injectivity, GammaShapeEquationNEquals20) {
  const double beta = 0.5;
  const std::size_t n = 20;
  const double q = 20.0 * (specfun::digamma(2.0) - std::log(beta));
  StructuralEquation eq = gamma_alpha_equation(beta, n);
  EXPECT_TRUE(eq.narrowed);
  EXPECT_TRUE(eq.approximate);
  EXPECT_LT(eq.gamma_domain.hi, std::sqrt(20.0));
  const auto rep = check_injectivity(eq, q);
  EXPECT_TRUE(rep.injective) << rep.detail;
  EXPECT_LT(rep.max_round_trip, 1e-8);

  StructuralEquation wide = eq;
  wide.gamma_dist = truncated_standard_normal(-5.0, 5.0);
  wide.gamma_domain = Interval::closed(-5.0, 5.0);
  EXPECT_THROW(wide.invert(q, 4.6), BracketError);
  const auto wide_rep = check_injectivity(wide, q, 4096);
  EXPECT_FALSE(wide_rep.injective);
  EXPECT_GT(wide_rep.nonfinite, 0u);
}

TEST(Injectivity, SmallSampleReportedNotThrown) {
  const StructuralEquation eq = gamma_alpha_equation(1.0, 2);
  for (double q : {-300.0, 0.0, 40.0}) {
    InjectivityReport rep;
    EXPECT_NO_THROW(rep = check_injectivity(eq, q));
    EXPECT_FALSE(rep.detail.empty());
  }
}

TEST(ImpliedDensity, MatchesPrintedForExactEquation) {
  const Dataset d = Dataset::univariate({1.2, 3.4, 2.2, 5.0, 2.9});
  const ModelSpec m = make_gamma_model();
  const std::vector<double> theta{1.7, 0.0};
  const auto& cond = m.conditionals[1];
  const StructuralEquation eq = cond.equation(d, theta);
  const double q = cond.statistic.compute(d, theta);
  for (double b : {0.1, 0.4, 0.8, 1.5}) {
    EXPECT_NEAR(implied_log_density(eq, q, b), log_density(gamma_conditional_beta(1.7, d), b), 1e-7) << b;
  }
  EXPECT_NEAR(implied_quantile(eq, q, 0.3), quantile(gamma_conditional_beta(1.7, d), 0.3), 1e-8);
}
