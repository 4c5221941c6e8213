#include <cmath>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <gtest/gtest.h>

#include "fiducial/catalog.hpp"
#include "fiducial/gibbs.hpp"
#include "oracles.hpp"

using namespace fiducial;

namespace {

Dataset small_normal() { return Dataset::univariate({1.2, 0.4, 2.2, 1.9, 0.8, 3.1, -0.5, 1.0, 1.7, 0.6}); }

double median_primary(const StructuralEquation& eq, RngStream&) { return quantile(eq.gamma_dist, 0.5); }

}  // namespace

TEST(Gibbs, PinnedPrimaryGivesClosedFormCycle) {
  const ModelSpec m = models::make_normal_model();
  const Dataset d = small_normal();
  ChainConfig cfg;
  cfg.m = 1;
  cfg.b = 0;
  cfg.init = {{0.0, 1.0}};
  const SampleMatrix s = run(m, d, cfg, median_primary);
  const double xbar = d.sx().mean;
  double ss = 0.0;
  for (double v : d.x()) ss += (v - xbar) * (v - xbar);
  const double med = boost::math::quantile(boost::math::chi_squared(10.0), 0.5);
  EXPECT_NEAR(s.at(0, 0, 0), xbar, 1e-14);
  EXPECT_NEAR(s.at(0, 0, 1), ss / med, 1e-12);
}

TEST(Gibbs, Deterministic) {
  const ModelSpec m = models::make_gamma_model();
  RngStream r(3, 0);
  const Dataset d = m.simulate(std::vector<double>{2.0, 0.5}, 20, r);
  ChainConfig cfg;
  cfg.m = 300;
  cfg.b = 50;
  cfg.chains = 3;
  cfg.seed = 77;
  const SampleMatrix a = run(m, d, cfg), b = run(m, d, cfg);
  EXPECT_EQ(a.values(), b.values());
  cfg.threads = 3;
  const SampleMatrix c = run(m, d, cfg);
  EXPECT_EQ(a.values(), c.values());
  cfg.seed = 78;
  EXPECT_NE(a.values(), run(m, d, cfg).values());
}

TEST(Gibbs, EveryDrawInDomain) {
  for (const auto& name : model_names()) {
    const ModelSpec m = make_model(name);
    RngStream r(5, 0);
    std::vector<double> truth;
    if (name == "normal") truth = {1.0, 2.0};
    if (name == "pareto") truth = {3.0, 2.0};
    if (name == "quadreg") truth = {1.0, -0.5, 0.8, 0.3};
    if (name == "gamma") truth = {2.0, 0.5};
    if (name == "beta") truth = {8.0, 3.0};
    if (name == "behrens_fisher") truth = {0.0, 1.0, 1.0, 4.0};
    if (name == "bivariate_normal") truth = {0.0, 0.0, 1.0, 1.0, 0.8};
    ASSERT_EQ(truth.size(), m.k()) << name;
    const Dataset d = m.simulate(truth, 40, r);
    ChainConfig cfg;
    cfg.m = 400;
    cfg.b = 100;
    cfg.chains = 2;
    cfg.seed = 11;
    const SampleMatrix s = run(m, d, cfg);
    for (std::size_t c = 0; c < s.chains(); ++c) {
      for (std::size_t i = 0; i < s.m(); ++i) {
        ASSERT_TRUE(m.in_domain(s.row(c, i), d)) << name << " chain " << c << " cycle " << i;
      }
    }
  }
}

TEST(Gibbs, NormalMeanMarginalIsStudentT) {
  const ModelSpec m = models::make_normal_model();
  const Dataset d = small_normal();
  ChainConfig cfg;
  cfg.m = 20500;
  cfg.b = 500;
  cfg.chains = 2;
  cfg.seed = 2024;
  const SampleMatrix s = run(m, d, cfg);
  std::vector<double> mu;
  for (std::size_t c = 0; c < 2; ++c) {
    const auto v = s.chain_values(c, 0);
    for (std::size_t i = 0; i < v.size(); i += 4) mu.push_back(v[i]);
  }
  const double xbar = d.sx().mean, se = std::sqrt(d.sx().centred_ss / 9.0 / 10.0);
  const boost::math::students_t t(9.0);
  const auto ks = oracle::ks_one_sample(mu, [&](double v) { return boost::math::cdf(t, (v - xbar) / se); });
  EXPECT_GT(ks.p, 1e-3) << "D=" << ks.d;
  const Estimate e = estimate([](ParamView th) { return th[0]; }, s);
  EXPECT_LT(std::abs(e.value - xbar), 4.0 * e.se);
  EXPECT_EQ(e.n, 40000u);
}

TEST(Gibbs, EstimateOnFixedMatrix) {
  ChainConfig cfg;
  cfg.m = 3;
  cfg.b = 0;
  SampleMatrix s({"a"}, cfg);
  s.at(0, 0, 0) = 1.0;
  s.at(0, 1, 0) = 2.0;
  s.at(0, 2, 0) = 3.0;
  const Estimate e = estimate([](ParamView th) { return th[0]; }, s);
  EXPECT_DOUBLE_EQ(e.value, 2.0);
  EXPECT_EQ(e.n, 3u);
  EXPECT_DOUBLE_EQ(e.se, 1.0 / std::sqrt(3.0));

  cfg.m = 200;
  cfg.b = 20;
  cfg.chains = 2;
  SampleMatrix k({"a"}, cfg);
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < 200; ++i) k.at(c, i, 0) = i < 20 ? 99.0 : 4.5;
  const Estimate ek = estimate([](ParamView th) { return th[0]; }, k);
  EXPECT_EQ(ek.value, 4.5);
  EXPECT_EQ(ek.se, 0.0);
}

TEST(Gibbs, ConfigValidation) {
  const ModelSpec m = models::make_normal_model();
  const Dataset d = small_normal();
  ChainConfig cfg;
  cfg.m = 10;
  cfg.b = 10;
  EXPECT_THROW(run(m, d, cfg), DomainError);
  cfg.b = 0;
  cfg.scan_order = {"mu", "mu"};
  EXPECT_THROW(run(m, d, cfg), DomainError);
  cfg.scan_order = {"mu"};
  EXPECT_THROW(run(m, d, cfg), DomainError);
  cfg.scan_order = {"sigma2", "mu"};
  EXPECT_NO_THROW(run(m, d, cfg));
  cfg.init = {{0.0, -1.0}};
  EXPECT_THROW(run(m, d, cfg), DomainError);
  cfg.init = {{0.0, 1.0}, {0.0, 1.0}};
  EXPECT_THROW(run(m, d, cfg), DomainError);
  ChainConfig flat;
  flat.m = 5;
  flat.b = 0;
  EXPECT_THROW(run(m, Dataset::univariate({2.0, 2.0, 2.0}), flat), DegenerateDataError);
}

TEST(Gibbs, ScanOrderChangesDraws) {
  const ModelSpec m = models::make_normal_model();
  const Dataset d = small_normal();
  ChainConfig cfg;
  cfg.m = 50;
  cfg.b = 0;
  cfg.seed = 1;
  const SampleMatrix a = run(m, d, cfg);
  cfg.scan_order = {"sigma2", "mu"};
  const SampleMatrix b = run(m, d, cfg);
  EXPECT_NE(a.values(), b.values());
  EXPECT_EQ(b.config().scan_order, (std::vector<std::string>{"sigma2", "mu"}));
}

TEST(Gibbs, FailureCarriesChainCycleAndState) {
  const ModelSpec m = models::make_normal_model();
  const Dataset d = small_normal();
  ChainConfig cfg;
  cfg.m = 10;
  cfg.b = 0;
  cfg.init = {{1.0, 1.0}};
  int calls = 0;
  const PrimaryDrawer broken = [&](const StructuralEquation& eq, RngStream& rng) {
    ++calls;
    return calls == 8 ? -1.0 : sample(eq.gamma_dist, rng);
  };
  try {
    run(m, d, cfg, broken);
    FAIL() << "expected StructuralError";
  } catch (const StructuralError& e) {
    EXPECT_EQ(e.param(), "sigma2");
    EXPECT_EQ(e.chain, 0);
    EXPECT_EQ(e.cycle, 3);
    EXPECT_EQ(e.primary(), -1.0);
    ASSERT_EQ(e.state.size(), 2u);
    EXPECT_GT(e.state[1], 0.0);
  }
}

TEST(Gibbs, WarnsForNarrowedEquations) {
  const ModelSpec m = models::make_gamma_model();
  RngStream r(9, 0);
  const Dataset d = m.simulate(std::vector<double>{2.0, 0.5}, 20, r);
  ChainConfig cfg;
  cfg.m = 100;
  cfg.b = 10;
  const SampleMatrix s = run(m, d, cfg);
  ASSERT_FALSE(s.warnings().empty());
  EXPECT_EQ(s.narrowed_draws()[m.index_of("alpha")], 100u);
  EXPECT_EQ(s.narrowed_draws()[m.index_of("beta")], 0u);
}
