#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fiducial/catalog.hpp"
#include "fiducial/compat.hpp"

using namespace fiducial;

namespace {

Dataset sample_for(const ModelSpec& m, std::vector<double> truth, std::size_t n) {
  RngStream rng(17, 0);
  return m.simulate(truth, n, rng);
}

struct Case {
  const char* name;
  std::vector<double> truth;
};

const std::vector<Case> kClosedForm{{"normal", {1.0, 2.0}},
                                    {"pareto", {3.0, 2.0}},
                                    {"quadreg", {1.0, -0.5, 0.8, 0.3}},
                                    {"behrens_fisher", {0.0, 1.0, 1.0, 4.0}}};

}  // namespace

TEST(Compat, ClosedFormKernelsAreCompatible) {
  for (const auto& c : kClosedForm) {
    const ModelSpec m = make_model(c.name);
    const Dataset d = sample_for(m, c.truth, 30);
    const auto reports = check_model(m, d);
    ASSERT_EQ(reports.size(), m.k()) << c.name;
    for (const auto& r : reports) {
      EXPECT_EQ(r.verdict, Verdict::compatible) << c.name << " " << r.param << " spread " << r.log_ratio_spread;
      EXPECT_LE(r.log_ratio_spread, 1e-8);
      EXPECT_FALSE(r.approximate);
      ASSERT_EQ(r.slices.size(), 3u);
      for (const auto& s : r.slices) EXPECT_EQ(s.grid.size(), 64u);
    }
  }
}

TEST(Compat, PerturbedConditionalIsIncompatible) {
  for (const auto& c : kClosedForm) {
    const ModelSpec m = make_model(c.name);
    const Dataset d = sample_for(m, c.truth, 30);
    const auto slices = default_slices(m, d);
    for (std::size_t j = 0; j < m.k(); ++j) {
      const JointKernel joint = [&](ParamView th) { return m.joint_kernel(th, d) + 0.1 * th[j] * th[j]; };
      const ConditionalLogDensity cond = [&](double v, ParamView th) {
        return conditional_density(m, d, th, j).log_density(v);
      };
      std::vector<std::vector<double>> grids;
      for (const auto& s : slices) grids.push_back(central_grid(conditional_density(m, d, s, j).quantile));
      const CompatReport r = ratio_constancy(joint, cond, j, slices, grids, 1e-8);
      EXPECT_EQ(r.verdict, Verdict::incompatible) << c.name << " " << j;
    }
  }
}

TEST(Compat, DetectsPerturbationAtTenTimesTolerance) {
  const ModelSpec m = models::make_normal_model();
  const Dataset d = sample_for(m, {1.0, 2.0}, 30);
  const auto slices = default_slices(m, d);
  const double tol = 1e-8;
  for (std::size_t j = 0; j < 2; ++j) {
    std::vector<std::vector<double>> grids;
    for (const auto& s : slices) grids.push_back(central_grid(conditional_density(m, d, s, j).quantile));
    const ConditionalLogDensity cond = [&](double v, ParamView th) {
      return conditional_density(m, d, th, j).log_density(v);
    };
    // Log-amplitude exactly 10 tol over each slice's grid.
    for (auto shape : {0, 1}) {
      const JointKernel joint = [&](ParamView th) {
        double lo = 0, hi = 1;
        for (std::size_t s = 0; s < slices.size(); ++s) {
          if (slices[s][1 - j] == th[1 - j]) lo = grids[s].front(), hi = grids[s].back();
        }
        const double u = (th[j] - lo) / (hi - lo);
        const double f = shape == 0 ? u : std::sin(3.14159 * u);
        return m.joint_kernel(th, d) + 10.0 * tol * f;
      };
      const CompatReport r = ratio_constancy(joint, cond, j, slices, grids, tol);
      EXPECT_EQ(r.verdict, Verdict::incompatible) << j << " " << shape << " " << r.log_ratio_spread;
    }
  }
}

TEST(Compat, SupportMismatch) {
  const ModelSpec m = models::make_pareto_model();
  const Dataset d = sample_for(m, {3.0, 2.0}, 30);
  const auto slices = default_slices(m, d);
  // A conditional for beta with positive density beyond min(x), where the kernel is zero.
  const ConditionalLogDensity wide = [&](double v, ParamView) { return log_density(dist::Normal{d.sx().min, 1.0}, v); };
  std::vector<double> grid;
  for (int i = 0; i < 40; ++i) grid.push_back(d.sx().min - 1.0 + 2.0 * i / 39.0);
  const JointKernel joint = [&](ParamView th) { return m.joint_kernel(th, d); };
  const CompatReport r = ratio_constancy(joint, wide, 1, slices, grid, 1e-8);
  EXPECT_EQ(r.verdict, Verdict::support_mismatch);
}

TEST(Compat, Preconditions) {
  const JointKernel joint = [](ParamView th) { return -th[0] * th[0]; };
  const ConditionalLogDensity cond = [](double v, ParamView) { return -v * v; };
  const std::vector<double> grid(20, 0.0);
  const std::vector<std::vector<double>> two{{0.0}, {1.0}}, three{{0.0}, {1.0}, {2.0}};
  EXPECT_THROW(ratio_constancy(joint, cond, 0, two, grid, 1e-8), DomainError);
  EXPECT_THROW(ratio_constancy(joint, cond, 0, three, std::vector<double>(19, 0.0), 1e-8), DomainError);
  EXPECT_THROW(ratio_constancy(joint, cond, 1, three, grid, 1e-8), DomainError);
  EXPECT_EQ(ratio_constancy(joint, cond, 0, three, grid, 1e-8).verdict, Verdict::compatible);
}

TEST(Compat, NonFiniteIsInconclusive) {
  const JointKernel joint = [](ParamView th) { return th[0] > 0.5 ? NAN : 0.0; };
  const ConditionalLogDensity cond = [](double, ParamView) { return 0.0; };
  std::vector<double> grid;
  for (int i = 0; i < 20; ++i) grid.push_back(i / 19.0);
  const CompatReport r = ratio_constancy(joint, cond, 0, {{0.0}, {0.0}, {0.0}}, grid, 1e-8);
  EXPECT_EQ(r.verdict, Verdict::inconclusive);
}

TEST(Compat, ModelsWithoutKernelAreInconclusive) {
  for (const char* name : {"gamma", "beta", "bivariate_normal"}) {
    const ModelSpec m = make_model(name);
    const auto r = check_model(m, Dataset::univariate({0.2, 0.4, 0.5}), std::vector<std::vector<double>>{});
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].verdict, Verdict::inconclusive) << name;
  }
}

TEST(Compat, CentralGridSpansNinetyNinePercent) {
  const Dist z = dist::Normal{0.0, 1.0};
  const auto g = central_grid([&](double p) { return quantile(z, p); });
  ASSERT_EQ(g.size(), 64u);
  EXPECT_NEAR(g.front(), -2.5758293035489, 1e-9);
  EXPECT_NEAR(g.back(), 2.5758293035489, 1e-9);
}
