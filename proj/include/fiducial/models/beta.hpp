#pragma once

// Beta sample with unknown shapes alpha and beta, both conditionals from the
// normal approximation to sum log x_i and sum log(1 - x_i).

#include <cmath>
#include <utility>
#include <vector>

#include "fiducial/model.hpp"
#include "fiducial/models/common.hpp"
#include "fiducial/specfun.hpp"

namespace fiducial::models {

/// q = n (psi(a) - psi(a + other)) + sqrt(n (psi'(a) - psi'(a + other))) Gamma,
/// solved for a. Shared by both beta shapes; the pivot tends to sqrt(n) as a -> 0.
inline StructuralEquation beta_shape_equation(double other, std::size_t n) {
  detail::positive_or_throw(other, "beta shape equation: other shape");
  const double dn = static_cast<double>(n);
  StructuralEquation eq;
  eq.theta_domain = Interval::positive();
  eq.approximate = true;
  set_truncated_normal_primary(eq, -INFINITY, std::sqrt(dn));
  auto moments = [=](double a) {
    const double mean = dn * (specfun::digamma(a) - specfun::digamma(a + other));
    const double var = dn * (specfun::trigamma(a) - specfun::trigamma(a + other));
    return std::pair{mean, var};
  };
  eq.phi = [=](double g, double a) {
    const auto [mean, var] = moments(a);
    return mean + g * std::sqrt(var);
  };
  eq.invert = [phi = eq.phi](double q, double g) {
    return specfun::solve_monotone_positive([&](double a) { return phi(g, a); }, q, 1e-10);
  };
  eq.pivot = [=](double q, double a) {
    const auto [mean, var] = moments(a);
    return (q - mean) / std::sqrt(var);
  };
  return eq;
}

namespace beta_detail {

inline void require_unit_interval(const Dataset& d) {
  if (!(d.sx().min > 0.0) || !(d.sx().max < 1.0)) {
    throw DomainError("beta: observations must lie strictly inside (0, 1)");
  }
}

}  // namespace beta_detail

/// Draw of alpha | beta, x using the statistic sum log x_i.
inline double beta_conditional_alpha_draw(double beta, const Dataset& data, RngStream& rng) {
  beta_detail::require_unit_interval(data);
  const StructuralEquation eq = beta_shape_equation(beta, data.n());
  ConditionalFiducialSampler tag;
  tag.target = "alpha";
  return draw_with_primary(tag, eq, data.sx().sum_log, sample(eq.gamma_dist, rng));
}

/// Draw of beta | alpha, x using the statistic sum log(1 - x_i).
inline double beta_conditional_beta_draw(double alpha, const Dataset& data, RngStream& rng) {
  beta_detail::require_unit_interval(data);
  const StructuralEquation eq = beta_shape_equation(alpha, data.n());
  ConditionalFiducialSampler tag;
  tag.target = "beta";
  return draw_with_primary(tag, eq, data.sx().sum_log1m, sample(eq.gamma_dist, rng));
}

inline ModelSpec make_beta_model() {
  ModelSpec m;
  m.name = "beta";
  m.layout = Layout::univariate;
  m.params = {{"alpha", Interval::positive()}, {"beta", Interval::positive()}};

  ConditionalFiducialSampler alpha;
  alpha.target = "alpha";
  alpha.index = 0;
  alpha.statistic = {"sum log x", [](const Dataset& d, ParamView) { return d.sx().sum_log; }};
  alpha.equation = [](const Dataset& d, ParamView th) { return beta_shape_equation(th[1], d.n()); };

  ConditionalFiducialSampler beta;
  beta.target = "beta";
  beta.index = 1;
  beta.statistic = {"sum log(1 - x)", [](const Dataset& d, ParamView) { return d.sx().sum_log1m; }};
  beta.equation = [](const Dataset& d, ParamView th) { return beta_shape_equation(th[0], d.n()); };

  m.conditionals = {alpha, beta};
  m.validate_data = [](const Dataset& d) {
    detail::require_layout(d, Layout::univariate, "beta");
    detail::require_n(d, 2, "beta");
    beta_detail::require_unit_interval(d);
    if (!(d.sx().max > d.sx().min)) throw DegenerateDataError("beta: all observations are equal");
  };
  m.simulate = [](ParamView th, std::size_t n, RngStream& rng) {
    const Dist ga = dist::Gamma{detail::positive_or_throw(th[0], "beta: alpha"), 1.0};
    const Dist gb = dist::Gamma{detail::positive_or_throw(th[1], "beta: beta"), 1.0};
    std::vector<double> x(n);
    for (auto& v : x) {
      do {
        const double a = sample(ga, rng);
        v = a / (a + sample(gb, rng));
      } while (!(v > 0.0 && v < 1.0));
    }
    return Dataset::univariate(std::move(x));
  };
  m.default_init = [](const Dataset& d) {
    const double mean = d.sx().mean;
    const double var = d.sx().centred_ss / static_cast<double>(d.n() - 1);
    const double common = mean * (1.0 - mean) / var - 1.0;
    if (!(common > 0.0)) return std::vector<double>{1.0, 1.0};
    return std::vector<double>{mean * common, (1.0 - mean) * common};
  };
  m.jitter_init = [](const Dataset&, ParamView base, RngStream& rng) {
    const Dist z = dist::Normal{0.0, 1.0};
    return std::vector<double>{base[0] * std::exp(0.5 * sample(z, rng)), base[1] * std::exp(0.5 * sample(z, rng))};
  };
  return m;
}

}  // namespace fiducial::models
