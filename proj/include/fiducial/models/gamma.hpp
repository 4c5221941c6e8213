#pragma once

// Gamma sample with unknown shape alpha and rate beta.
//
// The shape conditional uses the normal approximation to sum log x_i,
// whose mean and variance are n (psi(alpha) - log beta) and n psi'(alpha).

#include <cmath>
#include <vector>

#include "fiducial/model.hpp"
#include "fiducial/models/common.hpp"
#include "fiducial/specfun.hpp"

namespace fiducial::models {

/// beta | alpha, x ~ Gamma(n alpha, sum x_i).
inline Dist gamma_conditional_beta(double alpha, const Dataset& data) {
  detail::positive_or_throw(alpha, "gamma_conditional_beta: alpha");
  if (!(data.sx().sum > 0.0)) throw DomainError("gamma_conditional_beta: sum of observations must be positive");
  return dist::Gamma{static_cast<double>(data.n()) * alpha, data.sx().sum};
}

/// sum x = Gamma / beta with Gamma ~ Gamma(n alpha, 1).
inline StructuralEquation gamma_beta_equation(double alpha, std::size_t n) {
  detail::positive_or_throw(alpha, "gamma rate equation: alpha");
  StructuralEquation eq;
  eq.gamma_dist = dist::Gamma{static_cast<double>(n) * alpha, 1.0};
  eq.gamma_domain = Interval::positive();
  eq.theta_domain = Interval::positive();
  eq.phi = [](double g, double b) { return g / b; };
  eq.invert = [](double q, double g) { return g / q; };
  eq.pivot = [](double q, double b) { return b * q; };
  return eq;
}

/// sum log x = n (psi(alpha) - log beta) + Gamma sqrt(n psi'(alpha)), Gamma ~ N(0,1)
/// truncated to [-5, 5].
///
/// For fixed q the pivot (q - mean(alpha)) / sd(alpha) decreases from sqrt(n)
/// (alpha -> 0) to -infinity, so values of Gamma at or above sqrt(n) have no
/// solution. When sqrt(n) < 5 the upper truncation point is lowered to sqrt(n)
/// and the equation is flagged as narrowed.
inline StructuralEquation gamma_alpha_equation(double beta, std::size_t n) {
  detail::positive_or_throw(beta, "gamma shape equation: beta");
  const double dn = static_cast<double>(n);
  const double log_beta = std::log(beta);
  StructuralEquation eq;
  eq.theta_domain = Interval::positive();
  eq.approximate = true;
  set_truncated_normal_primary(eq, -INFINITY, std::sqrt(dn));
  eq.phi = [=](double g, double a) {
    return dn * (specfun::digamma(a) - log_beta) + g * std::sqrt(dn * specfun::trigamma(a));
  };
  eq.invert = [phi = eq.phi](double q, double g) {
    return specfun::solve_monotone_positive([&](double a) { return phi(g, a); }, q, 1e-10);
  };
  eq.pivot = [=](double q, double a) {
    return (q - dn * (specfun::digamma(a) - log_beta)) / std::sqrt(dn * specfun::trigamma(a));
  };
  return eq;
}

/// Draw of alpha | beta, x.
inline double gamma_conditional_alpha_draw(double beta, const Dataset& data, RngStream& rng) {
  if (!std::isfinite(data.sx().sum_log)) throw DomainError("gamma: observations must be positive");
  const StructuralEquation eq = gamma_alpha_equation(beta, data.n());
  ConditionalFiducialSampler tag;
  tag.target = "alpha";
  return draw_with_primary(tag, eq, data.sx().sum_log, sample(eq.gamma_dist, rng));
}

inline ModelSpec make_gamma_model() {
  ModelSpec m;
  m.name = "gamma";
  m.layout = Layout::univariate;
  m.params = {{"alpha", Interval::positive()}, {"beta", Interval::positive()}};

  ConditionalFiducialSampler alpha;
  alpha.target = "alpha";
  alpha.index = 0;
  alpha.statistic = {"sum log x", [](const Dataset& d, ParamView) { return d.sx().sum_log; }};
  alpha.equation = [](const Dataset& d, ParamView th) { return gamma_alpha_equation(th[1], d.n()); };

  ConditionalFiducialSampler beta;
  beta.target = "beta";
  beta.index = 1;
  beta.statistic = {"sum x", [](const Dataset& d, ParamView) { return d.sx().sum; }};
  beta.equation = [](const Dataset& d, ParamView th) { return gamma_beta_equation(th[0], d.n()); };

  m.conditionals = {alpha, beta};
  m.printed_log_density = {
      {},
      [](const Dataset& d, ParamView th, double v) { return log_density(gamma_conditional_beta(th[0], d), v); }};
  m.validate_data = [](const Dataset& d) {
    detail::require_layout(d, Layout::univariate, "gamma");
    detail::require_n(d, 2, "gamma");
    if (!(d.sx().min > 0.0)) throw DomainError("gamma: observations must be positive");
    if (!(d.sx().max > d.sx().min)) throw DegenerateDataError("gamma: all observations are equal");
  };
  m.simulate = [](ParamView th, std::size_t n, RngStream& rng) {
    const Dist g = dist::Gamma{detail::positive_or_throw(th[0], "gamma: alpha"),
                               detail::positive_or_throw(th[1], "gamma: beta")};
    std::vector<double> x(n);
    for (auto& v : x) v = sample(g, rng);
    return Dataset::univariate(std::move(x));
  };
  m.default_init = [](const Dataset& d) {
    const double mean = d.sx().mean;
    const double var = d.sx().centred_ss / static_cast<double>(d.n() - 1);
    return std::vector<double>{mean * mean / var, mean / var};
  };
  m.jitter_init = [](const Dataset&, ParamView base, RngStream& rng) {
    const Dist z = dist::Normal{0.0, 1.0};
    return std::vector<double>{base[0] * std::exp(0.5 * sample(z, rng)), base[1] * std::exp(0.5 * sample(z, rng))};
  };
  return m;
}

}  // namespace fiducial::models
