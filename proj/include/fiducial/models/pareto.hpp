#pragma once

// Pareto sample with unknown shape alpha and scale beta.

#include <cmath>
#include <limits>
#include <vector>

#include "fiducial/model.hpp"
#include "fiducial/models/common.hpp"

namespace fiducial::models {

namespace pareto_detail {

inline double require_positive_data(const Dataset& d) {
  if (!(d.sx().min > 0.0)) throw DomainError("pareto: observations must be positive");
  return d.sx().sum_log;
}

}  // namespace pareto_detail

/// alpha | beta, x ~ Gamma(n, sum (log x_i - log beta)).
inline Dist pareto_conditional_alpha(double beta, const Dataset& data) {
  detail::positive_or_throw(beta, "pareto_conditional_alpha: beta");
  const double sum_log = pareto_detail::require_positive_data(data);
  const double rate = sum_log - static_cast<double>(data.n()) * std::log(beta);
  if (!(rate > 0.0)) {
    throw DomainError("pareto_conditional_alpha: sum(log x_i - log beta) must be positive; need beta < min(x)");
  }
  return dist::Gamma{static_cast<double>(data.n()), rate};
}

/// sum log x = Gamma / alpha + n log beta with Gamma ~ Gamma(n, 1).
inline StructuralEquation pareto_alpha_equation(double beta, std::size_t n) {
  detail::positive_or_throw(beta, "pareto alpha equation: beta");
  const double dn = static_cast<double>(n);
  const double shift = dn * std::log(beta);
  StructuralEquation eq;
  eq.gamma_dist = dist::Gamma{dn, 1.0};
  eq.gamma_domain = Interval::positive();
  eq.theta_domain = Interval::positive();
  eq.phi = [=](double g, double a) { return g / a + shift; };
  eq.invert = [=](double q, double g) {
    if (!(q - shift > 0.0)) {
      throw BracketError("pareto alpha equation: sum log x - n log beta is not positive");
    }
    return g / (q - shift);
  };
  eq.pivot = [=](double q, double a) { return a * (q - shift); };
  return eq;
}

/// min(x) = exp(Gamma / (n alpha) + log beta) with Gamma ~ Exponential(1).
inline StructuralEquation pareto_beta_equation(double alpha, std::size_t n, double min_x) {
  detail::positive_or_throw(alpha, "pareto beta equation: alpha");
  const double na = static_cast<double>(n) * alpha;
  StructuralEquation eq;
  eq.gamma_dist = dist::Exponential{1.0};
  eq.gamma_domain = {0.0, INFINITY, true, false};
  eq.theta_domain = {0.0, min_x, false, true};
  eq.phi = [=](double g, double b) { return std::exp(g / na + std::log(b)); };
  eq.invert = [=](double q, double g) { return q * std::exp(-g / na); };
  eq.pivot = [=](double q, double b) { return na * (std::log(q) - std::log(b)); };
  return eq;
}

/// Draw of beta | alpha, x: min(x) exp(-gamma / (n alpha)), gamma ~ Exponential(1).
inline double pareto_conditional_beta_draw(double alpha, const Dataset& data, RngStream& rng) {
  pareto_detail::require_positive_data(data);
  const StructuralEquation eq = pareto_beta_equation(alpha, data.n(), data.sx().min);
  return eq.invert(data.sx().min, sample(eq.gamma_dist, rng));
}

/// (n alpha / beta) exp(-n alpha (log min(x) - log beta)) on (0, min(x)].
inline double pareto_beta_log_density(double alpha, const Dataset& data, double beta) {
  const double min_x = data.sx().min;
  if (!(beta > 0.0) || beta > min_x) return -std::numeric_limits<double>::infinity();
  const double na = static_cast<double>(data.n()) * alpha;
  return std::log(na / beta) - na * (std::log(min_x) - std::log(beta));
}

/// log of alpha^{n-1} beta^{n alpha - 1} prod x_i^{-(alpha+1)}.
inline double pareto_joint_kernel(double alpha, double beta, const Dataset& data) {
  if (!(alpha > 0.0) || !(beta > 0.0) || beta > data.sx().min) {
    return -std::numeric_limits<double>::infinity();
  }
  const double n = static_cast<double>(data.n());
  return (n - 1.0) * std::log(alpha) + (n * alpha - 1.0) * std::log(beta) - (alpha + 1.0) * data.sx().sum_log;
}

inline ModelSpec make_pareto_model() {
  ModelSpec m;
  m.name = "pareto";
  m.layout = Layout::univariate;
  m.params = {{"alpha", Interval::positive()}, {"beta", Interval::positive()}};

  ConditionalFiducialSampler alpha;
  alpha.target = "alpha";
  alpha.index = 0;
  alpha.statistic = {"sum log x", [](const Dataset& d, ParamView) { return d.sx().sum_log; }};
  alpha.equation = [](const Dataset& d, ParamView th) { return pareto_alpha_equation(th[1], d.n()); };

  ConditionalFiducialSampler beta;
  beta.target = "beta";
  beta.index = 1;
  beta.statistic = {"min x", [](const Dataset& d, ParamView) { return d.sx().min; }};
  beta.equation = [](const Dataset& d, ParamView th) {
    return pareto_beta_equation(th[0], d.n(), d.sx().min);
  };
  m.conditionals = {alpha, beta};
  m.printed_log_density = {
      [](const Dataset& d, ParamView th, double v) {
        return log_density(pareto_conditional_alpha(th[1], d), v);
      },
      [](const Dataset& d, ParamView th, double v) { return pareto_beta_log_density(th[0], d, v); }};
  m.joint_kernel = [](ParamView th, const Dataset& d) { return pareto_joint_kernel(th[0], th[1], d); };
  m.validate_data = [](const Dataset& d) {
    detail::require_layout(d, Layout::univariate, "pareto");
    detail::require_n(d, 2, "pareto");
    pareto_detail::require_positive_data(d);
    if (!(d.sx().max > d.sx().min)) throw DegenerateDataError("pareto: all observations are equal");
  };
  m.extra_domain = [](ParamView th, const Dataset& d) { return th[1] <= d.sx().min; };
  m.simulate = [](ParamView th, std::size_t n, RngStream& rng) {
    const double a = detail::positive_or_throw(th[0], "pareto: alpha");
    const double b = detail::positive_or_throw(th[1], "pareto: beta");
    std::vector<double> x(n);
    for (auto& v : x) v = b * std::pow(rng.uniform(), -1.0 / a);
    return Dataset::univariate(std::move(x));
  };
  m.default_init = [](const Dataset& d) {
    const double n = static_cast<double>(d.n());
    const double min_x = d.sx().min;
    const double a_mle = n / (d.sx().sum_log - n * std::log(min_x));
    const double b0 = min_x * std::exp(-1.0 / (n * a_mle));
    const double a0 = n / (d.sx().sum_log - n * std::log(b0));
    return std::vector<double>{a0, b0};
  };
  m.jitter_init = [](const Dataset& d, ParamView base, RngStream& rng) {
    const double n = static_cast<double>(d.n());
    const double a = base[0] * std::exp(0.5 * sample(dist::Normal{0.0, 1.0}, rng));
    const double b = d.sx().min * std::exp(-2.0 * sample(dist::Exponential{1.0}, rng) / (n * base[0]));
    return std::vector<double>{a, b};
  };
  return m;
}

}  // namespace fiducial::models
