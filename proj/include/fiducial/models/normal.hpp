#pragma once

// Normal sample with unknown mean and variance.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "fiducial/model.hpp"
#include "fiducial/models/common.hpp"

namespace fiducial::models {

/// mu | sigma^2, x ~ N(x_bar, sigma^2 / n).
inline Dist normal_conditional_mu(double x_bar, double sigma2, std::size_t n) {
  if (n < 1) throw DomainError("normal_conditional_mu: n must be at least 1");
  detail::positive_or_throw(sigma2, "normal_conditional_mu: sigma^2");
  return dist::Normal{x_bar, sigma2 / static_cast<double>(n)};
}

/// sigma_hat^2 = (1/n) sum (x_i - mu)^2.
inline double normal_sigma2_hat(double mu, const Dataset& data) {
  return data.sx().ss_about(mu) / static_cast<double>(data.n());
}

/// sigma^2 | mu, x ~ Scale-inv-chi^2(n, sigma_hat^2).
inline Dist normal_conditional_sigma2(double mu, const Dataset& data) {
  if (data.n() < 1) throw DomainError("normal_conditional_sigma2: empty data");
  const double s2 = normal_sigma2_hat(mu, data);
  if (!(s2 > 0.0)) {
    throw DegenerateDataError("normal_conditional_sigma2: every observation equals mu, sigma_hat^2 = 0");
  }
  return dist::ScaledInvChiSquare{static_cast<double>(data.n()), s2};
}

/// Marginal fiducial distribution of mu: t_{n-1}(x_bar, s / sqrt(n)).
inline Dist normal_marginal_mu(const Dataset& data) {
  const std::size_t n = data.n();
  if (n < 2) throw DomainError("normal_marginal_mu: need at least 2 observations");
  const double s2 = data.sx().centred_ss / static_cast<double>(n - 1);
  if (!(s2 > 0.0)) throw DegenerateDataError("normal_marginal_mu: sample standard deviation is zero");
  return dist::StudentT{static_cast<double>(n - 1), data.sx().mean,
                        std::sqrt(s2 / static_cast<double>(n))};
}

/// Which one-to-one version of the mean statistic the mu conditional uses.
enum class MeanStatistic { mean, sum };

/// x_bar = mu + (sigma / sqrt(n)) Gamma, or equivalently sum x = n mu + sigma sqrt(n) Gamma.
inline StructuralEquation normal_mu_equation(double sigma2, std::size_t n,
                                             MeanStatistic stat = MeanStatistic::mean) {
  detail::positive_or_throw(sigma2, "normal mean equation: sigma^2");
  const double dn = static_cast<double>(n);
  if (stat == MeanStatistic::sum) return affine_normal_equation(0.0, dn, std::sqrt(sigma2 * dn));
  return affine_normal_equation(0.0, 1.0, std::sqrt(sigma2 / dn));
}

inline ConditionalFiducialSampler normal_mu_sampler(std::size_t mu_index, std::size_t sigma2_index,
                                                    MeanStatistic stat = MeanStatistic::mean,
                                                    std::string label = "mu") {
  ConditionalFiducialSampler s;
  s.target = std::move(label);
  s.index = mu_index;
  if (stat == MeanStatistic::sum) {
    s.statistic = {"sum x", [](const Dataset& d, ParamView) { return d.sx().sum; }};
  } else {
    s.statistic = {"x_bar", [](const Dataset& d, ParamView) { return d.sx().mean; }};
  }
  s.equation = [sigma2_index, stat](const Dataset& d, ParamView th) {
    return normal_mu_equation(th[sigma2_index], d.n(), stat);
  };
  return s;
}

inline ConditionalFiducialSampler normal_sigma2_sampler(std::size_t mu_index, std::size_t sigma2_index,
                                                        std::string label = "sigma2") {
  ConditionalFiducialSampler s;
  s.target = std::move(label);
  s.index = sigma2_index;
  s.statistic = {"sigma_hat^2", [mu_index](const Dataset& d, ParamView th) {
                   const double v = normal_sigma2_hat(th[mu_index], d);
                   if (!(v > 0.0)) {
                     throw DegenerateDataError("normal variance statistic: every observation equals mu");
                   }
                   return v;
                 }};
  s.equation = [](const Dataset& d, ParamView) {
    return scaled_chi2_equation(static_cast<double>(d.n()));
  };
  return s;
}

/// log of sigma^{-(n+2)} exp(-sum (x_i - mu)^2 / (2 sigma^2)), theta = (mu, sigma^2).
inline double normal_joint_kernel(double mu, double sigma2, const ColumnSummary& s) {
  if (!(sigma2 > 0.0)) return -INFINITY;
  const double n = static_cast<double>(s.n);
  return -0.5 * (n + 2.0) * std::log(sigma2) - 0.5 * s.ss_about(mu) / sigma2;
}

inline ModelSpec make_normal_model() {
  ModelSpec m;
  m.name = "normal";
  m.layout = Layout::univariate;
  m.params = {{"mu", Interval::real_line()}, {"sigma2", Interval::positive()}};
  m.conditionals = {normal_mu_sampler(0, 1), normal_sigma2_sampler(0, 1)};
  m.printed_log_density = {
      [](const Dataset& d, ParamView th, double v) {
        return log_density(normal_conditional_mu(d.sx().mean, th[1], d.n()), v);
      },
      [](const Dataset& d, ParamView th, double v) {
        return log_density(normal_conditional_sigma2(th[0], d), v);
      }};
  m.joint_kernel = [](ParamView th, const Dataset& d) { return normal_joint_kernel(th[0], th[1], d.sx()); };
  m.validate_data = [](const Dataset& d) {
    detail::require_layout(d, Layout::univariate, "normal");
    detail::require_n(d, 2, "normal");
    if (!(d.sx().centred_ss > 0.0)) throw DegenerateDataError("normal: all observations are equal");
  };
  m.simulate = [](ParamView th, std::size_t n, RngStream& rng) {
    const Dist g = dist::Normal{th[0], detail::positive_or_throw(th[1], "normal: sigma^2")};
    std::vector<double> x(n);
    for (auto& v : x) v = sample(g, rng);
    return Dataset::univariate(std::move(x));
  };
  m.default_init = [](const Dataset& d) {
    return std::vector<double>{d.sx().mean, d.sx().centred_ss / static_cast<double>(d.n() - 1)};
  };
  m.jitter_init = [](const Dataset& d, ParamView base, RngStream& rng) {
    const Dist z = dist::Normal{0.0, 1.0};
    const double se = std::sqrt(base[1] / static_cast<double>(d.n()));
    return std::vector<double>{base[0] + 2.0 * se * sample(z, rng), base[1] * std::exp(0.5 * sample(z, rng))};
  };
  return m;
}

}  // namespace fiducial::models
