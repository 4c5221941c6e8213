#pragma once

// Bivariate normal sample with all five parameters unknown:
// theta = (mu_x, mu_y, sigma2_x, sigma2_y, rho).
//
// The mean conditionals are exact. The variance and correlation conditionals
// use the statistic "maximum likelihood estimate given the other parameters"
// together with its normal approximation based on the Fisher information.

#include <array>
#include <cmath>
#include <vector>

#include "fiducial/model.hpp"
#include "fiducial/models/common.hpp"
#include "fiducial/specfun.hpp"

namespace fiducial::models {

/// Sums of squares and cross-products about (mu_x, mu_y).
struct BvnCentred {
  double sxx;  // sum (x_i - mu_x)^2
  double syy;  // sum (y_i - mu_y)^2
  double sxy;  // sum (x_i - mu_x)(y_i - mu_y)
  double n;
};

inline BvnCentred bvn_centred(double mu_x, double mu_y, const Dataset& d) {
  return {d.sx().ss_about(mu_x), d.sy().ss_about(mu_y), d.sxy_about(mu_x, mu_y), static_cast<double>(d.n())};
}

namespace bvn_detail {

inline void require_rho(double rho) {
  if (!(std::abs(rho) < 1.0)) throw DomainError("bivariate normal: |rho| must be < 1");
}

}  // namespace bvn_detail

/// Log-likelihood as a function of sigma_self with everything else fixed,
/// up to an additive constant. `ss_self` / `sxy` / `ss_other` are sums about the means.
inline double bvn_loglik_sigma(double sigma_self, double ss_self, double sxy, double ss_other,
                               double sigma_other, double rho, double n) {
  const double q = ss_self / (sigma_self * sigma_self) - 2.0 * rho * sxy / (sigma_self * sigma_other) +
                   ss_other / (sigma_other * sigma_other);
  return -n * std::log(sigma_self) - q / (2.0 * (1.0 - rho * rho));
}

/// Log-likelihood in rho with the means and variances fixed, up to a constant.
inline double bvn_loglik_rho(double rho, const BvnCentred& c, double sigma_x, double sigma_y) {
  const double a = c.sxx / (sigma_x * sigma_x), b = c.syy / (sigma_y * sigma_y), cr = c.sxy / (sigma_x * sigma_y);
  const double om = 1.0 - rho * rho;
  return -0.5 * c.n * std::log(om) - (a - 2.0 * rho * cr + b) / (2.0 * om);
}

/// MLE of sigma_self given the other parameters: the positive root of the
/// stationarity condition n(1 - rho^2) s^2 + rho (sxy / sigma_other) s - ss_self = 0.
inline double bvn_mle_sigma(double ss_self, double sxy, double sigma_other, double rho, double n) {
  bvn_detail::require_rho(rho);
  if (!(ss_self > 0.0)) throw DegenerateDataError("bivariate normal: zero spread about the mean, no variance MLE");
  return specfun::solve_quadratic_positive(n * (1.0 - rho * rho), rho * sxy / sigma_other, -ss_self);
}

/// Coefficients of the cubic whose roots in (-1, 1) are the stationary points
/// of the likelihood in rho:
/// -n r^3 + C r^2 + (n - A - B) r + C with A = sxx/sx^2, B = syy/sy^2, C = sxy/(sx sy).
inline std::array<double, 4> bvn_rho_cubic(const BvnCentred& c, double sigma_x, double sigma_y) {
  const double a = c.sxx / (sigma_x * sigma_x), b = c.syy / (sigma_y * sigma_y), cr = c.sxy / (sigma_x * sigma_y);
  return {-c.n, cr, c.n - a - b, cr};
}

/// MLE of rho given the means and variances (likelihood-maximising root of the cubic).
inline double bvn_mle_rho(const BvnCentred& c, double sigma_x, double sigma_y) {
  return specfun::solve_cubic_in_interval(bvn_rho_cubic(c, sigma_x, sigma_y), {-1.0, 1.0},
                                          [&](double r) { return bvn_loglik_rho(r, c, sigma_x, sigma_y); });
}

/// mu_x | rest ~ N(x_bar + rho (sigma_x / sigma_y)(mu_y - y_bar), sigma_x^2 (1 - rho^2) / n).
inline Dist bvn_conditional_mu_x(double mu_y, double sigma2_x, double sigma2_y, double rho, const Dataset& d) {
  bvn_detail::require_rho(rho);
  detail::positive_or_throw(sigma2_x, "bivariate normal: sigma2_x");
  detail::positive_or_throw(sigma2_y, "bivariate normal: sigma2_y");
  const double n = static_cast<double>(d.n());
  return dist::Normal{d.sx().mean + rho * std::sqrt(sigma2_x / sigma2_y) * (mu_y - d.sy().mean),
                      sigma2_x * (1.0 - rho * rho) / n};
}

/// Mirror of bvn_conditional_mu_x with the roles of x and y exchanged.
inline Dist bvn_conditional_mu_y(double mu_x, double sigma2_x, double sigma2_y, double rho, const Dataset& d) {
  bvn_detail::require_rho(rho);
  detail::positive_or_throw(sigma2_x, "bivariate normal: sigma2_x");
  detail::positive_or_throw(sigma2_y, "bivariate normal: sigma2_y");
  const double n = static_cast<double>(d.n());
  return dist::Normal{d.sy().mean + rho * std::sqrt(sigma2_y / sigma2_x) * (mu_x - d.sx().mean),
                      sigma2_y * (1.0 - rho * rho) / n};
}

/// sum x - rho (sigma_x/sigma_y) sum y = n mu_x - n rho (sigma_x/sigma_y) mu_y + sqrt(n sigma_x^2 (1 - rho^2)) Gamma.
/// With `swap` the roles of x and y are exchanged.
inline StructuralEquation bvn_mean_equation(double mu_other, double sigma2_self, double sigma2_other, double rho,
                                            std::size_t n) {
  bvn_detail::require_rho(rho);
  detail::positive_or_throw(sigma2_self, "bivariate normal: variance");
  detail::positive_or_throw(sigma2_other, "bivariate normal: variance");
  const double dn = static_cast<double>(n);
  const double ratio = std::sqrt(sigma2_self / sigma2_other);
  return affine_normal_equation(-dn * rho * ratio * mu_other, dn, std::sqrt(dn * sigma2_self * (1.0 - rho * rho)));
}

/// Multiplier c = sqrt((1 - rho^2) / (n (2 - rho^2))) in sigma_hat = sigma (1 + c Gamma).
inline double bvn_sigma_noise(double rho, double n) {
  return std::sqrt((1.0 - rho * rho) / (n * (2.0 - rho * rho)));
}

/// sigma_hat^2 = sigma^2 (1 + c Gamma)^2, i.e. sigma^2 = sigma_hat^2 (c Gamma + 1)^{-2}.
///
/// Gamma is truncated to [-5, 5], raised to just above -1/c when that
/// bound is tighter so that sigma^2 stays finite and positive.
inline StructuralEquation bvn_variance_equation(double rho, std::size_t n) {
  bvn_detail::require_rho(rho);
  const double c = bvn_sigma_noise(rho, static_cast<double>(n));
  StructuralEquation eq;
  eq.theta_domain = Interval::positive();
  eq.approximate = true;
  set_truncated_normal_primary(eq, -1.0 / c, INFINITY);
  eq.phi = [c](double g, double s2) {
    const double f = 1.0 + c * g;
    return s2 * f * f;
  };
  eq.invert = [c](double q, double g) {
    const double f = 1.0 + c * g;
    if (!(f > 0.0)) throw BracketError("bivariate normal variance equation: 1 + c*gamma is not positive");
    return q / (f * f);
  };
  eq.pivot = [c](double q, double s2) { return (std::sqrt(q / s2) - 1.0) / c; };
  return eq;
}

/// rho_hat = rho + (1 - rho^2) Gamma / sqrt(n (1 + rho^2)), solved for rho in (-1, 1).
///
/// The right side is strictly increasing in rho whenever |Gamma| <= sqrt(n/2),
/// so Gamma is truncated to [-min(5, sqrt(n/2)), min(5, sqrt(n/2))].
inline StructuralEquation bvn_rho_equation(std::size_t n) {
  const double dn = static_cast<double>(n);
  const double bound = std::sqrt(dn / 2.0);
  StructuralEquation eq;
  eq.theta_domain = Interval::open(-1.0, 1.0);
  eq.approximate = true;
  set_truncated_normal_primary(eq, -bound, bound);
  eq.phi = [dn](double g, double r) { return r + (1.0 - r * r) * g / std::sqrt(dn * (1.0 + r * r)); };
  eq.invert = [phi = eq.phi](double q, double g) {
    if (!(std::abs(q) < 1.0)) throw BracketError("bivariate normal rho equation: |rho_hat| must be < 1");
    return specfun::solve_monotone([&](double r) { return phi(g, r); }, q, {-1.0, 1.0}, 1e-12);
  };
  eq.pivot = [dn](double q, double r) { return (q - r) * std::sqrt(dn * (1.0 + r * r)) / (1.0 - r * r); };
  return eq;
}

/// Draw of sigma_x^2 | mu_x, mu_y, sigma_y^2, rho.
inline double bvn_conditional_sigma_x2_draw(double mu_x, double mu_y, double sigma2_y, double rho, const Dataset& d,
                                            RngStream& rng) {
  const BvnCentred c = bvn_centred(mu_x, mu_y, d);
  const double s = bvn_mle_sigma(c.sxx, c.sxy, std::sqrt(detail::positive_or_throw(sigma2_y, "sigma2_y")), rho, c.n);
  const StructuralEquation eq = bvn_variance_equation(rho, d.n());
  ConditionalFiducialSampler tag;
  tag.target = "sigma2_x";
  return draw_with_primary(tag, eq, s * s, sample(eq.gamma_dist, rng));
}

/// Draw of rho | mu_x, mu_y, sigma_x^2, sigma_y^2.
inline double bvn_conditional_rho_draw(double mu_x, double mu_y, double sigma2_x, double sigma2_y, const Dataset& d,
                                       RngStream& rng) {
  const BvnCentred c = bvn_centred(mu_x, mu_y, d);
  const double rho_hat = bvn_mle_rho(c, std::sqrt(detail::positive_or_throw(sigma2_x, "sigma2_x")),
                                     std::sqrt(detail::positive_or_throw(sigma2_y, "sigma2_y")));
  const StructuralEquation eq = bvn_rho_equation(d.n());
  ConditionalFiducialSampler tag;
  tag.target = "rho";
  return draw_with_primary(tag, eq, rho_hat, sample(eq.gamma_dist, rng));
}

inline ModelSpec make_bivariate_normal_model() {
  ModelSpec m;
  m.name = "bivariate_normal";
  m.layout = Layout::paired;
  m.params = {{"mu_x", Interval::real_line()},
              {"mu_y", Interval::real_line()},
              {"sigma2_x", Interval::positive()},
              {"sigma2_y", Interval::positive()},
              {"rho", Interval::open(-1.0, 1.0)}};

  ConditionalFiducialSampler mx;
  mx.target = "mu_x";
  mx.index = 0;
  mx.statistic = {"sum x - rho (sigma_x/sigma_y) sum y", [](const Dataset& d, ParamView th) {
                    return d.sx().sum - th[4] * std::sqrt(th[2] / th[3]) * d.sy().sum;
                  }};
  mx.equation = [](const Dataset& d, ParamView th) { return bvn_mean_equation(th[1], th[2], th[3], th[4], d.n()); };

  ConditionalFiducialSampler my;
  my.target = "mu_y";
  my.index = 1;
  my.statistic = {"sum y - rho (sigma_y/sigma_x) sum x", [](const Dataset& d, ParamView th) {
                    return d.sy().sum - th[4] * std::sqrt(th[3] / th[2]) * d.sx().sum;
                  }};
  my.equation = [](const Dataset& d, ParamView th) { return bvn_mean_equation(th[0], th[3], th[2], th[4], d.n()); };

  ConditionalFiducialSampler sx;
  sx.target = "sigma2_x";
  sx.index = 2;
  sx.statistic = {"MLE sigma_x^2", [](const Dataset& d, ParamView th) {
                    const BvnCentred c = bvn_centred(th[0], th[1], d);
                    const double s = bvn_mle_sigma(c.sxx, c.sxy, std::sqrt(th[3]), th[4], c.n);
                    return s * s;
                  }};
  sx.equation = [](const Dataset& d, ParamView th) { return bvn_variance_equation(th[4], d.n()); };

  ConditionalFiducialSampler sy;
  sy.target = "sigma2_y";
  sy.index = 3;
  sy.statistic = {"MLE sigma_y^2", [](const Dataset& d, ParamView th) {
                    const BvnCentred c = bvn_centred(th[0], th[1], d);
                    const double s = bvn_mle_sigma(c.syy, c.sxy, std::sqrt(th[2]), th[4], c.n);
                    return s * s;
                  }};
  sy.equation = [](const Dataset& d, ParamView th) { return bvn_variance_equation(th[4], d.n()); };

  ConditionalFiducialSampler rho;
  rho.target = "rho";
  rho.index = 4;
  rho.statistic = {"MLE rho", [](const Dataset& d, ParamView th) {
                     return bvn_mle_rho(bvn_centred(th[0], th[1], d), std::sqrt(th[2]), std::sqrt(th[3]));
                   }};
  rho.equation = [](const Dataset& d, ParamView) { return bvn_rho_equation(d.n()); };

  m.conditionals = {mx, my, sx, sy, rho};
  m.printed_log_density = {
      [](const Dataset& d, ParamView th, double v) {
        return log_density(bvn_conditional_mu_x(th[1], th[2], th[3], th[4], d), v);
      },
      [](const Dataset& d, ParamView th, double v) {
        return log_density(bvn_conditional_mu_y(th[0], th[2], th[3], th[4], d), v);
      },
      {},
      {},
      {}};
  m.validate_data = [](const Dataset& d) {
    detail::require_layout(d, Layout::paired, "bivariate_normal");
    detail::require_n(d, 3, "bivariate_normal");
    if (!(d.sx().centred_ss > 0.0) || !(d.sy().centred_ss > 0.0)) {
      throw DegenerateDataError("bivariate_normal: a column has zero variance");
    }
    const double r = d.centred_sxy() / std::sqrt(d.sx().centred_ss * d.sy().centred_ss);
    if (!(std::abs(r) < 1.0 - 1e-12)) throw DegenerateDataError("bivariate_normal: columns are perfectly correlated");
  };
  m.simulate = [](ParamView th, std::size_t n, RngStream& rng) {
    const double sx = std::sqrt(detail::positive_or_throw(th[2], "bivariate normal: sigma2_x"));
    const double sy = std::sqrt(detail::positive_or_throw(th[3], "bivariate normal: sigma2_y"));
    bvn_detail::require_rho(th[4]);
    const Dist z = dist::Normal{0.0, 1.0};
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double z1 = sample(z, rng), z2 = sample(z, rng);
      x[i] = th[0] + sx * z1;
      y[i] = th[1] + sy * (th[4] * z1 + std::sqrt(1.0 - th[4] * th[4]) * z2);
    }
    return Dataset::paired(std::move(x), std::move(y));
  };
  m.default_init = [](const Dataset& d) {
    const double n = static_cast<double>(d.n());
    const double r = d.centred_sxy() / std::sqrt(d.sx().centred_ss * d.sy().centred_ss);
    return std::vector<double>{d.sx().mean, d.sy().mean, d.sx().centred_ss / n, d.sy().centred_ss / n, r};
  };
  m.jitter_init = [](const Dataset& d, ParamView base, RngStream& rng) {
    const Dist z = dist::Normal{0.0, 1.0};
    const double n = static_cast<double>(d.n());
    std::vector<double> out(base.begin(), base.end());
    out[0] += 2.0 * std::sqrt(base[2] / n) * sample(z, rng);
    out[1] += 2.0 * std::sqrt(base[3] / n) * sample(z, rng);
    out[2] *= std::exp(0.3 * sample(z, rng));
    out[3] *= std::exp(0.3 * sample(z, rng));
    out[4] = std::tanh(std::atanh(base[4]) + 0.3 * sample(z, rng));
    return out;
  };
  return m;
}

}  // namespace fiducial::models
