#pragma once

// Two independent normal samples with unequal unknown variances; the
// quantity of interest is mu_x - mu_y.

#include <cmath>
#include <vector>

#include "fiducial/model.hpp"
#include "fiducial/models/common.hpp"
#include "fiducial/models/normal.hpp"

namespace fiducial::models {

namespace bf_detail {

inline void require_groups(const Dataset& d) {
  detail::require_layout(d, Layout::two_sample, "behrens_fisher");
  if (d.sx().n < 2 || d.sy().n < 2) throw DomainError("behrens_fisher: each sample needs at least 2 observations");
  if (!(d.sx().centred_ss > 0.0) || !(d.sy().centred_ss > 0.0)) {
    throw DegenerateDataError("behrens_fisher: a sample has zero variance");
  }
}

inline double sample_var(const ColumnSummary& s) { return s.centred_ss / static_cast<double>(s.n - 1); }

}  // namespace bf_detail

/// Angle parameter atan((s_x sqrt(n_y)) / (s_y sqrt(n_x))).
inline double behrens_fisher_angle(const Dataset& d) {
  bf_detail::require_groups(d);
  const double sx = std::sqrt(bf_detail::sample_var(d.sx())), sy = std::sqrt(bf_detail::sample_var(d.sy()));
  return std::atan((sx * std::sqrt(static_cast<double>(d.sy().n))) / (sy * std::sqrt(static_cast<double>(d.sx().n))));
}

/// One draw of mu_x - mu_y from its marginal fiducial distribution,
/// x_bar - y_bar + (s_x / sqrt(n_x)) T_x - (s_y / sqrt(n_y)) T_y with independent
/// T_x ~ t_{n_x - 1}, T_y ~ t_{n_y - 1}.
inline double behrens_fisher_draw(const Dataset& d, RngStream& rng) {
  bf_detail::require_groups(d);
  const double nx = static_cast<double>(d.sx().n), ny = static_cast<double>(d.sy().n);
  const double tx = sample(dist::StudentT{nx - 1.0, 0.0, 1.0}, rng);
  const double ty = sample(dist::StudentT{ny - 1.0, 0.0, 1.0}, rng);
  return d.sx().mean - d.sy().mean + std::sqrt(bf_detail::sample_var(d.sx()) / nx) * tx -
         std::sqrt(bf_detail::sample_var(d.sy()) / ny) * ty;
}

/// Parameters (mu_x, mu_y, sigma2_x, sigma2_y); each group gets the normal
/// mean and variance conditionals.
inline ModelSpec make_behrens_fisher_model() {
  ModelSpec m;
  m.name = "behrens_fisher";
  m.layout = Layout::two_sample;
  m.params = {{"mu_x", Interval::real_line()},
              {"mu_y", Interval::real_line()},
              {"sigma2_x", Interval::positive()},
              {"sigma2_y", Interval::positive()}};

  auto mean_sampler = [](std::size_t mu_idx, std::size_t s2_idx, bool is_x, const char* label) {
    ConditionalFiducialSampler s;
    s.target = label;
    s.index = mu_idx;
    s.statistic = {is_x ? "x_bar" : "y_bar",
                   [is_x](const Dataset& d, ParamView) { return is_x ? d.sx().mean : d.sy().mean; }};
    s.equation = [s2_idx, is_x](const Dataset& d, ParamView th) {
      return normal_mu_equation(th[s2_idx], is_x ? d.sx().n : d.sy().n);
    };
    return s;
  };
  auto var_sampler = [](std::size_t mu_idx, std::size_t s2_idx, bool is_x, const char* label) {
    ConditionalFiducialSampler s;
    s.target = label;
    s.index = s2_idx;
    s.statistic = {is_x ? "sigma_hat_x^2" : "sigma_hat_y^2", [mu_idx, is_x](const Dataset& d, ParamView th) {
                     const ColumnSummary& c = is_x ? d.sx() : d.sy();
                     const double v = c.ss_about(th[mu_idx]) / static_cast<double>(c.n);
                     if (!(v > 0.0)) throw DegenerateDataError("behrens_fisher: every observation equals the mean");
                     return v;
                   }};
    s.equation = [is_x](const Dataset& d, ParamView) {
      return scaled_chi2_equation(static_cast<double>(is_x ? d.sx().n : d.sy().n));
    };
    return s;
  };
  m.conditionals = {mean_sampler(0, 2, true, "mu_x"), mean_sampler(1, 3, false, "mu_y"),
                    var_sampler(0, 2, true, "sigma2_x"), var_sampler(1, 3, false, "sigma2_y")};

  auto var_density = [](const ColumnSummary& c, double mu, double v) {
    const double s2 = c.ss_about(mu) / static_cast<double>(c.n);
    return log_density(dist::ScaledInvChiSquare{static_cast<double>(c.n), s2}, v);
  };
  m.printed_log_density = {
      [](const Dataset& d, ParamView th, double v) {
        return log_density(normal_conditional_mu(d.sx().mean, th[2], d.sx().n), v);
      },
      [](const Dataset& d, ParamView th, double v) {
        return log_density(normal_conditional_mu(d.sy().mean, th[3], d.sy().n), v);
      },
      [var_density](const Dataset& d, ParamView th, double v) { return var_density(d.sx(), th[0], v); },
      [var_density](const Dataset& d, ParamView th, double v) { return var_density(d.sy(), th[1], v); }};
  // Product of the two normal kernels, i.e. prior 1 / (sigma2_x sigma2_y).
  m.joint_kernel = [](ParamView th, const Dataset& d) {
    return normal_joint_kernel(th[0], th[2], d.sx()) + normal_joint_kernel(th[1], th[3], d.sy());
  };
  m.validate_data = [](const Dataset& d) { bf_detail::require_groups(d); };
  // n observations per group.
  m.simulate = [](ParamView th, std::size_t n, RngStream& rng) {
    const Dist gx = dist::Normal{th[0], detail::positive_or_throw(th[2], "behrens_fisher: sigma2_x")};
    const Dist gy = dist::Normal{th[1], detail::positive_or_throw(th[3], "behrens_fisher: sigma2_y")};
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = sample(gx, rng);
    for (auto& v : y) v = sample(gy, rng);
    return Dataset::two_sample(std::move(x), std::move(y));
  };
  m.default_init = [](const Dataset& d) {
    return std::vector<double>{d.sx().mean, d.sy().mean, bf_detail::sample_var(d.sx()),
                               bf_detail::sample_var(d.sy())};
  };
  m.jitter_init = [](const Dataset& d, ParamView base, RngStream& rng) {
    const Dist z = dist::Normal{0.0, 1.0};
    std::vector<double> out(base.begin(), base.end());
    out[0] += 2.0 * std::sqrt(base[2] / static_cast<double>(d.sx().n)) * sample(z, rng);
    out[1] += 2.0 * std::sqrt(base[3] / static_cast<double>(d.sy().n)) * sample(z, rng);
    out[2] *= std::exp(0.5 * sample(z, rng));
    out[3] *= std::exp(0.5 * sample(z, rng));
    return out;
  };
  return m;
}

}  // namespace fiducial::models
