#pragma once

// Normal quadratic regression y = b0 + b1 x + b2 x^2 + e, e ~ N(0, sigma^2).

#include <array>
#include <cmath>
#include <vector>

#include "fiducial/model.hpp"
#include "fiducial/models/common.hpp"

namespace fiducial::models {

/// sum (y_i - b0 - b1 x_i - b2 x_i^2)^2
inline double quadreg_rss(double b0, double b1, double b2, const Dataset& data) {
  const auto& x = data.x();
  const auto& y = data.y();
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - b0 - (b1 + b2 * x[i]) * x[i];
    rss += r * r;
  }
  return rss;
}

namespace quadreg_detail {

inline void require_design(const Dataset& d, int power) {
  if (!(d.sum_x_pow(power) > 0.0)) {
    throw DegenerateDataError("quadreg: degenerate design, all x_i are zero");
  }
}

}  // namespace quadreg_detail

/// b0 | b1, b2, sigma^2 ~ N(sum y/n - b1 sum x/n - b2 sum x^2/n, sigma^2/n).
inline Dist quadreg_conditional_beta0(double b1, double b2, double sigma2, const Dataset& d) {
  detail::positive_or_throw(sigma2, "quadreg: sigma^2");
  const double n = static_cast<double>(d.n());
  return dist::Normal{d.sum_x_pow_y(0) / n - b1 * d.sum_x_pow(1) / n - b2 * d.sum_x_pow(2) / n, sigma2 / n};
}

/// b1 | b0, b2, sigma^2 ~ N((sum xy - b0 sum x - b2 sum x^3) / sum x^2, sigma^2 / sum x^2).
inline Dist quadreg_conditional_beta1(double b0, double b2, double sigma2, const Dataset& d) {
  detail::positive_or_throw(sigma2, "quadreg: sigma^2");
  quadreg_detail::require_design(d, 2);
  const double sxx = d.sum_x_pow(2);
  return dist::Normal{d.sum_x_pow_y(1) / sxx - b0 * d.sum_x_pow(1) / sxx - b2 * d.sum_x_pow(3) / sxx,
                      sigma2 / sxx};
}

/// b2 | b0, b1, sigma^2 ~ N((sum x^2 y - b0 sum x^2 - b1 sum x^3) / sum x^4, sigma^2 / sum x^4).
inline Dist quadreg_conditional_beta2(double b0, double b1, double sigma2, const Dataset& d) {
  detail::positive_or_throw(sigma2, "quadreg: sigma^2");
  quadreg_detail::require_design(d, 4);
  const double s4 = d.sum_x_pow(4);
  return dist::Normal{d.sum_x_pow_y(2) / s4 - b0 * d.sum_x_pow(2) / s4 - b1 * d.sum_x_pow(3) / s4,
                      sigma2 / s4};
}

/// sigma^2 | b0, b1, b2 ~ Scale-inv-chi^2(n, RSS / n).
inline Dist quadreg_conditional_sigma2(double b0, double b1, double b2, const Dataset& d) {
  const double rss = quadreg_rss(b0, b1, b2, d);
  if (!(rss > 0.0)) throw DegenerateDataError("quadreg: residual sum of squares is zero");
  const double n = static_cast<double>(d.n());
  return dist::ScaledInvChiSquare{n, rss / n};
}

/// All four full conditionals at theta = (b0, b1, b2, sigma^2).
inline std::array<Dist, 4> quadreg_conditionals(double b0, double b1, double b2, double sigma2,
                                                const Dataset& d) {
  return {quadreg_conditional_beta0(b1, b2, sigma2, d), quadreg_conditional_beta1(b0, b2, sigma2, d),
          quadreg_conditional_beta2(b0, b1, sigma2, d), quadreg_conditional_sigma2(b0, b1, b2, d)};
}

/// log of sigma^{-(n+2)} exp(-RSS / (2 sigma^2)).
inline double quadreg_joint_kernel(double b0, double b1, double b2, double sigma2, const Dataset& d) {
  if (!(sigma2 > 0.0)) return -INFINITY;
  const double n = static_cast<double>(d.n());
  return -0.5 * (n + 2.0) * std::log(sigma2) - 0.5 * quadreg_rss(b0, b1, b2, d) / sigma2;
}

/// Least-squares fit (b0, b1, b2) by Gaussian elimination on the normal equations.
inline std::array<double, 3> quadreg_least_squares(const Dataset& d) {
  std::array<std::array<double, 4>, 3> a{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) a[r][c] = d.sum_x_pow(r + c);
    a[r][3] = d.sum_x_pow_y(r);
  }
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    std::swap(a[col], a[piv]);
    if (std::abs(a[col][col]) < 1e-300) {
      throw DegenerateDataError("quadreg: design matrix is singular");
    }
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return {a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]};
}

inline ModelSpec make_quadreg_model() {
  ModelSpec m;
  m.name = "quadreg";
  m.layout = Layout::paired;
  m.params = {{"beta0", Interval::real_line()},
              {"beta1", Interval::real_line()},
              {"beta2", Interval::real_line()},
              {"sigma2", Interval::positive()}};

  ConditionalFiducialSampler b0;
  b0.target = "beta0";
  b0.index = 0;
  b0.statistic = {"sum y", [](const Dataset& d, ParamView) { return d.sum_x_pow_y(0); }};
  b0.equation = [](const Dataset& d, ParamView th) {
    detail::positive_or_throw(th[3], "quadreg: sigma^2");
    const double n = static_cast<double>(d.n());
    return affine_normal_equation(th[1] * d.sum_x_pow(1) + th[2] * d.sum_x_pow(2), n, std::sqrt(th[3] * n));
  };

  ConditionalFiducialSampler b1;
  b1.target = "beta1";
  b1.index = 1;
  b1.statistic = {"sum x y", [](const Dataset& d, ParamView) { return d.sum_x_pow_y(1); }};
  b1.equation = [](const Dataset& d, ParamView th) {
    detail::positive_or_throw(th[3], "quadreg: sigma^2");
    quadreg_detail::require_design(d, 2);
    const double sxx = d.sum_x_pow(2);
    return affine_normal_equation(th[0] * d.sum_x_pow(1) + th[2] * d.sum_x_pow(3), sxx, std::sqrt(th[3] * sxx));
  };

  ConditionalFiducialSampler b2;
  b2.target = "beta2";
  b2.index = 2;
  b2.statistic = {"sum x^2 y", [](const Dataset& d, ParamView) { return d.sum_x_pow_y(2); }};
  b2.equation = [](const Dataset& d, ParamView th) {
    detail::positive_or_throw(th[3], "quadreg: sigma^2");
    quadreg_detail::require_design(d, 4);
    const double s4 = d.sum_x_pow(4);
    return affine_normal_equation(th[0] * d.sum_x_pow(2) + th[1] * d.sum_x_pow(3), s4, std::sqrt(th[3] * s4));
  };

  ConditionalFiducialSampler s2;
  s2.target = "sigma2";
  s2.index = 3;
  s2.statistic = {"RSS / n", [](const Dataset& d, ParamView th) {
                    const double rss = quadreg_rss(th[0], th[1], th[2], d);
                    if (!(rss > 0.0)) throw DegenerateDataError("quadreg: residual sum of squares is zero");
                    return rss / static_cast<double>(d.n());
                  }};
  s2.equation = [](const Dataset& d, ParamView) { return scaled_chi2_equation(static_cast<double>(d.n())); };

  m.conditionals = {b0, b1, b2, s2};
  m.printed_log_density = {
      [](const Dataset& d, ParamView th, double v) {
        return log_density(quadreg_conditional_beta0(th[1], th[2], th[3], d), v);
      },
      [](const Dataset& d, ParamView th, double v) {
        return log_density(quadreg_conditional_beta1(th[0], th[2], th[3], d), v);
      },
      [](const Dataset& d, ParamView th, double v) {
        return log_density(quadreg_conditional_beta2(th[0], th[1], th[3], d), v);
      },
      [](const Dataset& d, ParamView th, double v) {
        return log_density(quadreg_conditional_sigma2(th[0], th[1], th[2], d), v);
      }};
  m.joint_kernel = [](ParamView th, const Dataset& d) {
    return quadreg_joint_kernel(th[0], th[1], th[2], th[3], d);
  };
  m.validate_data = [](const Dataset& d) {
    detail::require_layout(d, Layout::paired, "quadreg");
    detail::require_n(d, 2, "quadreg");
    quadreg_detail::require_design(d, 2);
  };
  // Design points are equally spaced on [-1, 1].
  m.simulate = [](ParamView th, std::size_t n, RngStream& rng) {
    const double sd = std::sqrt(detail::positive_or_throw(th[3], "quadreg: sigma^2"));
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = n > 1 ? -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
      y[i] = th[0] + th[1] * x[i] + th[2] * x[i] * x[i] + sd * sample(dist::Normal{0.0, 1.0}, rng);
    }
    return Dataset::paired(std::move(x), std::move(y));
  };
  m.default_init = [](const Dataset& d) {
    std::array<double, 3> b{d.sy().mean, 0.0, 0.0};
    try {
      b = quadreg_least_squares(d);
    } catch (const DegenerateDataError&) {
    }
    const double n = static_cast<double>(d.n());
    double s2 = quadreg_rss(b[0], b[1], b[2], d) / std::max(1.0, n - 3.0);
    if (!(s2 > 0.0)) s2 = 1.0;
    return std::vector<double>{b[0], b[1], b[2], s2};
  };
  m.jitter_init = [](const Dataset& d, ParamView base, RngStream& rng) {
    const Dist z = dist::Normal{0.0, 1.0};
    const double n = static_cast<double>(d.n());
    std::vector<double> out(base.begin(), base.end());
    out[0] += 2.0 * std::sqrt(base[3] / n) * sample(z, rng);
    out[1] += 2.0 * std::sqrt(base[3] / d.sum_x_pow(2)) * sample(z, rng);
    out[2] += 2.0 * std::sqrt(base[3] / d.sum_x_pow(4)) * sample(z, rng);
    out[3] *= std::exp(0.5 * sample(z, rng));
    return out;
  };
  return m;
}

}  // namespace fiducial::models
