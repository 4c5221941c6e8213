#pragma once

// Seeded random streams and the univariate distributions used as primary
// random variables and as closed-form conditionals.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>

#include "fiducial/errors.hpp"
#include "fiducial/specfun.hpp"

namespace fiducial {

/// Reproducible random stream identified by (seed, stream_id).
///
/// Backed by std::mt19937_64 seeded through std::seed_seq, both of which are
/// fully specified by the standard, so the integer stream is identical across
/// platforms. All variates are produced by code in this header rather than by
/// the <random> distributions, whose algorithms are implementation-defined.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id),
                      static_cast<std::uint32_t>(stream_id >> 32), 0x9e3779b9u};
    engine_.seed(seq);
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

namespace dist {

struct Normal {
  double mean;
  double var;
};
struct TruncatedNormal {
  double mean;
  double var;
  double lo;
  double hi;
};
/// Shape/rate parameterisation.
struct Gamma {
  double shape;
  double rate;
};
struct ChiSquare {
  double df;
};
/// Distribution of df * scale / X with X ~ ChiSquare(df).
struct ScaledInvChiSquare {
  double df;
  double scale;
};
struct Exponential {
  double rate;
};
/// Non-standardised Student t: loc + scale * T_df.
struct StudentT {
  double df;
  double loc;
  double scale;
};

}  // namespace dist

using Dist = std::variant<dist::Normal, dist::TruncatedNormal, dist::Gamma, dist::ChiSquare,
                          dist::ScaledInvChiSquare, dist::Exponential, dist::StudentT>;

namespace detail {

inline void require(bool ok, const char* what, double value) {
  if (!ok) {
    std::ostringstream os;
    os << what << " (got " << value << ")";
    throw DomainError(os.str());
  }
}

inline bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

template <class>
inline constexpr bool always_false = false;

}  // namespace detail

/// Throws DomainError unless every parameter of `d` is valid.
inline void validate(const Dist& d) {
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, dist::Normal>) {
          detail::require(std::isfinite(p.mean), "Normal: mean must be finite", p.mean);
          detail::require(detail::positive_finite(p.var), "Normal: variance must be positive", p.var);
        } else if constexpr (std::is_same_v<T, dist::TruncatedNormal>) {
          detail::require(std::isfinite(p.mean), "TruncatedNormal: mean must be finite", p.mean);
          detail::require(detail::positive_finite(p.var), "TruncatedNormal: variance must be positive",
                          p.var);
          detail::require(p.lo < p.hi, "TruncatedNormal: requires lo < hi", p.hi - p.lo);
        } else if constexpr (std::is_same_v<T, dist::Gamma>) {
          detail::require(detail::positive_finite(p.shape), "Gamma: shape must be positive", p.shape);
          detail::require(detail::positive_finite(p.rate), "Gamma: rate must be positive", p.rate);
        } else if constexpr (std::is_same_v<T, dist::ChiSquare>) {
          detail::require(detail::positive_finite(p.df), "ChiSquare: df must be positive", p.df);
        } else if constexpr (std::is_same_v<T, dist::ScaledInvChiSquare>) {
          detail::require(detail::positive_finite(p.df), "ScaledInvChiSquare: df must be positive",
                          p.df);
          detail::require(detail::positive_finite(p.scale),
                          "ScaledInvChiSquare: scale must be positive", p.scale);
        } else if constexpr (std::is_same_v<T, dist::Exponential>) {
          detail::require(detail::positive_finite(p.rate), "Exponential: rate must be positive", p.rate);
        } else if constexpr (std::is_same_v<T, dist::StudentT>) {
          detail::require(detail::positive_finite(p.df), "StudentT: df must be positive", p.df);
          detail::require(std::isfinite(p.loc), "StudentT: location must be finite", p.loc);
          detail::require(detail::positive_finite(p.scale), "StudentT: scale must be positive", p.scale);
        } else {
          static_assert(detail::always_false<T>);
        }
      },
      d);
}

/// Human-readable name with parameters, e.g. "Gamma(2, 3)".
inline std::string describe(const Dist& d) {
  std::ostringstream os;
  os.precision(10);
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, dist::Normal>) {
          os << "Normal(" << p.mean << ", " << p.var << ")";
        } else if constexpr (std::is_same_v<T, dist::TruncatedNormal>) {
          os << "TruncatedNormal(" << p.mean << ", " << p.var << ", " << p.lo << ", " << p.hi << ")";
        } else if constexpr (std::is_same_v<T, dist::Gamma>) {
          os << "Gamma(" << p.shape << ", " << p.rate << ")";
        } else if constexpr (std::is_same_v<T, dist::ChiSquare>) {
          os << "ChiSquare(" << p.df << ")";
        } else if constexpr (std::is_same_v<T, dist::ScaledInvChiSquare>) {
          os << "ScaledInvChiSquare(" << p.df << ", " << p.scale << ")";
        } else if constexpr (std::is_same_v<T, dist::Exponential>) {
          os << "Exponential(" << p.rate << ")";
        } else {
          os << "StudentT(" << p.df << ", " << p.loc << ", " << p.scale << ")";
        }
      },
      d);
  return os.str();
}

namespace detail {

inline double std_normal(RngStream& rng) { return specfun::normal_quantile(rng.uniform()); }

// Marsaglia & Tsang (2000) for shape >= 1, with the U^(1/shape) boost below 1.
inline double std_gamma(double shape, RngStream& rng) {
  if (shape < 1.0) {
    const double g = std_gamma(shape + 1.0, rng);
    return g * std::pow(rng.uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = std_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

// Standard normal restricted to [lo, hi] by inversion; works in the upper
// tail through the survival function so that far-tail intervals keep
// full precision.
inline double std_truncated_normal(double lo, double hi, RngStream& rng) {
  const double u = rng.uniform();
  if (lo >= 0.0) {
    const double slo = specfun::normal_sf(lo), shi = specfun::normal_sf(hi);
    const double s = shi + u * (slo - shi);
    return std::clamp(-specfun::normal_quantile(s), lo, hi);
  }
  if (hi <= 0.0) {
    const double clo = specfun::normal_cdf(lo), chi = specfun::normal_cdf(hi);
    return std::clamp(specfun::normal_quantile(clo + u * (chi - clo)), lo, hi);
  }
  const double clo = specfun::normal_cdf(lo), chi = specfun::normal_cdf(hi);
  double p = clo + u * (chi - clo);
  p = std::clamp(p, std::numeric_limits<double>::min(), 1.0 - 0x1.0p-53);
  return std::clamp(specfun::normal_quantile(p), lo, hi);
}

}  // namespace detail

/// One draw from `d`.
inline double sample(const Dist& d, RngStream& rng) {
  validate(d);
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, dist::Normal>) {
          return p.mean + std::sqrt(p.var) * detail::std_normal(rng);
        } else if constexpr (std::is_same_v<T, dist::TruncatedNormal>) {
          const double sd = std::sqrt(p.var);
          const double z = detail::std_truncated_normal((p.lo - p.mean) / sd, (p.hi - p.mean) / sd, rng);
          return std::clamp(p.mean + sd * z, p.lo, p.hi);
        } else if constexpr (std::is_same_v<T, dist::Gamma>) {
          return detail::std_gamma(p.shape, rng) / p.rate;
        } else if constexpr (std::is_same_v<T, dist::ChiSquare>) {
          return 2.0 * detail::std_gamma(0.5 * p.df, rng);
        } else if constexpr (std::is_same_v<T, dist::ScaledInvChiSquare>) {
          return p.df * p.scale / (2.0 * detail::std_gamma(0.5 * p.df, rng));
        } else if constexpr (std::is_same_v<T, dist::Exponential>) {
          return -std::log(rng.uniform()) / p.rate;
        } else {
          const double z = detail::std_normal(rng);
          const double chi2 = 2.0 * detail::std_gamma(0.5 * p.df, rng);
          return p.loc + p.scale * z / std::sqrt(chi2 / p.df);
        }
      },
      d);
}

/// Log density at x; -infinity outside the support.
inline double log_density(const Dist& d, double x) {
  validate(d);
  constexpr double ninf = -std::numeric_limits<double>::infinity();
  constexpr double half_log_2pi = 0.91893853320467274178;
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, dist::Normal>) {
          const double z = (x - p.mean);
          return -half_log_2pi - 0.5 * std::log(p.var) - 0.5 * z * z / p.var;
        } else if constexpr (std::is_same_v<T, dist::TruncatedNormal>) {
          if (x < p.lo || x > p.hi) return ninf;
          const double sd = std::sqrt(p.var);
          const double a = (p.lo - p.mean) / sd, b = (p.hi - p.mean) / sd;
          const double mass = a >= 0.0 ? specfun::normal_sf(a) - specfun::normal_sf(b)
                                       : specfun::normal_cdf(b) - specfun::normal_cdf(a);
          const double z = (x - p.mean) / sd;
          return -half_log_2pi - std::log(sd) - 0.5 * z * z - std::log(mass);
        } else if constexpr (std::is_same_v<T, dist::Gamma>) {
          if (x < 0.0) return ninf;
          if (x == 0.0) {
            if (p.shape == 1.0) return std::log(p.rate);
            return p.shape < 1.0 ? std::numeric_limits<double>::infinity() : ninf;
          }
          return p.shape * std::log(p.rate) + (p.shape - 1.0) * std::log(x) - p.rate * x -
                 specfun::ln_gamma(p.shape);
        } else if constexpr (std::is_same_v<T, dist::ChiSquare>) {
          if (x <= 0.0) return ninf;
          const double k = 0.5 * p.df;
          return (k - 1.0) * std::log(x) - 0.5 * x - k * std::numbers::ln2 - specfun::ln_gamma(k);
        } else if constexpr (std::is_same_v<T, dist::ScaledInvChiSquare>) {
          if (x <= 0.0) return ninf;
          const double k = 0.5 * p.df;
          return k * std::log(k * p.scale) - specfun::ln_gamma(k) - (k + 1.0) * std::log(x) -
                 k * p.scale / x;
        } else if constexpr (std::is_same_v<T, dist::Exponential>) {
          if (x < 0.0) return ninf;
          return std::log(p.rate) - p.rate * x;
        } else {
          const double z = (x - p.loc) / p.scale;
          const double nu = p.df;
          return specfun::ln_gamma(0.5 * (nu + 1.0)) - specfun::ln_gamma(0.5 * nu) -
                 0.5 * std::log(nu * std::numbers::pi) - std::log(p.scale) -
                 0.5 * (nu + 1.0) * std::log1p(z * z / nu);
        }
      },
      d);
}

/// Cumulative distribution function.
inline double cdf(const Dist& d, double x) {
  validate(d);
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, dist::Normal>) {
          return specfun::normal_cdf((x - p.mean) / std::sqrt(p.var));
        } else if constexpr (std::is_same_v<T, dist::TruncatedNormal>) {
          if (x <= p.lo) return 0.0;
          if (x >= p.hi) return 1.0;
          const double sd = std::sqrt(p.var);
          const double a = (p.lo - p.mean) / sd, b = (p.hi - p.mean) / sd, z = (x - p.mean) / sd;
          if (a >= 0.0) {
            const double sa = specfun::normal_sf(a);
            return (sa - specfun::normal_sf(z)) / (sa - specfun::normal_sf(b));
          }
          const double ca = specfun::normal_cdf(a);
          return (specfun::normal_cdf(z) - ca) / (specfun::normal_cdf(b) - ca);
        } else if constexpr (std::is_same_v<T, dist::Gamma>) {
          return x <= 0.0 ? 0.0 : specfun::gamma_p(p.shape, p.rate * x);
        } else if constexpr (std::is_same_v<T, dist::ChiSquare>) {
          return x <= 0.0 ? 0.0 : specfun::gamma_p(0.5 * p.df, 0.5 * x);
        } else if constexpr (std::is_same_v<T, dist::ScaledInvChiSquare>) {
          return x <= 0.0 ? 0.0 : specfun::gamma_q(0.5 * p.df, 0.5 * p.df * p.scale / x);
        } else if constexpr (std::is_same_v<T, dist::Exponential>) {
          return x <= 0.0 ? 0.0 : -std::expm1(-p.rate * x);
        } else {
          const double t = (x - p.loc) / p.scale;
          const double tail = 0.5 * specfun::beta_inc(0.5 * p.df, 0.5, p.df / (p.df + t * t));
          return t < 0.0 ? tail : 1.0 - tail;
        }
      },
      d);
}

/// Inverse CDF for p in (0, 1).
inline double quantile(const Dist& d, double prob) {
  validate(d);
  if (!(prob > 0.0 && prob < 1.0)) {
    std::ostringstream os;
    os << "quantile: probability must lie in (0,1), got " << prob;
    throw DomainError(os.str());
  }
  // Numeric inversion of the CDF for the families without a closed form.
  auto invert_positive = [&](double guess) {
    double lo = guess, hi = guess;
    while (cdf(d, lo) > prob) lo *= 0.5;
    while (cdf(d, hi) < prob) hi *= 2.0;
    if (lo == hi) return lo;
    return specfun::solve_monotone([&](double x) { return cdf(d, x); }, prob, {lo, hi}, 1e-15);
  };
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, dist::Normal>) {
          return p.mean + std::sqrt(p.var) * specfun::normal_quantile(prob);
        } else if constexpr (std::is_same_v<T, dist::TruncatedNormal>) {
          const double sd = std::sqrt(p.var);
          const double a = (p.lo - p.mean) / sd, b = (p.hi - p.mean) / sd;
          double z;
          if (a >= 0.0) {
            const double sa = specfun::normal_sf(a), sb = specfun::normal_sf(b);
            z = -specfun::normal_quantile(sa - prob * (sa - sb));
          } else {
            const double ca = specfun::normal_cdf(a), cb = specfun::normal_cdf(b);
            z = specfun::normal_quantile(ca + prob * (cb - ca));
          }
          return std::clamp(p.mean + sd * z, p.lo, p.hi);
        } else if constexpr (std::is_same_v<T, dist::Gamma>) {
          return invert_positive(p.shape / p.rate);
        } else if constexpr (std::is_same_v<T, dist::ChiSquare>) {
          return invert_positive(p.df);
        } else if constexpr (std::is_same_v<T, dist::ScaledInvChiSquare>) {
          return invert_positive(p.scale);
        } else if constexpr (std::is_same_v<T, dist::Exponential>) {
          return -std::log1p(-prob) / p.rate;
        } else {
          if (p.df == 1.0) return p.loc + p.scale * std::tan(std::numbers::pi * (prob - 0.5));
          if (prob == 0.5) return p.loc;
          // Symmetric: invert the upper tail on t > 0.
          const double upper = prob > 0.5 ? 1.0 - prob : prob;
          const dist::StudentT standard{p.df, 0.0, 1.0};
          double hi = 1.0;
          while (1.0 - cdf(standard, hi) > upper) hi *= 2.0;
          const double t = specfun::solve_monotone(
              [&](double x) { return 0.5 * specfun::beta_inc(0.5 * p.df, 0.5, p.df / (p.df + x * x)); },
              upper, {0.0, hi}, 1e-17);
          return p.loc + p.scale * (prob > 0.5 ? t : -t);
        }
      },
      d);
}

/// Mean of the distribution (infinite when it does not exist).
inline double mean(const Dist& d) {
  validate(d);
  constexpr double inf = std::numeric_limits<double>::infinity();
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, dist::Normal>) {
          return p.mean;
        } else if constexpr (std::is_same_v<T, dist::TruncatedNormal>) {
          const double sd = std::sqrt(p.var);
          const double a = (p.lo - p.mean) / sd, b = (p.hi - p.mean) / sd;
          const double phi_a = std::exp(-0.5 * a * a) / std::sqrt(2.0 * std::numbers::pi);
          const double phi_b = std::exp(-0.5 * b * b) / std::sqrt(2.0 * std::numbers::pi);
          const double mass = specfun::normal_cdf(b) - specfun::normal_cdf(a);
          return p.mean + sd * (phi_a - phi_b) / mass;
        } else if constexpr (std::is_same_v<T, dist::Gamma>) {
          return p.shape / p.rate;
        } else if constexpr (std::is_same_v<T, dist::ChiSquare>) {
          return p.df;
        } else if constexpr (std::is_same_v<T, dist::ScaledInvChiSquare>) {
          return p.df > 2.0 ? p.df * p.scale / (p.df - 2.0) : inf;
        } else if constexpr (std::is_same_v<T, dist::Exponential>) {
          return 1.0 / p.rate;
        } else {
          return p.df > 1.0 ? p.loc : std::numeric_limits<double>::quiet_NaN();
        }
      },
      d);
}

/// Variance of the distribution (infinite when it does not exist).
inline double variance(const Dist& d) {
  validate(d);
  constexpr double inf = std::numeric_limits<double>::infinity();
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, dist::Normal>) {
          return p.var;
        } else if constexpr (std::is_same_v<T, dist::TruncatedNormal>) {
          const double sd = std::sqrt(p.var);
          const double a = (p.lo - p.mean) / sd, b = (p.hi - p.mean) / sd;
          const double phi_a = std::exp(-0.5 * a * a) / std::sqrt(2.0 * std::numbers::pi);
          const double phi_b = std::exp(-0.5 * b * b) / std::sqrt(2.0 * std::numbers::pi);
          const double mass = specfun::normal_cdf(b) - specfun::normal_cdf(a);
          const double r = (phi_a - phi_b) / mass;
          return p.var * (1.0 + (a * phi_a - b * phi_b) / mass - r * r);
        } else if constexpr (std::is_same_v<T, dist::Gamma>) {
          return p.shape / (p.rate * p.rate);
        } else if constexpr (std::is_same_v<T, dist::ChiSquare>) {
          return 2.0 * p.df;
        } else if constexpr (std::is_same_v<T, dist::ScaledInvChiSquare>) {
          if (p.df <= 4.0) return inf;
          return 2.0 * p.df * p.df * p.scale * p.scale / ((p.df - 2.0) * (p.df - 2.0) * (p.df - 4.0));
        } else if constexpr (std::is_same_v<T, dist::Exponential>) {
          return 1.0 / (p.rate * p.rate);
        } else {
          return p.df > 2.0 ? p.scale * p.scale * p.df / (p.df - 2.0) : inf;
        }
      },
      d);
}

/// Standard normal truncated to [lo, hi].
inline Dist truncated_standard_normal(double lo, double hi) {
  return dist::TruncatedNormal{0.0, 1.0, lo, hi};
}

}  // namespace fiducial
