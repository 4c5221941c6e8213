#pragma once

// Structural equations Q(x) = phi(Gamma, theta) and the conditional fiducial
// samplers built from them.
//
// A conditional draw is exactly: compute the statistic q from the data and the
// other parameters, draw gamma from the primary distribution, and return the
// theta that solves q = phi(gamma, theta).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "fiducial/dataset.hpp"
#include "fiducial/errors.hpp"
#include "fiducial/randvar.hpp"

namespace fiducial {

using ParamView = std::span<const double>;

/// Real interval with independently open or closed ends.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_closed = false;
  bool hi_closed = false;

  bool contains(double v) const {
    if (!(v == v)) return false;
    const bool above = lo_closed ? v >= lo : v > lo;
    const bool below = hi_closed ? v <= hi : v < hi;
    return above && below;
  }

  static Interval real_line() { return {}; }
  static Interval positive() { return {0.0, std::numeric_limits<double>::infinity()}; }
  static Interval open(double a, double b) { return {a, b, false, false}; }
  static Interval closed(double a, double b) { return {a, b, true, true}; }
};

/// Default truncation of a standard-normal primary variable used by the
/// CLT-approximated equations.
inline constexpr double kDefaultNormalTruncation = 5.0;

/// q = phi(gamma, theta) together with its inverse in theta and in gamma.
struct StructuralEquation {
  Dist gamma_dist;                               // f_Gamma, already restricted to G
  Interval gamma_domain;                         // G
  Interval theta_domain;                         // H
  std::function<double(double, double)> phi;     // (gamma, theta) -> q
  std::function<double(double, double)> invert;  // (q, gamma) -> theta
  std::function<double(double, double)> pivot;   // (q, theta) -> gamma
  bool approximate = false;  // built from a normal approximation to the statistic
  bool narrowed = false;     // G cut below the default truncation to keep the map invertible
};

/// One-dimensional statistic of the data, possibly depending on the other parameters.
struct FiducialStatistic {
  std::string name;
  std::function<double(const Dataset&, ParamView)> compute;
};

/// Full conditional fiducial sampler for one parameter.
struct ConditionalFiducialSampler {
  std::string target;
  std::size_t index = 0;  // position of the target in the parameter vector
  FiducialStatistic statistic;
  std::function<StructuralEquation(const Dataset&, ParamView)> equation;
};

/// Draw theta_j given theta_{-j} using a caller-supplied primary value.
inline double draw_with_primary(const ConditionalFiducialSampler& sampler, const StructuralEquation& eq,
                                double q, double gamma) {
  double theta;
  try {
    theta = eq.invert(q, gamma);
  } catch (const BracketError& e) {
    std::ostringstream os;
    os << sampler.target << ": cannot invert structural equation for q=" << q << ", gamma=" << gamma
       << " (" << e.what() << ")";
    throw StructuralError(os.str(), sampler.target, q, gamma);
  }
  if (!eq.theta_domain.contains(theta)) {
    std::ostringstream os;
    os << sampler.target << ": inversion produced " << theta << " outside the parameter domain (q=" << q
       << ", gamma=" << gamma << ")";
    throw StructuralError(os.str(), sampler.target, q, gamma);
  }
  return theta;
}

/// One draw from f(theta_j | theta_{-j}, x).
///
/// `theta` is the full parameter vector; its entry for the target is ignored.
inline double draw(const ConditionalFiducialSampler& sampler, const Dataset& data, ParamView theta,
                   RngStream& rng) {
  const double q = sampler.statistic.compute(data, theta);
  const StructuralEquation eq = sampler.equation(data, theta);
  return draw_with_primary(sampler, eq, q, sample(eq.gamma_dist, rng));
}

/// Outcome of a numerical injectivity check of gamma -> theta for fixed q.
struct InjectivityReport {
  bool injective = false;          // strictly monotone and finite on the whole grid
  bool increasing = false;         // direction of theta as gamma grows
  std::size_t grid_size = 0;
  std::size_t nonfinite = 0;       // grid points where the inversion failed
  double max_round_trip = 0.0;     // max |phi(gamma, invert(q, gamma)) - q|
  std::string detail;
};

/// Evaluates invert(q, .) on a grid of primary values spanning G and checks
/// that it is strictly monotone.
///
/// The grid is placed at quantiles of the primary distribution between 1e-6
/// and 1 - 1e-6, so it covers G wherever it carries mass.
inline InjectivityReport check_injectivity(const StructuralEquation& eq, double q,
                                           std::size_t grid_size = 64) {
  if (grid_size < 16) throw DomainError("check_injectivity: grid_size must be at least 16");
  InjectivityReport rep;
  rep.grid_size = grid_size;
  constexpr double p_lo = 1e-6, p_hi = 1.0 - 1e-6;
  std::vector<double> thetas;
  thetas.reserve(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double p = p_lo + (p_hi - p_lo) * static_cast<double>(i) / static_cast<double>(grid_size - 1);
    const double gamma = quantile(eq.gamma_dist, p);
    double theta = std::numeric_limits<double>::quiet_NaN();
    try {
      theta = eq.invert(q, gamma);
    } catch (const Error&) {
    }
    if (!std::isfinite(theta) || !eq.theta_domain.contains(theta)) {
      ++rep.nonfinite;
      thetas.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    rep.max_round_trip = std::max(rep.max_round_trip, std::abs(eq.phi(gamma, theta) - q));
    thetas.push_back(theta);
  }
  bool inc = true, dec = true;
  for (std::size_t i = 1; i < thetas.size(); ++i) {
    if (!(thetas[i] > thetas[i - 1])) inc = false;
    if (!(thetas[i] < thetas[i - 1])) dec = false;
  }
  rep.increasing = inc;
  rep.injective = rep.nonfinite == 0 && (inc || dec);
  std::ostringstream os;
  if (rep.nonfinite > 0) {
    os << rep.nonfinite << " of " << grid_size << " grid points have no solution in the parameter domain";
  } else if (!(inc || dec)) {
    os << "inverse map is not monotone in gamma";
  } else {
    os << "inverse map strictly " << (inc ? "increasing" : "decreasing") << " in gamma";
  }
  rep.detail = os.str();
  return rep;
}

/// Log density of theta implied by the structural equation:
/// f_Gamma(pivot(q, theta)) * |d pivot / d theta|, derivative by central difference.
inline double implied_log_density(const StructuralEquation& eq, double q, double theta) {
  if (!eq.theta_domain.contains(theta)) return -std::numeric_limits<double>::infinity();
  const double h = 1e-6 * std::max(1.0, std::abs(theta));
  double lo = theta - h, hi = theta + h;
  if (!eq.theta_domain.contains(lo)) lo = theta;
  if (!eq.theta_domain.contains(hi)) hi = theta;
  const double deriv = (eq.pivot(q, hi) - eq.pivot(q, lo)) / (hi - lo);
  const double g = eq.pivot(q, theta);
  return log_density(eq.gamma_dist, g) + std::log(std::abs(deriv));
}

/// Quantile of the conditional fiducial distribution: invert(q, .) applied to a
/// quantile of Gamma, mirrored when the inverse map is decreasing.
inline double implied_quantile(const StructuralEquation& eq, double q, double prob) {
  const double g_mid = quantile(eq.gamma_dist, 0.5);
  const double g_hi = quantile(eq.gamma_dist, 0.75);
  const bool increasing = eq.invert(q, g_hi) > eq.invert(q, g_mid);
  return eq.invert(q, quantile(eq.gamma_dist, increasing ? prob : 1.0 - prob));
}

}  // namespace fiducial
