#pragma once

// Structural-equation builders shared by several model families.

#include <cmath>
#include <sstream>

#include "fiducial/fiducial_core.hpp"
#include "fiducial/randvar.hpp"

namespace fiducial::models {

/// q = offset + slope * theta + noise_sd * Gamma, Gamma ~ N(0, 1).
///
/// Covers every normal-mean and regression-coefficient conditional.
inline StructuralEquation affine_normal_equation(double offset, double slope, double noise_sd) {
  if (!(slope != 0.0) || !std::isfinite(slope)) {
    throw DomainError("affine_normal_equation: slope must be finite and non-zero");
  }
  if (!(noise_sd > 0.0) || !std::isfinite(noise_sd)) {
    std::ostringstream os;
    os << "affine_normal_equation: noise standard deviation must be positive (got " << noise_sd << ")";
    throw DomainError(os.str());
  }
  StructuralEquation eq;
  eq.gamma_dist = dist::Normal{0.0, 1.0};
  eq.gamma_domain = Interval::real_line();
  eq.theta_domain = Interval::real_line();
  eq.phi = [=](double g, double theta) { return offset + slope * theta + noise_sd * g; };
  eq.invert = [=](double q, double g) { return (q - offset - noise_sd * g) / slope; };
  eq.pivot = [=](double q, double theta) { return (q - offset - slope * theta) / noise_sd; };
  return eq;
}

/// q = theta * Gamma / n with Gamma ~ ChiSquare(n): the variance equation.
inline StructuralEquation scaled_chi2_equation(double n) {
  StructuralEquation eq;
  eq.gamma_dist = dist::ChiSquare{n};
  eq.gamma_domain = Interval::positive();
  eq.theta_domain = Interval::positive();
  eq.phi = [=](double g, double theta) { return theta * g / n; };
  eq.invert = [=](double q, double g) { return n * q / g; };
  eq.pivot = [=](double q, double theta) { return n * q / theta; };
  return eq;
}

/// Standard normal truncated to [lo, hi] with hi capped at `upper_limit`
/// (the supremum of the pivot), flagging when the cap bites.
inline void set_truncated_normal_primary(StructuralEquation& eq, double lower_limit, double upper_limit) {
  constexpr double t = kDefaultNormalTruncation;
  double lo = -t, hi = t;
  if (upper_limit < hi) {
    hi = std::nextafter(upper_limit, -INFINITY);
    eq.narrowed = true;
  }
  if (lower_limit > lo) {
    lo = std::nextafter(lower_limit, INFINITY);
    eq.narrowed = true;
  }
  eq.gamma_dist = truncated_standard_normal(lo, hi);
  eq.gamma_domain = Interval::closed(lo, hi);
}

}  // namespace fiducial::models
