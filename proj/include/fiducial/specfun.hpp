#pragma once

// Special functions and one-dimensional root solvers.
//
// Everything here is a pure function of its arguments.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fiducial/errors.hpp"

namespace fiducial::specfun {

/// Closed search interval for a root solver.
struct Bracket {
  double lo;
  double hi;
};

namespace detail {

inline void require_positive(double x, const char* fn) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    std::ostringstream os;
    os << fn << ": argument must be positive and finite, got " << x;
    throw DomainError(os.str());
  }
}

// Threshold above which the asymptotic expansions below are accurate to
// double precision.
inline constexpr double kAsymptoticStart = 10.0;

}  // namespace detail

/// Natural log of the gamma function for x > 0.
inline double ln_gamma(double x) {
  detail::require_positive(x, "ln_gamma");
  if (x == 1.0 || x == 2.0) return 0.0;
  double shift = 0.0;
  if (x < detail::kAsymptoticStart) {
    double prod = 1.0;
    while (x < detail::kAsymptoticStart) {
      prod *= x;
      x += 1.0;
    }
    shift = std::log(prod);
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Stirling series, Bernoulli coefficients B_2k / (2k (2k-1)).
  const double series =
      inv * (1.0 / 12.0 +
             inv2 * (-1.0 / 360.0 +
                     inv2 * (1.0 / 1260.0 +
                             inv2 * (-1.0 / 1680.0 +
                                     inv2 * (1.0 / 1188.0 +
                                             inv2 * (-691.0 / 360360.0 + inv2 * (1.0 / 156.0)))))));
  const double half_log_2pi = 0.91893853320467274178;
  return (x - 0.5) * std::log(x) - x + half_log_2pi + series - shift;
}

/// Digamma function psi(x) = d/dx ln Gamma(x), x > 0.
inline double digamma(double x) {
  detail::require_positive(x, "digamma");
  double acc = 0.0;
  while (x < detail::kAsymptoticStart) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double series =
      inv2 * (1.0 / 12.0 -
              inv2 * (1.0 / 120.0 -
                      inv2 * (1.0 / 252.0 -
                              inv2 * (1.0 / 240.0 -
                                      inv2 * (1.0 / 132.0 -
                                              inv2 * (691.0 / 32760.0 - inv2 * (1.0 / 12.0)))))));
  return acc + std::log(x) - 0.5 * inv - series;
}

/// Trigamma function psi'(x), x > 0.
inline double trigamma(double x) {
  detail::require_positive(x, "trigamma");
  double acc = 0.0;
  while (x < detail::kAsymptoticStart) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double series =
      inv * (1.0 + inv * (0.5 +
                          inv * (1.0 / 6.0 -
                                 inv2 * (1.0 / 30.0 -
                                         inv2 * (1.0 / 42.0 -
                                                 inv2 * (1.0 / 30.0 -
                                                         inv2 * (5.0 / 66.0 -
                                                                 inv2 * (691.0 / 2730.0 -
                                                                         inv2 * (7.0 / 6.0)))))))));
  return acc + series;
}

/// Standard normal CDF.
inline double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

/// Upper tail of the standard normal, 1 - Phi(z), without cancellation.
inline double normal_sf(double z) {
  return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

/// Standard normal quantile (Wichura, AS 241, PPND16). Relative accuracy ~1e-16.
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    std::ostringstream os;
    os << "normal_quantile: probability must lie in (0,1), got " << p;
    throw DomainError(os.str());
  }
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2509.0809287301226727 * r + 33430.575583588128105) * r + 67265.770927008700853) * r +
                45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((5226.495278852545925 * r + 28729.085735721942674) * r + 39307.89580009271061) * r +
                21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
               1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
               0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
               0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
               7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

/// Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
  detail::require_positive(a, "gamma_p");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double log_front = a * std::log(x) - x - ln_gamma(a);
  constexpr double eps = 1e-16;
  if (x < a + 1.0) {
    double ap = a, del = 1.0 / a, sum = del;
    for (int i = 0; i < 100000; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * eps) break;
    }
    return std::min(1.0, sum * std::exp(log_front));
  }
  // Continued fraction for Q(a,x), modified Lentz.
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return std::max(0.0, 1.0 - std::exp(log_front) * h);
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
inline double gamma_q(double a, double x) {
  detail::require_positive(a, "gamma_q");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - gamma_p(a, x);
  const double log_front = a * std::log(x) - x - ln_gamma(a);
  constexpr double eps = 1e-16, tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return std::exp(log_front) * h;
}

namespace detail {

// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_cf(double a, double b, double x) {
  constexpr double eps = 1e-16, tiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < 100000; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double beta_inc(double a, double b, double x) {
  detail::require_positive(a, "beta_inc");
  detail::require_positive(b, "beta_inc");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_cf(a, b, x) / a;
  return 1.0 - front * detail::beta_cf(b, a, 1.0 - x) / b;
}

/// Finds x in `bracket` with f(x) = target for continuous monotone f.
///
/// Brent's method (inverse quadratic interpolation with bisection fallback).
/// Stops once |f(x) - target| <= tol or the bracket has shrunk to x_tol
/// (floating-point resolution when x_tol is 0).
template <typename F>
double solve_monotone(F&& f, double target, Bracket bracket, double tol = 1e-10,
                      double x_tol = 0.0) {
  if (!(bracket.lo < bracket.hi)) {
    throw BracketError("solve_monotone: bracket must satisfy lo < hi");
  }
  auto eval = [&](double x) {
    const double v = f(x) - target;
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "solve_monotone: non-finite function value at x=" << x;
      throw BracketError(os.str());
    }
    return v;
  };
  double a = bracket.lo, b = bracket.hi;
  double fa = eval(a), fb = eval(b);
  if (std::abs(fa) <= tol) return a;
  if (std::abs(fb) <= tol) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    std::ostringstream os;
    os << "solve_monotone: no sign change on [" << a << ", " << b << "] (f-target = " << fa
       << ", " << fb << ")";
    throw BracketError(os.str());
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < 500; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * x_tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || std::abs(fb) <= tol || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc, r = fb / fc;
        p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
      const double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : std::copysign(tol1, xm);
    fb = eval(b);
  }
  return b;
}

/// Solves f(x) = target for x > 0 with f increasing or decreasing in x.
///
/// Searches in log x, widening the bracket outwards from [1e-3, 1e3] until the
/// sign changes. Throws BracketError when no sign change is found.
template <typename F>
double solve_monotone_positive(F&& f, double target, double tol = 1e-10) {
  auto g = [&](double u) { return f(std::exp(u)); };
  double lo = -7.0, hi = 7.0;
  auto sign_at = [&](double u) {
    const double v = g(u) - target;
    return std::isfinite(v) ? (v > 0.0 ? 1 : (v < 0.0 ? -1 : 0)) : 2;
  };
  int slo = sign_at(lo), shi = sign_at(hi);
  constexpr double kLimit = 690.0;
  while (slo == shi && slo != 0) {
    if (lo <= -kLimit && hi >= kLimit) {
      throw BracketError("solve_monotone_positive: no sign change for x in (1e-300, 1e300)");
    }
    lo = std::max(-kLimit, lo * 2.0);
    hi = std::min(kLimit, hi * 2.0);
    slo = sign_at(lo);
    shi = sign_at(hi);
  }
  // A non-finite end (e.g. underflow at tiny x) is pulled inwards.
  while (slo == 2 && lo < hi) {
    lo += 1.0;
    slo = sign_at(lo);
  }
  while (shi == 2 && hi > lo) {
    hi -= 1.0;
    shi = sign_at(hi);
  }
  return std::exp(solve_monotone(g, target, {lo, hi}, tol));
}

/// The unique positive root t of a*t^2 + b*t + c = 0.
///
/// Throws DegenerateDataError when there is no positive root or two of them.
inline double solve_quadratic_positive(double a, double b, double c) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
    throw DomainError("solve_quadratic_positive: non-finite coefficient");
  }
  std::vector<double> roots;
  if (a == 0.0) {
    if (b != 0.0) roots.push_back(-c / b);
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      // Citardauq form avoids cancellation in the smaller root.
      const double s = std::sqrt(disc);
      const double qq = -0.5 * (b + std::copysign(s, b));
      if (qq != 0.0) {
        roots.push_back(qq / a);
        roots.push_back(c / qq);
      } else {
        roots.push_back(0.0);
      }
    }
  }
  std::vector<double> positive;
  for (double r : roots) {
    if (r > 0.0 && std::isfinite(r)) positive.push_back(r);
  }
  if (positive.size() == 2 && positive[0] == positive[1]) positive.pop_back();
  if (positive.empty()) {
    throw DegenerateDataError("solve_quadratic_positive: no positive root");
  }
  if (positive.size() > 1) {
    throw DegenerateDataError("solve_quadratic_positive: two positive roots, estimate is not unique");
  }
  double t = positive.front();
  // One Newton step polishes the last bits.
  const double deriv = 2.0 * a * t + b;
  if (deriv != 0.0) {
    const double next = t - (a * t * t + b * t + c) / deriv;
    if (next > 0.0 && std::abs(a * next * next + b * next + c) <= std::abs(a * t * t + b * t + c)) {
      t = next;
    }
  }
  return t;
}

/// A root of c[0]*x^3 + c[1]*x^2 + c[2]*x + c[3] inside the open interval.
///
/// When several roots lie in the interval the one with the largest `score` is
/// returned; without a score the antiderivative of the cubic is used, i.e. the
/// cubic is treated as the derivative of the objective being maximised.
/// Throws DegenerateDataError when no root lies in the interval.
inline double solve_cubic_in_interval(const std::array<double, 4>& c, Bracket interval,
                                      const std::function<double(double)>& score = {}) {
  auto poly = [&](double x) { return ((c[0] * x + c[1]) * x + c[2]) * x + c[3]; };
  // Split the interval at the critical points so every piece is monotone.
  std::vector<double> knots{interval.lo, interval.hi};
  const double qa = 3.0 * c[0], qb = 2.0 * c[1], qc = c[2];
  if (qa != 0.0) {
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc > 0.0) {
      const double s = std::sqrt(disc);
      knots.push_back((-qb - s) / (2.0 * qa));
      knots.push_back((-qb + s) / (2.0 * qa));
    }
  } else if (qb != 0.0) {
    knots.push_back(-qc / qb);
  }
  std::vector<double> inner;
  for (double k : knots) {
    if (k >= interval.lo && k <= interval.hi) inner.push_back(k);
  }
  std::sort(inner.begin(), inner.end());
  inner.erase(std::unique(inner.begin(), inner.end()), inner.end());

  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < inner.size(); ++i) {
    const double lo = inner[i], hi = inner[i + 1];
    const double flo = poly(lo), fhi = poly(hi);
    double root;
    if (flo == 0.0) {
      root = lo;
    } else if (fhi == 0.0) {
      root = hi;
    } else if ((flo > 0.0) != (fhi > 0.0)) {
      root = solve_monotone(poly, 0.0, {lo, hi}, 0.0);
    } else {
      continue;
    }
    if (root > interval.lo && root < interval.hi) roots.push_back(root);
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  if (roots.empty()) {
    std::ostringstream os;
    os << "solve_cubic_in_interval: no root in (" << interval.lo << ", " << interval.hi << ")";
    throw DegenerateDataError(os.str());
  }
  if (roots.size() == 1) return roots.front();
  auto objective = [&](double x) {
    if (score) return score(x);
    return ((c[0] / 4.0 * x + c[1] / 3.0) * x + c[2] / 2.0) * x * x + c[3] * x;
  };
  return *std::max_element(roots.begin(), roots.end(),
                           [&](double l, double r) { return objective(l) < objective(r); });
}

}  // namespace fiducial::specfun
