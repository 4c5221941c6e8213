#pragma once

// Independent reference computations used only by the tests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

/// Q_KS(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
inline double kolmogorov_sf(double lambda) {
  if (lambda < 0.2) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

struct KsResult {
  double d = 0.0;
  double p = 1.0;
};

/// One-sample KS with Stephens' small-sample correction of the statistic.
inline KsResult ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  const double sn = std::sqrt(n);
  return {d, kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d)};
}

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_sf((ne + 0.12 + 0.11 / ne) * d)};
}

/// Integral of f over [a, b] (either end may be infinite).
/// Nested integrals need a looser outer tolerance than the inner one.
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
  if (std::isfinite(a) && std::isfinite(b)) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, tol);
  }
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate(f, a, b, std::max(tol, std::sqrt(std::numeric_limits<double>::epsilon())));
}

/// Brute-force argmax of f over a grid on [lo, hi].
inline double grid_argmax(const std::function<double(double)>& f, double lo, double hi, double step) {
  double best = lo, fbest = -INFINITY;
  const auto count = static_cast<long>(std::floor((hi - lo) / step));
  for (long i = 0; i <= count; ++i) {
    const double v = lo + static_cast<double>(i) * step;
    const double fv = f(v);
    if (fv > fbest) {
      fbest = fv;
      best = v;
    }
  }
  return best;
}

}  // namespace oracle
