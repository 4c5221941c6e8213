#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "fiducial/errors.hpp"

namespace fiducial {

/// Column layout of a dataset.
enum class Layout {
  univariate,  ///< one column x
  paired,      ///< (x_i, y_i) pairs of equal length
  two_sample,  ///< independent samples x and y, lengths may differ
};

/// Sums of a column that the catalog's fiducial statistics are built from.
/// Centred sums are kept separately so that sums of squares about an
/// arbitrary point stay accurate.
struct ColumnSummary {
  std::size_t n = 0;
  double sum = 0.0;
  double mean = 0.0;
  double centred_ss = 0.0;  // sum (v - mean)^2
  double min = std::numeric_limits<double>::quiet_NaN();
  double max = std::numeric_limits<double>::quiet_NaN();
  double sum_log = std::numeric_limits<double>::quiet_NaN();     // NaN unless all v > 0
  double sum_log1m = std::numeric_limits<double>::quiet_NaN();   // NaN unless all v < 1

  /// sum (v - about)^2
  double ss_about(double about) const {
    const double d = mean - about;
    return centred_ss + static_cast<double>(n) * d * d;
  }
};

inline ColumnSummary summarize_column(const std::vector<double>& v) {
  ColumnSummary s;
  s.n = v.size();
  if (v.empty()) return s;
  s.sum = std::accumulate(v.begin(), v.end(), 0.0);
  s.mean = s.sum / static_cast<double>(s.n);
  for (double x : v) s.centred_ss += (x - s.mean) * (x - s.mean);
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  s.min = *lo;
  s.max = *hi;
  if (s.min > 0.0) {
    s.sum_log = 0.0;
    for (double x : v) s.sum_log += std::log(x);
  }
  if (s.max < 1.0) {
    s.sum_log1m = 0.0;
    for (double x : v) s.sum_log1m += std::log1p(-x);
  }
  return s;
}

/// Observed data: one or two real columns plus cached summaries.
///
/// Immutable after construction.
class Dataset {
 public:
  static Dataset univariate(std::vector<double> x) {
    return Dataset(Layout::univariate, std::move(x), {});
  }
  static Dataset paired(std::vector<double> x, std::vector<double> y) {
    if (x.size() != y.size()) {
      throw DomainError("Dataset::paired: x and y must have the same length");
    }
    return Dataset(Layout::paired, std::move(x), std::move(y));
  }
  static Dataset two_sample(std::vector<double> x, std::vector<double> y) {
    return Dataset(Layout::two_sample, std::move(x), std::move(y));
  }

  Layout layout() const noexcept { return layout_; }
  const std::vector<double>& x() const noexcept { return x_; }
  const std::vector<double>& y() const noexcept { return y_; }
  std::size_t n() const noexcept { return x_.size(); }
  const ColumnSummary& sx() const noexcept { return sx_; }
  const ColumnSummary& sy() const noexcept { return sy_; }

  /// sum (x_i - x_bar)(y_i - y_bar); paired layout only.
  double centred_sxy() const noexcept { return centred_sxy_; }

  /// sum (x_i - a)(y_i - b); paired layout only.
  double sxy_about(double a, double b) const {
    return centred_sxy_ + static_cast<double>(n()) * (sx_.mean - a) * (sy_.mean - b);
  }

  /// sum x_i^k and sum x_i^k y_i for k = 0..4 (powers of the x column).
  double sum_x_pow(int k) const { return x_pow_.at(static_cast<std::size_t>(k)); }
  double sum_x_pow_y(int k) const { return x_pow_y_.at(static_cast<std::size_t>(k)); }

 private:
  Dataset(Layout layout, std::vector<double> x, std::vector<double> y)
      : layout_(layout), x_(std::move(x)), y_(std::move(y)) {
    for (double v : x_) {
      if (!std::isfinite(v)) throw DomainError("Dataset: non-finite value in column x");
    }
    for (double v : y_) {
      if (!std::isfinite(v)) throw DomainError("Dataset: non-finite value in column y");
    }
    sx_ = summarize_column(x_);
    sy_ = summarize_column(y_);
    x_pow_.assign(5, 0.0);
    x_pow_y_.assign(5, 0.0);
    for (std::size_t i = 0; i < x_.size(); ++i) {
      double p = 1.0;
      for (std::size_t k = 0; k < 5; ++k) {
        x_pow_[k] += p;
        if (layout_ == Layout::paired) x_pow_y_[k] += p * y_[i];
        p *= x_[i];
      }
    }
    if (layout_ == Layout::paired) {
      for (std::size_t i = 0; i < x_.size(); ++i) {
        centred_sxy_ += (x_[i] - sx_.mean) * (y_[i] - sy_.mean);
      }
    }
  }

  Layout layout_;
  std::vector<double> x_;
  std::vector<double> y_;
  ColumnSummary sx_;
  ColumnSummary sy_;
  double centred_sxy_ = 0.0;
  std::vector<double> x_pow_;
  std::vector<double> x_pow_y_;
};

}  // namespace fiducial
