#pragma once

// Split R-hat, effective sample size and per-parameter summaries.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "fiducial/errors.hpp"
#include "fiducial/sample_matrix.hpp"

namespace fiducial {

using ChainSet = std::vector<std::vector<double>>;

namespace diag_detail {

inline double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double var_of(const std::vector<double>& v, double mu) {
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return s / static_cast<double>(v.size() - 1);
}

inline void require_equal_lengths(const ChainSet& chains, const char* who) {
  if (chains.empty()) throw DomainError(std::string(who) + ": no chains");
  for (const auto& c : chains) {
    if (c.size() != chains.front().size()) throw DomainError(std::string(who) + ": chains differ in length");
  }
}

/// (W, var+) for equal-length sequences.
inline std::pair<double, double> within_and_pooled(const ChainSet& seqs) {
  const double n = static_cast<double>(seqs.front().size());
  const double mcount = static_cast<double>(seqs.size());
  std::vector<double> means;
  double w = 0.0;
  for (const auto& s : seqs) {
    means.push_back(mean_of(s));
    w += var_of(s, means.back());
  }
  w /= mcount;
  double b = 0.0;
  if (seqs.size() > 1) {
    const double grand = mean_of(means);
    for (double mu : means) b += (mu - grand) * (mu - grand);
    b *= n / (mcount - 1.0);
  }
  return {w, (n - 1.0) / n * w + b / n};
}

}  // namespace diag_detail

/// Split each chain into halves (the middle draw is dropped for odd lengths).
inline ChainSet split_halves(const ChainSet& chains) {
  ChainSet out;
  for (const auto& c : chains) {
    const std::size_t half = c.size() / 2;
    out.emplace_back(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(half));
    out.emplace_back(c.end() - static_cast<std::ptrdiff_t>(half), c.end());
  }
  return out;
}

/// Potential scale reduction on split half-chains.
///
/// Throws DegenerateDataError when every split has zero variance.
inline double split_rhat(const ChainSet& chains, std::size_t min_split = 10) {
  diag_detail::require_equal_lengths(chains, "split_rhat");
  if (chains.front().size() / 2 < min_split) {
    throw DomainError("split_rhat: split halves need at least " + std::to_string(min_split) + " draws");
  }
  const ChainSet halves = split_halves(chains);
  const auto [w, vplus] = diag_detail::within_and_pooled(halves);
  if (!(w > 0.0)) throw DegenerateDataError("split_rhat: zero within-chain variance in every split");
  return std::sqrt(vplus / w);
}

inline double split_rhat(const SampleMatrix& s, const std::string& param) {
  const std::size_t j = s.index_of(param);
  ChainSet chains;
  for (std::size_t c = 0; c < s.chains(); ++c) chains.push_back(s.chain_values(c, j));
  return split_rhat(chains);
}

/// Multi-chain effective sample size, N / (1 + 2 sum rho_t), with the
/// autocorrelations truncated by Geyer's initial monotone positive sequence.
/// Result is clipped to [1, N]; constant input gives 1.
inline double effective_sample_size(const ChainSet& chains, std::size_t min_length = 50) {
  diag_detail::require_equal_lengths(chains, "effective_sample_size");
  const std::size_t n = chains.front().size();
  if (n < min_length) {
    throw DomainError("effective_sample_size: need at least " + std::to_string(min_length) + " draws per chain");
  }
  const double total = static_cast<double>(n * chains.size());
  const auto [w, vplus] = diag_detail::within_and_pooled(chains);
  if (!(vplus > 0.0)) return 1.0;

  std::vector<double> means;
  for (const auto& c : chains) means.push_back(diag_detail::mean_of(c));
  // rho_t = 1 - (W - mean autocovariance_t) / var+
  auto rho = [&, w = w, vplus = vplus](std::size_t t) {
    double acov = 0.0;
    for (std::size_t c = 0; c < chains.size(); ++c) {
      const auto& v = chains[c];
      double s = 0.0;
      for (std::size_t i = 0; i + t < n; ++i) s += (v[i] - means[c]) * (v[i + t] - means[c]);
      acov += s / static_cast<double>(n);
    }
    acov /= static_cast<double>(chains.size());
    return 1.0 - (w - acov) / vplus;
  };

  double sum_pairs = 0.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t + 1 < n; t += 2) {
    double pair = rho(t) + rho(t + 1);
    if (t > 0 && !(pair > 0.0)) break;
    pair = std::min(pair, prev_pair);
    prev_pair = pair;
    sum_pairs += pair;
  }
  const double tau = -1.0 + 2.0 * sum_pairs;
  if (!(tau > 0.0)) return total;
  return std::clamp(total / tau, 1.0, total);
}

inline double effective_sample_size(const SampleMatrix& s, const std::string& param) {
  const std::size_t j = s.index_of(param);
  ChainSet chains;
  for (std::size_t c = 0; c < s.chains(); ++c) chains.push_back(s.chain_values(c, j));
  return effective_sample_size(chains);
}

/// Sample quantile with linear interpolation between order statistics.
inline double sample_quantile(std::vector<double> sorted, double p, bool already_sorted = false) {
  if (sorted.empty()) throw DomainError("sample_quantile: empty sample");
  if (!already_sorted) std::sort(sorted.begin(), sorted.end());
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct Histogram {
  std::vector<double> edges;  // bins + 1 entries
  std::vector<std::size_t> counts;

  double width(std::size_t i) const { return edges[i + 1] - edges[i]; }
  std::size_t total() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }
  double density(std::size_t i) const {
    return static_cast<double>(counts[i]) / (static_cast<double>(total()) * width(i));
  }
};

/// Equal-width histogram spanning [min, max] of the sample. A constant sample
/// gets a unit-width range centred on its value.
inline Histogram make_histogram(const std::vector<double>& v, std::size_t bins = 60) {
  if (v.empty() || bins == 0) throw DomainError("make_histogram: empty sample or zero bins");
  auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  double lo = *mn, hi = *mx;
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  Histogram h;
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  h.edges.back() = hi;
  h.counts.assign(bins, 0);
  const double scale = static_cast<double>(bins) / (hi - lo);
  for (double x : v) {
    auto i = static_cast<std::size_t>((x - lo) * scale);
    if (i >= bins) i = bins - 1;
    ++h.counts[i];
  }
  return h;
}

struct ConvergenceThresholds {
  double max_rhat = 1.05;
  double min_ess = 400.0;
};

struct ParamSummary {
  std::string label;
  double rhat = std::numeric_limits<double>::quiet_NaN();
  bool rhat_degenerate = false;
  double ess = std::numeric_limits<double>::quiet_NaN();
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0, q50 = 0.0, q975 = 0.0;
  Histogram hist;
  std::size_t narrowed_draws = 0;
  bool converged = false;
};

struct DiagnosticsReport {
  std::size_t chains = 0, m = 0, b = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> scan_order;
  std::vector<std::string> warnings;
  ConvergenceThresholds thresholds;
  std::vector<ParamSummary> params;
  bool converged = false;

  const ParamSummary& param(const std::string& label) const {
    for (const auto& p : params) {
      if (p.label == label) return p;
    }
    throw DomainError("diagnostics report has no parameter '" + label + "'");
  }
};

inline DiagnosticsReport summarize(const SampleMatrix& s, std::size_t bins = 60, ConvergenceThresholds th = {}) {
  if (!(s.m() > s.b())) throw DomainError("summarize: need m > b");
  DiagnosticsReport r;
  r.chains = s.chains();
  r.m = s.m();
  r.b = s.b();
  r.seed = s.config().seed;
  r.scan_order = s.config().scan_order;
  r.warnings = s.warnings();
  r.thresholds = th;
  r.converged = true;
  const std::size_t len = s.m() - s.b();
  for (std::size_t j = 0; j < s.k(); ++j) {
    ParamSummary p;
    p.label = s.labels()[j];
    ChainSet chains;
    for (std::size_t c = 0; c < s.chains(); ++c) chains.push_back(s.chain_values(c, j));
    if (len / 2 >= 10) {
      try {
        p.rhat = split_rhat(chains);
      } catch (const DegenerateDataError&) {
        p.rhat_degenerate = true;
      }
    }
    if (len >= 50) p.ess = effective_sample_size(chains);
    std::vector<double> all = s.pooled(j);
    p.mean = diag_detail::mean_of(all);
    p.sd = all.size() > 1 ? std::sqrt(diag_detail::var_of(all, p.mean)) : 0.0;
    p.hist = make_histogram(all, bins);
    std::sort(all.begin(), all.end());
    p.q025 = sample_quantile(all, 0.025, true);
    p.q50 = sample_quantile(all, 0.5, true);
    p.q975 = sample_quantile(all, 0.975, true);
    if (j < s.narrowed_draws().size()) p.narrowed_draws = s.narrowed_draws()[j];
    p.converged = p.rhat < th.max_rhat && p.ess > th.min_ess;
    r.converged = r.converged && p.converged;
    r.params.push_back(std::move(p));
  }
  return r;
}

}  // namespace fiducial
