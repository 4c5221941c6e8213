#pragma once

// Ratio-constancy check of full conditionals against a proposed joint kernel.
//
// If p(theta) is a joint density with the given conditionals, then
// log p(theta_j, theta_-j) - log f(theta_j | theta_-j) does not depend on
// theta_j. A finite grid can only falsify this, so "compatible" means no
// violation was found at the tested resolution.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "fiducial/model.hpp"
#include "fiducial/randvar.hpp"

namespace fiducial {

enum class Verdict { compatible, incompatible, inconclusive, support_mismatch };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::compatible: return "compatible";
    case Verdict::incompatible: return "incompatible";
    case Verdict::inconclusive: return "inconclusive";
    case Verdict::support_mismatch: return "support-mismatch";
  }
  return "?";
}

using JointKernel = std::function<double(ParamView)>;
/// (theta_j, full theta with theta_-j set) -> log f(theta_j | theta_-j).
using ConditionalLogDensity = std::function<double(double, ParamView)>;

struct SliceResult {
  std::vector<double> fixed;  // theta at which theta_-j is held
  std::vector<double> grid;
  std::vector<double> log_ratio;
  double spread = 0.0;
};

struct CompatReport {
  std::string param;
  std::size_t index = 0;
  std::vector<SliceResult> slices;
  double log_ratio_spread = 0.0;  // max over slices
  double tol = 0.0;
  bool approximate = false;
  Verdict verdict = Verdict::inconclusive;
  std::string note;
};

inline constexpr double kClosedFormTolerance = 1e-8;
inline constexpr double kApproximateTolerance = 1e-3;

/// Per-slice grids. `slices[s]` is a full parameter vector whose entry j is
/// overwritten by each grid point of `grids[s]`.
inline CompatReport ratio_constancy(const JointKernel& joint, const ConditionalLogDensity& conditional,
                                    std::size_t j, const std::vector<std::vector<double>>& slices,
                                    const std::vector<std::vector<double>>& grids, double tol) {
  if (slices.size() < 3) throw DomainError("ratio_constancy: need at least 3 slices");
  if (grids.size() != slices.size()) throw DomainError("ratio_constancy: one grid per slice");
  for (const auto& g : grids) {
    if (g.size() < 20) throw DomainError("ratio_constancy: need at least 20 grid points per slice");
  }
  CompatReport rep;
  rep.index = j;
  rep.tol = tol;
  bool mismatch = false, unusable = false;
  for (std::size_t s = 0; s < slices.size(); ++s) {
    if (j >= slices[s].size()) throw DomainError("ratio_constancy: parameter index out of range");
    SliceResult sr;
    sr.fixed = slices[s];
    sr.grid = grids[s];
    std::vector<double> theta = slices[s];
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : grids[s]) {
      theta[j] = v;
      const double lj = joint(theta);
      const double lc = conditional(v, theta);
      if (std::isfinite(lc) && lj == -std::numeric_limits<double>::infinity()) mismatch = true;
      if (!std::isfinite(lj) || !std::isfinite(lc)) {
        unusable = true;
        sr.log_ratio.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      const double r = lj - lc;
      sr.log_ratio.push_back(r);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    sr.spread = hi >= lo ? hi - lo : std::numeric_limits<double>::quiet_NaN();
    rep.log_ratio_spread = std::max(rep.log_ratio_spread, std::isnan(sr.spread) ? 0.0 : sr.spread);
    rep.slices.push_back(std::move(sr));
  }
  if (mismatch) {
    rep.verdict = Verdict::support_mismatch;
    rep.note = "joint kernel is zero at grid points where the conditional has positive density";
  } else if (rep.log_ratio_spread > tol) {
    rep.verdict = Verdict::incompatible;
    rep.note = "log ratio varies with the parameter on at least one slice";
  } else if (unusable) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "non-finite densities on the grid";
  } else {
    rep.verdict = Verdict::compatible;
    rep.note = "no violation detected on the tested grid (a finite-grid check, not a proof)";
  }
  return rep;
}

/// Same grid on every slice.
inline CompatReport ratio_constancy(const JointKernel& joint, const ConditionalLogDensity& conditional,
                                    std::size_t j, const std::vector<std::vector<double>>& slices,
                                    const std::vector<double>& grid, double tol) {
  return ratio_constancy(joint, conditional, j, slices, std::vector<std::vector<double>>(slices.size(), grid), tol);
}

/// `points` values of the conditional quantile function evenly spaced in
/// probability over the central `mass` of the distribution.
inline std::vector<double> central_grid(const std::function<double(double)>& quantile_fn, std::size_t points = 64,
                                        double mass = 0.99) {
  std::vector<double> g;
  const double lo = 0.5 * (1.0 - mass), hi = 1.0 - lo;
  for (std::size_t i = 0; i < points; ++i) {
    g.push_back(quantile_fn(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1)));
  }
  return g;
}

struct CompatOptions {
  std::size_t slices = 3;
  std::size_t points = 64;
  double closed_form_tol = kClosedFormTolerance;
  double approximate_tol = kApproximateTolerance;
  std::uint64_t seed = 1;
};

/// Slices around the model's default starting point: the first is the start
/// itself, the rest are overdispersed perturbations of it.
inline std::vector<std::vector<double>> default_slices(const ModelSpec& model, const Dataset& data,
                                                       const CompatOptions& opt = {}) {
  std::vector<std::vector<double>> out;
  const std::vector<double> base = model.default_init(data);
  out.push_back(base);
  RngStream rng(opt.seed, 0);
  for (int attempt = 0; out.size() < opt.slices && attempt < 1000; ++attempt) {
    std::vector<double> cand = model.jitter_init ? model.jitter_init(data, base, rng) : base;
    if (model.in_domain(cand, data)) out.push_back(std::move(cand));
  }
  if (out.size() < opt.slices) throw DomainError("could not build enough in-domain slices");
  return out;
}

/// Checks every parameter of `model` against its joint kernel.
///
/// Closed-form conditionals use the tight tolerance; conditionals built on a
/// normal approximation use the loose one and are marked approximate.
inline std::vector<CompatReport> check_model(const ModelSpec& model, const Dataset& data,
                                             const std::vector<std::vector<double>>& slices,
                                             const CompatOptions& opt = {}) {
  if (!model.joint_kernel) {
    CompatReport rep;
    rep.param = "*";
    rep.verdict = Verdict::inconclusive;
    rep.note = "model " + model.name + " has no proposed joint density";
    return {rep};
  }
  if (model.validate_data) model.validate_data(data);
  std::vector<CompatReport> out;
  const JointKernel joint = [&](ParamView th) { return model.joint_kernel(th, data); };
  for (std::size_t j = 0; j < model.k(); ++j) {
    std::vector<std::vector<double>> grids;
    bool approximate = false;
    for (const auto& s : slices) {
      const ConditionalDensity cd = conditional_density(model, data, s, j);
      approximate = approximate || cd.approximate;
      grids.push_back(central_grid(cd.quantile, opt.points));
    }
    const ConditionalLogDensity cond = [&](double v, ParamView th) {
      return conditional_density(model, data, th, j).log_density(v);
    };
    CompatReport rep = ratio_constancy(joint, cond, j, slices, grids,
                                       approximate ? opt.approximate_tol : opt.closed_form_tol);
    rep.param = model.params[j].name;
    rep.approximate = approximate;
    if (approximate) rep.note += " [approximate-method check]";
    out.push_back(std::move(rep));
  }
  return out;
}

inline std::vector<CompatReport> check_model(const ModelSpec& model, const Dataset& data,
                                             const CompatOptions& opt = {}) {
  return check_model(model, data, default_slices(model, data, opt), opt);
}

}  // namespace fiducial
