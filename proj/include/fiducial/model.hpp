#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fiducial/dataset.hpp"
#include "fiducial/errors.hpp"
#include "fiducial/fiducial_core.hpp"
#include "fiducial/randvar.hpp"

namespace fiducial {

struct Parameter {
  std::string name;
  Interval domain;
};

/// A model family: parameters, one conditional fiducial sampler per parameter,
/// an optional proposed joint kernel, and a forward simulator.
struct ModelSpec {
  std::string name;
  Layout layout = Layout::univariate;
  std::vector<Parameter> params;
  std::vector<ConditionalFiducialSampler> conditionals;

  /// Printed closed-form log density of each full conditional, where one
  /// exists; empty entries fall back to the density implied by the equation.
  std::vector<std::function<double(const Dataset&, ParamView, double)>> printed_log_density;

  /// Log of an unnormalised joint density (empty when none is known).
  std::function<double(ParamView, const Dataset&)> joint_kernel;

  /// Throws DomainError / DegenerateDataError when the data are unusable.
  std::function<void(const Dataset&)> validate_data;

  /// Data-dependent parameter constraints beyond the per-parameter domains.
  std::function<bool(ParamView, const Dataset&)> extra_domain;

  /// n independent observations from g(x | theta).
  std::function<Dataset(ParamView, std::size_t, RngStream&)> simulate;

  /// Method-of-moments style starting point.
  std::function<std::vector<double>(const Dataset&)> default_init;

  /// Overdispersed starting point around `base` for chains beyond the first.
  std::function<std::vector<double>(const Dataset&, ParamView, RngStream&)> jitter_init;

  std::size_t k() const noexcept { return params.size(); }

  std::size_t index_of(const std::string& label) const {
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (params[i].name == label) return i;
    }
    throw DomainError("model " + name + " has no parameter '" + label + "'");
  }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (const auto& p : params) out.push_back(p.name);
    return out;
  }

  bool in_domain(ParamView theta, const Dataset& data) const {
    if (theta.size() != params.size()) return false;
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (!params[i].domain.contains(theta[i])) return false;
    }
    return !extra_domain || extra_domain(theta, data);
  }
};

/// Log density and quantile function of one full conditional at a fixed
/// theta_{-j}.
struct ConditionalDensity {
  std::function<double(double)> log_density;
  std::function<double(double)> quantile;
  bool approximate = false;
  bool printed = false;  // log_density comes from the closed form rather than the equation
};

/// The full conditional of parameter j given the rest of `theta`.
inline ConditionalDensity conditional_density(const ModelSpec& model, const Dataset& data,
                                              ParamView theta, std::size_t j) {
  const auto& sampler = model.conditionals.at(j);
  const double q = sampler.statistic.compute(data, theta);
  StructuralEquation eq = sampler.equation(data, theta);
  ConditionalDensity out;
  out.approximate = eq.approximate;
  out.quantile = [eq, q](double p) { return implied_quantile(eq, q, p); };
  if (j < model.printed_log_density.size() && model.printed_log_density[j]) {
    std::vector<double> fixed(theta.begin(), theta.end());
    auto printed = model.printed_log_density[j];
    out.log_density = [printed, &data, fixed](double v) { return printed(data, fixed, v); };
    out.printed = true;
  } else {
    out.log_density = [eq, q](double v) { return implied_log_density(eq, q, v); };
  }
  return out;
}

namespace models::detail {

inline void require_n(const Dataset& data, std::size_t min_n, const std::string& model) {
  if (data.n() < min_n) {
    std::ostringstream os;
    os << model << ": need at least " << min_n << " observations, got " << data.n();
    throw DomainError(os.str());
  }
}

inline void require_layout(const Dataset& data, Layout layout, const std::string& model) {
  if (data.layout() != layout) throw DomainError(model + ": dataset has the wrong column layout");
}

inline double positive_or_throw(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << what << " must be positive (got " << v << ")";
    throw DomainError(os.str());
  }
  return v;
}

}  // namespace models::detail

}  // namespace fiducial
