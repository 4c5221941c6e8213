#pragma once

// Systematic-scan Gibbs sampler over the full conditional fiducial
// distributions, and the post-burn-in Monte Carlo estimator.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fiducial/diagnostics.hpp"
#include "fiducial/fiducial_core.hpp"
#include "fiducial/model.hpp"
#include "fiducial/sample_matrix.hpp"

namespace fiducial {

/// Supplies the primary value for each conditional draw. The default samples
/// from the equation's primary distribution; tests can pin it.
using PrimaryDrawer = std::function<double(const StructuralEquation&, RngStream&)>;

inline double sample_primary(const StructuralEquation& eq, RngStream& rng) { return sample(eq.gamma_dist, rng); }

/// Stream ids: 2c drives chain c, 2c + 1 its overdispersed start.
inline RngStream chain_stream(std::uint64_t seed, std::size_t chain) { return RngStream(seed, 2 * chain); }
inline RngStream init_stream(std::uint64_t seed, std::size_t chain) { return RngStream(seed, 2 * chain + 1); }

namespace gibbs_detail {

inline std::vector<std::size_t> resolve_scan(const ModelSpec& model, ChainConfig& cfg) {
  if (cfg.scan_order.empty()) cfg.scan_order = model.labels();
  if (cfg.scan_order.size() != model.k()) throw DomainError("scan_order must list every parameter exactly once");
  std::vector<std::size_t> idx;
  for (const auto& label : cfg.scan_order) idx.push_back(model.index_of(label));
  std::vector<std::size_t> sorted = idx;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    if (sorted[j] != j) throw DomainError("scan_order must list every parameter exactly once");
  }
  return idx;
}

inline std::string format_state(const std::vector<std::string>& labels, ParamView theta) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t j = 0; j < theta.size(); ++j) os << (j ? ", " : "") << labels[j] << "=" << theta[j];
  return os.str();
}

inline void resolve_init(const ModelSpec& model, const Dataset& data, ChainConfig& cfg) {
  if (cfg.init.empty()) {
    if (!model.default_init) throw DomainError("model " + model.name + " has no default initial state");
    const std::vector<double> base = model.default_init(data);
    cfg.init.push_back(base);
    for (std::size_t c = 1; c < cfg.chains; ++c) {
      std::vector<double> start = base;
      if (model.jitter_init) {
        RngStream rng = init_stream(cfg.seed, c);
        for (int attempt = 0; attempt < 100; ++attempt) {
          std::vector<double> cand = model.jitter_init(data, base, rng);
          if (model.in_domain(cand, data)) {
            start = std::move(cand);
            break;
          }
        }
      }
      cfg.init.push_back(std::move(start));
    }
  } else if (cfg.init.size() == 1 && cfg.chains > 1) {
    cfg.init.resize(cfg.chains, cfg.init.front());
  }
  if (cfg.init.size() != cfg.chains) throw DomainError("init must give one vector, or one per chain");
  for (std::size_t c = 0; c < cfg.chains; ++c) {
    if (!model.in_domain(cfg.init[c], data)) {
      throw DomainError("initial state of chain " + std::to_string(c) + " is outside the parameter domain (" +
                        format_state(model.labels(), cfg.init[c]) + ")");
    }
  }
}

}  // namespace gibbs_detail

/// Checks every conditional's gamma -> theta map at `theta`; throws
/// StructuralError naming the first that is not injective, and returns one
/// warning line per conditional whose equation is approximate or narrowed.
inline std::vector<std::string> check_conditionals(const ModelSpec& model, const Dataset& data, ParamView theta) {
  std::vector<std::string> warnings;
  for (const auto& cond : model.conditionals) {
    const double q = cond.statistic.compute(data, theta);
    const StructuralEquation eq = cond.equation(data, theta);
    const InjectivityReport rep = check_injectivity(eq, q);
    if (!rep.injective) {
      StructuralError err(cond.target + ": structural equation is not injective at the initial state: " + rep.detail,
                          cond.target, q, std::numeric_limits<double>::quiet_NaN());
      err.state.assign(theta.begin(), theta.end());
      throw err;
    }
    if (eq.narrowed) {
      std::ostringstream os;
      os << cond.target << ": primary variable truncated to " << describe(eq.gamma_dist)
         << " so that the equation stays solvable";
      warnings.push_back(os.str());
    }
    if (eq.approximate) warnings.push_back(cond.target + ": conditional uses a normal approximation to its statistic");
  }
  return warnings;
}

/// Runs `config.chains` independent chains of `config.m` systematic-scan cycles.
///
/// Output depends only on (model, data, config minus threads).
inline SampleMatrix run(const ModelSpec& model, const Dataset& data, ChainConfig config,
                        const PrimaryDrawer& primary = sample_primary) {
  if (config.m == 0) throw DomainError("m must be positive");
  if (config.b >= config.m) throw DomainError("burn-in b must be smaller than m");
  if (config.chains == 0) throw DomainError("chains must be at least 1");
  if (model.conditionals.size() != model.k()) throw DomainError("model has a missing conditional sampler");
  if (model.validate_data) model.validate_data(data);
  const std::vector<std::size_t> scan = gibbs_detail::resolve_scan(model, config);
  gibbs_detail::resolve_init(model, data, config);

  std::vector<std::string> warnings;
  if (config.check_injectivity) warnings = check_conditionals(model, data, config.init.front());

  SampleMatrix out(model.labels(), config);
  out.warnings() = warnings;
  const std::size_t k = model.k();
  std::vector<std::vector<std::size_t>> narrowed(config.chains, std::vector<std::size_t>(k, 0));
  std::vector<std::exception_ptr> failures(config.chains);

  auto run_chain = [&](std::size_t c) {
    RngStream rng = chain_stream(config.seed, c);
    std::vector<double> theta = config.init[c];
    std::size_t cycle = 0;
    try {
      for (; cycle < config.m; ++cycle) {
        for (std::size_t j : scan) {
          const auto& cond = model.conditionals[j];
          const double q = cond.statistic.compute(data, theta);
          const StructuralEquation eq = cond.equation(data, theta);
          if (eq.narrowed) ++narrowed[c][j];
          theta[j] = draw_with_primary(cond, eq, q, primary(eq, rng));
        }
        std::copy(theta.begin(), theta.end(), out.row(c, cycle).begin());
      }
    } catch (StructuralError& e) {
      e.chain = static_cast<long>(c);
      e.cycle = static_cast<long>(cycle);
      e.state = theta;
      failures[c] = std::current_exception();
    } catch (const Error& e) {
      StructuralError err(std::string(e.what()) + " [chain " + std::to_string(c) + ", cycle " + std::to_string(cycle) +
                              ", state " + gibbs_detail::format_state(model.labels(), theta) + "]",
                          "", std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN());
      err.chain = static_cast<long>(c);
      err.cycle = static_cast<long>(cycle);
      err.state = theta;
      failures[c] = std::make_exception_ptr(err);
    } catch (...) {
      failures[c] = std::current_exception();
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(config.threads, 1, config.chains);
  if (threads == 1) {
    for (std::size_t c = 0; c < config.chains; ++c) run_chain(c);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t c = t; c < config.chains; c += threads) run_chain(c);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  for (std::size_t c = 0; c < config.chains; ++c) {
    for (std::size_t j = 0; j < k; ++j) out.narrowed_draws()[j] += narrowed[c][j];
  }
  return out;
}

struct Estimate {
  double value = 0.0;
  double se = 0.0;   // sd / sqrt(ESS)
  double ess = 0.0;
  std::size_t n = 0;
};

/// (1 / (m - b)) sum_{i > b} h(theta^(i)) pooled over chains, with an
/// autocorrelation-adjusted standard error. Chains shorter than 50 draws use
/// the plain i.i.d. standard error.
inline Estimate estimate(const std::function<double(ParamView)>& h, const SampleMatrix& s) {
  if (!(s.m() > s.b())) throw DomainError("estimate: need m > b");
  ChainSet chains(s.chains());
  double total = 0.0;
  for (std::size_t c = 0; c < s.chains(); ++c) {
    for (std::size_t i = s.b(); i < s.m(); ++i) {
      chains[c].push_back(h(s.row(c, i)));
      total += chains[c].back();
    }
  }
  Estimate e;
  e.n = s.chains() * (s.m() - s.b());
  e.value = total / static_cast<double>(e.n);
  double ss = 0.0;
  for (const auto& ch : chains) {
    for (double v : ch) ss += (v - e.value) * (v - e.value);
  }
  const double sd = e.n > 1 ? std::sqrt(ss / static_cast<double>(e.n - 1)) : 0.0;
  e.ess = s.m() - s.b() >= 50 ? effective_sample_size(chains) : static_cast<double>(e.n);
  e.se = sd / std::sqrt(e.ess);
  return e;
}

}  // namespace fiducial
