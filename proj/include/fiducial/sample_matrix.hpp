#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fiducial/errors.hpp"

namespace fiducial {

/// Run parameters of the Gibbs sampler.
struct ChainConfig {
  std::size_t m = 0;    // cycles per chain, burn-in included
  std::size_t b = 500;  // discarded initial cycles
  std::size_t chains = 1;
  std::uint64_t seed = 0;
  std::vector<std::string> scan_order;      // empty: the model's declared order
  std::vector<std::vector<double>> init;    // empty: model default; one vector is shared by every chain
  std::size_t threads = 1;                  // does not affect the draws
  bool check_injectivity = true;
};

/// chains x m x k draws, stored chain-major then cycle then parameter.
class SampleMatrix {
 public:
  SampleMatrix() = default;
  SampleMatrix(std::vector<std::string> labels, ChainConfig config)
      : labels_(std::move(labels)), config_(std::move(config)) {
    values_.assign(config_.chains * config_.m * labels_.size(), 0.0);
    narrowed_draws_.assign(labels_.size(), 0);
  }

  std::size_t chains() const noexcept { return config_.chains; }
  std::size_t m() const noexcept { return config_.m; }
  std::size_t b() const noexcept { return config_.b; }
  std::size_t k() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const ChainConfig& config() const noexcept { return config_; }
  ChainConfig& config() noexcept { return config_; }

  std::size_t index_of(const std::string& label) const {
    for (std::size_t j = 0; j < labels_.size(); ++j) {
      if (labels_[j] == label) return j;
    }
    throw DomainError("sample matrix has no parameter '" + label + "'");
  }

  double& at(std::size_t chain, std::size_t cycle, std::size_t j) { return values_[(chain * m() + cycle) * k() + j]; }
  double at(std::size_t chain, std::size_t cycle, std::size_t j) const {
    return values_[(chain * m() + cycle) * k() + j];
  }

  std::span<const double> row(std::size_t chain, std::size_t cycle) const {
    return {values_.data() + (chain * m() + cycle) * k(), k()};
  }
  std::span<double> row(std::size_t chain, std::size_t cycle) { return {values_.data() + (chain * m() + cycle) * k(), k()}; }

  /// Post-burn-in draws of parameter j for one chain.
  std::vector<double> chain_values(std::size_t chain, std::size_t j) const {
    std::vector<double> out;
    out.reserve(m() - b());
    for (std::size_t i = b(); i < m(); ++i) out.push_back(at(chain, i, j));
    return out;
  }

  /// Post-burn-in draws of parameter j, pooled over chains in chain order.
  std::vector<double> pooled(std::size_t j) const {
    std::vector<double> out;
    out.reserve(chains() * (m() - b()));
    for (std::size_t c = 0; c < chains(); ++c) {
      for (std::size_t i = b(); i < m(); ++i) out.push_back(at(c, i, j));
    }
    return out;
  }

  const std::vector<double>& values() const noexcept { return values_; }

  /// Count of draws per parameter whose primary distribution had to be cut
  /// below the default truncation.
  std::vector<std::size_t>& narrowed_draws() noexcept { return narrowed_draws_; }
  const std::vector<std::size_t>& narrowed_draws() const noexcept { return narrowed_draws_; }

  std::vector<std::string>& warnings() noexcept { return warnings_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  std::vector<std::string> labels_;
  ChainConfig config_;
  std::vector<double> values_;
  std::vector<std::size_t> narrowed_draws_;
  std::vector<std::string> warnings_;
};

}  // namespace fiducial
