// Copyright 2026 The Milq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "milq/privacy.hpp"

#include <cmath>
#include <map>
#include <vector>

#include "milq/data.hpp"
#include "milq/errors.hpp"
#include "milq/rng.hpp"

namespace milq {

namespace {

// Cap on the number of masks the exhaustive mode will enumerate.
constexpr double kMaxExhaustiveMasks = 200000.0;

double binomial(std::int64_t N, std::int64_t n) {
  double value = 1.0;
  for (std::int64_t i = 0; i < n; ++i) {
    value *= static_cast<double>(N - i) / static_cast<double>(i + 1);
    if (value > 1e18) return value;
  }
  return value;
}

void check_sensitivity_args(const DataUniverse& universe, std::int64_t n,
                            const TrainingConfig& config) {
  config.validate();
  if (config.kind != ModelKind::linear) {
    throw std::invalid_argument(
        "neighbor_sensitivity: unsupported model kind; the deterministic "
        "ridge trainer is required");
  }
  if (n <= 0 || n >= universe.size()) {
    throw std::invalid_argument("neighbor_sensitivity: need 0 < n < N");
  }
}

Eigen::VectorXd trained_theta(const DataUniverse& universe, const Rows& rows,
                              const TrainingConfig& config) {
  return train_ridge(universe, rows, config).theta;
}

}  // namespace

void DpBudget::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("DpBudget: epsilon must be positive");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("DpBudget: delta must lie in (0, 1)");
  }
}

SensitivityEstimate neighbor_sensitivity_exhaustive(
    const DataUniverse& universe, std::int64_t n,
    const TrainingConfig& config) {
  check_sensitivity_args(universe, n, config);
  const std::int64_t N = universe.size();
  if (N > 62 || binomial(N, n) > kMaxExhaustiveMasks) {
    throw std::invalid_argument(
        "neighbor_sensitivity: universe too large for exhaustive "
        "enumeration; use the sampled mode");
  }

  // Enumerate all n-subsets; remember theta per mask keyed by bitset.
  std::map<std::uint64_t, Eigen::VectorXd> theta_by_mask;
  std::vector<std::int64_t> combo(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) combo[static_cast<std::size_t>(i)] = i;

  const auto mask_key = [](const Rows& rows) {
    std::uint64_t key = 0;
    for (std::int64_t r : rows) key |= std::uint64_t{1} << r;
    return key;
  };

  for (;;) {
    theta_by_mask.emplace(mask_key(combo),
                          trained_theta(universe, combo, config));
    // next lexicographic combination
    std::int64_t i = n - 1;
    while (i >= 0 && combo[static_cast<std::size_t>(i)] == N - n + i) --i;
    if (i < 0) break;
    ++combo[static_cast<std::size_t>(i)];
    for (std::int64_t j = i + 1; j < n; ++j) {
      combo[static_cast<std::size_t>(j)] =
          combo[static_cast<std::size_t>(j - 1)] + 1;
    }
  }

  SensitivityEstimate est;
  est.method = SensitivityMethod::exhaustive;
  for (const auto& [key, theta] : theta_by_mask) {
    for (std::int64_t out = 0; out < N; ++out) {
      if (!(key & (std::uint64_t{1} << out))) continue;
      for (std::int64_t in = 0; in < N; ++in) {
        if (key & (std::uint64_t{1} << in)) continue;
        const std::uint64_t neighbor =
            (key & ~(std::uint64_t{1} << out)) | (std::uint64_t{1} << in);
        const double dist = (theta - theta_by_mask.at(neighbor)).norm();
        est.delta_theta = std::max(est.delta_theta, dist);
        ++est.pairs_evaluated;
      }
    }
  }
  return est;
}

SensitivityEstimate neighbor_sensitivity_sampled(const DataUniverse& universe,
                                                 std::int64_t n,
                                                 const TrainingConfig& config,
                                                 std::size_t pair_count,
                                                 std::uint64_t seed) {
  check_sensitivity_args(universe, n, config);
  if (pair_count == 0) {
    throw std::invalid_argument("neighbor_sensitivity: pair_count must be >= 1");
  }
  const std::int64_t N = universe.size();

  SensitivityEstimate est;
  est.method = SensitivityMethod::sampled;
  est.pairs_evaluated = pair_count;
  for (std::size_t k = 0; k < pair_count; ++k) {
    Rng rng(derive_seed(seed, {fnv1a64("sensitivity"), k}));
    MembershipMask mask =
        sample_mask(N, n, derive_seed(seed, {fnv1a64("sens-mask"), k}));
    Rows members = mask.member_rows();
    Rows nonmembers = mask.nonmember_rows();
    const std::size_t out_idx = static_cast<std::size_t>(rng.below(members.size()));
    const std::size_t in_idx =
        static_cast<std::size_t>(rng.below(nonmembers.size()));

    Rows swapped = members;
    swapped[out_idx] = nonmembers[in_idx];
    const double dist = (trained_theta(universe, members, config) -
                         trained_theta(universe, swapped, config))
                            .norm();
    est.delta_theta = std::max(est.delta_theta, dist);
  }
  return est;
}

double gaussian_mechanism_sigma(double delta_theta, const DpBudget& budget) {
  budget.validate();
  if (delta_theta < 0.0 || !std::isfinite(delta_theta)) {
    throw std::invalid_argument(
        "gaussian_mechanism_sigma: delta_theta must be >= 0");
  }
  return std::sqrt(2.0 * std::log(1.25 / budget.delta)) * delta_theta /
         budget.epsilon;
}

ModelParams add_noise(const ModelParams& params, double sigma,
                      std::uint64_t seed) {
  if (sigma < 0.0 || !std::isfinite(sigma)) {
    throw std::invalid_argument("add_noise: sigma must be >= 0");
  }
  ModelParams out = params;
  out.provenance.noise_sigma = sigma;
  if (sigma == 0.0) return out;
  Rng rng(derive_seed(seed, {fnv1a64("dp-noise")}));
  for (std::int64_t i = 0; i < out.theta.size(); ++i) {
    out.theta(i) += sigma * rng.normal();
  }
  return out;
}

}  // namespace milq
