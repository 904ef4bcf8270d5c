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

#ifndef MILQ_PRIVACY_HPP_
#define MILQ_PRIVACY_HPP_

#include "milq/model.hpp"

namespace milq {

struct DpBudget {
  double epsilon = 1.0;
  double delta = 1e-5;

  void validate() const;
  // The classical Gaussian-mechanism guarantee is stated for epsilon <= 1;
  // larger budgets are accepted but flagged for the caller to warn about.
  bool epsilon_in_classical_range() const { return epsilon <= 1.0; }
};

enum class SensitivityMethod { exhaustive, sampled };

struct SensitivityEstimate {
  double delta_theta = 0.0;  // empirical max l2 distance; lower bound on sup
  std::size_t pairs_evaluated = 0;
  SensitivityMethod method = SensitivityMethod::sampled;
};

// Max retraining distance over all neighboring mask pairs (equal-size
// masks differing by swapping one member for one nonmember). Requires the
// deterministic ridge trainer. Feasible only for small universes; guarded
// by a mask-count cap.
SensitivityEstimate neighbor_sensitivity_exhaustive(
    const DataUniverse& universe, std::int64_t n, const TrainingConfig& config);

// Random (mask, swap) pairs; the reported max is an empirical lower bound.
SensitivityEstimate neighbor_sensitivity_sampled(const DataUniverse& universe,
                                                 std::int64_t n,
                                                 const TrainingConfig& config,
                                                 std::size_t pair_count,
                                                 std::uint64_t seed);

// Gaussian-mechanism calibration: sigma = sqrt(2 ln(1.25/delta)) *
// delta_theta / epsilon.
double gaussian_mechanism_sigma(double delta_theta, const DpBudget& budget);

// Adds iid zero-mean Gaussian noise with standard deviation sigma to every
// coordinate; records sigma in the provenance. Deterministic given seed.
ModelParams add_noise(const ModelParams& params, double sigma,
                      std::uint64_t seed);

}  // namespace milq

#endif  // MILQ_PRIVACY_HPP_
