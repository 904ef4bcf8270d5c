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

#ifndef MILQ_ATTACK_HPP_
#define MILQ_ATTACK_HPP_

#include <functional>

#include "milq/model.hpp"
#include "milq/rng.hpp"

namespace milq {

struct AdversaryPolicy {
  enum class Kind { threshold };
  Kind kind = Kind::threshold;
  double tau = 0.0;  // per-example loss threshold, boundary inclusive
};

struct MembershipTrial {
  int b = 0;      // true membership bit of the challenge record
  int b_hat = 0;  // adversary decision
  std::int64_t record_id = 0;
  std::uint64_t trial_seed = 0;
  double loss = 0.0;  // adversary-observed per-example loss
};

struct ExperimentResult {
  std::vector<MembershipTrial> trials;
  double advantage = 0.0;         // |2 correct_fraction - 1|
  double correct_fraction = 0.0;  // mean of b_hat == b
  double tau = 0.0;
  double sigma = 0.0;
};

// Trains shadow_count models on random masks and sets tau to the mean
// per-example training loss over the shadows' member records. Shadow
// models mirror the release pipeline, including output noise, so pass the
// same noise_sigma the released models will carry.
AdversaryPolicy calibrate_threshold(const DataUniverse& universe,
                                    std::int64_t n,
                                    const TrainingConfig& config,
                                    const QuantizationGrid& grid,
                                    int shadow_count, std::uint64_t seed,
                                    double noise_sigma = 0.0);

// Member (1) iff the per-example loss is at or below tau.
int threshold_decide(const AdversaryPolicy& policy, const ModelParams& model,
                     const TrainingConfig& config, const Eigen::VectorXd& x,
                     double y);

// Decision callback used by the generic experiment runner; receives the
// released model, the challenge record, the true bit, and trial-local
// randomness (so test adversaries like coin flippers stay deterministic).
using DecideFn = std::function<int(const ModelParams& model,
                                   const Eigen::VectorXd& x, double y,
                                   int true_b, Rng& rng)>;

// The membership experiment: per trial, draw a uniform n-of-N mask, train
// and release a (noisy, quantized) model, flip a fair bit b, draw the
// challenge record from the members if b = 1 else from the rest, and ask
// the adversary for b_hat. Deterministic given master_seed.
ExperimentResult run_membership_experiment(
    const DataUniverse& universe, std::int64_t n, const TrainingConfig& config,
    const QuantizationGrid& grid, const AdversaryPolicy& policy,
    double noise_sigma, std::int64_t trials, std::uint64_t master_seed);

// Same experiment with an arbitrary adversary; reported losses use the
// threshold policy's loss function (informational only).
ExperimentResult run_membership_experiment_with(
    const DataUniverse& universe, std::int64_t n, const TrainingConfig& config,
    const QuantizationGrid& grid, const DecideFn& decide, double noise_sigma,
    std::int64_t trials, std::uint64_t master_seed);

// Trial log, header `trial,record_id,b,b_hat,loss,tau,sigma`.
void save_trial_log(const ExperimentResult& result, const std::string& path);

}  // namespace milq

#endif  // MILQ_ATTACK_HPP_
