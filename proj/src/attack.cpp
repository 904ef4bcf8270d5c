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

#include "milq/attack.hpp"

#include <cmath>
#include <fstream>

#include "milq/errors.hpp"
#include "milq/numeric.hpp"
#include "milq/privacy.hpp"
#include "milq/rng.hpp"

namespace milq {

namespace {

constexpr std::uint64_t kShadowTag = 0x73686164ULL;
constexpr std::uint64_t kAttackTag = 0x6174746bULL;

ModelParams release_model(const DataUniverse& universe, const Rows& rows,
                          const TrainingConfig& config,
                          const QuantizationGrid& grid, double noise_sigma,
                          std::uint64_t mask_digest, std::uint64_t seed) {
  ModelParams params =
      train_model(universe, rows, config, derive_seed(seed, {fnv1a64("train")}));
  params.provenance.seed = seed;
  params.provenance.mask_digest = mask_digest;
  params = add_noise(params, noise_sigma, derive_seed(seed, {fnv1a64("noise")}));
  return quantize(params, grid);
}

}  // namespace

AdversaryPolicy calibrate_threshold(const DataUniverse& universe,
                                    std::int64_t n,
                                    const TrainingConfig& config,
                                    const QuantizationGrid& grid,
                                    int shadow_count, std::uint64_t seed,
                                    double noise_sigma) {
  if (shadow_count < 1) {
    throw std::invalid_argument("calibrate_threshold: shadow_count >= 1");
  }
  if (n <= 0 || n >= universe.size()) {
    throw std::invalid_argument("calibrate_threshold: need 0 < n < N");
  }

  std::vector<double> member_losses;
  member_losses.reserve(static_cast<std::size_t>(shadow_count) *
                        static_cast<std::size_t>(n));
  Eigen::VectorXd x(universe.feature_count());
  for (int s = 0; s < shadow_count; ++s) {
    const std::uint64_t shadow_seed =
        derive_seed(seed, {kShadowTag, static_cast<std::uint64_t>(s)});
    const MembershipMask mask = sample_mask(universe.size(), n, shadow_seed);
    const Rows members = mask.member_rows();
    const ModelParams model = release_model(universe, members, config, grid,
                                            noise_sigma, mask.digest(),
                                            shadow_seed);
    for (std::int64_t r : members) {
      x = universe.features.row(r);
      member_losses.push_back(example_loss(model, config, x,
                                           universe.labels(r)));
    }
  }

  AdversaryPolicy policy;
  policy.kind = AdversaryPolicy::Kind::threshold;
  policy.tau = mean(member_losses);
  return policy;
}

int threshold_decide(const AdversaryPolicy& policy, const ModelParams& model,
                     const TrainingConfig& config, const Eigen::VectorXd& x,
                     double y) {
  return example_loss(model, config, x, y) <= policy.tau ? 1 : 0;
}

ExperimentResult run_membership_experiment_with(
    const DataUniverse& universe, std::int64_t n, const TrainingConfig& config,
    const QuantizationGrid& grid, const DecideFn& decide, double noise_sigma,
    std::int64_t trials, std::uint64_t master_seed) {
  if (n <= 0 || n >= universe.size()) {
    throw std::invalid_argument(
        "run_membership_experiment: need 0 < n < N, got n=" +
        std::to_string(n) + ", N=" + std::to_string(universe.size()));
  }
  if (trials < 1) {
    throw std::invalid_argument("run_membership_experiment: trials >= 1");
  }
  if (noise_sigma < 0.0) {
    throw std::invalid_argument("run_membership_experiment: sigma >= 0");
  }

  ExperimentResult result;
  result.trials.resize(static_cast<std::size_t>(trials));
  result.sigma = noise_sigma;
  Eigen::VectorXd x(universe.feature_count());

  for (std::int64_t t = 0; t < trials; ++t) {
    const std::uint64_t trial_seed =
        derive_seed(master_seed, {kAttackTag, static_cast<std::uint64_t>(t)});
    const MembershipMask mask =
        sample_mask(universe.size(), n,
                    derive_seed(trial_seed, {fnv1a64("mask")}));

    const ModelParams model = release_model(universe, mask.member_rows(),
                                            config, grid, noise_sigma,
                                            mask.digest(), trial_seed);

    Rng challenge_rng(derive_seed(trial_seed, {fnv1a64("challenge")}));
    const int b = static_cast<int>(challenge_rng.below(2));
    const Rows pool = b == 1 ? mask.member_rows() : mask.nonmember_rows();
    const std::int64_t record_id =
        pool[static_cast<std::size_t>(challenge_rng.below(pool.size()))];
    x = universe.features.row(record_id);
    const double y = universe.labels(record_id);

    Rng adversary_rng(derive_seed(trial_seed, {fnv1a64("adversary")}));
    MembershipTrial& trial = result.trials[static_cast<std::size_t>(t)];
    trial.b = b;
    trial.b_hat = decide(model, x, y, b, adversary_rng);
    trial.record_id = record_id;
    trial.trial_seed = trial_seed;
    trial.loss = example_loss(model, config, x, y);
  }

  std::vector<double> correct(result.trials.size());
  for (std::size_t i = 0; i < result.trials.size(); ++i) {
    correct[i] = result.trials[i].b == result.trials[i].b_hat ? 1.0 : 0.0;
  }
  result.correct_fraction = mean(correct);
  result.advantage = std::abs(2.0 * result.correct_fraction - 1.0);
  return result;
}

ExperimentResult run_membership_experiment(
    const DataUniverse& universe, std::int64_t n, const TrainingConfig& config,
    const QuantizationGrid& grid, const AdversaryPolicy& policy,
    double noise_sigma, std::int64_t trials, std::uint64_t master_seed) {
  ExperimentResult result = run_membership_experiment_with(
      universe, n, config, grid,
      [&](const ModelParams& model, const Eigen::VectorXd& x, double y,
          int /*true_b*/, Rng& /*rng*/) {
        return threshold_decide(policy, model, config, x, y);
      },
      noise_sigma, trials, master_seed);
  result.tau = policy.tau;
  return result;
}

void save_trial_log(const ExperimentResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("save_trial_log: cannot write '" + path + "'");
  }
  out << "trial,record_id,b,b_hat,loss,tau,sigma\n";
  for (std::size_t i = 0; i < result.trials.size(); ++i) {
    const MembershipTrial& t = result.trials[i];
    out << i << ',' << t.record_id << ',' << t.b << ',' << t.b_hat << ','
        << format_double(t.loss) << ',' << format_double(result.tau) << ','
        << format_double(result.sigma) << '\n';
  }
}

}  // namespace milq
