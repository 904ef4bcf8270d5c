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

#ifndef MILQ_LEAKAGE_HPP_
#define MILQ_LEAKAGE_HPP_

#include <optional>
#include <utility>

#include "milq/gaussian.hpp"
#include "milq/model.hpp"

namespace milq {

enum class Condition { nonmember = 0, member = 1 };

// Monte-Carlo sampling of the conditional parameter distribution for one
// probe record. member: train on the record plus n-1 companions drawn
// uniformly without replacement from the rest of the universe; nonmember:
// on n draws from the rest. Each trial trains, optionally perturbs theta
// with noise_sigma * w (w drawn per trial, scaled by sigma), and
// quantizes. Per-trial seeds derive from (master_seed, record_id,
// condition, trial), so trials are order- and thread-independent.
std::vector<ModelParams> sample_conditional_params(
    const DataUniverse& universe, std::int64_t record_id, Condition condition,
    std::int64_t n, std::int64_t trials, const TrainingConfig& config,
    const QuantizationGrid& grid, double noise_sigma,
    std::uint64_t master_seed);

// Gaussian fits of both conditional distributions for one record.
std::pair<GaussianFit, GaussianFit> fit_conditionals(
    const DataUniverse& universe, std::int64_t record_id, std::int64_t n,
    std::int64_t trials, const TrainingConfig& config,
    const QuantizationGrid& grid, double noise_sigma,
    std::uint64_t master_seed);

// (rho1, rho2) = (KL(member || nonmember), KL(nonmember || member)) under
// the Gaussian approximation, in nats.
std::pair<double, double> record_kl_leakage(
    const DataUniverse& universe, std::int64_t record_id, std::int64_t n,
    std::int64_t trials, const TrainingConfig& config,
    const QuantizationGrid& grid, double noise_sigma,
    std::uint64_t master_seed);

struct McEstimate {
  double value = 0.0;
  double stderr_value = 0.0;
};

// Monte-Carlo estimate of the mixture mutual information
//   alpha0 KL(p0 || m) + alpha1 KL(p1 || m),  m = alpha0 p0 + alpha1 p1,
// with alpha1 = alpha_member. `samples` draws per component; densities
// evaluated in the log domain. Returns nats plus its standard error.
McEstimate mi_mixture_estimate(const GaussianFit& fit0, const GaussianFit& fit1,
                               double alpha_member, std::int64_t samples,
                               std::uint64_t seed);

struct RecordLeakage {
  std::int64_t record_id = 0;
  double rho1 = 0.0;
  double rho2 = 0.0;
  double mi = 0.0;         // mixture MI estimate for this record
  double mi_stderr = 0.0;
};

struct LeakageEstimate {
  std::vector<RecordLeakage> per_record;
  double rho_kl = 0.0;  // mean of rho1 + rho2 over the probe set
  double rho_kl_stderr = 0.0;
  double rho_mi = 0.0;  // mean mixture MI over the probe set
  double rho_mi_stderr = 0.0;
  double mi_upper = 0.0;              // rho_kl / 4
  double success_bound = 0.0;         // 0.5 sqrt(rho_kl), as stated
  double success_bound_capped = 0.0;  // min(success_bound, 1)
  double alpha_member = 0.5;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
};

// Aggregates per-record divergences; pairwise summation keeps the result
// independent of evaluation order.
LeakageEstimate aggregate_leakage(std::vector<RecordLeakage> per_record,
                                  double alpha_member);

struct LeakageRunConfig {
  std::int64_t n = 10;
  std::int64_t trials = 500;
  double noise_sigma = 0.0;
  std::optional<double> alpha_member;  // default n / N
  std::int64_t mi_samples = 8192;
  int threads = 0;  // 0 = hardware concurrency
};

// Full estimator over a probe set: per record, sample both conditions,
// fit Gaussians, compute (rho1, rho2) and the mixture MI, then aggregate.
// Records are processed in parallel; identical seeds give identical
// results regardless of thread count.
LeakageEstimate estimate_leakage(const DataUniverse& universe,
                                 const Rows& probe_rows,
                                 const TrainingConfig& config,
                                 const QuantizationGrid& grid,
                                 const LeakageRunConfig& run,
                                 std::uint64_t master_seed);

// Uniform probe set of `count` records; deterministic given seed.
Rows sample_probe_rows(const DataUniverse& universe, std::int64_t count,
                       std::uint64_t seed);

// Report persistence: CSV `record_id,rho1,rho2,rho_kl_record` and a JSON
// summary with the aggregate statistics.
void save_leakage_csv(const LeakageEstimate& estimate, const std::string& path);
void save_leakage_json(const LeakageEstimate& estimate,
                       const std::string& path);

}  // namespace milq

#endif  // MILQ_LEAKAGE_HPP_
