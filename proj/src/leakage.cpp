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

#include "milq/leakage.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "milq/errors.hpp"
#include "milq/numeric.hpp"

namespace milq {

namespace {

constexpr std::uint64_t kTrialTag = 0x6c65616bULL;  // leakage trial stream
constexpr std::uint64_t kMiTag = 0x6d697874ULL;     // mixture MI stream

std::uint64_t rows_digest(std::int64_t N, const Rows& rows) {
  std::uint64_t h = derive_seed(0x726f7773ULL,
                                {static_cast<std::uint64_t>(N), rows.size()});
  for (std::int64_t r : rows) h = mix64(h ^ static_cast<std::uint64_t>(r));
  return h;
}

void check_leakage_args(const DataUniverse& universe, std::int64_t record_id,
                        std::int64_t n, std::int64_t trials) {
  const std::int64_t N = universe.size();
  if (record_id < 0 || record_id >= N) {
    throw std::invalid_argument("leakage: record_id out of range");
  }
  if (n <= 0 || n >= N) {
    throw std::invalid_argument("leakage: need 0 < n < N, got n=" +
                                std::to_string(n) + ", N=" + std::to_string(N));
  }
  if (n > N - 1) {
    throw std::invalid_argument("leakage: n exceeds N - 1");
  }
  if (trials < 1) {
    throw std::invalid_argument("leakage: trials must be >= 1");
  }
}

}  // namespace

std::vector<ModelParams> sample_conditional_params(
    const DataUniverse& universe, std::int64_t record_id, Condition condition,
    std::int64_t n, std::int64_t trials, const TrainingConfig& config,
    const QuantizationGrid& grid, double noise_sigma,
    std::uint64_t master_seed) {
  check_leakage_args(universe, record_id, n, trials);
  config.validate();
  grid.validate();
  if (noise_sigma < 0.0) {
    throw std::invalid_argument("leakage: noise_sigma must be >= 0");
  }

  const std::int64_t N = universe.size();
  const bool member = condition == Condition::member;
  const std::int64_t companions = member ? n - 1 : n;

  std::vector<ModelParams> samples;
  samples.reserve(static_cast<std::size_t>(trials));
  for (std::int64_t t = 0; t < trials; ++t) {
    const std::uint64_t trial_seed = derive_seed(
        master_seed, {kTrialTag, static_cast<std::uint64_t>(record_id),
                      static_cast<std::uint64_t>(member ? 1 : 0),
                      static_cast<std::uint64_t>(t)});
    Rng draw_rng(derive_seed(trial_seed, {fnv1a64("draw")}));

    Rows rows;
    rows.reserve(static_cast<std::size_t>(n));
    if (member) rows.push_back(record_id);
    for (std::int64_t idx :
         draw_rng.sample_without_replacement(N - 1, companions)) {
      rows.push_back(idx < record_id ? idx : idx + 1);
    }

    ModelParams params = train_model(universe, rows, config,
                                     derive_seed(trial_seed, {fnv1a64("train")}));
    params.provenance.seed = trial_seed;
    params.provenance.mask_digest = rows_digest(N, rows);

    if (noise_sigma > 0.0) {
      // The perturbation direction depends only on the trial seed, so
      // sweeping sigma rescales a fixed noise vector per trial.
      Rng noise_rng(derive_seed(trial_seed, {fnv1a64("noise")}));
      for (std::int64_t i = 0; i < params.theta.size(); ++i) {
        params.theta(i) += noise_sigma * noise_rng.normal();
      }
      params.provenance.noise_sigma = noise_sigma;
    }
    samples.push_back(quantize(params, grid));
  }
  return samples;
}

std::pair<GaussianFit, GaussianFit> fit_conditionals(
    const DataUniverse& universe, std::int64_t record_id, std::int64_t n,
    std::int64_t trials, const TrainingConfig& config,
    const QuantizationGrid& grid, double noise_sigma,
    std::uint64_t master_seed) {
  const std::int64_t p = param_count(config, universe.feature_count());
  if (trials < p + 2) {
    throw std::invalid_argument(
        "fit_conditionals: need trials >= p_theta + 2 = " +
        std::to_string(p + 2) + ", got " + std::to_string(trials));
  }
  const std::vector<ModelParams> samples0 =
      sample_conditional_params(universe, record_id, Condition::nonmember, n,
                                trials, config, grid, noise_sigma, master_seed);
  const std::vector<ModelParams> samples1 =
      sample_conditional_params(universe, record_id, Condition::member, n,
                                trials, config, grid, noise_sigma, master_seed);
  GaussianFit fit0 = fit_gaussian(samples0);
  fit0.condition = 0;
  GaussianFit fit1 = fit_gaussian(samples1);
  fit1.condition = 1;
  return {std::move(fit0), std::move(fit1)};
}

std::pair<double, double> record_kl_leakage(
    const DataUniverse& universe, std::int64_t record_id, std::int64_t n,
    std::int64_t trials, const TrainingConfig& config,
    const QuantizationGrid& grid, double noise_sigma,
    std::uint64_t master_seed) {
  const auto [fit0, fit1] = fit_conditionals(universe, record_id, n, trials,
                                             config, grid, noise_sigma,
                                             master_seed);
  return {kl_gaussian(fit1, fit0), kl_gaussian(fit0, fit1)};
}

McEstimate mi_mixture_estimate(const GaussianFit& fit0, const GaussianFit& fit1,
                               double alpha_member, std::int64_t samples,
                               std::uint64_t seed) {
  if (alpha_member <= 0.0 || alpha_member >= 1.0) {
    throw std::invalid_argument("mi_mixture_estimate: alpha in (0,1) required");
  }
  if (samples < 1000) {
    throw std::invalid_argument("mi_mixture_estimate: need >= 1000 samples");
  }
  if (fit0.dim() != fit1.dim()) {
    throw std::invalid_argument("mi_mixture_estimate: dimension mismatch");
  }

  const double alpha1 = alpha_member;
  const double alpha0 = 1.0 - alpha_member;
  const double log_alpha0 = std::log(alpha0);
  const double log_alpha1 = std::log(alpha1);
  const MvnDistribution comp0(fit0);
  const MvnDistribution comp1(fit1);

  const auto log_mixture = [&](double lp0, double lp1) {
    const double a = log_alpha0 + lp0;
    const double b = log_alpha1 + lp1;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
  };

  double value = 0.0;
  double variance = 0.0;
  for (int b = 0; b < 2; ++b) {
    const MvnDistribution& comp = (b == 0) ? comp0 : comp1;
    const double weight = (b == 0) ? alpha0 : alpha1;
    Rng rng(derive_seed(seed, {kMiTag, static_cast<std::uint64_t>(b)}));
    std::vector<double> ratios(static_cast<std::size_t>(samples));
    for (std::int64_t i = 0; i < samples; ++i) {
      const Eigen::VectorXd x = comp.draw(rng);
      const double lp0 = comp0.log_density(x);
      const double lp1 = comp1.log_density(x);
      const double own = (b == 0) ? lp0 : lp1;
      ratios[static_cast<std::size_t>(i)] = own - log_mixture(lp0, lp1);
    }
    value += weight * mean(ratios);
    const double sd = sample_stddev(ratios);
    variance += weight * weight * sd * sd / static_cast<double>(samples);
  }
  if (!std::isfinite(value)) {
    throw NumericError("mi_mixture_estimate: nonfinite estimate");
  }
  return {std::max(value, 0.0), std::sqrt(variance)};
}

LeakageEstimate aggregate_leakage(std::vector<RecordLeakage> per_record,
                                  double alpha_member) {
  if (per_record.empty()) {
    throw std::invalid_argument("aggregate_leakage: empty probe set");
  }
  if (alpha_member <= 0.0 || alpha_member >= 1.0) {
    throw std::invalid_argument("aggregate_leakage: alpha in (0,1) required");
  }

  const std::size_t m = per_record.size();
  std::vector<double> record_kl(m), record_mi(m);
  for (std::size_t i = 0; i < m; ++i) {
    record_kl[i] = per_record[i].rho1 + per_record[i].rho2;
    record_mi[i] = per_record[i].mi;
  }

  LeakageEstimate estimate;
  estimate.per_record = std::move(per_record);
  estimate.rho_kl = mean(record_kl);
  estimate.rho_kl_stderr = standard_error(record_kl);
  estimate.rho_mi = mean(record_mi);
  estimate.rho_mi_stderr = standard_error(record_mi);
  estimate.mi_upper = estimate.rho_kl / 4.0;
  estimate.success_bound = 0.5 * std::sqrt(std::max(estimate.rho_kl, 0.0));
  estimate.success_bound_capped = std::min(estimate.success_bound, 1.0);
  estimate.alpha_member = alpha_member;
  return estimate;
}

LeakageEstimate estimate_leakage(const DataUniverse& universe,
                                 const Rows& probe_rows,
                                 const TrainingConfig& config,
                                 const QuantizationGrid& grid,
                                 const LeakageRunConfig& run,
                                 std::uint64_t master_seed) {
  if (probe_rows.empty()) {
    throw std::invalid_argument("estimate_leakage: empty probe set");
  }
  const double alpha = run.alpha_member.value_or(
      static_cast<double>(run.n) / static_cast<double>(universe.size()));

  std::vector<RecordLeakage> per_record(probe_rows.size());
  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;

  const auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= probe_rows.size()) return;
      try {
        const std::int64_t record_id = probe_rows[i];
        const auto [fit0, fit1] =
            fit_conditionals(universe, record_id, run.n, run.trials, config,
                             grid, run.noise_sigma, master_seed);
        RecordLeakage& out = per_record[i];
        out.record_id = record_id;
        out.rho1 = kl_gaussian(fit1, fit0);
        out.rho2 = kl_gaussian(fit0, fit1);
        const McEstimate mi = mi_mixture_estimate(
            fit0, fit1, alpha, run.mi_samples,
            derive_seed(master_seed,
                        {kMiTag, static_cast<std::uint64_t>(record_id)}));
        out.mi = mi.value;
        out.mi_stderr = mi.stderr_value;
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  int thread_count = run.threads > 0
                         ? run.threads
                         : static_cast<int>(std::thread::hardware_concurrency());
  thread_count = std::max(1, std::min<int>(thread_count,
                                           static_cast<int>(probe_rows.size())));
  if (thread_count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  LeakageEstimate estimate = aggregate_leakage(std::move(per_record), alpha);
  estimate.trials = run.trials;
  estimate.seed = master_seed;
  return estimate;
}

Rows sample_probe_rows(const DataUniverse& universe, std::int64_t count,
                       std::uint64_t seed) {
  if (count < 1 || count > universe.size()) {
    throw std::invalid_argument("sample_probe_rows: count out of range");
  }
  Rng rng(derive_seed(seed, {fnv1a64("probe")}));
  return rng.sample_without_replacement(universe.size(), count);
}

void save_leakage_csv(const LeakageEstimate& estimate,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("save_leakage_csv: cannot write '" + path + "'");
  }
  out << "record_id,rho1,rho2,rho_kl_record\n";
  for (const RecordLeakage& r : estimate.per_record) {
    out << r.record_id << ',' << format_double(r.rho1) << ','
        << format_double(r.rho2) << ',' << format_double(r.rho1 + r.rho2)
        << '\n';
  }
}

void save_leakage_json(const LeakageEstimate& estimate,
                       const std::string& path) {
  nlohmann::json j{{"rho_kl", estimate.rho_kl},
                   {"rho_kl_stderr", estimate.rho_kl_stderr},
                   {"rho_mi", estimate.rho_mi},
                   {"rho_mi_stderr", estimate.rho_mi_stderr},
                   {"mi_upper", estimate.mi_upper},
                   {"success_bound", estimate.success_bound},
                   {"success_bound_capped", estimate.success_bound_capped},
                   {"alpha_member", estimate.alpha_member},
                   {"trials", estimate.trials},
                   {"seed", estimate.seed},
                   {"probe_size", estimate.per_record.size()}};
  std::ofstream out(path);
  if (!out) {
    throw IoError("save_leakage_json: cannot write '" + path + "'");
  }
  out << j.dump(2) << '\n';
}

}  // namespace milq
