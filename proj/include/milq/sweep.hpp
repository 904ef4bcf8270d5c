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

#ifndef MILQ_SWEEP_HPP_
#define MILQ_SWEEP_HPP_

#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "milq/attack.hpp"
#include "milq/leakage.hpp"

namespace milq {

enum class SweepVariable { n, lambda, p_x, sigma };

std::string to_string(SweepVariable variable);
SweepVariable sweep_variable_from_string(const std::string& name);

struct SyntheticSpec {
  std::int64_t n_universe = 2000;
  std::int64_t p_x = 5;
  double noise_std = 0.5;
  std::uint64_t coefficient_seed = 1;
};

// Gaussian features, linear labels y = x . beta + noise. Deterministic.
DataUniverse synthetic_universe(const SyntheticSpec& spec);

struct DatasetConfig {
  enum class Kind { synthetic, adult };
  Kind kind = Kind::synthetic;
  SyntheticSpec synthetic;                // p_x filled from the sweep config
  std::vector<std::string> adult_paths;   // train/test files, in order
};

// One experiment campaign: a single swept variable over a strictly
// increasing grid, everything else pinned.
struct SweepConfig {
  DatasetConfig dataset;
  ModelKind model = ModelKind::linear;
  MlpLayout mlp;
  SgdConfig sgd;

  SweepVariable variable = SweepVariable::n;
  std::vector<double> grid;

  // Fixed values for the parameters that are not swept.
  std::int64_t n = 10;
  double lambda = 0.0;
  std::int64_t p_x = 5;
  double sigma = 0.0;
  double loss_scale = 1.0;

  std::int64_t trials = 500;       // Monte-Carlo retrainings per condition
  std::int64_t probe = 50;         // |J|
  std::int64_t attack_trials = 400;
  int shadow_count = 20;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};

  double quant_step = 0x1.0p-16;
  double quant_half_width = 64.0;
  std::optional<double> alpha_member;  // default n / N
  std::int64_t mi_samples = 8192;
  int threads = 0;           // excluded from the config hash
  std::uint64_t master_seed = 1;
};

// Strict parsing: unknown keys are configuration conflicts and rejected.
SweepConfig sweep_config_from_json(const nlohmann::json& j);
nlohmann::json sweep_config_to_json(const SweepConfig& config);

// Rejects inconsistent configurations before any work (ConfigError).
void validate(const SweepConfig& config);

// FNV-1a over the canonical JSON serialization, 16 hex digits. The thread
// count is excluded: it cannot change results.
std::string config_hash(const SweepConfig& config);

struct SweepRow {
  std::string sweep_var;
  double sweep_value = 0.0;
  double adv_mean = 0.0;
  double adv_std = 0.0;
  double rho_kl = 0.0;
  double rho_kl_stderr = 0.0;
  double rho_mi = 0.0;
  double success_bound = 0.0;
  std::int64_t seed_count = 0;
  std::string hash;
};

// Runs leakage estimation and the membership experiment per grid value
// and seed. Persists out_dir/sweep.csv (header
// `sweep_var,sweep_value,adv_mean,adv_std,rho_kl,rho_kl_stderr,rho_mi,
// success_bound,seed_count,config_hash`), per-trial logs, and the
// resolved config. Deterministic given the config.
std::vector<SweepRow> run_sweep(const SweepConfig& config,
                                const std::string& out_dir);

std::vector<SweepRow> load_sweep_csv(const std::string& path);

// Writes one SVG per metric plus a plain-text data table whose columns
// match the sweep CSV contract.
void emit_plots(const std::vector<SweepRow>& rows, const std::string& out_dir);

struct AuditResult {
  bool ok = false;
  std::string report;
};

// Recomputes every sweep.csv statistic from the persisted trial logs and
// compares byte-for-byte.
AuditResult audit_sweep(const std::string& out_dir);

}  // namespace milq

#endif  // MILQ_SWEEP_HPP_
