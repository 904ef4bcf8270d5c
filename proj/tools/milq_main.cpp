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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "milq/attack.hpp"
#include "milq/errors.hpp"
#include "milq/leakage.hpp"
#include "milq/numeric.hpp"
#include "milq/privacy.hpp"
#include "milq/sweep.hpp"

namespace {

using namespace milq;

struct DatasetOptions {
  std::string universe_csv;
  std::int64_t synthetic_n = 2000;
  double synthetic_noise = 0.5;
  std::uint64_t synthetic_seed = 1;
  std::int64_t p_x = 5;
};

void add_dataset_options(CLI::App* cmd, DatasetOptions* opts) {
  cmd->add_option("--universe", opts->universe_csv,
                  "Encoded universe CSV (id,f1..fpx,label); overrides the "
                  "synthetic generator");
  cmd->add_option("--synthetic-n", opts->synthetic_n,
                  "Synthetic universe size");
  cmd->add_option("--synthetic-noise", opts->synthetic_noise,
                  "Synthetic label noise standard deviation");
  cmd->add_option("--synthetic-seed", opts->synthetic_seed,
                  "Synthetic coefficient seed");
  cmd->add_option("--px", opts->p_x, "Feature count");
}

DataUniverse build_universe(const DatasetOptions& opts) {
  if (!opts.universe_csv.empty()) {
    return load_universe_csv(opts.universe_csv);
  }
  SyntheticSpec spec;
  spec.n_universe = opts.synthetic_n;
  spec.p_x = opts.p_x;
  spec.noise_std = opts.synthetic_noise;
  spec.coefficient_seed = opts.synthetic_seed;
  return synthetic_universe(spec);
}

struct ModelOptions {
  std::string kind = "linear";
  double lambda = 0.0;
  double loss_scale = 1.0;
  std::vector<int> hidden = {8, 8};
  int epochs = 40;
  double step_size = 0.05;
  int batch_size = 0;
};

void add_model_options(CLI::App* cmd, ModelOptions* opts) {
  cmd->add_option("--model", opts->kind, "Model kind: linear | mlp");
  cmd->add_option("--lambda", opts->lambda, "Regularization weight");
  cmd->add_option("--loss-scale", opts->loss_scale,
                  "Scale factor on the data loss term");
  cmd->add_option("--mlp-hidden", opts->hidden, "Hidden layer widths");
  cmd->add_option("--epochs", opts->epochs, "MLP training epochs");
  cmd->add_option("--step-size", opts->step_size, "MLP step size");
  cmd->add_option("--batch", opts->batch_size, "MLP batch size (0 = full)");
}

TrainingConfig make_training_config(const ModelOptions& opts) {
  TrainingConfig config;
  config.kind = model_kind_from_string(opts.kind);
  config.lambda = opts.lambda;
  config.loss_scale = opts.loss_scale;
  config.mlp.hidden = opts.hidden;
  config.sgd.epochs = opts.epochs;
  config.sgd.step_size = opts.step_size;
  config.sgd.batch_size = opts.batch_size;
  return config;
}

struct NoiseOptions {
  std::optional<double> sigma;
  std::optional<double> epsilon;
  double delta = 1e-5;
  std::size_t sensitivity_pairs = 100;
};

void add_noise_options(CLI::App* cmd, NoiseOptions* opts) {
  cmd->add_option("--sigma", opts->sigma,
                  "Noise standard deviation (overrides --epsilon/--delta)");
  cmd->add_option("--epsilon", opts->epsilon,
                  "DP budget epsilon; sigma is derived via the Gaussian "
                  "mechanism from sampled sensitivity");
  cmd->add_option("--delta", opts->delta, "DP budget delta");
  cmd->add_option("--sensitivity-pairs", opts->sensitivity_pairs,
                  "Neighbor pairs for the sampled sensitivity estimate");
}

double resolve_sigma(const NoiseOptions& opts, const DataUniverse& universe,
                     std::int64_t n, const TrainingConfig& config,
                     std::uint64_t seed) {
  if (opts.sigma.has_value()) {
    return *opts.sigma;
  }
  if (!opts.epsilon.has_value()) {
    return 0.0;
  }
  DpBudget budget{*opts.epsilon, opts.delta};
  budget.validate();
  if (!budget.epsilon_in_classical_range()) {
    std::cerr << "warning: epsilon > 1 is outside the classical validity "
                 "range of the Gaussian mechanism\n";
  }
  const SensitivityEstimate sens = neighbor_sensitivity_sampled(
      universe, n, config, opts.sensitivity_pairs,
      derive_seed(seed, {fnv1a64("cli-sensitivity")}));
  const double sigma = gaussian_mechanism_sigma(sens.delta_theta, budget);
  std::cout << "sensitivity (sampled, " << sens.pairs_evaluated
            << " pairs, lower bound): " << format_double(sens.delta_theta)
            << "\nderived sigma: " << format_double(sigma) << "\n";
  return sigma;
}

int run_ingest(const std::vector<std::string>& inputs, std::int64_t p_x,
               const std::string& out, const std::string& raw_out) {
  const AdultIngest ingest = load_adult_csv(inputs);
  std::cout << "rows parsed:  " << ingest.rows_parsed
            << "\nrows dropped: " << ingest.rows_dropped_missing
            << "\nrows kept:    " << ingest.universe.size() << "\n";
  if (!raw_out.empty()) {
    save_universe_csv(ingest.universe, raw_out);
  }
  const PcaTransform transform = fit_pca(ingest.universe, p_x);
  const DataUniverse projected = apply_pca(transform, ingest.universe);
  save_universe_csv(projected, out);
  std::cout << "explained variance:";
  for (std::int64_t k = 0; k < transform.explained_variance.size(); ++k) {
    std::cout << ' ' << format_double(transform.explained_variance(k));
  }
  std::cout << "\nwrote " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "milq: membership information leakage quantification for trained "
      "models"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand(
      "ingest", "Encode Adult-layout CSV files into a model-ready universe");
  std::vector<std::string> ingest_inputs;
  std::int64_t ingest_px = 5;
  std::string ingest_out = "universe.csv";
  std::string ingest_raw_out;
  ingest->add_option("--input", ingest_inputs, "Input files, concatenated")
      ->required();
  ingest->add_option("--px", ingest_px, "PCA components to keep");
  ingest->add_option("--out", ingest_out, "Output universe CSV");
  ingest->add_option("--raw-out", ingest_raw_out,
                     "Optional encoded pre-PCA dump");

  // leakage
  auto* leakage = app.add_subcommand(
      "leakage", "Estimate per-record and aggregate membership leakage");
  DatasetOptions leak_data;
  ModelOptions leak_model;
  NoiseOptions leak_noise;
  std::int64_t leak_n = 10, leak_trials = 500, leak_probe = 50;
  std::int64_t leak_mi_samples = 8192;
  std::optional<double> leak_alpha;
  std::uint64_t leak_seed = 1;
  int leak_threads = 0;
  std::string leak_out_prefix = "leakage";
  add_dataset_options(leakage, &leak_data);
  add_model_options(leakage, &leak_model);
  add_noise_options(leakage, &leak_noise);
  leakage->add_option("--n", leak_n, "Training dataset size");
  leakage->add_option("--trials", leak_trials,
                      "Monte-Carlo retrainings per condition");
  leakage->add_option("--probe", leak_probe, "Probe set size |J|");
  leakage->add_option("--mi-samples", leak_mi_samples,
                      "Draws per component for the mixture MI estimate");
  leakage->add_option("--alpha", leak_alpha,
                      "Membership prior alpha_1 (default n/N)");
  leakage->add_option("--seed", leak_seed, "Master seed");
  leakage->add_option("--threads", leak_threads, "Worker threads (0 = auto)");
  leakage->add_option("--out-prefix", leak_out_prefix,
                      "Writes <prefix>.csv and <prefix>.json");

  // attack
  auto* attack = app.add_subcommand(
      "attack", "Run the membership experiment with the threshold adversary");
  DatasetOptions atk_data;
  ModelOptions atk_model;
  NoiseOptions atk_noise;
  std::int64_t atk_n = 10, atk_trials = 1000;
  int atk_shadows = 20;
  std::optional<double> atk_tau;
  std::uint64_t atk_seed = 1;
  std::string atk_out = "attack_trials.csv";
  add_dataset_options(attack, &atk_data);
  add_model_options(attack, &atk_model);
  add_noise_options(attack, &atk_noise);
  attack->add_option("--n", atk_n, "Training dataset size");
  attack->add_option("--attack-trials", atk_trials, "Experiment trials");
  attack->add_option("--shadows", atk_shadows,
                     "Shadow models for threshold calibration");
  attack->add_option("--tau", atk_tau, "Explicit loss threshold");
  attack->add_option("--seed", atk_seed, "Master seed");
  attack->add_option("--out", atk_out, "Trial log CSV");

  // sweep
  auto* sweep = app.add_subcommand(
      "sweep", "Run a configured sweep over n, lambda, p_x, or sigma");
  std::string sweep_config_path, sweep_out = "sweep_out";
  std::optional<std::uint64_t> sweep_seed;
  std::optional<std::int64_t> sweep_trials, sweep_probe, sweep_attack_trials;
  std::optional<int> sweep_threads;
  bool sweep_plots = false;
  sweep->add_option("--config", sweep_config_path, "Sweep config JSON")
      ->required();
  sweep->add_option("--out", sweep_out, "Output directory");
  sweep->add_option("--seed", sweep_seed,
                    "Master seed overriding the config value");
  sweep->add_option("--trials", sweep_trials, "Override: trials per condition");
  sweep->add_option("--probe", sweep_probe, "Override: probe size");
  sweep->add_option("--attack-trials", sweep_attack_trials,
                    "Override: attack trials");
  sweep->add_option("--threads", sweep_threads, "Override: worker threads");
  sweep->add_flag("--plots", sweep_plots, "Also emit plots");

  // audit
  auto* audit = app.add_subcommand(
      "audit", "Recompute sweep statistics from trial logs and compare");
  std::string audit_dir;
  audit->add_option("--dir", audit_dir, "Sweep output directory")->required();

  // plot
  auto* plot = app.add_subcommand("plot", "Render plots from sweep.csv");
  std::string plot_dir;
  plot->add_option("--dir", plot_dir, "Sweep output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (ingest->parsed()) {
      return run_ingest(ingest_inputs, ingest_px, ingest_out, ingest_raw_out);
    }

    if (leakage->parsed()) {
      const DataUniverse universe = build_universe(leak_data);
      const TrainingConfig config = make_training_config(leak_model);
      const QuantizationGrid grid = QuantizationGrid::boxed(
          param_count(config, universe.feature_count()));
      LeakageRunConfig run;
      run.n = leak_n;
      run.trials = leak_trials;
      run.noise_sigma =
          resolve_sigma(leak_noise, universe, leak_n, config, leak_seed);
      run.alpha_member = leak_alpha;
      run.mi_samples = leak_mi_samples;
      run.threads = leak_threads;
      const Rows probe = sample_probe_rows(universe, leak_probe, leak_seed);
      const LeakageEstimate est =
          estimate_leakage(universe, probe, config, grid, run, leak_seed);
      save_leakage_csv(est, leak_out_prefix + ".csv");
      save_leakage_json(est, leak_out_prefix + ".json");
      std::cout << "rho_kl:               " << format_double(est.rho_kl)
                << " +- " << format_double(est.rho_kl_stderr)
                << "\nrho_mi:               " << format_double(est.rho_mi)
                << "\nmi_upper (rho_kl/4):  " << format_double(est.mi_upper)
                << "\nsuccess bound:        "
                << format_double(est.success_bound) << " (capped "
                << format_double(est.success_bound_capped) << ")\n"
                << "wrote " << leak_out_prefix << ".csv, " << leak_out_prefix
                << ".json\n";
      return 0;
    }

    if (attack->parsed()) {
      const DataUniverse universe = build_universe(atk_data);
      const TrainingConfig config = make_training_config(atk_model);
      const QuantizationGrid grid = QuantizationGrid::boxed(
          param_count(config, universe.feature_count()));
      const double sigma =
          resolve_sigma(atk_noise, universe, atk_n, config, atk_seed);
      AdversaryPolicy policy;
      if (atk_tau.has_value()) {
        policy.tau = *atk_tau;
      } else {
        policy = calibrate_threshold(universe, atk_n, config, grid,
                                     atk_shadows,
                                     derive_seed(atk_seed, {fnv1a64("calibrate")}),
                                     sigma);
      }
      const ExperimentResult result = run_membership_experiment(
          universe, atk_n, config, grid, policy, sigma, atk_trials,
          derive_seed(atk_seed, {fnv1a64("attack")}));
      save_trial_log(result, atk_out);
      std::cout << "tau:              " << format_double(result.tau)
                << "\ncorrect fraction: "
                << format_double(result.correct_fraction)
                << "\nadvantage:        " << format_double(result.advantage)
                << "\nwrote " << atk_out << "\n";
      return 0;
    }

    if (sweep->parsed()) {
      std::ifstream in(sweep_config_path);
      if (!in) {
        throw ParseError("cannot open config '" + sweep_config_path + "'");
      }
      SweepConfig config = sweep_config_from_json(nlohmann::json::parse(in));
      if (sweep_seed) config.master_seed = *sweep_seed;
      if (sweep_trials) config.trials = *sweep_trials;
      if (sweep_probe) config.probe = *sweep_probe;
      if (sweep_attack_trials) config.attack_trials = *sweep_attack_trials;
      if (sweep_threads) config.threads = *sweep_threads;
      const std::vector<SweepRow> rows = run_sweep(config, sweep_out);
      for (const SweepRow& row : rows) {
        std::cout << row.sweep_var << '=' << format_double(row.sweep_value)
                  << "  adv=" << format_double(row.adv_mean)
                  << "  rho_kl=" << format_double(row.rho_kl)
                  << "  rho_mi=" << format_double(row.rho_mi) << "\n";
      }
      if (sweep_plots) {
        emit_plots(rows, sweep_out);
      }
      std::cout << "wrote " << sweep_out << "/sweep.csv (config hash "
                << config_hash(config) << ")\n";
      return 0;
    }

    if (audit->parsed()) {
      const AuditResult result = audit_sweep(audit_dir);
      std::cout << result.report << "\n";
      return result.ok ? 0 : 1;
    }

    if (plot->parsed()) {
      const std::vector<SweepRow> rows = load_sweep_csv(
          (std::filesystem::path(plot_dir) / "sweep.csv").string());
      emit_plots(rows, plot_dir);
      std::cout << "wrote plots into " << plot_dir << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
