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

#ifndef MILQ_MODEL_HPP_
#define MILQ_MODEL_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "milq/data.hpp"

namespace milq {

using Rows = std::vector<std::int64_t>;

enum class ModelKind { linear, mlp };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct Provenance {
  std::uint64_t seed = 0;
  std::uint64_t mask_digest = 0;
  double noise_sigma = 0.0;
};

struct ModelParams {
  Eigen::VectorXd theta;
  ModelKind kind = ModelKind::linear;
  Provenance provenance;
};

// Finite parameter grid: clip to [box_lo, box_hi], then round each
// coordinate to the nearest multiple of step (ties to even).
struct QuantizationGrid {
  Eigen::VectorXd box_lo;
  Eigen::VectorXd box_hi;
  double step = 0.0;

  // Default grid modelling finite machine precision: step 2^-16 on
  // [-64, 64]^p.
  static QuantizationGrid boxed(std::int64_t p, double half_width = 64.0,
                                double step = 0x1.0p-16);
  void validate() const;
};

struct MlpLayout {
  std::vector<int> hidden = {8, 8};  // tanh hidden layers, linear output
};

struct SgdConfig {
  int epochs = 40;
  double step_size = 0.05;
  int batch_size = 0;  // 0 = full batch
};

struct TrainingConfig {
  double lambda = 0.0;      // regularization weight on theta' * theta
  double loss_scale = 1.0;  // multiplies the data loss term
  ModelKind kind = ModelKind::linear;
  MlpLayout mlp;
  SgdConfig sgd;

  void validate() const;
};

std::int64_t param_count(const TrainingConfig& config, std::int64_t p_x);

// Model output for a single input row.
double predict(const ModelParams& params, const TrainingConfig& config,
               const Eigen::VectorXd& x);

// Scaled per-example loss: loss_scale * (predict(x) - y)^2.
double example_loss(const ModelParams& params, const TrainingConfig& config,
                    const Eigen::VectorXd& x, double y);

// Gradient of the scaled per-example loss with respect to theta.
Eigen::VectorXd example_loss_gradient(const ModelParams& params,
                                      const TrainingConfig& config,
                                      const Eigen::VectorXd& x, double y);

// Training objective: lambda * theta' * theta
//                     + loss_scale * mean over rows of (prediction - y)^2.
double fitness(const ModelParams& params, const DataUniverse& universe,
               const Rows& rows, const TrainingConfig& config);

Eigen::VectorXd fitness_gradient(const ModelParams& params,
                                 const DataUniverse& universe, const Rows& rows,
                                 const TrainingConfig& config);

// Exact stationary point of the ridge objective via the normal equations
// (X'X + |D| lambda / loss_scale I) theta = X'y. Deterministic. With
// loss_scale = 0 the data term vanishes and the minimizer is theta = 0.
ModelParams train_ridge(const DataUniverse& universe, const Rows& rows,
                        const TrainingConfig& config);

// Gradient-descent training of the tanh MLP; deterministic given seed.
ModelParams train_mlp(const DataUniverse& universe, const Rows& rows,
                      const TrainingConfig& config, std::uint64_t seed);

// Dispatch on config.kind (seed ignored for the closed-form linear model).
ModelParams train_model(const DataUniverse& universe, const Rows& rows,
                        const TrainingConfig& config, std::uint64_t seed);

ModelParams quantize(const ModelParams& params, const QuantizationGrid& grid);

// Empirical model sensitivity: max over probe records and parameter
// samples of the l2 norm of the per-example loss gradient. A lower bound
// on the underlying supremum.
double model_sensitivity(const TrainingConfig& config,
                         const DataUniverse& universe,
                         const std::vector<ModelParams>& theta_samples,
                         const Rows& probe);

nlohmann::json params_to_json(const ModelParams& params);
ModelParams params_from_json(const nlohmann::json& j);

}  // namespace milq

#endif  // MILQ_MODEL_HPP_
