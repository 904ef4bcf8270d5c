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

#include "milq/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "milq/errors.hpp"
#include "milq/rng.hpp"

namespace milq {

std::string to_string(ModelKind kind) {
  return kind == ModelKind::linear ? "linear" : "mlp";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "linear") return ModelKind::linear;
  if (name == "mlp") return ModelKind::mlp;
  throw std::invalid_argument("unknown model kind '" + name + "'");
}

QuantizationGrid QuantizationGrid::boxed(std::int64_t p, double half_width,
                                         double step) {
  QuantizationGrid g;
  g.box_lo = Eigen::VectorXd::Constant(p, -half_width);
  g.box_hi = Eigen::VectorXd::Constant(p, half_width);
  g.step = step;
  return g;
}

void QuantizationGrid::validate() const {
  if (step <= 0.0 || !std::isfinite(step)) {
    throw std::invalid_argument("QuantizationGrid: step must be positive");
  }
  if (box_lo.size() != box_hi.size() || box_lo.size() == 0) {
    throw std::invalid_argument("QuantizationGrid: box size mismatch");
  }
  if (!((box_lo.array() < box_hi.array()).all())) {
    throw std::invalid_argument(
        "QuantizationGrid: box_lo must be elementwise below box_hi");
  }
}

void TrainingConfig::validate() const {
  if (lambda < 0.0 || !std::isfinite(lambda)) {
    throw std::invalid_argument("TrainingConfig: lambda must be >= 0");
  }
  if (loss_scale < 0.0 || !std::isfinite(loss_scale)) {
    throw std::invalid_argument("TrainingConfig: loss_scale must be >= 0");
  }
  if (kind == ModelKind::mlp) {
    if (mlp.hidden.empty()) {
      throw std::invalid_argument("TrainingConfig: mlp needs hidden layers");
    }
    for (int h : mlp.hidden) {
      if (h < 1) {
        throw std::invalid_argument("TrainingConfig: hidden width must be >= 1");
      }
    }
    if (sgd.epochs < 1) {
      throw std::invalid_argument("TrainingConfig: epochs must be >= 1");
    }
    if (sgd.step_size <= 0.0) {
      throw std::invalid_argument("TrainingConfig: step size must be > 0");
    }
  }
}

namespace {

// Flattened MLP parameter layout: per layer, row-major weight matrix
// (fan_out x fan_in) followed by the bias vector.
struct MlpPlan {
  std::vector<int> dims;  // [p_x, hidden..., 1]
  std::vector<std::int64_t> weight_offset;
  std::vector<std::int64_t> bias_offset;
  std::vector<std::int64_t> act_offset;  // activation slot per layer
  std::int64_t params = 0;
  std::int64_t act_size = 0;

  MlpPlan(const MlpLayout& layout, std::int64_t p_x) {
    dims.push_back(static_cast<int>(p_x));
    for (int h : layout.hidden) dims.push_back(h);
    dims.push_back(1);
    std::int64_t off = 0;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
      weight_offset.push_back(off);
      off += static_cast<std::int64_t>(dims[l + 1]) * dims[l];
      bias_offset.push_back(off);
      off += dims[l + 1];
    }
    params = off;
    std::int64_t aoff = 0;
    for (int d : dims) {
      act_offset.push_back(aoff);
      aoff += d;
    }
    act_size = aoff;
  }

  std::size_t layer_count() const { return dims.size() - 1; }
};

struct MlpWork {
  std::vector<double> act;
  std::vector<double> delta;

  explicit MlpWork(const MlpPlan& plan)
      : act(static_cast<std::size_t>(plan.act_size)),
        delta(static_cast<std::size_t>(plan.act_size)) {}
};

double mlp_forward(const MlpPlan& plan, const double* theta,
                   const Eigen::VectorXd& x, MlpWork& work) {
  double* act = work.act.data();
  for (int j = 0; j < plan.dims[0]; ++j) act[j] = x(j);
  for (std::size_t l = 0; l < plan.layer_count(); ++l) {
    const int fan_in = plan.dims[l];
    const int fan_out = plan.dims[l + 1];
    const double* w = theta + plan.weight_offset[l];
    const double* b = theta + plan.bias_offset[l];
    const double* in = act + plan.act_offset[l];
    double* out = act + plan.act_offset[l + 1];
    const bool last = (l + 1 == plan.layer_count());
    for (int r = 0; r < fan_out; ++r) {
      double z = b[r];
      const double* wr = w + static_cast<std::int64_t>(r) * fan_in;
      for (int c = 0; c < fan_in; ++c) z += wr[c] * in[c];
      out[r] = last ? z : std::tanh(z);
    }
  }
  return work.act[static_cast<std::size_t>(plan.act_offset.back())];
}

// Accumulates d(loss_scale * (yhat - y)^2)/dtheta into grad (+=).
// Expects work.act filled by a preceding mlp_forward call.
void mlp_backward(const MlpPlan& plan, const double* theta, double y,
                  double loss_scale, MlpWork& work, double* grad) {
  const double* act = work.act.data();
  double* delta = work.delta.data();
  const double yhat = act[plan.act_offset.back()];
  delta[plan.act_offset.back()] = 2.0 * loss_scale * (yhat - y);

  for (std::size_t l = plan.layer_count(); l-- > 0;) {
    const int fan_in = plan.dims[l];
    const int fan_out = plan.dims[l + 1];
    const double* w = theta + plan.weight_offset[l];
    const double* in = act + plan.act_offset[l];
    const double* dout = delta + plan.act_offset[l + 1];
    double* gw = grad + plan.weight_offset[l];
    double* gb = grad + plan.bias_offset[l];
    double* din = delta + plan.act_offset[l];
    for (int c = 0; c < fan_in; ++c) din[c] = 0.0;
    for (int r = 0; r < fan_out; ++r) {
      const double d = dout[r];
      gb[r] += d;
      const double* wr = w + static_cast<std::int64_t>(r) * fan_in;
      double* gwr = gw + static_cast<std::int64_t>(r) * fan_in;
      for (int c = 0; c < fan_in; ++c) {
        gwr[c] += d * in[c];
        din[c] += d * wr[c];
      }
    }
    if (l > 0) {
      // tanh'(z) = 1 - a^2 through the stored activation.
      for (int c = 0; c < fan_in; ++c) {
        din[c] *= 1.0 - in[c] * in[c];
      }
    }
  }
}

void check_rows(const DataUniverse& universe, const Rows& rows,
                const char* who) {
  if (rows.empty()) {
    throw std::invalid_argument(std::string(who) + ": empty dataset");
  }
  for (std::int64_t r : rows) {
    if (r < 0 || r >= universe.size()) {
      throw std::invalid_argument(std::string(who) + ": row " +
                                  std::to_string(r) + " out of range");
    }
  }
}

void check_theta(const ModelParams& params, const TrainingConfig& config,
                 std::int64_t p_x, const char* who) {
  const std::int64_t expected = param_count(config, p_x);
  if (params.theta.size() != expected) {
    throw std::invalid_argument(std::string(who) + ": theta has " +
                                std::to_string(params.theta.size()) +
                                " entries, expected " +
                                std::to_string(expected));
  }
}

}  // namespace

std::int64_t param_count(const TrainingConfig& config, std::int64_t p_x) {
  if (config.kind == ModelKind::linear) return p_x;
  MlpPlan plan(config.mlp, p_x);
  return plan.params;
}

double predict(const ModelParams& params, const TrainingConfig& config,
               const Eigen::VectorXd& x) {
  if (config.kind == ModelKind::linear) {
    return params.theta.dot(x);
  }
  MlpPlan plan(config.mlp, x.size());
  MlpWork work(plan);
  return mlp_forward(plan, params.theta.data(), x, work);
}

double example_loss(const ModelParams& params, const TrainingConfig& config,
                    const Eigen::VectorXd& x, double y) {
  const double r = predict(params, config, x) - y;
  return config.loss_scale * r * r;
}

Eigen::VectorXd example_loss_gradient(const ModelParams& params,
                                      const TrainingConfig& config,
                                      const Eigen::VectorXd& x, double y) {
  if (config.kind == ModelKind::linear) {
    const double r = params.theta.dot(x) - y;
    return 2.0 * config.loss_scale * r * x;
  }
  MlpPlan plan(config.mlp, x.size());
  MlpWork work(plan);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(plan.params);
  mlp_forward(plan, params.theta.data(), x, work);
  mlp_backward(plan, params.theta.data(), y, config.loss_scale, work,
               grad.data());
  return grad;
}

double fitness(const ModelParams& params, const DataUniverse& universe,
               const Rows& rows, const TrainingConfig& config) {
  config.validate();
  check_rows(universe, rows, "fitness");
  check_theta(params, config, universe.feature_count(), "fitness");

  double data_term = 0.0;
  if (config.kind == ModelKind::linear) {
    for (std::int64_t r : rows) {
      const double d = params.theta.dot(universe.features.row(r)) -
                       universe.labels(r);
      data_term += d * d;
    }
  } else {
    MlpPlan plan(config.mlp, universe.feature_count());
    MlpWork work(plan);
    Eigen::VectorXd x(universe.feature_count());
    for (std::int64_t r : rows) {
      x = universe.features.row(r);
      const double d =
          mlp_forward(plan, params.theta.data(), x, work) - universe.labels(r);
      data_term += d * d;
    }
  }
  return config.lambda * params.theta.squaredNorm() +
         config.loss_scale * data_term / static_cast<double>(rows.size());
}

Eigen::VectorXd fitness_gradient(const ModelParams& params,
                                 const DataUniverse& universe, const Rows& rows,
                                 const TrainingConfig& config) {
  config.validate();
  check_rows(universe, rows, "fitness_gradient");
  check_theta(params, config, universe.feature_count(), "fitness_gradient");

  Eigen::VectorXd grad = 2.0 * config.lambda * params.theta;
  const double inv = 1.0 / static_cast<double>(rows.size());
  if (config.kind == ModelKind::linear) {
    for (std::int64_t r : rows) {
      const double d = params.theta.dot(universe.features.row(r)) -
                       universe.labels(r);
      grad += (2.0 * config.loss_scale * inv * d) *
              universe.features.row(r).transpose();
    }
  } else {
    MlpPlan plan(config.mlp, universe.feature_count());
    MlpWork work(plan);
    Eigen::VectorXd data_grad = Eigen::VectorXd::Zero(plan.params);
    Eigen::VectorXd x(universe.feature_count());
    for (std::int64_t r : rows) {
      x = universe.features.row(r);
      mlp_forward(plan, params.theta.data(), x, work);
      mlp_backward(plan, params.theta.data(), universe.labels(r),
                   config.loss_scale, work, data_grad.data());
    }
    grad += inv * data_grad;
  }
  return grad;
}

ModelParams train_ridge(const DataUniverse& universe, const Rows& rows,
                        const TrainingConfig& config) {
  config.validate();
  check_rows(universe, rows, "train_ridge");
  const std::int64_t p = universe.feature_count();

  ModelParams params;
  params.kind = ModelKind::linear;

  // With loss_scale = 0 the objective reduces to lambda * theta' * theta;
  // theta = 0 is the (canonical, for lambda = 0) minimizer.
  if (config.loss_scale == 0.0) {
    params.theta = Eigen::VectorXd::Zero(p);
    return params;
  }

  Eigen::MatrixXd design(static_cast<std::int64_t>(rows.size()), p);
  Eigen::VectorXd targets(static_cast<std::int64_t>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    design.row(static_cast<std::int64_t>(i)) = universe.features.row(rows[i]);
    targets(static_cast<std::int64_t>(i)) = universe.labels(rows[i]);
  }

  const double ridge = static_cast<double>(rows.size()) * config.lambda /
                       config.loss_scale;
  Eigen::MatrixXd normal = design.transpose() * design;
  normal.diagonal().array() += ridge;
  const Eigen::VectorXd rhs = design.transpose() * targets;

  if (ridge == 0.0) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
    if (!lu.isInvertible()) {
      throw NumericError(
          "train_ridge: singular normal equations with lambda = 0");
    }
    params.theta = lu.solve(rhs);
  } else {
    Eigen::LLT<Eigen::MatrixXd> llt(normal);
    if (llt.info() != Eigen::Success) {
      throw NumericError("train_ridge: factorization failed");
    }
    params.theta = llt.solve(rhs);
  }
  if (!params.theta.allFinite()) {
    throw NumericError("train_ridge: nonfinite solution");
  }
  return params;
}

namespace {

using RowMajorMap = Eigen::Map<
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using ConstRowMajorMap = Eigen::Map<const Eigen::Matrix<
    double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

// Batched activations/deltas for one gradient step over `count` examples.
struct MlpBatchWork {
  std::vector<Eigen::MatrixXd> act;    // per layer, count x width
  std::vector<Eigen::MatrixXd> delta;  // per layer, count x width

  MlpBatchWork(const MlpPlan& plan, std::int64_t count) {
    for (int d : plan.dims) {
      act.emplace_back(count, d);
      delta.emplace_back(count, d);
    }
  }
};

// Runs forward + backward over the batch in work.act[0]; accumulates the
// summed parameter gradient into grad and returns the summed scaled loss.
double mlp_batch_pass(const MlpPlan& plan, const double* theta,
                      const Eigen::VectorXd& targets, double loss_scale,
                      MlpBatchWork& work, double* grad) {
  const std::size_t layers = plan.layer_count();
  for (std::size_t l = 0; l < layers; ++l) {
    ConstRowMajorMap w(theta + plan.weight_offset[l], plan.dims[l + 1],
                       plan.dims[l]);
    const Eigen::Map<const Eigen::VectorXd> b(theta + plan.bias_offset[l],
                                              plan.dims[l + 1]);
    work.act[l + 1].noalias() = work.act[l] * w.transpose();
    work.act[l + 1].rowwise() += b.transpose();
    if (l + 1 < layers) {
      work.act[l + 1] = work.act[l + 1].array().tanh();
    }
  }

  const Eigen::MatrixXd& output = work.act[layers];
  work.delta[layers] =
      2.0 * loss_scale * (output.col(0) - targets);
  const double loss = loss_scale * (output.col(0) - targets).squaredNorm();

  for (std::size_t l = layers; l-- > 0;) {
    RowMajorMap gw(grad + plan.weight_offset[l], plan.dims[l + 1],
                   plan.dims[l]);
    Eigen::Map<Eigen::VectorXd> gb(grad + plan.bias_offset[l],
                                   plan.dims[l + 1]);
    gw.noalias() += work.delta[l + 1].transpose() * work.act[l];
    gb.noalias() += work.delta[l + 1].colwise().sum().transpose();
    if (l > 0) {
      ConstRowMajorMap w(theta + plan.weight_offset[l], plan.dims[l + 1],
                         plan.dims[l]);
      work.delta[l].noalias() = work.delta[l + 1] * w;
      work.delta[l].array() *= 1.0 - work.act[l].array().square();
    }
  }
  return loss;
}

}  // namespace

ModelParams train_mlp(const DataUniverse& universe, const Rows& rows,
                      const TrainingConfig& config, std::uint64_t seed) {
  config.validate();
  check_rows(universe, rows, "train_mlp");

  const std::int64_t p_x = universe.feature_count();
  MlpPlan plan(config.mlp, p_x);

  ModelParams params;
  params.kind = ModelKind::mlp;
  params.provenance.seed = seed;
  params.theta.resize(plan.params);

  Rng init_rng(derive_seed(seed, {fnv1a64("mlp-init")}));
  for (std::size_t l = 0; l < plan.layer_count(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(plan.dims[l]));
    const std::int64_t count =
        static_cast<std::int64_t>(plan.dims[l + 1]) * (plan.dims[l] + 1);
    double* dst = params.theta.data() + plan.weight_offset[l];
    for (std::int64_t k = 0; k < count; ++k) {
      dst[k] = bound * (2.0 * init_rng.uniform() - 1.0);
    }
  }

  const std::int64_t n = static_cast<std::int64_t>(rows.size());
  const int batch = config.sgd.batch_size;
  const bool full_batch = batch <= 0 || batch >= n;
  Rng shuffle_rng(derive_seed(seed, {fnv1a64("mlp-shuffle")}));
  std::vector<std::int64_t> order(rows.begin(), rows.end());

  Eigen::VectorXd grad(plan.params);

  if (full_batch) {
    MlpBatchWork work(plan, n);
    Eigen::VectorXd targets(n);
    for (std::int64_t i = 0; i < n; ++i) {
      work.act[0].row(i) = universe.features.row(rows[static_cast<std::size_t>(i)]);
      targets(i) = universe.labels(rows[static_cast<std::size_t>(i)]);
    }
    for (int epoch = 0; epoch < config.sgd.epochs; ++epoch) {
      grad.setZero();
      const double epoch_loss = mlp_batch_pass(
          plan, params.theta.data(), targets, config.loss_scale, work,
          grad.data());
      grad /= static_cast<double>(n);
      grad += 2.0 * config.lambda * params.theta;
      params.theta -= config.sgd.step_size * grad;
      if (!std::isfinite(epoch_loss) || !params.theta.allFinite()) {
        throw NumericError("train_mlp: diverged at epoch " +
                           std::to_string(epoch));
      }
    }
    return params;
  }

  for (int epoch = 0; epoch < config.sgd.epochs; ++epoch) {
    double epoch_loss = 0.0;
    shuffle_rng.shuffle(order);
    for (std::int64_t start = 0; start < n; start += batch) {
      const std::int64_t stop = std::min(n, start + batch);
      const std::int64_t count = stop - start;
      MlpBatchWork work(plan, count);
      Eigen::VectorXd targets(count);
      for (std::int64_t i = 0; i < count; ++i) {
        const std::int64_t r = order[static_cast<std::size_t>(start + i)];
        work.act[0].row(i) = universe.features.row(r);
        targets(i) = universe.labels(r);
      }
      grad.setZero();
      epoch_loss += mlp_batch_pass(plan, params.theta.data(), targets,
                                   config.loss_scale, work, grad.data());
      grad /= static_cast<double>(count);
      grad += 2.0 * config.lambda * params.theta;
      params.theta -= config.sgd.step_size * grad;
    }
    if (!std::isfinite(epoch_loss) || !params.theta.allFinite()) {
      throw NumericError("train_mlp: diverged at epoch " +
                         std::to_string(epoch));
    }
  }
  return params;
}

ModelParams train_model(const DataUniverse& universe, const Rows& rows,
                        const TrainingConfig& config, std::uint64_t seed) {
  if (config.kind == ModelKind::linear) {
    ModelParams params = train_ridge(universe, rows, config);
    params.provenance.seed = seed;
    return params;
  }
  return train_mlp(universe, rows, config, seed);
}

ModelParams quantize(const ModelParams& params, const QuantizationGrid& grid) {
  grid.validate();
  if (grid.box_lo.size() != params.theta.size()) {
    throw std::invalid_argument("quantize: grid dimension " +
                                std::to_string(grid.box_lo.size()) +
                                " does not match theta dimension " +
                                std::to_string(params.theta.size()));
  }
  ModelParams out = params;
  for (std::int64_t i = 0; i < out.theta.size(); ++i) {
    const double clipped =
        std::clamp(params.theta(i), grid.box_lo(i), grid.box_hi(i));
    // nearbyint under the default rounding mode resolves ties to even.
    out.theta(i) = std::nearbyint(clipped / grid.step) * grid.step;
  }
  return out;
}

double model_sensitivity(const TrainingConfig& config,
                         const DataUniverse& universe,
                         const std::vector<ModelParams>& theta_samples,
                         const Rows& probe) {
  config.validate();
  check_rows(universe, probe, "model_sensitivity");
  if (theta_samples.empty()) {
    throw std::invalid_argument("model_sensitivity: no parameter samples");
  }
  double best = 0.0;
  Eigen::VectorXd x(universe.feature_count());
  for (const ModelParams& params : theta_samples) {
    check_theta(params, config, universe.feature_count(), "model_sensitivity");
    for (std::int64_t r : probe) {
      x = universe.features.row(r);
      const double g =
          example_loss_gradient(params, config, x, universe.labels(r)).norm();
      if (!std::isfinite(g)) {
        throw NumericError("model_sensitivity: nonfinite gradient");
      }
      best = std::max(best, g);
    }
  }
  return best;
}

nlohmann::json params_to_json(const ModelParams& params) {
  nlohmann::json j;
  j["kind"] = to_string(params.kind);
  j["theta"] = std::vector<double>(params.theta.data(),
                                   params.theta.data() + params.theta.size());
  j["provenance"] = {{"seed", params.provenance.seed},
                     {"mask_digest", params.provenance.mask_digest},
                     {"sigma", params.provenance.noise_sigma}};
  return j;
}

ModelParams params_from_json(const nlohmann::json& j) {
  ModelParams params;
  params.kind = model_kind_from_string(j.at("kind").get<std::string>());
  const auto values = j.at("theta").get<std::vector<double>>();
  params.theta = Eigen::Map<const Eigen::VectorXd>(
      values.data(), static_cast<std::int64_t>(values.size()));
  const auto& prov = j.at("provenance");
  params.provenance.seed = prov.at("seed").get<std::uint64_t>();
  params.provenance.mask_digest = prov.at("mask_digest").get<std::uint64_t>();
  params.provenance.noise_sigma = prov.at("sigma").get<double>();
  return params;
}

}  // namespace milq
