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

#ifndef MILQ_GAUSSIAN_HPP_
#define MILQ_GAUSSIAN_HPP_

#include <span>

#include "milq/model.hpp"
#include "milq/rng.hpp"

namespace milq {

// Gaussian approximation of a conditional parameter distribution,
// estimated from Monte-Carlo retraining samples.
struct GaussianFit {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  int condition = 0;        // membership bit the samples were drawn under
  std::int64_t trials = 0;  // number of samples behind the fit

  std::int64_t dim() const { return mean.size(); }
};

// Sample mean and unbiased sample covariance with a shrinkage ridge
// gamma = max(1e-10, 1e-8 * trace(cov) / p) added to the diagonal so the
// result is invertible even for rank-deficient sample spreads.
GaussianFit fit_gaussian(std::span<const ModelParams> samples);
GaussianFit fit_gaussian_vectors(std::span<const Eigen::VectorXd> samples);

// Closed-form KL divergence between multivariate Gaussians, in nats:
// 0.5 (tr(Sq^-1 Sp) - p + (mq-mp)' Sq^-1 (mq-mp) + ln det Sq / det Sp).
// Clamped at zero against roundoff.
double kl_gaussian(const GaussianFit& p, const GaussianFit& q);

// Standard normal CDF.
double normal_cdf(double x);

// Exact total variation distance between scalar Gaussians, computed from
// the analytic density crossing points and CDF differences.
double tv_gaussian_1d(double mean_p, double var_p, double mean_q, double var_q);

// Cached Cholesky view of a GaussianFit for repeated sampling and
// log-density evaluation.
class MvnDistribution {
 public:
  explicit MvnDistribution(const GaussianFit& fit);

  const Eigen::VectorXd& mean() const { return mean_; }
  Eigen::VectorXd draw(Rng& rng) const;
  double log_density(const Eigen::VectorXd& x) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd chol_lower_;
  double log_norm_;  // -(p/2) ln 2 pi - (1/2) ln det
};

}  // namespace milq

#endif  // MILQ_GAUSSIAN_HPP_
