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

#include "milq/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "milq/errors.hpp"

namespace milq {

namespace {

GaussianFit fit_from_accessor(std::int64_t count, std::int64_t dim,
                              const std::function<const double*(std::int64_t)>&
                                  row) {
  if (dim < 1) {
    throw std::invalid_argument("fit_gaussian: empty parameter vectors");
  }
  // The minimal count accepted here is dim + 1; estimation pipelines
  // enforce the stricter trials >= dim + 2 before sampling.
  if (count < dim + 1) {
    throw std::invalid_argument(
        "fit_gaussian: need at least " + std::to_string(dim + 1) +
        " samples for dimension " + std::to_string(dim) + ", got " +
        std::to_string(count));
  }

  GaussianFit fit;
  fit.trials = count;
  fit.mean = Eigen::VectorXd::Zero(dim);
  for (std::int64_t i = 0; i < count; ++i) {
    fit.mean += Eigen::Map<const Eigen::VectorXd>(row(i), dim);
  }
  fit.mean /= static_cast<double>(count);

  fit.cov = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd centered(dim);
  for (std::int64_t i = 0; i < count; ++i) {
    centered = Eigen::Map<const Eigen::VectorXd>(row(i), dim) - fit.mean;
    fit.cov.selfadjointView<Eigen::Lower>().rankUpdate(centered, 1.0);
  }
  fit.cov = fit.cov.selfadjointView<Eigen::Lower>();
  fit.cov /= static_cast<double>(count - 1);

  const double gamma =
      std::max(1e-10, 1e-8 * fit.cov.trace() / static_cast<double>(dim));
  fit.cov.diagonal().array() += gamma;
  return fit;
}

}  // namespace

GaussianFit fit_gaussian(std::span<const ModelParams> samples) {
  if (samples.empty()) {
    throw std::invalid_argument("fit_gaussian: no samples");
  }
  const std::int64_t dim = samples.front().theta.size();
  for (const ModelParams& s : samples) {
    if (s.theta.size() != dim) {
      throw std::invalid_argument("fit_gaussian: inconsistent dimensions");
    }
  }
  return fit_from_accessor(
      static_cast<std::int64_t>(samples.size()), dim,
      [&](std::int64_t i) { return samples[static_cast<std::size_t>(i)].theta.data(); });
}

GaussianFit fit_gaussian_vectors(std::span<const Eigen::VectorXd> samples) {
  if (samples.empty()) {
    throw std::invalid_argument("fit_gaussian: no samples");
  }
  const std::int64_t dim = samples.front().size();
  for (const Eigen::VectorXd& s : samples) {
    if (s.size() != dim) {
      throw std::invalid_argument("fit_gaussian: inconsistent dimensions");
    }
  }
  return fit_from_accessor(
      static_cast<std::int64_t>(samples.size()), dim,
      [&](std::int64_t i) { return samples[static_cast<std::size_t>(i)].data(); });
}

double kl_gaussian(const GaussianFit& p, const GaussianFit& q) {
  const std::int64_t dim = p.dim();
  if (dim != q.dim()) {
    throw std::invalid_argument("kl_gaussian: dimension mismatch");
  }
  if (dim == 0) {
    throw std::invalid_argument("kl_gaussian: empty distributions");
  }

  Eigen::LLT<Eigen::MatrixXd> llt_q(q.cov);
  if (llt_q.info() != Eigen::Success) {
    throw NumericError("kl_gaussian: q covariance not positive definite");
  }
  Eigen::LLT<Eigen::MatrixXd> llt_p(p.cov);
  if (llt_p.info() != Eigen::Success) {
    throw NumericError("kl_gaussian: p covariance not positive definite");
  }

  const double trace_term = llt_q.solve(p.cov).trace();
  const Eigen::VectorXd diff = q.mean - p.mean;
  const double maha = diff.dot(llt_q.solve(diff));

  double log_det_q = 0.0, log_det_p = 0.0;
  for (std::int64_t i = 0; i < dim; ++i) {
    log_det_q += std::log(llt_q.matrixL()(i, i));
    log_det_p += std::log(llt_p.matrixL()(i, i));
  }
  const double kl = 0.5 * (trace_term - static_cast<double>(dim) + maha) +
                    (log_det_q - log_det_p);
  if (!std::isfinite(kl)) {
    throw NumericError("kl_gaussian: nonfinite result");
  }
  return std::max(kl, 0.0);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double tv_gaussian_1d(double mean_p, double var_p, double mean_q,
                      double var_q) {
  if (var_p <= 0.0 || var_q <= 0.0) {
    throw std::invalid_argument("tv_gaussian_1d: variances must be positive");
  }
  const double sd_p = std::sqrt(var_p);
  const double sd_q = std::sqrt(var_q);

  const auto cdf_diff = [&](double x) {
    return normal_cdf((x - mean_p) / sd_p) - normal_cdf((x - mean_q) / sd_q);
  };

  // Density crossings solve a quadratic in x (log-density difference).
  const double a = 0.5 / var_q - 0.5 / var_p;
  const double b = mean_p / var_p - mean_q / var_q;
  const double c = 0.5 * mean_q * mean_q / var_q -
                   0.5 * mean_p * mean_p / var_p + std::log(sd_q / sd_p);

  std::vector<double> crossings;
  if (std::abs(a) < 1e-14 * (1.0 / var_p)) {
    if (mean_p == mean_q) return 0.0;
    crossings.push_back(-c / b);
  } else {
    const double disc = b * b - 4.0 * a * c;
    // Distinct variances always yield two crossings; clamp roundoff.
    const double root = std::sqrt(std::max(disc, 0.0));
    const double x1 = (-b - root) / (2.0 * a);
    const double x2 = (-b + root) / (2.0 * a);
    crossings.push_back(std::min(x1, x2));
    crossings.push_back(std::max(x1, x2));
  }

  // Sum |integral of p - q| over the sign-constant intervals.
  double tv = 0.0;
  double prev = 0.0;  // cdf_diff at -infinity
  for (double x : crossings) {
    const double here = cdf_diff(x);
    tv += std::abs(here - prev);
    prev = here;
  }
  tv += std::abs(0.0 - prev);  // tail to +infinity
  return 0.5 * tv;
}

MvnDistribution::MvnDistribution(const GaussianFit& fit) : mean_(fit.mean) {
  Eigen::LLT<Eigen::MatrixXd> llt(fit.cov);
  if (llt.info() != Eigen::Success) {
    throw NumericError("MvnDistribution: covariance not positive definite");
  }
  chol_lower_ = llt.matrixL();
  double log_det = 0.0;
  for (std::int64_t i = 0; i < chol_lower_.rows(); ++i) {
    log_det += 2.0 * std::log(chol_lower_(i, i));
  }
  log_norm_ = -0.5 * (static_cast<double>(mean_.size()) *
                          std::log(2.0 * M_PI) +
                      log_det);
}

Eigen::VectorXd MvnDistribution::draw(Rng& rng) const {
  Eigen::VectorXd z(mean_.size());
  for (std::int64_t i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return mean_ + chol_lower_ * z;
}

double MvnDistribution::log_density(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd w =
      chol_lower_.triangularView<Eigen::Lower>().solve(x - mean_);
  return log_norm_ - 0.5 * w.squaredNorm();
}

}  // namespace milq
