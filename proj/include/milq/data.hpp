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

#ifndef MILQ_DATA_HPP_
#define MILQ_DATA_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace milq {

// The record universe: every candidate row a training set could be drawn
// from. Feature rows are index-aligned with labels and record_ids.
struct DataUniverse {
  Eigen::MatrixXd features;  // N x p_x
  Eigen::VectorXd labels;    // N
  std::vector<std::int64_t> record_ids;

  std::int64_t size() const { return features.rows(); }
  std::int64_t feature_count() const { return features.cols(); }

  // Enforces shape alignment, finiteness, and unique aligned ids.
  void validate() const;
};

// Indicator of which universe rows form the training dataset.
struct MembershipMask {
  std::vector<bool> bits;
  std::int64_t n = 0;  // number of true bits

  std::vector<std::int64_t> member_rows() const;
  std::vector<std::int64_t> nonmember_rows() const;

  // Stable content hash used for model provenance.
  std::uint64_t digest() const;
};

// Standardize-then-project transform fitted on a raw universe.
struct PcaTransform {
  Eigen::VectorXd means;               // p_raw
  Eigen::VectorXd scales;              // p_raw, positive
  Eigen::MatrixXd components;          // p_raw x p_x, orthonormal columns
  Eigen::VectorXd explained_variance;  // p_x, nonincreasing, nonnegative
};

// Column layout of the UCI Adult files: 14 attributes plus the income label.
struct AdultSchema {
  int column_count = 15;
  std::vector<int> categorical_columns = {1, 3, 5, 6, 7, 8, 9, 13};
  int label_column = 14;
  std::string missing_marker = "?";
  std::string positive_label = ">50K";
  std::string negative_label = "<=50K";
};

struct AdultIngest {
  DataUniverse universe;  // encoded, missing-marker rows removed
  std::size_t rows_parsed = 0;
  std::size_t rows_dropped_missing = 0;
  // Per categorical column: category strings in first-appearance order.
  // Encoded value of a category is its index in this list.
  std::map<int, std::vector<std::string>> category_values;
};

// Reads one or more Adult-layout CSV files (concatenated in the given
// order). Lines that are empty or start with '|' are skipped; a row with
// the wrong field count raises ParseError naming file and line. Rows
// containing the missing marker are dropped after parsing; labels are
// encoded <=50K -> 0, >50K -> 1 (a trailing '.' is accepted).
AdultIngest load_adult_csv(const std::vector<std::string>& paths,
                           const AdultSchema& schema = {});

// Standardizes columns (zero-variance columns keep scale 1) and extracts
// the top-p_x eigenvectors of the standardized sample covariance. Sign
// convention: the largest-magnitude entry of each component is positive.
PcaTransform fit_pca(const DataUniverse& raw, std::int64_t p_x);

// ((raw - means) / scales) * components; labels and ids pass through.
DataUniverse apply_pca(const PcaTransform& transform, const DataUniverse& raw);

// Uniform n-of-N membership mask; deterministic given seed.
MembershipMask sample_mask(std::int64_t N, std::int64_t n, std::uint64_t seed);

// Universe persistence, header `id,f1..fpx,label`.
void save_universe_csv(const DataUniverse& universe, const std::string& path);
DataUniverse load_universe_csv(const std::string& path);

}  // namespace milq

#endif  // MILQ_DATA_HPP_
