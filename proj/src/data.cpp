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

#include "milq/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "milq/errors.hpp"
#include "milq/numeric.hpp"
#include "milq/rng.hpp"

namespace milq {

void DataUniverse::validate() const {
  const std::int64_t n = features.rows();
  if (n < 2) {
    throw std::invalid_argument("DataUniverse: need at least 2 rows");
  }
  if (labels.size() != n || static_cast<std::int64_t>(record_ids.size()) != n) {
    throw std::invalid_argument("DataUniverse: misaligned labels or ids");
  }
  if (!features.allFinite() || !labels.allFinite()) {
    throw std::invalid_argument("DataUniverse: nonfinite entries");
  }
  std::set<std::int64_t> ids(record_ids.begin(), record_ids.end());
  if (static_cast<std::int64_t>(ids.size()) != n) {
    throw std::invalid_argument("DataUniverse: duplicate record ids");
  }
}

std::vector<std::int64_t> MembershipMask::member_rows() const {
  std::vector<std::int64_t> rows;
  rows.reserve(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) rows.push_back(static_cast<std::int64_t>(i));
  }
  return rows;
}

std::vector<std::int64_t> MembershipMask::nonmember_rows() const {
  std::vector<std::int64_t> rows;
  rows.reserve(bits.size() - static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (!bits[i]) rows.push_back(static_cast<std::int64_t>(i));
  }
  return rows;
}

std::uint64_t MembershipMask::digest() const {
  std::uint64_t h = derive_seed(0x6d61736bULL, {bits.size(),
                                                static_cast<std::uint64_t>(n)});
  std::uint64_t word = 0;
  int fill = 0;
  for (bool b : bits) {
    word = (word << 1) | (b ? 1u : 0u);
    if (++fill == 64) {
      h = mix64(h ^ word);
      word = 0;
      fill = 0;
    }
  }
  if (fill > 0) h = mix64(h ^ word);
  return h;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    fields.push_back(trim(field));
  }
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

}  // namespace

AdultIngest load_adult_csv(const std::vector<std::string>& paths,
                           const AdultSchema& schema) {
  if (paths.empty()) {
    throw std::invalid_argument("load_adult_csv: no input files");
  }
  std::vector<bool> is_categorical(static_cast<std::size_t>(schema.column_count),
                                   false);
  for (int c : schema.categorical_columns) {
    is_categorical[static_cast<std::size_t>(c)] = true;
  }

  AdultIngest out;
  std::map<int, std::unordered_map<std::string, double>> encoders;
  std::vector<std::vector<double>> rows;

  const int p_raw = schema.column_count - 1;
  for (const std::string& path : paths) {
    std::ifstream in(path);
    if (!in) {
      throw ParseError("load_adult_csv: cannot open '" + path + "'");
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string stripped = trim(line);
      if (stripped.empty() || stripped[0] == '|') continue;
      std::vector<std::string> fields = split_csv_line(stripped);
      if (static_cast<int>(fields.size()) != schema.column_count) {
        throw ParseError("load_adult_csv: " + path + ":" +
                         std::to_string(line_no) + ": expected " +
                         std::to_string(schema.column_count) +
                         " fields, got " + std::to_string(fields.size()));
      }
      ++out.rows_parsed;
      bool missing = false;
      for (const std::string& f : fields) {
        if (f == schema.missing_marker) {
          missing = true;
          break;
        }
      }
      if (missing) {
        ++out.rows_dropped_missing;
        continue;
      }
      std::vector<double> row(static_cast<std::size_t>(p_raw) + 1);
      for (int c = 0; c < schema.column_count; ++c) {
        const std::string& f = fields[static_cast<std::size_t>(c)];
        if (c == schema.label_column) {
          std::string label = f;
          if (!label.empty() && label.back() == '.') label.pop_back();
          if (label == schema.negative_label) {
            row[static_cast<std::size_t>(p_raw)] = 0.0;
          } else if (label == schema.positive_label) {
            row[static_cast<std::size_t>(p_raw)] = 1.0;
          } else {
            throw ParseError("load_adult_csv: " + path + ":" +
                             std::to_string(line_no) + ": unknown label '" +
                             f + "'");
          }
        } else if (is_categorical[static_cast<std::size_t>(c)]) {
          auto& enc = encoders[c];
          auto it = enc.find(f);
          if (it == enc.end()) {
            const double code = static_cast<double>(enc.size());
            enc.emplace(f, code);
            out.category_values[c].push_back(f);
            row[static_cast<std::size_t>(c)] = code;
          } else {
            row[static_cast<std::size_t>(c)] = it->second;
          }
        } else {
          try {
            row[static_cast<std::size_t>(c)] = parse_double(f);
          } catch (const std::invalid_argument&) {
            throw ParseError("load_adult_csv: " + path + ":" +
                             std::to_string(line_no) +
                             ": non-numeric value '" + f + "' in column " +
                             std::to_string(c));
          }
        }
      }
      rows.push_back(std::move(row));
    }
  }

  if (rows.empty()) {
    throw ParseError("load_adult_csv: no rows retained (empty universe)");
  }

  const std::int64_t n = static_cast<std::int64_t>(rows.size());
  out.universe.features.resize(n, p_raw);
  out.universe.labels.resize(n);
  out.universe.record_ids.resize(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    for (int c = 0; c < p_raw; ++c) {
      out.universe.features(i, c) = row[static_cast<std::size_t>(c)];
    }
    out.universe.labels(i) = row[static_cast<std::size_t>(p_raw)];
    out.universe.record_ids[static_cast<std::size_t>(i)] = i;
  }
  return out;
}

PcaTransform fit_pca(const DataUniverse& raw, std::int64_t p_x) {
  const std::int64_t n = raw.features.rows();
  const std::int64_t p_raw = raw.features.cols();
  if (n < 2) {
    throw std::invalid_argument("fit_pca: need at least 2 rows");
  }
  if (p_x < 1 || p_x > p_raw) {
    throw std::invalid_argument("fit_pca: p_x=" + std::to_string(p_x) +
                                " out of range for raw dimension " +
                                std::to_string(p_raw));
  }

  PcaTransform t;
  t.means = raw.features.colwise().mean();
  Eigen::MatrixXd centered = raw.features.rowwise() - t.means.transpose();
  Eigen::VectorXd var =
      centered.array().square().colwise().sum() / static_cast<double>(n - 1);
  t.scales.resize(p_raw);
  for (std::int64_t j = 0; j < p_raw; ++j) {
    t.scales(j) = var(j) > 0.0 ? std::sqrt(var(j)) : 1.0;
  }
  Eigen::MatrixXd standardized =
      centered.array().rowwise() / t.scales.transpose().array();

  Eigen::MatrixXd cov = (standardized.transpose() * standardized) /
                        static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) {
    throw NumericError("fit_pca: eigendecomposition failed");
  }

  // Eigen returns ascending eigenvalues; take the top p_x in descending
  // order and fix signs so the largest-magnitude entry is positive.
  t.components.resize(p_raw, p_x);
  t.explained_variance.resize(p_x);
  for (std::int64_t k = 0; k < p_x; ++k) {
    const std::int64_t src = p_raw - 1 - k;
    Eigen::VectorXd v = eig.eigenvectors().col(src);
    std::int64_t arg_max = 0;
    v.cwiseAbs().maxCoeff(&arg_max);
    if (v(arg_max) < 0.0) v = -v;
    t.components.col(k) = v;
    t.explained_variance(k) = std::max(eig.eigenvalues()(src), 0.0);
  }
  return t;
}

DataUniverse apply_pca(const PcaTransform& transform, const DataUniverse& raw) {
  if (raw.features.cols() != transform.means.size()) {
    throw std::invalid_argument(
        "apply_pca: raw dimension " + std::to_string(raw.features.cols()) +
        " does not match transform dimension " +
        std::to_string(transform.means.size()));
  }
  DataUniverse out;
  Eigen::MatrixXd standardized =
      (raw.features.rowwise() - transform.means.transpose()).array().rowwise() /
      transform.scales.transpose().array();
  out.features = standardized * transform.components;
  out.labels = raw.labels;
  out.record_ids = raw.record_ids;
  return out;
}

MembershipMask sample_mask(std::int64_t N, std::int64_t n, std::uint64_t seed) {
  if (n <= 0 || n >= N) {
    throw std::invalid_argument("sample_mask: need 0 < n < N, got n=" +
                                std::to_string(n) + ", N=" + std::to_string(N));
  }
  Rng rng(seed);
  MembershipMask mask;
  mask.bits.assign(static_cast<std::size_t>(N), false);
  mask.n = n;
  for (std::int64_t row : rng.sample_without_replacement(N, n)) {
    mask.bits[static_cast<std::size_t>(row)] = true;
  }
  return mask;
}

void save_universe_csv(const DataUniverse& universe, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("save_universe_csv: cannot write '" + path + "'");
  }
  out << "id";
  for (std::int64_t j = 0; j < universe.feature_count(); ++j) {
    out << ",f" << (j + 1);
  }
  out << ",label\n";
  for (std::int64_t i = 0; i < universe.size(); ++i) {
    out << universe.record_ids[static_cast<std::size_t>(i)];
    for (std::int64_t j = 0; j < universe.feature_count(); ++j) {
      out << ',' << format_double(universe.features(i, j));
    }
    out << ',' << format_double(universe.labels(i)) << '\n';
  }
}

DataUniverse load_universe_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("load_universe_csv: cannot open '" + path + "'");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError("load_universe_csv: empty file '" + path + "'");
  }
  const std::vector<std::string> header = split_csv_line(trim(line));
  if (header.size() < 3 || header.front() != "id" || header.back() != "label") {
    throw ParseError("load_universe_csv: bad header in '" + path + "'");
  }
  const std::int64_t p = static_cast<std::int64_t>(header.size()) - 2;

  std::vector<std::vector<double>> rows;
  std::vector<std::int64_t> ids;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(stripped);
    if (static_cast<std::int64_t>(fields.size()) != p + 2) {
      throw ParseError("load_universe_csv: " + path + ":" +
                       std::to_string(line_no) + ": wrong field count");
    }
    try {
      ids.push_back(static_cast<std::int64_t>(std::stoll(fields[0])));
      std::vector<double> row(static_cast<std::size_t>(p) + 1);
      for (std::int64_t j = 0; j < p + 1; ++j) {
        row[static_cast<std::size_t>(j)] =
            parse_double(fields[static_cast<std::size_t>(j) + 1]);
      }
      rows.push_back(std::move(row));
    } catch (const std::exception&) {
      throw ParseError("load_universe_csv: " + path + ":" +
                       std::to_string(line_no) + ": bad numeric field");
    }
  }
  if (rows.empty()) {
    throw ParseError("load_universe_csv: no data rows in '" + path + "'");
  }

  DataUniverse u;
  const std::int64_t n = static_cast<std::int64_t>(rows.size());
  u.features.resize(n, p);
  u.labels.resize(n);
  u.record_ids = std::move(ids);
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < p; ++j) {
      u.features(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    u.labels(i) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(p)];
  }
  u.validate();
  return u;
}

}  // namespace milq
