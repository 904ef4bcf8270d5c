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

#ifndef MILQ_NUMERIC_HPP_
#define MILQ_NUMERIC_HPP_

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace milq {

// Pairwise (cascade) summation. Order-independent aggregation contract:
// reductions over per-trial and per-record values go through this.
double pairwise_sum(std::span<const double> values);

double mean(std::span<const double> values);

// Unbiased (n-1) standard deviation; 0 for fewer than two values.
double sample_stddev(std::span<const double> values);

// Standard error of the mean: sample_stddev / sqrt(n).
double standard_error(std::span<const double> values);

// Spearman rank correlation with midranks for ties. Requires equal sizes
// of at least 2; returns 0 when either argument is entirely tied.
double spearman(std::span<const double> x, std::span<const double> y);

// Shortest round-trip decimal formatting (std::to_chars), locale-free.
// parse_double inverts it exactly.
std::string format_double(double value);
double parse_double(std::string_view text);

}  // namespace milq

#endif  // MILQ_NUMERIC_HPP_
