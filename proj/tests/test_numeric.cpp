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

#include "milq/numeric.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "milq/rng.hpp"

using namespace milq;

TEST_CASE("pairwise_sum matches plain summation on benign data") {
  std::vector<double> values;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  double plain = 0.0;
  for (int i = 0; i < 1000; ++i) {
    values.push_back(dist(rng));
    plain += values.back();
  }
  CHECK(pairwise_sum(values) == doctest::Approx(plain).epsilon(1e-12));
}

TEST_CASE("pairwise_sum splits are associative for the audit contract") {
  // The same vector must reduce to the same bits regardless of who calls.
  std::vector<double> values;
  for (int i = 0; i < 777; ++i) values.push_back(std::sin(i) * 1e3);
  const double once = pairwise_sum(values);
  const double again = pairwise_sum(values);
  CHECK(once == again);
}

TEST_CASE("sample_stddev on a hand example") {
  const std::vector<double> v{2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0};
  // mean 5, squared deviations sum 32, unbiased variance 32/7
  CHECK(sample_stddev(v) == doctest::Approx(std::sqrt(32.0 / 7.0)));
  CHECK(sample_stddev(std::vector<double>{3.0}) == 0.0);
}

TEST_CASE("spearman on hand-ranked data") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0, 5.0};
  const std::vector<double> up{10.0, 20.0, 30.0, 40.0, 50.0};
  const std::vector<double> down{5.0, 4.0, 3.0, 2.0, 1.0};
  CHECK(spearman(x, up) == doctest::Approx(1.0));
  CHECK(spearman(x, down) == doctest::Approx(-1.0));

  // one adjacent swap in a 5-point descending sequence: rho = -0.9
  const std::vector<double> swapped{5.0, 4.0, 2.0, 3.0, 1.0};
  CHECK(spearman(x, swapped) == doctest::Approx(-0.9));

  const std::vector<double> tied{1.0, 1.0, 1.0, 1.0, 1.0};
  CHECK(spearman(x, tied) == 0.0);
}

TEST_CASE("format_double round-trips exactly") {
  Rng rng(17);
  for (int i = 0; i < 2000; ++i) {
    double v = (rng.uniform() - 0.5) * std::pow(10.0, rng.below(40)) *
               std::pow(10.0, -static_cast<double>(rng.below(40)));
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(parse_double(format_double(0.0)) == 0.0);
  CHECK(format_double(10.0) == "10");
}

TEST_CASE("parse_double rejects garbage") {
  CHECK_THROWS_AS(parse_double("12x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_double(""), std::invalid_argument);
}
