// Copyright 2026 The evsound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "errors.h"
#include "metrics.h"
#include "oracles.h"
#include "rng.h"

using namespace evsound;

TEST_SUITE_BEGIN("metrics");

TEST_CASE("auroc on the worked examples") {
  CHECK(Auroc({0.1, 0.2}, {0.3, 0.4}) == 1.0);
  CHECK(Auroc({0.1, 0.2, 0.3}, {0.1, 0.2, 0.3}) == 0.5);
  CHECK(Auroc({0.1, 0.2, 0.4}, {0.3, 0.5, 0.6}) ==
        doctest::Approx(8.0 / 9.0).epsilon(1e-15));
  CHECK_THROWS_AS(Auroc({}, {1.0}), DataError);
  CHECK_THROWS_AS(Auroc({1.0}, {}), DataError);
}

TEST_CASE("auroc equals brute-force pair counting with ties") {
  Rng rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    size_t nh = 1 + rng.UniformInt(40);
    size_t na = 1 + rng.UniformInt(40);
    std::vector<double> h(nh), a(na);
    // Quantized scores inject plenty of ties.
    for (auto& v : h) v = static_cast<double>(rng.UniformInt(12)) / 4.0;
    for (auto& v : a) v = static_cast<double>(rng.UniformInt(12)) / 4.0;
    CHECK(Auroc(h, a) == oracles::BruteAuroc(h, a));
  }
}

TEST_CASE("auroc is invariant under strictly monotone transforms") {
  Rng rng(2);
  std::vector<double> h(25), a(30);
  for (auto& v : h) v = rng.Uniform();
  for (auto& v : a) v = rng.Uniform() + 0.2;
  double base = Auroc(h, a);
  auto transform = [](std::vector<double> v) {
    for (auto& x : v) x = std::exp(3.0 * x) - 1.0;
    return v;
  };
  CHECK(Auroc(transform(h), transform(a)) == base);
}

TEST_CASE("auroc complements swap for tie-free inputs") {
  Rng rng(3);
  std::vector<double> h(20), a(20);
  for (size_t i = 0; i < h.size(); ++i) {
    h[i] = rng.Uniform();
    a[i] = rng.Uniform() * 1.0000001 + 1e-9;  // ties have measure zero
  }
  CHECK(Auroc(h, a) + Auroc(a, h) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("pearson on the worked examples") {
  std::vector<double> xs = {1.0, 2.0, 3.0};
  CHECK(Pearson(xs, xs) == doctest::Approx(1.0).epsilon(1e-15));
  std::vector<double> neg = {-1.0, -2.0, -3.0};
  CHECK(Pearson(xs, neg) == doctest::Approx(-1.0).epsilon(1e-15));
  // Hand computation: cov = 1, var_x = 2/3, var_y = 14/9.
  std::vector<double> ys = {1.0, 2.0, 4.0};
  CHECK(Pearson(xs, ys) ==
        doctest::Approx(std::sqrt(27.0 / 28.0)).epsilon(1e-12));
}

TEST_CASE("pearson rejects degenerate inputs") {
  CHECK_THROWS_AS(Pearson({1.0}, {2.0}), DataError);
  CHECK_THROWS_AS(Pearson({1.0, 2.0}, {1.0}), DataError);
  CHECK_THROWS_AS(Pearson({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}), NumericError);
}

TEST_SUITE_END();
