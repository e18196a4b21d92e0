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

#include <doctest.h>

#include "errors.h"
#include "oracles.h"
#include "runup.h"

using namespace evsound;

TEST_SUITE_BEGIN("runup");

TEST_CASE("sampled profile hits the fixed endpoints exactly") {
  Rng rng(42);
  RunUpConfig cfg;
  for (int i = 0; i < 50; ++i) {
    RunUpProfile p = RunUpProfile::Sample(rng, cfg);
    CHECK(p.RpmAt(0.0) == 0.0);
    CHECK(p.RpmAt(p.duration_s()) == 10000.0);
  }
}

TEST_CASE("unperturbed midpoint evaluates to 5000 at t=10") {
  RunUpProfile p = RunUpProfile::FromKnots({0.0, 10.0, 20.0},
                                           {0.0, 5000.0, 10000.0});
  CHECK(p.RpmAt(10.0) == 5000.0);
}

TEST_CASE("interior evaluation matches an independent spline oracle") {
  std::vector<double> ts = {0.0, 10.0, 20.0};
  std::vector<double> ys = {0.0, 5500.0, 10000.0};
  RunUpProfile p = RunUpProfile::FromKnots(ts, ys);
  for (double t : {1.0, 3.3, 5.0, 7.7, 9.9, 12.5, 15.0, 19.0}) {
    double expected = oracles::NaturalSplineEval(ts, ys, t);
    CHECK(p.RpmAt(t) ==
          doctest::Approx(expected).epsilon(1e-9));
  }
  // Four knots exercise the general tridiagonal path.
  std::vector<double> t4 = {0.0, 5.0, 12.0, 20.0};
  std::vector<double> y4 = {0.0, 2000.0, 7000.0, 10000.0};
  RunUpProfile p4 = RunUpProfile::FromKnots(t4, y4);
  for (double t : {0.5, 2.0, 6.0, 11.0, 13.0, 18.5}) {
    CHECK(p4.RpmAt(t) ==
          doctest::Approx(oracles::NaturalSplineEval(t4, y4, t)).epsilon(1e-9));
  }
}

TEST_CASE("evaluation outside the duration is a domain error") {
  RunUpProfile p =
      RunUpProfile::FromKnots({0.0, 10.0, 20.0}, {0.0, 5000.0, 10000.0});
  CHECK_THROWS_AS(p.RpmAt(-0.1), Error);
  CHECK_THROWS_AS(p.RpmAt(20.1), Error);
}

TEST_CASE("sampled durations and midpoints stay in their intervals") {
  Rng rng(7);
  RunUpConfig cfg;
  for (int i = 0; i < 10000; ++i) {
    double duration = rng.Uniform(cfg.duration_min_s, cfg.duration_max_s);
    double delta = rng.Uniform(-1000.0, 1000.0);
    CHECK(duration >= 15.0);
    CHECK(duration <= 25.0);
    CHECK(std::abs(delta) <= 1000.0);
  }
  // Full constructions on a smaller budget.
  for (int i = 0; i < 500; ++i) {
    RunUpProfile p = RunUpProfile::Sample(rng, cfg);
    CHECK(p.duration_s() >= 15.0);
    CHECK(p.duration_s() <= 25.0);
    double mid = p.knot_rpms()[1];
    CHECK(mid >= 4000.0);
    CHECK(mid <= 6000.0);
  }
}

TEST_CASE("evaluation clamps to the rpm range") {
  // A strongly perturbed midpoint can make the raw spline overshoot.
  RunUpProfile p =
      RunUpProfile::FromKnots({0.0, 10.0, 20.0}, {0.0, 6000.0, 10000.0});
  for (int i = 0; i <= 200; ++i) {
    double v = p.RpmAt(20.0 * i / 200);
    CHECK(v >= 0.0);
    CHECK(v <= 10000.0);
  }
}

TEST_CASE("time_of_rpm inverts the profile") {
  Rng rng(3);
  RunUpConfig cfg;
  for (int i = 0; i < 20; ++i) {
    RunUpProfile p = RunUpProfile::Sample(rng, cfg);
    for (double r : {100.0, 2500.0, 5000.0, 7500.0, 9900.0}) {
      double t = p.TimeOfRpm(r);
      CHECK(p.RpmAt(t) == doctest::Approx(r).epsilon(1e-6));
    }
    CHECK(p.TimeOfRpm(0.0) == 0.0);
    CHECK(p.TimeOfRpm(10000.0) <= p.duration_s());
  }
}

TEST_SUITE_END();
