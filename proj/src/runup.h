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

#ifndef EVSOUND_RUNUP_H_
#define EVSOUND_RUNUP_H_

#include <cstdint>
#include <vector>

#include "rng.h"

namespace evsound {

struct RunUpConfig {
  double rpm_start = 0.0;
  double rpm_end = 10000.0;
  double duration_min_s = 15.0;
  double duration_max_s = 25.0;
  // Midpoint knot perturbation, as a fraction of the full rpm span.
  double midpoint_fraction = 0.1;
};

// Motor speed profile of one run-up: a natural cubic spline through
// (0, rpm_start), (T/2, midpoint + delta), (T, rpm_end). Evaluation clamps
// to [min(rpm_start, rpm_end), max(...)] so downstream code never sees
// overshoot from the spline tails.
class RunUpProfile {
 public:
  // Flat zero profile; placeholder until a real profile is assigned.
  RunUpProfile()
      : knot_t_{0.0, 1.0}, knot_y_{0.0, 0.0}, a_{0.0}, b_{0.0}, c_{0.0},
        d_{0.0}, clamp_lo_(0.0), clamp_hi_(0.0) {}

  // Duration uniform in [duration_min_s, duration_max_s], midpoint delta
  // uniform in +-midpoint_fraction * span.
  static RunUpProfile Sample(Rng& rng, const RunUpConfig& cfg);

  // Explicit knots (ascending times). Clamp range is [min(rpms), max(rpms)].
  static RunUpProfile FromKnots(const std::vector<double>& times_s,
                                const std::vector<double>& rpms);

  double duration_s() const { return knot_t_.back(); }

  // Throws Error if t is outside [0, duration_s].
  double RpmAt(double t) const;

  // First time at which the profile reaches rpm `r` (clamped evaluation).
  // Returns 0 for r at or below the start value, duration_s if never reached.
  double TimeOfRpm(double r) const;

  const std::vector<double>& knot_times() const { return knot_t_; }
  const std::vector<double>& knot_rpms() const { return knot_y_; }

 private:
  void FitNaturalSpline();
  double EvalRaw(double t) const;

  std::vector<double> knot_t_;
  std::vector<double> knot_y_;
  // Piecewise cubic: value = a + b*dt + c*dt^2 + d*dt^3 on segment i.
  std::vector<double> a_, b_, c_, d_;
  double clamp_lo_ = 0.0;
  double clamp_hi_ = 10000.0;
};

}  // namespace evsound

#endif  // EVSOUND_RUNUP_H_
