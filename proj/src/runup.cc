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

#include "runup.h"

#include <algorithm>
#include <cmath>

#include "errors.h"

namespace evsound {

RunUpProfile RunUpProfile::Sample(Rng& rng, const RunUpConfig& cfg) {
  double duration = rng.Uniform(cfg.duration_min_s, cfg.duration_max_s);
  double span = cfg.rpm_end - cfg.rpm_start;
  double mid = 0.5 * (cfg.rpm_start + cfg.rpm_end);
  double delta = rng.Uniform(-cfg.midpoint_fraction * span,
                             cfg.midpoint_fraction * span);
  return FromKnots({0.0, 0.5 * duration, duration},
                   {cfg.rpm_start, mid + delta, cfg.rpm_end});
}

RunUpProfile RunUpProfile::FromKnots(const std::vector<double>& times_s,
                                     const std::vector<double>& rpms) {
  if (times_s.size() < 2 || times_s.size() != rpms.size()) {
    throw ConfigError("run-up profile needs >= 2 knots with matching rpms");
  }
  for (size_t i = 1; i < times_s.size(); ++i) {
    if (times_s[i] <= times_s[i - 1]) {
      throw ConfigError("run-up knot times must be strictly increasing");
    }
  }
  RunUpProfile p;
  p.knot_t_ = times_s;
  p.knot_y_ = rpms;
  p.clamp_lo_ = *std::min_element(rpms.begin(), rpms.end());
  p.clamp_hi_ = *std::max_element(rpms.begin(), rpms.end());
  p.FitNaturalSpline();
  return p;
}

void RunUpProfile::FitNaturalSpline() {
  const size_t n = knot_t_.size();
  std::vector<double> h(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) h[i] = knot_t_[i + 1] - knot_t_[i];

  // Solve for second-derivative coefficients with natural end conditions
  // (c[0] = c[n-1] = 0): a tridiagonal system over the interior knots,
  // solved by the Thomas algorithm.
  std::vector<double> c(n, 0.0);
  if (n > 2) {
    const size_t m = n - 2;
    std::vector<double> diag(m), upper(m, 0.0), rhs(m);
    for (size_t k = 0; k < m; ++k) {
      size_t i = k + 1;
      diag[k] = 2.0 * (h[i - 1] + h[i]);
      if (k + 1 < m) upper[k] = h[i];
      rhs[k] = 3.0 * ((knot_y_[i + 1] - knot_y_[i]) / h[i] -
                      (knot_y_[i] - knot_y_[i - 1]) / h[i - 1]);
    }
    for (size_t k = 1; k < m; ++k) {
      double f = h[k] / diag[k - 1];
      diag[k] -= f * upper[k - 1];
      rhs[k] -= f * rhs[k - 1];
    }
    c[m] = rhs[m - 1] / diag[m - 1];
    for (size_t k = m - 1; k-- > 0;) {
      c[k + 1] = (rhs[k] - upper[k] * c[k + 2]) / diag[k];
    }
  }

  a_.assign(n - 1, 0.0);
  b_.assign(n - 1, 0.0);
  c_.assign(n - 1, 0.0);
  d_.assign(n - 1, 0.0);
  for (size_t i = 0; i + 1 < n; ++i) {
    a_[i] = knot_y_[i];
    b_[i] = (knot_y_[i + 1] - knot_y_[i]) / h[i] -
            h[i] * (2.0 * c[i] + c[i + 1]) / 3.0;
    c_[i] = c[i];
    d_[i] = (c[i + 1] - c[i]) / (3.0 * h[i]);
  }
}

double RunUpProfile::EvalRaw(double t) const {
  // Exact values at the knots themselves.
  for (size_t k = 0; k < knot_t_.size(); ++k) {
    if (t == knot_t_[k]) return knot_y_[k];
  }
  size_t i = 0;
  // Few knots; linear search is exact and cheap.
  while (i + 1 < a_.size() && t >= knot_t_[i + 1]) ++i;
  double dt = t - knot_t_[i];
  return a_[i] + dt * (b_[i] + dt * (c_[i] + dt * d_[i]));
}

double RunUpProfile::RpmAt(double t) const {
  if (t < 0.0 || t > duration_s()) {
    throw Error(Status::kError, "run-up evaluation time out of range");
  }
  return std::clamp(EvalRaw(t), clamp_lo_, clamp_hi_);
}

double RunUpProfile::TimeOfRpm(double r) const {
  const double target = std::clamp(r, clamp_lo_, clamp_hi_);
  if (target <= RpmAt(0.0)) return 0.0;
  const int kScan = 4096;
  double t_prev = 0.0;
  double v_prev = RpmAt(0.0);
  for (int i = 1; i <= kScan; ++i) {
    double t = duration_s() * i / kScan;
    double v = RpmAt(t);
    if ((v_prev < target && v >= target) || (v_prev > target && v <= target)) {
      // Bisect the bracketing interval.
      double lo = t_prev, hi = t;
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        double vm = RpmAt(mid);
        bool below = (v_prev < target) ? (vm < target) : (vm > target);
        (below ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
    t_prev = t;
    v_prev = v;
  }
  return duration_s();
}

}  // namespace evsound
