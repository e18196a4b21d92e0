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

#include "metrics.h"

#include <algorithm>
#include <cmath>

#include "errors.h"

namespace evsound {

double Auroc(const std::vector<double>& healthy_scores,
             const std::vector<double>& anomalous_scores) {
  if (healthy_scores.empty() || anomalous_scores.empty()) {
    throw DataError("AUROC needs non-empty healthy and anomalous scores");
  }
  std::vector<double> h = healthy_scores;
  std::sort(h.begin(), h.end());
  // Halves are exactly representable, so the accumulation below equals the
  // brute-force O(|H|*|A|) pair sum exactly.
  double num = 0.0;
  for (double a : anomalous_scores) {
    auto lo = std::lower_bound(h.begin(), h.end(), a);
    auto hi = std::upper_bound(lo, h.end(), a);
    num += static_cast<double>(lo - h.begin());
    num += 0.5 * static_cast<double>(hi - lo);
  }
  return num / (static_cast<double>(h.size()) *
                static_cast<double>(anomalous_scores.size()));
}

double Pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw DataError("Pearson: length mismatch");
  if (xs.size() < 2) throw DataError("Pearson: need at least two points");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    double dx = xs[i] - mx;
    double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw NumericError("Pearson correlation undefined for constant sequence");
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace evsound
