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

#ifndef EVSOUND_METRICS_H_
#define EVSOUND_METRICS_H_

#include <vector>

namespace evsound {

// Rank-based AUROC (Mann-Whitney): (#pairs with anomalous > healthy +
// 0.5 * #ties) / (|H| * |A|). The pair counts are accumulated exactly, so
// the result matches brute-force pair counting bit for bit.
double Auroc(const std::vector<double>& healthy_scores,
             const std::vector<double>& anomalous_scores);

// Sample Pearson correlation. Throws on length mismatch, fewer than two
// points, or a constant sequence.
double Pearson(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace evsound

#endif  // EVSOUND_METRICS_H_
