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

#ifndef EVSOUND_EXPLAIN_H_
#define EVSOUND_EXPLAIN_H_

#include <string>
#include <vector>

#include "autoencoder.h"
#include "perturb.h"
#include "spectrogram.h"

namespace evsound {

// Per-pixel population statistics of the squared reconstruction error over a
// healthy training set.
struct PixelStats {
  GridSpec grid;
  std::vector<double> mu;
  std::vector<double> sigma;
  int n_samples = 0;
};

struct AnomalyMask {
  GridSpec grid;
  std::vector<uint8_t> mask;
  int64_t positive_count = 0;
  bool At(int i, int j) const { return mask[size_t{0} + i * grid.n_rpm + j] != 0; }
};

// Per-pixel squared reconstruction error of one sample.
std::vector<double> ErrorMap(const Model& m, const Spectrogram& spec);

// Population mean/std (divide by N) of the per-pixel errors over the set.
PixelStats ComputePixelStats(const Model& m,
                             const std::vector<const Spectrogram*>& train_set);

// M = 1 iff E > mu + 3 sigma or E < mu - 3 sigma (strict). With sigma = 0
// this reduces to E != mu.
AnomalyMask ComputeAnomalyMask(const std::vector<double>& error_map,
                               const PixelStats& stats);

// Elementwise |d(loss)/d(input)| of the MSE reconstruction loss.
std::vector<double> Saliency(const Model& m, const Spectrogram& spec);

// CSV: id, label, z_0 .. z_{L-1} (f32 precision).
void ExportLatents(const Model& m, const std::vector<LabeledSample>& samples,
                   const std::string& path);

// Heatmap helpers for cmd_explain: map is scaled by its own max (all-zero
// maps stay black); masks are written as 0/255.
void SaveMapPgm(const std::vector<double>& map, const GridSpec& grid,
                const std::string& path);
void SaveMaskPgm(const AnomalyMask& mask, const std::string& path);

}  // namespace evsound

#endif  // EVSOUND_EXPLAIN_H_
