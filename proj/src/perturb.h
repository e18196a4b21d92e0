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

#ifndef EVSOUND_PERTURB_H_
#define EVSOUND_PERTURB_H_

#include <cstdint>
#include <string>
#include <vector>

#include "rng.h"
#include "spectrogram.h"

namespace evsound {

enum class PerturbationKind : int { kAddRpm = 0, kAddFreq = 1, kAddOrder = 2 };

const char* PerturbationKindName(PerturbationKind kind);

// Structured perturbation of a normalized spectrogram. The added amplitude
// delta is drawn once per application from [delta_min, delta_max]; perturbed
// pixels are clipped to [0, 1].
struct PerturbationParams {
  PerturbationKind kind = PerturbationKind::kAddRpm;
  double delta_min = 0.1;
  double delta_max = 0.25;
  int line_width = 4;            // columns (add_rpm) or rows (add_freq)
  double order_band_hz = 15.0;   // full band size t around the order track
  double order_min = 2.0;        // half-order set [order_min, order_max]
  double order_max = 40.0;

  static PerturbationParams AddRpm() { return {PerturbationKind::kAddRpm}; }
  static PerturbationParams AddFreq() { return {PerturbationKind::kAddFreq}; }
  static PerturbationParams AddOrder() { return {PerturbationKind::kAddOrder}; }
};

// Applies the perturbation. add_rpm raises a contiguous band of line_width
// rpm columns starting at a uniform start; add_freq does the same for
// frequency rows; add_order raises all pixels whose bin center lies within
// +-order_band_hz/2 of a uniformly drawn half-order track. An add_order draw
// that changes no pixel is redrawn (at most 10 times).
Spectrogram Perturb(const Spectrogram& spec, const PerturbationParams& params,
                    Rng& rng);

enum class SampleLabel : int { kHealthy = 0, kProxyAnomaly = 1, kFault = 2 };

struct LabeledSample {
  std::string id;
  SampleLabel label = SampleLabel::kHealthy;
  Spectrogram spec;
  // Provenance of proxy samples.
  std::string source_id;
  std::string detail;  // perturbation kind or fault kind name
  uint64_t seed = 0;
};

// Algorithm: partition the healthy validation set into params.size() subsets
// (remainder samples go to the earliest subsets), perturb subset i with
// params[i], and return originals followed by all proxies.
std::vector<LabeledSample> BuildAugmentedValidationSet(
    const std::vector<LabeledSample>& healthy_val,
    const std::vector<PerturbationParams>& params, Rng& rng);

}  // namespace evsound

#endif  // EVSOUND_PERTURB_H_
