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

#ifndef EVSOUND_RASTERIZE_H_
#define EVSOUND_RASTERIZE_H_

#include <cstdint>
#include <vector>

#include "sound_model.h"
#include "spectrogram.h"

namespace evsound {

// Half-width of the frequency band a tonal track occupies in the raster and
// in the fault prevalence masks.
inline constexpr double kTrackHalfWidthHz = 15.0;

struct FaultMask {
  GridSpec grid;
  std::vector<uint8_t> mask;  // row-major like Spectrogram
  int64_t pixel_count = 0;

  bool At(int i, int j) const { return mask[size_t{0} + i * grid.n_rpm + j] != 0; }
};

// Renders the model onto the grid in dB. Per rpm column, every tonal track
// deposits its power over the bins within +-15 Hz of the track center with a
// Hann cross-section (normalized so the deposited power sums to the track
// power); broadband components fill all bins with psd * bin width. Components
// add in linear power; the column is then converted back to dB. Bins with
// zero power get the 0 dB floor. Track sections outside the grid frequency
// range are clipped silently.
Spectrogram Rasterize(const SoundModel& model, const GridSpec& grid);

// Pixels the fault alters: bins within +-15 Hz of any faulty tonal track
// (restricted to the rpm window for modulation/whine), or inside the wind
// frequency window across all columns.
FaultMask ComputeFaultMask(const FaultSpec& fault, const GridSpec& grid);

}  // namespace evsound

#endif  // EVSOUND_RASTERIZE_H_
