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

#ifndef EVSOUND_SPECTROGRAM_H_
#define EVSOUND_SPECTROGRAM_H_

#include <cstdint>
#include <string>
#include <vector>

namespace evsound {

// Frequency x rpm raster geometry. Frequency bin centers sit at
// i * freq_resolution_hz (i = 0 .. n_freq-1); rpm column centers at
// (j + 0.5) * rpm_max / n_rpm.
struct GridSpec {
  uint32_t n_freq = 0;
  uint32_t n_rpm = 0;
  float freq_resolution_hz = 0.0f;
  float rpm_max = 10000.0f;

  double FreqAt(int i) const { return i * double{freq_resolution_hz}; }
  double RpmAt(int j) const { return (j + 0.5) * double{rpm_max} / n_rpm; }
  double MaxFreq() const { return (n_freq - 1) * double{freq_resolution_hz}; }
  size_t NumPixels() const { return size_t{n_freq} * n_rpm; }
  bool operator==(const GridSpec& o) const = default;

  // 1536 x 384 at 4 Hz: the full-fidelity preset.
  static GridSpec Paper() { return {1536, 384, 4.0f, 10000.0f}; }
  // 256 x 64 at 24 Hz: same 0..6144 Hz span at desk cost.
  static GridSpec Desk() { return {256, 64, 24.0f, 10000.0f}; }
};

enum class Domain : uint8_t { kDecibel = 0, kNormalized = 1 };

// Dense raster of amplitudes, row-major with frequency rows ascending.
class Spectrogram {
 public:
  Spectrogram() = default;
  Spectrogram(const GridSpec& grid, Domain domain)
      : grid_(grid), domain_(domain), values_(grid.NumPixels(), 0.0f) {}

  const GridSpec& grid() const { return grid_; }
  Domain domain() const { return domain_; }
  void set_domain(Domain d) { domain_ = d; }

  float At(int i, int j) const { return values_[size_t{0} + i * grid_.n_rpm + j]; }
  float& At(int i, int j) { return values_[size_t{0} + i * grid_.n_rpm + j]; }
  const std::vector<float>& values() const { return values_; }
  std::vector<float>& values() { return values_; }

 private:
  GridSpec grid_;
  Domain domain_ = Domain::kDecibel;
  std::vector<float> values_;
};

// Clips to [0, 120] dB and scales to [0, 1]. A normalized input is returned
// unchanged, which makes the operation idempotent.
Spectrogram Preprocess(const Spectrogram& spec);

// Binary spectrogram format: magic "EVSPC1\0\0", LE u32 n_freq, u32 n_rpm,
// f32 freq_resolution_hz, f32 rpm_max, u8 domain, 3 pad bytes, then
// n_freq*n_rpm LE f32 row-major (frequency rows ascending).
void SaveSpectrogram(const Spectrogram& spec, const std::string& path);
Spectrogram LoadSpectrogram(const std::string& path);

// 8-bit binary PGM heatmap, maxval 255, value = round(255 * normalized).
// Rows are written with the highest frequency on top.
void SavePgmHeatmap(const Spectrogram& normalized, const std::string& path);

}  // namespace evsound

#endif  // EVSOUND_SPECTROGRAM_H_
