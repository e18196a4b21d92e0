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

#ifndef EVSOUND_SYNTH_H_
#define EVSOUND_SYNTH_H_

#include <complex>
#include <string>
#include <vector>

#include "rng.h"
#include "sound_model.h"
#include "spectrogram.h"

namespace evsound {

struct TimeSignal {
  double sample_rate_hz = 16000.0;
  std::vector<float> samples;
  double duration_s = 0.0;
};

// In-place radix-2 complex FFT; size must be a power of two.
void Fft(std::vector<std::complex<double>>& a, bool inverse);

// Additive synthesis of the model in the time domain. Tonal tracks are
// rendered as amplitude(t) * sin(phi(t)) with phi integrated by the
// trapezoidal rule; broadband components as overlap-add shaped noise. The
// result is peak-normalized to |s| <= 1 unless normalize is false (analysis
// paths compare absolute levels). Track sections approaching Nyquist are
// tapered out. Throws if the sample rate cannot represent the broadband band
// (fs < 2 * max broadband knot frequency).
TimeSignal RenderTime(const SoundModel& model, double sample_rate_hz,
                      Rng& rng, bool normalize = true);

// Short-time Fourier spectrogram of a rendered run-up, resampled onto the
// grid's uniform rpm axis via the profile (linear interpolation between the
// nearest frames, in power), in dB. Frame length is the smallest power of two
// >= 2 * fs / freq_resolution, Hann window, 75% overlap. Throws if the signal
// is shorter than one frame.
Spectrogram StftOrderSpectrogram(const TimeSignal& signal,
                                 const RunUpProfile& profile,
                                 const GridSpec& grid);

// 16-bit PCM mono WAV.
void SaveWav(const TimeSignal& signal, const std::string& path);

}  // namespace evsound

#endif  // EVSOUND_SYNTH_H_
