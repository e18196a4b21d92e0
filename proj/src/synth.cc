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

#include "synth.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "errors.h"
#include "rasterize.h"

namespace evsound {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

size_t NextPow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Linear interpolation over a uniformly sampled envelope.
double LerpEnvelope(const std::vector<double>& env, double pos) {
  if (env.empty()) return 0.0;
  if (pos <= 0.0) return env.front();
  size_t i = static_cast<size_t>(pos);
  if (i + 1 >= env.size()) return env.back();
  double t = pos - static_cast<double>(i);
  return env[i] + t * (env[i + 1] - env[i]);
}

}  // namespace

void Fft(std::vector<std::complex<double>>& a, bool inverse) {
  const size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw NumericError("FFT size must be a power of two");
  }
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    double ang = kTwoPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    for (auto& x : a) x /= static_cast<double>(n);
  }
}

TimeSignal RenderTime(const SoundModel& model, double sample_rate_hz,
                      Rng& rng, bool normalize) {
  double max_bb_freq = 0.0;
  for (const auto& bb : model.broadband) {
    if (!bb.freq_knots_hz.empty()) {
      max_bb_freq = std::max(max_bb_freq, bb.freq_knots_hz.back());
    }
  }
  if (sample_rate_hz < 2.0 * max_bb_freq) {
    throw ConfigError("sample rate below Nyquist for the broadband band");
  }
  if (sample_rate_hz <= 0.0) throw ConfigError("sample rate must be positive");

  const double fs = sample_rate_hz;
  const double duration = model.runup.duration_s();
  const size_t n = static_cast<size_t>(std::llround(duration * fs));
  std::vector<double> acc(n, 0.0);

  // rpm(t) on the sample grid, reused by every component.
  std::vector<double> rpm_t(n);
  for (size_t i = 0; i < n; ++i) {
    rpm_t[i] = model.runup.RpmAt(std::min(duration, i / fs));
  }

  const double nyquist = fs / 2.0;
  const double taper_hi = 0.98 * nyquist;
  const double taper_lo = 0.90 * nyquist;

  // Tonal tracks: phase by trapezoidal integration of the instantaneous
  // frequency; envelopes sampled at 1 kHz and interpolated.
  const double env_rate = 1000.0;
  const size_t env_n = static_cast<size_t>(duration * env_rate) + 2;
  for (const auto& order : model.orders) {
    BandNoise noise(order.fluctuation, duration);
    std::vector<double> env(env_n);
    for (size_t e = 0; e < env_n; ++e) {
      double t = std::min(duration, e / env_rate);
      double rpm = model.runup.RpmAt(t);
      double amp = std::pow(10.0, order.AmplitudeDbAt(rpm) / 20.0);
      amp *= 1.0 + noise.At(t);
      if (order.amplitude_window.has_value()) {
        amp *= order.amplitude_window->At(rpm);
      }
      env[e] = amp;
    }
    double phase = 0.0;
    double f_prev = order.TrackFreqAt(rpm_t[0]);
    for (size_t i = 0; i < n; ++i) {
      double f = order.TrackFreqAt(rpm_t[i]);
      if (i > 0) phase += kTwoPi * 0.5 * (f_prev + f) / fs;
      f_prev = f;
      if (f >= taper_hi) continue;
      double taper =
          f <= taper_lo ? 1.0 : (taper_hi - f) / (taper_hi - taper_lo);
      // sqrt(2): the track's dB level is an RMS power level.
      double a = LerpEnvelope(env, i / fs * env_rate) * std::sqrt(2.0);
      acc[i] += a * taper * std::sin(phase);
    }
  }

  // Broadband: per-frame random-phase spectra shaped by the psd, Hann
  // overlap-add at 75% overlap (sum of squared windows = 3/2).
  if (!model.broadband.empty() && max_bb_freq > 0.0) {
    const size_t frame = 1024;
    const size_t hop = frame / 4;
    std::vector<double> window(frame);
    for (size_t i = 0; i < frame; ++i) {
      window[i] = 0.5 - 0.5 * std::cos(kTwoPi * i / frame);
    }
    std::vector<BroadbandOffsetField> offsets;
    offsets.reserve(model.broadband.size());
    for (const auto& bb : model.broadband) {
      offsets.emplace_back(bb.randomization, max_bb_freq);
    }
    std::vector<std::complex<double>> spec(frame);
    const double bin_hz = fs / frame;
    for (size_t start = 0; start + frame <= n + hop; start += hop) {
      double t_center = std::min(duration, (start + frame / 2.0) / fs);
      double u = model.runup.RpmAt(t_center) / model.runup.knot_rpms().back();
      std::fill(spec.begin(), spec.end(), std::complex<double>(0.0, 0.0));
      for (size_t k = 1; k < frame / 2; ++k) {
        double f = k * bin_hz;
        double total_psd = 0.0;
        for (size_t bi = 0; bi < model.broadband.size(); ++bi) {
          const auto& bb = model.broadband[bi];
          if (f > bb.freq_knots_hz.back()) continue;
          double psd_db =
              bb.BasePsdDbAt(f, u) + offsets[bi].OffsetDbAt(f, u);
          double p = std::pow(10.0, psd_db / 10.0);
          if (bb.freq_window.has_value()) p *= bb.freq_window->At(f);
          total_psd += p;
        }
        if (total_psd <= 0.0) continue;
        double mag = std::sqrt(total_psd * fs * frame / 2.0);
        double phi = rng.Uniform(0.0, kTwoPi);
        spec[k] = std::polar(mag, phi);
        spec[frame - k] = std::conj(spec[k]);
      }
      Fft(spec, /*inverse=*/true);
      const double ola_gain = std::sqrt(2.0 / 3.0);
      for (size_t i = 0; i < frame; ++i) {
        size_t idx = start + i;
        if (idx >= n) break;
        acc[idx] += ola_gain * window[i] * spec[i].real();
      }
    }
  }

  TimeSignal sig;
  sig.sample_rate_hz = fs;
  sig.duration_s = duration;
  sig.samples.resize(n);
  double scale = 1.0;
  if (normalize) {
    double peak = 0.0;
    for (double v : acc) peak = std::max(peak, std::abs(v));
    scale = peak > 0.0 ? 1.0 / peak : 0.0;
  }
  for (size_t i = 0; i < n; ++i) {
    sig.samples[i] = static_cast<float>(acc[i] * scale);
  }
  return sig;
}

Spectrogram StftOrderSpectrogram(const TimeSignal& signal,
                                 const RunUpProfile& profile,
                                 const GridSpec& grid) {
  const double fs = signal.sample_rate_hz;
  const size_t frame = NextPow2(
      static_cast<size_t>(std::ceil(2.0 * fs / grid.freq_resolution_hz)));
  if (signal.samples.size() < frame) {
    throw DataError("signal shorter than one analysis frame");
  }
  const size_t hop = frame / 4;
  std::vector<double> window(frame);
  double wsq = 0.0;
  for (size_t i = 0; i < frame; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(kTwoPi * i / frame);
    wsq += window[i] * window[i];
  }

  const size_t n_frames = (signal.samples.size() - frame) / hop + 1;
  const double stft_bin_hz = fs / frame;
  const double grid_bin_hz = grid.freq_resolution_hz;

  // Per-frame grid-bin powers and frame rpms.
  std::vector<std::vector<double>> frame_power(
      n_frames, std::vector<double>(grid.n_freq, 0.0));
  std::vector<double> frame_rpm(n_frames);
  std::vector<std::complex<double>> buf(frame);
  for (size_t m = 0; m < n_frames; ++m) {
    size_t start = m * hop;
    double t_center =
        std::min(profile.duration_s(), (start + frame / 2.0) / fs);
    frame_rpm[m] = profile.RpmAt(t_center);
    for (size_t i = 0; i < frame; ++i) {
      buf[i] = {window[i] * signal.samples[start + i], 0.0};
    }
    Fft(buf, /*inverse=*/false);
    auto& gp = frame_power[m];
    for (size_t k = 0; k <= frame / 2; ++k) {
      double p = 2.0 * std::norm(buf[k]) / (frame * wsq);
      // Distribute the bin power across grid bins by interval overlap.
      double lo = k * stft_bin_hz - 0.5 * stft_bin_hz;
      double hi = k * stft_bin_hz + 0.5 * stft_bin_hz;
      long g_lo = static_cast<long>(std::floor(lo / grid_bin_hz + 0.5));
      long g_hi = static_cast<long>(std::floor(hi / grid_bin_hz + 0.5));
      for (long g = g_lo; g <= g_hi; ++g) {
        if (g < 0 || g >= static_cast<long>(grid.n_freq)) continue;
        double cell_lo = g * grid_bin_hz - 0.5 * grid_bin_hz;
        double cell_hi = g * grid_bin_hz + 0.5 * grid_bin_hz;
        double overlap =
            std::min(hi, cell_hi) - std::max(lo, cell_lo);
        if (overlap > 0.0) gp[g] += p * overlap / stft_bin_hz;
      }
    }
  }

  // Monotone envelope of frame rpms keeps the interpolation well-defined
  // even if the clamped spline wobbles locally.
  std::vector<double> mono_rpm(frame_rpm);
  for (size_t m = 1; m < n_frames; ++m) {
    mono_rpm[m] = std::max(mono_rpm[m], mono_rpm[m - 1]);
  }

  Spectrogram out(grid, Domain::kDecibel);
  size_t m = 0;
  for (uint32_t j = 0; j < grid.n_rpm; ++j) {
    const double rpm = grid.RpmAt(j);
    while (m + 1 < n_frames && mono_rpm[m + 1] < rpm) ++m;
    size_t m1 = std::min(m + 1, n_frames - 1);
    double t = 0.0;
    if (m1 != m && mono_rpm[m1] > mono_rpm[m]) {
      t = std::clamp((rpm - mono_rpm[m]) / (mono_rpm[m1] - mono_rpm[m]), 0.0,
                     1.0);
    }
    for (uint32_t i = 0; i < grid.n_freq; ++i) {
      double p = frame_power[m][i] + t * (frame_power[m1][i] - frame_power[m][i]);
      out.At(i, j) = p > 0.0 ? static_cast<float>(10.0 * std::log10(p)) : 0.0f;
    }
  }
  return out;
}

void SaveWav(const TimeSignal& signal, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open for writing: " + path);
  const uint32_t sample_rate = static_cast<uint32_t>(signal.sample_rate_hz);
  const uint32_t data_bytes =
      static_cast<uint32_t>(signal.samples.size() * 2);
  auto w32 = [&](uint32_t v) { os.write(reinterpret_cast<char*>(&v), 4); };
  auto w16 = [&](uint16_t v) { os.write(reinterpret_cast<char*>(&v), 2); };
  os.write("RIFF", 4);
  w32(36 + data_bytes);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  w32(16);
  w16(1);  // PCM
  w16(1);  // mono
  w32(sample_rate);
  w32(sample_rate * 2);
  w16(2);
  w16(16);
  os.write("data", 4);
  w32(data_bytes);
  for (float s : signal.samples) {
    double v = std::clamp(double{s}, -1.0, 1.0);
    int16_t q = static_cast<int16_t>(std::lround(v * 32767.0));
    os.write(reinterpret_cast<char*>(&q), 2);
  }
  if (!os) throw DataError("short write: " + path);
}

}  // namespace evsound
