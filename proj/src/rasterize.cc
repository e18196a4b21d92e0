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

#include "rasterize.h"

#include <algorithm>
#include <cmath>

#include "errors.h"

namespace evsound {

namespace {

constexpr double kPi = 3.14159265358979323846264338328;

// Hann cross-section weight at frequency offset df from the track center.
double CrossSection(double df) {
  if (std::abs(df) >= kTrackHalfWidthHz) return 0.0;
  return 0.5 + 0.5 * std::cos(kPi * df / kTrackHalfWidthHz);
}

// Deposits `power` into the column's bins around track center fc. The weights
// are normalized over the ideal (unclipped) bin set so a fully interior track
// preserves total power exactly; clipped sections lose theirs.
void DepositTrack(double fc, double power, const GridSpec& grid,
                  std::vector<double>& column_power) {
  const double df = grid.freq_resolution_hz;
  long k_lo = static_cast<long>(std::ceil((fc - kTrackHalfWidthHz) / df));
  long k_hi = static_cast<long>(std::floor((fc + kTrackHalfWidthHz) / df));
  if (k_hi < k_lo) return;
  double sum = 0.0;
  for (long k = k_lo; k <= k_hi; ++k) {
    sum += CrossSection(k * df - fc);
  }
  if (sum <= 0.0) return;
  for (long k = k_lo; k <= k_hi; ++k) {
    if (k < 0 || k >= static_cast<long>(grid.n_freq)) continue;
    double w = CrossSection(k * df - fc);
    if (w > 0.0) column_power[static_cast<size_t>(k)] += power * w / sum;
  }
}

}  // namespace

Spectrogram Rasterize(const SoundModel& model, const GridSpec& grid) {
  if (grid.n_freq == 0 || grid.n_rpm == 0 || grid.freq_resolution_hz <= 0.0f) {
    throw ConfigError("invalid grid spec");
  }
  Spectrogram out(grid, Domain::kDecibel);
  const double duration = model.runup.duration_s();

  // Column times for time-dependent order fluctuations.
  std::vector<double> column_time(grid.n_rpm);
  for (uint32_t j = 0; j < grid.n_rpm; ++j) {
    column_time[j] = model.runup.TimeOfRpm(grid.RpmAt(j));
  }

  std::vector<BandNoise> order_noise;
  order_noise.reserve(model.orders.size());
  for (const auto& order : model.orders) {
    order_noise.emplace_back(order.fluctuation, duration);
  }

  std::vector<BroadbandOffsetField> bb_offsets;
  bb_offsets.reserve(model.broadband.size());
  for (const auto& bb : model.broadband) {
    bb_offsets.emplace_back(bb.randomization, grid.MaxFreq());
  }

  std::vector<double> column_power(grid.n_freq);
  for (uint32_t j = 0; j < grid.n_rpm; ++j) {
    const double rpm = grid.RpmAt(j);
    const double u = rpm / grid.rpm_max;
    const double t = column_time[j];
    std::fill(column_power.begin(), column_power.end(), 0.0);

    for (size_t bi = 0; bi < model.broadband.size(); ++bi) {
      const auto& bb = model.broadband[bi];
      for (uint32_t i = 0; i < grid.n_freq; ++i) {
        const double f = grid.FreqAt(i);
        double psd_db = bb.BasePsdDbAt(f, u) + bb_offsets[bi].OffsetDbAt(f, u);
        double p = std::pow(10.0, psd_db / 10.0) * grid.freq_resolution_hz;
        if (bb.freq_window.has_value()) p *= bb.freq_window->At(f);
        column_power[i] += p;
      }
    }

    for (size_t oi = 0; oi < model.orders.size(); ++oi) {
      const auto& order = model.orders[oi];
      double amp = std::pow(10.0, order.AmplitudeDbAt(rpm) / 20.0);
      amp *= 1.0 + order_noise[oi].At(t);
      if (order.amplitude_window.has_value()) {
        amp *= order.amplitude_window->At(rpm);
      }
      if (amp <= 0.0) continue;
      DepositTrack(order.TrackFreqAt(rpm), amp * amp, grid, column_power);
    }

    for (uint32_t i = 0; i < grid.n_freq; ++i) {
      double p = column_power[i];
      out.At(i, j) = p > 0.0 ? static_cast<float>(10.0 * std::log10(p)) : 0.0f;
    }
  }
  return out;
}

FaultMask ComputeFaultMask(const FaultSpec& fault, const GridSpec& grid) {
  if (grid.n_freq == 0 || grid.n_rpm == 0 || grid.freq_resolution_hz <= 0.0f) {
    throw ConfigError("invalid grid spec");
  }
  FaultMask fm;
  fm.grid = grid;
  fm.mask.assign(grid.NumPixels(), 0);

  auto mark_track = [&](double order, double carrier, uint32_t j, double rpm) {
    const double fc = carrier + order * rpm / 60.0;
    const double df = grid.freq_resolution_hz;
    long k_lo = static_cast<long>(std::ceil((fc - kTrackHalfWidthHz) / df));
    long k_hi = static_cast<long>(std::floor((fc + kTrackHalfWidthHz) / df));
    k_lo = std::max(k_lo, 0L);
    k_hi = std::min(k_hi, static_cast<long>(grid.n_freq) - 1);
    for (long k = k_lo; k <= k_hi; ++k) {
      fm.mask[static_cast<size_t>(k) * grid.n_rpm + j] = 1;
    }
  };

  for (uint32_t j = 0; j < grid.n_rpm; ++j) {
    const double rpm = grid.RpmAt(j);
    switch (fault.kind) {
      case FaultKind::kImbalance:
        for (double order : kImbalanceOrders) mark_track(order, 0.0, j, rpm);
        break;
      case FaultKind::kModulation:
        if (rpm >= fault.window_start && rpm <= fault.window_end) {
          for (double order : kModulationSidebandOrders) {
            mark_track(order, 0.0, j, rpm);
          }
        }
        break;
      case FaultKind::kWhine:
        if (rpm >= fault.window_start && rpm <= fault.window_end) {
          mark_track(kWhineOrder, 0.0, j, rpm);
        }
        break;
      case FaultKind::kPwm:
        mark_track(0.0, kPwmCarrierHz, j, rpm);
        mark_track(kPwmSidebandOrder, kPwmCarrierHz, j, rpm);
        mark_track(-kPwmSidebandOrder, kPwmCarrierHz, j, rpm);
        break;
      case FaultKind::kWind:
        for (uint32_t i = 0; i < grid.n_freq; ++i) {
          double f = grid.FreqAt(i);
          if (f > fault.window_start && f < fault.window_end) {
            fm.mask[size_t{i} * grid.n_rpm + j] = 1;
          }
        }
        break;
    }
  }
  fm.pixel_count = 0;
  for (uint8_t m : fm.mask) fm.pixel_count += m;
  return fm;
}

}  // namespace evsound
