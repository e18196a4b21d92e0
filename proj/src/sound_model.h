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

#ifndef EVSOUND_SOUND_MODEL_H_
#define EVSOUND_SOUND_MODEL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rng.h"
#include "runup.h"

namespace evsound {

// Piecewise-linear dB profile over an abscissa (rpm or Hz). Evaluation clamps
// to the end values outside the knot range.
struct PiecewiseLinearDb {
  std::vector<double> x;
  std::vector<double> y_db;
  double At(double xq) const;
};

// Unit-amplitude Hann window over [start, end]: 0 at both edges, 1 at the
// midpoint, 0 outside.
struct HannWindow {
  double start = 0.0;
  double end = 1.0;
  double At(double xq) const;
};

// Band-limited multiplicative amplitude fluctuation record. The realized
// signal is a random cosine series over the run-up duration with all
// components inside [band_lo_hz, band_hi_hz], rescaled so its peak magnitude
// equals peak_fraction. peak_fraction == 0 disables the fluctuation.
struct Fluctuation {
  double band_lo_hz = 5.0;
  double band_hi_hz = 15.0;
  double peak_fraction = 0.0;
  uint64_t seed = 0;
};

// Realization of a Fluctuation over [0, duration]: cosines at the DFT
// frequencies m/duration inside the band, so a full-length DFT of the sampled
// signal has no out-of-band leakage.
class BandNoise {
 public:
  BandNoise(const Fluctuation& f, double duration_s);
  double At(double t) const;

 private:
  std::vector<double> amp_, phase_, freq_;
  double duration_s_;
  double scale_ = 0.0;
};

// Tonal component following f(rpm) = carrier_offset_hz + order * rpm / 60.
struct OrderComponent {
  double order_number = 0.0;
  double carrier_offset_hz = 0.0;
  PiecewiseLinearDb base_profile_db;
  double gain_db = 0.0;  // additive offset, used by fault components
  Fluctuation fluctuation;
  // Fault shaping. amplitude_window multiplies the linear amplitude
  // (modulation sidebands fade in/out); db_bump adds window * gain in dB
  // (whine boost on an existing order).
  std::optional<HannWindow> amplitude_window;
  std::optional<HannWindow> db_bump_window;
  double db_bump_gain = 0.0;

  double TrackFreqAt(double rpm) const {
    return carrier_offset_hz + order_number * rpm / 60.0;
  }
  // dB-domain amplitude before fluctuation and linear windowing.
  double AmplitudeDbAt(double rpm) const;
};

// Smooth per-channel randomization of the broadband autopower: each
// channel_width_hz-wide frequency channel receives an independent low-order
// cosine curve over normalized rpm, peak-scaled to peak_db. peak_db == 0
// disables it.
struct BroadbandRandomization {
  double peak_db = 0.0;
  uint64_t seed = 0;
  double channel_width_hz = 4.0;
  int modes = 6;
};

// Broadband noise described by its autopower spectral density in dB (power
// per Hz), interpolated bilinearly over (frequency, rpm fraction).
struct BroadbandComponent {
  std::vector<double> freq_knots_hz;
  std::vector<double> psd_db_at_rest;  // at rpm = 0
  std::vector<double> psd_db_at_max;   // at rpm = rpm_max
  double gain_db = 0.0;
  std::optional<HannWindow> freq_window;  // multiplies linear power
  BroadbandRandomization randomization;

  double BasePsdDbAt(double f_hz, double rpm_fraction) const;
};

// Evaluates the realized randomization offsets of one BroadbandComponent.
// Channels are realized lazily and cached; instances are not thread-safe
// but cheap to create per worker.
class BroadbandOffsetField {
 public:
  BroadbandOffsetField(const BroadbandRandomization& r, double max_freq_hz);
  double OffsetDbAt(double f_hz, double rpm_fraction) const;

 private:
  struct Channel {
    bool ready = false;
    std::vector<double> amp, phase;
    double scale = 0.0;
  };
  const BroadbandRandomization rand_;
  mutable std::vector<Channel> channels_;
};

enum class FaultKind : int {
  kImbalance = 0,
  kModulation = 1,
  kWhine = 2,
  kWind = 3,
  kPwm = 4,
};
inline constexpr int kNumFaultKinds = 5;

const char* FaultKindName(FaultKind kind);
FaultKind FaultKindFromName(const std::string& name);

// One sampled fault instance. window_* is in rpm for modulation/whine, Hz for
// wind, and unused for imbalance/pwm.
struct FaultSpec {
  FaultKind kind = FaultKind::kImbalance;
  double gain_db = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
};

// Table of amplitude ranges the fault gains are drawn from, indexed by
// FaultKind: {Imbalance [-1,11], Modulation [-11,1], Whine [12,24],
// Wind [-7,5], PWM [12,24]} dB.
extern const double kFaultGainRangeDb[kNumFaultKinds][2];

// Window sampling intervals: modulation start/end in rpm, whine start/end in
// rpm, wind start/end in Hz.
extern const double kModulationWindowStartRpm[2];
extern const double kModulationWindowEndRpm[2];
extern const double kWhineWindowStartRpm[2];
extern const double kWhineWindowEndRpm[2];
extern const double kWindWindowStartHz[2];
extern const double kWindWindowEndHz[2];

inline constexpr double kPwmCarrierHz = 5000.0;
inline constexpr double kPwmSidebandOrder = 24.0;
inline constexpr double kImbalanceOrders[2] = {1.0, 2.0};
inline constexpr double kModulationSidebandOrders[2] = {7.9, 8.1};
inline constexpr double kModulationBaseOrder = 8.0;
inline constexpr double kWhineOrder = 16.0;

// Generative description of one vehicle run-up sound.
struct SoundModel {
  RunUpProfile runup;
  std::vector<OrderComponent> orders;
  std::vector<BroadbandComponent> broadband;
  std::optional<FaultSpec> fault;
  uint64_t sample_seed = 0;
};

// Config-supplied base profiles for the fault components; gain_db from the
// FaultSpec is an additive offset on these.
struct FaultProfiles {
  PiecewiseLinearDb imbalance_order_db;
  PiecewiseLinearDb pwm_track_db;
  BroadbandComponent wind_psd;  // without window/gain; both set on injection
};

struct AmplitudePolicy {
  bool uniform = true;    // draw uniformly over the kind's gain range
  double fixed_db = 0.0;  // used when uniform == false; must lie in range
};

// Stamps fresh fluctuation records (band [lo,hi] Hz, peak fraction) on every
// order, each with an independent seed. peak_fraction == 0 returns the model
// unchanged.
SoundModel RandomizeOrders(const SoundModel& model, Rng& rng,
                           double peak_fraction = 0.1, double band_lo_hz = 5.0,
                           double band_hi_hz = 15.0);

// Stamps a randomization record (independent smooth dB offset per frequency
// channel, peak <= peak_db) on every broadband component. peak_db == 0
// returns the model unchanged.
SoundModel RandomizeBroadband(const SoundModel& model, Rng& rng,
                              double peak_db = 6.0,
                              double channel_width_hz = 4.0);

// Draws a fault gain (per policy) and kind-specific window bounds.
FaultSpec MakeFault(FaultKind kind, Rng& rng, const AmplitudePolicy& policy);

// Injects the fault into a healthy model. Throws if the model already has a
// fault applied.
SoundModel ApplyFault(const SoundModel& model, const FaultSpec& fault,
                      const FaultProfiles& profiles);

}  // namespace evsound

#endif  // EVSOUND_SOUND_MODEL_H_
