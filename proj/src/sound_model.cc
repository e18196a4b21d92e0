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

#include "sound_model.h"

#include <algorithm>
#include <cmath>

#include "errors.h"

namespace evsound {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
// Peak normalization of random cosine series is done on a finite grid; the
// realized scale is shrunk by this factor so the continuous-time peak stays
// at or below the requested cap.
constexpr double kPeakGuard = 1.0 + 1e-4;
}  // namespace

double PiecewiseLinearDb::At(double xq) const {
  if (x.empty()) return 0.0;
  if (xq <= x.front()) return y_db.front();
  if (xq >= x.back()) return y_db.back();
  size_t i = 1;
  while (i < x.size() && x[i] < xq) ++i;
  double t = (xq - x[i - 1]) / (x[i] - x[i - 1]);
  return y_db[i - 1] + t * (y_db[i] - y_db[i - 1]);
}

double HannWindow::At(double xq) const {
  if (xq <= start || xq >= end || end <= start) return 0.0;
  double u = (xq - start) / (end - start);
  return 0.5 - 0.5 * std::cos(kTwoPi * u);
}

BandNoise::BandNoise(const Fluctuation& f, double duration_s)
    : duration_s_(duration_s) {
  if (f.peak_fraction <= 0.0 || duration_s <= 0.0) return;
  long m_lo = static_cast<long>(std::ceil(f.band_lo_hz * duration_s));
  long m_hi = static_cast<long>(std::floor(f.band_hi_hz * duration_s));
  if (m_lo < 1) m_lo = 1;
  if (m_hi < m_lo) m_hi = m_lo;
  Rng rng(f.seed);
  amp_.reserve(m_hi - m_lo + 1);
  phase_.reserve(m_hi - m_lo + 1);
  freq_.reserve(m_hi - m_lo + 1);
  for (long m = m_lo; m <= m_hi; ++m) {
    amp_.push_back(rng.Normal());
    phase_.push_back(rng.Uniform(0.0, kTwoPi));
    freq_.push_back(static_cast<double>(m) / duration_s);
  }
  const int kScan = 16384;
  double peak = 0.0;
  for (int i = 0; i < kScan; ++i) {
    double t = duration_s * i / kScan;
    double v = 0.0;
    for (size_t k = 0; k < amp_.size(); ++k) {
      v += amp_[k] * std::cos(kTwoPi * freq_[k] * t + phase_[k]);
    }
    peak = std::max(peak, std::abs(v));
  }
  scale_ = peak > 0.0 ? f.peak_fraction / (peak * kPeakGuard) : 0.0;
}

double BandNoise::At(double t) const {
  if (scale_ == 0.0) return 0.0;
  double v = 0.0;
  for (size_t k = 0; k < amp_.size(); ++k) {
    v += amp_[k] * std::cos(kTwoPi * freq_[k] * t + phase_[k]);
  }
  return scale_ * v;
}

double OrderComponent::AmplitudeDbAt(double rpm) const {
  double db = base_profile_db.At(rpm) + gain_db;
  if (db_bump_window.has_value()) {
    db += db_bump_window->At(rpm) * db_bump_gain;
  }
  return db;
}

double BroadbandComponent::BasePsdDbAt(double f_hz,
                                       double rpm_fraction) const {
  PiecewiseLinearDb rest{freq_knots_hz, psd_db_at_rest};
  PiecewiseLinearDb full{freq_knots_hz, psd_db_at_max};
  double lo = rest.At(f_hz);
  double hi = full.At(f_hz);
  return lo + (hi - lo) * std::clamp(rpm_fraction, 0.0, 1.0) + gain_db;
}

BroadbandOffsetField::BroadbandOffsetField(const BroadbandRandomization& r,
                                           double max_freq_hz)
    : rand_(r) {
  size_t n = 0;
  if (r.peak_db > 0.0 && r.channel_width_hz > 0.0) {
    n = static_cast<size_t>(max_freq_hz / r.channel_width_hz) + 1;
  }
  channels_.resize(n);
}

double BroadbandOffsetField::OffsetDbAt(double f_hz,
                                        double rpm_fraction) const {
  if (channels_.empty() || f_hz < 0.0) return 0.0;
  size_t c = static_cast<size_t>(f_hz / rand_.channel_width_hz);
  if (c >= channels_.size()) return 0.0;
  Channel& ch = channels_[c];
  if (!ch.ready) {
    Rng rng = Rng(rand_.seed).Derive(c);
    ch.amp.resize(rand_.modes);
    ch.phase.resize(rand_.modes);
    for (int m = 0; m < rand_.modes; ++m) {
      ch.amp[m] = rng.Normal();
      ch.phase[m] = rng.Uniform(0.0, kTwoPi);
    }
    const int kScan = 512;
    double peak = 0.0;
    for (int i = 0; i <= kScan; ++i) {
      double u = static_cast<double>(i) / kScan;
      double v = 0.0;
      for (int m = 0; m < rand_.modes; ++m) {
        v += ch.amp[m] * std::cos(kTwoPi * 0.5 * (m + 1) * u + ch.phase[m]);
      }
      peak = std::max(peak, std::abs(v));
    }
    ch.scale = peak > 0.0 ? rand_.peak_db / (peak * kPeakGuard) : 0.0;
    ch.ready = true;
  }
  double u = std::clamp(rpm_fraction, 0.0, 1.0);
  double v = 0.0;
  for (int m = 0; m < rand_.modes; ++m) {
    v += ch.amp[m] * std::cos(kTwoPi * 0.5 * (m + 1) * u + ch.phase[m]);
  }
  return ch.scale * v;
}

const double kFaultGainRangeDb[kNumFaultKinds][2] = {
    {-1.0, 11.0},   // imbalance
    {-11.0, 1.0},   // modulation
    {12.0, 24.0},   // whine
    {-7.0, 5.0},    // wind
    {12.0, 24.0},   // pwm
};

const double kModulationWindowStartRpm[2] = {2500.0, 3500.0};
const double kModulationWindowEndRpm[2] = {6500.0, 7500.0};
const double kWhineWindowStartRpm[2] = {5500.0, 6500.0};
const double kWhineWindowEndRpm[2] = {7500.0, 8500.0};
const double kWindWindowStartHz[2] = {3750.0, 4250.0};
const double kWindWindowEndHz[2] = {5250.0, 5750.0};

const char* FaultKindName(FaultKind kind) {
  switch (kind) {
    case FaultKind::kImbalance: return "imbalance";
    case FaultKind::kModulation: return "modulation";
    case FaultKind::kWhine: return "whine";
    case FaultKind::kWind: return "wind";
    case FaultKind::kPwm: return "pwm";
  }
  return "unknown";
}

FaultKind FaultKindFromName(const std::string& name) {
  for (int k = 0; k < kNumFaultKinds; ++k) {
    if (name == FaultKindName(static_cast<FaultKind>(k))) {
      return static_cast<FaultKind>(k);
    }
  }
  throw DataError("unknown fault kind: " + name);
}

SoundModel RandomizeOrders(const SoundModel& model, Rng& rng,
                           double peak_fraction, double band_lo_hz,
                           double band_hi_hz) {
  if (peak_fraction <= 0.0) return model;
  SoundModel out = model;
  for (auto& order : out.orders) {
    order.fluctuation.band_lo_hz = band_lo_hz;
    order.fluctuation.band_hi_hz = band_hi_hz;
    order.fluctuation.peak_fraction = peak_fraction;
    order.fluctuation.seed = rng.NextU64();
  }
  return out;
}

SoundModel RandomizeBroadband(const SoundModel& model, Rng& rng,
                              double peak_db, double channel_width_hz) {
  if (peak_db <= 0.0) return model;
  SoundModel out = model;
  for (auto& bb : out.broadband) {
    bb.randomization.peak_db = peak_db;
    bb.randomization.channel_width_hz = channel_width_hz;
    bb.randomization.seed = rng.NextU64();
  }
  return out;
}

FaultSpec MakeFault(FaultKind kind, Rng& rng, const AmplitudePolicy& policy) {
  const double* range = kFaultGainRangeDb[static_cast<int>(kind)];
  FaultSpec spec;
  spec.kind = kind;
  if (policy.uniform) {
    spec.gain_db = rng.Uniform(range[0], range[1]);
  } else {
    if (policy.fixed_db < range[0] || policy.fixed_db > range[1]) {
      throw ConfigError("fixed fault gain outside the kind's amplitude range");
    }
    spec.gain_db = policy.fixed_db;
  }
  switch (kind) {
    case FaultKind::kModulation:
      spec.window_start =
          rng.Uniform(kModulationWindowStartRpm[0], kModulationWindowStartRpm[1]);
      spec.window_end =
          rng.Uniform(kModulationWindowEndRpm[0], kModulationWindowEndRpm[1]);
      break;
    case FaultKind::kWhine:
      spec.window_start =
          rng.Uniform(kWhineWindowStartRpm[0], kWhineWindowStartRpm[1]);
      spec.window_end =
          rng.Uniform(kWhineWindowEndRpm[0], kWhineWindowEndRpm[1]);
      break;
    case FaultKind::kWind:
      spec.window_start =
          rng.Uniform(kWindWindowStartHz[0], kWindWindowStartHz[1]);
      spec.window_end = rng.Uniform(kWindWindowEndHz[0], kWindWindowEndHz[1]);
      break;
    default:
      break;
  }
  return spec;
}

namespace {

const OrderComponent* FindOrder(const SoundModel& model, double number) {
  for (const auto& order : model.orders) {
    if (order.order_number == number && order.carrier_offset_hz == 0.0) {
      return &order;
    }
  }
  return nullptr;
}

}  // namespace

SoundModel ApplyFault(const SoundModel& model, const FaultSpec& fault,
                      const FaultProfiles& profiles) {
  if (model.fault.has_value()) {
    throw DataError("fault already applied to this model");
  }
  SoundModel out = model;
  out.fault = fault;
  Rng fault_rng = Rng(model.sample_seed).Derive(0x66617577ULL);  // fault streams
  switch (fault.kind) {
    case FaultKind::kImbalance: {
      for (double number : kImbalanceOrders) {
        OrderComponent oc;
        oc.order_number = number;
        oc.base_profile_db = profiles.imbalance_order_db;
        oc.gain_db = fault.gain_db;
        oc.fluctuation = model.orders.empty() ? Fluctuation{}
                                              : model.orders[0].fluctuation;
        oc.fluctuation.seed = fault_rng.NextU64();
        out.orders.push_back(oc);
      }
      break;
    }
    case FaultKind::kModulation: {
      const OrderComponent* base = FindOrder(model, kModulationBaseOrder);
      if (base == nullptr) {
        throw DataError("modulation fault requires a healthy order 8");
      }
      for (double number : kModulationSidebandOrders) {
        OrderComponent oc;
        oc.order_number = number;
        oc.base_profile_db = base->base_profile_db;
        oc.gain_db = fault.gain_db;
        oc.amplitude_window =
            HannWindow{fault.window_start, fault.window_end};
        oc.fluctuation = base->fluctuation;
        oc.fluctuation.seed = fault_rng.NextU64();
        out.orders.push_back(oc);
      }
      break;
    }
    case FaultKind::kWhine: {
      bool found = false;
      for (auto& order : out.orders) {
        if (order.order_number == kWhineOrder &&
            order.carrier_offset_hz == 0.0) {
          order.db_bump_window =
              HannWindow{fault.window_start, fault.window_end};
          order.db_bump_gain = fault.gain_db;
          found = true;
          break;
        }
      }
      if (!found) throw DataError("whine fault requires a healthy order 16");
      break;
    }
    case FaultKind::kWind: {
      BroadbandComponent bb = profiles.wind_psd;
      bb.gain_db += fault.gain_db;
      bb.freq_window = HannWindow{fault.window_start, fault.window_end};
      if (!model.broadband.empty()) {
        bb.randomization = model.broadband[0].randomization;
        bb.randomization.seed = fault_rng.NextU64();
      }
      out.broadband.push_back(bb);
      break;
    }
    case FaultKind::kPwm: {
      const double sideband_orders[3] = {0.0, kPwmSidebandOrder,
                                         -kPwmSidebandOrder};
      for (double number : sideband_orders) {
        OrderComponent oc;
        oc.order_number = number;
        oc.carrier_offset_hz = kPwmCarrierHz;
        oc.base_profile_db = profiles.pwm_track_db;
        oc.gain_db = fault.gain_db;
        oc.fluctuation = model.orders.empty() ? Fluctuation{}
                                              : model.orders[0].fluctuation;
        oc.fluctuation.seed = fault_rng.NextU64();
        out.orders.push_back(oc);
      }
      break;
    }
  }
  return out;
}

}  // namespace evsound
