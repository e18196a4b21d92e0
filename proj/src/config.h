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

#ifndef EVSOUND_CONFIG_H_
#define EVSOUND_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "autoencoder.h"
#include "perturb.h"
#include "selection.h"
#include "sound_model.h"
#include "spectrogram.h"

namespace evsound {

// Healthy-sound generative profiles and randomization levels. All dB tables
// are config data; the presets ship defaults with order 4 loudest, amplitudes
// decreasing with order number and rising with rpm, and a pink-like broadband
// autopower that falls below the clip floor at high frequencies.
struct SqeConfig {
  RunUpConfig runup;
  std::vector<double> order_numbers;
  std::vector<PiecewiseLinearDb> order_profiles;
  BroadbandComponent broadband;
  double order_fluctuation_peak = 0.1;
  double order_fluctuation_band_lo_hz = 5.0;
  double order_fluctuation_band_hi_hz = 15.0;
  double broadband_randomization_db = 6.0;
  double broadband_channel_width_hz = 4.0;
  FaultProfiles faults;
};

struct DatasetSizes {
  int healthy = 360;
  int per_fault = 60;
};

struct SplitSizes {
  int train = 200;
  int val = 60;
  int test_healthy = 100;
  int test_per_fault = 60;
};

struct ExperimentConfig {
  std::string preset = "desk";
  GridSpec grid = GridSpec::Desk();
  DatasetSizes dataset;
  SplitSizes split;
  std::vector<Architecture> arch_grid;
  TrainConfig train;
  int runs = 3;
  StrategySet strategies;
  std::vector<PerturbationParams> perturbations = {
      PerturbationParams::AddRpm(), PerturbationParams::AddFreq(),
      PerturbationParams::AddOrder()};
  uint64_t master_seed = 1;
  std::string out_dir = "out";
  double sample_rate_hz = 16000.0;
  int n_threads = 0;
  SqeConfig sqe;

  // Throws ConfigError on inconsistent sizes or grids.
  void Validate() const;
};

// Desk preset: 256 x 64 grid, architectures n in [1,5] x f in {4,8}, R = 3,
// 360 healthy / 60 per fault, splits 200/60/100+60.
ExperimentConfig DeskPreset();
// Paper preset: 1536 x 384 grid, n in [1,7] x f in {4,8,16,32},
// 1200 healthy / 200 per fault, splits 400/100/200+200.
ExperimentConfig PaperPreset();

ExperimentConfig PresetByName(const std::string& name);

// Reads a JSON config file. A "preset" key selects the base preset; every
// other present key overrides it. Unknown keys are rejected.
ExperimentConfig LoadConfigFile(const std::string& path);

// Applies JSON text on top of a base config (same rules as LoadConfigFile).
ExperimentConfig ApplyConfigJson(const ExperimentConfig& base,
                                 const std::string& json_text);

// Full round-trippable dump of the effective config.
std::string ConfigToJson(const ExperimentConfig& cfg);
void SaveConfigFile(const ExperimentConfig& cfg, const std::string& path);

}  // namespace evsound

#endif  // EVSOUND_CONFIG_H_
