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

#ifndef EVSOUND_DATASET_H_
#define EVSOUND_DATASET_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "config.h"
#include "sound_model.h"
#include "spectrogram.h"

namespace evsound {

// One line of the JSON-lines dataset manifest.
struct ManifestRecord {
  std::string id;
  std::string label;  // "healthy" or a fault kind name
  double gain_db = 0.0;
  std::optional<std::pair<double, double>> window;
  uint64_t seed = 0;
  std::string path;  // relative to the dataset directory
  std::string hash;  // "fnv1a64:<hex>"
  int format = 1;
};

struct Manifest {
  std::vector<ManifestRecord> records;
};

// FNV-1a 64-bit over the file bytes.
uint64_t HashFile(const std::string& path);

// Deterministic reconstruction of one sample's generative model from the
// experiment config and its seed. Healthy when fault_kind is empty.
SoundModel BuildSampleModel(const ExperimentConfig& cfg, uint64_t sample_seed,
                            const std::optional<FaultKind>& fault_kind);

// Seed for sample `index` of a label class (healthy or fault kind index).
uint64_t SampleSeed(uint64_t master_seed, int label_class, int index);

// Generates the dataset into cfg.out_dir: spectrograms/<id>.evspc in the
// normalized domain, optional wav/<id>.wav, config.json, manifest.jsonl.
void GenerateDataset(const ExperimentConfig& cfg, bool write_wav);

Manifest LoadManifest(const std::string& dataset_dir);
void SaveManifest(const Manifest& manifest, const std::string& dataset_dir);

// Re-hashes every file and re-checks manifest invariants (unique ids, files
// parse, normalized range, consistent grid). Throws DataError on violation.
void VerifyDataset(const std::string& dataset_dir);

struct LoadedDataset {
  GridSpec grid;
  std::vector<Spectrogram> healthy;
  std::array<std::vector<Spectrogram>, kNumFaultKinds> faults;
  std::vector<std::string> healthy_ids;
  std::array<std::vector<std::string>, kNumFaultKinds> fault_ids;
};

LoadedDataset LoadDataset(const std::string& dataset_dir);

}  // namespace evsound

#endif  // EVSOUND_DATASET_H_
