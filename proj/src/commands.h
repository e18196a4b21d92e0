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

#ifndef EVSOUND_COMMANDS_H_
#define EVSOUND_COMMANDS_H_

#include <string>
#include <vector>

#include "config.h"

namespace evsound {

// Generates the dataset (spectrogram binaries, optional WAVs, manifest,
// effective config) into cfg.out_dir.
void CmdGen(const ExperimentConfig& cfg, bool write_wav);

// Runs the full selection experiment on a generated dataset and writes
// report.csv, strategies.csv, report.json, per-job models and training
// histories, and the proposed-selection model under selected/ into
// cfg.out_dir.
void CmdExperiment(const ExperimentConfig& cfg,
                   const std::string& dataset_dir);

// Emits reconstruction-error maps, anomaly masks and saliency maps (PGM) for
// the requested sample ids, plus latents.csv and scores.csv over the whole
// dataset, into out_dir. model_path needs its companion .json (written by
// CmdExperiment) for the training split.
void CmdExplain(const std::string& model_path, const std::string& dataset_dir,
                const std::vector<std::string>& sample_ids,
                const std::string& out_dir);

// Re-validates a dataset directory; throws DataError on any violation.
void CmdVerify(const std::string& dataset_dir);

// Renders a human-readable summary of an experiment report directory.
std::string CmdReport(const std::string& report_dir);

}  // namespace evsound

#endif  // EVSOUND_COMMANDS_H_
