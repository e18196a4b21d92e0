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

#ifndef EVSOUND_SELECTION_H_
#define EVSOUND_SELECTION_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "autoencoder.h"
#include "perturb.h"
#include "sound_model.h"
#include "spectrogram.h"

namespace evsound {

struct StrategySet {
  bool proposed = true;
  bool val_re = true;
  bool average = true;
  bool ideal = true;
  std::array<bool, kNumFaultKinds> ext_set = {true, true, true, true, true};
};

struct SelectionConfig {
  std::vector<Architecture> grid;
  int runs = 3;
  TrainConfig train;
  std::vector<PerturbationParams> perturbations = {
      PerturbationParams::AddRpm(), PerturbationParams::AddFreq(),
      PerturbationParams::AddOrder()};
  // Per-run random split sizes drawn from the selection pool.
  int train_size = 200;
  int val_size = 60;
  uint64_t master_seed = 1;
  StrategySet strategies;
  int n_threads = 0;  // 0 = hardware concurrency
};

// One trained (architecture, run) job and its fault-free validation metrics.
// Produced by TrainGridJobs, which never receives fault data; the proposed
// selection path reads only these fields.
struct TrainedJob {
  int arch_index = 0;
  int run = 0;
  TrainedModel trained;
  double val_re = 0.0;       // mean reconstruction error on the healthy val split
  double proxy_auroc = 0.0;  // healthy vs proxy on the augmented val set
  std::vector<size_t> train_indices;  // into the selection pool
  std::vector<size_t> val_indices;
  std::vector<double> val_scores;  // healthy val scores, reused by ext-set
};

// Fault-dependent evaluation of one job.
struct JobEvaluation {
  std::array<double, kNumFaultKinds> test_auroc{};
  double all_faults_auroc = 0.0;
  std::array<double, kNumFaultKinds> ext_val_auroc{};
};

struct ArchSummary {
  Architecture arch;
  double val_re_mean = 0.0, val_re_std = 0.0;
  double proxy_mean = 0.0, proxy_std = 0.0;
  std::array<double, kNumFaultKinds> test_mean{}, test_std{};
  double all_mean = 0.0, all_std = 0.0;
  std::array<double, kNumFaultKinds> ext_mean{}, ext_std{};
};

struct StrategyOutcome {
  std::string name;
  // Index into cfg.grid; -1 when the strategy selects no single architecture
  // (average).
  int selected_arch = -1;
  // Test AUROC mean/std over the selected architecture's runs (over all
  // models for average). Entries for excluded datasets are NaN.
  std::array<double, kNumFaultKinds> test_mean{}, test_std{};
  double all_mean = 0.0, all_std = 0.0;
  // Pearson correlation of the strategy's per-architecture metric with the
  // per-architecture mean test AUROC; NaN where undefined or excluded.
  std::array<double, kNumFaultKinds> corr{};
  double corr_all = 0.0;
  bool has_correlations = false;
};

struct SelectionReport {
  std::vector<Architecture> grid;
  int runs = 0;
  uint64_t master_seed = 0;
  std::vector<ArchSummary> archs;
  std::vector<StrategyOutcome> strategies;
  // Flattened (arch, run) results, arch-major.
  std::vector<TrainedJob> jobs;
  std::vector<JobEvaluation> evals;
};

// Trains every (architecture, run) job on random splits of the healthy
// selection pool and computes the healthy-only validation metrics (val
// reconstruction error, proxy-anomaly AUROC). This function is the entire
// "proposed" metric path and takes no fault data.
std::vector<TrainedJob> TrainGridJobs(
    const SelectionConfig& cfg,
    const std::vector<const Spectrogram*>& selection_pool);

// Scores each trained model on the held-out healthy test samples and every
// fault pool; computes per-fault and all-faults test AUROC plus the ext-set
// validation AUROC (healthy val split vs fault pool).
std::vector<JobEvaluation> EvaluateJobs(
    const SelectionConfig& cfg, const std::vector<TrainedJob>& jobs,
    const std::vector<const Spectrogram*>& test_healthy,
    const std::array<std::vector<const Spectrogram*>, kNumFaultKinds>&
        fault_pools);

// Full Algorithm-1 style selection: TrainGridJobs + EvaluateJobs + the five
// strategies and their correlations. The healthy pool's last
// test_healthy_size samples form the fixed test split; the rest is the
// per-run train/val selection pool.
SelectionReport RunSelection(
    const SelectionConfig& cfg,
    const std::vector<const Spectrogram*>& healthy_pool, int test_healthy_size,
    const std::array<std::vector<const Spectrogram*>, kNumFaultKinds>&
        fault_pools);

// Argmax with ties broken toward fewer blocks, then fewer filters.
int ArgmaxArch(const std::vector<Architecture>& grid,
               const std::vector<double>& metric);
// Argmin with the same tie-break.
int ArgminArch(const std::vector<Architecture>& grid,
               const std::vector<double>& metric);

}  // namespace evsound

#endif  // EVSOUND_SELECTION_H_
