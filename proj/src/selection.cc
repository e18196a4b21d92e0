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

#include "selection.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "errors.h"
#include "metrics.h"
#include "thread_pool.h"

namespace evsound {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void MeanStd(const std::vector<double>& xs, double* mean, double* std_dev) {
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  v /= static_cast<double>(xs.size());
  *mean = m;
  *std_dev = std::sqrt(v);
}

double SafePearson(const std::vector<double>& xs,
                   const std::vector<double>& ys) {
  try {
    return Pearson(xs, ys);
  } catch (const Error&) {
    return kNan;
  }
}

}  // namespace

int ArgmaxArch(const std::vector<Architecture>& grid,
               const std::vector<double>& metric) {
  int best = 0;
  for (size_t i = 1; i < grid.size(); ++i) {
    if (metric[i] > metric[best]) {
      best = static_cast<int>(i);
    } else if (metric[i] == metric[best]) {
      const Architecture& a = grid[i];
      const Architecture& b = grid[best];
      if (a.n_blocks < b.n_blocks ||
          (a.n_blocks == b.n_blocks && a.n_filters < b.n_filters)) {
        best = static_cast<int>(i);
      }
    }
  }
  return best;
}

int ArgminArch(const std::vector<Architecture>& grid,
               const std::vector<double>& metric) {
  std::vector<double> neg(metric.size());
  for (size_t i = 0; i < metric.size(); ++i) neg[i] = -metric[i];
  return ArgmaxArch(grid, neg);
}

std::vector<TrainedJob> TrainGridJobs(
    const SelectionConfig& cfg,
    const std::vector<const Spectrogram*>& selection_pool) {
  if (cfg.grid.empty()) throw ConfigError("empty architecture grid");
  if (cfg.runs < 1) throw ConfigError("runs must be >= 1");
  if (cfg.train_size < 1 || cfg.val_size < 1 ||
      selection_pool.size() <
          static_cast<size_t>(cfg.train_size + cfg.val_size)) {
    throw DataError("selection pool smaller than train + val split");
  }
  if (cfg.perturbations.empty()) {
    throw ConfigError("need at least one perturbation kind");
  }

  const size_t n_jobs = cfg.grid.size() * static_cast<size_t>(cfg.runs);
  std::vector<TrainedJob> jobs(n_jobs);
  Rng master(cfg.master_seed);

  RunParallel(n_jobs, cfg.n_threads, [&](size_t idx) {
    const int arch_index = static_cast<int>(idx) / cfg.runs;
    const int run = static_cast<int>(idx) % cfg.runs;
    TrainedJob& job = jobs[idx];
    job.arch_index = arch_index;
    job.run = run;

    Rng job_rng = master.Derive(static_cast<uint64_t>(arch_index),
                                static_cast<uint64_t>(run));

    // Random train/val split of the selection pool.
    std::vector<size_t> perm(selection_pool.size());
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    Rng split_rng = job_rng.Derive(0x73706c69ULL);
    for (size_t i = perm.size(); i > 1; --i) {
      size_t j = split_rng.UniformInt(i);
      std::swap(perm[i - 1], perm[j]);
    }
    job.train_indices.assign(perm.begin(), perm.begin() + cfg.train_size);
    job.val_indices.assign(perm.begin() + cfg.train_size,
                           perm.begin() + cfg.train_size + cfg.val_size);

    std::vector<const Spectrogram*> train_set, val_set;
    for (size_t i : job.train_indices) train_set.push_back(selection_pool[i]);
    for (size_t i : job.val_indices) val_set.push_back(selection_pool[i]);

    Rng train_rng = job_rng.Derive(0x747261696eULL);
    job.trained = Train(cfg.grid[arch_index], train_set, val_set, cfg.train,
                        train_rng);

    // Healthy validation metrics.
    job.val_scores.reserve(val_set.size());
    for (const auto* s : val_set) {
      job.val_scores.push_back(Score(job.trained.params, *s));
    }
    double val_re = 0.0;
    for (double s : job.val_scores) val_re += s;
    job.val_re = val_re / static_cast<double>(val_set.size());

    // Augmented validation set: originals plus proxies, AUROC between them.
    std::vector<LabeledSample> val_samples;
    val_samples.reserve(val_set.size());
    for (size_t k = 0; k < val_set.size(); ++k) {
      LabeledSample ls;
      ls.id = "val_" + std::to_string(k);
      ls.label = SampleLabel::kHealthy;
      ls.spec = *val_set[k];
      val_samples.push_back(std::move(ls));
    }
    Rng proxy_rng = job_rng.Derive(0x70726f7879ULL);
    std::vector<LabeledSample> augmented =
        BuildAugmentedValidationSet(val_samples, cfg.perturbations, proxy_rng);
    std::vector<double> proxy_scores;
    for (const auto& s : augmented) {
      if (s.label == SampleLabel::kProxyAnomaly) {
        proxy_scores.push_back(Score(job.trained.params, s.spec));
      }
    }
    job.proxy_auroc = Auroc(job.val_scores, proxy_scores);
  });
  return jobs;
}

std::vector<JobEvaluation> EvaluateJobs(
    const SelectionConfig& cfg, const std::vector<TrainedJob>& jobs,
    const std::vector<const Spectrogram*>& test_healthy,
    const std::array<std::vector<const Spectrogram*>, kNumFaultKinds>&
        fault_pools) {
  if (test_healthy.empty()) throw DataError("empty healthy test set");
  for (const auto& pool : fault_pools) {
    if (pool.empty()) throw DataError("empty fault pool");
  }
  std::vector<JobEvaluation> evals(jobs.size());
  RunParallel(jobs.size(), cfg.n_threads, [&](size_t idx) {
    const TrainedJob& job = jobs[idx];
    JobEvaluation& ev = evals[idx];
    std::vector<double> healthy_scores;
    healthy_scores.reserve(test_healthy.size());
    for (const auto* s : test_healthy) {
      healthy_scores.push_back(Score(job.trained.params, *s));
    }
    std::vector<double> all_fault_scores;
    for (int k = 0; k < kNumFaultKinds; ++k) {
      std::vector<double> fault_scores;
      fault_scores.reserve(fault_pools[k].size());
      for (const auto* s : fault_pools[k]) {
        fault_scores.push_back(Score(job.trained.params, *s));
      }
      ev.test_auroc[k] = Auroc(healthy_scores, fault_scores);
      ev.ext_val_auroc[k] = Auroc(job.val_scores, fault_scores);
      all_fault_scores.insert(all_fault_scores.end(), fault_scores.begin(),
                              fault_scores.end());
    }
    ev.all_faults_auroc = Auroc(healthy_scores, all_fault_scores);
  });
  return evals;
}

SelectionReport RunSelection(
    const SelectionConfig& cfg,
    const std::vector<const Spectrogram*>& healthy_pool, int test_healthy_size,
    const std::array<std::vector<const Spectrogram*>, kNumFaultKinds>&
        fault_pools) {
  if (test_healthy_size < 1 ||
      healthy_pool.size() <=
          static_cast<size_t>(test_healthy_size)) {
    throw DataError("healthy pool too small for the test split");
  }
  std::vector<const Spectrogram*> selection_pool(
      healthy_pool.begin(), healthy_pool.end() - test_healthy_size);
  std::vector<const Spectrogram*> test_healthy(
      healthy_pool.end() - test_healthy_size, healthy_pool.end());

  SelectionReport report;
  report.grid = cfg.grid;
  report.runs = cfg.runs;
  report.master_seed = cfg.master_seed;
  report.jobs = TrainGridJobs(cfg, selection_pool);
  report.evals = EvaluateJobs(cfg, report.jobs, test_healthy, fault_pools);

  const size_t n_arch = cfg.grid.size();
  const int runs = cfg.runs;
  report.archs.resize(n_arch);

  auto runs_of = [&](size_t arch, auto getter) {
    std::vector<double> vals;
    vals.reserve(runs);
    for (int r = 0; r < runs; ++r) {
      vals.push_back(getter(arch * runs + r));
    }
    return vals;
  };

  for (size_t a = 0; a < n_arch; ++a) {
    ArchSummary& s = report.archs[a];
    s.arch = cfg.grid[a];
    MeanStd(runs_of(a, [&](size_t i) { return report.jobs[i].val_re; }),
            &s.val_re_mean, &s.val_re_std);
    MeanStd(runs_of(a, [&](size_t i) { return report.jobs[i].proxy_auroc; }),
            &s.proxy_mean, &s.proxy_std);
    MeanStd(runs_of(a, [&](size_t i) { return report.evals[i].all_faults_auroc; }),
            &s.all_mean, &s.all_std);
    for (int k = 0; k < kNumFaultKinds; ++k) {
      MeanStd(runs_of(a, [&](size_t i) { return report.evals[i].test_auroc[k]; }),
              &s.test_mean[k], &s.test_std[k]);
      MeanStd(
          runs_of(a, [&](size_t i) { return report.evals[i].ext_val_auroc[k]; }),
          &s.ext_mean[k], &s.ext_std[k]);
    }
  }

  // Per-architecture mean test AUROC vectors for correlations.
  std::vector<double> arch_all(n_arch);
  std::array<std::vector<double>, kNumFaultKinds> arch_fault;
  for (int k = 0; k < kNumFaultKinds; ++k) arch_fault[k].resize(n_arch);
  for (size_t a = 0; a < n_arch; ++a) {
    arch_all[a] = report.archs[a].all_mean;
    for (int k = 0; k < kNumFaultKinds; ++k) {
      arch_fault[k][a] = report.archs[a].test_mean[k];
    }
  }

  auto outcome_for_arch = [&](const std::string& name, int arch) {
    StrategyOutcome out;
    out.name = name;
    out.selected_arch = arch;
    const ArchSummary& s = report.archs[arch];
    out.test_mean = s.test_mean;
    out.test_std = s.test_std;
    out.all_mean = s.all_mean;
    out.all_std = s.all_std;
    return out;
  };

  auto add_correlations = [&](StrategyOutcome& out,
                              const std::vector<double>& metric,
                              int excluded_kind) {
    out.has_correlations = true;
    for (int k = 0; k < kNumFaultKinds; ++k) {
      out.corr[k] =
          k == excluded_kind ? kNan : SafePearson(metric, arch_fault[k]);
    }
    out.corr_all = excluded_kind >= 0 ? kNan : SafePearson(metric, arch_all);
  };

  if (cfg.strategies.val_re) {
    std::vector<double> metric(n_arch);
    for (size_t a = 0; a < n_arch; ++a) metric[a] = report.archs[a].val_re_mean;
    StrategyOutcome out = outcome_for_arch("val_re", ArgminArch(cfg.grid, metric));
    // Correlation uses the negated error so that larger metric = better,
    // matching the orientation of the other rows.
    std::vector<double> neg(n_arch);
    for (size_t a = 0; a < n_arch; ++a) neg[a] = -metric[a];
    add_correlations(out, neg, -1);
    report.strategies.push_back(std::move(out));
  }
  if (cfg.strategies.average) {
    StrategyOutcome out;
    out.name = "average";
    out.selected_arch = -1;
    std::vector<double> all;
    for (const auto& ev : report.evals) all.push_back(ev.all_faults_auroc);
    MeanStd(all, &out.all_mean, &out.all_std);
    for (int k = 0; k < kNumFaultKinds; ++k) {
      std::vector<double> vals;
      for (const auto& ev : report.evals) vals.push_back(ev.test_auroc[k]);
      MeanStd(vals, &out.test_mean[k], &out.test_std[k]);
    }
    report.strategies.push_back(std::move(out));
  }
  for (int k = 0; k < kNumFaultKinds; ++k) {
    if (!cfg.strategies.ext_set[k]) continue;
    std::vector<double> metric(n_arch);
    for (size_t a = 0; a < n_arch; ++a) metric[a] = report.archs[a].ext_mean[k];
    StrategyOutcome out = outcome_for_arch(
        std::string("ext_set_") + FaultKindName(static_cast<FaultKind>(k)),
        ArgmaxArch(cfg.grid, metric));
    // The kind used for selection is excluded from its own report columns.
    out.test_mean[k] = kNan;
    out.test_std[k] = kNan;
    out.all_mean = kNan;
    out.all_std = kNan;
    add_correlations(out, metric, k);
    report.strategies.push_back(std::move(out));
  }
  if (cfg.strategies.proposed) {
    std::vector<double> metric(n_arch);
    for (size_t a = 0; a < n_arch; ++a) metric[a] = report.archs[a].proxy_mean;
    StrategyOutcome out =
        outcome_for_arch("proposed", ArgmaxArch(cfg.grid, metric));
    add_correlations(out, metric, -1);
    report.strategies.push_back(std::move(out));
  }
  if (cfg.strategies.ideal) {
    StrategyOutcome out =
        outcome_for_arch("ideal", ArgmaxArch(cfg.grid, arch_all));
    report.strategies.push_back(std::move(out));
  }
  return report;
}

}  // namespace evsound
