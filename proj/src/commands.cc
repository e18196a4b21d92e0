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

#include "commands.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "dataset.h"
#include "errors.h"
#include "explain.h"
#include "metrics.h"
#include "selection.h"

namespace evsound {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string Fmt(double v, const char* format = "%.6f") {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

std::string JobName(const Architecture& a, int run) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "n%d_f%d_run%d", a.n_blocks, a.n_filters,
                run);
  return buf;
}

json TrainConfigToJson(const TrainConfig& t) {
  return json{{"learning_rate", t.learning_rate},
              {"batch_size", t.batch_size},
              {"max_epochs", t.max_epochs},
              {"adam_beta1", t.adam_beta1},
              {"adam_beta2", t.adam_beta2},
              {"adam_eps", t.adam_eps},
              {"patience", t.patience}};
}

json JobManifest(const ExperimentConfig& cfg, const TrainedJob& job,
                 const Architecture& arch) {
  return json{
      {"architecture",
       {{"n_blocks", arch.n_blocks}, {"n_filters", arch.n_filters}}},
      {"train", TrainConfigToJson(cfg.train)},
      {"master_seed", cfg.master_seed},
      {"arch_index", job.arch_index},
      {"run", job.run},
      {"stopped_epoch", job.trained.stopped_epoch},
      {"best_epoch", job.trained.best_epoch},
      {"final_train_loss", job.trained.train_loss.back()},
      {"final_val_loss", job.trained.val_loss.back()},
      {"val_re", job.val_re},
      {"proxy_auroc", job.proxy_auroc}};
}

void WriteHistory(const TrainedJob& job, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open for writing: " + path);
  os << "epoch,train_loss,val_loss\n";
  for (size_t e = 0; e < job.trained.train_loss.size(); ++e) {
    os << (e + 1) << "," << Fmt(job.trained.train_loss[e], "%.9g") << ","
       << Fmt(job.trained.val_loss[e], "%.9g") << "\n";
  }
}

const char* kDatasetNames[kNumFaultKinds] = {"imbalance", "modulation",
                                             "whine", "wind", "pwm"};

}  // namespace

void CmdGen(const ExperimentConfig& cfg, bool write_wav) {
  GenerateDataset(cfg, write_wav);
}

void CmdExperiment(const ExperimentConfig& cfg,
                   const std::string& dataset_dir) {
  cfg.Validate();
  LoadedDataset ds = LoadDataset(dataset_dir);
  if (static_cast<int>(ds.healthy.size()) < cfg.dataset.healthy) {
    throw DataError("dataset has fewer healthy samples than the config");
  }
  for (int k = 0; k < kNumFaultKinds; ++k) {
    if (static_cast<int>(ds.faults[k].size()) < cfg.split.test_per_fault) {
      throw DataError(std::string("dataset has too few samples for fault ") +
                      kDatasetNames[k]);
    }
  }
  if (!(ds.grid == cfg.grid)) {
    throw DataError("dataset grid does not match the config grid");
  }

  SelectionConfig sel;
  sel.grid = cfg.arch_grid;
  sel.runs = cfg.runs;
  sel.train = cfg.train;
  sel.perturbations = cfg.perturbations;
  sel.train_size = cfg.split.train;
  sel.val_size = cfg.split.val;
  sel.master_seed = cfg.master_seed;
  sel.strategies = cfg.strategies;
  sel.n_threads = cfg.n_threads;

  const int n_healthy = cfg.dataset.healthy;
  std::vector<const Spectrogram*> healthy_pool;
  for (int i = 0; i < n_healthy; ++i) healthy_pool.push_back(&ds.healthy[i]);
  std::array<std::vector<const Spectrogram*>, kNumFaultKinds> fault_pools;
  for (int k = 0; k < kNumFaultKinds; ++k) {
    for (int i = 0; i < cfg.split.test_per_fault; ++i) {
      fault_pools[k].push_back(&ds.faults[k][i]);
    }
  }

  SelectionReport report =
      RunSelection(sel, healthy_pool, cfg.split.test_healthy, fault_pools);

  const fs::path out(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(out / "models", ec);
  if (ec) throw DataError("cannot create output directory: " + cfg.out_dir);
  fs::create_directories(out / "histories");
  fs::create_directories(out / "selected");

  // Per-job artifacts.
  for (const auto& job : report.jobs) {
    const Architecture& arch = report.grid[job.arch_index];
    const std::string name = JobName(arch, job.run);
    SaveModel(job.trained.params, (out / "models" / (name + ".evae")).string());
    std::ofstream js((out / "models" / (name + ".json")).string());
    js << JobManifest(cfg, job, arch).dump(2) << "\n";
    WriteHistory(job, (out / "histories" / (name + ".csv")).string());
  }

  // report.csv: one row per architecture per dataset column.
  {
    std::ofstream os((out / "report.csv").string());
    if (!os) throw DataError("cannot write report.csv");
    os << "n_blocks,n_filters,dataset,test_auroc_mean,test_auroc_std,"
          "val_re_mean,val_re_std,proxy_auroc_mean,proxy_auroc_std\n";
    for (const auto& a : report.archs) {
      for (int k = 0; k < kNumFaultKinds; ++k) {
        os << a.arch.n_blocks << "," << a.arch.n_filters << ","
           << kDatasetNames[k] << "," << Fmt(a.test_mean[k]) << ","
           << Fmt(a.test_std[k]) << "," << Fmt(a.val_re_mean, "%.9g") << ","
           << Fmt(a.val_re_std, "%.9g") << "," << Fmt(a.proxy_mean) << ","
           << Fmt(a.proxy_std) << "\n";
      }
      os << a.arch.n_blocks << "," << a.arch.n_filters << ",all_faults,"
         << Fmt(a.all_mean) << "," << Fmt(a.all_std) << ","
         << Fmt(a.val_re_mean, "%.9g") << "," << Fmt(a.val_re_std, "%.9g")
         << "," << Fmt(a.proxy_mean) << "," << Fmt(a.proxy_std) << "\n";
    }
  }

  // strategies.csv mirrors the selected-model tables.
  {
    std::ofstream os((out / "strategies.csv").string());
    if (!os) throw DataError("cannot write strategies.csv");
    os << "strategy,selected_n_blocks,selected_n_filters";
    for (int k = 0; k < kNumFaultKinds; ++k) {
      os << "," << kDatasetNames[k] << "_mean," << kDatasetNames[k] << "_std";
    }
    os << ",all_faults_mean,all_faults_std\n";
    for (const auto& s : report.strategies) {
      os << s.name << ",";
      if (s.selected_arch >= 0) {
        os << report.grid[s.selected_arch].n_blocks << ","
           << report.grid[s.selected_arch].n_filters;
      } else {
        os << ",";
      }
      for (int k = 0; k < kNumFaultKinds; ++k) {
        os << "," << Fmt(s.test_mean[k]) << "," << Fmt(s.test_std[k]);
      }
      os << "," << Fmt(s.all_mean) << "," << Fmt(s.all_std) << "\n";
    }
  }

  // report.json: the full picture.
  {
    json archs = json::array();
    for (const auto& a : report.archs) {
      json ja{{"n_blocks", a.arch.n_blocks},
              {"n_filters", a.arch.n_filters},
              {"val_re_mean", a.val_re_mean},
              {"val_re_std", a.val_re_std},
              {"proxy_auroc_mean", a.proxy_mean},
              {"proxy_auroc_std", a.proxy_std},
              {"all_faults_mean", a.all_mean},
              {"all_faults_std", a.all_std}};
      for (int k = 0; k < kNumFaultKinds; ++k) {
        ja[std::string(kDatasetNames[k]) + "_mean"] = a.test_mean[k];
        ja[std::string(kDatasetNames[k]) + "_std"] = a.test_std[k];
        ja[std::string("ext_") + kDatasetNames[k] + "_mean"] = a.ext_mean[k];
      }
      archs.push_back(std::move(ja));
    }
    json strategies = json::array();
    for (const auto& s : report.strategies) {
      json js{{"name", s.name}};
      if (s.selected_arch >= 0) {
        js["selected"] = {
            {"n_blocks", report.grid[s.selected_arch].n_blocks},
            {"n_filters", report.grid[s.selected_arch].n_filters}};
      } else {
        js["selected"] = nullptr;
      }
      js["all_faults_mean"] = s.all_mean;
      js["all_faults_std"] = s.all_std;
      for (int k = 0; k < kNumFaultKinds; ++k) {
        js[std::string(kDatasetNames[k]) + "_mean"] = s.test_mean[k];
        js[std::string(kDatasetNames[k]) + "_std"] = s.test_std[k];
      }
      if (s.has_correlations) {
        json corr;
        for (int k = 0; k < kNumFaultKinds; ++k) {
          corr[kDatasetNames[k]] = s.corr[k];
        }
        corr["all_faults"] = s.corr_all;
        js["correlation"] = corr;
      }
      strategies.push_back(std::move(js));
    }
    json j{{"master_seed", cfg.master_seed},
           {"runs", cfg.runs},
           {"grid_n_freq", cfg.grid.n_freq},
           {"grid_n_rpm", cfg.grid.n_rpm},
           {"architectures", archs},
           {"strategies", strategies}};
    std::ofstream os((out / "report.json").string());
    if (!os) throw DataError("cannot write report.json");
    os << j.dump(2) << "\n";
  }

  // Proposed-selection model: the run with the best proxy AUROC within the
  // selected architecture (ties to the lowest run index).
  for (const auto& s : report.strategies) {
    if (s.name != "proposed" || s.selected_arch < 0) continue;
    int best_job = -1;
    for (size_t i = 0; i < report.jobs.size(); ++i) {
      if (report.jobs[i].arch_index != s.selected_arch) continue;
      if (best_job < 0 ||
          report.jobs[i].proxy_auroc > report.jobs[best_job].proxy_auroc) {
        best_job = static_cast<int>(i);
      }
    }
    const TrainedJob& job = report.jobs[best_job];
    const Architecture& arch = report.grid[job.arch_index];
    SaveModel(job.trained.params, (out / "selected" / "proposed.evae").string());
    json j = JobManifest(cfg, job, arch);
    json train_ids = json::array();
    for (size_t i : job.train_indices) train_ids.push_back(ds.healthy_ids[i]);
    json val_ids = json::array();
    for (size_t i : job.val_indices) val_ids.push_back(ds.healthy_ids[i]);
    j["train_ids"] = train_ids;
    j["val_ids"] = val_ids;
    j["dataset_dir"] = dataset_dir;
    std::ofstream js((out / "selected" / "proposed.json").string());
    js << j.dump(2) << "\n";
  }
}

void CmdExplain(const std::string& model_path, const std::string& dataset_dir,
                const std::vector<std::string>& sample_ids,
                const std::string& out_dir) {
  Model model = LoadModel(model_path);
  fs::path manifest_path(model_path);
  manifest_path.replace_extension(".json");
  if (!fs::exists(manifest_path)) {
    throw DataError("model companion manifest not found: " +
                    manifest_path.string());
  }
  json jm;
  {
    std::ifstream is(manifest_path.string());
    try {
      is >> jm;
    } catch (const json::exception& e) {
      throw DataError(std::string("bad model manifest: ") + e.what());
    }
  }
  if (!jm.contains("train_ids")) {
    throw DataError("model manifest lacks train_ids (needed for pixel stats)");
  }

  LoadedDataset ds = LoadDataset(dataset_dir);
  std::map<std::string, std::pair<const Spectrogram*, std::string>> by_id;
  for (size_t i = 0; i < ds.healthy.size(); ++i) {
    by_id[ds.healthy_ids[i]] = {&ds.healthy[i], "healthy"};
  }
  for (int k = 0; k < kNumFaultKinds; ++k) {
    for (size_t i = 0; i < ds.faults[k].size(); ++i) {
      by_id[ds.fault_ids[k][i]] = {&ds.faults[k][i], kDatasetNames[k]};
    }
  }

  std::vector<const Spectrogram*> train_set;
  for (const auto& id : jm["train_ids"]) {
    auto it = by_id.find(id.get<std::string>());
    if (it == by_id.end()) {
      throw DataError("train id not in dataset: " + id.get<std::string>());
    }
    train_set.push_back(it->second.first);
  }
  PixelStats stats = ComputePixelStats(model, train_set);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create output directory: " + out_dir);

  for (const auto& id : sample_ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw DataError("sample id not in dataset: " + id);
    const Spectrogram& spec = *it->second.first;
    std::vector<double> e = ErrorMap(model, spec);
    AnomalyMask mask = ComputeAnomalyMask(e, stats);
    std::vector<double> sal = Saliency(model, spec);
    const fs::path base = fs::path(out_dir) / id;
    SaveMapPgm(e, spec.grid(), base.string() + ".re.pgm");
    SaveMaskPgm(mask, base.string() + ".mask.pgm");
    SaveMapPgm(sal, spec.grid(), base.string() + ".saliency.pgm");
  }

  // Latents and raw scores over the whole dataset, for external embedding
  // and boxplot tooling.
  std::vector<LabeledSample> all;
  for (const auto& [id, entry] : by_id) {
    LabeledSample ls;
    ls.id = id;
    ls.spec = *entry.first;
    if (entry.second == "healthy") {
      ls.label = SampleLabel::kHealthy;
    } else {
      ls.label = SampleLabel::kFault;
      ls.detail = entry.second;
    }
    all.push_back(std::move(ls));
  }
  ExportLatents(model, all, (fs::path(out_dir) / "latents.csv").string());
  {
    std::ofstream os((fs::path(out_dir) / "scores.csv").string());
    if (!os) throw DataError("cannot write scores.csv");
    os << "id,label,score\n";
    for (const auto& s : all) {
      std::string label = s.label == SampleLabel::kHealthy ? "healthy"
                                                           : s.detail;
      os << s.id << "," << label << "," << Fmt(Score(model, s.spec), "%.9g")
         << "\n";
    }
  }
}

void CmdVerify(const std::string& dataset_dir) { VerifyDataset(dataset_dir); }

std::string CmdReport(const std::string& report_dir) {
  const fs::path path = fs::path(report_dir) / "report.json";
  std::ifstream is(path.string());
  if (!is) throw DataError("cannot open " + path.string());
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw DataError(std::string("bad report.json: ") + e.what());
  }
  std::ostringstream os;
  auto cell = [](const json& v) -> std::string {
    if (v.is_null()) return "-";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v.get<double>());
    return buf;
  };
  os << "Selected architectures\n";
  os << "  strategy        blocks  filters\n";
  for (const auto& s : j["strategies"]) {
    os << "  " << s["name"].get<std::string>();
    for (size_t i = s["name"].get<std::string>().size(); i < 14; ++i) os << ' ';
    if (s["selected"].is_null()) {
      os << "  -       -\n";
    } else {
      os << "  " << s["selected"]["n_blocks"].get<int>() << "       "
         << s["selected"]["n_filters"].get<int>() << "\n";
    }
  }
  os << "\nTest AUROC by strategy (mean +- std over runs)\n";
  os << "  strategy        imbalance    modulation   whine        wind      "
        "   pwm          all_faults\n";
  const char* kinds[6] = {"imbalance", "modulation", "whine",
                          "wind",      "pwm",        "all_faults"};
  for (const auto& s : j["strategies"]) {
    os << "  " << s["name"].get<std::string>();
    for (size_t i = s["name"].get<std::string>().size(); i < 14; ++i) os << ' ';
    for (const char* k : kinds) {
      std::string m = cell(s[std::string(k) + "_mean"]);
      std::string d = cell(s[std::string(k) + "_std"]);
      std::string v = m == "-" ? "-" : m + "+-" + d;
      os << "  " << v;
      for (size_t i = v.size(); i < 11; ++i) os << ' ';
    }
    os << "\n";
  }
  os << "\nCorrelation with test AUROC\n";
  for (const auto& s : j["strategies"]) {
    if (!s.contains("correlation")) continue;
    os << "  " << s["name"].get<std::string>();
    for (size_t i = s["name"].get<std::string>().size(); i < 14; ++i) os << ' ';
    for (const char* k : kinds) {
      std::string v = cell(s["correlation"][k]);
      os << "  " << v;
      for (size_t i = v.size(); i < 11; ++i) os << ' ';
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace evsound
