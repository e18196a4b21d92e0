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

#include "dataset.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "errors.h"
#include "rasterize.h"
#include "rng.h"
#include "synth.h"
#include "thread_pool.h"

namespace evsound {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr uint64_t kRunupTag = 0x72756e7570ULL;
constexpr uint64_t kOrderRandTag = 0x6f726472ULL;
constexpr uint64_t kBroadbandRandTag = 0x62627264ULL;
constexpr uint64_t kFaultSpecTag = 0x6673706bULL;
constexpr uint64_t kRenderTag = 0x726e6472ULL;

std::string HashString(uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string SampleId(const std::string& label, int index) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%06d", label.c_str(), index);
  return buf;
}

json RecordToJson(const ManifestRecord& r) {
  json j{{"id", r.id},         {"label", r.label}, {"gain_db", r.gain_db},
         {"seed", r.seed},     {"path", r.path},   {"hash", r.hash},
         {"format", r.format}};
  if (r.window.has_value()) {
    j["window"] = {r.window->first, r.window->second};
  } else {
    j["window"] = nullptr;
  }
  return j;
}

ManifestRecord RecordFromJson(const json& j) {
  ManifestRecord r;
  r.id = j.at("id").get<std::string>();
  r.label = j.at("label").get<std::string>();
  r.gain_db = j.at("gain_db").get<double>();
  if (!j.at("window").is_null()) {
    auto w = j.at("window").get<std::vector<double>>();
    if (w.size() != 2) throw DataError("manifest window must have 2 entries");
    r.window = {w[0], w[1]};
  }
  r.seed = j.at("seed").get<uint64_t>();
  r.path = j.at("path").get<std::string>();
  r.hash = j.at("hash").get<std::string>();
  r.format = j.at("format").get<int>();
  return r;
}

}  // namespace

uint64_t HashFile(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open for hashing: " + path);
  uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (is) {
    is.read(buf, sizeof(buf));
    std::streamsize got = is.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

uint64_t SampleSeed(uint64_t master_seed, int label_class, int index) {
  return Rng(master_seed)
      .Derive(0x67656eULL)  // dataset generation stream
      .Derive(static_cast<uint64_t>(label_class),
              static_cast<uint64_t>(index))
      .seed();
}

SoundModel BuildSampleModel(const ExperimentConfig& cfg, uint64_t sample_seed,
                            const std::optional<FaultKind>& fault_kind) {
  Rng rng(sample_seed);
  SoundModel model;
  model.sample_seed = sample_seed;
  Rng runup_rng = rng.Derive(kRunupTag);
  model.runup = RunUpProfile::Sample(runup_rng, cfg.sqe.runup);
  for (size_t i = 0; i < cfg.sqe.order_numbers.size(); ++i) {
    OrderComponent oc;
    oc.order_number = cfg.sqe.order_numbers[i];
    oc.base_profile_db = cfg.sqe.order_profiles[i];
    model.orders.push_back(std::move(oc));
  }
  model.broadband.push_back(cfg.sqe.broadband);

  Rng order_rng = rng.Derive(kOrderRandTag);
  model = RandomizeOrders(model, order_rng, cfg.sqe.order_fluctuation_peak,
                          cfg.sqe.order_fluctuation_band_lo_hz,
                          cfg.sqe.order_fluctuation_band_hi_hz);
  Rng bb_rng = rng.Derive(kBroadbandRandTag);
  model = RandomizeBroadband(model, bb_rng, cfg.sqe.broadband_randomization_db,
                             cfg.sqe.broadband_channel_width_hz);

  if (fault_kind.has_value()) {
    Rng fault_rng = rng.Derive(kFaultSpecTag);
    FaultSpec fault = MakeFault(*fault_kind, fault_rng, AmplitudePolicy{});
    model = ApplyFault(model, fault, cfg.sqe.faults);
  }
  return model;
}

void GenerateDataset(const ExperimentConfig& cfg, bool write_wav) {
  cfg.Validate();
  const fs::path out_dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(out_dir / "spectrograms", ec);
  if (ec) throw DataError("cannot create output directory: " + cfg.out_dir);
  if (write_wav) fs::create_directories(out_dir / "wav");

  struct PlannedSample {
    std::string id;
    std::string label;
    int label_class;
    int index;
  };
  std::vector<PlannedSample> plan;
  for (int i = 0; i < cfg.dataset.healthy; ++i) {
    plan.push_back({SampleId("healthy", i), "healthy", 0, i});
  }
  for (int k = 0; k < kNumFaultKinds; ++k) {
    const std::string label = FaultKindName(static_cast<FaultKind>(k));
    for (int i = 0; i < cfg.dataset.per_fault; ++i) {
      plan.push_back({SampleId(label, i), label, k + 1, i});
    }
  }

  std::vector<ManifestRecord> records(plan.size());
  RunParallel(plan.size(), cfg.n_threads, [&](size_t idx) {
    const PlannedSample& p = plan[idx];
    const uint64_t seed = SampleSeed(cfg.master_seed, p.label_class, p.index);
    std::optional<FaultKind> kind;
    if (p.label_class > 0) kind = static_cast<FaultKind>(p.label_class - 1);
    SoundModel model = BuildSampleModel(cfg, seed, kind);

    Spectrogram spec = Preprocess(Rasterize(model, cfg.grid));
    const std::string rel = "spectrograms/" + p.id + ".evspc";
    SaveSpectrogram(spec, (out_dir / rel).string());

    if (write_wav) {
      Rng render_rng = Rng(seed).Derive(kRenderTag);
      TimeSignal sig = RenderTime(model, cfg.sample_rate_hz, render_rng);
      SaveWav(sig, (out_dir / "wav" / (p.id + ".wav")).string());
    }

    ManifestRecord r;
    r.id = p.id;
    r.label = p.label;
    if (model.fault.has_value()) {
      r.gain_db = model.fault->gain_db;
      if (model.fault->kind == FaultKind::kModulation ||
          model.fault->kind == FaultKind::kWhine ||
          model.fault->kind == FaultKind::kWind) {
        r.window = {model.fault->window_start, model.fault->window_end};
      }
    }
    r.seed = seed;
    r.path = rel;
    r.hash = HashString(HashFile((out_dir / rel).string()));
    records[idx] = std::move(r);
  });

  Manifest manifest;
  manifest.records = std::move(records);
  SaveManifest(manifest, cfg.out_dir);
  SaveConfigFile(cfg, (out_dir / "config.json").string());
}

void SaveManifest(const Manifest& manifest, const std::string& dataset_dir) {
  const std::string path =
      (fs::path(dataset_dir) / "manifest.jsonl").string();
  std::ofstream os(path);
  if (!os) throw DataError("cannot open for writing: " + path);
  for (const auto& r : manifest.records) {
    os << RecordToJson(r).dump() << "\n";
  }
  if (!os) throw DataError("short write: " + path);
}

Manifest LoadManifest(const std::string& dataset_dir) {
  const std::string path =
      (fs::path(dataset_dir) / "manifest.jsonl").string();
  std::ifstream is(path);
  if (!is) throw DataError("cannot open manifest: " + path);
  Manifest manifest;
  std::string line;
  size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      manifest.records.push_back(RecordFromJson(json::parse(line)));
    } catch (const json::exception& e) {
      throw DataError("manifest parse error at line " +
                      std::to_string(line_no) + ": " + e.what());
    }
  }
  if (manifest.records.empty()) throw DataError("empty manifest: " + path);
  return manifest;
}

void VerifyDataset(const std::string& dataset_dir) {
  Manifest manifest = LoadManifest(dataset_dir);
  std::set<std::string> ids;
  std::optional<GridSpec> grid;
  for (const auto& r : manifest.records) {
    if (!ids.insert(r.id).second) {
      throw DataError("duplicate sample id: " + r.id);
    }
    if (r.label != "healthy") FaultKindFromName(r.label);
    const std::string full = (fs::path(dataset_dir) / r.path).string();
    if (!fs::exists(full)) throw DataError("missing file: " + r.path);
    if (HashString(HashFile(full)) != r.hash) {
      throw DataError("hash mismatch: " + r.path);
    }
    Spectrogram spec = LoadSpectrogram(full);
    if (spec.domain() != Domain::kNormalized) {
      throw DataError("spectrogram not normalized: " + r.path);
    }
    if (grid.has_value()) {
      if (!(spec.grid() == *grid)) {
        throw DataError("grid mismatch: " + r.path);
      }
    } else {
      grid = spec.grid();
    }
    for (float v : spec.values()) {
      if (!(v >= 0.0f && v <= 1.0f)) {
        throw DataError("normalized value out of [0,1]: " + r.path);
      }
    }
  }
}

LoadedDataset LoadDataset(const std::string& dataset_dir) {
  Manifest manifest = LoadManifest(dataset_dir);
  LoadedDataset ds;
  bool have_grid = false;
  for (const auto& r : manifest.records) {
    const std::string full = (fs::path(dataset_dir) / r.path).string();
    Spectrogram spec = LoadSpectrogram(full);
    if (!have_grid) {
      ds.grid = spec.grid();
      have_grid = true;
    } else if (!(spec.grid() == ds.grid)) {
      throw DataError("grid mismatch in dataset: " + r.path);
    }
    if (r.label == "healthy") {
      ds.healthy.push_back(std::move(spec));
      ds.healthy_ids.push_back(r.id);
    } else {
      int k = static_cast<int>(FaultKindFromName(r.label));
      ds.faults[k].push_back(std::move(spec));
      ds.fault_ids[k].push_back(r.id);
    }
  }
  if (ds.healthy.empty()) throw DataError("dataset has no healthy samples");
  return ds;
}

}  // namespace evsound
