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

#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "config.h"
#include "dataset.h"
#include "errors.h"

using namespace evsound;
namespace fs = std::filesystem;

namespace {

// Small config for fast dataset tests.
ExperimentConfig TinyConfig(const std::string& out_dir, uint64_t seed = 11) {
  ExperimentConfig cfg = DeskPreset();
  cfg.grid = {32, 16, 192.0f, 10000.0f};
  cfg.dataset = {8, 2};
  cfg.split = {4, 2, 2, 2};
  cfg.arch_grid = {{1, 2}};
  cfg.runs = 1;
  cfg.train.max_epochs = 1;
  cfg.master_seed = seed;
  cfg.out_dir = out_dir;
  cfg.n_threads = 2;
  return cfg;
}

fs::path TempDir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE_BEGIN("dataset");

TEST_CASE("generation writes the configured counts and verifies clean") {
  fs::path dir = TempDir("evs_ds_counts");
  ExperimentConfig cfg = TinyConfig(dir.string());
  GenerateDataset(cfg, /*write_wav=*/false);

  Manifest manifest = LoadManifest(dir.string());
  CHECK(manifest.records.size() == 8 + 5 * 2);
  int healthy = 0, faulty = 0;
  for (const auto& r : manifest.records) {
    if (r.label == "healthy") ++healthy;
    else ++faulty;
  }
  CHECK(healthy == 8);
  CHECK(faulty == 10);
  CHECK_NOTHROW(VerifyDataset(dir.string()));

  LoadedDataset ds = LoadDataset(dir.string());
  CHECK(ds.healthy.size() == 8);
  for (int k = 0; k < kNumFaultKinds; ++k) CHECK(ds.faults[k].size() == 2);
  CHECK(ds.grid == cfg.grid);
  fs::remove_all(dir);
}

TEST_CASE("same seed regenerates byte-identical spectrograms") {
  fs::path dir_a = TempDir("evs_ds_det_a");
  fs::path dir_b = TempDir("evs_ds_det_b");
  GenerateDataset(TinyConfig(dir_a.string()), false);
  GenerateDataset(TinyConfig(dir_b.string()), false);
  Manifest ma = LoadManifest(dir_a.string());
  Manifest mb = LoadManifest(dir_b.string());
  REQUIRE(ma.records.size() == mb.records.size());
  for (size_t i = 0; i < ma.records.size(); ++i) {
    CHECK(ma.records[i].hash == mb.records[i].hash);
    CHECK(ma.records[i].seed == mb.records[i].seed);
  }
  // Different seed, different content.
  fs::path dir_c = TempDir("evs_ds_det_c");
  GenerateDataset(TinyConfig(dir_c.string(), 12), false);
  Manifest mc = LoadManifest(dir_c.string());
  bool any_diff = false;
  for (size_t i = 0; i < ma.records.size(); ++i) {
    if (ma.records[i].hash != mc.records[i].hash) any_diff = true;
  }
  CHECK(any_diff);
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  fs::remove_all(dir_c);
}

TEST_CASE("verify detects corruption") {
  fs::path dir = TempDir("evs_ds_corrupt");
  GenerateDataset(TinyConfig(dir.string()), false);
  Manifest manifest = LoadManifest(dir.string());
  fs::path victim = dir / manifest.records[3].path;
  {
    std::fstream f(victim, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(64);
    char b = 0x7f;
    f.write(&b, 1);
  }
  CHECK_THROWS_AS(VerifyDataset(dir.string()), DataError);
  fs::remove_all(dir);
}

TEST_CASE("fault manifest records carry gains and windows") {
  fs::path dir = TempDir("evs_ds_windows");
  GenerateDataset(TinyConfig(dir.string()), false);
  Manifest manifest = LoadManifest(dir.string());
  for (const auto& r : manifest.records) {
    if (r.label == "healthy") {
      CHECK(!r.window.has_value());
      continue;
    }
    FaultKind kind = FaultKindFromName(r.label);
    int k = static_cast<int>(kind);
    CHECK(r.gain_db >= kFaultGainRangeDb[k][0]);
    CHECK(r.gain_db <= kFaultGainRangeDb[k][1]);
    if (kind == FaultKind::kModulation || kind == FaultKind::kWhine ||
        kind == FaultKind::kWind) {
      REQUIRE(r.window.has_value());
      CHECK(r.window->first < r.window->second);
    }
  }
  fs::remove_all(dir);
}

TEST_CASE("config json round-trips and rejects unknown keys") {
  ExperimentConfig desk = DeskPreset();
  std::string dumped = ConfigToJson(desk);
  ExperimentConfig back = ApplyConfigJson(PaperPreset(), dumped);
  CHECK(back.grid == desk.grid);
  CHECK(back.dataset.healthy == desk.dataset.healthy);
  CHECK(back.arch_grid.size() == desk.arch_grid.size());
  CHECK(back.train.max_epochs == desk.train.max_epochs);
  CHECK(back.sqe.order_numbers == desk.sqe.order_numbers);

  CHECK_THROWS_AS(ApplyConfigJson(desk, "{\"no_such_key\": 1}"), ConfigError);
  CHECK_THROWS_AS(ApplyConfigJson(desk, "not json"), ConfigError);
  CHECK_THROWS_AS(ApplyConfigJson(desk, "{\"split\": {\"train\": 100000}}"),
                  ConfigError);
}

TEST_CASE("preset override via json") {
  ExperimentConfig cfg = ApplyConfigJson(
      DeskPreset(), "{\"preset\": \"paper\", \"runs\": 5}");
  CHECK(cfg.grid == GridSpec::Paper());
  CHECK(cfg.runs == 5);
  CHECK(cfg.dataset.healthy == 1200);
}

TEST_CASE("desk and paper presets validate") {
  CHECK_NOTHROW(DeskPreset().Validate());
  CHECK_NOTHROW(PaperPreset().Validate());
  CHECK_THROWS_AS(PresetByName("nope"), ConfigError);
}

TEST_SUITE_END();
