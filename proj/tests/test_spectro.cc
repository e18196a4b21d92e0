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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "config.h"
#include "dataset.h"
#include "errors.h"
#include "rasterize.h"
#include "spectrogram.h"

using namespace evsound;

namespace {

SoundModel SingleOrderModel(double order, double level_db) {
  SoundModel m;
  m.runup = RunUpProfile::FromKnots({0.0, 10.0, 20.0}, {0.0, 5000.0, 10000.0});
  OrderComponent oc;
  oc.order_number = order;
  oc.base_profile_db.x = {0.0, 10000.0};
  oc.base_profile_db.y_db = {level_db, level_db};
  m.orders.push_back(oc);
  return m;
}

}  // namespace

TEST_SUITE_BEGIN("spectro");

TEST_CASE("preprocess clips to [0,120] dB and scales") {
  GridSpec g{2, 2, 24.0f, 10000.0f};
  Spectrogram s(g, Domain::kDecibel);
  s.At(0, 0) = 130.0f;
  s.At(0, 1) = -5.0f;
  s.At(1, 0) = 60.0f;
  s.At(1, 1) = 120.0f;
  Spectrogram n = Preprocess(s);
  CHECK(n.domain() == Domain::kNormalized);
  CHECK(n.At(0, 0) == 1.0f);
  CHECK(n.At(0, 1) == 0.0f);
  CHECK(n.At(1, 0) == 0.5f);
  CHECK(n.At(1, 1) == 1.0f);
}

TEST_CASE("preprocess is idempotent and monotone") {
  GridSpec g{4, 4, 24.0f, 10000.0f};
  Spectrogram s(g, Domain::kDecibel);
  Rng rng(5);
  for (auto& v : s.values()) v = static_cast<float>(rng.Uniform(-20.0, 140.0));
  Spectrogram once = Preprocess(s);
  Spectrogram twice = Preprocess(once);
  CHECK(once.values() == twice.values());
  for (int i = 0; i < 200; ++i) {
    double a = rng.Uniform(-20.0, 140.0);
    double b = a + rng.Uniform(0.0, 20.0);
    Spectrogram sa(GridSpec{1, 1, 1.0f, 1.0f}, Domain::kDecibel);
    Spectrogram sb = sa;
    sa.At(0, 0) = static_cast<float>(a);
    sb.At(0, 0) = static_cast<float>(b);
    CHECK(Preprocess(sa).At(0, 0) <= Preprocess(sb).At(0, 0));
  }
}

TEST_CASE("order tracks land at order * rpm / 60") {
  GridSpec g = GridSpec::Desk();
  SoundModel m = SingleOrderModel(4.0, 60.0);
  Spectrogram s = Rasterize(m, g);
  // Column nearest 6000 rpm: the only lit bins sit within 15 Hz of the
  // track center 4 * rpm / 60.
  int j = 38;
  double rpm = g.RpmAt(j);
  double fc = 4.0 * rpm / 60.0;
  for (uint32_t i = 0; i < g.n_freq; ++i) {
    if (s.At(i, j) != 0.0f) {
      CHECK(std::abs(g.FreqAt(i) - fc) <= 15.0);
    }
  }
}

TEST_CASE("hann cross-section preserves the track power per column") {
  GridSpec g = GridSpec::Desk();
  SoundModel m = SingleOrderModel(8.0, 60.0);
  Spectrogram s = Rasterize(m, g);
  const double expected = std::pow(10.0, 60.0 / 10.0);
  // Interior columns only; at very low rpm part of the band clips below 0 Hz.
  for (int j = 8; j < static_cast<int>(g.n_rpm); j += 7) {
    double sum = 0.0;
    for (uint32_t i = 0; i < g.n_freq; ++i) {
      if (s.At(i, j) != 0.0f) sum += std::pow(10.0, s.At(i, j) / 10.0);
    }
    CHECK(sum == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("raster adds component powers linearly") {
  GridSpec g = GridSpec::Desk();
  SoundModel a = SingleOrderModel(4.0, 60.0);
  SoundModel b = SingleOrderModel(12.0, 55.0);
  SoundModel both = a;
  both.orders.push_back(b.orders[0]);
  Spectrogram ra = Rasterize(a, g);
  Spectrogram rb = Rasterize(b, g);
  Spectrogram rboth = Rasterize(both, g);
  for (size_t i = 0; i < ra.values().size(); ++i) {
    double pa = ra.values()[i] != 0.0f
                    ? std::pow(10.0, ra.values()[i] / 10.0)
                    : 0.0;
    double pb = rb.values()[i] != 0.0f
                    ? std::pow(10.0, rb.values()[i] / 10.0)
                    : 0.0;
    double pc = rboth.values()[i] != 0.0f
                    ? std::pow(10.0, rboth.values()[i] / 10.0)
                    : 0.0;
    if (pa + pb > 0.0) {
      CHECK(pc == doctest::Approx(pa + pb).epsilon(1e-5));
    } else {
      CHECK(pc == 0.0);
    }
  }
}

TEST_CASE("faulty raster differs from its base only inside the mask") {
  ExperimentConfig cfg = DeskPreset();
  for (int k = 0; k < kNumFaultKinds; ++k) {
    SoundModel healthy = BuildSampleModel(cfg, 100 + k, std::nullopt);
    Rng rng(200 + k);
    FaultSpec f = MakeFault(static_cast<FaultKind>(k), rng, AmplitudePolicy{});
    SoundModel faulty = ApplyFault(healthy, f, cfg.sqe.faults);
    Spectrogram rh = Rasterize(healthy, cfg.grid);
    Spectrogram rf = Rasterize(faulty, cfg.grid);
    FaultMask mask = ComputeFaultMask(f, cfg.grid);
    for (uint32_t i = 0; i < cfg.grid.n_freq; ++i) {
      for (uint32_t j = 0; j < cfg.grid.n_rpm; ++j) {
        if (rh.At(i, j) != rf.At(i, j)) {
          CHECK(mask.At(i, j));
        }
      }
    }
    CHECK(mask.pixel_count > 0);
  }
}

TEST_CASE("whine and modulation masks grow with the rpm window width") {
  GridSpec g = GridSpec::Paper();
  FaultSpec narrow{FaultKind::kWhine, 12.0, 6500.0, 7500.0};
  FaultSpec mid{FaultKind::kWhine, 12.0, 6000.0, 8000.0};
  FaultSpec wide{FaultKind::kWhine, 12.0, 5500.0, 8500.0};
  int64_t c_narrow = ComputeFaultMask(narrow, g).pixel_count;
  int64_t c_mid = ComputeFaultMask(mid, g).pixel_count;
  int64_t c_wide = ComputeFaultMask(wide, g).pixel_count;
  CHECK(c_narrow < c_mid);
  CHECK(c_mid < c_wide);
}

TEST_CASE("wind mask is a frequency band across all columns") {
  GridSpec g = GridSpec::Desk();
  FaultSpec f{FaultKind::kWind, 0.0, 4250.0, 5250.0};
  FaultMask mask = ComputeFaultMask(f, g);
  for (uint32_t i = 0; i < g.n_freq; ++i) {
    bool in_band = g.FreqAt(i) > 4250.0 && g.FreqAt(i) < 5250.0;
    for (uint32_t j = 0; j < g.n_rpm; ++j) {
      CHECK(mask.At(i, j) == in_band);
    }
  }
}

TEST_CASE("spectrogram file round-trip is exact") {
  GridSpec g{8, 4, 24.0f, 10000.0f};
  Spectrogram s(g, Domain::kNormalized);
  Rng rng(17);
  for (auto& v : s.values()) v = static_cast<float>(rng.Uniform());
  auto path = std::filesystem::temp_directory_path() / "evs_test_spec.evspc";
  SaveSpectrogram(s, path.string());
  Spectrogram loaded = LoadSpectrogram(path.string());
  CHECK(loaded.grid() == g);
  CHECK(loaded.domain() == Domain::kNormalized);
  CHECK(loaded.values() == s.values());
  std::filesystem::remove(path);
}

TEST_CASE("corrupt spectrogram files are rejected") {
  auto path = std::filesystem::temp_directory_path() / "evs_test_bad.evspc";
  {
    std::ofstream os(path, std::ios::binary);
    os << "NOTMAGIC garbage";
  }
  CHECK_THROWS_AS(LoadSpectrogram(path.string()), DataError);
  std::filesystem::remove(path);
}

TEST_CASE("pgm export writes an 8-bit P5 raster") {
  GridSpec g{8, 4, 24.0f, 10000.0f};
  Spectrogram s(g, Domain::kNormalized);
  for (auto& v : s.values()) v = 0.5f;
  auto path = std::filesystem::temp_directory_path() / "evs_test.pgm";
  SavePgmHeatmap(s, path.string());
  std::ifstream is(path, std::ios::binary);
  std::string magic, dims1, dims2, maxval;
  is >> magic >> dims1 >> dims2 >> maxval;
  CHECK(magic == "P5");
  CHECK(dims1 == "4");
  CHECK(dims2 == "8");
  CHECK(maxval == "255");
  is.get();
  char px;
  is.get(px);
  CHECK(static_cast<unsigned char>(px) == 128);  // round(255 * 0.5)
  std::filesystem::remove(path);
}

TEST_SUITE_END();
