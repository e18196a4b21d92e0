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
#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "errors.h"
#include "explain.h"

using namespace evsound;

namespace {

Spectrogram Constant(const GridSpec& g, float v) {
  Spectrogram s(g, Domain::kNormalized);
  for (auto& x : s.values()) x = v;
  return s;
}

Model ZeroModel(int h, int w) {
  Rng rng(1);
  Model m = BuildModel<float>({1, 4}, h, w, rng);
  for (auto& t : m.tensors) t.Fill(0.0f);  // reconstruction is 0.5 everywhere
  return m;
}

}  // namespace

TEST_SUITE_BEGIN("explain");

TEST_CASE("pixel stats of a perfect model are zero") {
  GridSpec g{8, 4, 24.0f, 10000.0f};
  Model m = ZeroModel(8, 4);
  Spectrogram s = Constant(g, 0.5f);
  std::vector<const Spectrogram*> train = {&s, &s, &s};
  PixelStats stats = ComputePixelStats(m, train);
  for (double v : stats.mu) CHECK(v == 0.0);
  for (double v : stats.sigma) CHECK(v == 0.0);
}

TEST_CASE("pixel stats follow the population formulas") {
  GridSpec g{8, 4, 24.0f, 10000.0f};
  Model m = ZeroModel(8, 4);
  // Two samples with pixel errors 0 and 0.16 at every pixel: the population
  // mean is 0.08 and the population std is 0.08.
  Spectrogram a = Constant(g, 0.5f);
  Spectrogram b = Constant(g, 0.9f);
  std::vector<const Spectrogram*> train = {&a, &b};
  PixelStats stats = ComputePixelStats(m, train);
  for (size_t i = 0; i < stats.mu.size(); ++i) {
    CHECK(stats.mu[i] == doctest::Approx(0.08).epsilon(1e-6));
    CHECK(stats.sigma[i] == doctest::Approx(0.08).epsilon(1e-6));
  }
}

TEST_CASE("pixel stats match a brute-force two-pass oracle") {
  GridSpec g{8, 4, 24.0f, 10000.0f};
  Rng rng(5);
  Model m = BuildModel<float>({1, 4}, 8, 4, rng);
  std::vector<Spectrogram> data;
  for (int i = 0; i < 7; ++i) {
    Spectrogram s(g, Domain::kNormalized);
    for (auto& v : s.values()) v = static_cast<float>(rng.Uniform());
    data.push_back(std::move(s));
  }
  std::vector<const Spectrogram*> train;
  for (const auto& s : data) train.push_back(&s);
  PixelStats stats = ComputePixelStats(m, train);

  // Oracle: recompute from per-sample error maps with plain loops.
  std::vector<std::vector<double>> em;
  for (const auto* s : train) em.push_back(ErrorMap(m, *s));
  for (size_t px = 0; px < stats.mu.size(); ++px) {
    double mu = 0.0;
    for (const auto& e : em) mu += e[px];
    mu /= em.size();
    double var = 0.0;
    for (const auto& e : em) var += (e[px] - mu) * (e[px] - mu);
    var /= em.size();
    CHECK(stats.mu[px] == doctest::Approx(mu).epsilon(1e-12));
    CHECK(stats.sigma[px] ==
          doctest::Approx(std::sqrt(var)).epsilon(1e-12));
  }
}

TEST_CASE("anomaly mask applies the strict three-sigma rule") {
  GridSpec g{2, 2, 24.0f, 10000.0f};
  PixelStats stats;
  stats.grid = g;
  stats.mu = {1.0, 1.0, 1.0, 1.0};
  stats.sigma = {0.1, 0.1, 0.1, 0.0};
  stats.n_samples = 10;
  // E = mu everywhere: all zeros.
  AnomalyMask m0 = ComputeAnomalyMask({1.0, 1.0, 1.0, 1.0}, stats);
  CHECK(m0.positive_count == 0);
  // E = mu + 4 sigma fires; exactly 3 sigma does not (strict inequality).
  AnomalyMask m1 = ComputeAnomalyMask({1.4, 1.3, 0.7, 1.0}, stats);
  CHECK(m1.mask[0] == 1);   // +4 sigma
  CHECK(m1.mask[1] == 0);   // exactly +3 sigma
  CHECK(m1.mask[2] == 0);   // exactly -3 sigma
  CHECK(m1.mask[3] == 0);   // sigma = 0 and E == mu
  // sigma = 0 pixels fire on any deviation.
  AnomalyMask m2 = ComputeAnomalyMask({1.0, 1.0, 1.0, 1.0001}, stats);
  CHECK(m2.mask[3] == 1);
}

TEST_CASE("anomaly mask is scale-consistent") {
  GridSpec g{2, 2, 24.0f, 10000.0f};
  PixelStats stats;
  stats.grid = g;
  stats.mu = {0.5, 1.0, 2.0, 3.0};
  stats.sigma = {0.1, 0.2, 0.0, 0.3};
  std::vector<double> e = {0.9, 1.1, 2.5, 3.05};
  AnomalyMask base = ComputeAnomalyMask(e, stats);
  const double c = 7.25;
  PixelStats scaled = stats;
  for (auto& v : scaled.mu) v *= c;
  for (auto& v : scaled.sigma) v *= c;
  std::vector<double> es = e;
  for (auto& v : es) v *= c;
  AnomalyMask after = ComputeAnomalyMask(es, scaled);
  CHECK(base.mask == after.mask);
}

TEST_CASE("saliency of a perfect reconstruction is zero and otherwise non-negative") {
  GridSpec g{8, 4, 24.0f, 10000.0f};
  Model zero = ZeroModel(8, 4);
  Spectrogram fix = Constant(g, 0.5f);
  for (double v : Saliency(zero, fix)) CHECK(v == 0.0);

  Rng rng(7);
  Model m = BuildModel<float>({1, 4}, 8, 4, rng);
  Spectrogram s(g, Domain::kNormalized);
  for (auto& v : s.values()) v = static_cast<float>(rng.Uniform());
  for (double v : Saliency(m, s)) CHECK(v >= 0.0);
}

TEST_CASE("saliency matches finite differences of the loss") {
  Rng rng(8);
  ModelT<double> m = BuildModel<double>({1, 3}, 8, 4, rng);
  std::vector<double> x(8 * 4);
  Rng data_rng(9);
  for (auto& v : x) v = data_rng.Uniform();
  BatchGradients<double> bg = LossAndGradients(m, {x.data()}, true);
  Workspace<double> ws = Workspace<double>::Create(m);
  const double eps = 1e-6;
  for (size_t i = 0; i < x.size(); ++i) {
    double saved = x[i];
    x[i] = saved + eps;
    Forward(m, x.data(), ws);
    double lp = SampleMse(m, x.data(), ws);
    x[i] = saved - eps;
    Forward(m, x.data(), ws);
    double lm = SampleMse(m, x.data(), ws);
    x[i] = saved;
    double fd = std::abs((lp - lm) / (2.0 * eps));
    double an = std::abs(bg.input_grads[0][i]);
    double denom = std::max({fd, an, 1e-8});
    CHECK(std::abs(fd - an) / denom < 1e-4);
  }
}

TEST_CASE("latent export writes one row per sample and parses back") {
  GridSpec g{8, 4, 24.0f, 10000.0f};
  Rng rng(10);
  Model m = BuildModel<float>({1, 4}, 8, 4, rng);
  std::vector<LabeledSample> samples;
  for (int i = 0; i < 3; ++i) {
    LabeledSample ls;
    ls.id = i < 2 ? "same" : "other";  // identical samples -> identical rows
    ls.label = SampleLabel::kHealthy;
    ls.spec = Constant(g, 0.25f);
    samples.push_back(std::move(ls));
  }
  auto path = std::filesystem::temp_directory_path() / "evs_latents.csv";
  ExportLatents(m, samples, path.string());
  std::ifstream is(path);
  std::string header;
  std::getline(is, header);
  size_t latent_len = m.LatentLength();
  size_t cols = 1 + std::count(header.begin(), header.end(), ',');
  CHECK(cols == 2 + latent_len);
  std::vector<std::string> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty()) rows.push_back(line);
  }
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == rows[1]);  // identical inputs, identical rows

  // Parse back the latent values of row 0 and compare at f32 precision.
  std::vector<float> z = Encode(m, samples[0].spec);
  std::stringstream ss(rows[0]);
  std::string cell;
  std::getline(ss, cell, ',');  // id
  std::getline(ss, cell, ',');  // label
  for (float expected : z) {
    REQUIRE(std::getline(ss, cell, ','));
    CHECK(std::abs(std::stod(cell) - expected) <= 1e-6 * std::abs(expected) + 1e-12);
  }
  std::filesystem::remove(path);
}

TEST_SUITE_END();
