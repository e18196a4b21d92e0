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

#include <doctest.h>

#include "autoencoder.h"
#include "errors.h"
#include "layers.h"
#include "oracles.h"

using namespace evsound;

namespace {

// Batch-mean MSE computed through the public forward path only.
template <typename T>
double LossOf(const ModelT<T>& m, const std::vector<std::vector<T>>& batch) {
  Workspace<T> ws = Workspace<T>::Create(m);
  double loss = 0.0;
  for (const auto& x : batch) {
    Forward(m, x.data(), ws);
    loss += SampleMse(m, x.data(), ws) / batch.size();
  }
  return loss;
}

std::vector<std::vector<double>> RandomBatch(int n, int h, int w,
                                             uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> batch(n);
  for (auto& x : batch) {
    x.resize(static_cast<size_t>(h) * w);
    for (auto& v : x) v = rng.Uniform();
  }
  return batch;
}

Spectrogram SpecFrom(const std::vector<float>& vals, int h, int w) {
  Spectrogram s(GridSpec{static_cast<uint32_t>(h), static_cast<uint32_t>(w),
                         24.0f, 10000.0f},
                Domain::kNormalized);
  s.values() = vals;
  return s;
}

}  // namespace

TEST_SUITE_BEGIN("autoencoder");

TEST_CASE("latent shapes follow the block count") {
  Rng rng(1);
  ModelT<float> m1 = BuildModel<float>({1, 4}, 256, 64, rng);
  CHECK(m1.LatentDims() == std::vector<int>{4, 128, 32});
  CHECK(m1.LatentLength() == 16384);
  ModelT<float> m7 = BuildModel<float>({7, 32}, 1536, 384, rng);
  CHECK(m7.LatentDims() == std::vector<int>{32, 12, 3});
  CHECK_THROWS_AS(BuildModel<float>({3, 4}, 30, 30, rng), ConfigError);
}

TEST_CASE("forward restores the input shape for the full architecture grid") {
  Rng rng(2);
  for (int n = 1; n <= 7; ++n) {
    for (int f : {4, 8, 16, 32}) {
      ModelT<float> m = BuildModel<float>({n, f}, 256, 128, rng);
      Workspace<float> ws = Workspace<float>::Create(m);
      std::vector<float> x(256 * 128, 0.25f);
      Forward(m, x.data(), ws);
      CHECK(ws.output.dims == std::vector<int>{1, 256, 128});
      CHECK(Encode(m, SpecFrom(std::vector<float>(256 * 128, 0.25f), 256, 128))
                .size() == m.LatentLength());
    }
  }
}

TEST_CASE("zero weights give sigmoid(0) = 0.5 everywhere") {
  Rng rng(3);
  ModelT<float> m = BuildModel<float>({2, 4}, 16, 8, rng);
  for (auto& t : m.tensors) t.Fill(0.0f);
  Workspace<float> ws = Workspace<float>::Create(m);
  std::vector<float> x(16 * 8, 0.0f);
  Forward(m, x.data(), ws);
  for (float v : ws.output.data) CHECK(v == 0.5f);
}

TEST_CASE("forward outputs stay inside (0,1)") {
  Rng rng(4);
  ModelT<float> m = BuildModel<float>({2, 8}, 32, 16, rng);
  std::vector<float> x(32 * 16);
  Rng data_rng(5);
  for (auto& v : x) v = static_cast<float>(data_rng.Uniform());
  Workspace<float> ws = Workspace<float>::Create(m);
  Forward(m, x.data(), ws);
  for (float v : ws.output.data) {
    CHECK(v > 0.0f);
    CHECK(v < 1.0f);
  }
}

TEST_CASE("conv/maxpool/tconv forward match naive nested-loop oracles") {
  Rng rng(6);
  const int ci = 3, co = 2, h = 6, w = 8;
  std::vector<double> in(ci * h * w), weight(co * ci * 9), bias(co);
  for (auto& v : in) v = rng.Uniform(-1.0, 1.0);
  for (auto& v : weight) v = rng.Uniform(-1.0, 1.0);
  for (auto& v : bias) v = rng.Uniform(-1.0, 1.0);
  std::vector<double> out(co * h * w), expected;
  Conv3x3Forward(in.data(), ci, h, w, weight.data(), bias.data(), co,
                 out.data());
  oracles::NaiveConv3x3(in, ci, h, w, weight, bias, co, &expected);
  for (size_t i = 0; i < out.size(); ++i) {
    CHECK(out[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  }

  std::vector<double> pooled(ci * (h / 2) * (w / 2)), pooled_expected;
  std::vector<int32_t> argmax(ci * (h / 2) * (w / 2));
  MaxPool2x2Forward(in.data(), ci, h, w, pooled.data(), argmax.data());
  oracles::NaiveMaxPool(in, ci, h, w, &pooled_expected);
  CHECK(pooled == pooled_expected);

  std::vector<double> tw(ci * co * 4), tb(co), tout(co * 2 * h * 2 * w),
      texpected;
  for (auto& v : tw) v = rng.Uniform(-1.0, 1.0);
  for (auto& v : tb) v = rng.Uniform(-1.0, 1.0);
  TConv2x2Forward(in.data(), ci, h, w, tw.data(), tb.data(), co, tout.data());
  oracles::NaiveTConv2x2(in, ci, h, w, tw, tb, co, &texpected);
  for (size_t i = 0; i < tout.size(); ++i) {
    CHECK(tout[i] == doctest::Approx(texpected[i]).epsilon(1e-12));
  }
}

TEST_CASE("maxpool picks the window max and routes ties to the first") {
  std::vector<float> in = {1.0f, 2.0f, 3.0f, 4.0f};  // one 2x2 window
  std::vector<float> out(1);
  std::vector<int32_t> argmax(1);
  MaxPool2x2Forward(in.data(), 1, 2, 2, out.data(), argmax.data());
  CHECK(out[0] == 4.0f);
  CHECK(argmax[0] == 3);

  std::vector<float> ties = {5.0f, 5.0f, 5.0f, 5.0f};
  MaxPool2x2Forward(ties.data(), 1, 2, 2, out.data(), argmax.data());
  CHECK(argmax[0] == 0);
  std::vector<float> gout = {2.5f};
  std::vector<float> gin(4);
  MaxPool2x2Backward(argmax.data(), gout.data(), 1, 2, 2, gin.data());
  CHECK(gin[0] == 2.5f);
  CHECK(gin[1] == 0.0f);
  CHECK(gin[2] == 0.0f);
  CHECK(gin[3] == 0.0f);
}

TEST_CASE("exact reconstruction gives zero loss and zero input gradient") {
  Rng rng(7);
  ModelT<double> m = BuildModel<double>({1, 4}, 8, 4, rng);
  for (auto& t : m.tensors) t.Fill(0.0);
  std::vector<double> x(8 * 4, 0.5);
  BatchGradients<double> bg = LossAndGradients(m, {x.data()}, true);
  CHECK(bg.loss == 0.0);
  for (double g : bg.input_grads[0]) CHECK(g == 0.0);
}

TEST_CASE("parameter gradients match central finite differences") {
  Rng rng(8);
  ModelT<double> m = BuildModel<double>({2, 3}, 16, 8, rng);
  auto batch = RandomBatch(2, 16, 8, 9);
  std::vector<const double*> ptrs;
  for (const auto& x : batch) ptrs.push_back(x.data());
  BatchGradients<double> bg = LossAndGradients(m, ptrs, false);

  Rng pick(10);
  const double eps = 1e-5;
  int checked = 0;
  for (size_t ti = 0; ti < m.tensors.size(); ++ti) {
    const size_t n = m.tensors[ti].size();
    const size_t n_coords = std::min<size_t>(n, 8);
    for (size_t c = 0; c < n_coords; ++c) {
      size_t i = pick.UniformInt(n);
      double saved = m.tensors[ti].data[i];
      m.tensors[ti].data[i] = saved + eps;
      double lp = LossOf(m, batch);
      m.tensors[ti].data[i] = saved - eps;
      double lm = LossOf(m, batch);
      m.tensors[ti].data[i] = saved;
      double fd = (lp - lm) / (2.0 * eps);
      double an = bg.param_grads[ti].data[i];
      double denom = std::max({std::abs(fd), std::abs(an), 1e-8});
      CHECK(std::abs(fd - an) / denom < 1e-4);
      ++checked;
    }
  }
  CHECK(checked >= 100);
}

TEST_CASE("input gradients match central finite differences") {
  Rng rng(11);
  ModelT<double> m = BuildModel<double>({2, 3}, 16, 8, rng);
  auto batch = RandomBatch(1, 16, 8, 12);
  std::vector<const double*> ptrs = {batch[0].data()};
  BatchGradients<double> bg = LossAndGradients(m, ptrs, true);
  Rng pick(13);
  const double eps = 1e-5;
  for (int c = 0; c < 120; ++c) {
    size_t i = pick.UniformInt(batch[0].size());
    double saved = batch[0][i];
    batch[0][i] = saved + eps;
    double lp = LossOf(m, batch);
    batch[0][i] = saved - eps;
    double lm = LossOf(m, batch);
    batch[0][i] = saved;
    double fd = (lp - lm) / (2.0 * eps);
    double an = bg.input_grads[0][i];
    double denom = std::max({std::abs(fd), std::abs(an), 1e-8});
    CHECK(std::abs(fd - an) / denom < 1e-4);
  }
}

TEST_CASE("adam follows the bias-corrected update") {
  TrainConfig cfg;
  Rng rng(14);
  ModelT<double> m = BuildModel<double>({1, 1}, 4, 4, rng);
  for (auto& t : m.tensors) t.Fill(0.1);
  AdamState<double> st = AdamState<double>::Create(m);
  std::vector<Tensor<double>> grads;
  for (const auto& t : m.tensors) grads.emplace_back(t.dims);
  // Single nonzero scalar gradient on the first encoder bias.
  grads[1].data[0] = 1.0;
  ModelT<double> m1 = m;
  AdamStep(m1, grads, st, 1, cfg);
  double delta = m.tensors[1].data[0] - m1.tensors[1].data[0];
  CHECK(delta == doctest::Approx(cfg.learning_rate / (1.0 + cfg.adam_eps))
                     .epsilon(1e-12));
  // Everything with zero gradient stays put.
  CHECK(m1.tensors[0].data == m.tensors[0].data);

  // Two steps with constant gradient match the hand-unrolled recurrence.
  ModelT<double> m2 = m;
  AdamState<double> st2 = AdamState<double>::Create(m);
  AdamStep(m2, grads, st2, 1, cfg);
  AdamStep(m2, grads, st2, 2, cfg);
  const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
  double mm = 0.0, vv = 0.0, theta = 0.1;
  for (int t = 1; t <= 2; ++t) {
    mm = b1 * mm + (1 - b1) * 1.0;
    vv = b2 * vv + (1 - b2) * 1.0;
    double mh = mm / (1 - std::pow(b1, t));
    double vh = vv / (1 - std::pow(b2, t));
    theta -= cfg.learning_rate * mh / (std::sqrt(vh) + cfg.adam_eps);
  }
  CHECK(m2.tensors[1].data[0] == doctest::Approx(theta).epsilon(1e-12));
}

TEST_CASE("training stops after patience epochs without improvement") {
  // Zero learning rate freezes the model, so the validation loss never
  // improves after the first epoch.
  GridSpec g{8, 4, 24.0f, 10000.0f};
  std::vector<Spectrogram> data;
  Rng rng(15);
  for (int i = 0; i < 4; ++i) {
    Spectrogram s(g, Domain::kNormalized);
    for (auto& v : s.values()) v = static_cast<float>(rng.Uniform());
    data.push_back(std::move(s));
  }
  std::vector<const Spectrogram*> set = {&data[0], &data[1], &data[2],
                                         &data[3]};
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  cfg.max_epochs = 10;
  cfg.patience = 1;
  Rng train_rng(16);
  TrainedModel tm = Train({1, 2}, set, set, cfg, train_rng);
  CHECK(tm.stopped_epoch == 2);
  CHECK(tm.best_epoch == 1);
  CHECK(tm.train_loss.size() == 2);
}

TEST_CASE("training is deterministic and reduces the training loss") {
  GridSpec g{16, 8, 24.0f, 10000.0f};
  std::vector<Spectrogram> data;
  Rng rng(17);
  for (int i = 0; i < 20; ++i) {
    Spectrogram s(g, Domain::kNormalized);
    // Smooth-ish structure plus noise, so there is something to learn.
    for (uint32_t fi = 0; fi < g.n_freq; ++fi) {
      for (uint32_t j = 0; j < g.n_rpm; ++j) {
        s.At(fi, j) = static_cast<float>(
            0.4 + 0.3 * std::sin(0.3 * fi) * std::cos(0.5 * j) +
            0.05 * rng.Uniform(-1.0, 1.0));
      }
    }
    data.push_back(std::move(s));
  }
  std::vector<const Spectrogram*> train_set, val_set;
  for (int i = 0; i < 16; ++i) train_set.push_back(&data[i]);
  for (int i = 16; i < 20; ++i) val_set.push_back(&data[i]);
  TrainConfig cfg;
  cfg.learning_rate = 1e-3;  // faster convergence for the smoke test
  cfg.max_epochs = 30;
  cfg.patience = 30;
  Rng a(18), b(18);
  TrainedModel ta = Train({1, 4}, train_set, val_set, cfg, a);
  TrainedModel tb = Train({1, 4}, train_set, val_set, cfg, b);
  CHECK(ta.train_loss.back() < ta.train_loss.front());
  CHECK(ta.train_loss == tb.train_loss);
  CHECK(ta.val_loss == tb.val_loss);
  for (size_t i = 0; i < ta.params.tensors.size(); ++i) {
    CHECK(ta.params.tensors[i].data == tb.params.tensors[i].data);
  }
  // The returned snapshot is the best-validation epoch.
  double best = *std::min_element(ta.val_loss.begin(), ta.val_loss.end());
  CHECK(ta.val_loss[ta.best_epoch - 1] == best);
}

TEST_CASE("score equals the one-sample batch loss") {
  Rng rng(19);
  Model m = BuildModel<float>({1, 4}, 16, 8, rng);
  Spectrogram s = SpecFrom(std::vector<float>(16 * 8, 0.3f), 16, 8);
  Rng data_rng(20);
  for (auto& v : s.values()) v = static_cast<float>(data_rng.Uniform());
  double score = Score(m, s);
  BatchGradients<float> bg =
      LossAndGradients(m, {s.values().data()}, false);
  CHECK(score == doctest::Approx(bg.loss).epsilon(1e-12));
}

TEST_CASE("score of constant output against constant inputs") {
  Rng rng(21);
  Model m = BuildModel<float>({1, 4}, 8, 4, rng);
  for (auto& t : m.tensors) t.Fill(0.0f);  // output is 0.5 everywhere
  CHECK(Score(m, SpecFrom(std::vector<float>(8 * 4, 0.5f), 8, 4)) == 0.0);
  CHECK(Score(m, SpecFrom(std::vector<float>(8 * 4, 1.0f), 8, 4)) ==
        doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("identical inputs produce identical latents of declared length") {
  Rng rng(22);
  Model m = BuildModel<float>({2, 4}, 16, 8, rng);
  Spectrogram s = SpecFrom(std::vector<float>(16 * 8, 0.0f), 16, 8);
  Rng data_rng(23);
  for (auto& v : s.values()) v = static_cast<float>(data_rng.Uniform());
  auto za = Encode(m, s);
  auto zb = Encode(m, s);
  CHECK(za == zb);
  CHECK(za.size() == m.LatentLength());
}

TEST_CASE("model files round-trip") {
  Rng rng(24);
  Model m = BuildModel<float>({2, 4}, 16, 8, rng);
  auto path = std::filesystem::temp_directory_path() / "evs_test_model.evae";
  SaveModel(m, path.string());
  Model loaded = LoadModel(path.string());
  CHECK(loaded.arch == m.arch);
  CHECK(loaded.in_freq == m.in_freq);
  CHECK(loaded.in_rpm == m.in_rpm);
  for (size_t i = 0; i < m.tensors.size(); ++i) {
    CHECK(loaded.tensors[i].data == m.tensors[i].data);
  }
  std::filesystem::remove(path);
}

TEST_CASE("shape mismatches are rejected") {
  Rng rng(25);
  Model m = BuildModel<float>({1, 4}, 16, 8, rng);
  Spectrogram wrong = SpecFrom(std::vector<float>(8 * 4, 0.5f), 8, 4);
  CHECK_THROWS_AS(Score(m, wrong), DataError);
  CHECK_THROWS_AS(Encode(m, wrong), DataError);
}

TEST_SUITE_END();
