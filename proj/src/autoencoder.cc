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

#include "autoencoder.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "errors.h"
#include "layers.h"

namespace evsound {

namespace {

template <typename T>
bool AllFinite(const Tensor<T>& t) {
  for (T v : t.data) {
    if (!std::isfinite(static_cast<double>(v))) return false;
  }
  return true;
}

void CheckSpecForModel(const Model& m, const Spectrogram& spec) {
  if (static_cast<int>(spec.grid().n_freq) != m.in_freq ||
      static_cast<int>(spec.grid().n_rpm) != m.in_rpm) {
    throw DataError("spectrogram dims do not match the model input dims");
  }
  if (spec.domain() != Domain::kNormalized) {
    throw DataError("model input must be a normalized spectrogram");
  }
}

}  // namespace

template <typename T>
Workspace<T> Workspace<T>::Create(const ModelT<T>& m) {
  Workspace<T> ws;
  const int n = m.arch.n_blocks;
  const int f = m.arch.n_filters;
  int h = m.in_freq, w = m.in_rpm;
  for (int b = 0; b < n; ++b) {
    ws.enc_act.emplace_back(std::vector<int>{f, h, w});
    ws.argmax.emplace_back(std::vector<int>{f, h / 2, w / 2});
    h /= 2;
    w /= 2;
    ws.enc_pool.emplace_back(std::vector<int>{f, h, w});
  }
  for (int b = 0; b < n; ++b) {
    h *= 2;
    w *= 2;
    ws.dec_act.emplace_back(std::vector<int>{f, h, w});
  }
  ws.output = Tensor<T>({1, m.in_freq, m.in_rpm});
  return ws;
}

template <typename T>
ModelT<T> BuildModel(const Architecture& arch, int in_freq, int in_rpm,
                     Rng& rng) {
  if (arch.n_blocks < 1 || arch.n_filters < 1) {
    throw ConfigError("architecture must have >= 1 block and >= 1 filter");
  }
  const int div = 1 << arch.n_blocks;
  if (in_freq % div != 0 || in_rpm % div != 0 || in_freq < div ||
      in_rpm < div) {
    throw ConfigError("input dims must be divisible by 2^n_blocks");
  }
  ModelT<T> m;
  m.arch = arch;
  m.in_freq = in_freq;
  m.in_rpm = in_rpm;
  m.init_seed = rng.seed();
  const int f = arch.n_filters;

  auto init_uniform = [&rng](Tensor<T>& t, int fan_in) {
    double r = std::sqrt(6.0 / fan_in);
    for (auto& v : t.data) v = static_cast<T>(rng.Uniform(-r, r));
  };

  for (int b = 0; b < arch.n_blocks; ++b) {
    const int cin = b == 0 ? 1 : f;
    Tensor<T> w({f, cin, 3, 3});
    init_uniform(w, cin * 9);
    m.tensors.push_back(std::move(w));
    m.tensors.emplace_back(std::vector<int>{f});
  }
  for (int b = 0; b < arch.n_blocks; ++b) {
    Tensor<T> w({f, f, 2, 2});  // [ci][co][2][2]
    init_uniform(w, f * 4);
    m.tensors.push_back(std::move(w));
    m.tensors.emplace_back(std::vector<int>{f});
  }
  Tensor<T> ow({1, f, 3, 3});
  init_uniform(ow, f * 9);
  m.tensors.push_back(std::move(ow));
  m.tensors.emplace_back(std::vector<int>{1});
  return m;
}

template <typename T>
void Forward(const ModelT<T>& m, const T* input, Workspace<T>& ws) {
  const int n = m.arch.n_blocks;
  const int f = m.arch.n_filters;
  int h = m.in_freq, w = m.in_rpm;
  const T* cur = input;
  int cin = 1;
  for (int b = 0; b < n; ++b) {
    Conv3x3Forward(cur, cin, h, w, m.enc_w(b).ptr(), m.enc_b(b).ptr(), f,
                   ws.enc_act[b].ptr());
    ReluForward(ws.enc_act[b].ptr(), ws.enc_act[b].size(),
                ws.enc_act[b].ptr());
    MaxPool2x2Forward(ws.enc_act[b].ptr(), f, h, w, ws.enc_pool[b].ptr(),
                      ws.argmax[b].ptr());
    cur = ws.enc_pool[b].ptr();
    cin = f;
    h /= 2;
    w /= 2;
  }
  for (int b = 0; b < n; ++b) {
    TConv2x2Forward(cur, f, h, w, m.dec_w(b).ptr(), m.dec_b(b).ptr(), f,
                    ws.dec_act[b].ptr());
    ReluForward(ws.dec_act[b].ptr(), ws.dec_act[b].size(),
                ws.dec_act[b].ptr());
    cur = ws.dec_act[b].ptr();
    h *= 2;
    w *= 2;
  }
  Conv3x3Forward(cur, f, h, w, m.out_w().ptr(), m.out_b().ptr(), 1,
                 ws.output.ptr());
  SigmoidForward(ws.output.ptr(), ws.output.size(), ws.output.ptr());
}

template <typename T>
double SampleMse(const ModelT<T>& m, const T* input, const Workspace<T>& ws) {
  const size_t n_px = static_cast<size_t>(m.in_freq) * m.in_rpm;
  double acc = 0.0;
  const T* y = ws.output.ptr();
  for (size_t i = 0; i < n_px; ++i) {
    double d = static_cast<double>(input[i]) - static_cast<double>(y[i]);
    acc += d * d;
  }
  return acc / static_cast<double>(n_px);
}

template <typename T>
void BackwardOneSample(const ModelT<T>& m, const T* input, Workspace<T>& ws,
                       T scale, std::vector<Tensor<T>>& param_grads,
                       T* input_grad) {
  const int n = m.arch.n_blocks;
  const int f = m.arch.n_filters;
  const size_t n_px = static_cast<size_t>(m.in_freq) * m.in_rpm;

  // Scratch buffers sized like the activations, reused across calls.
  if (ws.scratch.empty()) {
    ws.scratch.emplace_back(std::vector<int>{1, m.in_freq, m.in_rpm});  // dY
    for (int b = 0; b < n; ++b) {
      ws.scratch.push_back(Tensor<T>(ws.enc_act[b].dims));
      ws.scratch.push_back(Tensor<T>(ws.enc_pool[b].dims));
    }
    for (int b = 0; b < n; ++b) {
      ws.scratch.push_back(Tensor<T>(ws.dec_act[b].dims));
    }
    ws.scratch.emplace_back(std::vector<int>{1, m.in_freq, m.in_rpm});
  }
  Tensor<T>& d_out = ws.scratch[0];
  auto d_enc_act = [&](int b) -> Tensor<T>& { return ws.scratch[1 + 2 * b]; };
  auto d_enc_pool = [&](int b) -> Tensor<T>& {
    return ws.scratch[1 + 2 * b + 1];
  };
  auto d_dec_act = [&](int b) -> Tensor<T>& {
    return ws.scratch[1 + 2 * n + b];
  };
  Tensor<T>& d_input = ws.scratch[1 + 3 * n];

  // d(sample MSE)/d(output), through the sigmoid.
  const T* y = ws.output.ptr();
  for (size_t i = 0; i < n_px; ++i) {
    d_out.data[i] = T(2) * (y[i] - input[i]) / static_cast<T>(n_px);
  }
  SigmoidBackward(y, d_out.ptr(), n_px, d_out.ptr());

  // Output conv.
  int h = m.in_freq, w = m.in_rpm;
  const T* out_conv_in = n > 0 ? ws.dec_act[n - 1].ptr() : input;
  {
    Tensor<T>& gw = param_grads[4 * n];
    Tensor<T>& gb = param_grads[4 * n + 1];
    Tensor<T> tmp_w(gw.dims), tmp_b(gb.dims);
    Conv3x3BackwardParams(out_conv_in, f, h, w, d_out.ptr(), 1, tmp_w.ptr(),
                          tmp_b.ptr());
    for (size_t i = 0; i < gw.size(); ++i) gw.data[i] += scale * tmp_w.data[i];
    for (size_t i = 0; i < gb.size(); ++i) gb.data[i] += scale * tmp_b.data[i];
    Conv3x3BackwardInput(d_out.ptr(), 1, h, w, m.out_w().ptr(), f,
                         d_dec_act(n - 1).ptr());
  }

  // Decoder blocks, last to first.
  for (int b = n - 1; b >= 0; --b) {
    Tensor<T>& d_act = d_dec_act(b);
    ReluBackward(ws.dec_act[b].ptr(), d_act.ptr(), d_act.size(), d_act.ptr());
    const T* tconv_in =
        b == 0 ? ws.enc_pool[n - 1].ptr() : ws.dec_act[b - 1].ptr();
    int ih = h / 2, iw = w / 2;  // input dims of this tconv
    {
      Tensor<T>& gw = param_grads[2 * n + 2 * b];
      Tensor<T>& gb = param_grads[2 * n + 2 * b + 1];
      Tensor<T> tmp_w(gw.dims), tmp_b(gb.dims);
      TConv2x2BackwardParams(tconv_in, f, ih, iw, d_act.ptr(), f, tmp_w.ptr(),
                             tmp_b.ptr());
      for (size_t i = 0; i < gw.size(); ++i)
        gw.data[i] += scale * tmp_w.data[i];
      for (size_t i = 0; i < gb.size(); ++i)
        gb.data[i] += scale * tmp_b.data[i];
    }
    Tensor<T>& d_below =
        b == 0 ? d_enc_pool(n - 1) : d_dec_act(b - 1);
    TConv2x2BackwardInput(d_act.ptr(), f, h / 2, w / 2, m.dec_w(b).ptr(), f,
                          d_below.ptr());
    h /= 2;
    w /= 2;
  }

  // Encoder blocks, last to first. Here h, w are the pooled dims of block b.
  for (int b = n - 1; b >= 0; --b) {
    MaxPool2x2Backward(ws.argmax[b].ptr(), d_enc_pool(b).ptr(), f, h * 2,
                       w * 2, d_enc_act(b).ptr());
    h *= 2;
    w *= 2;
    ReluBackward(ws.enc_act[b].ptr(), d_enc_act(b).ptr(), d_enc_act(b).size(),
                 d_enc_act(b).ptr());
    const int cin = b == 0 ? 1 : f;
    const T* conv_in = b == 0 ? input : ws.enc_pool[b - 1].ptr();
    {
      Tensor<T>& gw = param_grads[2 * b];
      Tensor<T>& gb = param_grads[2 * b + 1];
      Tensor<T> tmp_w(gw.dims), tmp_b(gb.dims);
      Conv3x3BackwardParams(conv_in, cin, h, w, d_enc_act(b).ptr(), f,
                            tmp_w.ptr(), tmp_b.ptr());
      for (size_t i = 0; i < gw.size(); ++i)
        gw.data[i] += scale * tmp_w.data[i];
      for (size_t i = 0; i < gb.size(); ++i)
        gb.data[i] += scale * tmp_b.data[i];
    }
    Tensor<T>& d_below = b == 0 ? d_input : d_enc_pool(b - 1);
    Conv3x3BackwardInput(d_enc_act(b).ptr(), f, h, w, m.enc_w(b).ptr(), cin,
                         d_below.ptr());
  }

  if (input_grad != nullptr) {
    // Network path plus the direct dependence of the loss on x.
    for (size_t i = 0; i < n_px; ++i) {
      input_grad[i] =
          d_input.data[i] + T(2) * (input[i] - y[i]) / static_cast<T>(n_px);
    }
  }
}

template <typename T>
BatchGradients<T> LossAndGradients(const ModelT<T>& m,
                                   const std::vector<const T*>& batch,
                                   bool want_input_grads) {
  if (batch.empty()) throw DataError("empty batch");
  BatchGradients<T> out;
  out.param_grads.reserve(m.tensors.size());
  for (const auto& t : m.tensors) out.param_grads.emplace_back(t.dims);

  Workspace<T> ws = Workspace<T>::Create(m);
  const size_t n_px = static_cast<size_t>(m.in_freq) * m.in_rpm;
  const T scale = T(1) / static_cast<T>(batch.size());
  std::vector<T> input_grad(want_input_grads ? n_px : 0);
  for (const T* sample : batch) {
    Forward(m, sample, ws);
    out.loss += SampleMse(m, sample, ws) / batch.size();
    BackwardOneSample(m, sample, ws, scale, out.param_grads,
                      want_input_grads ? input_grad.data() : nullptr);
    if (want_input_grads) out.input_grads.push_back(input_grad);
  }
  if (!std::isfinite(out.loss)) {
    // Locate the first non-finite stage for the report.
    std::string stage = "output";
    for (size_t b = 0; b < ws.enc_act.size(); ++b) {
      if (!AllFinite(ws.enc_act[b]) || !AllFinite(ws.enc_pool[b])) {
        stage = "encoder block " + std::to_string(b);
        break;
      }
    }
    for (size_t b = 0; b < ws.dec_act.size(); ++b) {
      if (!AllFinite(ws.dec_act[b])) {
        stage = "decoder block " + std::to_string(b);
        break;
      }
    }
    throw NumericError("non-finite loss (first non-finite stage: " + stage +
                       ")");
  }
  return out;
}

template <typename T>
AdamState<T> AdamState<T>::Create(const ModelT<T>& model) {
  AdamState<T> st;
  for (const auto& t : model.tensors) {
    st.m.emplace_back(t.dims);
    st.v.emplace_back(t.dims);
  }
  return st;
}

template <typename T>
void AdamStep(ModelT<T>& params, const std::vector<Tensor<T>>& grads,
              AdamState<T>& state, int64_t t, const TrainConfig& cfg) {
  const double b1 = cfg.adam_beta1;
  const double b2 = cfg.adam_beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(t));
  for (size_t k = 0; k < params.tensors.size(); ++k) {
    auto& theta = params.tensors[k].data;
    auto& gm = state.m[k].data;
    auto& gv = state.v[k].data;
    const auto& g = grads[k].data;
    for (size_t i = 0; i < theta.size(); ++i) {
      double gi = static_cast<double>(g[i]);
      double mi = b1 * static_cast<double>(gm[i]) + (1.0 - b1) * gi;
      double vi = b2 * static_cast<double>(gv[i]) + (1.0 - b2) * gi * gi;
      gm[i] = static_cast<T>(mi);
      gv[i] = static_cast<T>(vi);
      double m_hat = mi / bc1;
      double v_hat = vi / bc2;
      theta[i] = static_cast<T>(
          static_cast<double>(theta[i]) -
          cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_eps));
    }
  }
}

TrainedModel Train(const Architecture& arch,
                   const std::vector<const Spectrogram*>& train_set,
                   const std::vector<const Spectrogram*>& val_set,
                   const TrainConfig& cfg, Rng& rng) {
  if (train_set.empty() || val_set.empty()) {
    throw DataError("training and validation sets must be non-empty");
  }
  if (cfg.patience < 1) throw ConfigError("patience must be >= 1");
  const GridSpec& grid = train_set[0]->grid();
  for (const auto* s : train_set) {
    if (s->grid() != grid || s->domain() != Domain::kNormalized) {
      throw DataError("training samples must share one grid and be normalized");
    }
  }
  for (const auto* s : val_set) {
    if (s->grid() != grid || s->domain() != Domain::kNormalized) {
      throw DataError("validation samples must share the training grid");
    }
  }

  Rng init_rng = rng.Derive(0x696e6974ULL);
  Model model = BuildModel<float>(arch, static_cast<int>(grid.n_freq),
                                  static_cast<int>(grid.n_rpm), init_rng);
  AdamState<float> adam = AdamState<float>::Create(model);
  Workspace<float> ws = Workspace<float>::Create(model);
  Rng shuffle_rng = rng.Derive(0x73687566ULL);

  TrainedModel result;
  result.params = model;
  double best_val = std::numeric_limits<double>::infinity();
  int epochs_since_best = 0;
  int64_t step = 0;

  std::vector<size_t> order(train_set.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    // Fisher-Yates shuffle from the dedicated stream.
    for (size_t i = order.size(); i > 1; --i) {
      size_t j = shuffle_rng.UniformInt(i);
      std::swap(order[i - 1], order[j]);
    }
    double epoch_loss = 0.0;
    std::vector<const float*> batch;
    for (size_t pos = 0; pos < order.size();
         pos += static_cast<size_t>(cfg.batch_size)) {
      batch.clear();
      for (size_t k = pos;
           k < std::min(order.size(), pos + cfg.batch_size); ++k) {
        batch.push_back(train_set[order[k]]->values().data());
      }
      BatchGradients<float> bg =
          LossAndGradients(model, batch, /*want_input_grads=*/false);
      epoch_loss += bg.loss * batch.size();
      ++step;
      AdamStep(model, bg.param_grads, adam, step, cfg);
    }
    epoch_loss /= static_cast<double>(train_set.size());

    double val_loss = 0.0;
    for (const auto* s : val_set) {
      Forward(model, s->values().data(), ws);
      val_loss += SampleMse(model, s->values().data(), ws);
    }
    val_loss /= static_cast<double>(val_set.size());

    result.train_loss.push_back(epoch_loss);
    result.val_loss.push_back(val_loss);
    result.stopped_epoch = epoch;

    if (val_loss < best_val) {
      best_val = val_loss;
      result.params = model;
      result.best_epoch = epoch;
      epochs_since_best = 0;
    } else {
      ++epochs_since_best;
      if (epochs_since_best >= cfg.patience) break;
    }
  }
  return result;
}

double Score(const Model& m, const Spectrogram& spec) {
  CheckSpecForModel(m, spec);
  Workspace<float> ws = Workspace<float>::Create(m);
  Forward(m, spec.values().data(), ws);
  return SampleMse(m, spec.values().data(), ws);
}

Spectrogram Reconstruct(const Model& m, const Spectrogram& spec) {
  CheckSpecForModel(m, spec);
  Workspace<float> ws = Workspace<float>::Create(m);
  Forward(m, spec.values().data(), ws);
  Spectrogram out(spec.grid(), Domain::kNormalized);
  std::copy(ws.output.data.begin(), ws.output.data.end(),
            out.values().begin());
  return out;
}

std::vector<float> Encode(const Model& m, const Spectrogram& spec) {
  CheckSpecForModel(m, spec);
  const int n = m.arch.n_blocks;
  const int f = m.arch.n_filters;
  Workspace<float> ws = Workspace<float>::Create(m);
  int h = m.in_freq, w = m.in_rpm;
  const float* cur = spec.values().data();
  int cin = 1;
  for (int b = 0; b < n; ++b) {
    Conv3x3Forward(cur, cin, h, w, m.enc_w(b).ptr(), m.enc_b(b).ptr(), f,
                   ws.enc_act[b].ptr());
    ReluForward(ws.enc_act[b].ptr(), ws.enc_act[b].size(),
                ws.enc_act[b].ptr());
    MaxPool2x2Forward(ws.enc_act[b].ptr(), f, h, w, ws.enc_pool[b].ptr(),
                      ws.argmax[b].ptr());
    cur = ws.enc_pool[b].ptr();
    cin = f;
    h /= 2;
    w /= 2;
  }
  return std::vector<float>(ws.enc_pool[n - 1].data.begin(),
                            ws.enc_pool[n - 1].data.end());
}

namespace {
constexpr char kModelMagic[8] = {'E', 'V', 'A', 'E', '0', '1', '\0', '\0'};
}  // namespace

void SaveModel(const Model& m, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open for writing: " + path);
  os.write(kModelMagic, 8);
  auto w32 = [&](uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), 4);
  };
  w32(static_cast<uint32_t>(m.arch.n_blocks));
  w32(static_cast<uint32_t>(m.arch.n_filters));
  w32(static_cast<uint32_t>(m.in_freq));
  w32(static_cast<uint32_t>(m.in_rpm));
  for (const auto& t : m.tensors) {
    w32(static_cast<uint32_t>(t.dims.size()));
    for (int d : t.dims) w32(static_cast<uint32_t>(d));
    os.write(reinterpret_cast<const char*>(t.data.data()),
             static_cast<std::streamsize>(t.size() * sizeof(float)));
  }
  if (!os) throw DataError("short write: " + path);
}

Model LoadModel(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open: " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kModelMagic, 8) != 0) {
    throw DataError("bad model magic: " + path);
  }
  auto r32 = [&]() {
    uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 4);
    return v;
  };
  Architecture arch;
  arch.n_blocks = static_cast<int>(r32());
  arch.n_filters = static_cast<int>(r32());
  int in_freq = static_cast<int>(r32());
  int in_rpm = static_cast<int>(r32());
  if (!is || arch.n_blocks < 1 || arch.n_blocks > 16 || arch.n_filters < 1 ||
      arch.n_filters > 4096) {
    throw DataError("bad model header: " + path);
  }
  // Rebuild the expected structure, then fill payloads.
  Rng dummy(0);
  Model m = BuildModel<float>(arch, in_freq, in_rpm, dummy);
  m.init_seed = 0;
  for (auto& t : m.tensors) {
    uint32_t rank = r32();
    if (rank != t.dims.size()) throw DataError("model tensor rank mismatch");
    for (int d : t.dims) {
      if (r32() != static_cast<uint32_t>(d)) {
        throw DataError("model tensor shape mismatch");
      }
    }
    is.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(t.size() * sizeof(float)));
  }
  if (!is) throw DataError("truncated model payload: " + path);
  return m;
}

template struct Workspace<float>;
template struct Workspace<double>;
template struct AdamState<float>;
template struct AdamState<double>;
template ModelT<float> BuildModel<float>(const Architecture&, int, int, Rng&);
template ModelT<double> BuildModel<double>(const Architecture&, int, int,
                                           Rng&);
template void Forward<float>(const ModelT<float>&, const float*,
                             Workspace<float>&);
template void Forward<double>(const ModelT<double>&, const double*,
                              Workspace<double>&);
template double SampleMse<float>(const ModelT<float>&, const float*,
                                 const Workspace<float>&);
template double SampleMse<double>(const ModelT<double>&, const double*,
                                  const Workspace<double>&);
template void BackwardOneSample<float>(const ModelT<float>&, const float*,
                                       Workspace<float>&, float,
                                       std::vector<Tensor<float>>&, float*);
template void BackwardOneSample<double>(const ModelT<double>&, const double*,
                                        Workspace<double>&, double,
                                        std::vector<Tensor<double>>&, double*);
template BatchGradients<float> LossAndGradients<float>(
    const ModelT<float>&, const std::vector<const float*>&, bool);
template BatchGradients<double> LossAndGradients<double>(
    const ModelT<double>&, const std::vector<const double*>&, bool);
template void AdamStep<float>(ModelT<float>&,
                              const std::vector<Tensor<float>>&,
                              AdamState<float>&, int64_t, const TrainConfig&);
template void AdamStep<double>(ModelT<double>&,
                               const std::vector<Tensor<double>>&,
                               AdamState<double>&, int64_t,
                               const TrainConfig&);

}  // namespace evsound
