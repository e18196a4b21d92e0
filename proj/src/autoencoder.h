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

#ifndef EVSOUND_AUTOENCODER_H_
#define EVSOUND_AUTOENCODER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "rng.h"
#include "spectrogram.h"
#include "tensor.h"

namespace evsound {

struct Architecture {
  int n_blocks = 1;
  int n_filters = 4;
  bool operator==(const Architecture&) const = default;
};

struct TrainConfig {
  double learning_rate = 1e-4;
  int batch_size = 8;
  int max_epochs = 100;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int patience = 10;
};

// Convolutional autoencoder. Encoder: n_blocks of [3x3 conv (stride 1,
// pad 1) -> ReLU -> 2x2 maxpool]; channels go 1 -> f on the first block and
// stay at f. Decoder: n_blocks of [2x2 stride-2 transpose conv -> ReLU],
// then a 3x3 conv back to one channel and a logistic sigmoid.
//
// Parameter tensors are kept in a flat list with fixed order: encoder block
// weights/biases, decoder block weights/biases, output conv weight/bias.
template <typename T>
struct ModelT {
  Architecture arch;
  int in_freq = 0;
  int in_rpm = 0;
  uint64_t init_seed = 0;
  std::vector<Tensor<T>> tensors;

  int num_tensors() const { return 4 * arch.n_blocks + 2; }
  Tensor<T>& enc_w(int b) { return tensors[2 * b]; }
  Tensor<T>& enc_b(int b) { return tensors[2 * b + 1]; }
  Tensor<T>& dec_w(int b) { return tensors[2 * arch.n_blocks + 2 * b]; }
  Tensor<T>& dec_b(int b) { return tensors[2 * arch.n_blocks + 2 * b + 1]; }
  Tensor<T>& out_w() { return tensors[4 * arch.n_blocks]; }
  Tensor<T>& out_b() { return tensors[4 * arch.n_blocks + 1]; }
  const Tensor<T>& enc_w(int b) const { return tensors[2 * b]; }
  const Tensor<T>& enc_b(int b) const { return tensors[2 * b + 1]; }
  const Tensor<T>& dec_w(int b) const {
    return tensors[2 * arch.n_blocks + 2 * b];
  }
  const Tensor<T>& dec_b(int b) const {
    return tensors[2 * arch.n_blocks + 2 * b + 1];
  }
  const Tensor<T>& out_w() const { return tensors[4 * arch.n_blocks]; }
  const Tensor<T>& out_b() const { return tensors[4 * arch.n_blocks + 1]; }

  // Latent dims after the encoder: {f, in_freq >> n, in_rpm >> n}.
  std::vector<int> LatentDims() const {
    return {arch.n_filters, in_freq >> arch.n_blocks,
            in_rpm >> arch.n_blocks};
  }
  size_t LatentLength() const {
    return Tensor<T>::NumElements(LatentDims());
  }
};

using Model = ModelT<float>;

// Per-sample activation storage reused across forward/backward calls.
template <typename T>
struct Workspace {
  std::vector<Tensor<T>> enc_act;   // ReLU outputs per encoder block
  std::vector<Tensor<T>> enc_pool;  // pool outputs per encoder block
  std::vector<Tensor<int32_t>> argmax;
  std::vector<Tensor<T>> dec_act;   // ReLU outputs per decoder block
  Tensor<T> output;                 // sigmoid output
  // Backward scratch (allocated lazily).
  std::vector<Tensor<T>> scratch;

  static Workspace Create(const ModelT<T>& m);
};

// Weights uniform in +-sqrt(6 / fan_in), biases zero. Throws if the input
// dims are not divisible by 2^n_blocks.
template <typename T>
ModelT<T> BuildModel(const Architecture& arch, int in_freq, int in_rpm,
                     Rng& rng);

// Runs the full forward pass; the reconstruction lands in ws.output.
template <typename T>
void Forward(const ModelT<T>& m, const T* input, Workspace<T>& ws);

// Mean squared error of one sample against ws.output after Forward().
template <typename T>
double SampleMse(const ModelT<T>& m, const T* input, const Workspace<T>& ws);

// Backward pass for one sample whose Forward() state is in ws. Accumulates
// d(sample loss)/d(params) * scale into param_grads; if input_grad is not
// null it is overwritten with the full input gradient of the sample loss
// (both the direct and the reconstruction-path terms).
template <typename T>
void BackwardOneSample(const ModelT<T>& m, const T* input, Workspace<T>& ws,
                       T scale, std::vector<Tensor<T>>& param_grads,
                       T* input_grad);

template <typename T>
struct BatchGradients {
  double loss = 0.0;
  std::vector<Tensor<T>> param_grads;
  std::vector<std::vector<T>> input_grads;  // filled when requested
};

// Loss and gradients of the batch-mean MSE. Throws NumericError (naming the
// first offending stage) if the loss is not finite.
template <typename T>
BatchGradients<T> LossAndGradients(const ModelT<T>& m,
                                   const std::vector<const T*>& batch,
                                   bool want_input_grads);

template <typename T>
struct AdamState {
  std::vector<Tensor<T>> m;
  std::vector<Tensor<T>> v;
  static AdamState Create(const ModelT<T>& model);
};

// Bias-corrected Adam update; t is the 1-based step index.
template <typename T>
void AdamStep(ModelT<T>& params, const std::vector<Tensor<T>>& grads,
              AdamState<T>& state, int64_t t, const TrainConfig& cfg);

struct TrainedModel {
  Model params;  // best-validation snapshot
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  int stopped_epoch = 0;  // epochs actually run
  int best_epoch = 0;     // 1-based epoch of the snapshot
};

// Trains on shuffled mini-batches (last partial batch kept) with early
// stopping on the validation loss: stops once it has not improved for
// `patience` consecutive epochs, restoring the best-epoch weights.
TrainedModel Train(const Architecture& arch,
                   const std::vector<const Spectrogram*>& train_set,
                   const std::vector<const Spectrogram*>& val_set,
                   const TrainConfig& cfg, Rng& rng);

// Per-sample mean squared reconstruction error.
double Score(const Model& m, const Spectrogram& spec);

// Reconstruction of one sample.
Spectrogram Reconstruct(const Model& m, const Spectrogram& spec);

// Flattened encoder output, row-major (channel, frequency, rpm).
std::vector<float> Encode(const Model& m, const Spectrogram& spec);

// Model file: magic "EVAE01\0\0", LE u32 n_blocks, n_filters, in_freq,
// in_rpm, u64 init seed, then per tensor (fixed order): u32 rank, u32 dims,
// f32 payload.
void SaveModel(const Model& m, const std::string& path);
Model LoadModel(const std::string& path);

}  // namespace evsound

#endif  // EVSOUND_AUTOENCODER_H_
