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

#ifndef EVSOUND_TENSOR_H_
#define EVSOUND_TENSOR_H_

#include <cstdint>
#include <numeric>
#include <vector>

namespace evsound {

// Dense row-major tensor. Just shape + storage; all math lives in layers.h.
template <typename T>
struct Tensor {
  std::vector<int> dims;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> d) : dims(std::move(d)) {
    data.assign(NumElements(dims), T(0));
  }

  static size_t NumElements(const std::vector<int>& d) {
    size_t n = 1;
    for (int x : d) n *= static_cast<size_t>(x);
    return n;
  }

  size_t size() const { return data.size(); }
  T* ptr() { return data.data(); }
  const T* ptr() const { return data.data(); }

  void Fill(T v) { std::fill(data.begin(), data.end(), v); }

  template <typename U>
  Tensor<U> Cast() const {
    Tensor<U> out(dims);
    for (size_t i = 0; i < data.size(); ++i) {
      out.data[i] = static_cast<U>(data[i]);
    }
    return out;
  }
};

}  // namespace evsound

#endif  // EVSOUND_TENSOR_H_
