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

#ifndef EVSOUND_LAYERS_H_
#define EVSOUND_LAYERS_H_

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace evsound {

// Layer kernels on contiguous CHW buffers. Convolutions are 3x3, stride 1,
// zero padding 1 (same-size output); pooling and transpose convolution are
// 2x2 with stride 2. Weight layouts: conv [co][ci][3][3], transpose conv
// [ci][co][2][2].

template <typename T>
void Conv3x3Forward(const T* in, int ci, int h, int w, const T* weight,
                    const T* bias, int co, T* out) {
  const size_t plane = static_cast<size_t>(h) * w;
  for (int oc = 0; oc < co; ++oc) {
    std::fill(out + oc * plane, out + (oc + 1) * plane, bias[oc]);
  }
  for (int oc = 0; oc < co; ++oc) {
    T* outp = out + oc * plane;
    for (int ic = 0; ic < ci; ++ic) {
      const T* inp = in + ic * plane;
      const T* wk = weight + ((oc * ci) + ic) * 9;
      for (int ky = 0; ky < 3; ++ky) {
        const int dy = ky - 1;
        for (int kx = 0; kx < 3; ++kx) {
          const int dx = kx - 1;
          const T wv = wk[ky * 3 + kx];
          const int y0 = std::max(0, -dy), y1 = h - std::max(0, dy);
          const int x0 = std::max(0, -dx), x1 = w - std::max(0, dx);
          for (int y = y0; y < y1; ++y) {
            const T* ir = inp + (y + dy) * w + dx;
            T* orow = outp + y * w;
            for (int x = x0; x < x1; ++x) orow[x] += wv * ir[x];
          }
        }
      }
    }
  }
}

template <typename T>
void Conv3x3BackwardInput(const T* gout, int co, int h, int w, const T* weight,
                          int ci, T* gin) {
  const size_t plane = static_cast<size_t>(h) * w;
  std::fill(gin, gin + static_cast<size_t>(ci) * plane, T(0));
  for (int oc = 0; oc < co; ++oc) {
    const T* gp = gout + oc * plane;
    for (int ic = 0; ic < ci; ++ic) {
      T* gi = gin + ic * plane;
      const T* wk = weight + ((oc * ci) + ic) * 9;
      for (int ky = 0; ky < 3; ++ky) {
        const int dy = ky - 1;
        for (int kx = 0; kx < 3; ++kx) {
          const int dx = kx - 1;
          const T wv = wk[ky * 3 + kx];
          // out[y][x] consumed in[y+dy][x+dx]; scatter transposed.
          const int y0 = std::max(0, -dy), y1 = h - std::max(0, dy);
          const int x0 = std::max(0, -dx), x1 = w - std::max(0, dx);
          for (int y = y0; y < y1; ++y) {
            const T* gr = gp + y * w;
            T* gir = gi + (y + dy) * w + dx;
            for (int x = x0; x < x1; ++x) gir[x] += wv * gr[x];
          }
        }
      }
    }
  }
}

template <typename T>
void Conv3x3BackwardParams(const T* in, int ci, int h, int w, const T* gout,
                           int co, T* gweight, T* gbias) {
  const size_t plane = static_cast<size_t>(h) * w;
  for (int oc = 0; oc < co; ++oc) {
    const T* gp = gout + oc * plane;
    T acc = T(0);
    for (size_t i = 0; i < plane; ++i) acc += gp[i];
    gbias[oc] += acc;
    for (int ic = 0; ic < ci; ++ic) {
      const T* inp = in + ic * plane;
      T* gw = gweight + ((oc * ci) + ic) * 9;
      for (int ky = 0; ky < 3; ++ky) {
        const int dy = ky - 1;
        for (int kx = 0; kx < 3; ++kx) {
          const int dx = kx - 1;
          const int y0 = std::max(0, -dy), y1 = h - std::max(0, dy);
          const int x0 = std::max(0, -dx), x1 = w - std::max(0, dx);
          T acc_w = T(0);
          for (int y = y0; y < y1; ++y) {
            const T* ir = inp + (y + dy) * w + dx;
            const T* gr = gp + y * w;
            for (int x = x0; x < x1; ++x) acc_w += gr[x] * ir[x];
          }
          gw[ky * 3 + kx] += acc_w;
        }
      }
    }
  }
}

template <typename T>
void ReluForward(const T* in, size_t n, T* out) {
  for (size_t i = 0; i < n; ++i) out[i] = in[i] > T(0) ? in[i] : T(0);
}

// Uses the forward output as the mask (out > 0 iff in > 0).
template <typename T>
void ReluBackward(const T* out, const T* gout, size_t n, T* gin) {
  for (size_t i = 0; i < n; ++i) gin[i] = out[i] > T(0) ? gout[i] : T(0);
}

template <typename T>
void SigmoidForward(const T* in, size_t n, T* out) {
  for (size_t i = 0; i < n; ++i) out[i] = T(1) / (T(1) + std::exp(-in[i]));
}

template <typename T>
void SigmoidBackward(const T* out, const T* gout, size_t n, T* gin) {
  for (size_t i = 0; i < n; ++i) gin[i] = gout[i] * out[i] * (T(1) - out[i]);
}

// Argmax stores the flat in-plane index of the winning element; ties go to
// the first element in row-major window order, which keeps the routed
// gradient deterministic.
template <typename T>
void MaxPool2x2Forward(const T* in, int c, int h, int w, T* out,
                       int32_t* argmax) {
  const int oh = h / 2, ow = w / 2;
  const size_t plane = static_cast<size_t>(h) * w;
  const size_t oplane = static_cast<size_t>(oh) * ow;
  for (int ic = 0; ic < c; ++ic) {
    const T* inp = in + ic * plane;
    T* outp = out + ic * oplane;
    int32_t* am = argmax + ic * oplane;
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        int best_idx = (2 * y) * w + 2 * x;
        T best = inp[best_idx];
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            int idx = (2 * y + dy) * w + (2 * x + dx);
            if (inp[idx] > best) {
              best = inp[idx];
              best_idx = idx;
            }
          }
        }
        outp[y * ow + x] = best;
        am[y * ow + x] = best_idx;
      }
    }
  }
}

template <typename T>
void MaxPool2x2Backward(const int32_t* argmax, const T* gout, int c, int h,
                        int w, T* gin) {
  const int oh = h / 2, ow = w / 2;
  const size_t plane = static_cast<size_t>(h) * w;
  const size_t oplane = static_cast<size_t>(oh) * ow;
  std::fill(gin, gin + static_cast<size_t>(c) * plane, T(0));
  for (int ic = 0; ic < c; ++ic) {
    const int32_t* am = argmax + ic * oplane;
    const T* gp = gout + ic * oplane;
    T* gi = gin + ic * plane;
    for (size_t i = 0; i < oplane; ++i) gi[am[i]] += gp[i];
  }
}

// Stride equals the kernel size, so each output pixel receives exactly one
// tap per input channel.
template <typename T>
void TConv2x2Forward(const T* in, int ci, int h, int w, const T* weight,
                     const T* bias, int co, T* out) {
  const int oh = 2 * h, ow = 2 * w;
  const size_t plane = static_cast<size_t>(h) * w;
  const size_t oplane = static_cast<size_t>(oh) * ow;
  for (int oc = 0; oc < co; ++oc) {
    std::fill(out + oc * oplane, out + (oc + 1) * oplane, bias[oc]);
  }
  for (int ic = 0; ic < ci; ++ic) {
    const T* inp = in + ic * plane;
    for (int oc = 0; oc < co; ++oc) {
      T* outp = out + oc * oplane;
      const T* wk = weight + ((ic * co) + oc) * 4;
      for (int y = 0; y < h; ++y) {
        for (int dy = 0; dy < 2; ++dy) {
          T* orow = outp + (2 * y + dy) * ow;
          const T* ir = inp + y * w;
          const T w00 = wk[dy * 2 + 0], w01 = wk[dy * 2 + 1];
          for (int x = 0; x < w; ++x) {
            orow[2 * x] += w00 * ir[x];
            orow[2 * x + 1] += w01 * ir[x];
          }
        }
      }
    }
  }
}

template <typename T>
void TConv2x2BackwardInput(const T* gout, int co, int h, int w,
                           const T* weight, int ci, T* gin) {
  // h, w are the *input* dims of the forward pass.
  const int oh = 2 * h, ow = 2 * w;
  const size_t plane = static_cast<size_t>(h) * w;
  const size_t oplane = static_cast<size_t>(oh) * ow;
  std::fill(gin, gin + static_cast<size_t>(ci) * plane, T(0));
  for (int ic = 0; ic < ci; ++ic) {
    T* gi = gin + ic * plane;
    for (int oc = 0; oc < co; ++oc) {
      const T* gp = gout + oc * oplane;
      const T* wk = weight + ((ic * co) + oc) * 4;
      for (int y = 0; y < h; ++y) {
        for (int dy = 0; dy < 2; ++dy) {
          const T* gr = gp + (2 * y + dy) * ow;
          T* gir = gi + y * w;
          const T w00 = wk[dy * 2 + 0], w01 = wk[dy * 2 + 1];
          for (int x = 0; x < w; ++x) {
            gir[x] += w00 * gr[2 * x] + w01 * gr[2 * x + 1];
          }
        }
      }
    }
  }
}

template <typename T>
void TConv2x2BackwardParams(const T* in, int ci, int h, int w, const T* gout,
                            int co, T* gweight, T* gbias) {
  const int oh = 2 * h, ow = 2 * w;
  const size_t plane = static_cast<size_t>(h) * w;
  const size_t oplane = static_cast<size_t>(oh) * ow;
  for (int oc = 0; oc < co; ++oc) {
    const T* gp = gout + oc * oplane;
    T acc = T(0);
    for (size_t i = 0; i < oplane; ++i) acc += gp[i];
    gbias[oc] += acc;
  }
  for (int ic = 0; ic < ci; ++ic) {
    const T* inp = in + ic * plane;
    for (int oc = 0; oc < co; ++oc) {
      const T* gp = gout + oc * oplane;
      T* gw = gweight + ((ic * co) + oc) * 4;
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          T acc = T(0);
          for (int y = 0; y < h; ++y) {
            const T* gr = gp + (2 * y + dy) * ow + dx;
            const T* ir = inp + y * w;
            for (int x = 0; x < w; ++x) acc += gr[2 * x] * ir[x];
          }
          gw[dy * 2 + dx] += acc;
        }
      }
    }
  }
}

}  // namespace evsound

#endif  // EVSOUND_LAYERS_H_
