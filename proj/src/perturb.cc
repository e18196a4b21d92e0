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

#include "perturb.h"

#include <algorithm>
#include <cmath>

#include "errors.h"

namespace evsound {

namespace {

float Clip01(double v) {
  return static_cast<float>(std::clamp(v, 0.0, 1.0));
}

}  // namespace

const char* PerturbationKindName(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::kAddRpm: return "add_rpm";
    case PerturbationKind::kAddFreq: return "add_freq";
    case PerturbationKind::kAddOrder: return "add_order";
  }
  return "unknown";
}

Spectrogram Perturb(const Spectrogram& spec, const PerturbationParams& params,
                    Rng& rng) {
  if (spec.domain() != Domain::kNormalized) {
    throw DataError("perturbations operate on normalized spectrograms");
  }
  const GridSpec& g = spec.grid();
  Spectrogram out = spec;
  const double delta = rng.Uniform(params.delta_min, params.delta_max);

  switch (params.kind) {
    case PerturbationKind::kAddRpm: {
      if (params.line_width < 1 ||
          params.line_width > static_cast<int>(g.n_rpm)) {
        throw ConfigError("add_rpm width out of range");
      }
      int start = static_cast<int>(
          rng.UniformInt(g.n_rpm - params.line_width + 1));
      for (uint32_t i = 0; i < g.n_freq; ++i) {
        for (int j = start; j < start + params.line_width; ++j) {
          out.At(i, j) = Clip01(out.At(i, j) + delta);
        }
      }
      return out;
    }
    case PerturbationKind::kAddFreq: {
      if (params.line_width < 1 ||
          params.line_width > static_cast<int>(g.n_freq)) {
        throw ConfigError("add_freq width out of range");
      }
      int start = static_cast<int>(
          rng.UniformInt(g.n_freq - params.line_width + 1));
      for (int i = start; i < start + params.line_width; ++i) {
        for (uint32_t j = 0; j < g.n_rpm; ++j) {
          out.At(i, j) = Clip01(out.At(i, j) + delta);
        }
      }
      return out;
    }
    case PerturbationKind::kAddOrder: {
      const int n_orders = static_cast<int>(
          std::llround((params.order_max - params.order_min) * 2.0)) + 1;
      if (n_orders < 1) throw ConfigError("empty half-order set");
      for (int attempt = 0; attempt < 10; ++attempt) {
        double c = params.order_min +
                   0.5 * static_cast<double>(rng.UniformInt(n_orders));
        bool touched = false;
        Spectrogram candidate = spec;
        for (uint32_t j = 0; j < g.n_rpm; ++j) {
          double fc = c * g.RpmAt(j) / 60.0;
          double half = params.order_band_hz / 2.0;
          long k_lo = static_cast<long>(
              std::ceil((fc - half) / g.freq_resolution_hz));
          long k_hi = static_cast<long>(
              std::floor((fc + half) / g.freq_resolution_hz));
          k_lo = std::max(k_lo, 0L);
          k_hi = std::min(k_hi, static_cast<long>(g.n_freq) - 1);
          for (long k = k_lo; k <= k_hi; ++k) {
            candidate.At(static_cast<int>(k), j) =
                Clip01(spec.At(static_cast<int>(k), j) + delta);
            touched = true;
          }
        }
        if (touched) return candidate;
      }
      throw DataError("add_order: no in-grid track after 10 redraws");
    }
  }
  throw ConfigError("unknown perturbation kind");
}

std::vector<LabeledSample> BuildAugmentedValidationSet(
    const std::vector<LabeledSample>& healthy_val,
    const std::vector<PerturbationParams>& params, Rng& rng) {
  const size_t p = params.size();
  if (p == 0) throw ConfigError("need at least one perturbation");
  if (healthy_val.size() < p) {
    throw DataError("healthy validation set smaller than the subset count");
  }
  std::vector<LabeledSample> out;
  out.reserve(2 * healthy_val.size());
  for (const auto& s : healthy_val) out.push_back(s);

  // Near-equal subsets, remainder assigned to the earliest subsets.
  const size_t base = healthy_val.size() / p;
  const size_t rem = healthy_val.size() % p;
  size_t pos = 0;
  for (size_t subset = 0; subset < p; ++subset) {
    size_t count = base + (subset < rem ? 1 : 0);
    for (size_t k = 0; k < count; ++k, ++pos) {
      const LabeledSample& src = healthy_val[pos];
      Rng sample_rng = rng.Derive(pos, subset);
      LabeledSample proxy;
      proxy.id = src.id + "#" + PerturbationKindName(params[subset].kind);
      proxy.label = SampleLabel::kProxyAnomaly;
      proxy.spec = Perturb(src.spec, params[subset], sample_rng);
      proxy.source_id = src.id;
      proxy.detail = PerturbationKindName(params[subset].kind);
      proxy.seed = sample_rng.seed();
      out.push_back(std::move(proxy));
    }
  }
  return out;
}

}  // namespace evsound
