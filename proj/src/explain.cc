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

#include "explain.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "errors.h"

namespace evsound {

std::vector<double> ErrorMap(const Model& m, const Spectrogram& spec) {
  Spectrogram recon = Reconstruct(m, spec);
  std::vector<double> e(spec.grid().NumPixels());
  for (size_t i = 0; i < e.size(); ++i) {
    double d = static_cast<double>(spec.values()[i]) -
               static_cast<double>(recon.values()[i]);
    e[i] = d * d;
  }
  return e;
}

PixelStats ComputePixelStats(
    const Model& m, const std::vector<const Spectrogram*>& train_set) {
  if (train_set.empty()) {
    throw DataError("pixel statistics need a non-empty training set");
  }
  const GridSpec grid = train_set[0]->grid();
  const size_t n_px = grid.NumPixels();
  std::vector<std::vector<double>> errors;
  errors.reserve(train_set.size());
  for (const auto* s : train_set) {
    if (s->grid() != grid) throw DataError("pixel stats: grid mismatch");
    errors.push_back(ErrorMap(m, *s));
  }
  PixelStats stats;
  stats.grid = grid;
  stats.n_samples = static_cast<int>(train_set.size());
  stats.mu.assign(n_px, 0.0);
  stats.sigma.assign(n_px, 0.0);
  const double n = static_cast<double>(train_set.size());
  for (const auto& e : errors) {
    for (size_t i = 0; i < n_px; ++i) stats.mu[i] += e[i];
  }
  for (size_t i = 0; i < n_px; ++i) stats.mu[i] /= n;
  for (const auto& e : errors) {
    for (size_t i = 0; i < n_px; ++i) {
      double d = e[i] - stats.mu[i];
      stats.sigma[i] += d * d;
    }
  }
  for (size_t i = 0; i < n_px; ++i) {
    stats.sigma[i] = std::sqrt(stats.sigma[i] / n);
  }
  return stats;
}

AnomalyMask ComputeAnomalyMask(const std::vector<double>& error_map,
                               const PixelStats& stats) {
  if (error_map.size() != stats.mu.size()) {
    throw DataError("anomaly mask: shape mismatch");
  }
  AnomalyMask out;
  out.grid = stats.grid;
  out.mask.assign(error_map.size(), 0);
  for (size_t i = 0; i < error_map.size(); ++i) {
    double hi = stats.mu[i] + 3.0 * stats.sigma[i];
    double lo = stats.mu[i] - 3.0 * stats.sigma[i];
    if (error_map[i] > hi || error_map[i] < lo) {
      out.mask[i] = 1;
      ++out.positive_count;
    }
  }
  return out;
}

std::vector<double> Saliency(const Model& m, const Spectrogram& spec) {
  if (static_cast<int>(spec.grid().n_freq) != m.in_freq ||
      static_cast<int>(spec.grid().n_rpm) != m.in_rpm) {
    throw DataError("saliency: spectrogram dims do not match the model");
  }
  std::vector<const float*> batch = {spec.values().data()};
  BatchGradients<float> bg =
      LossAndGradients(m, batch, /*want_input_grads=*/true);
  std::vector<double> sal(bg.input_grads[0].size());
  for (size_t i = 0; i < sal.size(); ++i) {
    sal[i] = std::abs(static_cast<double>(bg.input_grads[0][i]));
  }
  return sal;
}

void ExportLatents(const Model& m, const std::vector<LabeledSample>& samples,
                   const std::string& path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open for writing: " + path);
  os << "id,label";
  const size_t latent_len = m.LatentLength();
  for (size_t i = 0; i < latent_len; ++i) os << ",z" << i;
  os << "\n";
  char buf[64];
  for (const auto& s : samples) {
    std::string label;
    switch (s.label) {
      case SampleLabel::kHealthy: label = "healthy"; break;
      case SampleLabel::kProxyAnomaly: label = "proxy_anomaly"; break;
      case SampleLabel::kFault: label = s.detail; break;
    }
    os << s.id << "," << label;
    std::vector<float> z = Encode(m, s.spec);
    for (float v : z) {
      std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
      os << "," << buf;
    }
    os << "\n";
  }
  if (!os) throw DataError("short write: " + path);
}

void SaveMapPgm(const std::vector<double>& map, const GridSpec& grid,
                const std::string& path) {
  double peak = 0.0;
  for (double v : map) peak = std::max(peak, v);
  Spectrogram vis(grid, Domain::kNormalized);
  if (peak > 0.0) {
    for (size_t i = 0; i < map.size(); ++i) {
      vis.values()[i] = static_cast<float>(map[i] / peak);
    }
  }
  SavePgmHeatmap(vis, path);
}

void SaveMaskPgm(const AnomalyMask& mask, const std::string& path) {
  Spectrogram vis(mask.grid, Domain::kNormalized);
  for (size_t i = 0; i < mask.mask.size(); ++i) {
    vis.values()[i] = mask.mask[i] ? 1.0f : 0.0f;
  }
  SavePgmHeatmap(vis, path);
}

}  // namespace evsound
