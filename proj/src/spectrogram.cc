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

#include "spectrogram.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "errors.h"

namespace evsound {

namespace {

constexpr char kMagic[8] = {'E', 'V', 'S', 'P', 'C', '1', '\0', '\0'};
constexpr double kClipLoDb = 0.0;
constexpr double kClipHiDb = 120.0;

template <typename T>
void WriteLe(std::ostream& os, T v) {
  // Little-endian host assumed; asserted at startup via a static check below.
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T ReadLe(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

static_assert(std::endian::native == std::endian::little,
              "file formats assume a little-endian host");

}  // namespace

Spectrogram Preprocess(const Spectrogram& spec) {
  if (spec.domain() == Domain::kNormalized) return spec;
  Spectrogram out(spec.grid(), Domain::kNormalized);
  const auto& in = spec.values();
  auto& v = out.values();
  for (size_t i = 0; i < in.size(); ++i) {
    double x = std::clamp(double{in[i]}, kClipLoDb, kClipHiDb);
    v[i] = static_cast<float>(x / kClipHiDb);
  }
  return out;
}

void SaveSpectrogram(const Spectrogram& spec, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open for writing: " + path);
  os.write(kMagic, sizeof(kMagic));
  WriteLe<uint32_t>(os, spec.grid().n_freq);
  WriteLe<uint32_t>(os, spec.grid().n_rpm);
  WriteLe<float>(os, spec.grid().freq_resolution_hz);
  WriteLe<float>(os, spec.grid().rpm_max);
  WriteLe<uint8_t>(os, static_cast<uint8_t>(spec.domain()));
  const char pad[3] = {0, 0, 0};
  os.write(pad, 3);
  os.write(reinterpret_cast<const char*>(spec.values().data()),
           static_cast<std::streamsize>(spec.values().size() * sizeof(float)));
  if (!os) throw DataError("short write: " + path);
}

Spectrogram LoadSpectrogram(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open: " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0) {
    throw DataError("bad spectrogram magic: " + path);
  }
  GridSpec grid;
  grid.n_freq = ReadLe<uint32_t>(is);
  grid.n_rpm = ReadLe<uint32_t>(is);
  grid.freq_resolution_hz = ReadLe<float>(is);
  grid.rpm_max = ReadLe<float>(is);
  uint8_t domain = ReadLe<uint8_t>(is);
  char pad[3];
  is.read(pad, 3);
  if (grid.n_freq == 0 || grid.n_rpm == 0 || grid.n_freq > (1u << 20) ||
      grid.n_rpm > (1u << 20)) {
    throw DataError("bad spectrogram header: " + path);
  }
  if (domain > 1) throw DataError("bad spectrogram domain tag: " + path);
  Spectrogram spec(grid, static_cast<Domain>(domain));
  is.read(reinterpret_cast<char*>(spec.values().data()),
          static_cast<std::streamsize>(spec.values().size() * sizeof(float)));
  if (!is) throw DataError("truncated spectrogram payload: " + path);
  return spec;
}

void SavePgmHeatmap(const Spectrogram& normalized, const std::string& path) {
  if (normalized.domain() != Domain::kNormalized) {
    throw DataError("PGM export expects a normalized spectrogram");
  }
  const GridSpec& g = normalized.grid();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open for writing: " + path);
  os << "P5\n" << g.n_rpm << " " << g.n_freq << "\n255\n";
  std::vector<uint8_t> row(g.n_rpm);
  for (int i = static_cast<int>(g.n_freq) - 1; i >= 0; --i) {
    for (uint32_t j = 0; j < g.n_rpm; ++j) {
      double v = std::clamp(double{normalized.At(i, j)}, 0.0, 1.0);
      row[j] = static_cast<uint8_t>(std::lround(255.0 * v));
    }
    os.write(reinterpret_cast<const char*>(row.data()), row.size());
  }
  if (!os) throw DataError("short write: " + path);
}

}  // namespace evsound
