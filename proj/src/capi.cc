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

#include "evsound/evsound.h"

#include <cstring>
#include <string>

#include "autoencoder.h"
#include "commands.h"
#include "config.h"
#include "errors.h"
#include "spectrogram.h"

namespace {

thread_local std::string g_last_error;

int Fail(evsound::Status status, const char* what) {
  g_last_error = what;
  return static_cast<int>(status);
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
int Guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return EVS_OK;
  } catch (const evsound::Error& e) {
    return Fail(e.status(), e.what());
  } catch (const std::exception& e) {
    return Fail(evsound::Status::kError, e.what());
  } catch (...) {
    return Fail(evsound::Status::kError, "unknown error");
  }
}

char* DupString(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

struct evs_config {
  evsound::ExperimentConfig cfg;
};

struct evs_spectrogram {
  evsound::Spectrogram spec;
};

struct evs_model {
  evsound::Model model;
};

extern "C" {

const char* evs_version(void) { return "1.0.0"; }

const char* evs_last_error(void) { return g_last_error.c_str(); }

int evs_config_preset(const char* name, evs_config** out) {
  if (name == nullptr || out == nullptr) {
    return Fail(evsound::Status::kError, "null argument");
  }
  return Guard([&] {
    *out = new evs_config{evsound::PresetByName(name)};
  });
}

int evs_config_load(const char* path, evs_config** out) {
  if (path == nullptr || out == nullptr) {
    return Fail(evsound::Status::kError, "null argument");
  }
  return Guard([&] {
    *out = new evs_config{evsound::LoadConfigFile(path)};
  });
}

int evs_config_set_seed(evs_config* cfg, uint64_t seed) {
  if (cfg == nullptr) return Fail(evsound::Status::kError, "null config");
  cfg->cfg.master_seed = seed;
  return EVS_OK;
}

int evs_config_set_out_dir(evs_config* cfg, const char* dir) {
  if (cfg == nullptr || dir == nullptr) {
    return Fail(evsound::Status::kError, "null argument");
  }
  cfg->cfg.out_dir = dir;
  return EVS_OK;
}

int evs_config_set_threads(evs_config* cfg, int n_threads) {
  if (cfg == nullptr) return Fail(evsound::Status::kError, "null config");
  cfg->cfg.n_threads = n_threads;
  return EVS_OK;
}

int evs_config_to_json(const evs_config* cfg, char** out_json) {
  if (cfg == nullptr || out_json == nullptr) {
    return Fail(evsound::Status::kError, "null argument");
  }
  return Guard([&] { *out_json = DupString(evsound::ConfigToJson(cfg->cfg)); });
}

void evs_config_free(evs_config* cfg) { delete cfg; }

int evs_gen(const evs_config* cfg, int write_wav) {
  if (cfg == nullptr) return Fail(evsound::Status::kError, "null config");
  return Guard([&] { evsound::CmdGen(cfg->cfg, write_wav != 0); });
}

int evs_experiment(const evs_config* cfg, const char* dataset_dir) {
  if (cfg == nullptr || dataset_dir == nullptr) {
    return Fail(evsound::Status::kError, "null argument");
  }
  return Guard([&] { evsound::CmdExperiment(cfg->cfg, dataset_dir); });
}

int evs_explain(const char* model_path, const char* dataset_dir,
                const char* const* sample_ids, size_t n_ids,
                const char* out_dir) {
  if (model_path == nullptr || dataset_dir == nullptr || out_dir == nullptr ||
      (n_ids > 0 && sample_ids == nullptr)) {
    return Fail(evsound::Status::kError, "null argument");
  }
  return Guard([&] {
    std::vector<std::string> ids(sample_ids, sample_ids + n_ids);
    evsound::CmdExplain(model_path, dataset_dir, ids, out_dir);
  });
}

int evs_verify(const char* dataset_dir) {
  if (dataset_dir == nullptr) {
    return Fail(evsound::Status::kError, "null argument");
  }
  return Guard([&] { evsound::CmdVerify(dataset_dir); });
}

int evs_report(const char* report_dir, char** out_text) {
  if (report_dir == nullptr || out_text == nullptr) {
    return Fail(evsound::Status::kError, "null argument");
  }
  return Guard([&] { *out_text = DupString(evsound::CmdReport(report_dir)); });
}

void evs_string_free(char* s) { delete[] s; }

int evs_spectrogram_load(const char* path, evs_spectrogram** out) {
  if (path == nullptr || out == nullptr) {
    return Fail(evsound::Status::kError, "null argument");
  }
  return Guard([&] {
    *out = new evs_spectrogram{evsound::LoadSpectrogram(path)};
  });
}

int evs_spectrogram_save(const evs_spectrogram* spec, const char* path) {
  if (spec == nullptr || path == nullptr) {
    return Fail(evsound::Status::kError, "null argument");
  }
  return Guard([&] { evsound::SaveSpectrogram(spec->spec, path); });
}

int evs_spectrogram_info(const evs_spectrogram* spec, uint32_t* n_freq,
                         uint32_t* n_rpm, float* freq_resolution_hz,
                         float* rpm_max, int* domain) {
  if (spec == nullptr) {
    return Fail(evsound::Status::kError, "null spectrogram");
  }
  if (n_freq != nullptr) *n_freq = spec->spec.grid().n_freq;
  if (n_rpm != nullptr) *n_rpm = spec->spec.grid().n_rpm;
  if (freq_resolution_hz != nullptr) {
    *freq_resolution_hz = spec->spec.grid().freq_resolution_hz;
  }
  if (rpm_max != nullptr) *rpm_max = spec->spec.grid().rpm_max;
  if (domain != nullptr) *domain = static_cast<int>(spec->spec.domain());
  return EVS_OK;
}

const float* evs_spectrogram_data(const evs_spectrogram* spec) {
  return spec == nullptr ? nullptr : spec->spec.values().data();
}

void evs_spectrogram_free(evs_spectrogram* spec) { delete spec; }

int evs_model_load(const char* path, evs_model** out) {
  if (path == nullptr || out == nullptr) {
    return Fail(evsound::Status::kError, "null argument");
  }
  return Guard([&] { *out = new evs_model{evsound::LoadModel(path)}; });
}

int evs_model_info(const evs_model* model, uint32_t* n_blocks,
                   uint32_t* n_filters, uint32_t* in_freq, uint32_t* in_rpm) {
  if (model == nullptr) return Fail(evsound::Status::kError, "null model");
  if (n_blocks != nullptr) {
    *n_blocks = static_cast<uint32_t>(model->model.arch.n_blocks);
  }
  if (n_filters != nullptr) {
    *n_filters = static_cast<uint32_t>(model->model.arch.n_filters);
  }
  if (in_freq != nullptr) {
    *in_freq = static_cast<uint32_t>(model->model.in_freq);
  }
  if (in_rpm != nullptr) {
    *in_rpm = static_cast<uint32_t>(model->model.in_rpm);
  }
  return EVS_OK;
}

int evs_model_score(const evs_model* model, const evs_spectrogram* spec,
                    double* out_score) {
  if (model == nullptr || spec == nullptr || out_score == nullptr) {
    return Fail(evsound::Status::kError, "null argument");
  }
  return Guard([&] { *out_score = evsound::Score(model->model, spec->spec); });
}

void evs_model_free(evs_model* model) { delete model; }

}  // extern "C"
