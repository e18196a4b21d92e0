/* Copyright 2026 The evsound Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C API of the evsound shared library: synthetic electric-vehicle interior
 * sound datasets, convolutional-autoencoder anomaly detection, and
 * proxy-anomaly model selection.
 *
 * All functions return a status code (EVS_OK on success); evs_last_error()
 * returns a thread-local message for the most recent failure on the calling
 * thread. Objects are opaque handles owned by the library and released with
 * the matching *_free function.
 */

#ifndef EVSOUND_EVSOUND_H_
#define EVSOUND_EVSOUND_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes; the CLI uses them verbatim as exit codes. */
enum {
  EVS_OK = 0,
  EVS_ERROR = 1,
  EVS_ERROR_CONFIG = 2,
  EVS_ERROR_DATA = 3,
  EVS_ERROR_NUMERIC = 4
};

typedef struct evs_config evs_config;
typedef struct evs_spectrogram evs_spectrogram;
typedef struct evs_model evs_model;

const char* evs_version(void);

/* Message for the last failing call on this thread; empty string if none. */
const char* evs_last_error(void);

/* --- configuration ------------------------------------------------------ */

/* name: "desk" or "paper". */
int evs_config_preset(const char* name, evs_config** out);
/* JSON config file; a "preset" key selects the base, other keys override. */
int evs_config_load(const char* path, evs_config** out);
int evs_config_set_seed(evs_config* cfg, uint64_t seed);
int evs_config_set_out_dir(evs_config* cfg, const char* dir);
int evs_config_set_threads(evs_config* cfg, int n_threads);
/* Serialized effective config; free with evs_string_free. */
int evs_config_to_json(const evs_config* cfg, char** out_json);
void evs_config_free(evs_config* cfg);

/* --- commands ------------------------------------------------------------ */

/* Generates the dataset into the config's output directory. */
int evs_gen(const evs_config* cfg, int write_wav);
/* Runs the model-selection experiment on a generated dataset. */
int evs_experiment(const evs_config* cfg, const char* dataset_dir);
/* Writes error-map / anomaly-mask / saliency PGMs for the given sample ids,
 * plus latents.csv and scores.csv for the whole dataset. */
int evs_explain(const char* model_path, const char* dataset_dir,
                const char* const* sample_ids, size_t n_ids,
                const char* out_dir);
/* Re-validates a dataset directory (files, hashes, invariants). */
int evs_verify(const char* dataset_dir);
/* Renders a text summary of an experiment report directory; free the string
 * with evs_string_free. */
int evs_report(const char* report_dir, char** out_text);

void evs_string_free(char* s);

/* --- spectrogram files --------------------------------------------------- */

int evs_spectrogram_load(const char* path, evs_spectrogram** out);
int evs_spectrogram_save(const evs_spectrogram* spec, const char* path);
/* domain: 0 = decibel, 1 = normalized. Any output pointer may be NULL. */
int evs_spectrogram_info(const evs_spectrogram* spec, uint32_t* n_freq,
                         uint32_t* n_rpm, float* freq_resolution_hz,
                         float* rpm_max, int* domain);
/* Row-major values, frequency rows ascending; n_freq * n_rpm floats. */
const float* evs_spectrogram_data(const evs_spectrogram* spec);
void evs_spectrogram_free(evs_spectrogram* spec);

/* --- trained models ------------------------------------------------------ */

int evs_model_load(const char* path, evs_model** out);
int evs_model_info(const evs_model* model, uint32_t* n_blocks,
                   uint32_t* n_filters, uint32_t* in_freq, uint32_t* in_rpm);
/* Mean squared reconstruction error of one normalized spectrogram. */
int evs_model_score(const evs_model* model, const evs_spectrogram* spec,
                    double* out_score);
void evs_model_free(evs_model* model);

#ifdef __cplusplus
}
#endif

#endif /* EVSOUND_EVSOUND_H_ */
