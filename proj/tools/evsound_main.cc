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

// Command-line front end. Everything goes through the public C API.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evsound/evsound.h"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string preset = "desk";
  uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir;
  int threads = 0;
};

void AddCommon(CLI::App* cmd, CommonOpts* opts) {
  cmd->add_option("--config", opts->config_path,
                  "JSON config file (overrides the preset)");
  cmd->add_option("--preset", opts->preset, "Config preset: desk or paper")
      ->check(CLI::IsMember({"desk", "paper"}));
  cmd->add_option("--seed", opts->seed, "Master seed")
      ->each([opts](const std::string&) { opts->seed_set = true; });
  cmd->add_option("--out", opts->out_dir, "Output directory");
  cmd->add_option("--threads", opts->threads,
                  "Worker threads (0 = hardware concurrency)");
}

// Builds the effective config; returns nullptr after printing the error.
evs_config* MakeConfig(const CommonOpts& opts) {
  evs_config* cfg = nullptr;
  int rc = opts.config_path.empty()
               ? evs_config_preset(opts.preset.c_str(), &cfg)
               : evs_config_load(opts.config_path.c_str(), &cfg);
  if (rc != EVS_OK) {
    std::fprintf(stderr, "error: %s\n", evs_last_error());
    return nullptr;
  }
  if (opts.seed_set) evs_config_set_seed(cfg, opts.seed);
  if (!opts.out_dir.empty()) evs_config_set_out_dir(cfg, opts.out_dir.c_str());
  evs_config_set_threads(cfg, opts.threads);
  return cfg;
}

int Report(int rc) {
  if (rc != EVS_OK) std::fprintf(stderr, "error: %s\n", evs_last_error());
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evsound: synthetic EV interior sound anomaly detection"};
  app.require_subcommand(1);

  CommonOpts gen_opts;
  bool write_wav = false;
  CLI::App* gen = app.add_subcommand("gen", "Generate a dataset");
  AddCommon(gen, &gen_opts);
  gen->add_flag("--wav", write_wav, "Also render time-domain WAV files");

  CommonOpts exp_opts;
  std::string exp_dataset;
  CLI::App* experiment = app.add_subcommand(
      "experiment", "Train the architecture grid and run model selection");
  AddCommon(experiment, &exp_opts);
  experiment->add_option("--dataset", exp_dataset, "Dataset directory")
      ->required();

  std::string explain_model, explain_dataset, explain_out;
  std::vector<std::string> explain_ids;
  CLI::App* explain = app.add_subcommand(
      "explain", "Error maps, anomaly masks, saliency, latents");
  explain->add_option("--model", explain_model, "Model file (.evae)")
      ->required();
  explain->add_option("--dataset", explain_dataset, "Dataset directory")
      ->required();
  explain->add_option("--out", explain_out, "Output directory")->required();
  explain->add_option("--ids", explain_ids, "Sample ids to explain");

  std::string verify_dataset;
  CLI::App* verify =
      app.add_subcommand("verify", "Re-validate a dataset directory");
  verify->add_option("dataset", verify_dataset, "Dataset directory")
      ->required();

  std::string report_dir;
  CLI::App* report =
      app.add_subcommand("report", "Print an experiment report summary");
  report->add_option("dir", report_dir, "Experiment output directory")
      ->required();

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    evs_config* cfg = MakeConfig(gen_opts);
    if (cfg == nullptr) return EVS_ERROR_CONFIG;
    int rc = Report(evs_gen(cfg, write_wav ? 1 : 0));
    evs_config_free(cfg);
    return rc;
  }
  if (experiment->parsed()) {
    evs_config* cfg = MakeConfig(exp_opts);
    if (cfg == nullptr) return EVS_ERROR_CONFIG;
    int rc = Report(evs_experiment(cfg, exp_dataset.c_str()));
    evs_config_free(cfg);
    return rc;
  }
  if (explain->parsed()) {
    std::vector<const char*> ids;
    ids.reserve(explain_ids.size());
    for (const auto& id : explain_ids) ids.push_back(id.c_str());
    return Report(evs_explain(explain_model.c_str(), explain_dataset.c_str(),
                              ids.data(), ids.size(), explain_out.c_str()));
  }
  if (verify->parsed()) {
    int rc = Report(evs_verify(verify_dataset.c_str()));
    if (rc == EVS_OK) std::printf("dataset ok\n");
    return rc;
  }
  if (report->parsed()) {
    char* text = nullptr;
    int rc = Report(evs_report(report_dir.c_str(), &text));
    if (rc == EVS_OK) {
      std::fputs(text, stdout);
      evs_string_free(text);
    }
    return rc;
  }
  return EVS_ERROR;
}
