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

#include "config.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "errors.h"

namespace evsound {

namespace {

using nlohmann::json;

PiecewiseLinearDb ProfileFromPairs(
    std::initializer_list<std::pair<double, double>> pairs) {
  PiecewiseLinearDb p;
  for (const auto& [x, y] : pairs) {
    p.x.push_back(x);
    p.y_db.push_back(y);
  }
  return p;
}

SqeConfig DefaultSqe() {
  SqeConfig sqe;
  sqe.order_numbers = {4.0, 8.0, 12.0, 16.0};
  sqe.order_profiles = {
      ProfileFromPairs({{0, 55}, {5000, 70}, {10000, 78}}),
      ProfileFromPairs({{0, 50}, {5000, 64}, {10000, 72}}),
      ProfileFromPairs({{0, 46}, {5000, 58}, {10000, 66}}),
      ProfileFromPairs({{0, 42}, {5000, 54}, {10000, 62}}),
  };
  sqe.broadband.freq_knots_hz = {0, 200, 1000, 3000, 6144};
  sqe.broadband.psd_db_at_rest = {26, 22, 8, -8, -10};
  sqe.broadband.psd_db_at_max = {38, 34, 20, 0, -2};
  sqe.faults.imbalance_order_db =
      ProfileFromPairs({{0, 48}, {5000, 58}, {10000, 64}});
  sqe.faults.pwm_track_db =
      ProfileFromPairs({{0, 38}, {5000, 44}, {10000, 50}});
  sqe.faults.wind_psd.freq_knots_hz = {0, 6144};
  sqe.faults.wind_psd.psd_db_at_rest = {8, 8};
  sqe.faults.wind_psd.psd_db_at_max = {14, 14};
  return sqe;
}

// --- JSON helpers: each Merge* only touches keys present in j and rejects
// unknown keys, which gives field-level overrides at every depth. ---

[[noreturn]] void UnknownKey(const std::string& scope, const std::string& key) {
  throw ConfigError("unknown config key: " + scope + "." + key);
}

template <typename Fn>
void ForEachKey(const json& j, const std::string& scope, Fn&& fn) {
  if (!j.is_object()) throw ConfigError(scope + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!fn(it.key(), it.value())) UnknownKey(scope, it.key());
  }
}

PiecewiseLinearDb ProfileFromJson(const json& j, const std::string& scope) {
  if (!j.is_array()) throw ConfigError(scope + " must be [[x, db], ...]");
  PiecewiseLinearDb p;
  for (const auto& pair : j) {
    if (!pair.is_array() || pair.size() != 2) {
      throw ConfigError(scope + " must be [[x, db], ...]");
    }
    p.x.push_back(pair[0].get<double>());
    p.y_db.push_back(pair[1].get<double>());
  }
  return p;
}

json ProfileToJson(const PiecewiseLinearDb& p) {
  json j = json::array();
  for (size_t i = 0; i < p.x.size(); ++i) {
    j.push_back({p.x[i], p.y_db[i]});
  }
  return j;
}

void MergeGrid(const json& j, GridSpec* g) {
  ForEachKey(j, "grid", [&](const std::string& k, const json& v) {
    if (k == "n_freq") g->n_freq = v.get<uint32_t>();
    else if (k == "n_rpm") g->n_rpm = v.get<uint32_t>();
    else if (k == "freq_resolution_hz") g->freq_resolution_hz = v.get<float>();
    else if (k == "rpm_max") g->rpm_max = v.get<float>();
    else return false;
    return true;
  });
}

void MergeTrain(const json& j, TrainConfig* t) {
  ForEachKey(j, "train", [&](const std::string& k, const json& v) {
    if (k == "learning_rate") t->learning_rate = v.get<double>();
    else if (k == "batch_size") t->batch_size = v.get<int>();
    else if (k == "max_epochs") t->max_epochs = v.get<int>();
    else if (k == "adam_beta1") t->adam_beta1 = v.get<double>();
    else if (k == "adam_beta2") t->adam_beta2 = v.get<double>();
    else if (k == "adam_eps") t->adam_eps = v.get<double>();
    else if (k == "patience") t->patience = v.get<int>();
    else return false;
    return true;
  });
}

void MergeBroadband(const json& j, BroadbandComponent* b,
                    const std::string& scope) {
  ForEachKey(j, scope, [&](const std::string& k, const json& v) {
    if (k == "freq_hz") b->freq_knots_hz = v.get<std::vector<double>>();
    else if (k == "psd_db_at_rest")
      b->psd_db_at_rest = v.get<std::vector<double>>();
    else if (k == "psd_db_at_max")
      b->psd_db_at_max = v.get<std::vector<double>>();
    else return false;
    return true;
  });
}

json BroadbandToJson(const BroadbandComponent& b) {
  return json{{"freq_hz", b.freq_knots_hz},
              {"psd_db_at_rest", b.psd_db_at_rest},
              {"psd_db_at_max", b.psd_db_at_max}};
}

PerturbationParams PerturbationFromJson(const json& j) {
  PerturbationParams p;
  bool have_kind = false;
  ForEachKey(j, "perturbations[]", [&](const std::string& k, const json& v) {
    if (k == "kind") {
      std::string name = v.get<std::string>();
      if (name == "add_rpm") p.kind = PerturbationKind::kAddRpm;
      else if (name == "add_freq") p.kind = PerturbationKind::kAddFreq;
      else if (name == "add_order") p.kind = PerturbationKind::kAddOrder;
      else throw ConfigError("unknown perturbation kind: " + name);
      have_kind = true;
    } else if (k == "delta_min") p.delta_min = v.get<double>();
    else if (k == "delta_max") p.delta_max = v.get<double>();
    else if (k == "width") p.line_width = v.get<int>();
    else if (k == "band_hz") p.order_band_hz = v.get<double>();
    else if (k == "order_min") p.order_min = v.get<double>();
    else if (k == "order_max") p.order_max = v.get<double>();
    else return false;
    return true;
  });
  if (!have_kind) throw ConfigError("perturbation entry needs a kind");
  return p;
}

json PerturbationToJson(const PerturbationParams& p) {
  json j{{"kind", PerturbationKindName(p.kind)},
         {"delta_min", p.delta_min},
         {"delta_max", p.delta_max}};
  if (p.kind == PerturbationKind::kAddOrder) {
    j["band_hz"] = p.order_band_hz;
    j["order_min"] = p.order_min;
    j["order_max"] = p.order_max;
  } else {
    j["width"] = p.line_width;
  }
  return j;
}

void MergeSqe(const json& j, SqeConfig* s) {
  ForEachKey(j, "sqe", [&](const std::string& k, const json& v) {
    if (k == "runup") {
      ForEachKey(v, "sqe.runup", [&](const std::string& rk, const json& rv) {
        if (rk == "rpm_start") s->runup.rpm_start = rv.get<double>();
        else if (rk == "rpm_end") s->runup.rpm_end = rv.get<double>();
        else if (rk == "duration_min_s")
          s->runup.duration_min_s = rv.get<double>();
        else if (rk == "duration_max_s")
          s->runup.duration_max_s = rv.get<double>();
        else if (rk == "midpoint_fraction")
          s->runup.midpoint_fraction = rv.get<double>();
        else return false;
        return true;
      });
    } else if (k == "orders") {
      s->order_numbers.clear();
      s->order_profiles.clear();
      for (const auto& o : v) {
        if (!o.contains("order") || !o.contains("profile")) {
          throw ConfigError("sqe.orders entries need order and profile");
        }
        s->order_numbers.push_back(o["order"].get<double>());
        s->order_profiles.push_back(
            ProfileFromJson(o["profile"], "sqe.orders.profile"));
      }
    } else if (k == "broadband") {
      MergeBroadband(v, &s->broadband, "sqe.broadband");
    } else if (k == "order_fluctuation") {
      ForEachKey(v, "sqe.order_fluctuation",
                 [&](const std::string& fk, const json& fv) {
                   if (fk == "peak_fraction")
                     s->order_fluctuation_peak = fv.get<double>();
                   else if (fk == "band_hz") {
                     auto band = fv.get<std::vector<double>>();
                     if (band.size() != 2) {
                       throw ConfigError("band_hz must be [lo, hi]");
                     }
                     s->order_fluctuation_band_lo_hz = band[0];
                     s->order_fluctuation_band_hi_hz = band[1];
                   } else return false;
                   return true;
                 });
    } else if (k == "broadband_randomization") {
      ForEachKey(v, "sqe.broadband_randomization",
                 [&](const std::string& bk, const json& bv) {
                   if (bk == "peak_db")
                     s->broadband_randomization_db = bv.get<double>();
                   else if (bk == "channel_width_hz")
                     s->broadband_channel_width_hz = bv.get<double>();
                   else return false;
                   return true;
                 });
    } else if (k == "faults") {
      ForEachKey(v, "sqe.faults", [&](const std::string& fk, const json& fv) {
        if (fk == "imbalance_profile")
          s->faults.imbalance_order_db =
              ProfileFromJson(fv, "sqe.faults.imbalance_profile");
        else if (fk == "pwm_profile")
          s->faults.pwm_track_db =
              ProfileFromJson(fv, "sqe.faults.pwm_profile");
        else if (fk == "wind_psd")
          MergeBroadband(fv, &s->faults.wind_psd, "sqe.faults.wind_psd");
        else return false;
        return true;
      });
    } else {
      return false;
    }
    return true;
  });
}

void MergeConfig(const json& j, ExperimentConfig* cfg) {
  ForEachKey(j, "config", [&](const std::string& k, const json& v) {
    if (k == "preset") { /* handled by the caller */ }
    else if (k == "master_seed") cfg->master_seed = v.get<uint64_t>();
    else if (k == "out_dir") cfg->out_dir = v.get<std::string>();
    else if (k == "sample_rate_hz") cfg->sample_rate_hz = v.get<double>();
    else if (k == "n_threads") cfg->n_threads = v.get<int>();
    else if (k == "runs") cfg->runs = v.get<int>();
    else if (k == "grid") MergeGrid(v, &cfg->grid);
    else if (k == "dataset") {
      ForEachKey(v, "dataset", [&](const std::string& dk, const json& dv) {
        if (dk == "healthy") cfg->dataset.healthy = dv.get<int>();
        else if (dk == "per_fault") cfg->dataset.per_fault = dv.get<int>();
        else return false;
        return true;
      });
    } else if (k == "split") {
      ForEachKey(v, "split", [&](const std::string& sk, const json& sv) {
        if (sk == "train") cfg->split.train = sv.get<int>();
        else if (sk == "val") cfg->split.val = sv.get<int>();
        else if (sk == "test_healthy") cfg->split.test_healthy = sv.get<int>();
        else if (sk == "test_per_fault")
          cfg->split.test_per_fault = sv.get<int>();
        else return false;
        return true;
      });
    } else if (k == "arch_grid") {
      cfg->arch_grid.clear();
      for (const auto& a : v) {
        cfg->arch_grid.push_back(
            {a.at("n_blocks").get<int>(), a.at("n_filters").get<int>()});
      }
    } else if (k == "train") {
      MergeTrain(v, &cfg->train);
    } else if (k == "strategies") {
      ForEachKey(v, "strategies", [&](const std::string& sk, const json& sv) {
        if (sk == "proposed") cfg->strategies.proposed = sv.get<bool>();
        else if (sk == "val_re") cfg->strategies.val_re = sv.get<bool>();
        else if (sk == "average") cfg->strategies.average = sv.get<bool>();
        else if (sk == "ideal") cfg->strategies.ideal = sv.get<bool>();
        else if (sk == "ext_set") {
          auto flags = sv.get<std::vector<bool>>();
          if (flags.size() != kNumFaultKinds) {
            throw ConfigError("strategies.ext_set needs 5 flags");
          }
          for (int i = 0; i < kNumFaultKinds; ++i) {
            cfg->strategies.ext_set[i] = flags[i];
          }
        } else return false;
        return true;
      });
    } else if (k == "perturbations") {
      cfg->perturbations.clear();
      for (const auto& p : v) cfg->perturbations.push_back(PerturbationFromJson(p));
    } else if (k == "sqe") {
      MergeSqe(v, &cfg->sqe);
    } else {
      return false;
    }
    return true;
  });
}

}  // namespace

void ExperimentConfig::Validate() const {
  if (grid.n_freq == 0 || grid.n_rpm == 0 || grid.freq_resolution_hz <= 0 ||
      grid.rpm_max <= 0) {
    throw ConfigError("invalid grid");
  }
  if (dataset.healthy < 1 || dataset.per_fault < 1) {
    throw ConfigError("dataset sizes must be positive");
  }
  if (split.train < 1 || split.val < 1 || split.test_healthy < 1 ||
      split.test_per_fault < 1) {
    throw ConfigError("split sizes must be positive");
  }
  if (split.train + split.val + split.test_healthy > dataset.healthy) {
    throw ConfigError("healthy splits exceed the healthy sample count");
  }
  if (split.test_per_fault > dataset.per_fault) {
    throw ConfigError("per-fault test split exceeds the per-fault count");
  }
  if (arch_grid.empty()) throw ConfigError("empty architecture grid");
  for (const auto& a : arch_grid) {
    if (a.n_blocks < 1 || a.n_filters < 1) {
      throw ConfigError("invalid architecture in grid");
    }
    const uint32_t div = 1u << a.n_blocks;
    if (grid.n_freq % div != 0 || grid.n_rpm % div != 0) {
      throw ConfigError("grid dims not divisible by 2^n_blocks for (" +
                        std::to_string(a.n_blocks) + ", " +
                        std::to_string(a.n_filters) + ")");
    }
  }
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (perturbations.empty()) throw ConfigError("no perturbations configured");
  if (sqe.order_numbers.size() != sqe.order_profiles.size() ||
      sqe.order_numbers.empty()) {
    throw ConfigError("sqe.orders must pair order numbers with profiles");
  }
  if (!sqe.broadband.freq_knots_hz.empty() &&
      sample_rate_hz < 2.0 * sqe.broadband.freq_knots_hz.back()) {
    throw ConfigError("sample_rate_hz below Nyquist for the broadband table");
  }
  if (train.batch_size < 1 || train.max_epochs < 1 || train.patience < 1) {
    throw ConfigError("invalid training config");
  }
}

ExperimentConfig DeskPreset() {
  ExperimentConfig cfg;
  cfg.preset = "desk";
  cfg.grid = GridSpec::Desk();
  cfg.dataset = {360, 60};
  cfg.split = {200, 60, 100, 60};
  for (int n = 1; n <= 5; ++n) {
    for (int f : {4, 8}) cfg.arch_grid.push_back({n, f});
  }
  cfg.train.max_epochs = 100;
  cfg.train.patience = 5;
  cfg.runs = 3;
  cfg.sqe = DefaultSqe();
  return cfg;
}

ExperimentConfig PaperPreset() {
  ExperimentConfig cfg;
  cfg.preset = "paper";
  cfg.grid = GridSpec::Paper();
  cfg.dataset = {1200, 200};
  cfg.split = {400, 100, 200, 200};
  for (int n = 1; n <= 7; ++n) {
    for (int f : {4, 8, 16, 32}) cfg.arch_grid.push_back({n, f});
  }
  cfg.train.max_epochs = 100;
  cfg.train.patience = 10;
  cfg.runs = 3;
  cfg.sqe = DefaultSqe();
  return cfg;
}

ExperimentConfig PresetByName(const std::string& name) {
  if (name == "desk") return DeskPreset();
  if (name == "paper") return PaperPreset();
  throw ConfigError("unknown preset: " + name);
}

ExperimentConfig ApplyConfigJson(const ExperimentConfig& base,
                                 const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config JSON parse error: ") + e.what());
  }
  ExperimentConfig cfg = base;
  if (j.contains("preset")) {
    cfg = PresetByName(j["preset"].get<std::string>());
  }
  MergeConfig(j, &cfg);
  cfg.Validate();
  return cfg;
}

ExperimentConfig LoadConfigFile(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ApplyConfigJson(DeskPreset(), ss.str());
}

std::string ConfigToJson(const ExperimentConfig& cfg) {
  json orders = json::array();
  for (size_t i = 0; i < cfg.sqe.order_numbers.size(); ++i) {
    orders.push_back({{"order", cfg.sqe.order_numbers[i]},
                      {"profile", ProfileToJson(cfg.sqe.order_profiles[i])}});
  }
  json archs = json::array();
  for (const auto& a : cfg.arch_grid) {
    archs.push_back({{"n_blocks", a.n_blocks}, {"n_filters", a.n_filters}});
  }
  json perts = json::array();
  for (const auto& p : cfg.perturbations) perts.push_back(PerturbationToJson(p));
  std::vector<bool> ext(cfg.strategies.ext_set.begin(),
                        cfg.strategies.ext_set.end());
  json j{
      {"preset", cfg.preset},
      {"master_seed", cfg.master_seed},
      {"out_dir", cfg.out_dir},
      {"sample_rate_hz", cfg.sample_rate_hz},
      {"n_threads", cfg.n_threads},
      {"runs", cfg.runs},
      {"grid",
       {{"n_freq", cfg.grid.n_freq},
        {"n_rpm", cfg.grid.n_rpm},
        {"freq_resolution_hz", cfg.grid.freq_resolution_hz},
        {"rpm_max", cfg.grid.rpm_max}}},
      {"dataset",
       {{"healthy", cfg.dataset.healthy}, {"per_fault", cfg.dataset.per_fault}}},
      {"split",
       {{"train", cfg.split.train},
        {"val", cfg.split.val},
        {"test_healthy", cfg.split.test_healthy},
        {"test_per_fault", cfg.split.test_per_fault}}},
      {"arch_grid", archs},
      {"train",
       {{"learning_rate", cfg.train.learning_rate},
        {"batch_size", cfg.train.batch_size},
        {"max_epochs", cfg.train.max_epochs},
        {"adam_beta1", cfg.train.adam_beta1},
        {"adam_beta2", cfg.train.adam_beta2},
        {"adam_eps", cfg.train.adam_eps},
        {"patience", cfg.train.patience}}},
      {"strategies",
       {{"proposed", cfg.strategies.proposed},
        {"val_re", cfg.strategies.val_re},
        {"average", cfg.strategies.average},
        {"ideal", cfg.strategies.ideal},
        {"ext_set", ext}}},
      {"perturbations", perts},
      {"sqe",
       {{"runup",
         {{"rpm_start", cfg.sqe.runup.rpm_start},
          {"rpm_end", cfg.sqe.runup.rpm_end},
          {"duration_min_s", cfg.sqe.runup.duration_min_s},
          {"duration_max_s", cfg.sqe.runup.duration_max_s},
          {"midpoint_fraction", cfg.sqe.runup.midpoint_fraction}}},
        {"orders", orders},
        {"broadband", BroadbandToJson(cfg.sqe.broadband)},
        {"order_fluctuation",
         {{"peak_fraction", cfg.sqe.order_fluctuation_peak},
          {"band_hz",
           {cfg.sqe.order_fluctuation_band_lo_hz,
            cfg.sqe.order_fluctuation_band_hi_hz}}}},
        {"broadband_randomization",
         {{"peak_db", cfg.sqe.broadband_randomization_db},
          {"channel_width_hz", cfg.sqe.broadband_channel_width_hz}}},
        {"faults",
         {{"imbalance_profile", ProfileToJson(cfg.sqe.faults.imbalance_order_db)},
          {"pwm_profile", ProfileToJson(cfg.sqe.faults.pwm_track_db)},
          {"wind_psd", BroadbandToJson(cfg.sqe.faults.wind_psd)}}}}}};
  return j.dump(2) + "\n";
}

void SaveConfigFile(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open for writing: " + path);
  os << ConfigToJson(cfg);
  if (!os) throw DataError("short write: " + path);
}

}  // namespace evsound
