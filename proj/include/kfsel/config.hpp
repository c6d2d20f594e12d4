// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef KFSEL_CONFIG_HPP_
#define KFSEL_CONFIG_HPP_

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "kfsel/error.hpp"
#include "kfsel/qccr.hpp"

namespace kfsel {

// One vocabulary across docs, config file and CLI flags: every key below is
// also a long flag of the same name, and flags override the file.

struct RunConfig {
  int T = 32;
  int N = 4;
  int K = 4;
  int D = 256;
  double tau = 0.0;           // 0 derives T/8
  double sigma_min = 0.01;
  double sigma_target = 0.0;  // 0 derives 1.5/T
  double alpha = 0.5;
  double dup_threshold = 0.95;
  LambdaTable lambda_table = default_lambda_table();
  double learning_rate = 1e-2;
  int epochs = 300;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 7;
  std::string solver = "dp";
  double lambda_override = -1.0;  // negative = unset
  int workers = 0;                // 0 = available parallelism
  bool no_train = false;
  bool no_qccr = false;
  bool no_sks = false;
  // Synthetic corpus knobs.
  int num_videos = 20;
  int N_gt = 4;
  int entity_vocab_size = 40;
  int segment_count = 8;
  double noise_sigma = 0.05;
  // Optional external ranker backend.
  std::string external_ranker;
  int external_timeout_ms = 2000;

  double resolved_tau() const { return tau > 0.0 ? tau : T / 8.0; }
  double resolved_sigma_target() const {
    return sigma_target > 0.0 ? sigma_target : 1.5 / T;
  }

  void validate() const {
    if (T < 2) throw ConfigError("config: T must be >= 2");
    if (N < 1 || N > T) throw ConfigError("config: need 1 <= N <= T");
    if (K < 1) throw ConfigError("config: K must be >= 1");
    if (D < 8) throw ConfigError("config: D must be >= 8");
    if (tau < 0.0) throw ConfigError("config: tau must be > 0 (or 0 to derive)");
    if (sigma_min <= 0.0) throw ConfigError("config: sigma_min must be > 0");
    if (sigma_target < 0.0) {
      throw ConfigError("config: sigma_target must be > 0 (or 0 to derive)");
    }
    if (alpha < 0.0 || alpha > 1.0) throw ConfigError("config: alpha must be in [0, 1]");
    if (dup_threshold < -1.0 || dup_threshold > 1.0) {
      throw ConfigError("config: dup_threshold must be a cosine in [-1, 1]");
    }
    if (learning_rate < 0.0) throw ConfigError("config: learning_rate must be >= 0");
    if (epochs < 1) throw ConfigError("config: epochs must be >= 1");
    if (solver != "dp" && solver != "greedy" && solver != "brute") {
      throw ConfigError("config: solver must be one of dp|greedy|brute");
    }
    if (workers < 0) throw ConfigError("config: workers must be >= 0");
    for (QuestionType qt : kAllQuestionTypes) {
      const double lam = lambda_for(qt, lambda_table);
      if (lam < 0.0 || !std::isfinite(lam)) {
        throw ConfigError(std::string("config: lambda for '") + to_string(qt) +
                          "' must be finite and >= 0");
      }
    }
  }
};

inline LambdaTable parse_lambda_table(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw ConfigError("lambda_table must be an object with keys "
                      "descriptive/temporal/causal");
  }
  LambdaTable table;
  for (QuestionType qt : kAllQuestionTypes) {
    const char* key = to_string(qt);
    if (!j.contains(key) || !j[key].is_number()) {
      throw ConfigError(std::string("lambda_table is missing a numeric '") +
                        key + "' entry");
    }
    table[qt] = j[key].get<double>();
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (QuestionType qt : kAllQuestionTypes) {
      if (it.key() == to_string(qt)) known = true;
    }
    if (!known) {
      throw ConfigError("lambda_table has an unknown question type '" +
                        it.key() + "'");
    }
  }
  return table;
}

/// Standalone lambda table file: {"descriptive": x, "temporal": y, "causal": z}.
inline LambdaTable load_lambda_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open lambda table file: " + path);
  }
  std::stringstream buf;
  buf << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path, 1, std::string("invalid JSON: ") + e.what());
  }
  return parse_lambda_table(j);
}

/// Applies the keys present in a JSON object onto a RunConfig. Unknown keys
/// warn; type mismatches are configuration errors.
inline void apply_config_json(const nlohmann::json& j, RunConfig& cfg,
                              const std::string& origin) {
  if (!j.is_object()) {
    throw ConfigError(origin + ": config must be a JSON object");
  }
  const auto get_int = [&](const char* key, int& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer()) {
      throw ConfigError(origin + ": key '" + key + "' must be an integer");
    }
    out = j[key].get<int>();
  };
  const auto get_double = [&](const char* key, double& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) {
      throw ConfigError(origin + ": key '" + key + "' must be a number");
    }
    out = j[key].get<double>();
  };
  const auto get_bool = [&](const char* key, bool& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_boolean()) {
      throw ConfigError(origin + ": key '" + key + "' must be a boolean");
    }
    out = j[key].get<bool>();
  };
  const auto get_string = [&](const char* key, std::string& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_string()) {
      throw ConfigError(origin + ": key '" + key + "' must be a string");
    }
    out = j[key].get<std::string>();
  };

  get_int("T", cfg.T);
  get_int("N", cfg.N);
  get_int("K", cfg.K);
  get_int("D", cfg.D);
  get_double("tau", cfg.tau);
  get_double("sigma_min", cfg.sigma_min);
  get_double("sigma_target", cfg.sigma_target);
  get_double("alpha", cfg.alpha);
  get_double("dup_threshold", cfg.dup_threshold);
  if (j.contains("lambda_table")) {
    cfg.lambda_table = parse_lambda_table(j["lambda_table"]);
  }
  get_double("learning_rate", cfg.learning_rate);
  get_int("epochs", cfg.epochs);
  get_double("beta1", cfg.beta1);
  get_double("beta2", cfg.beta2);
  get_double("epsilon", cfg.epsilon);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer()) {
      throw ConfigError(origin + ": key 'seed' must be an integer");
    }
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  get_string("solver", cfg.solver);
  get_double("lambda_override", cfg.lambda_override);
  get_int("workers", cfg.workers);
  get_bool("no_train", cfg.no_train);
  get_bool("no_qccr", cfg.no_qccr);
  get_bool("no_sks", cfg.no_sks);
  get_int("num_videos", cfg.num_videos);
  get_int("N_gt", cfg.N_gt);
  get_int("entity_vocab_size", cfg.entity_vocab_size);
  get_int("segment_count", cfg.segment_count);
  get_double("noise_sigma", cfg.noise_sigma);
  get_string("external_ranker", cfg.external_ranker);
  get_int("external_timeout_ms", cfg.external_timeout_ms);

  static const std::set<std::string> known = {
      "T", "N", "K", "D", "tau", "sigma_min", "sigma_target", "alpha",
      "dup_threshold", "lambda_table", "learning_rate", "epochs", "beta1",
      "beta2", "epsilon", "seed", "solver", "lambda_override", "workers",
      "no_train", "no_qccr", "no_sks", "num_videos", "N_gt",
      "entity_vocab_size", "segment_count", "noise_sigma", "external_ranker",
      "external_timeout_ms"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) {
      std::cerr << "warning: " << origin << ": unknown config key '"
                << it.key() << "'\n";
    }
  }
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open config file: " + path);
  }
  std::stringstream buf;
  buf << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path, 1, std::string("invalid JSON: ") + e.what());
  }
  RunConfig cfg;
  apply_config_json(j, cfg, path);
  return cfg;
}

}  // namespace kfsel

#endif  // KFSEL_CONFIG_HPP_
