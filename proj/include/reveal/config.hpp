// Copyright 2026 The reveal Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment configuration: a JSON document whose omitted fields take
// defaults. Unknown keys and out-of-range values are rejected with the dotted
// field name. Relative paths resolve against the config file's directory.

#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "reveal/errors.hpp"
#include "reveal/taxonomy.hpp"
#include "reveal/util.hpp"

namespace reveal {

inline const std::vector<std::string>& pipeline_stages() {
  static const std::vector<std::string> kStages = {"corpus", "augment", "sft", "select",
                                                   "rl",     "eval",    "calibrate"};
  return kStages;
}

struct AblationFlags {
  bool use_sft = true;
  bool use_rl = true;
  bool use_weighted = true;
  bool use_selection = true;
  bool use_cot = true;
  bool operator==(const AblationFlags&) const = default;
};

struct Config {
  std::uint64_t seed = 7;
  std::vector<std::string> stages = pipeline_stages();
  AblationFlags flags;
  std::string taxonomy = "three";
  std::size_t parallelism = 1;

  struct Paths {
    std::string human_sources = "data/human_sources.jsonl";
    std::string out_dir = "runs/default";
    std::string prompt_cache;  // empty = no cache
    bool operator==(const Paths&) const = default;
  } paths;

  struct Backends {
    std::vector<std::string> generators = {"mock:alpha", "mock:beta"};
    std::string teacher = "mock:teacher";
    std::string judge = "mock:judge";
    bool operator==(const Backends&) const = default;
  } backends;

  struct Corpus {
    double intervention = 0.2;
    double length_tolerance = 0.2;
    int attempts = 3;
    double temperature = 0.7;
    std::size_t max_humans = 0;  // 0 = all
    bool operator==(const Corpus&) const = default;
  } corpus;

  struct Split {
    double test_fraction = 0.2;
    bool operator==(const Split&) const = default;
  } split;

  struct Augment {
    int retries = 2;
    double temperature = 1.0;
    bool operator==(const Augment&) const = default;
  } augment;

  struct Policy {
    std::size_t embed_dim = 16;
    std::size_t hidden_dim = 48;
    std::size_t context = 16;
    double init_scale = 0.1;
    bool operator==(const Policy&) const = default;
  } policy;

  struct Sft {
    double lambda = 2.0;
    std::size_t epochs = 3;
    std::size_t batch_size = 16;
    double lr = 0.01;
    double max_grad_norm = 0.0;
    std::string optimizer = "adam";
    bool operator==(const Sft&) const = default;
  } sft;

  struct Select {
    std::size_t k = 8;
    double temperature = 1.0;
    std::size_t random_n = 0;  // w/o selection: sample size, 0 = match retained count
    bool operator==(const Select&) const = default;
  } select;

  struct Rl {
    std::size_t g = 8;
    double eps_low = 0.2;
    double eps_high = 0.28;
    double lr = 0.01;
    std::size_t steps = 200;
    std::size_t batch_prompts = 8;
    double temperature = 1.0;
    std::size_t max_tokens = 48;
    std::string ratio = "sequence";
    bool operator==(const Rl&) const = default;
  } rl;

  struct Eval {
    std::size_t max_tokens = 48;
    bool unify = false;
    bool operator==(const Eval&) const = default;
  } eval;

  struct Calibrate {
    std::size_t epochs = 3;
    double lambda = 1.0;
    double lr = 0.01;
    bool operator==(const Calibrate&) const = default;
  } calibrate;

  bool has_stage(std::string_view s) const {
    return std::find(stages.begin(), stages.end(), s) != stages.end();
  }
  bool operator==(const Config&) const = default;
};

namespace detail {

class ConfigReader {
 public:
  ConfigReader(const Json& j, std::string prefix) : j_(j), prefix_(std::move(prefix)) {
    if (!j_.is_object()) throw ConfigError(prefix_.empty() ? "<root>" : prefix_, "must be an object");
  }

  std::string field(std::string_view key) const {
    return prefix_.empty() ? std::string(key) : prefix_ + "." + std::string(key);
  }

  const Json* get(std::string_view key) {
    seen_.insert(std::string(key));
    auto it = j_.find(std::string(key));
    return it == j_.end() ? nullptr : &*it;
  }

  template <typename T>
  void read(std::string_view key, T& out) {
    const Json* v = get(key);
    if (!v) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v->is_boolean()) throw ConfigError(field(key), "expected a boolean");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v->is_string()) throw ConfigError(field(key), "expected a string");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v->is_number()) throw ConfigError(field(key), "expected a number");
      } else if constexpr (std::is_unsigned_v<T>) {
        if (!v->is_number_unsigned()) throw ConfigError(field(key), "expected a non-negative integer");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v->is_number_integer()) throw ConfigError(field(key), "expected an integer");
      }
      out = v->get<T>();
    } catch (const Json::exception& e) {
      throw ConfigError(field(key), e.what());
    }
  }

  void read_strings(std::string_view key, std::vector<std::string>& out) {
    const Json* v = get(key);
    if (!v) return;
    if (!v->is_array()) throw ConfigError(field(key), "expected an array of strings");
    std::vector<std::string> vals;
    for (const auto& e : *v) {
      if (!e.is_string()) throw ConfigError(field(key), "expected an array of strings");
      vals.push_back(e.get<std::string>());
    }
    out = std::move(vals);
  }

  ConfigReader child(std::string_view key) {
    static const Json kEmpty = Json::object();
    const Json* v = get(key);
    return ConfigReader(v ? *v : kEmpty, field(key));
  }

  void finish() const {
    for (const auto& [k, _] : j_.items())
      if (!seen_.count(k)) throw ConfigError(field(k), "unknown key");
  }

 private:
  const Json& j_;
  std::string prefix_;
  std::set<std::string> seen_;
};

inline void require(bool ok, const std::string& field, const std::string& msg) {
  if (!ok) throw ConfigError(field, msg);
}

inline std::string resolve_path(const std::string& p, const std::filesystem::path& base) {
  if (p.empty()) return p;
  std::filesystem::path path(p);
  if (path.is_absolute() || base.empty()) return path.lexically_normal().string();
  return (base / path).lexically_normal().string();
}

}  // namespace detail

// Builds a validated config from JSON. base_dir anchors relative paths.
inline Config config_from_json(const Json& j, const std::filesystem::path& base_dir = {}) {
  using detail::require;
  Config c;
  detail::ConfigReader root(j, "");
  root.read("seed", c.seed);
  root.read_strings("stages", c.stages);
  root.read("taxonomy", c.taxonomy);
  root.read("parallelism", c.parallelism);
  {
    auto r = root.child("flags");
    r.read("use_sft", c.flags.use_sft);
    r.read("use_rl", c.flags.use_rl);
    r.read("use_weighted", c.flags.use_weighted);
    r.read("use_selection", c.flags.use_selection);
    r.read("use_cot", c.flags.use_cot);
    r.finish();
  }
  {
    auto r = root.child("paths");
    r.read("human_sources", c.paths.human_sources);
    r.read("out_dir", c.paths.out_dir);
    r.read("prompt_cache", c.paths.prompt_cache);
    r.finish();
  }
  {
    auto r = root.child("backends");
    r.read_strings("generators", c.backends.generators);
    r.read("teacher", c.backends.teacher);
    r.read("judge", c.backends.judge);
    r.finish();
  }
  {
    auto r = root.child("corpus");
    r.read("intervention", c.corpus.intervention);
    r.read("length_tolerance", c.corpus.length_tolerance);
    r.read("attempts", c.corpus.attempts);
    r.read("temperature", c.corpus.temperature);
    r.read("max_humans", c.corpus.max_humans);
    r.finish();
  }
  {
    auto r = root.child("split");
    r.read("test_fraction", c.split.test_fraction);
    r.finish();
  }
  {
    auto r = root.child("augment");
    r.read("retries", c.augment.retries);
    r.read("temperature", c.augment.temperature);
    r.finish();
  }
  {
    auto r = root.child("policy");
    r.read("embed_dim", c.policy.embed_dim);
    r.read("hidden_dim", c.policy.hidden_dim);
    r.read("context", c.policy.context);
    r.read("init_scale", c.policy.init_scale);
    r.finish();
  }
  {
    auto r = root.child("sft");
    r.read("lambda", c.sft.lambda);
    r.read("epochs", c.sft.epochs);
    r.read("batch_size", c.sft.batch_size);
    r.read("lr", c.sft.lr);
    r.read("max_grad_norm", c.sft.max_grad_norm);
    r.read("optimizer", c.sft.optimizer);
    r.finish();
  }
  {
    auto r = root.child("select");
    r.read("k", c.select.k);
    r.read("temperature", c.select.temperature);
    r.read("random_n", c.select.random_n);
    r.finish();
  }
  {
    auto r = root.child("rl");
    r.read("g", c.rl.g);
    r.read("eps_low", c.rl.eps_low);
    r.read("eps_high", c.rl.eps_high);
    r.read("lr", c.rl.lr);
    r.read("steps", c.rl.steps);
    r.read("batch_prompts", c.rl.batch_prompts);
    r.read("temperature", c.rl.temperature);
    r.read("max_tokens", c.rl.max_tokens);
    r.read("ratio", c.rl.ratio);
    r.finish();
  }
  {
    auto r = root.child("eval");
    r.read("max_tokens", c.eval.max_tokens);
    r.read("unify", c.eval.unify);
    r.finish();
  }
  {
    auto r = root.child("calibrate");
    r.read("epochs", c.calibrate.epochs);
    r.read("lambda", c.calibrate.lambda);
    r.read("lr", c.calibrate.lr);
    r.finish();
  }
  root.finish();

  for (const auto& s : c.stages)
    require(std::find(pipeline_stages().begin(), pipeline_stages().end(), s) != pipeline_stages().end(),
            "stages", "unknown stage '" + s + "'");
  require(c.taxonomy == "binary" || c.taxonomy == "three", "taxonomy", "must be 'binary' or 'three'");
  require(c.parallelism >= 1, "parallelism", "must be at least 1");
  require(!c.paths.out_dir.empty(), "paths.out_dir", "must not be empty");
  require(!c.backends.generators.empty(), "backends.generators", "needs at least one generator");
  require(c.corpus.intervention >= 0.0 && c.corpus.intervention <= 1.0, "corpus.intervention",
          "must lie in [0, 1]");
  require(c.corpus.length_tolerance > 0.0 && c.corpus.length_tolerance < 1.0,
          "corpus.length_tolerance", "must lie in (0, 1)");
  require(c.corpus.attempts >= 1, "corpus.attempts", "must be at least 1");
  require(c.corpus.temperature >= 0.0, "corpus.temperature", "must be non-negative");
  require(c.split.test_fraction > 0.0 && c.split.test_fraction < 1.0, "split.test_fraction",
          "must lie in (0, 1)");
  require(c.augment.retries >= 0, "augment.retries", "must be non-negative");
  require(c.augment.temperature >= 0.0, "augment.temperature", "must be non-negative");
  require(c.policy.embed_dim >= 1, "policy.embed_dim", "must be positive");
  require(c.policy.hidden_dim >= 1, "policy.hidden_dim", "must be positive");
  require(c.policy.context >= 1, "policy.context", "must be positive");
  require(c.policy.init_scale > 0.0, "policy.init_scale", "must be positive");
  require(c.sft.lambda > 0.0, "sft.lambda", "must be positive");
  require(c.sft.batch_size >= 1, "sft.batch_size", "must be positive");
  require(c.sft.lr > 0.0, "sft.lr", "must be positive");
  require(c.sft.max_grad_norm >= 0.0, "sft.max_grad_norm", "must be non-negative");
  require(c.sft.optimizer == "adam" || c.sft.optimizer == "sgd", "sft.optimizer",
          "must be 'adam' or 'sgd'");
  require(c.select.k >= 2, "select.k", "must be at least 2");
  require(c.select.temperature > 0.0, "select.temperature", "must be positive");
  require(c.rl.g >= 2, "rl.g", "must be at least 2");
  require(c.rl.eps_low > 0.0 && c.rl.eps_low < 1.0, "rl.eps_low", "must lie in (0, 1)");
  require(c.rl.eps_high > 0.0, "rl.eps_high", "must be positive");
  require(c.rl.lr > 0.0, "rl.lr", "must be positive");
  require(c.rl.batch_prompts >= 1, "rl.batch_prompts", "must be positive");
  require(c.rl.temperature > 0.0, "rl.temperature", "must be positive");
  require(c.rl.max_tokens >= 1, "rl.max_tokens", "must be positive");
  require(c.rl.ratio == "sequence" || c.rl.ratio == "token", "rl.ratio", "must be 'sequence' or 'token'");
  require(c.eval.max_tokens >= 1, "eval.max_tokens", "must be positive");
  require(c.calibrate.lambda > 0.0, "calibrate.lambda", "must be positive");
  require(c.calibrate.lr > 0.0, "calibrate.lr", "must be positive");

  c.paths.human_sources = detail::resolve_path(c.paths.human_sources, base_dir);
  c.paths.out_dir = detail::resolve_path(c.paths.out_dir, base_dir);
  c.paths.prompt_cache = detail::resolve_path(c.paths.prompt_cache, base_dir);
  return c;
}

// Every field, defaults included.
inline OrderedJson config_to_json(const Config& c) {
  OrderedJson j;
  j["seed"] = c.seed;
  j["stages"] = c.stages;
  j["taxonomy"] = c.taxonomy;
  j["parallelism"] = c.parallelism;
  j["flags"] = {{"use_sft", c.flags.use_sft},
                {"use_rl", c.flags.use_rl},
                {"use_weighted", c.flags.use_weighted},
                {"use_selection", c.flags.use_selection},
                {"use_cot", c.flags.use_cot}};
  j["paths"] = {{"human_sources", c.paths.human_sources},
                {"out_dir", c.paths.out_dir},
                {"prompt_cache", c.paths.prompt_cache}};
  j["backends"] = {{"generators", c.backends.generators},
                   {"teacher", c.backends.teacher},
                   {"judge", c.backends.judge}};
  j["corpus"] = {{"intervention", c.corpus.intervention},
                 {"length_tolerance", c.corpus.length_tolerance},
                 {"attempts", c.corpus.attempts},
                 {"temperature", c.corpus.temperature},
                 {"max_humans", c.corpus.max_humans}};
  j["split"] = {{"test_fraction", c.split.test_fraction}};
  j["augment"] = {{"retries", c.augment.retries}, {"temperature", c.augment.temperature}};
  j["policy"] = {{"embed_dim", c.policy.embed_dim},
                 {"hidden_dim", c.policy.hidden_dim},
                 {"context", c.policy.context},
                 {"init_scale", c.policy.init_scale}};
  j["sft"] = {{"lambda", c.sft.lambda},
              {"epochs", c.sft.epochs},
              {"batch_size", c.sft.batch_size},
              {"lr", c.sft.lr},
              {"max_grad_norm", c.sft.max_grad_norm},
              {"optimizer", c.sft.optimizer}};
  j["select"] = {{"k", c.select.k},
                 {"temperature", c.select.temperature},
                 {"random_n", c.select.random_n}};
  j["rl"] = {{"g", c.rl.g},
             {"eps_low", c.rl.eps_low},
             {"eps_high", c.rl.eps_high},
             {"lr", c.rl.lr},
             {"steps", c.rl.steps},
             {"batch_prompts", c.rl.batch_prompts},
             {"temperature", c.rl.temperature},
             {"max_tokens", c.rl.max_tokens},
             {"ratio", c.rl.ratio}};
  j["eval"] = {{"max_tokens", c.eval.max_tokens}, {"unify", c.eval.unify}};
  j["calibrate"] = {{"epochs", c.calibrate.epochs},
                    {"lambda", c.calibrate.lambda},
                    {"lr", c.calibrate.lr}};
  return j;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open config file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
  }
  return config_from_json(j, std::filesystem::absolute(path).parent_path());
}

// Identity of an experiment. Settings that cannot change any result (worker
// count, output and cache locations) are left out so reruns elsewhere match.
inline std::string config_hash(const Config& c) {
  OrderedJson j = config_to_json(c);
  j.erase("parallelism");
  j["paths"].erase("out_dir");
  j["paths"].erase("prompt_cache");
  return hex64(fnv1a(j.dump()));
}

}  // namespace reveal
