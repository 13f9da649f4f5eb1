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

// End-to-end experiment runner. Stages share one output directory:
//
//   corpus     corpus.jsonl, corpus_stats.txt
//   augment    sft.jsonl
//   sft        ckpt_init.json, ckpt_sft.json, sft_log.csv
//   select     selection.jsonl
//   rl         ckpt_rl.json, rl_rewards.csv
//   eval       eval_init.json, eval_sft.json, eval.json, predictions.jsonl
//   calibrate  ckpt_fast.json, scored.jsonl, calibration.json
//
// plus manifest.json and summary.json. Stage seeds are
// derive_seed(master, stage name), so a stage re-run in isolation draws the
// same numbers as it does inside a full run.

#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reveal/backends.hpp"
#include "reveal/config.hpp"
#include "reveal/corpus_forge.hpp"
#include "reveal/dapo.hpp"
#include "reveal/detector.hpp"
#include "reveal/document.hpp"
#include "reveal/eval.hpp"
#include "reveal/policy.hpp"
#include "reveal/reasoning.hpp"
#include "reveal/reward.hpp"
#include "reveal/selector.hpp"
#include "reveal/sft.hpp"

namespace reveal {

inline constexpr std::string_view kToolVersion = "0.1.0";

inline std::uint64_t stage_seed(std::uint64_t master, std::string_view stage) {
  return derive_seed(master, stage);
}

// ---------------------------------------------------------------------------
// Train/test split. All documents derived from one human source land on the
// same side, so no test text has a sibling in training.

struct DataSplit {
  std::vector<Document> train;
  std::vector<Document> test;
};

inline std::string split_group(const Document& d) {
  return d.human_ref_id ? *d.human_ref_id : d.id;
}

inline DataSplit split_by_group(const std::vector<Document>& corpus, double test_fraction,
                                std::uint64_t seed) {
  DataSplit s;
  for (const auto& d : corpus) {
    Rng rng(derive_seed(seed, split_group(d)));
    (uniform01(rng) < test_fraction ? s.test : s.train).push_back(d);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Stage helpers shared by `run` and the single-stage subcommands.

inline PolicyShape policy_shape(const Config& c, std::size_t vocab_size) {
  PolicyShape s;
  s.vocab_size = vocab_size;
  s.embed_dim = c.policy.embed_dim;
  s.hidden_dim = c.policy.hidden_dim;
  s.context = c.policy.context;
  return s;
}

inline std::vector<RlPrompt> rl_prompts(const PolicyParams& p, const std::vector<SftInstance>& data) {
  std::vector<RlPrompt> out;
  out.reserve(data.size());
  for (const auto& inst : data)
    out.push_back({inst.doc_id, encode_prompt(p, inst.prompt), prompt_document_text(inst.prompt),
                   inst.label});
  return out;
}

inline RewardFn make_reward_fn(GeneratorClient& judge, const Taxonomy& tax, TraceMode mode) {
  return [&judge, tax, mode](const RlPrompt& pr, const std::string& output) {
    return total_reward(pr.doc_text, parse_trace(output, tax, mode), pr.gold, judge);
  };
}

struct EvalRun {
  EvalResult result;
  std::vector<std::pair<std::string, Prediction>> predictions;  // (doc id, prediction)
};

inline EvalRun evaluate_policy(const PolicyParams& p, const std::vector<Document>& docs,
                               const Taxonomy& tax, const DetectOptions& opts, bool unify,
                               std::size_t parallelism) {
  EvalRun run;
  run.predictions = parallel_map<std::pair<std::string, Prediction>>(
      docs.size(), parallelism, [&](std::size_t i) {
        const ReasoningTrace t = detect(docs[i].text, p, tax, opts);
        return std::pair<std::string, Prediction>{docs[i].id,
                                                  {tax.gold_for(docs[i].label), t.answer_label}};
      });
  std::vector<Prediction> preds;
  for (const auto& [_, pr] : run.predictions) preds.push_back(pr);
  run.result = evaluate(preds, tax, unify);
  return run;
}

// Three-class direct-answer model trained with the plain label loss; its
// answer-position logits drive the AIGC score.
inline PolicyParams train_fast_scorer(const std::vector<Document>& train, const Config& c,
                                      std::uint64_t seed) {
  const Taxonomy three = Taxonomy::three();
  const auto data = direct_answer_dataset(train, three);
  PolicyParams p = PolicyParams::random(vocab_for(data, three), policy_shape(c, 0),
                                        derive_seed(seed, "init"), c.policy.init_scale);
  SftOptions o;
  o.lambda = c.calibrate.lambda;
  o.epochs = c.calibrate.epochs;
  o.batch_size = c.sft.batch_size;
  o.learning_rate = c.calibrate.lr;
  o.optimizer = parse_optimizer(c.sft.optimizer);
  o.seed = derive_seed(seed, "train");
  o.parallelism = c.parallelism;
  return train_sft(std::move(p), data, o).params;
}

// ---------------------------------------------------------------------------

struct RunSummary {
  OrderedJson json;
};

namespace detail {

inline std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void write_json(const std::filesystem::path& path, const OrderedJson& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

inline std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return hex64(fnv1a(bytes));
}

inline OrderedJson rl_log_json(const std::vector<RlStepLog>& log) {
  if (log.empty()) return nullptr;
  std::optional<std::size_t> attained;
  for (const auto& l : log) {
    if (l.format_violation_rate < 0.02) {
      attained = l.step;
      break;
    }
  }
  OrderedJson j;
  j["steps"] = log.size();
  j["first_total"] = log.front().mean.total;
  j["last_total"] = log.back().mean.total;
  j["first_fmt"] = log.front().mean.fmt;
  j["last_fmt"] = log.back().mean.fmt;
  j["first_violation_rate"] = log.front().format_violation_rate;
  j["last_violation_rate"] = log.back().format_violation_rate;
  j["format_attained_step"] = attained ? OrderedJson(*attained) : OrderedJson(nullptr);
  return j;
}

}  // namespace detail

// Runs the configured stages. A stage that is not listed reuses its artifact
// from the output directory when one exists and is skipped otherwise, so a run
// can resume after any stage. The corpus and SFT data are always required.
inline RunSummary run_experiment(const Config& c) {
  namespace fs = std::filesystem;
  const fs::path out(c.paths.out_dir);
  fs::create_directories(out);
  const Taxonomy tax = Taxonomy::from_name(c.taxonomy);
  const TraceMode mode = trace_mode(c.flags.use_cot);
  const std::string manifest_id = config_hash(c);
  const std::string started = detail::utc_now();
  auto cache = c.paths.prompt_cache.empty() ? nullptr
                                            : std::make_shared<PromptCache>(c.paths.prompt_cache);
  BackendOptions bopts{cache, {}};
  OrderedJson seeds, checkpoints, summary;
  summary["manifest_id"] = manifest_id;
  summary["flags"] = config_to_json(c)["flags"];

  // corpus
  std::vector<Document> corpus;
  if (c.has_stage("corpus")) {
    if (!fs::exists(c.paths.human_sources))
      throw ConfigError("paths.human_sources", "file not found: " + c.paths.human_sources);
    auto ingest = ingest_human_sources(read_jsonl(c.paths.human_sources));
    for (const auto& r : ingest.rejected)
      log::warn("human source rejected", {{"id", r.id}, {"reason", r.reason}});
    auto humans = std::move(ingest.accepted);
    if (c.corpus.max_humans > 0 && humans.size() > c.corpus.max_humans) humans.resize(c.corpus.max_humans);
    std::vector<ClientPtr> gens;
    for (const auto& g : c.backends.generators) gens.push_back(make_client(g, bopts));
    CorpusOptions co;
    co.intervention_rate = c.corpus.intervention;
    co.length_tolerance = c.corpus.length_tolerance;
    co.attempts = c.corpus.attempts;
    co.temperature = c.corpus.temperature;
    co.seed = seeds["corpus"] = stage_seed(c.seed, "corpus");
    co.parallelism = c.parallelism;
    auto build = build_corpus(humans, gens, co);
    for (const auto& f : build.failures)
      log::warn("generation failed", {{"human_id", f.human_id}, {"generator", f.generator},
                                      {"kind", f.kind}, {"error", f.error}});
    corpus = std::move(build.corpus);
    write_corpus((out / "corpus.jsonl").string(), corpus);
    std::ofstream((out / "corpus_stats.txt")) << format_stats(corpus_stats(corpus));
    log::info("corpus built", {{"documents", corpus.size()}, {"failures", build.failures.size()}});
  } else {
    corpus = read_corpus((out / "corpus.jsonl").string());
  }
  summary["corpus_documents"] = corpus.size();
  const DataSplit split = split_by_group(corpus, c.split.test_fraction, stage_seed(c.seed, "split"));
  summary["train_documents"] = split.train.size();
  summary["test_documents"] = split.test.size();

  // augment
  std::vector<SftInstance> sft_data;
  if (c.has_stage("augment")) {
    if (c.flags.use_cot) {
      auto teacher = make_client(c.backends.teacher, bopts);
      AugmentOptions ao;
      ao.retries = c.augment.retries;
      ao.temperature = c.augment.temperature;
      ao.parallelism = c.parallelism;
      auto res = augment_dataset(split.train, *teacher, tax, ao);
      sft_data = std::move(res.instances);
      summary["augment_rejections"] = res.rejections.size();
    } else {
      sft_data = direct_answer_dataset(split.train, tax);
    }
    write_sft((out / "sft.jsonl").string(), sft_data);
  } else {
    sft_data = read_sft((out / "sft.jsonl").string(), tax);
  }
  if (sft_data.empty()) throw EmptyInput("no training instances after augmentation");

  // policy init + sft
  seeds["policy_init"] = stage_seed(c.seed, "policy_init");
  PolicyParams init = PolicyParams::random(vocab_for(sft_data, tax), policy_shape(c, 0),
                                           seeds["policy_init"].get<std::uint64_t>(),
                                           c.policy.init_scale);
  save_checkpoint((out / "ckpt_init.json").string(), init);
  checkpoints["init"] = checkpoint_hash(init);
  PolicyParams params = init;
  std::optional<PolicyParams> sft_params;
  if (c.flags.use_sft) {
    if (c.has_stage("sft")) {
      SftOptions so;
      so.lambda = c.flags.use_weighted ? c.sft.lambda : 1.0;
      so.epochs = c.sft.epochs;
      so.batch_size = c.sft.batch_size;
      so.learning_rate = c.sft.lr;
      so.max_grad_norm = c.sft.max_grad_norm;
      so.optimizer = parse_optimizer(c.sft.optimizer);
      so.seed = seeds["sft"] = stage_seed(c.seed, "sft");
      so.parallelism = c.parallelism;
      auto res = train_sft(init, sft_data, so);
      write_sft_log((out / "sft_log.csv").string(), res.epochs);
      save_checkpoint((out / "ckpt_sft.json").string(), res.params);
      sft_params = std::move(res.params);
    } else if (fs::exists(out / "ckpt_sft.json")) {
      sft_params = load_checkpoint((out / "ckpt_sft.json").string());
    }
    if (sft_params) {
      checkpoints["sft"] = checkpoint_hash(*sft_params);
      params = *sft_params;
    }
  }

  // select + rl
  std::vector<RlStepLog> rl_log;
  if (c.flags.use_rl) {
    std::vector<SftInstance> pool;
    const std::uint64_t select_seed = seeds["select"] = stage_seed(c.seed, "select");
    if (c.has_stage("select")) {
      SelectionResult sel;
      if (c.flags.use_selection) {
        PolicySelectOptions po;
        po.k = c.select.k;
        po.seed = select_seed;
        po.parallelism = c.parallelism;
        po.temperature = c.select.temperature;
        po.max_tokens = c.rl.max_tokens;
        po.mode = mode;
        sel = select_by_variance(sft_data, params, tax, po);
        if (sel.retained.empty()) {
          // Every prompt is uniformly right or wrong; fall back to a random
          // pool so the RL stage still runs and logs its reward curve.
          log::warn("variance selection retained no prompts; using a random pool");
          sel = select_random(sft_data, c.select.random_n ? c.select.random_n : sft_data.size() / 2,
                              select_seed);
        }
      } else {
        std::size_t n = c.select.random_n;
        if (n == 0) n = sft_data.size() / 2;
        sel = select_random(sft_data, n, select_seed);
      }
      JsonlWriter w((out / "selection.jsonl").string());
      for (const auto& r : sel.records) w.write(to_json(r));
      pool = retained_subset(sft_data, sel);
    } else if (fs::exists(out / "selection.jsonl")) {
      std::vector<std::string> keep;
      for (const auto& j : read_jsonl((out / "selection.jsonl").string()))
        if (j.value("selected", false)) keep.push_back(j.at("doc_id").get<std::string>());
      std::sort(keep.begin(), keep.end());
      pool = retained_subset(sft_data, SelectionResult{keep, {}});
    }
    summary["selection"] = {{"pool", sft_data.size()}, {"retained", pool.size()}};

    if (c.has_stage("rl") && !pool.empty()) {
      auto judge = make_client(c.backends.judge, bopts);
      RlTrainOptions ro;
      ro.step.group_size = c.rl.g;
      ro.step.clip = {c.rl.eps_low, c.rl.eps_high};
      ro.step.learning_rate = c.rl.lr;
      ro.step.temperature = c.rl.temperature;
      ro.step.max_tokens = c.rl.max_tokens;
      ro.step.ratio = c.rl.ratio == "token" ? RatioMode::kToken : RatioMode::kSequence;
      ro.step.parallelism = c.parallelism;
      ro.steps = c.rl.steps;
      ro.batch_prompts = c.rl.batch_prompts;
      ro.seed = seeds["rl"] = stage_seed(c.seed, "rl");
      auto res = train_rl(params, rl_prompts(params, pool), make_reward_fn(*judge, tax, mode), ro);
      rl_log = std::move(res.log);
      params = std::move(res.params);
      write_reward_log((out / "rl_rewards.csv").string(), rl_log);
      save_checkpoint((out / "ckpt_rl.json").string(), params);
      checkpoints["rl"] = checkpoint_hash(params);
    } else if (!c.has_stage("rl") && fs::exists(out / "ckpt_rl.json")) {
      params = load_checkpoint((out / "ckpt_rl.json").string());
      checkpoints["rl"] = checkpoint_hash(params);
    }
    summary["rl"] = detail::rl_log_json(rl_log);
  }

  // eval
  if (c.has_stage("eval")) {
    DetectOptions dopts;
    dopts.cot = c.flags.use_cot;
    dopts.max_tokens = c.eval.max_tokens;
    auto emit = [&](const std::string& file, const EvalResult& r) {
      OrderedJson j = to_json(r);
      j["manifest_id"] = manifest_id;
      detail::write_json(out / file, j);
    };
    const auto e_init = evaluate_policy(init, split.test, tax, dopts, c.eval.unify, c.parallelism);
    emit("eval_init.json", e_init.result);
    summary["accuracy_init"] = e_init.result.accuracy;
    summary["macro_f1_init"] = e_init.result.macro_f1;
    if (sft_params) {
      const auto e_sft = evaluate_policy(*sft_params, split.test, tax, dopts, c.eval.unify, c.parallelism);
      emit("eval_sft.json", e_sft.result);
      summary["accuracy_sft"] = e_sft.result.accuracy;
      summary["macro_f1_sft"] = e_sft.result.macro_f1;
    }
    const auto e = evaluate_policy(params, split.test, tax, dopts, c.eval.unify, c.parallelism);
    emit("eval.json", e.result);
    JsonlWriter w((out / "predictions.jsonl").string());
    for (const auto& [id, pr] : e.predictions) w.write(to_json(id, pr));
    summary["accuracy"] = e.result.accuracy;
    summary["macro_f1"] = e.result.macro_f1;
  }

  // calibrate
  if (c.has_stage("calibrate")) {
    const std::uint64_t cal_seed = seeds["calibrate"] = stage_seed(c.seed, "calibrate");
    PolicyParams fast = train_fast_scorer(split.train, c, cal_seed);
    save_checkpoint((out / "ckpt_fast.json").string(), fast);
    checkpoints["fast"] = checkpoint_hash(fast);
    ToyScorer scorer(fast);
    const Taxonomy three = Taxonomy::three();
    auto scored = parallel_map<ScoredSample>(split.test.size(), c.parallelism, [&](std::size_t i) {
      return ScoredSample{scorer.score(split.test[i].text), three.gold_for(split.test[i].label)};
    });
    JsonlWriter w((out / "scored.jsonl").string());
    for (std::size_t i = 0; i < scored.size(); ++i) {
      OrderedJson j{{"id", split.test[i].id}};
      j.update(to_json(scored[i]));
      w.write(j);
    }
    if (!scored.empty()) {
      OrderedJson j = to_json(calibration_table(scored, three));
      j["manifest_id"] = manifest_id;
      detail::write_json(out / "calibration.json", j);
    }
  }

  detail::write_json(out / "summary.json", summary);

  OrderedJson manifest;
  manifest["manifest_id"] = manifest_id;
  manifest["tool"] = "reveal";
  manifest["version"] = std::string(kToolVersion);
  manifest["config"] = config_to_json(c);
  manifest["seeds"] = seeds;
  manifest["checkpoints"] = checkpoints;
  OrderedJson artifacts = OrderedJson::object();
  for (const auto& entry : fs::directory_iterator(out)) {
    const auto name = entry.path().filename().string();
    if (name == "manifest.json" || !entry.is_regular_file()) continue;
    artifacts[name] = detail::file_hash(entry.path());
  }
  // directory_iterator order is unspecified; sort for stable output.
  OrderedJson sorted = OrderedJson::object();
  std::vector<std::string> names;
  for (const auto& [k, _] : artifacts.items()) names.push_back(k);
  std::sort(names.begin(), names.end());
  for (const auto& n : names) sorted[n] = artifacts[n];
  manifest["artifacts"] = sorted;
  manifest["started_at"] = started;
  manifest["finished_at"] = detail::utc_now();
  detail::write_json(out / "manifest.json", manifest);
  log::info("run finished", {{"out_dir", out.string()}, {"manifest_id", manifest_id}});
  return {summary};
}

}  // namespace reveal
