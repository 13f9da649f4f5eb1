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

// Command-line front end. Exit codes: 0 success, 1 domain error, 2 usage.

#pragma once

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "reveal/backends.hpp"
#include "reveal/config.hpp"
#include "reveal/pipeline.hpp"

namespace reveal {

namespace detail {

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void emit_json(const OrderedJson& j, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  f << j.dump(2) << '\n';
}

}  // namespace detail

inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"reveal: AI-generated text detection pipeline on a toy policy"};
  app.name("reveal");
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "debug|info|warn|error|off")
      ->check(CLI::IsMember({"debug", "info", "warn", "error", "off"}));

  std::function<void()> action;
  std::uint64_t seed = 7;
  std::size_t parallelism = 1;
  std::string taxonomy = "three";
  std::string out_path;

  auto common_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--parallelism", parallelism, "worker threads")->check(CLI::PositiveNumber);
  };
  auto tax_opt = [&](CLI::App* sub) {
    sub->add_option("--taxonomy", taxonomy, "binary|three")->check(CLI::IsMember({"binary", "three"}));
  };

  // build-corpus
  std::string humans_path;
  std::vector<std::string> generators = {"mock:alpha", "mock:beta"};
  double intervention = 0.2, tolerance = 0.2;
  std::string cache_path;
  {
    auto* sub = app.add_subcommand("build-corpus", "ingest human sources and generate AI-Native/AI-Polish documents");
    sub->add_option("--humans,--human", humans_path, "human source records (JSONL)")->required();
    sub->add_option("--generators,--backend", generators, "generator backends")->delimiter(',');
    sub->add_option("--intervention,--intervention-rate", intervention, "humanize rate")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--tolerance,--length-tol", tolerance, "length tolerance")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--cache", cache_path, "prompt cache (JSONL)");
    sub->add_option("--out", out_path, "corpus output (JSONL)")->required();
    common_seed(sub);
    sub->callback([&] {
      action = [&] {
        auto ingest = ingest_human_sources(read_jsonl(humans_path));
        for (const auto& r : ingest.rejected)
          log::warn("human source rejected", {{"id", r.id}, {"reason", r.reason}});
        BackendOptions bo;
        if (!cache_path.empty()) bo.cache = std::make_shared<PromptCache>(cache_path);
        std::vector<ClientPtr> gens;
        for (const auto& g : generators) gens.push_back(make_client(g, bo));
        CorpusOptions co;
        co.intervention_rate = intervention;
        co.length_tolerance = tolerance;
        co.seed = seed;
        co.parallelism = parallelism;
        auto build = build_corpus(ingest.accepted, gens, co);
        for (const auto& f : build.failures)
          log::warn("generation failed", {{"human_id", f.human_id}, {"generator", f.generator},
                                          {"kind", f.kind}, {"error", f.error}});
        write_corpus(out_path, build.corpus);
        out << format_stats(corpus_stats(build.corpus));
      };
    });
  }

  // augment-reasoning
  std::string corpus_path, teacher = "mock:teacher";
  bool no_cot = false;
  {
    auto* sub = app.add_subcommand("augment-reasoning", "build reasoning traces with a teacher that sees the label");
    sub->add_option("--corpus", corpus_path, "corpus (JSONL)")->required();
    sub->add_option("--teacher", teacher, "teacher backend");
    sub->add_flag("--no-cot", no_cot, "emit direct-answer targets instead");
    sub->add_option("--cache", cache_path, "prompt cache (JSONL)");
    sub->add_option("--out", out_path, "SFT instances (JSONL)")->required();
    tax_opt(sub);
    common_seed(sub);
    sub->callback([&] {
      action = [&] {
        const Taxonomy tax = Taxonomy::from_name(taxonomy);
        const auto corpus = read_corpus(corpus_path);
        std::vector<SftInstance> data;
        if (no_cot) {
          data = direct_answer_dataset(corpus, tax);
        } else {
          BackendOptions bo;
          if (!cache_path.empty()) bo.cache = std::make_shared<PromptCache>(cache_path);
          auto client = make_client(teacher, bo);
          AugmentOptions ao;
          ao.parallelism = parallelism;
          auto res = augment_dataset(corpus, *client, tax, ao);
          data = std::move(res.instances);
          out << "rejected " << res.rejections.size() << " of " << corpus.size() << "\n";
        }
        write_sft(out_path, data);
        out << "wrote " << data.size() << " instances to " << out_path << "\n";
      };
    });
  }

  // sft
  std::string data_path, init_ckpt, log_path;
  double lambda = 2.0, lr = 1e-2;
  std::size_t epochs = 3, batch = 16;
  std::string optimizer = "adam";
  {
    auto* sub = app.add_subcommand("sft", "outcome-weighted supervised fine-tuning of the toy policy");
    sub->add_option("--data", data_path, "SFT instances (JSONL)")->required();
    sub->add_option("--init", init_ckpt, "starting checkpoint (default: fresh random policy)");
    sub->add_option("--lambda", lambda, "answer-token weight")->check(CLI::PositiveNumber);
    sub->add_option("--epochs", epochs, "epochs");
    sub->add_option("--batch", batch, "batch size")->check(CLI::PositiveNumber);
    sub->add_option("--lr", lr, "learning rate")->check(CLI::PositiveNumber);
    sub->add_option("--optimizer", optimizer, "adam|sgd")->check(CLI::IsMember({"adam", "sgd"}));
    sub->add_option("--log", log_path, "per-epoch loss CSV");
    sub->add_option("--out", out_path, "output checkpoint")->required();
    tax_opt(sub);
    common_seed(sub);
    sub->callback([&] {
      action = [&] {
        const Taxonomy tax = Taxonomy::from_name(taxonomy);
        const auto data = read_sft(data_path, tax);
        PolicyParams p = init_ckpt.empty()
                             ? PolicyParams::random(vocab_for(data, tax), PolicyShape{}, derive_seed(seed, "policy_init"))
                             : load_checkpoint(init_ckpt);
        SftOptions so;
        so.lambda = lambda;
        so.epochs = epochs;
        so.batch_size = batch;
        so.learning_rate = lr;
        so.optimizer = parse_optimizer(optimizer);
        so.seed = seed;
        so.parallelism = parallelism;
        auto res = train_sft(std::move(p), data, so);
        if (!log_path.empty()) write_sft_log(log_path, res.epochs);
        save_checkpoint(out_path, res.params);
        out << "saved " << out_path << " (" << checkpoint_hash(res.params) << ")\n";
      };
    });
  }

  // select-rl
  std::string ckpt_path;
  std::size_t k = 8, random_n = 0, select_max_tokens = 48;
  double select_temp = 1.0;
  std::string select_mode = "variance";
  {
    auto* sub = app.add_subcommand("select-rl", "keep prompts whose K rollouts disagree in correctness");
    sub->add_option("--data", data_path, "SFT instances (JSONL)")->required();
    sub->add_option("--ckpt", ckpt_path, "policy checkpoint")->required();
    sub->add_option("--k", k, "rollouts per prompt")->check(CLI::Range(2, 1 << 16));
    sub->add_option("--temp", select_temp, "sampling temperature")->check(CLI::PositiveNumber);
    sub->add_option("--max-tokens", select_max_tokens, "rollout length cap")->check(CLI::PositiveNumber);
    sub->add_option("--mode", select_mode, "variance|random")->check(CLI::IsMember({"variance", "random"}));
    sub->add_option("--n", random_n, "prompts to draw in random mode (default: half)");
    sub->add_option("--cache", cache_path, "selection score cache (JSONL)");
    sub->add_flag("--no-cot", no_cot, "parse rollouts in direct-answer mode");
    sub->add_option("--out", out_path, "selection records (JSONL)")->required();
    tax_opt(sub);
    common_seed(sub);
    sub->callback([&] {
      action = [&] {
        const Taxonomy tax = Taxonomy::from_name(taxonomy);
        const auto data = read_sft(data_path, tax);
        SelectionResult sel;
        if (select_mode == "random") {
          sel = select_random(data, random_n ? random_n : data.size() / 2, seed);
        } else {
          const auto p = load_checkpoint(ckpt_path);
          std::optional<SelectionCache> cache;
          if (!cache_path.empty()) cache.emplace(cache_path);
          PolicySelectOptions po;
          po.k = k;
          po.seed = seed;
          po.parallelism = parallelism;
          po.mode = trace_mode(!no_cot);
          po.temperature = select_temp;
          po.max_tokens = select_max_tokens;
          po.cache = cache ? &*cache : nullptr;
          sel = select_by_variance(data, p, tax, po);
        }
        JsonlWriter w(out_path);
        for (const auto& r : sel.records) w.write(to_json(r));
        out << "retained " << sel.retained.size() << " of " << data.size() << "\n";
      };
    });
  }

  // rl
  std::string selection_path, judge = "mock:judge", rewards_path;
  std::size_t g = 8, steps = 50, batch_prompts = 8, max_tokens = 48;
  double eps_low = 0.2, eps_high = 0.28, temperature = 1.0;
  bool token_ratio = false;
  {
    auto* sub = app.add_subcommand("rl", "clipped group-relative policy optimisation");
    sub->add_option("--data", data_path, "SFT instances (JSONL)")->required();
    sub->add_option("--ckpt", ckpt_path, "starting checkpoint")->required();
    sub->add_option("--selection", selection_path, "restrict to prompts selected in this file");
    sub->add_option("--judge", judge, "consistency judge backend");
    sub->add_option("--g", g, "rollouts per prompt")->check(CLI::Range(2, 1 << 16));
    sub->add_option("--eps-low", eps_low, "lower clip")->check(CLI::Range(1e-9, 1.0 - 1e-9));
    sub->add_option("--eps-high", eps_high, "upper clip")->check(CLI::PositiveNumber);
    sub->add_option("--lr", lr, "learning rate")->check(CLI::PositiveNumber);
    sub->add_option("--steps", steps, "optimisation steps");
    sub->add_option("--batch-prompts", batch_prompts, "prompts per step")->check(CLI::PositiveNumber);
    sub->add_option("--temperature", temperature, "sampling temperature")->check(CLI::PositiveNumber);
    sub->add_option("--max-tokens", max_tokens, "rollout length cap")->check(CLI::PositiveNumber);
    sub->add_flag("--token-ratio", token_ratio, "token-level importance ratios");
    sub->add_flag("--no-cot", no_cot, "direct-answer format");
    sub->add_option("--rewards", rewards_path, "per-step reward CSV");
    sub->add_option("--out", out_path, "output checkpoint")->required();
    tax_opt(sub);
    common_seed(sub);
    sub->callback([&] {
      action = [&] {
        const Taxonomy tax = Taxonomy::from_name(taxonomy);
        auto data = read_sft(data_path, tax);
        if (!selection_path.empty()) {
          std::vector<std::string> keep;
          for (const auto& j : read_jsonl(selection_path))
            if (j.value("selected", false)) keep.push_back(j.at("doc_id").get<std::string>());
          std::sort(keep.begin(), keep.end());
          data = retained_subset(data, SelectionResult{keep, {}});
        }
        auto p = load_checkpoint(ckpt_path);
        auto judge_client = make_client(judge);
        RlTrainOptions ro;
        ro.step.group_size = g;
        ro.step.clip = {eps_low, eps_high};
        ro.step.learning_rate = lr;
        ro.step.temperature = temperature;
        ro.step.max_tokens = max_tokens;
        ro.step.ratio = token_ratio ? RatioMode::kToken : RatioMode::kSequence;
        ro.step.parallelism = parallelism;
        ro.steps = steps;
        ro.batch_prompts = batch_prompts;
        ro.seed = seed;
        auto res = train_rl(p, rl_prompts(p, data),
                            make_reward_fn(*judge_client, tax, trace_mode(!no_cot)), ro);
        if (!rewards_path.empty()) write_reward_log(rewards_path, res.log);
        save_checkpoint(out_path, res.params);
        if (!res.log.empty())
          out << "mean reward " << res.log.front().mean.total << " -> " << res.log.back().mean.total << "\n";
      };
    });
  }

  // eval
  std::string pred_path;
  bool unify = false;
  {
    auto* sub = app.add_subcommand("eval", "accuracy, macro-F1 and confusion matrix of predictions");
    sub->add_option("--pred", pred_path, "predictions (JSONL with gold, pred)")->required();
    sub->add_flag("--unify", unify, "collapse AI-Polish/AI-Native to AI before scoring");
    sub->add_option("--out", out_path, "result JSON (default: stdout)");
    tax_opt(sub);
    sub->callback([&] {
      action = [&] {
        auto r = evaluate(read_predictions(pred_path), Taxonomy::from_name(taxonomy), unify);
        detail::emit_json(to_json(r), out_path, out);
      };
    });
  }

  // score / scan
  std::string text_path, backend = "mock:rigged";
  std::size_t min_block = 20;
  {
    auto* sub = app.add_subcommand("score", "AIGC score of a whole document");
    sub->add_option("--text", text_path, "text file")->required();
    sub->add_option("--backend", backend, "toy:<ckpt> | mock:rigged | http:<model>");
    sub->callback([&] {
      action = [&] {
        auto scorer = make_scorer(backend);
        const std::string text = detail::read_text_file(text_path);
        if (text.empty()) throw EmptyInput("score: empty text");
        const AigcScore s = scorer->score(text);
        OrderedJson j = to_json(s);
        j["verdict"] = Taxonomy::three().labels[s.argmax()];
        out << j.dump(2) << '\n';
      };
    });
  }
  {
    auto* sub = app.add_subcommand("scan", "paragraph-level AIGC scores");
    sub->add_option("--text", text_path, "text file")->required();
    sub->add_option("--backend", backend, "toy:<ckpt> | mock:rigged | http:<model>");
    sub->add_option("--min-block", min_block, "minimum tokens per block");
    sub->add_option("--out", out_path, "report JSON (default: stdout)");
    sub->add_option("--parallelism", parallelism, "worker threads")->check(CLI::PositiveNumber);
    sub->callback([&] {
      action = [&] {
        auto scorer = make_scorer(backend);
        const auto reports = scan(detail::read_text_file(text_path), *scorer, {min_block}, parallelism);
        detail::emit_json(scan_json(reports), out_path, out);
      };
    });
  }

  // calibrate
  std::string scored_path;
  {
    auto* sub = app.add_subcommand("calibrate", "10-bin accuracy table of AIGC scores");
    sub->add_option("--scored", scored_path, "scored samples (JSONL with p_human, p_polish, p_native, gold)")
        ->required();
    sub->add_option("--out", out_path, "table JSON (default: stdout)");
    sub->callback([&] {
      action = [&] { detail::emit_json(to_json(calibration_table(read_scored(scored_path))), out_path, out); };
    });
  }

  // run
  std::string config_path;
  {
    auto* sub = app.add_subcommand("run", "run the configured pipeline stages");
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->callback([&] {
      action = [&] {
        const Config c = load_config(config_path);
        out << run_experiment(c).json.dump(2) << '\n';
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  static const std::map<std::string, log::Level> kLevels = {
      {"debug", log::Level::kDebug}, {"info", log::Level::kInfo}, {"warn", log::Level::kWarn},
      {"error", log::Level::kError}, {"off", log::Level::kOff}};
  log::set_level(kLevels.at(log_level));
  try {
    if (action) action();
    return 0;
  } catch (const std::exception& e) {
    log::event(log::Level::kError, e.what());
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace reveal
