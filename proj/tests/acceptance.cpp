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

// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "reveal/pipeline.hpp"
#include "support.hpp"

using namespace reveal;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;
  std::function<void(Outcome&)> body;
};

// ---------------------------------------------------------------------------

void weighted_loss_equivalence(Outcome& o) {
  Rng rng(101);
  const PolicyParams p = testing::tiny_policy(11);
  double worst1 = 0.0, worst2 = 0.0;
  for (int n = 0; n < 100; ++n) {
    const SftInstance inst = testing::random_instance(rng);
    const auto prompt = encode_prompt(p, inst.prompt);
    const auto target = encode_target(p, inst.target.raw);
    const auto score = sequence_logprob(p, prompt, target);
    worst1 = std::max(worst1, std::abs(weighted_loss(p, inst, 1.0, false).loss + score.total));
    // Hand decomposition: tokens strictly between <answer> and </answer>
    // are answer tokens, everything else (tags, <eos>) is reasoning.
    auto tokens = tokenize(inst.target.raw);
    tokens.emplace_back(kEos);
    double expected = 0.0;
    bool in_answer = false;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (tokens[i] == "</answer>") in_answer = false;
      expected -= (in_answer ? 2.0 : 1.0) * score.per_token[i];
      if (tokens[i] == "<answer>") in_answer = true;
    }
    worst2 = std::max(worst2, std::abs(weighted_loss(p, inst, 2.0, false).loss - expected));
  }
  o.detail << "max|diff| lambda=1: " << worst1 << ", lambda=2: " << worst2 << ". ";
  o.check(worst1 <= 1e-9, "lambda=1 equals NLL");
  o.check(worst2 <= 1e-9, "lambda=2 equals hand decomposition");
}

void gradient_fidelity(Outcome& o) {
  double worst_sft = 0.0, worst_rl = 0.0;
  for (int point = 0; point < 5; ++point) {
    Rng rng(200 + point);
    const PolicyParams p = testing::tiny_policy(300 + point);
    const SftInstance inst = testing::random_instance(rng);
    const auto analytic = weighted_loss(p, inst, 2.0).gradient;
    const auto numeric = testing::finite_difference(
        p, [&](const PolicyParams& q) { return weighted_loss(q, inst, 2.0, false).loss; });
    worst_sft = std::max(worst_sft, testing::relative_error(analytic, numeric));
  }
  for (int point = 0; point < 5; ++point) {
    const PolicyParams old = testing::tiny_policy(400 + point);
    // Two groups of G = 4 rollouts sampled from the old policy, then
    // evaluated at a perturbed theta so that ratios differ from 1.
    std::vector<GroupBatch> groups;
    Rng rng(500 + point);
    for (int g = 0; g < 2; ++g) {
      GroupBatch b;
      b.prompt = {7, 8, 9};
      std::vector<double> rewards;
      for (int i = 0; i < 4; ++i) {
        Rollout r = sample(old, b.prompt, 1.0, 5, derive_seed(rng(), i));
        b.completions.push_back(r.generated_tokens);
        b.old_token_logprobs.push_back(r.per_token_logprobs);
        rewards.push_back(static_cast<double>(i % 3));
      }
      b.advantages = compute_advantages(rewards);
      groups.push_back(std::move(b));
    }
    PolicyParams theta = old;
    std::normal_distribution<double> noise(0.0, 0.02);
    for (auto& w : theta.weights) w += noise(rng);
    const ClipConfig cfg;
    std::vector<double> analytic(theta.weights.size(), 0.0);
    surrogate(theta, groups, cfg, RatioMode::kSequence, analytic);
    const auto numeric = testing::finite_difference(theta, [&](const PolicyParams& q) {
      return surrogate(q, groups, cfg, RatioMode::kSequence);
    });
    worst_rl = std::max(worst_rl, testing::relative_error(analytic, numeric));
  }
  o.detail << "max rel err SFT: " << worst_sft << ", RL: " << worst_rl << ". ";
  o.check(worst_sft <= 1e-4, "SFT gradient");
  o.check(worst_rl <= 1e-3, "RL surrogate gradient");
}

void selection_exactness(Outcome& o) {
  const Taxonomy tax = Taxonomy::binary();
  const std::size_t K = 8;
  // Recorded scores per prompt; the rollout function replays them.
  std::vector<SftInstance> data;
  std::map<std::string, std::vector<int>> table;
  Rng rng(31);
  for (int i = 0; i < 1000; ++i) {
    SftInstance s;
    s.doc_id = "p" + std::to_string(i);
    s.label = "AI";
    const double p = uniform01(rng);  // per-prompt difficulty, many at the extremes
    const double q = p < 0.3 ? 0.0 : (p > 0.7 ? 1.0 : uniform01(rng));
    std::vector<int> scores;
    for (std::size_t k = 0; k < K; ++k) scores.push_back(uniform01(rng) < q ? 1 : 0);
    table[s.doc_id] = scores;
    data.push_back(s);
  }
  std::map<std::string, std::size_t> cursor;
  std::mutex mu;
  RolloutFn replay = [&](const SftInstance& inst, std::uint64_t) {
    std::lock_guard lock(mu);
    const int s = table[inst.doc_id][cursor[inst.doc_id]++];
    return parse_trace(render_trace(" x ", s ? "AI" : "Human"), tax);
  };
  SelectOptions so;
  so.k = K;
  const auto sel = select_by_variance(data, replay, so);
  std::set<std::string> brute;
  for (const auto& [id, scores] : table) {
    int sum = 0;
    for (int v : scores) sum += v;
    if (0 < sum && sum < static_cast<int>(K)) brute.insert(id);
  }
  const std::set<std::string> got(sel.retained.begin(), sel.retained.end());
  o.detail << "retained " << got.size() << " (brute force " << brute.size() << "); ";
  o.check(got == brute, "retained set equals brute force");

  // Stochastic policy with p = 0.5, K = 4: P(keep) = 1 - 2 * 0.5^4 = 0.875.
  RolloutFn coin = [&](const SftInstance&, std::uint64_t seed) {
    Rng r(seed);
    return parse_trace(render_trace(" x ", uniform01(r) < 0.5 ? "AI" : "Human"), tax);
  };
  so.k = 4;
  so.seed = 99;
  const auto sel2 = select_by_variance(data, coin, so);
  const double frac = static_cast<double>(sel2.retained.size()) / static_cast<double>(data.size());
  o.detail << "p=0.5,K=4 retained fraction " << frac << ". ";
  o.check(std::abs(frac - 0.875) <= 0.04, "retained fraction 0.875 +- 0.04");
}

void advantage_and_clip_oracles(Outcome& o) {
  auto near = [](const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (std::abs(a[i] - b[i]) > 1e-8) return false;
    return true;
  };
  const double r2 = std::sqrt(2.0);
  o.check(near(compute_advantages(std::vector<double>{1, 0, 1, 0}), {1, -1, 1, -1}), "[1,0,1,0]");
  o.check(near(compute_advantages(std::vector<double>{2, -1, -1}), {r2, -1 / r2, -1 / r2}), "[2,-1,-1]");
  o.check(near(compute_advantages(std::vector<double>{0.7, 0.7, 0.7}), {0, 0, 0}), "all equal");

  Rng rng(77);
  int mismatches = 0;
  for (int i = 0; i < 100; ++i) {
    const double rho = std::exp(std::uniform_real_distribution<double>(-1.0, 1.0)(rng));
    const double adv = std::uniform_real_distribution<double>(-3.0, 3.0)(rng);
    const double eps = std::uniform_real_distribution<double>(0.05, 0.5)(rng);
    if (clipped_term(rho, adv, ClipConfig{eps, eps}) != testing::symmetric_clip_oracle(rho, adv, eps))
      ++mismatches;
  }
  o.detail << "clip mismatches " << mismatches << "/100; ";
  o.check(mismatches == 0, "symmetric clip oracle");

  const PolicyParams p = testing::tiny_policy(5);
  const std::vector<RlPrompt> batch = {{"a", {7, 8}, "", "AI-Native"}, {"b", {9}, "", "Human"}};
  RewardFn constant = [](const RlPrompt&, const std::string&) {
    return RewardBreakdown{1.0, 0.0, 0.5, 1.5};
  };
  RlStepOptions so;
  so.max_tokens = 6;
  const auto step = rl_step(p, batch, constant, so, 3);
  o.check(step.params.weights == p.weights, "uniform rewards leave parameters unchanged");
  o.detail << "uniform-reward step changed " << (step.params.weights == p.weights ? 0 : 1)
           << " parameter vectors. ";
}

void reward_bounds(Outcome& o) {
  const Taxonomy tax = Taxonomy::three();
  const std::vector<std::string> pieces = {"<think>", "</think>", "<answer>", "</answer>", "Human",
                                           "AI-Polish", "AI-Native", "AI", "the tone is formal",
                                           "casual", "polished", "furthermore", "honestly", " ",
                                           "\n", "frankly", "."};
  mock::MockJudge judge;
  // A second judge with random but well-formed verdicts.
  Rng jr(5);
  std::mutex mu;
  FunctionClient random_judge("random", [&](const std::string&, int, double) {
    std::lock_guard lock(mu);
    std::ostringstream s;
    s << '[' << (uniform01(jr) < 0.5 ? 0 : 1) << ", " << uniform01(jr) << ", " << uniform01(jr) << ']';
    return s.str();
  });
  Rng rng(2024);
  const std::string doc = "honestly the tone furthermore frankly delve crucial stuff .";
  std::size_t out_of_bounds = 0, gating = 0, mismatch = 0, violations = 0;
  for (int n = 0; n < 10000; ++n) {
    std::string raw;
    const int len = std::uniform_int_distribution<int>(0, 9)(rng);
    if (n % 3 == 0) {
      raw = render_trace(" the text shows honestly . the tone is casual . ",
                         tax.labels[static_cast<std::size_t>(n / 3) % 3]);
    } else {
      for (int i = 0; i < len; ++i)
        raw += pieces[std::uniform_int_distribution<std::size_t>(0, pieces.size() - 1)(rng)];
    }
    const ReasoningTrace t = parse_trace(raw, tax);
    const std::string gold = tax.labels[static_cast<std::size_t>(n) % 3];
    GeneratorClient& j = n % 2 ? static_cast<GeneratorClient&>(judge) : random_judge;
    const RewardBreakdown r = total_reward(doc, t, gold, j);
    if (r.total < -1.0 || r.total > 2.0) ++out_of_bounds;
    if (r.fmt == -1.0) {
      ++violations;
      if (r.cons != 0.0) ++gating;
    }
    if (accuracy_reward(t, gold) != static_cast<double>(score_rollout(t, gold))) ++mismatch;
  }
  o.detail << "out of bounds " << out_of_bounds << ", fmt=-1 cases " << violations
           << " with nonzero cons " << gating << ", acc/score mismatches " << mismatch << ". ";
  o.check(out_of_bounds == 0, "total in [-1, 2]");
  o.check(violations > 0 && gating == 0, "consistency gated by format");
  o.check(mismatch == 0, "accuracy_reward == score_rollout");
}

// Mean total reward and format-violation rate over every prompt, G samples
// each, with fixed seeds.
std::pair<double, double> measure_policy(const PolicyParams& p, const std::vector<RlPrompt>& prompts,
                                         const RewardFn& reward, std::size_t g, std::size_t max_tokens) {
  double total = 0.0, violations = 0.0;
  for (const auto& pr : prompts) {
    for (std::size_t k = 0; k < g; ++k) {
      const Rollout r = sample(p, pr.prompt, 1.0, max_tokens, derive_seed(derive_seed(4242, pr.id), k));
      const RewardBreakdown b = reward(pr, rollout_text(p, r));
      total += b.total;
      violations += b.fmt < 0 ? 1.0 : 0.0;
    }
  }
  const double n = static_cast<double>(prompts.size() * g);
  return {total / n, violations / n};
}

void rl_learning_signal(Outcome& o) {
  // Bandit: one fixed prompt, one emitted token, reward 1 iff it is "AI".
  {
    const Vocab vocab = Vocab::build({{"classify", "this", "text"}}, Taxonomy::binary().labels);
    PolicyParams p = PolicyParams::random(vocab, PolicyShape{}, 17);
    const std::vector<RlPrompt> batch = {{"bandit", vocab.encode({"classify", "this", "text"}), "", "AI"}};
    RewardFn reward = [](const RlPrompt&, const std::string& out) {
      const double hit = out == "AI" ? 1.0 : 0.0;
      return RewardBreakdown{hit, 0.0, 0.0, hit};
    };
    RlStepOptions so;
    so.max_tokens = 1;
    so.learning_rate = 0.5;
    const int ai = vocab.id("AI");
    auto prob_ai = [&](const PolicyParams& q) {
      const auto z = next_token_logits(q, batch[0].prompt);
      double m = *std::max_element(z.begin(), z.end()), s = 0.0;
      for (double v : z) s += std::exp(v - m);
      return std::exp(z[static_cast<std::size_t>(ai)] - m) / s;
    };
    const double p0 = prob_ai(p);
    int reached = -1;
    for (int step = 0; step < 300; ++step) {
      p = rl_step(p, batch, reward, so, derive_seed(9, static_cast<std::uint64_t>(step))).params;
      if (prob_ai(p) > 0.9) {
        reached = step + 1;
        break;
      }
    }
    o.detail << "bandit P(AI) " << p0 << " -> " << prob_ai(p) << " at step " << reached << "; ";
    o.check(reached > 0, "bandit P(AI) > 0.9 within 300 steps");
  }

  // 200-prompt detection task: brief SFT, then RL with the mock judge.
  {
    std::vector<Json> src;
    for (std::size_t i = 0; i < 120; ++i) src.push_back(synthetic::make_human_source(i, 606));
    auto humans = ingest_human_sources(src).accepted;
    CorpusOptions co;
    co.seed = 606;
    auto corpus = build_corpus(humans, {std::make_shared<mock::MockGenerator>("mock:alpha")}, co).corpus;
    corpus.resize(std::min<std::size_t>(200, corpus.size()));
    const Taxonomy tax = Taxonomy::three();
    mock::MockTeacher teacher;
    const auto data = augment_dataset(corpus, teacher, tax).instances;
    PolicyParams p = PolicyParams::random(vocab_for(data, tax), PolicyShape{}, 606);
    SftOptions so;
    so.epochs = 3;
    so.seed = 1;
    p = train_sft(p, data, so).params;
    const auto prompts = rl_prompts(p, data);
    mock::MockJudge judge;
    const RewardFn reward = make_reward_fn(judge, tax, TraceMode::kThinkThenAnswer);
    RlTrainOptions ro;
    // A larger step than the pipeline default: at 0.01 the violation rate
    // is still falling after 800 steps.
    ro.steps = 300;
    ro.step.learning_rate = 0.1;
    ro.step.max_tokens = 48;
    ro.seed = 8;
    const auto before = measure_policy(p, prompts, reward, 4, ro.step.max_tokens);
    const auto res = train_rl(p, prompts, reward, ro);
    const auto after = measure_policy(res.params, prompts, reward, 4, ro.step.max_tokens);
    o.detail << data.size() << " prompts: mean reward " << before.first << " -> " << after.first
             << ", violation rate " << before.second << " -> " << after.second
             << " (logged step reward " << res.log.front().mean.total << " -> "
             << res.log.back().mean.total << "). ";
    o.check(data.size() == 200, "200 prompts");
    o.check(after.first > before.first, "mean total reward increases");
    o.check(after.second < 0.02, "final format-violation rate < 2%");
  }
}

void aigc_score_checks(Outcome& o) {
  const auto a = aigc_from_probs(1, 0, 0), b = aigc_from_probs(0, 0, 1), c = aigc_from_probs(0.5, 0.5, 0);
  o.detail << "anchors " << a.score << ", " << b.score << ", " << c.score << "; ";
  o.check(a.score == 0.0 && b.score == 1.0 && c.score == 0.25, "anchor cases");
  o.check(aigc_from_probs(0, 0.5, 0.5).score == 0.75, "polish/native midpoint 0.75");
  Rng rng(8);
  std::uniform_real_distribution<double> z(-20, 20), shift(-50, 50), bump(0.01, 5);
  std::size_t shift_bad = 0, mono_bad = 0;
  for (int n = 0; n < 10000; ++n) {
    const double zh = z(rng), zp = z(rng), zn = z(rng), s = shift(rng), d = bump(rng);
    const double base = aigc_score(zh, zp, zn).score;
    if (std::abs(aigc_score(zh + s, zp + s, zn + s).score - base) > 1e-9) ++shift_bad;
    // dS/dz_native = P_native (1 - S) and dS/dz_human = -P_human S. Where
    // those slopes fall below double resolution the change cannot be
    // represented, so only the direction is required there.
    const AigcScore s0 = aigc_score(zh, zp, zn);
    const double up = aigc_score(zh, zp, zn + d).score, down = aigc_score(zh + d, zp, zn).score;
    const bool up_visible = s0.p_native * (1.0 - base) > 1e-9;
    const bool down_visible = s0.p_human * base > 1e-9;
    if (up < base || down > base || (up_visible && up <= base) || (down_visible && down >= base))
      ++mono_bad;
  }
  o.detail << "shift violations " << shift_bad << ", monotonicity violations " << mono_bad << ". ";
  o.check(shift_bad == 0, "shift invariance");
  o.check(mono_bad == 0, "monotonicity");
}

void calibration_checks(Outcome& o) {
  // Well-calibrated generator: the verdict (argmax class) is correct with
  // probability equal to the max class probability.
  Rng rng(1234);
  std::vector<ScoredSample> samples;
  const Taxonomy three = Taxonomy::three();
  std::gamma_distribution<double> gamma(0.3, 1.0);
  for (int n = 0; n < 10000; ++n) {
    double a = gamma(rng) + 1e-12, b = gamma(rng) + 1e-12, c = gamma(rng) + 1e-12;
    const AigcScore s = aigc_from_probs(a / (a + b + c), b / (a + b + c), c / (a + b + c));
    const std::size_t top = s.argmax();
    std::size_t gold = top;
    if (uniform01(rng) >= s.confidence()) gold = (top + 1 + (uniform01(rng) < 0.5 ? 0 : 1)) % 3;
    samples.push_back({s, three.labels[gold]});
  }
  const auto table = calibration_table(samples, three);
  std::size_t total = 0;
  double worst = 0.0;
  for (const auto& bin : table.bins) {
    total += bin.count;
    if (bin.count < 30) continue;  // too few draws to compare
    worst = std::max(worst, std::abs(*bin.accuracy - *bin.mean_confidence));
  }
  o.detail << "max |bin accuracy - implied| " << worst << "; ";
  const auto& first = table.bins.front();
  const auto& last = table.bins.back();
  const auto& mid = table.bins[5];
  o.detail << "accuracy at [0,0.1): " << first.accuracy.value_or(-1) << ", [0.5,0.6): "
           << mid.accuracy.value_or(-1) << ", [0.9,1.0]: " << last.accuracy.value_or(-1) << ". ";
  o.check(total == samples.size(), "bin counts sum to n");
  o.check(worst <= 0.05, "bin accuracy within 0.05 of implied value");
  o.check(first.accuracy && last.accuracy && mid.accuracy &&
              *first.accuracy > *mid.accuracy && *last.accuracy > *mid.accuracy,
          "high confidence at the extremes");
}

void metrics_oracle(Outcome& o) {
  Rng rng(55);
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const Taxonomy tax = n % 2 ? Taxonomy::three() : Taxonomy::binary();
    const std::size_t len = 1 + std::uniform_int_distribution<std::size_t>(0, 40)(rng);
    std::vector<Prediction> preds;
    std::vector<std::string> golds, flat;
    for (std::size_t i = 0; i < len; ++i) {
      const auto g = tax.labels[std::uniform_int_distribution<std::size_t>(0, tax.size() - 1)(rng)];
      const auto k = std::uniform_int_distribution<std::size_t>(0, tax.size())(rng);
      std::optional<std::string> p;
      if (k < tax.size()) p = tax.labels[k];
      preds.push_back({g, p});
      golds.push_back(g);
      flat.push_back(p.value_or(""));
    }
    const EvalResult r = evaluate(preds, tax);
    worst = std::max(worst, std::abs(r.macro_f1 - testing::brute_macro_f1(golds, flat, tax.labels)));
    worst = std::max(worst, std::abs(r.accuracy - testing::brute_accuracy(golds, flat)));
  }
  const EvalResult worked = evaluate(
      {{"Human", "Human"}, {"Human", "AI"}, {"AI", "AI"}, {"AI", "AI"}}, Taxonomy::binary());
  o.detail << "max |diff| vs brute force " << worst << "; worked example accuracy " << worked.accuracy
           << ", macro-F1 " << worked.macro_f1 << ". ";
  o.check(worst <= 1e-12, "brute-force agreement");
  o.check(std::abs(worked.accuracy - 0.75) < 5e-5 && std::abs(worked.macro_f1 - 0.7333) < 5e-5,
          "worked binary example");
}

OrderedJson read_json_file(const fs::path& path) {
  std::ifstream in(path);
  return OrderedJson::parse(in);
}

void end_to_end(Outcome& o) {
  Config base = load_config(std::string(REVEAL_SOURCE_DIR) + "/configs/toy_pipeline.json");
  const fs::path root = fs::absolute("acceptance_runs");
  Config full = base;
  full.paths.out_dir = (root / "full").string();
  const auto s_full = run_experiment(full).json;

  Config no_sft = base;
  no_sft.flags.use_sft = false;
  no_sft.paths.out_dir = (root / "no_sft").string();
  no_sft.stages = {"augment", "sft", "select", "rl", "eval"};
  fs::create_directories(no_sft.paths.out_dir);
  fs::copy_file(fs::path(full.paths.out_dir) / "corpus.jsonl",
                fs::path(no_sft.paths.out_dir) / "corpus.jsonl", fs::copy_options::overwrite_existing);
  const auto s_no_sft = run_experiment(no_sft).json;

  const auto corpus = read_corpus((fs::path(full.paths.out_dir) / "corpus.jsonl").string());
  std::set<Label> labels;
  for (const auto& d : corpus) labels.insert(d.label);
  o.check(corpus.size() >= 300 && labels.size() == 3, ">= 300 documents over three labels");
  for (const char* f : {"corpus.jsonl", "sft.jsonl", "sft_log.csv", "ckpt_init.json", "ckpt_sft.json",
                        "selection.jsonl", "ckpt_rl.json", "rl_rewards.csv", "eval_init.json",
                        "eval_sft.json", "eval.json", "predictions.jsonl", "ckpt_fast.json",
                        "scored.jsonl", "calibration.json", "manifest.json", "summary.json"})
    o.check(fs::exists(fs::path(full.paths.out_dir) / f), std::string("artifact ") + f);

  const double acc = s_full["accuracy"], acc_init = s_full["accuracy_init"], acc_sft = s_full["accuracy_sft"];
  o.detail << corpus.size() << " docs; test accuracy untrained " << acc_init << ", SFT " << acc_sft
           << ", SFT+RL " << acc << ". ";
  o.check(acc > acc_init, "final accuracy > untrained");
  o.check(acc > acc_sft, "final accuracy > w/o RL");

  auto attained = [](const OrderedJson& s) -> std::optional<std::size_t> {
    if (!s.contains("rl") || s["rl"].is_null() || s["rl"]["format_attained_step"].is_null())
      return std::nullopt;
    return s["rl"]["format_attained_step"].get<std::size_t>();
  };
  const auto a_full = attained(s_full), a_no_sft = attained(s_no_sft);
  o.detail << "format reward attained at RL step " << (a_full ? std::to_string(*a_full) : "never")
           << " (full) vs " << (a_no_sft ? std::to_string(*a_no_sft) : "never") << " (w/o SFT). ";
  o.check(a_full.has_value() && (!a_no_sft || *a_no_sft > *a_full),
          "w/o SFT attains the format reward later");
}

void corpus_constraints(Outcome& o) {
  std::vector<Json> src;
  for (std::size_t i = 0; i < 2000; ++i) src.push_back(synthetic::make_human_source(i, 11));
  const auto humans = ingest_human_sources(src).accepted;
  std::vector<ClientPtr> gens;
  for (const char* g : {"mock:g1", "mock:g2", "mock:g3", "mock:g4", "mock:g5"})
    gens.push_back(std::make_shared<mock::MockGenerator>(g));
  CorpusOptions co;
  co.seed = 12;
  co.polish = false;
  const auto build = build_corpus(humans, gens, co);
  std::map<std::string, std::size_t> ref_tokens;
  for (const auto& h : humans) ref_tokens[h.id] = h.token_count;
  std::size_t native = 0, humanized = 0, misaligned = 0;
  for (const auto& d : build.corpus) {
    if (d.label != Label::kAINative) continue;
    ++native;
    humanized += d.humanize_intervention ? 1 : 0;
    const double ref = static_cast<double>(ref_tokens.at(*d.human_ref_id));
    if (std::abs(static_cast<double>(d.token_count) - ref) > co.length_tolerance * ref) ++misaligned;
  }
  const double frac = static_cast<double>(humanized) / static_cast<double>(std::max<std::size_t>(1, native));
  o.detail << native << " AI-Native samples (" << build.failures.size() << " failures), intervention "
           << frac << ", misaligned " << misaligned << "; ";
  o.check(native + build.failures.size() == 10000 && native >= 5000, "10,000-sample run");
  o.check(std::abs(frac - 0.2) <= 0.02, "intervention fraction 20% +- 2");
  o.check(misaligned == 0, "length alignment");

  // Stats totals against an independent whitespace/punctuation recount.
  auto recount = [](const std::string& text) {
    std::size_t n = 0;
    bool in_word = false;
    for (unsigned char ch : text) {
      const bool word = std::isalnum(ch) || ch == '_' || ch == '\'' || ch == '-' || ch >= 0x80;
      if (word) {
        if (!in_word) ++n;
        in_word = true;
      } else {
        in_word = false;
        if (!std::isspace(ch)) ++n;
      }
    }
    return n;
  };
  const auto stats = corpus_stats(build.corpus);
  std::map<Label, std::size_t> tokens, samples;
  for (const auto& d : build.corpus) {
    tokens[d.label] += recount(d.text);
    ++samples[d.label];
  }
  bool equal = true;
  for (Label l : {Label::kHuman, Label::kAINative, Label::kAIPolish})
    equal = equal && stats.at(l).total_tokens == tokens[l] && stats.at(l).samples == samples[l];
  o.detail << "stats totals match recount: " << (equal ? "yes" : "no") << ". ";
  o.check(equal, "corpus_stats totals equal recount");
}

}  // namespace

// Optional arguments select criteria by number, e.g. `acceptance 6 10`.
int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  log::set_level(log::Level::kError);
  const std::vector<Criterion> criteria = {
      {1, "weighted SFT loss equivalence", 10, weighted_loss_equivalence},
      {2, "gradient fidelity (SFT, RL surrogate)", 60, gradient_fidelity},
      {3, "variance selection exactness", 60, selection_exactness},
      {4, "advantage / clip oracles, uniform-reward no-op", 60, advantage_and_clip_oracles},
      {5, "composite reward bounds and gating", 60, reward_bounds},
      {6, "RL learning signal (bandit, 200-prompt task)", 600, rl_learning_signal},
      {7, "AIGC score anchors, shift invariance, monotonicity", 60, aigc_score_checks},
      {8, "calibration table on a calibrated generator", 60, calibration_checks},
      {9, "macro-F1 / accuracy oracle", 60, metrics_oracle},
      {10, "end-to-end pipeline and ablation directionality", 1200, end_to_end},
      {11, "corpus constraints over 10,000 generations", 600, corpus_constraints},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.time_limit_s) {
      o.pass = false;
      o.detail << "[failed: runtime " << secs << " s exceeds " << c.time_limit_s << " s]";
    }
    if (!o.pass) ++failed;
    char head[160];
    std::snprintf(head, sizeof head, "[%s] %2d. %s (%.1f s): ", o.pass ? "PASS" : "FAIL", c.id,
                  c.name.c_str(), secs);
    std::cout << head << o.detail.str() << std::endl;
  }
  const std::size_t ran = only.empty() ? criteria.size() : only.size();
  std::cout << (ran - static_cast<std::size_t>(failed)) << "/" << ran
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
