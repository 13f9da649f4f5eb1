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

// Group-relative policy optimisation with decoupled clipping.
//
//   J(theta) = mean over prompts of (1/G) sum_i L_i
//   L_i      = min(rho_i * A_i, clip(rho_i, 1 - eps_low, 1 + eps_high) * A_i)
//   rho_i    = pi_theta(r_i | x) / pi_old(r_i | x)      (sequence level)
//   A_i      = (R_i - mean R) / std R                   (population std; 0 if std = 0)

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "reveal/policy.hpp"
#include "reveal/reasoning.hpp"
#include "reveal/reward.hpp"
#include "reveal/util.hpp"

namespace reveal {

struct ClipConfig {
  double eps_low = 0.2;
  double eps_high = 0.28;

  void validate() const {
    if (!(eps_low > 0.0 && eps_low < 1.0)) throw std::invalid_argument("eps_low must lie in (0, 1)");
    if (!(eps_high > 0.0)) throw std::invalid_argument("eps_high must be positive");
  }
};

inline std::vector<double> compute_advantages(std::span<const double> rewards) {
  if (rewards.size() < 2) throw std::invalid_argument("compute_advantages: need at least 2 rewards");
  const double n = static_cast<double>(rewards.size());
  const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double sd = std::sqrt(var / n);
  std::vector<double> adv(rewards.size(), 0.0);
  // Identical rewards carry no signal; the rounded mean can leave a tiny
  // nonzero spread, so test equality directly.
  const bool flat = std::all_of(rewards.begin(), rewards.end(), [&](double r) { return r == rewards[0]; });
  if (flat || !(sd > 0.0)) return adv;
  for (std::size_t i = 0; i < rewards.size(); ++i) adv[i] = (rewards[i] - mean) / sd;
  return adv;
}

inline double clipped_term(double rho, double advantage, const ClipConfig& cfg) {
  const double clipped = std::clamp(rho, 1.0 - cfg.eps_low, 1.0 + cfg.eps_high);
  return std::min(rho * advantage, clipped * advantage);
}

enum class RatioMode { kSequence, kToken };

inline constexpr double kMaxLogRatio = 20.0;

inline double importance_ratio(double logp_new, double logp_old) {
  return std::exp(std::clamp(logp_new - logp_old, -kMaxLogRatio, kMaxLogRatio));
}

// One prompt's sampled group, frozen at sampling time.
struct GroupBatch {
  std::vector<int> prompt;
  std::vector<std::vector<int>> completions;
  std::vector<std::vector<double>> old_token_logprobs;
  std::vector<double> advantages;
};

// Surrogate J over a set of groups; when grad is non-empty, adds dJ/dtheta.
// The derivative of min(rho A, clip(rho) A) is rho A dlog pi where the
// unclipped branch attains the minimum, and 0 where the clip is active.
inline double surrogate(const PolicyParams& p, const std::vector<GroupBatch>& groups,
                        const ClipConfig& cfg, RatioMode mode, std::span<double> grad = {}) {
  if (groups.empty()) return 0.0;
  const double group_weight = 1.0 / static_cast<double>(groups.size());
  double value = 0.0;
  for (const auto& g : groups) {
    const std::size_t G = g.completions.size();
    if (G == 0) continue;
    const double w = group_weight / static_cast<double>(G);
    for (std::size_t i = 0; i < G; ++i) {
      const auto& comp = g.completions[i];
      const double adv = g.advantages[i];
      const auto score = sequence_logprob(p, g.prompt, comp);
      std::vector<double> coef(comp.size(), 0.0);
      if (mode == RatioMode::kSequence) {
        const double old_total = std::accumulate(g.old_token_logprobs[i].begin(),
                                                 g.old_token_logprobs[i].end(), 0.0);
        const double rho = importance_ratio(score.total, old_total);
        value += w * clipped_term(rho, adv, cfg);
        const double clip = std::clamp(rho, 1.0 - cfg.eps_low, 1.0 + cfg.eps_high);
        if (rho * adv <= clip * adv) std::fill(coef.begin(), coef.end(), w * rho * adv);
      } else {
        if (comp.empty()) continue;
        const double inv_len = 1.0 / static_cast<double>(comp.size());
        for (std::size_t t = 0; t < comp.size(); ++t) {
          const double rho = importance_ratio(score.per_token[t], g.old_token_logprobs[i][t]);
          value += w * inv_len * clipped_term(rho, adv, cfg);
          const double clip = std::clamp(rho, 1.0 - cfg.eps_low, 1.0 + cfg.eps_high);
          if (rho * adv <= clip * adv) coef[t] = w * inv_len * rho * adv;
        }
      }
      if (!grad.empty() && std::any_of(coef.begin(), coef.end(), [](double c) { return c != 0.0; }))
        accumulate_logprob_grad(p, g.prompt, comp, coef, grad);
    }
  }
  return value;
}

// A prompt for the RL stage: policy prompt, the document the judge reads and
// the gold label.
struct RlPrompt {
  std::string id;
  std::vector<int> prompt;
  std::string doc_text;
  std::string gold;
};

using RewardFn = std::function<RewardBreakdown(const RlPrompt&, const std::string& output)>;

struct GroupLog {
  std::string prompt_id;
  std::vector<double> rewards;
  std::vector<double> advantages;
  RewardBreakdown mean;
  double format_violation_rate = 0.0;
};

struct RlStepOptions {
  std::size_t group_size = 8;
  ClipConfig clip;
  double learning_rate = 1e-2;
  double temperature = 1.0;
  std::size_t max_tokens = 32;
  RatioMode ratio = RatioMode::kSequence;
  std::size_t parallelism = 1;
};

struct RlStepResult {
  PolicyParams params;
  std::vector<GroupLog> groups;
  double surrogate_value = 0.0;
};

// Samples G rollouts per prompt from params_old, scores them, normalises
// rewards per group and takes one gradient-ascent step on the surrogate at
// theta = theta_old.
inline RlStepResult rl_step(const PolicyParams& params_old, const std::vector<RlPrompt>& batch,
                            const RewardFn& reward_fn, const RlStepOptions& opts,
                            std::uint64_t seed) {
  if (opts.group_size < 2) throw std::invalid_argument("rl_step: G must be at least 2");
  opts.clip.validate();
  struct Sampled {
    GroupBatch batch;
    GroupLog log;
  };
  auto sampled = parallel_map<Sampled>(batch.size(), opts.parallelism, [&](std::size_t b) {
    const RlPrompt& pr = batch[b];
    Sampled s;
    s.batch.prompt = pr.prompt;
    s.log.prompt_id = pr.id;
    const std::uint64_t base = derive_seed(seed, pr.id);
    std::size_t violations = 0;
    for (std::size_t i = 0; i < opts.group_size; ++i) {
      Rollout ro = sample(params_old, pr.prompt, opts.temperature, opts.max_tokens, derive_seed(base, i));
      const RewardBreakdown r = reward_fn(pr, rollout_text(params_old, ro));
      if (r.fmt < 0.0) ++violations;
      s.log.mean.acc += r.acc;
      s.log.mean.fmt += r.fmt;
      s.log.mean.cons += r.cons;
      s.log.mean.total += r.total;
      s.log.rewards.push_back(r.total);
      s.batch.completions.push_back(std::move(ro.generated_tokens));
      s.batch.old_token_logprobs.push_back(std::move(ro.per_token_logprobs));
    }
    const double G = static_cast<double>(opts.group_size);
    s.log.mean.acc /= G;
    s.log.mean.fmt /= G;
    s.log.mean.cons /= G;
    s.log.mean.total /= G;
    s.log.format_violation_rate = static_cast<double>(violations) / G;
    s.batch.advantages = compute_advantages(s.log.rewards);
    s.log.advantages = s.batch.advantages;
    return s;
  });

  std::vector<GroupBatch> groups;
  RlStepResult result{params_old, {}, 0.0};
  for (auto& s : sampled) {
    groups.push_back(std::move(s.batch));
    result.groups.push_back(std::move(s.log));
  }
  std::vector<double> grad(params_old.weights.size(), 0.0);
  result.surrogate_value = surrogate(params_old, groups, opts.clip, opts.ratio, grad);
  for (auto& g : grad) g = -g;
  result.params = apply_grad(params_old, grad, opts.learning_rate);
  return result;
}

struct RlStepLog {
  std::size_t step = 0;
  RewardBreakdown mean;
  double format_violation_rate = 0.0;
};

inline RlStepLog summarize_step(std::size_t step, const std::vector<GroupLog>& groups) {
  RlStepLog log;
  log.step = step;
  if (groups.empty()) return log;
  for (const auto& g : groups) {
    log.mean.acc += g.mean.acc;
    log.mean.fmt += g.mean.fmt;
    log.mean.cons += g.mean.cons;
    log.mean.total += g.mean.total;
    log.format_violation_rate += g.format_violation_rate;
  }
  const double n = static_cast<double>(groups.size());
  log.mean.acc /= n;
  log.mean.fmt /= n;
  log.mean.cons /= n;
  log.mean.total /= n;
  log.format_violation_rate /= n;
  return log;
}

struct RlTrainOptions {
  RlStepOptions step;
  std::size_t steps = 100;
  std::size_t batch_prompts = 8;
  std::uint64_t seed = 0;
};

struct RlTrainResult {
  PolicyParams params;
  std::vector<RlStepLog> log;
};

// Each step draws a batch of prompts (seeded, without replacement within a
// pass over the data) and applies one rl_step.
inline RlTrainResult train_rl(PolicyParams params, const std::vector<RlPrompt>& prompts,
                              const RewardFn& reward_fn, const RlTrainOptions& opts) {
  if (prompts.empty()) throw EmptyInput("train_rl: no prompts");
  RlTrainResult out{std::move(params), {}};
  std::vector<std::size_t> order(prompts.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();
  std::size_t pass = 0;
  for (std::size_t step = 0; step < opts.steps; ++step) {
    std::vector<RlPrompt> batch;
    while (batch.size() < std::min(opts.batch_prompts, prompts.size())) {
      if (cursor == order.size()) {
        Rng rng(derive_seed(opts.seed, "pass-" + std::to_string(pass++)));
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      batch.push_back(prompts[order[cursor++]]);
    }
    auto r = rl_step(out.params, batch, reward_fn, opts.step, derive_seed(opts.seed, step));
    out.params = std::move(r.params);
    out.log.push_back(summarize_step(step, r.groups));
    const auto& l = out.log.back();
    log::debug("rl step", {{"step", step}, {"total", l.mean.total}, {"acc", l.mean.acc},
                           {"fmt", l.mean.fmt}, {"cons", l.mean.cons}});
  }
  return out;
}

inline void write_reward_log(const std::string& path, const std::vector<RlStepLog>& log) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "step,total,acc,fmt,cons,format_violation_rate\n";
  out.precision(10);
  for (const auto& l : log)
    out << l.step << ',' << l.mean.total << ',' << l.mean.acc << ',' << l.mean.fmt << ','
        << l.mean.cons << ',' << l.format_violation_rate << '\n';
}

}  // namespace reveal
