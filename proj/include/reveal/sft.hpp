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

// Outcome-weighted supervised fine-tuning:
//
//   loss = - sum_{i in reasoning} log P(r_i | x, r_<i)
//          - lambda * sum_{j in answer} log P(y_j | x, r, y_<j)
//
// Answer positions are the tokens strictly inside <answer>...</answer>;
// everything else in the target (tags, rationale, <eos>) is reasoning.
// Prompt tokens carry no loss. lambda = 1 is plain next-token training.

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "reveal/policy.hpp"
#include "reveal/reasoning.hpp"
#include "reveal/util.hpp"

namespace reveal {

struct SpanMask {
  std::vector<std::size_t> reasoning_indices;
  std::vector<std::size_t> answer_indices;
};

inline SpanMask span_mask(const std::vector<std::string>& target_tokens) {
  SpanMask m;
  bool inside_answer = false;
  for (std::size_t i = 0; i < target_tokens.size(); ++i) {
    const auto& t = target_tokens[i];
    if (t == kAnswerOpen) {
      inside_answer = true;
      m.reasoning_indices.push_back(i);
    } else if (t == kAnswerClose) {
      inside_answer = false;
      m.reasoning_indices.push_back(i);
    } else if (inside_answer) {
      m.answer_indices.push_back(i);
    } else {
      m.reasoning_indices.push_back(i);
    }
  }
  return m;
}

// An instance tokenized against a policy vocabulary.
struct EncodedInstance {
  std::vector<int> prompt;
  std::vector<int> target;        // ends with <eos>
  std::vector<bool> is_answer;    // per target token
};

inline EncodedInstance encode_instance(const PolicyParams& p, const SftInstance& inst) {
  EncodedInstance e;
  e.prompt = encode_prompt(p, inst.prompt);
  auto tokens = tokenize(inst.target.raw);
  tokens.emplace_back(kEos);
  e.target = p.vocab.encode(tokens);
  e.is_answer.assign(tokens.size(), false);
  for (std::size_t i : span_mask(tokens).answer_indices) e.is_answer[i] = true;
  return e;
}

struct WeightedLoss {
  double loss = 0.0;
  double answer_nll = 0.0;
  double reasoning_nll = 0.0;
  std::vector<double> gradient;
};

inline WeightedLoss weighted_loss(const PolicyParams& p, const EncodedInstance& e, double lambda,
                                  bool with_gradient = true) {
  if (lambda < 1.0) throw std::invalid_argument("weighted_loss: lambda must be >= 1");
  WeightedLoss out;
  const auto score = sequence_logprob(p, e.prompt, e.target);
  for (std::size_t i = 0; i < e.target.size(); ++i) {
    (e.is_answer[i] ? out.answer_nll : out.reasoning_nll) -= score.per_token[i];
  }
  out.loss = out.reasoning_nll + lambda * out.answer_nll;
  if (with_gradient) {
    std::vector<double> coef(e.target.size());
    for (std::size_t i = 0; i < coef.size(); ++i) coef[i] = e.is_answer[i] ? -lambda : -1.0;
    out.gradient.assign(p.weights.size(), 0.0);
    accumulate_logprob_grad(p, e.prompt, e.target, coef, out.gradient);
  }
  return out;
}

inline WeightedLoss weighted_loss(const PolicyParams& p, const SftInstance& inst, double lambda,
                                  bool with_gradient = true) {
  return weighted_loss(p, encode_instance(p, inst), lambda, with_gradient);
}

enum class Optimizer { kAdam, kSgd };

inline Optimizer parse_optimizer(std::string_view s) {
  if (s == "adam") return Optimizer::kAdam;
  if (s == "sgd") return Optimizer::kSgd;
  throw std::invalid_argument("unknown optimizer '" + std::string(s) + "'");
}

// Adam moments over the flat weight vector (bias-corrected).
class AdamState {
 public:
  explicit AdamState(std::size_t n, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : m_(n, 0.0), v_(n, 0.0), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  // Turns a raw gradient into the step direction passed to apply_grad.
  std::vector<double> direction(std::span<const double> g) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    std::vector<double> d(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g[i];
      v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g[i] * g[i];
      d[i] = (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
    }
    return d;
  }

 private:
  std::vector<double> m_, v_;
  double beta1_, beta2_, eps_;
  std::size_t t_ = 0;
};

struct SftOptions {
  double lambda = 2.0;
  std::size_t epochs = 3;
  std::size_t batch_size = 16;
  double learning_rate = 1e-2;
  std::uint64_t seed = 0;
  std::size_t parallelism = 1;
  double max_grad_norm = 0.0;  // 0 disables clipping
  Optimizer optimizer = Optimizer::kAdam;
};

struct SftEpochLog {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  double mean_answer_nll = 0.0;
  double mean_reasoning_nll = 0.0;
};

inline SftEpochLog evaluate_sft(const PolicyParams& p, const std::vector<EncodedInstance>& data,
                                double lambda, std::size_t parallelism = 1) {
  auto losses = parallel_map<WeightedLoss>(data.size(), parallelism, [&](std::size_t i) {
    return weighted_loss(p, data[i], lambda, false);
  });
  SftEpochLog log;
  for (const auto& l : losses) {
    log.mean_loss += l.loss;
    log.mean_answer_nll += l.answer_nll;
    log.mean_reasoning_nll += l.reasoning_nll;
  }
  const double n = static_cast<double>(std::max<std::size_t>(1, data.size()));
  log.mean_loss /= n;
  log.mean_answer_nll /= n;
  log.mean_reasoning_nll /= n;
  return log;
}

struct SftResult {
  PolicyParams params;
  std::vector<SftEpochLog> epochs;
};

// Minibatch gradient descent on the mean per-instance loss. Per-instance
// gradients are summed in batch order, so results do not depend on
// `parallelism`.
inline SftResult train_sft(PolicyParams params, const std::vector<SftInstance>& dataset,
                           const SftOptions& opts) {
  if (dataset.empty()) throw EmptyInput("train_sft: empty dataset");
  std::vector<EncodedInstance> data;
  data.reserve(dataset.size());
  for (const auto& inst : dataset) data.push_back(encode_instance(params, inst));

  SftResult result{std::move(params), {}};
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = std::max<std::size_t>(1, opts.batch_size);
  AdamState adam(result.params.weights.size());
  for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
    Rng rng(derive_seed(opts.seed, epoch));
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t n = std::min(batch, order.size() - start);
      const PolicyParams& p = result.params;
      auto grads = parallel_map<std::vector<double>>(n, opts.parallelism, [&](std::size_t k) {
        return weighted_loss(p, data[order[start + k]], opts.lambda).gradient;
      });
      std::vector<double> g(p.weights.size(), 0.0);
      for (const auto& gi : grads)
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += gi[i];
      const double inv = 1.0 / static_cast<double>(n);
      double norm2 = 0.0;
      for (auto& v : g) {
        v *= inv;
        norm2 += v * v;
      }
      if (opts.max_grad_norm > 0.0 && norm2 > opts.max_grad_norm * opts.max_grad_norm) {
        const double scale = opts.max_grad_norm / std::sqrt(norm2);
        for (auto& v : g) v *= scale;
      }
      if (opts.optimizer == Optimizer::kAdam) g = adam.direction(g);
      result.params = apply_grad(result.params, g, opts.learning_rate);
    }
    SftEpochLog log = evaluate_sft(result.params, data, opts.lambda, opts.parallelism);
    log.epoch = epoch + 1;
    result.epochs.push_back(log);
    log::info("sft epoch", {{"epoch", log.epoch}, {"mean_loss", log.mean_loss},
                            {"mean_answer_nll", log.mean_answer_nll},
                            {"mean_reasoning_nll", log.mean_reasoning_nll}});
  }
  return result;
}

inline void write_sft_log(const std::string& path, const std::vector<SftEpochLog>& epochs) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "epoch,mean_loss,mean_answer_nll,mean_reasoning_nll\n";
  out.precision(10);
  for (const auto& e : epochs)
    out << e.epoch << ',' << e.mean_loss << ',' << e.mean_answer_nll << ','
        << e.mean_reasoning_nll << '\n';
}

// Vocabulary covering every prompt and target token of a dataset plus the
// taxonomy labels.
inline Vocab vocab_for(const std::vector<SftInstance>& data, const Taxonomy& tax) {
  std::vector<std::vector<std::string>> lists;
  for (const auto& d : data) {
    lists.push_back(tokenize(d.prompt));
    lists.push_back(tokenize(d.target.raw));
  }
  std::vector<std::string> labels = tax.labels;
  return Vocab::build(lists, labels);
}

}  // namespace reveal
