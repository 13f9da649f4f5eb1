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

// Inference: Think-then-Answer detection, the three-class AIGC score and
// paragraph-level document scanning.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reveal/client.hpp"
#include "reveal/errors.hpp"
#include "reveal/policy.hpp"
#include "reveal/prompts.hpp"
#include "reveal/reasoning.hpp"
#include "reveal/synthetic.hpp"
#include "reveal/taxonomy.hpp"
#include "reveal/tokenizer.hpp"
#include "reveal/util.hpp"

namespace reveal {

struct DetectOptions {
  bool cot = true;
  std::size_t max_tokens = 48;
  double temperature = 0.0;  // 0 = greedy
  std::uint64_t seed = 0;
};

inline TraceMode trace_mode(bool cot) {
  return cot ? TraceMode::kThinkThenAnswer : TraceMode::kAnswerOnly;
}

inline ReasoningTrace detect(std::string_view doc_text, const PolicyParams& params,
                             const Taxonomy& tax, const DetectOptions& opts = {}) {
  const auto prompt = encode_prompt(params, prompts::inference(doc_text, tax, opts.cot));
  const Rollout r = opts.temperature > 0.0
                        ? sample(params, prompt, opts.temperature, opts.max_tokens, opts.seed)
                        : greedy_decode(params, prompt, opts.max_tokens);
  return parse_trace(rollout_text(params, r), tax, trace_mode(opts.cot));
}

inline ReasoningTrace detect(std::string_view doc_text, GeneratorClient& backend,
                             const Taxonomy& tax, const DetectOptions& opts = {}) {
  std::string reply;
  try {
    reply = backend.complete(prompts::inference(doc_text, tax, opts.cot),
                             static_cast<int>(opts.max_tokens), opts.temperature);
  } catch (const ClientError& e) {
    throw BackendError(backend.name() + ": " + e.what());
  }
  return parse_trace(reply, tax, trace_mode(opts.cot));
}

// ---------------------------------------------------------------------------
// AIGC score: expectation of the generation degree with Human = 0,
// AI-Polish = 0.5 and AI-Native = 1.

struct AigcScore {
  double p_human = 1.0;
  double p_polish = 0.0;
  double p_native = 0.0;
  double score = 0.0;

  std::array<double, 3> probs() const { return {p_human, p_polish, p_native}; }
  // Class index in (Human, AI-Polish, AI-Native) order; ties go to the lower index.
  std::size_t argmax() const {
    const auto p = probs();
    return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
  }
  double confidence() const { return std::max({p_human, p_polish, p_native}); }
};

inline AigcScore aigc_from_probs(double p_human, double p_polish, double p_native) {
  for (double p : {p_human, p_polish, p_native})
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probabilities must lie in [0, 1]");
  const double sum = p_human + p_polish + p_native;
  if (!(sum > 0.0)) throw std::invalid_argument("probabilities must not all be zero");
  AigcScore s{p_human / sum, p_polish / sum, p_native / sum, 0.0};
  s.score = std::clamp(0.5 + 0.5 * (p_native - p_human) / sum, 0.0, 1.0);
  return s;
}

inline AigcScore aigc_score(std::span<const double> logits) {
  if (logits.size() != 3) throw ShapeMismatch("aigc_score expects 3 logits");
  for (double z : logits)
    if (!std::isfinite(z)) throw std::invalid_argument("aigc_score: non-finite logit");
  const double m = std::max({logits[0], logits[1], logits[2]});
  const double eh = std::exp(logits[0] - m), ep = std::exp(logits[1] - m),
               en = std::exp(logits[2] - m);
  const double z = eh + ep + en;
  AigcScore s{eh / z, ep / z, en / z, 0.0};
  // Same value as P_native + P_polish / 2, since the three sum to one, but
  // this form stays monotone under rounding when polish dominates.
  s.score = std::clamp(0.5 + 0.5 * (en - eh) / z, 0.0, 1.0);
  return s;
}

inline AigcScore aigc_score(double z_human, double z_polish, double z_native) {
  const std::array<double, 3> z{z_human, z_polish, z_native};
  return aigc_score(z);
}

inline OrderedJson to_json(const AigcScore& s) {
  return {{"p_human", s.p_human}, {"p_polish", s.p_polish}, {"p_native", s.p_native},
          {"score", s.score}};
}

// Per-text class probabilities over the three-class taxonomy.
class ClassScorer {
 public:
  virtual ~ClassScorer() = default;
  virtual std::string name() const = 0;
  virtual AigcScore score(std::string_view text) = 0;
};

using ScorerPtr = std::shared_ptr<ClassScorer>;

// Reads the three label logits at the answer position of the direct-answer
// prompt, so no reasoning is generated.
class ToyScorer final : public ClassScorer {
 public:
  explicit ToyScorer(PolicyParams params, std::string name = "toy")
      : params_(std::move(params)), name_(std::move(name)) {
    const Taxonomy tax = Taxonomy::three();
    for (std::size_t i = 0; i < 3; ++i) label_ids_[i] = params_.vocab.id(tax.labels[i]);
    answer_open_ = params_.vocab.id(std::string(kAnswerOpen));
  }
  std::string name() const override { return name_; }
  AigcScore score(std::string_view text) override {
    const auto prompt =
        encode_prompt(params_, prompts::inference(text, Taxonomy::three(), /*cot=*/false));
    const std::array<int, 1> prefix{answer_open_};
    const auto logits = next_token_logits(params_, prompt, prefix);
    return aigc_score(logits[static_cast<std::size_t>(label_ids_[0])],
                      logits[static_cast<std::size_t>(label_ids_[1])],
                      logits[static_cast<std::size_t>(label_ids_[2])]);
  }

 private:
  PolicyParams params_;
  std::string name_;
  std::array<int, 3> label_ids_{};
  int answer_open_ = 0;
};

// Emits a one-hot class chosen by a callback (logit 0 vs -1000).
class RiggedScorer final : public ClassScorer {
 public:
  using Fn = std::function<std::size_t(std::string_view)>;
  RiggedScorer(std::string name, Fn pick) : name_(std::move(name)), pick_(std::move(pick)) {}
  std::string name() const override { return name_; }
  AigcScore score(std::string_view text) override {
    std::array<double, 3> z{-1000.0, -1000.0, -1000.0};
    z.at(pick_(text)) = 0.0;
    return aigc_score(z);
  }

 private:
  std::string name_;
  Fn pick_;
};

// Rule-based scorer over the synthetic cue vocabulary: assistant connectives
// mean AI-Native, formal substitutes mean AI-Polish, otherwise Human.
inline ScorerPtr make_cue_scorer() {
  return std::make_shared<RiggedScorer>("mock:rigged", [](std::string_view text) -> std::size_t {
    const auto ai = synthetic::find_cues(text, synthetic::Cue::kAI).size();
    const auto polish = synthetic::find_cues(text, synthetic::Cue::kPolish).size();
    const auto human = synthetic::find_cues(text, synthetic::Cue::kHuman).size();
    if (ai > 0 && ai >= polish) return 2;
    if (polish > human) return 1;
    return 0;
  });
}

// Asks a chat backend for a JSON object of class probabilities.
class ClientScorer final : public ClassScorer {
 public:
  explicit ClientScorer(ClientPtr client) : client_(std::move(client)) {}
  std::string name() const override { return client_->name(); }
  AigcScore score(std::string_view text) override {
    const std::string prompt =
        prompts::inference(text, Taxonomy::three(), /*cot=*/false) +
        "\n\nInstead of the answer block, reply with only a JSON object giving the probability "
        "of each label, for example {\"Human\": 0.2, \"AI-Polish\": 0.3, \"AI-Native\": 0.5}.";
    std::string reply;
    try {
      reply = client_->complete(prompt, 64, 0.0);
    } catch (const ClientError& e) {
      throw BackendError(client_->name() + ": " + e.what());
    }
    const auto open = reply.find('{');
    const auto close = reply.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close < open)
      throw BackendError("scorer reply has no JSON object: " + reply);
    const Json j = Json::parse(reply.substr(open, close - open + 1), nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw BackendError("scorer reply is not JSON: " + reply);
    const Taxonomy tax = Taxonomy::three();
    std::array<double, 3> p{0.0, 0.0, 0.0};
    for (const auto& [key, value] : j.items()) {
      const auto idx = tax.find(key);
      if (!idx || !value.is_number()) throw BackendError("unexpected scorer field: " + key);
      p[*idx] = value.get<double>();
    }
    try {
      return aigc_from_probs(p[0], p[1], p[2]);
    } catch (const std::invalid_argument& e) {
      throw BackendError(std::string("bad scorer probabilities: ") + e.what());
    }
  }

 private:
  ClientPtr client_;
};

// ---------------------------------------------------------------------------
// Block-wise scanning

struct SegmentOptions {
  std::size_t min_block_tokens = 20;
};

struct Block {
  std::size_t start = 0;
  std::size_t end = 0;
  bool operator==(const Block&) const = default;
};

// Splits on blank lines. A separator is an interior whitespace run that
// contains at least two newlines; leading and trailing whitespace stays
// inside the first and last block. Blocks under the token minimum absorb
// the following block; a short final block joins the previous one.
inline std::vector<Block> segment(std::string_view text, const SegmentOptions& opts = {}) {
  if (text.empty()) throw EmptyInput("scan: empty text");
  const auto first = text.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string_view::npos) return {{0, text.size()}};
  const auto last = text.find_last_not_of(" \t\r\n\f\v");

  std::vector<Block> raw;
  std::size_t block_start = 0;
  std::size_t i = first;
  while (i <= last) {
    if (!std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    int newlines = 0;
    while (j <= last && std::isspace(static_cast<unsigned char>(text[j]))) {
      if (text[j] == '\n') ++newlines;
      ++j;
    }
    if (newlines >= 2) {
      raw.push_back({block_start, i});
      block_start = j;
    }
    i = j;
  }
  raw.push_back({block_start, text.size()});

  auto tokens = [&](const Block& b) { return count_tokens(text.substr(b.start, b.end - b.start)); };
  std::vector<Block> merged;
  std::optional<Block> pending;
  for (const Block& b : raw) {
    Block cur = pending ? Block{pending->start, b.end} : b;
    pending.reset();
    if (tokens(cur) < opts.min_block_tokens)
      pending = cur;
    else
      merged.push_back(cur);
  }
  if (pending) {
    if (merged.empty())
      merged.push_back(*pending);
    else
      merged.back().end = pending->end;
  }
  return merged;
}

struct BlockReport {
  std::size_t index = 0;
  Block span;
  AigcScore score;
  std::string verdict;
};

inline std::vector<BlockReport> scan(std::string_view text, ClassScorer& scorer,
                                     const SegmentOptions& opts = {}, std::size_t parallelism = 1) {
  const auto blocks = segment(text, opts);
  const Taxonomy tax = Taxonomy::three();
  return parallel_map<BlockReport>(blocks.size(), parallelism, [&](std::size_t i) {
    BlockReport r;
    r.index = i;
    r.span = blocks[i];
    r.score = scorer.score(text.substr(blocks[i].start, blocks[i].end - blocks[i].start));
    r.verdict = tax.labels[r.score.argmax()];
    return r;
  });
}

inline OrderedJson scan_json(const std::vector<BlockReport>& reports) {
  OrderedJson blocks = OrderedJson::array();
  for (const auto& r : reports) {
    blocks.push_back({{"index", r.index},
                      {"start", r.span.start},
                      {"end", r.span.end},
                      {"p_human", r.score.p_human},
                      {"p_polish", r.score.p_polish},
                      {"p_native", r.score.p_native},
                      {"score", r.score.score},
                      {"verdict", r.verdict}});
  }
  return {{"blocks", blocks}};
}

}  // namespace reveal
