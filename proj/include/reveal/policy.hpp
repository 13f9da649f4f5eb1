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

// A tiny autoregressive policy: one-hidden-layer MLP over a fixed window of
// previous tokens plus the mean embedding of the whole prompt, with a softmax
// over the vocabulary and exact analytic gradients.
//
//   x   = [ mean_{p in prompt} E[p] ; E[w_1] ; ... ; E[w_C] ]   (w = last C tokens)
//   h   = tanh(W1 x + b1)
//   z   = W2 h + b2
//   P(. | context) = softmax(z)

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "reveal/errors.hpp"
#include "reveal/taxonomy.hpp"
#include "reveal/tokenizer.hpp"
#include "reveal/util.hpp"

namespace reveal {

inline constexpr std::string_view kPad = "<pad>";
inline constexpr std::string_view kEos = "<eos>";
inline constexpr std::string_view kUnk = "<unk>";

class Vocab {
 public:
  Vocab() = default;
  explicit Vocab(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
      if (!index_.emplace(symbols_[i], static_cast<int>(i)).second)
        throw FormatError("duplicate vocab symbol: " + symbols_[i]);
    }
  }

  // Specials first (<pad>, <eos>, <unk>, the four tags), then taxonomy
  // labels, then every other token in sorted order.
  static Vocab build(const std::vector<std::vector<std::string>>& token_lists,
                     const std::vector<std::string>& labels) {
    std::vector<std::string> symbols = {std::string(kPad), std::string(kEos), std::string(kUnk),
                                        "<think>", "</think>", "<answer>", "</answer>"};
    std::set<std::string> seen(symbols.begin(), symbols.end());
    for (const auto& l : labels) {
      if (seen.insert(l).second) symbols.push_back(l);
    }
    std::set<std::string> rest;
    for (const auto& list : token_lists)
      for (const auto& t : list)
        if (!seen.count(t)) rest.insert(t);
    symbols.insert(symbols.end(), rest.begin(), rest.end());
    return Vocab(std::move(symbols));
  }

  std::size_t size() const { return symbols_.size(); }
  const std::vector<std::string>& symbols() const { return symbols_; }
  const std::string& symbol(int id) const { return symbols_.at(static_cast<std::size_t>(id)); }

  std::optional<int> find(std::string_view s) const {
    auto it = index_.find(std::string(s));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  int id(std::string_view s) const {
    if (auto i = find(s)) return *i;
    throw UnknownToken(std::string(s));
  }

  int pad() const { return id(kPad); }
  int eos() const { return id(kEos); }

  std::vector<int> encode(const std::vector<std::string>& tokens) const {
    std::vector<int> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(id(t));
    return out;
  }

  // Unknown tokens map to <unk>; used for free text such as prompts.
  std::vector<int> encode_lenient(const std::vector<std::string>& tokens) const {
    const auto unk = find(kUnk);
    std::vector<int> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
      if (auto i = find(t)) {
        out.push_back(*i);
      } else if (unk) {
        out.push_back(*unk);
      } else {
        throw UnknownToken(t);
      }
    }
    return out;
  }

  // Space-joined symbols, stopping before <eos>.
  std::string decode(std::span<const int> ids) const {
    std::string out;
    for (int id : ids) {
      if (symbols_.at(static_cast<std::size_t>(id)) == kEos) break;
      if (!out.empty()) out += ' ';
      out += symbols_[static_cast<std::size_t>(id)];
    }
    return out;
  }

  bool operator==(const Vocab& o) const { return symbols_ == o.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> index_;
};

struct PolicyShape {
  std::size_t vocab_size = 0;
  std::size_t embed_dim = 16;
  std::size_t hidden_dim = 48;
  std::size_t context = 16;

  // [mean-pooled prompt; max-pooled prompt; last `context` token embeddings]
  std::size_t pool_dim() const { return 2 * embed_dim; }
  std::size_t input_dim() const { return pool_dim() + embed_dim * context; }
  std::size_t embedding_offset() const { return 0; }
  std::size_t w1_offset() const { return vocab_size * embed_dim; }
  std::size_t b1_offset() const { return w1_offset() + hidden_dim * input_dim(); }
  std::size_t w2_offset() const { return b1_offset() + hidden_dim; }
  std::size_t b2_offset() const { return w2_offset() + vocab_size * hidden_dim; }
  std::size_t num_weights() const { return b2_offset() + vocab_size; }

  bool operator==(const PolicyShape&) const = default;
};

struct PolicyParams {
  Vocab vocab;
  PolicyShape shape;
  std::vector<double> weights;

  // All-zero weights: every next-token distribution is uniform.
  static PolicyParams uniform(Vocab vocab, PolicyShape shape) {
    shape.vocab_size = vocab.size();
    PolicyParams p{std::move(vocab), shape, {}};
    p.weights.assign(shape.num_weights(), 0.0);
    return p;
  }

  // Gaussian init: embeddings N(0, scale), W1 N(0, 1/sqrt(in)), W2 N(0, scale); biases 0.
  static PolicyParams random(Vocab vocab, PolicyShape shape, std::uint64_t seed,
                             double scale = 0.1) {
    PolicyParams p = uniform(std::move(vocab), shape);
    const PolicyShape& s = p.shape;
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = s.embedding_offset(); i < s.w1_offset(); ++i) p.weights[i] = scale * normal(rng);
    const double w1_scale = 1.0 / std::sqrt(static_cast<double>(s.input_dim()));
    for (std::size_t i = s.w1_offset(); i < s.b1_offset(); ++i) p.weights[i] = w1_scale * normal(rng);
    for (std::size_t i = s.w2_offset(); i < s.b2_offset(); ++i) p.weights[i] = scale * normal(rng);
    return p;
  }

  bool all_finite() const {
    return std::all_of(weights.begin(), weights.end(), [](double w) { return std::isfinite(w); });
  }
};

struct SequenceScore {
  double total = 0.0;
  std::vector<double> per_token;
};

struct Rollout {
  std::vector<int> prompt_tokens;
  std::vector<int> generated_tokens;
  std::vector<double> per_token_logprobs;
  double total_logprob = 0.0;
};

namespace detail {

// Evaluates the network at one position. Holds the activations needed for
// the backward pass.
class PositionEval {
 public:
  explicit PositionEval(const PolicyParams& p)
      : x_(p.shape.input_dim()), h_(p.shape.hidden_dim), z_(p.shape.vocab_size),
        logp_(p.shape.vocab_size), window_(p.shape.context),
        pad_(p.vocab.find(kPad).value_or(0)) {}

  void forward(const PolicyParams& p, std::span<const double> pool, std::span<const int> seq,
               std::size_t pos) {
    const PolicyShape& s = p.shape;
    const std::size_t d = s.embed_dim;
    std::copy(pool.begin(), pool.end(), x_.begin());
    for (std::size_t k = 0; k < s.context; ++k) {
      // window slot k holds token seq[pos - C + k]
      const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(pos) -
                                 static_cast<std::ptrdiff_t>(s.context) + static_cast<std::ptrdiff_t>(k);
      const int tok = src >= 0 ? seq[static_cast<std::size_t>(src)] : pad_;
      window_[k] = tok;
      const double* e = &p.weights[s.embedding_offset() + static_cast<std::size_t>(tok) * d];
      std::copy(e, e + d, x_.begin() + static_cast<std::ptrdiff_t>(s.pool_dim() + d * k));
    }
    const double* w1 = &p.weights[s.w1_offset()];
    const double* b1 = &p.weights[s.b1_offset()];
    const std::size_t in = s.input_dim();
    for (std::size_t j = 0; j < s.hidden_dim; ++j) {
      double a = b1[j];
      const double* row = w1 + j * in;
      for (std::size_t i = 0; i < in; ++i) a += row[i] * x_[i];
      h_[j] = std::tanh(a);
    }
    const double* w2 = &p.weights[s.w2_offset()];
    const double* b2 = &p.weights[s.b2_offset()];
    double zmax = -std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < s.vocab_size; ++v) {
      double a = b2[v];
      const double* row = w2 + v * s.hidden_dim;
      for (std::size_t j = 0; j < s.hidden_dim; ++j) a += row[j] * h_[j];
      z_[v] = a;
      zmax = std::max(zmax, a);
    }
    double sum = 0.0;
    for (std::size_t v = 0; v < s.vocab_size; ++v) sum += std::exp(z_[v] - zmax);
    const double lse = zmax + std::log(sum);
    for (std::size_t v = 0; v < s.vocab_size; ++v) logp_[v] = z_[v] - lse;
  }

  // Adds coef * d log P(target) / d weights into grad; the prompt-pool part
  // is accumulated into pool_grad and distributed by the caller.
  void backward(const PolicyParams& p, int target, double coef, std::span<double> grad,
                std::span<double> pool_grad) {
    const PolicyShape& s = p.shape;
    const std::size_t d = s.embed_dim, H = s.hidden_dim, in = s.input_dim();
    dz_.resize(s.vocab_size);
    for (std::size_t v = 0; v < s.vocab_size; ++v) dz_[v] = -coef * std::exp(logp_[v]);
    dz_[static_cast<std::size_t>(target)] += coef;

    double* gw2 = &grad[s.w2_offset()];
    double* gb2 = &grad[s.b2_offset()];
    const double* w2 = &p.weights[s.w2_offset()];
    dh_.assign(H, 0.0);
    for (std::size_t v = 0; v < s.vocab_size; ++v) {
      const double g = dz_[v];
      gb2[v] += g;
      double* grow = gw2 + v * H;
      const double* row = w2 + v * H;
      for (std::size_t j = 0; j < H; ++j) {
        grow[j] += g * h_[j];
        dh_[j] += g * row[j];
      }
    }
    double* gw1 = &grad[s.w1_offset()];
    double* gb1 = &grad[s.b1_offset()];
    const double* w1 = &p.weights[s.w1_offset()];
    dx_.assign(in, 0.0);
    for (std::size_t j = 0; j < H; ++j) {
      const double da = dh_[j] * (1.0 - h_[j] * h_[j]);
      gb1[j] += da;
      double* grow = gw1 + j * in;
      const double* row = w1 + j * in;
      for (std::size_t i = 0; i < in; ++i) {
        grow[i] += da * x_[i];
        dx_[i] += da * row[i];
      }
    }
    for (std::size_t i = 0; i < s.pool_dim(); ++i) pool_grad[i] += dx_[i];
    for (std::size_t k = 0; k < s.context; ++k) {
      double* ge = &grad[s.embedding_offset() + static_cast<std::size_t>(window_[k]) * d];
      for (std::size_t i = 0; i < d; ++i) ge[i] += dx_[s.pool_dim() + d * k + i];
    }
  }

  const std::vector<double>& logp() const { return logp_; }
  const std::vector<double>& logits() const { return z_; }

 private:
  std::vector<double> x_, h_, z_, logp_, dz_, dh_, dx_;
  std::vector<int> window_;
  int pad_;
};

// Mean and coordinate-wise max of the prompt embeddings; zeros for an empty
// prompt.
inline std::vector<double> prompt_pool(const PolicyParams& p, std::span<const int> prompt) {
  const std::size_t d = p.shape.embed_dim;
  std::vector<double> pool(2 * d, 0.0);
  if (prompt.empty()) return pool;
  std::fill(pool.begin() + static_cast<std::ptrdiff_t>(d), pool.end(),
            -std::numeric_limits<double>::infinity());
  for (int tok : prompt) {
    const double* e = &p.weights[p.shape.embedding_offset() + static_cast<std::size_t>(tok) * d];
    for (std::size_t i = 0; i < d; ++i) {
      pool[i] += e[i];
      pool[d + i] = std::max(pool[d + i], e[i]);
    }
  }
  for (std::size_t i = 0; i < d; ++i) pool[i] /= static_cast<double>(prompt.size());
  return pool;
}

// Routes the gradient of the pooled features back to the prompt embeddings:
// the mean part spreads evenly, the max part goes to the first token that
// attains each coordinate's maximum.
inline void add_pool_grad(const PolicyParams& p, std::span<const int> prompt,
                          std::span<const double> pool_grad, std::span<double> grad) {
  if (prompt.empty()) return;
  const std::size_t d = p.shape.embed_dim;
  const std::size_t base = p.shape.embedding_offset();
  const double inv = 1.0 / static_cast<double>(prompt.size());
  std::vector<double> best(d, -std::numeric_limits<double>::infinity());
  std::vector<int> arg(d, prompt.front());
  for (int tok : prompt) {
    const double* e = &p.weights[base + static_cast<std::size_t>(tok) * d];
    double* ge = &grad[base + static_cast<std::size_t>(tok) * d];
    for (std::size_t i = 0; i < d; ++i) {
      ge[i] += pool_grad[i] * inv;
      if (e[i] > best[i]) {
        best[i] = e[i];
        arg[i] = tok;
      }
    }
  }
  for (std::size_t i = 0; i < d; ++i)
    grad[base + static_cast<std::size_t>(arg[i]) * d + i] += pool_grad[d + i];
}

inline void check_ids(const PolicyParams& p, std::span<const int> ids) {
  for (int id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= p.shape.vocab_size)
      throw UnknownToken("#" + std::to_string(id));
  }
}

}  // namespace detail

// log P(continuation | prompt), per token and summed.
inline SequenceScore sequence_logprob(const PolicyParams& p, std::span<const int> prompt,
                                      std::span<const int> continuation) {
  detail::check_ids(p, prompt);
  detail::check_ids(p, continuation);
  SequenceScore out;
  if (continuation.empty()) return out;
  std::vector<int> seq(prompt.begin(), prompt.end());
  seq.insert(seq.end(), continuation.begin(), continuation.end());
  const auto pool = detail::prompt_pool(p, prompt);
  detail::PositionEval eval(p);
  out.per_token.reserve(continuation.size());
  for (std::size_t j = 0; j < continuation.size(); ++j) {
    eval.forward(p, pool, seq, prompt.size() + j);
    const double lp = eval.logp()[static_cast<std::size_t>(continuation[j])];
    out.per_token.push_back(lp);
    out.total += lp;
  }
  return out;
}

inline SequenceScore sequence_logprob(const PolicyParams& p, const std::vector<std::string>& prompt,
                                      const std::vector<std::string>& continuation) {
  const auto a = p.vocab.encode(prompt);
  const auto b = p.vocab.encode(continuation);
  return sequence_logprob(p, a, b);
}

// Returns sum_t coef[t] * log P(c_t | prefix) and adds its gradient into
// grad. coef must have one entry per continuation token.
inline double accumulate_logprob_grad(const PolicyParams& p, std::span<const int> prompt,
                                      std::span<const int> continuation,
                                      std::span<const double> coef, std::span<double> grad) {
  if (coef.size() != continuation.size())
    throw ShapeMismatch("coefficient count does not match continuation length");
  if (grad.size() != p.weights.size()) throw ShapeMismatch("gradient buffer has wrong size");
  detail::check_ids(p, prompt);
  detail::check_ids(p, continuation);
  if (continuation.empty()) return 0.0;
  std::vector<int> seq(prompt.begin(), prompt.end());
  seq.insert(seq.end(), continuation.begin(), continuation.end());
  const auto pool = detail::prompt_pool(p, prompt);
  std::vector<double> pool_grad(p.shape.pool_dim(), 0.0);
  detail::PositionEval eval(p);
  double value = 0.0;
  for (std::size_t j = 0; j < continuation.size(); ++j) {
    eval.forward(p, pool, seq, prompt.size() + j);
    const int target = continuation[j];
    value += coef[j] * eval.logp()[static_cast<std::size_t>(target)];
    if (coef[j] != 0.0) eval.backward(p, target, coef[j], grad, pool_grad);
  }
  detail::add_pool_grad(p, prompt, pool_grad, grad);
  return value;
}

// Logits of the next token after prompt + prefix.
inline std::vector<double> next_token_logits(const PolicyParams& p, std::span<const int> prompt,
                                             std::span<const int> prefix = {}) {
  detail::check_ids(p, prompt);
  detail::check_ids(p, prefix);
  std::vector<int> seq(prompt.begin(), prompt.end());
  seq.insert(seq.end(), prefix.begin(), prefix.end());
  const auto pool = detail::prompt_pool(p, prompt);
  detail::PositionEval eval(p);
  eval.forward(p, pool, seq, seq.size());
  return eval.logits();
}

// Samples up to max_tokens tokens at the given temperature, stopping after
// <eos>. Recorded log-probabilities are under the policy itself
// (temperature 1), which is what importance ratios need.
inline Rollout sample(const PolicyParams& p, std::span<const int> prompt, double temperature,
                      std::size_t max_tokens, std::uint64_t seed) {
  if (!(temperature > 0.0)) throw std::invalid_argument("sample: temperature must be positive");
  detail::check_ids(p, prompt);
  Rng rng(seed);
  Rollout r;
  r.prompt_tokens.assign(prompt.begin(), prompt.end());
  std::vector<int> seq(prompt.begin(), prompt.end());
  const auto pool = detail::prompt_pool(p, prompt);
  detail::PositionEval eval(p);
  const int eos = p.vocab.find(kEos).value_or(-1);
  std::vector<double> probs(p.shape.vocab_size);
  for (std::size_t step = 0; step < max_tokens; ++step) {
    eval.forward(p, pool, seq, seq.size());
    const auto& z = eval.logits();
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (std::size_t v = 0; v < z.size(); ++v) {
      probs[v] = std::exp((z[v] - zmax) / temperature);
      sum += probs[v];
    }
    double u = uniform01(rng) * sum;
    std::size_t pick = z.size() - 1;
    for (std::size_t v = 0; v < z.size(); ++v) {
      u -= probs[v];
      if (u < 0.0) {
        pick = v;
        break;
      }
    }
    // Guard against rounding landing on a zero-probability tail symbol.
    while (probs[pick] == 0.0 && pick > 0) --pick;
    const int tok = static_cast<int>(pick);
    const double lp = eval.logp()[pick];
    r.generated_tokens.push_back(tok);
    r.per_token_logprobs.push_back(lp);
    r.total_logprob += lp;
    seq.push_back(tok);
    if (tok == eos) break;
  }
  return r;
}

// Argmax decoding (ties go to the lower symbol id).
inline Rollout greedy_decode(const PolicyParams& p, std::span<const int> prompt,
                             std::size_t max_tokens) {
  detail::check_ids(p, prompt);
  Rollout r;
  r.prompt_tokens.assign(prompt.begin(), prompt.end());
  std::vector<int> seq(prompt.begin(), prompt.end());
  const auto pool = detail::prompt_pool(p, prompt);
  detail::PositionEval eval(p);
  const int eos = p.vocab.find(kEos).value_or(-1);
  for (std::size_t step = 0; step < max_tokens; ++step) {
    eval.forward(p, pool, seq, seq.size());
    const auto& lp = eval.logp();
    const auto pick = static_cast<std::size_t>(std::max_element(lp.begin(), lp.end()) - lp.begin());
    const int tok = static_cast<int>(pick);
    r.generated_tokens.push_back(tok);
    r.per_token_logprobs.push_back(lp[pick]);
    r.total_logprob += lp[pick];
    seq.push_back(tok);
    if (tok == eos) break;
  }
  return r;
}

inline std::string rollout_text(const PolicyParams& p, const Rollout& r) {
  return p.vocab.decode(r.generated_tokens);
}

// params - lr * gradient. Gradient ascent passes a negated gradient.
inline PolicyParams apply_grad(const PolicyParams& p, std::span<const double> gradient,
                               double learning_rate) {
  if (gradient.size() != p.weights.size())
    throw ShapeMismatch("gradient has " + std::to_string(gradient.size()) + " entries, params have " +
                        std::to_string(p.weights.size()));
  PolicyParams out = p;
  for (std::size_t i = 0; i < out.weights.size(); ++i) out.weights[i] -= learning_rate * gradient[i];
  return out;
}

// ---------------------------------------------------------------------------
// Checkpoints: JSON with a format tag, version, shape, vocab manifest and the
// flat weight vector (doubles round-trip exactly through the serializer).

inline constexpr int kCheckpointVersion = 1;

inline OrderedJson checkpoint_json(const PolicyParams& p) {
  OrderedJson j;
  j["format"] = "reveal-policy";
  j["version"] = kCheckpointVersion;
  j["shape"] = {{"vocab_size", p.shape.vocab_size}, {"embed_dim", p.shape.embed_dim},
                {"hidden_dim", p.shape.hidden_dim}, {"context", p.shape.context}};
  j["vocab"] = p.vocab.symbols();
  j["weights"] = p.weights;
  return j;
}

inline PolicyParams checkpoint_from_json(const Json& j) {
  try {
    if (j.at("format") != "reveal-policy") throw FormatError("not a policy checkpoint");
    if (j.at("version").get<int>() != kCheckpointVersion)
      throw FormatError("unsupported checkpoint version " + j.at("version").dump());
    PolicyShape s;
    s.vocab_size = j.at("shape").at("vocab_size").get<std::size_t>();
    s.embed_dim = j.at("shape").at("embed_dim").get<std::size_t>();
    s.hidden_dim = j.at("shape").at("hidden_dim").get<std::size_t>();
    s.context = j.at("shape").at("context").get<std::size_t>();
    PolicyParams p{Vocab(j.at("vocab").get<std::vector<std::string>>()), s,
                   j.at("weights").get<std::vector<double>>()};
    if (p.vocab.size() != s.vocab_size || p.weights.size() != s.num_weights())
      throw ShapeMismatch("checkpoint shape does not match its vocab or weights");
    if (!p.all_finite()) throw FormatError("checkpoint holds non-finite weights");
    return p;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed checkpoint: ") + e.what());
  }
}

inline void save_checkpoint(const std::string& path, const PolicyParams& p) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write checkpoint " + path);
  out << checkpoint_json(p).dump() << '\n';
}

inline PolicyParams load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open checkpoint " + path);
  try {
    return checkpoint_from_json(Json::parse(in));
  } catch (const Json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

inline std::string checkpoint_hash(const PolicyParams& p) {
  return hex64(fnv1a(checkpoint_json(p).dump()));
}

// ---------------------------------------------------------------------------
// Text adapters

inline std::vector<int> encode_prompt(const PolicyParams& p, std::string_view prompt) {
  return p.vocab.encode_lenient(tokenize(prompt));
}

// Target tokens of a trace plus the terminating <eos>.
inline std::vector<int> encode_target(const PolicyParams& p, std::string_view raw_target) {
  auto ids = p.vocab.encode(tokenize(raw_target));
  ids.push_back(p.vocab.eos());
  return ids;
}

}  // namespace reveal
