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

// Fixtures and independent reference implementations shared by the unit
// tests and the acceptance binary.

#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "reveal/policy.hpp"
#include "reveal/reasoning.hpp"
#include "reveal/taxonomy.hpp"

namespace reveal::testing {

inline std::vector<std::string> filler_words(std::size_t n) {
  std::vector<std::string> w;
  for (std::size_t i = 0; i < n; ++i) w.push_back("w" + std::to_string(i));
  return w;
}

// Policy over filler words plus the three-class labels.
inline PolicyParams tiny_policy(std::uint64_t seed, std::size_t words = 12, std::size_t d = 4,
                                std::size_t h = 6, std::size_t c = 3, double scale = 0.5) {
  const Vocab vocab = Vocab::build({filler_words(words)}, Taxonomy::three().labels);
  PolicyShape shape;
  shape.embed_dim = d;
  shape.hidden_dim = h;
  shape.context = c;
  return PolicyParams::random(vocab, shape, seed, scale);
}

// A random well-formed instance: a few prompt words, a short think and a
// label drawn from the three-class taxonomy.
inline SftInstance random_instance(Rng& rng, std::size_t words = 12) {
  const auto vocab = filler_words(words);
  const auto& labels = Taxonomy::three().labels;
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  std::string prompt;
  const std::size_t plen = 1 + pick(6);
  for (std::size_t i = 0; i < plen; ++i) prompt += (i ? " " : "") + vocab[pick(vocab.size())];
  std::string think;
  const std::size_t tlen = 1 + pick(5);
  for (std::size_t i = 0; i < tlen; ++i) think += " " + vocab[pick(vocab.size())];
  think += " ";
  const std::string label = labels[pick(labels.size())];
  SftInstance inst;
  inst.doc_id = "r" + std::to_string(pick(1000000));
  inst.prompt = prompt;
  inst.target = parse_trace(render_trace(think, label), Taxonomy::three());
  inst.label = label;
  return inst;
}

// Central finite differences of f over every weight.
inline std::vector<double> finite_difference(const PolicyParams& p,
                                             const std::function<double(const PolicyParams&)>& f,
                                             double h = 1e-5) {
  std::vector<double> g(p.weights.size());
  PolicyParams q = p;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double w = q.weights[i];
    q.weights[i] = w + h;
    const double up = f(q);
    q.weights[i] = w - h;
    const double down = f(q);
    q.weights[i] = w;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// ||a - b|| / max(||a||, ||b||, tiny).
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), 1e-300});
}

// Textbook PPO clip with one epsilon.
inline double symmetric_clip_oracle(double ratio, double adv, double eps) {
  double clipped = ratio;
  if (clipped < 1.0 - eps) clipped = 1.0 - eps;
  if (clipped > 1.0 + eps) clipped = 1.0 + eps;
  const double a = ratio * adv, b = clipped * adv;
  return a < b ? a : b;
}

// Macro-F1 by explicit per-class precision/recall loops. "" marks an
// unparseable prediction.
inline double brute_macro_f1(const std::vector<std::string>& golds,
                             const std::vector<std::string>& preds,
                             const std::vector<std::string>& classes) {
  double total = 0.0;
  for (const auto& c : classes) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < golds.size(); ++i) {
      const bool g = golds[i] == c;
      const bool p = preds[i] == c;
      if (g && p) tp += 1;
      if (!g && p) fp += 1;
      if (g && !p) fn += 1;
    }
    const double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    total += precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
  }
  return total / static_cast<double>(classes.size());
}

inline double brute_accuracy(const std::vector<std::string>& golds,
                             const std::vector<std::string>& preds) {
  double hit = 0;
  for (std::size_t i = 0; i < golds.size(); ++i) hit += golds[i] == preds[i] ? 1 : 0;
  return hit / static_cast<double>(golds.size());
}

}  // namespace reveal::testing
