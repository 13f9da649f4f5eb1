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

// Variance-based RL data selection: K stochastic rollouts per prompt, a
// binary correctness score per rollout, and retention of exactly the prompts
// whose score sum lies strictly between 0 and K.

#pragma once

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "reveal/policy.hpp"
#include "reveal/reasoning.hpp"
#include "reveal/reward.hpp"
#include "reveal/util.hpp"

namespace reveal {

struct SelectionRecord {
  std::string doc_id;
  std::vector<int> scores;
  bool selected = false;
};

// Same rule as the accuracy reward, by construction.
inline int score_rollout(const ReasoningTrace& trace, std::string_view gold) {
  return static_cast<int>(accuracy_reward(trace, gold));
}

inline bool has_prediction_variance(const std::vector<int>& scores) {
  const int sum = std::accumulate(scores.begin(), scores.end(), 0);
  return sum > 0 && sum < static_cast<int>(scores.size());
}

inline OrderedJson to_json(const SelectionRecord& r) {
  return OrderedJson{{"doc_id", r.doc_id}, {"scores", r.scores}, {"selected", r.selected}};
}

// Persisted scores keyed by (checkpoint hash, doc_id, seed); a re-run with
// the same key skips its rollouts.
class SelectionCache {
 public:
  SelectionCache() = default;
  explicit SelectionCache(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        auto j = Json::parse(line);
        entries_[j.at("key").get<std::string>()] = j.at("scores").get<std::vector<int>>();
      } catch (const Json::exception&) {
      }
    }
  }

  static std::string key(std::string_view ckpt_hash, std::string_view doc_id, std::uint64_t seed,
                         std::size_t k) {
    return std::string(ckpt_hash) + "|" + std::string(doc_id) + "|" + std::to_string(seed) + "|" +
           std::to_string(k);
  }

  std::optional<std::vector<int>> get(const std::string& key) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  void put(const std::string& key, const std::vector<int>& scores) {
    std::lock_guard lock(mutex_);
    if (!entries_.emplace(key, scores).second) return;
    if (!path_.empty()) {
      std::ofstream out(path_, std::ios::app);
      out << OrderedJson{{"key", key}, {"scores", scores}}.dump() << '\n';
    }
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
  }

 private:
  std::string path_;
  mutable std::mutex mutex_;
  std::map<std::string, std::vector<int>> entries_;
};

struct SelectionResult {
  std::vector<std::string> retained;        // sorted, unique
  std::vector<SelectionRecord> records;     // one per prompt, sorted by doc_id
};

// (instance, rollout seed) -> parsed trace
using RolloutFn = std::function<ReasoningTrace(const SftInstance&, std::uint64_t)>;

inline SelectionResult assemble_selection(std::vector<SelectionRecord> records) {
  std::sort(records.begin(), records.end(),
            [](const SelectionRecord& a, const SelectionRecord& b) { return a.doc_id < b.doc_id; });
  SelectionResult out;
  std::set<std::string> kept;
  for (const auto& r : records)
    if (r.selected) kept.insert(r.doc_id);
  out.retained.assign(kept.begin(), kept.end());
  out.records = std::move(records);
  return out;
}

struct SelectOptions {
  std::size_t k = 8;
  std::uint64_t seed = 0;
  std::size_t parallelism = 1;
};

inline SelectionResult select_by_variance(const std::vector<SftInstance>& dataset,
                                          const RolloutFn& rollout, const SelectOptions& opts) {
  if (opts.k < 2) throw std::invalid_argument("select: K must be at least 2");
  auto records = parallel_map<SelectionRecord>(dataset.size(), opts.parallelism, [&](std::size_t i) {
    const SftInstance& inst = dataset[i];
    SelectionRecord r{inst.doc_id, {}, false};
    const std::uint64_t base = derive_seed(opts.seed, inst.doc_id);
    for (std::size_t k = 0; k < opts.k; ++k)
      r.scores.push_back(score_rollout(rollout(inst, derive_seed(base, k)), inst.label));
    r.selected = has_prediction_variance(r.scores);
    return r;
  });
  return assemble_selection(std::move(records));
}

struct PolicySelectOptions : SelectOptions {
  double temperature = 1.0;
  std::size_t max_tokens = 32;
  TraceMode mode = TraceMode::kThinkThenAnswer;
  SelectionCache* cache = nullptr;
};

inline SelectionResult select_by_variance(const std::vector<SftInstance>& dataset,
                                          const PolicyParams& params, const Taxonomy& tax,
                                          const PolicySelectOptions& opts) {
  if (opts.k < 2) throw std::invalid_argument("select: K must be at least 2");
  const std::string ckpt = opts.cache ? checkpoint_hash(params) : std::string();
  auto records = parallel_map<SelectionRecord>(dataset.size(), opts.parallelism, [&](std::size_t i) {
    const SftInstance& inst = dataset[i];
    SelectionRecord r{inst.doc_id, {}, false};
    const std::string key = SelectionCache::key(ckpt, inst.doc_id, opts.seed, opts.k);
    if (opts.cache) {
      if (auto hit = opts.cache->get(key)) {
        r.scores = *hit;
        r.selected = has_prediction_variance(r.scores);
        return r;
      }
    }
    const auto prompt = encode_prompt(params, inst.prompt);
    const std::uint64_t base = derive_seed(opts.seed, inst.doc_id);
    for (std::size_t k = 0; k < opts.k; ++k) {
      const Rollout ro = sample(params, prompt, opts.temperature, opts.max_tokens, derive_seed(base, k));
      r.scores.push_back(score_rollout(parse_trace(rollout_text(params, ro), tax, opts.mode), inst.label));
    }
    r.selected = has_prediction_variance(r.scores);
    if (opts.cache) opts.cache->put(key, r.scores);
    return r;
  });
  return assemble_selection(std::move(records));
}

// Uniform random subset of n prompts (the no-selection ablation).
inline SelectionResult select_random(const std::vector<SftInstance>& dataset, std::size_t n,
                                     std::uint64_t seed) {
  std::vector<std::size_t> idx(dataset.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(std::min(n, idx.size()));
  std::set<std::size_t> chosen(idx.begin(), idx.end());
  std::vector<SelectionRecord> records;
  for (std::size_t i = 0; i < dataset.size(); ++i)
    records.push_back({dataset[i].doc_id, {}, chosen.count(i) > 0});
  return assemble_selection(std::move(records));
}

inline std::vector<SftInstance> retained_subset(const std::vector<SftInstance>& dataset,
                                                const SelectionResult& sel) {
  std::set<std::string> keep(sel.retained.begin(), sel.retained.end());
  std::vector<SftInstance> out;
  for (const auto& d : dataset)
    if (keep.count(d.doc_id)) out.push_back(d);
  return out;
}

}  // namespace reveal
