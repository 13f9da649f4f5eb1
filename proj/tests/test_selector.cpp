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

#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include "reveal/selector.hpp"
#include "support.hpp"

namespace reveal {
namespace {

const Taxonomy kBinary = Taxonomy::binary();

std::vector<SftInstance> prompts(std::size_t n) {
  std::vector<SftInstance> out;
  for (std::size_t i = 0; i < n; ++i) {
    SftInstance s;
    s.doc_id = "p" + std::to_string(i);
    s.prompt = "w1 w2";
    s.label = i % 2 ? "AI" : "Human";
    out.push_back(s);
  }
  return out;
}

ReasoningTrace answer(const std::string& label) { return parse_trace(render_trace(" x ", label), kBinary); }

TEST(Selector, PredicateTable) {
  EXPECT_TRUE(has_prediction_variance({0, 1, 0, 1}));
  EXPECT_FALSE(has_prediction_variance({0, 0, 0, 0}));
  EXPECT_FALSE(has_prediction_variance({1, 1, 1, 1}));
  EXPECT_TRUE(has_prediction_variance({1, 1, 1, 0}));
}

TEST(Selector, ScoreRolloutMatchesParseOracle) {
  EXPECT_EQ(score_rollout(answer("AI"), "AI"), 1);
  EXPECT_EQ(score_rollout(answer("Human"), "AI"), 0);
  EXPECT_EQ(score_rollout(parse_trace("<think>x</think>", kBinary), "AI"), 0);
}

TEST(Selector, AlwaysCorrectPolicyRetainsNothing) {
  const auto data = prompts(30);
  RolloutFn oracle = [](const SftInstance& s, std::uint64_t) { return answer(s.label); };
  SelectOptions o;
  const auto sel = select_by_variance(data, oracle, o);
  EXPECT_TRUE(sel.retained.empty());
  ASSERT_EQ(sel.records.size(), 30u);
  for (const auto& r : sel.records) EXPECT_EQ(r.scores, std::vector<int>(8, 1));
  o.k = 1;
  EXPECT_THROW(select_by_variance(data, oracle, o), std::invalid_argument);
}

TEST(Selector, MinorityOutcomeNeverDeselects) {
  Rng rng(5);
  for (int n = 0; n < 500; ++n) {
    std::vector<int> s(2 + rng() % 8);
    for (auto& v : s) v = static_cast<int>(rng() % 2);
    if (!has_prediction_variance(s)) continue;
    const int ones = std::accumulate(s.begin(), s.end(), 0);
    auto grown = s;
    grown.push_back(2 * ones < static_cast<int>(s.size()) ? 1 : 0);
    EXPECT_TRUE(has_prediction_variance(grown));
  }
}

TEST(Selector, RetainedIsASortedSubsetWithoutDuplicates) {
  auto data = prompts(40);
  data.push_back(data[3]);  // duplicate id in the input
  RolloutFn coin = [](const SftInstance&, std::uint64_t seed) {
    Rng r(seed);
    return answer(uniform01(r) < 0.5 ? "AI" : "Human");
  };
  SelectOptions o;
  o.k = 3;
  const auto sel = select_by_variance(data, coin, o);
  const std::set<std::string> uniq(sel.retained.begin(), sel.retained.end());
  EXPECT_EQ(uniq.size(), sel.retained.size());
  EXPECT_TRUE(std::is_sorted(sel.retained.begin(), sel.retained.end()));
  std::set<std::string> input;
  for (const auto& d : data) input.insert(d.doc_id);
  for (const auto& id : sel.retained) EXPECT_TRUE(input.count(id));
  // Deterministic under parallelism.
  o.parallelism = 4;
  EXPECT_EQ(select_by_variance(data, coin, o).retained, sel.retained);
}

TEST(Selector, PolicyScoresAreCachedByCheckpoint) {
  const PolicyParams p = testing::tiny_policy(3);
  std::vector<SftInstance> data = prompts(6);
  for (auto& d : data) d.prompt = "w1 w4";
  const auto path = (std::filesystem::temp_directory_path() / "reveal_sel_cache.jsonl").string();
  std::filesystem::remove(path);
  PolicySelectOptions o;
  o.k = 4;
  o.max_tokens = 6;
  SelectionCache cache(path);
  o.cache = &cache;
  const auto first = select_by_variance(data, p, kBinary, o);
  EXPECT_EQ(cache.size(), 6u);

  // A reloaded cache serves the same records. Planting fabricated scores
  // shows the rollouts are skipped on a hit.
  SelectionCache reloaded(path);
  EXPECT_EQ(reloaded.size(), 6u);
  const std::string key = SelectionCache::key(checkpoint_hash(p), "p0", o.seed, o.k);
  ASSERT_TRUE(reloaded.get(key).has_value());
  SelectionCache planted;
  planted.put(key, {1, 0, 1, 0});
  o.cache = &reloaded;
  const auto second = select_by_variance(data, p, kBinary, o);
  for (std::size_t i = 0; i < first.records.size(); ++i)
    EXPECT_EQ(first.records[i].scores, second.records[i].scores);
  o.cache = &planted;
  const auto third = select_by_variance(data, p, kBinary, o);
  EXPECT_EQ(third.records[0].scores, (std::vector<int>{1, 0, 1, 0}));
  EXPECT_TRUE(third.records[0].selected);
  std::filesystem::remove(path);
}

TEST(Selector, RandomModeKeepsExactlyN) {
  const auto data = prompts(50);
  const auto sel = select_random(data, 20, 4);
  EXPECT_EQ(sel.retained.size(), 20u);
  EXPECT_EQ(select_random(data, 20, 4).retained, sel.retained);
  EXPECT_EQ(select_random(data, 80, 4).retained.size(), 50u);
  EXPECT_EQ(retained_subset(data, sel).size(), 20u);
}

}  // namespace
}  // namespace reveal
