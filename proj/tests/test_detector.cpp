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

#include "reveal/detector.hpp"
#include "reveal/mock_backends.hpp"
#include "reveal/sft.hpp"

namespace reveal {
namespace {

const Taxonomy kThree = Taxonomy::three();

std::string words(std::size_t n, const std::string& w = "word") {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out += (i ? " " : "") + w;
  return out;
}

TEST(Detect, OverfitPolicyReturnsItsLabel) {
  const std::string text = "honestly the bus was late lol";
  SftInstance inst{"d", prompts::inference(text, kThree, true),
                   parse_trace(render_trace(" casual tone ", "AI-Polish"), kThree), "AI-Polish"};
  PolicyShape shape;
  shape.embed_dim = 8;
  shape.hidden_dim = 16;
  shape.context = 4;
  PolicyParams p = PolicyParams::random(vocab_for({inst}, kThree), shape, 3);
  SftOptions o;
  o.epochs = 200;
  o.batch_size = 1;
  p = train_sft(p, {inst}, o).params;
  const auto t = detect(text, p, kThree);
  EXPECT_TRUE(t.format_valid);
  EXPECT_EQ(t.answer_label, std::optional<std::string>("AI-Polish"));
}

TEST(Detect, DirectAnswerModeThroughABackend) {
  mock::FixedReplyClient direct("direct", "<answer>Human</answer>");
  DetectOptions o;
  o.cot = false;
  const auto t = detect("some text", direct, kThree, o);
  EXPECT_TRUE(t.format_valid);
  EXPECT_EQ(t.answer_label, std::optional<std::string>("Human"));
  // The same reply is malformed when reasoning is required.
  EXPECT_FALSE(detect("some text", direct, kThree).format_valid);
}

TEST(Detect, MalformedCompletionHasNoVerdict) {
  mock::FixedReplyClient junk("junk", "<think>hmm");
  const auto t = detect("text", junk, kThree);
  EXPECT_FALSE(t.format_valid);
  EXPECT_FALSE(t.answer_label.has_value());
  FunctionClient down("down", [](const std::string&, int, double) -> std::string { throw ClientError("503"); });
  EXPECT_THROW(detect("text", down, kThree), BackendError);
}

TEST(AigcScore, AnchorsAndMidpoints) {
  EXPECT_EQ(aigc_from_probs(1, 0, 0).score, 0.0);
  EXPECT_EQ(aigc_from_probs(0, 0, 1).score, 1.0);
  EXPECT_EQ(aigc_from_probs(0.5, 0.5, 0).score, 0.25);
  EXPECT_EQ(aigc_from_probs(0, 0.5, 0.5).score, 0.75);
  EXPECT_EQ(aigc_from_probs(0.2, 0.2, 0).score, 0.25);  // normalised
  EXPECT_THROW(aigc_from_probs(2, 2, 0), std::invalid_argument);
  EXPECT_THROW(aigc_from_probs(0, 0, 0), std::invalid_argument);
  EXPECT_THROW(aigc_from_probs(-0.1, 0.5, 0.6), std::invalid_argument);
  EXPECT_THROW(aigc_score(std::vector<double>{1.0, 2.0}), ShapeMismatch);
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_THROW(aigc_score(0.0, inf, 0.0), std::invalid_argument);
}

TEST(AigcScore, SoftmaxOfLogits) {
  const auto s = aigc_score(std::log(0.2), std::log(0.3), std::log(0.5));
  EXPECT_NEAR(s.p_polish, 0.3, 1e-12);
  EXPECT_NEAR(s.score, 0.5 + 0.15, 1e-12);
  EXPECT_EQ(s.argmax(), 2u);
  EXPECT_NEAR(s.confidence(), 0.5, 1e-12);
}

TEST(Segment, SingleParagraphIsOneBlock) {
  const std::string text = words(30);
  EXPECT_EQ(segment(text), (std::vector<Block>{{0, text.size()}}));
  EXPECT_THROW(segment(""), EmptyInput);
}

TEST(Segment, BlankLinesSeparateBlocks) {
  const std::string a = words(25, "a"), b = words(25, "b"), c = words(25, "c");
  const std::string text = a + "\n\n" + b + "\n \n\n" + c;
  const auto blocks = segment(text);
  ASSERT_EQ(blocks.size(), 3u);
  EXPECT_EQ(text.substr(blocks[0].start, blocks[0].end - blocks[0].start), a);
  EXPECT_EQ(text.substr(blocks[1].start, blocks[1].end - blocks[1].start), b);
  EXPECT_EQ(text.substr(blocks[2].start, blocks[2].end - blocks[2].start), c);
  // A single newline does not split.
  EXPECT_EQ(segment(a + "\n" + b).size(), 1u);
}

TEST(Segment, ShortBlocksMerge) {
  const std::string text = words(5, "t") + "\n\n" + words(25, "a") + "\n\n" + words(3, "z");
  const auto blocks = segment(text);
  ASSERT_EQ(blocks.size(), 1u);
  EXPECT_EQ(segment(text, SegmentOptions{1}).size(), 3u);
}

// Blocks are ordered, disjoint, cover the text from 0 to the end and are
// separated by whitespace only.
TEST(Segment, FuzzedReconstruction) {
  Rng rng(21);
  const std::vector<std::string> pieces = {"word", "x", ",", " ", "\n", "\n\n", "\t", " \n \n "};
  for (int n = 0; n < 2000; ++n) {
    std::string text;
    const int len = 1 + static_cast<int>(rng() % 60);
    for (int i = 0; i < len; ++i) text += pieces[rng() % pieces.size()];
    const auto blocks = segment(text, SegmentOptions{rng() % 6});
    ASSERT_FALSE(blocks.empty());
    EXPECT_EQ(blocks.front().start, 0u);
    EXPECT_EQ(blocks.back().end, text.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      EXPECT_LT(blocks[i].start, blocks[i].end);
      if (i == 0) continue;
      ASSERT_LE(blocks[i - 1].end, blocks[i].start);
      const std::string gap = text.substr(blocks[i - 1].end, blocks[i].start - blocks[i - 1].end);
      EXPECT_EQ(gap.find_first_not_of(" \t\n\r\f\v"), std::string::npos);
      EXPECT_GE(std::count(gap.begin(), gap.end(), '\n'), 2);
    }
  }
}

TEST(Scan, RiggedBackendScoresEachBlock) {
  const std::string text = words(25, "human") + "\n\n" + words(25, "polish") + "\n\n" + words(25, "native");
  RiggedScorer rigged("rigged", [](std::string_view block) -> std::size_t {
    if (block.find("human") != std::string_view::npos) return 0;
    if (block.find("polish") != std::string_view::npos) return 1;
    return 2;
  });
  const auto reports = scan(text, rigged, {}, 3);
  ASSERT_EQ(reports.size(), 3u);
  EXPECT_NEAR(reports[0].score.score, 0.0, 1e-12);
  EXPECT_NEAR(reports[1].score.score, 0.5, 1e-12);
  EXPECT_NEAR(reports[2].score.score, 1.0, 1e-12);
  EXPECT_EQ(reports[1].verdict, "AI-Polish");
  const auto j = scan_json(reports);
  ASSERT_EQ(j["blocks"].size(), 3u);
  for (const char* key : {"index", "start", "end", "p_human", "p_polish", "p_native", "score", "verdict"})
    EXPECT_TRUE(j["blocks"][0].contains(key)) << key;
}

TEST(Scorers, ClientScorerReadsProbabilityJson) {
  auto client = std::make_shared<mock::FixedReplyClient>("probs", R"(Sure: {"Human": 0.2, "AI-Polish": 0.3, "AI-Native": 0.5})");
  ClientScorer scorer(client);
  EXPECT_NEAR(scorer.score("x").score, 0.65, 1e-12);
  ClientScorer bad(std::make_shared<mock::FixedReplyClient>("bad", R"({"Robot": 1})"));
  EXPECT_THROW(bad.score("x"), BackendError);
  ClientScorer none(std::make_shared<mock::FixedReplyClient>("none", "no json"));
  EXPECT_THROW(none.score("x"), BackendError);
}

TEST(Scorers, ToyScorerGivesADistribution) {
  const Vocab v = Vocab::build({tokenize(prompts::inference("a b c", kThree, false))}, kThree.labels);
  ToyScorer scorer(PolicyParams::random(v, PolicyShape{}, 4));
  const auto s = scorer.score("a b c");
  EXPECT_NEAR(s.p_human + s.p_polish + s.p_native, 1.0, 1e-12);
  EXPECT_GE(s.score, 0.0);
  EXPECT_LE(s.score, 1.0);
  // Uniform weights put equal mass on every class.
  ToyScorer flat(PolicyParams::uniform(v, PolicyShape{}));
  EXPECT_NEAR(flat.score("anything").score, 0.5, 1e-12);
}

TEST(Scorers, CueScorerFollowsTheSyntheticCues) {
  const auto scorer = make_cue_scorer();
  EXPECT_EQ(scorer->score("honestly lol this was fun").argmax(), 0u);
  EXPECT_EQ(scorer->score("furthermore we must delve into it").argmax(), 2u);
}

}  // namespace
}  // namespace reveal
