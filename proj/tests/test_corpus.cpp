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

#include "reveal/corpus_forge.hpp"
#include "reveal/mock_backends.hpp"
#include "reveal/synthetic.hpp"

namespace reveal {
namespace {

Document human(std::string id, std::size_t words) {
  Document d;
  d.id = std::move(id);
  d.domain = Domain::kNews;
  for (std::size_t i = 0; i < words; ++i) d.text += (i ? " w" : "w") + std::to_string(i % 7);
  d.token_count = count_tokens(d.text);
  d.published_before_cutoff = true;
  return d;
}

std::vector<Document> synthetic_humans(std::size_t n, std::uint64_t seed) {
  std::vector<Json> src;
  for (std::size_t i = 0; i < n; ++i) src.push_back(synthetic::make_human_source(i, seed));
  return ingest_human_sources(src).accepted;
}

TEST(Ingest, RejectsMissingOrLateDates) {
  const std::vector<Json> records = {
      {{"id", "a"}, {"domain", "news"}, {"text", "fine text"}, {"date", "2022-11-29"}},
      {{"id", "b"}, {"domain", "news"}, {"text", "too late"}, {"date", "2022-11-30"}},
      {{"id", "c"}, {"domain", "news"}, {"text", "no date"}},
      {{"id", "d"}, {"domain", "news"}, {"text", "bad date"}, {"date", "Nov 1 2020"}},
      {{"id", "a"}, {"domain", "news"}, {"text", "duplicate"}, {"date", "2010-01-01"}},
      {{"id", "e"}, {"domain", "news"}, {"text", "   "}, {"date", "2010-01-01"}},
      {{"id", "f"}, {"domain", "poetry"}, {"text", "unknown domain"}, {"date", "2010-01-01"}},
  };
  const auto r = ingest_human_sources(records);
  ASSERT_EQ(r.accepted.size(), 1u);
  EXPECT_EQ(r.accepted[0].id, "a");
  EXPECT_EQ(r.accepted[0].token_count, 2u);
  EXPECT_TRUE(r.accepted[0].published_before_cutoff);
  EXPECT_EQ(r.rejected.size(), 6u);
}

TEST(ExtractMeta, TargetLengthComesFromTheHumanDocument) {
  const Document h = human("h1", 350);
  mock::FixedReplyClient echo("fixed", R"({"topic_summary": "rivers", "key_points": ["flow", "banks"]})");
  const auto meta = extract_meta(h, echo);
  EXPECT_EQ(meta.target_token_count, 350u);
  EXPECT_EQ(meta.topic_summary, "rivers");
  EXPECT_EQ(meta.key_points, (std::vector<std::string>{"flow", "banks"}));
  EXPECT_EQ(meta.ref_id, "h1");
}

TEST(ExtractMeta, EmptyReplyIsAnError) {
  mock::FixedReplyClient empty("empty", "");
  EXPECT_THROW(extract_meta(human("h1", 10), empty), EmptyExtraction);
}

TEST(GenerateNative, RespectsTheLengthBand) {
  mock::MockGenerator gen("mock:alpha");
  MetaAttributes meta;
  meta.ref_id = "h9";
  meta.topic_summary = "energy";
  meta.key_points = {"energy", "grid"};
  meta.target_token_count = 100;
  const Document d = generate_ai_native(meta, gen, NativeOptions{});
  EXPECT_GE(d.token_count, 80u);
  EXPECT_LE(d.token_count, 120u);
  EXPECT_EQ(d.human_ref_id, std::optional<std::string>("h9"));
  EXPECT_EQ(d.source_model, std::optional<std::string>("mock:alpha"));
  EXPECT_EQ(d.label, Label::kAINative);
}

TEST(GenerateNative, ShortRepliesAreUnsatisfiable) {
  mock::FixedReplyClient shorty("short", "one two three four five");
  MetaAttributes meta;
  meta.ref_id = "h1";
  meta.topic_summary = "x";
  meta.target_token_count = 100;
  EXPECT_THROW(generate_ai_native(meta, shorty, NativeOptions{}), LengthUnsatisfiable);
}

TEST(GeneratePolish, IdentityBackendKeepsText) {
  mock::IdentityClient id;
  const Document h = human("h42", 30);
  const Document d = generate_ai_polish(h, id);
  EXPECT_EQ(d.text, h.text);
  EXPECT_EQ(d.label, Label::kAIPolish);
  EXPECT_EQ(d.human_ref_id, std::optional<std::string>("h42"));
}

TEST(GeneratePolish, DistinctClientsGiveDistinctDocuments) {
  const Document h = human("h42", 30);
  mock::MockGenerator a("mock:a"), b("mock:b");
  const Document da = generate_ai_polish(h, a), db = generate_ai_polish(h, b);
  EXPECT_NE(da.id, db.id);
  EXPECT_NE(da.source_model, db.source_model);
  EXPECT_EQ(da.human_ref_id, db.human_ref_id);
}

TEST(CorpusStats, CountsPerLabel) {
  EXPECT_EQ(corpus_stats({}).at(Label::kAINative).samples, 0u);
  EXPECT_EQ(corpus_stats({}).at(Label::kHuman).total_tokens, 0u);

  Document h = human("h", 5), n = human("n", 3), p = human("p", 4);
  n.label = Label::kAINative;
  p.label = Label::kAIPolish;
  n.source_model = p.source_model = "A";
  const auto s = corpus_stats({h, n, p});
  EXPECT_EQ(s.at(Label::kAINative).distinct_generators, 1u);
  EXPECT_EQ(s.at(Label::kHuman).total_tokens, 5u);
  EXPECT_EQ(s.at(Label::kAIPolish).samples, 1u);
  EXPECT_EQ(with_thousands(22535085), "22,535,085");
  EXPECT_EQ(with_thousands(999), "999");
}

TEST(BuildCorpus, SatisfiesReferentialIntegrityAndIsDeterministic) {
  const auto humans = synthetic_humans(20, 5);
  std::vector<ClientPtr> gens = {std::make_shared<mock::MockGenerator>("mock:alpha"),
                                 std::make_shared<mock::MockGenerator>("mock:beta")};
  CorpusOptions opts;
  opts.seed = 3;
  const auto serial = build_corpus(humans, gens, opts);
  opts.parallelism = 4;
  const auto parallel = build_corpus(humans, gens, opts);
  EXPECT_NO_THROW(validate_corpus(serial.corpus));
  EXPECT_EQ(serial.corpus, parallel.corpus);
  EXPECT_EQ(serial.corpus.size() + serial.failures.size(), humans.size() * 5);
  EXPECT_TRUE(std::is_sorted(serial.corpus.begin(), serial.corpus.end(),
                             [](const Document& a, const Document& b) { return a.id < b.id; }));
}

TEST(ValidateCorpus, RejectsDanglingReferences) {
  Document n = human("n", 3);
  n.label = Label::kAINative;
  n.source_model = "A";
  n.human_ref_id = "missing";
  n.published_before_cutoff = false;
  EXPECT_THROW(validate_corpus({human("h", 2), n}), FormatError);
  n.human_ref_id = "h";
  EXPECT_NO_THROW(validate_corpus({human("h", 2), n}));
  Document bad = human("h", 2);
  bad.token_count = 5;
  EXPECT_THROW(validate_corpus({bad}), FormatError);
}

TEST(CorpusIo, JsonlRoundTrip) {
  const auto humans = synthetic_humans(3, 9);
  const auto path = (std::filesystem::temp_directory_path() / "reveal_corpus_rt.jsonl").string();
  write_corpus(path, humans);
  EXPECT_EQ(read_corpus(path), humans);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace reveal
