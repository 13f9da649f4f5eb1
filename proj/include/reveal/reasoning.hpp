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

// Think-then-Answer traces: parsing, rendering, the hindsight prompt and
// teacher-driven construction of the SFT dataset.

#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reveal/client.hpp"
#include "reveal/document.hpp"
#include "reveal/prompts.hpp"
#include "reveal/taxonomy.hpp"
#include "reveal/util.hpp"

namespace reveal {

inline constexpr std::string_view kThinkOpen = "<think>";
inline constexpr std::string_view kThinkClose = "</think>";
inline constexpr std::string_view kAnswerOpen = "<answer>";
inline constexpr std::string_view kAnswerClose = "</answer>";

struct ReasoningTrace {
  std::string raw;
  std::string think;
  std::optional<std::string> answer_label;  // canonical taxonomy name
  bool format_valid = false;
  bool leaks_label = false;

  bool operator==(const ReasoningTrace&) const = default;
};

enum class TraceMode {
  kThinkThenAnswer,  // exactly one think block, then exactly one answer block
  kAnswerOnly,       // think block optional (direct-answer ablation)
};

inline const std::vector<std::string_view>& leak_phrases() {
  static const std::vector<std::string_view> kPhrases = {
      "ground truth", "ground-truth", "the given label", "as labeled", "as labelled",
      "known label"};
  return kPhrases;
}

inline bool mentions_label_source(std::string_view think) {
  std::string lower;
  for (unsigned char c : think) lower += static_cast<char>(std::tolower(c));
  return std::any_of(leak_phrases().begin(), leak_phrases().end(),
                     [&](std::string_view p) { return lower.find(p) != std::string::npos; });
}

namespace detail {

inline bool all_space(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool has_any_tag(std::string_view s) {
  for (auto tag : {kThinkOpen, kThinkClose, kAnswerOpen, kAnswerClose}) {
    if (s.find(tag) != std::string_view::npos) return true;
  }
  return false;
}

}  // namespace detail

// Never throws: malformed input yields format_valid = false so callers can
// still score it.
inline ReasoningTrace parse_trace(std::string_view raw, const Taxonomy& taxonomy,
                                  TraceMode mode = TraceMode::kThinkThenAnswer) {
  ReasoningTrace t;
  t.raw = std::string(raw);
  std::string_view rest = raw;
  const auto lead = rest.find_first_not_of(" \t\r\n");
  rest = lead == std::string_view::npos ? std::string_view{} : rest.substr(lead);

  bool have_think = false;
  if (rest.substr(0, kThinkOpen.size()) == kThinkOpen) {
    rest.remove_prefix(kThinkOpen.size());
    const auto close = rest.find(kThinkClose);
    if (close == std::string_view::npos) return t;
    const std::string_view body = rest.substr(0, close);
    if (detail::has_any_tag(body)) return t;
    t.think = std::string(body);
    t.leaks_label = mentions_label_source(body);
    have_think = true;
    rest.remove_prefix(close + kThinkClose.size());
    const auto next = rest.find_first_not_of(" \t\r\n");
    rest = next == std::string_view::npos ? std::string_view{} : rest.substr(next);
  }
  if (mode == TraceMode::kThinkThenAnswer &&
      (!have_think || detail::all_space(t.think)))
    return t;

  if (rest.substr(0, kAnswerOpen.size()) != kAnswerOpen) return t;
  rest.remove_prefix(kAnswerOpen.size());
  const auto close = rest.find(kAnswerClose);
  if (close == std::string_view::npos) return t;
  const std::string_view body = rest.substr(0, close);
  if (detail::has_any_tag(body)) return t;
  rest.remove_prefix(close + kAnswerClose.size());
  if (!detail::all_space(rest)) return t;

  const auto idx = taxonomy.find(detail::trim(body));
  if (!idx) return t;
  t.answer_label = taxonomy.labels[*idx];
  t.format_valid = true;
  return t;
}

// Inverse of parse_trace for valid traces.
inline std::string render_trace(std::string_view think, std::string_view label) {
  std::string out(kThinkOpen);
  out += think;
  out += kThinkClose;
  out += kAnswerOpen;
  out += label;
  out += kAnswerClose;
  return out;
}

inline std::string render_answer_only(std::string_view label) {
  return std::string(kAnswerOpen) + std::string(label) + std::string(kAnswerClose);
}

// ---------------------------------------------------------------------------
// SFT dataset

struct SftInstance {
  std::string doc_id;
  std::string prompt;
  ReasoningTrace target;
  std::string label;
};

inline OrderedJson to_json(const SftInstance& s) {
  return OrderedJson{{"doc_id", s.doc_id}, {"prompt", s.prompt}, {"raw_target", s.target.raw},
                     {"label", s.label}};
}

inline SftInstance sft_instance_from_json(const Json& j, const Taxonomy& tax) {
  SftInstance s;
  try {
    s.doc_id = j.at("doc_id").get<std::string>();
    s.prompt = j.at("prompt").get<std::string>();
    s.label = tax.labels.at(tax.index_of(j.at("label").get<std::string>()));
    const std::string raw = j.at("raw_target").get<std::string>();
    const bool has_think = raw.find(kThinkOpen) != std::string::npos;
    s.target = parse_trace(raw, tax, has_think ? TraceMode::kThinkThenAnswer : TraceMode::kAnswerOnly);
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed SFT record: ") + e.what());
  }
  if (!s.target.format_valid || s.target.answer_label != s.label)
    throw FormatError(s.doc_id + ": raw_target is not a valid trace for label " + s.label);
  return s;
}

inline std::vector<SftInstance> read_sft(const std::string& path, const Taxonomy& tax) {
  std::vector<SftInstance> out;
  for (const auto& j : read_jsonl(path)) out.push_back(sft_instance_from_json(j, tax));
  return out;
}

inline void write_sft(const std::string& path, const std::vector<SftInstance>& data) {
  JsonlWriter w(path);
  for (const auto& s : data) w.write(to_json(s));
}

// Document text embedded in a detection prompt.
inline std::string prompt_document_text(std::string_view prompt) {
  const std::string marker = "\n" + std::string(prompts::kTextMarker);
  const auto pos = prompt.find(marker);
  if (pos == std::string_view::npos) return std::string(prompt);
  return std::string(prompt.substr(pos + marker.size()));
}

inline std::string build_hindsight_prompt(const Document& doc, const Taxonomy& tax) {
  const std::string gold = tax.gold_for(doc.label);
  return prompts::hindsight(doc.text, gold, tax);
}

struct AugmentOptions {
  int retries = 2;  // extra teacher calls after a rejected trace
  int max_tokens = 1024;
  double temperature = 1.0;
  std::size_t parallelism = 1;
};

struct Rejection {
  std::string doc_id;
  std::string reason;
};

struct AugmentResult {
  std::vector<SftInstance> instances;
  std::vector<Rejection> rejections;
};

// The hindsight prompt ends inside an opened think block; teachers usually
// continue from there.
inline std::string complete_open_think(std::string_view reply) {
  const auto lead = reply.find_first_not_of(" \t\r\n");
  if (lead != std::string_view::npos && reply.substr(lead, kThinkOpen.size()) == kThinkOpen)
    return std::string(reply);
  return std::string(kThinkOpen) + std::string(reply);
}

inline std::optional<std::string> trace_rejection(const ReasoningTrace& t, std::string_view gold) {
  if (!t.format_valid) return "malformed trace";
  if (t.answer_label != gold) return "answer " + t.answer_label.value_or("?") + " != " + std::string(gold);
  if (t.leaks_label) return "think mentions the label source";
  return std::nullopt;
}

// One instance per accepted document, ordered by doc_id. Traces that are
// malformed, disagree with the gold label or leak it are retried, then
// skipped and recorded.
inline AugmentResult augment_dataset(const std::vector<Document>& corpus, GeneratorClient& teacher,
                                     const Taxonomy& tax, const AugmentOptions& opts = {}) {
  if (corpus.empty()) throw EmptyInput("augment_dataset: empty corpus");
  struct Outcome {
    std::optional<SftInstance> instance;
    std::string reason;
  };
  auto outcomes = parallel_map<Outcome>(corpus.size(), opts.parallelism, [&](std::size_t i) {
    const Document& doc = corpus[i];
    const std::string gold = tax.gold_for(doc.label);
    const std::string prompt = prompts::hindsight(doc.text, gold, tax);
    Outcome out;
    for (int attempt = 0; attempt <= opts.retries; ++attempt) {
      const std::string reply = teacher.complete(prompt, opts.max_tokens, opts.temperature);
      ReasoningTrace t = parse_trace(complete_open_think(reply), tax);
      if (auto why = trace_rejection(t, gold)) {
        out.reason = *why;
        continue;
      }
      out.instance = SftInstance{doc.id, prompts::inference(doc.text, tax, true), std::move(t), gold};
      return out;
    }
    return out;
  });

  AugmentResult result;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (outcomes[i].instance) {
      result.instances.push_back(std::move(*outcomes[i].instance));
    } else {
      result.rejections.push_back({corpus[i].id, outcomes[i].reason});
      log::info("trace rejected", {{"doc_id", corpus[i].id}, {"reason", outcomes[i].reason}});
    }
  }
  std::sort(result.instances.begin(), result.instances.end(),
            [](const SftInstance& a, const SftInstance& b) { return a.doc_id < b.doc_id; });
  return result;
}

// Direct-answer instances for the no-reasoning ablation: the target is the
// answer block alone.
inline std::vector<SftInstance> direct_answer_dataset(const std::vector<Document>& corpus,
                                                      const Taxonomy& tax) {
  std::vector<SftInstance> out;
  for (const auto& doc : corpus) {
    const std::string gold = tax.gold_for(doc.label);
    out.push_back({doc.id, prompts::inference(doc.text, tax, false),
                   parse_trace(render_answer_only(gold), tax, TraceMode::kAnswerOnly), gold});
  }
  std::sort(out.begin(), out.end(),
            [](const SftInstance& a, const SftInstance& b) { return a.doc_id < b.doc_id; });
  return out;
}

}  // namespace reveal
