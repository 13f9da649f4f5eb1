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

// Deterministic rule-based backends standing in for generator, teacher and
// judge LLMs. They read the same prompts a real backend would receive.

#pragma once

#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "reveal/client.hpp"
#include "reveal/prompts.hpp"
#include "reveal/reasoning.hpp"
#include "reveal/synthetic.hpp"
#include "reveal/taxonomy.hpp"

namespace reveal::mock {

namespace detail {

inline bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

inline std::string line_value(std::string_view prompt, std::string_view key) {
  const auto pos = prompt.find("\n" + std::string(key));
  if (pos == std::string_view::npos) return {};
  auto rest = prompt.substr(pos + 1 + key.size());
  return std::string(rest.substr(0, rest.find('\n')));
}

inline std::vector<std::string> bullet_lines(std::string_view prompt, std::string_view heading) {
  std::vector<std::string> out;
  auto pos = prompt.find(heading);
  if (pos == std::string_view::npos) return out;
  std::istringstream in(std::string(prompt.substr(pos + heading.size())));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line) && starts_with(line, "- ")) out.push_back(line.substr(2));
  return out;
}

inline std::string format_scores(double a, double b, double c) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << '[' << a << ", " << b << ", " << c << ']';
  return os.str();
}

}  // namespace detail

// Generator for the synthetic language. Replies are a pure function of
// (name, prompt, temperature).
class MockGenerator final : public GeneratorClient {
 public:
  explicit MockGenerator(std::string name)
      : name_(std::move(name)), style_(synthetic::style_for(name_)) {}
  std::string name() const override { return name_; }

  std::string complete(const std::string& prompt, int max_tokens, double temperature) override {
    Rng rng(fnv1a(prompt, fnv1a(name_)) ^ static_cast<std::uint64_t>(temperature * 1000));
    if (detail::starts_with(prompt, prompts::kExtractMetaHeader)) return extract(prompt);
    if (detail::starts_with(prompt, prompts::kNativeHeader)) return native(prompt, rng);
    if (detail::starts_with(prompt, prompts::kContinueHeader)) {
      const auto more =
          static_cast<std::size_t>(std::stoul(detail::line_value(prompt, "Add about ")));
      return synthetic::continuation_text(std::max<std::size_t>(2, more), rng);
    }
    if (detail::starts_with(prompt, prompts::kPolishHeader)) {
      return synthetic::polish_text(prompts::section_after(prompt, "\nText:\n"), style_, rng);
    }
    return synthetic::continuation_text(static_cast<std::size_t>(std::max(2, max_tokens / 2)), rng);
  }

 private:
  std::string extract(const std::string& prompt) const {
    const std::string text = prompts::section_after(prompt, "\nDocument:\n");
    std::map<std::string, int> freq;
    std::vector<std::string> order;
    for (const auto& words : synthetic::topic_words()) {
      for (const auto& tok : tokenize(text)) {
        if (std::find(words.begin(), words.end(), tok) == words.end()) continue;
        if (freq[tok]++ == 0) order.push_back(tok);
      }
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](const std::string& a, const std::string& b) { return freq[a] > freq[b]; });
    if (order.size() > 3) order.resize(3);
    Json j;
    j["topic_summary"] = order.empty() ? std::string("general") : order.front();
    j["key_points"] = order;
    j["style_profile"] =
        synthetic::find_cues(text, synthetic::Cue::kHuman).size() >= 2 ? "conversational" : "formal";
    return j.dump();
  }

  std::string native(const std::string& prompt, Rng& rng) const {
    std::vector<std::string> topic = detail::bullet_lines(prompt, "\nKey points:");
    const std::string summary = detail::line_value(prompt, "Topic: ");
    if (topic.empty() && !summary.empty()) topic.push_back(summary);
    const std::string len = detail::line_value(prompt, "Target length: ");
    const std::size_t target = len.empty() ? 60 : std::stoul(len);
    const bool humanize = prompt.find(prompts::kHumanizeInstruction) != std::string::npos;
    return synthetic::native_text(topic, target, humanize, style_, rng);
  }

  std::string name_;
  synthetic::GeneratorStyle style_;
};

// Returns the text-to-polish unchanged and otherwise echoes the prompt.
class IdentityClient final : public GeneratorClient {
 public:
  std::string name() const override { return "mock:identity"; }
  std::string complete(const std::string& prompt, int, double) override {
    if (detail::starts_with(prompt, prompts::kPolishHeader))
      return prompts::section_after(prompt, "\nText:\n");
    return prompt;
  }
};

// Always replies with a fixed short text.
class FixedReplyClient final : public GeneratorClient {
 public:
  FixedReplyClient(std::string name, std::string reply)
      : name_(std::move(name)), reply_(std::move(reply)) {}
  std::string name() const override { return name_; }
  std::string complete(const std::string&, int, double) override { return reply_; }

 private:
  std::string name_;
  std::string reply_;
};

// Reads the hindsight prompt and writes a trace whose evidence is the cue
// words actually present in the text. The tone word ("casual", "formal",
// "polished") carries the conclusion.
inline std::string teacher_trace_body(std::string_view text, std::string_view gold) {
  using synthetic::Cue;
  const std::string key = normalize_label_key(gold);
  std::vector<std::string> evidence;
  std::string tone;
  if (key == "human") {
    evidence = synthetic::find_cues(text, Cue::kHuman);
    tone = "casual";
  } else if (key == "ainative") {
    evidence = synthetic::find_cues(text, Cue::kAI);
    tone = "formal";
  } else if (key == "aipolish") {
    evidence = synthetic::find_cues(text, Cue::kPolish);
    tone = "polished";
  } else {
    auto ai = synthetic::find_cues(text, Cue::kAI);
    auto pol = synthetic::find_cues(text, Cue::kPolish);
    if (ai.size() >= pol.size()) {
      evidence = std::move(ai);
      tone = "formal";
    } else {
      evidence = std::move(pol);
      tone = "polished";
    }
  }
  if (evidence.size() > 3) evidence.resize(3);
  std::string body = " the text shows";
  if (evidence.empty()) body += " no markers";
  for (const auto& e : evidence) body += " " + e;
  body += " . the tone is " + tone + " . ";
  return body;
}

class MockTeacher final : public GeneratorClient {
 public:
  std::string name() const override { return "mock:teacher"; }
  std::string complete(const std::string& prompt, int, double) override {
    const std::string marker = "\n" + std::string(prompts::kTextMarker);
    const auto text_pos = prompt.find(marker);
    const auto label_pos = prompt.rfind("\n" + std::string(prompts::kLabelMarker));
    if (text_pos == std::string::npos || label_pos == std::string::npos || label_pos < text_pos)
      throw ClientError("mock:teacher: prompt is not a hindsight prompt");
    const std::string text = prompt.substr(text_pos + marker.size(), label_pos - text_pos - marker.size());
    std::string label = prompt.substr(label_pos + 1 + prompts::kLabelMarker.size());
    label = label.substr(0, label.find('\n'));
    return teacher_trace_body(text, label) + "</think>\n<answer>" + label + "</answer>";
  }
};

// Rule-based consistency judge.
//   alignment: the tone word agrees with the answer;
//   groundedness: share of cited cue words that occur in the text;
//   specificity: distinct grounded cue words / 3, capped at 1.
class MockJudge final : public GeneratorClient {
 public:
  std::string name() const override { return "mock:judge"; }
  std::string complete(const std::string& prompt, int, double) override {
    const std::string text_marker = "\n" + std::string(prompts::kTextMarker);
    const std::string out_marker = "\n" + std::string(prompts::kModelOutputMarker);
    const auto out_pos = prompt.rfind(out_marker);
    const auto text_pos = prompt.rfind(text_marker, out_pos);
    if (out_pos == std::string::npos || text_pos == std::string::npos)
      throw ClientError("mock:judge: prompt lacks text or model output");
    const std::string text = prompt.substr(text_pos + text_marker.size(),
                                           out_pos - text_pos - text_marker.size());
    const std::string output = prompt.substr(out_pos + out_marker.size());
    return judge(text, output);
  }

  static std::string judge(std::string_view text, std::string_view output) {
    static const Taxonomy kAny{"any", {"Human", "AI", "AI-Polish", "AI-Native"}};
    const ReasoningTrace t = parse_trace(output, kAny, TraceMode::kAnswerOnly);
    if (!t.format_valid || t.think.empty()) return detail::format_scores(0.0, 0.0, 0.0);
    const auto think = tokenize(t.think);
    const auto has = [&](std::string_view w) {
      return std::find(think.begin(), think.end(), w) != think.end();
    };
    const std::string answer = normalize_label_key(*t.answer_label);
    bool aligned = false;
    if (answer == "human") aligned = has("casual") && !has("formal") && !has("polished");
    if (answer == "ainative") aligned = has("formal") && !has("casual");
    if (answer == "aipolish") aligned = has("polished") && !has("casual");
    if (answer == "ai") aligned = (has("formal") || has("polished")) && !has("casual");

    const auto text_tokens = tokenize(text);
    std::vector<std::string> cited;
    std::size_t grounded = 0;
    for (const auto& w : think) {
      if (synthetic::classify_cue(w) == synthetic::Cue::kNone) continue;
      if (std::find(cited.begin(), cited.end(), w) != cited.end()) continue;
      cited.push_back(w);
      if (std::find(text_tokens.begin(), text_tokens.end(), w) != text_tokens.end()) ++grounded;
    }
    const double groundedness =
        cited.empty() ? 0.5 : static_cast<double>(grounded) / static_cast<double>(cited.size());
    const double specificity = std::min(1.0, static_cast<double>(grounded) / 3.0);
    return detail::format_scores(aligned ? 1.0 : 0.0, groundedness, specificity);
  }
};

}  // namespace reveal::mock
