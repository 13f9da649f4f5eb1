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

// Prompt templates. The detection, hindsight and judge templates are fixed
// wire formats: mock backends and tests locate fields by the marker lines
// defined here, so edit them together.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "reveal/taxonomy.hpp"

namespace reveal::prompts {

inline constexpr std::string_view kTextMarker = "Text: ";
inline constexpr std::string_view kLabelMarker = "Ground Truth Label: ";
inline constexpr std::string_view kModelOutputMarker = "Model Output: ";

inline constexpr std::string_view kExtractMetaHeader =
    "Extract structured meta-attributes from the following document.";
inline constexpr std::string_view kNativeHeader = "Write an original text from the brief below.";
inline constexpr std::string_view kContinueHeader = "Continue the following text.";
inline constexpr std::string_view kPolishHeader =
    "Improve the fluency and style of the following text.";
inline constexpr std::string_view kHumanizeInstruction =
    "Imitate a human writing style: vary sentence length, allow informal phrasing and minor "
    "imperfections, and avoid phrasing typical of AI assistants.";

// "Human or AI", "Human, AI-Polish or AI-Native".
inline std::string label_menu(const Taxonomy& tax, std::string_view quote = "") {
  std::string out;
  const auto q = std::string(quote);
  for (std::size_t i = 0; i < tax.labels.size(); ++i) {
    if (i > 0) out += (i + 1 == tax.labels.size()) ? " or " : ", ";
    out += q + tax.labels[i] + q;
  }
  return out;
}

// Think-then-Answer detection prompt. With cot=false the model is asked for
// the answer block only.
inline std::string inference(std::string_view text, const Taxonomy& tax, bool cot = true) {
  const std::string menu = label_menu(tax);
  std::string p = "A conversation between User and Assistant.\n";
  if (cot) {
    p += "The Assistant first thinks in <think>...</think> tags then answers in one word (" + menu +
         ") in <answer>...</answer> tags.\n";
  } else {
    p += "The Assistant answers in one word (" + menu + ") in <answer>...</answer> tags.\n";
  }
  p += "Your task: You are given a human-written or AI-generated/edited piece of text. You must "
       "determine whether the piece was written/edited by AI or human-written.\n";
  if (cot) {
    p += "Let's think step-by-step. Describe inconsistencies/AI artifacts or any clues that this "
         "text may be human/written, summarize your analysis, then answer with " + menu + ".\n";
  }
  p += "\n";
  p += std::string(kTextMarker) + std::string(text);
  return p;
}

// Hindsight prompt: the teacher sees the gold label and reconstructs the
// reasoning. Ends with an opened think tag.
inline std::string hindsight(std::string_view text, std::string_view label, const Taxonomy& tax) {
  std::string p =
      "You're a forensic writing analyst trained to detect whether a piece of text was written "
      "by a human or generated by AI.\n\n"
      "Below is a passage of text and a known label indicating whether it is Human-written or "
      "AI-generated.\n\n"
      "Your job is to:\n"
      "1. Analyze the text step by step.\n"
      "2. Identify concrete evidence that supports the given label.\n"
      "3. Contrast it with why the opposite label is less likely.\n"
      "4. Write your reasoning in natural language inside <think> tags.\n"
      "5. Conclude with the final label (One word: " + label_menu(tax, "\"") +
      ") in <answer> tags.\n"
      "6. Do not use any other tags or formatting.\n"
      "7. Do not explicitly mention the ground truth label in your reasoning. Assume you do not "
      "yet know the label.\n\n"
      "Always ground your analysis in specific stylistic, structural, or semantic features of "
      "the text. Avoid generic summaries or descriptions.\n\n";
  p += std::string(kTextMarker) + std::string(text) + "\n";
  p += std::string(kLabelMarker) + std::string(label) + "\n\n";
  p += "<think>";
  return p;
}

inline constexpr std::string_view kJudgeExamples =
    "Example 1\n"
    "Input text: honestly the bus was late again lol, i waited like 40 minutes and teh driver "
    "just shrugged.\n"
    "Model output: <think>The passage uses casual fillers (\"honestly\", \"lol\"), an uncorrected "
    "typo (\"teh\") and an uneven, anecdotal rhythm. These point to spontaneous human "
    "writing.</think><answer>Human</answer>\n"
    "Scores: [1.0, 0.9, 0.8]\n\n"
    "Example 2\n"
    "Input text: Furthermore, urban transit represents a crucial pillar of sustainable "
    "development, fostering equitable access across the broader landscape.\n"
    "Model output: <think>The text contains a typo and slang, so it reads as a quick personal "
    "note.</think><answer>AI</answer>\n"
    "Scores: [0.0, 0.1, 0.2]\n";

// Consistency judge prompt. The reply is a list of three floats.
inline std::string judge(std::string_view text, std::string_view model_output) {
  std::string p =
      "You are an expert evaluator tasked with assessing whether a model's final classification "
      "is consistent with its reasoning. The model's objective is to determine whether a given "
      "piece of text was written by a human or generated by a large language model (LLM).\n\n"
      "You will be provided with:\n"
      "- An input text: the passage under evaluation.\n"
      "- A reasoning trace, enclosed in <think>...</think> tags, representing the model's "
      "chain-of-thought.\n"
      "- A final classification, enclosed in <answer>...</answer> tags, indicating the model's "
      "predicted label (Human or AI).\n\n"
      "Your task is to return a list of three float scores, each ranging from 0.0 to 1.0, "
      "corresponding to the following criteria:\n"
      "1. Answer-Reasoning Alignment: Does the reasoning logically support the final answer? "
      "This should be binary (1.0 or 0.0) based on whether the reasoning is consistent with the "
      "final classification.\n"
      "2. Groundedness: Is the reasoning grounded in the input text and internally coherent?\n"
      "3. Specificity (Genericness): How specific, informative, and non-generic is the "
      "reasoning?\n\n"
      "Respond strictly with a Python-style list of floats in this format:\n"
      "[alignment_score, groundedness_score, genericness]\n"
      "Do not include any explanations, comments, or extra output.\n\n"
      "Examples:\n";
  p += std::string(kJudgeExamples);
  p += "\n";
  p += std::string(kTextMarker) + std::string(text) + "\n";
  p += std::string(kModelOutputMarker) + std::string(model_output);
  return p;
}

inline std::string extract_meta(std::string_view text) {
  std::string p(kExtractMetaHeader);
  p += "\nReturn only a JSON object with the fields \"topic_summary\" (string), \"key_points\" "
       "(list of strings) and \"style_profile\" (string such as formal, narrative or "
       "conversational; empty if not pertinent).\n\nDocument:\n";
  p += std::string(text);
  return p;
}

inline std::string ai_native(std::string_view domain, std::string_view topic,
                             const std::vector<std::string>& key_points,
                             std::string_view style, std::size_t target_tokens,
                             double tolerance, bool humanize) {
  std::string p(kNativeHeader);
  p += "\nDomain: " + std::string(domain);
  p += "\nTopic: " + std::string(topic);
  p += "\nKey points:";
  for (const auto& k : key_points) p += "\n- " + k;
  if (!style.empty()) p += "\nWriting style: " + std::string(style);
  p += "\nTarget length: " + std::to_string(target_tokens) + " tokens";
  p += " (stay within " + std::to_string(static_cast<int>(tolerance * 100 + 0.5)) + "%)";
  if (humanize) p += "\n" + std::string(kHumanizeInstruction);
  p += "\nOutput only the text.";
  return p;
}

inline std::string continuation(std::string_view text, std::size_t more_tokens) {
  std::string p(kContinueHeader);
  p += "\nAdd about " + std::to_string(more_tokens) + " tokens in the same style. "
       "Output only the new text.\n\nText so far:\n";
  p += std::string(text);
  return p;
}

inline std::string polish(std::string_view text) {
  std::string p(kPolishHeader);
  p += "\nKeep the meaning, the claims and the logical structure unchanged; do not add new "
       "ideas. Output only the revised text.\n\nText:\n";
  p += std::string(text);
  return p;
}

// Text following the last occurrence of `marker` up to the next line that
// starts another known field (or the end).
inline std::string field_after(std::string_view prompt, std::string_view marker,
                               std::string_view stop = {}) {
  const auto pos = prompt.rfind(marker);
  if (pos == std::string_view::npos) return {};
  std::string_view rest = prompt.substr(pos + marker.size());
  if (!stop.empty()) {
    const auto end = rest.find(stop);
    if (end != std::string_view::npos) rest = rest.substr(0, end);
  }
  return std::string(rest);
}

// Body of the last "<Header>:\n" section, e.g. "Document:\n...".
inline std::string section_after(std::string_view prompt, std::string_view heading) {
  const auto pos = prompt.rfind(heading);
  if (pos == std::string_view::npos) return {};
  return std::string(prompt.substr(pos + heading.size()));
}

}  // namespace reveal::prompts
