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

// Authorship labels and classification taxonomies.

#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reveal/errors.hpp"

namespace reveal {

enum class Label { kHuman, kAINative, kAIPolish };

inline std::string_view label_name(Label l) {
  switch (l) {
    case Label::kHuman: return "Human";
    case Label::kAINative: return "AINative";
    case Label::kAIPolish: return "AIPolish";
  }
  return "Human";
}

inline Label parse_label(std::string_view s) {
  if (s == "Human") return Label::kHuman;
  if (s == "AINative") return Label::kAINative;
  if (s == "AIPolish") return Label::kAIPolish;
  throw InvalidLabel("unknown document label: '" + std::string(s) + "'");
}

// Lowercase with '-', '_' and spaces removed: "AI-Native" ~ "ainative".
inline std::string normalize_label_key(std::string_view s) {
  std::string out;
  for (unsigned char c : s) {
    if (c == '-' || c == '_' || std::isspace(c)) continue;
    out += static_cast<char>(std::tolower(c));
  }
  return out;
}

// An ordered set of class names. Indices into `labels` are class ids used by
// confusion matrices and policy answer tokens.
struct Taxonomy {
  std::string name;
  std::vector<std::string> labels;

  std::size_t size() const { return labels.size(); }

  std::optional<std::size_t> find(std::string_view candidate) const {
    const std::string key = normalize_label_key(candidate);
    if (key.empty()) return std::nullopt;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (normalize_label_key(labels[i]) == key) return i;
    }
    return std::nullopt;
  }

  std::size_t index_of(std::string_view candidate) const {
    if (auto i = find(candidate)) return *i;
    throw InvalidLabel("label '" + std::string(candidate) + "' is not in taxonomy " + name);
  }

  bool operator==(const Taxonomy&) const = default;

  static Taxonomy binary() { return {"binary", {"Human", "AI"}}; }
  // Ordered by AI-generation degree: Human (0), AI-Polish (0.5), AI-Native (1).
  static Taxonomy three() { return {"three", {"Human", "AI-Polish", "AI-Native"}}; }

  static Taxonomy from_name(std::string_view name) {
    if (name == "binary") return binary();
    if (name == "three") return three();
    throw InvalidLabel("unknown taxonomy: '" + std::string(name) + "'");
  }

  // Class name for a document label; binary collapses both AI kinds to "AI".
  std::string gold_for(Label l) const {
    if (name == "binary") return l == Label::kHuman ? "Human" : "AI";
    switch (l) {
      case Label::kHuman: return labels.at(index_of("Human"));
      case Label::kAINative: return labels.at(index_of("AI-Native"));
      case Label::kAIPolish: return labels.at(index_of("AI-Polish"));
    }
    return "Human";
  }
};

// Maps a three-class name onto the binary space. Unknown names pass through.
inline std::string unify_to_binary(std::string_view label) {
  const std::string key = normalize_label_key(label);
  if (key == "human") return "Human";
  if (key == "ainative" || key == "aipolish" || key == "ai") return "AI";
  return std::string(label);
}

}  // namespace reveal
