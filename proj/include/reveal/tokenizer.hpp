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

// Whitespace-plus-punctuation tokenizer. Every token count in the corpus and
// every policy sequence goes through this one function.
//
// Rules, applied left to right:
//   * whitespace separates tokens and is never part of one;
//   * a tag of the form <name> or </name> (letters and '_') is one token;
//   * a word is a run of alphanumerics (bytes >= 0x80 count as word bytes, so
//     UTF-8 letters stay inside words) with single internal '-' or '\''
//     joiners, e.g. "AI-Native", "don't";
//   * any other byte is a one-character punctuation token.

#pragma once

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace reveal {

struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

namespace detail {

inline bool is_word_byte(unsigned char c) {
  return std::isalnum(c) != 0 || c >= 0x80;
}

inline bool is_space_byte(unsigned char c) { return std::isspace(c) != 0; }

// Length of a structural tag starting at pos, or 0.
inline std::size_t tag_length(std::string_view text, std::size_t pos) {
  if (text[pos] != '<') return 0;
  std::size_t i = pos + 1;
  if (i < text.size() && text[i] == '/') ++i;
  const std::size_t name_begin = i;
  while (i < text.size() &&
         (std::isalpha(static_cast<unsigned char>(text[i])) != 0 || text[i] == '_')) {
    ++i;
  }
  if (i == name_begin || i >= text.size() || text[i] != '>') return 0;
  return i + 1 - pos;
}

}  // namespace detail

inline std::vector<TokenSpan> token_spans(std::string_view text) {
  std::vector<TokenSpan> spans;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (detail::is_space_byte(c)) {
      ++i;
      continue;
    }
    if (const std::size_t len = detail::tag_length(text, i); len > 0) {
      spans.push_back({i, i + len});
      i += len;
      continue;
    }
    if (detail::is_word_byte(c)) {
      const std::size_t begin = i;
      while (i < n) {
        const auto d = static_cast<unsigned char>(text[i]);
        if (detail::is_word_byte(d)) {
          ++i;
        } else if ((d == '-' || d == '\'') && i + 1 < n &&
                   detail::is_word_byte(static_cast<unsigned char>(text[i + 1]))) {
          i += 2;
        } else {
          break;
        }
      }
      spans.push_back({begin, i});
      continue;
    }
    spans.push_back({i, i + 1});
    ++i;
  }
  return spans;
}

inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& s : token_spans(text)) out.emplace_back(text.substr(s.begin, s.end - s.begin));
  return out;
}

inline std::size_t count_tokens(std::string_view text) { return token_spans(text).size(); }

// Joins tokens with single spaces; tokenize(join_tokens(t)) == t for any t
// produced by tokenize.
inline std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace reveal
