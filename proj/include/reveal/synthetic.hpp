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

// A small synthetic language used by the mock backends and the bundled
// corpus. Human writing carries casual markers and typos, AI-Native writing
// carries assistant-style connectives, and AI-Polish writing is human text
// with the casual markers rewritten into formal equivalents.

#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "reveal/document.hpp"
#include "reveal/tokenizer.hpp"
#include "reveal/util.hpp"

namespace reveal::synthetic {

inline const std::array<std::vector<std::string_view>, 10>& topic_words() {
  static const std::array<std::vector<std::string_view>, 10> kTopics = {{
      {"study", "model", "data", "results", "method", "analysis", "theory", "experiment"},
      {"trip", "recipe", "weekend", "garden", "coffee", "project", "photos", "city"},
      {"river", "empire", "species", "century", "region", "founded", "population", "history"},
      {"freedom", "education", "society", "argument", "memory", "justice", "culture", "change"},
      {"night", "letter", "house", "storm", "window", "silence", "stranger", "road"},
      {"council", "market", "police", "election", "budget", "court", "report", "mayor"},
      {"question", "answer", "problem", "error", "install", "version", "code", "fix"},
      {"product", "battery", "service", "price", "quality", "screen", "delivery", "hotel"},
      {"friends", "game", "party", "phone", "school", "music", "movie", "dog"},
      {"nation", "people", "future", "together", "workers", "promise", "hope", "community"},
  }};
  return kTopics;
}

inline const std::vector<std::string_view>& neutral_words() {
  static const std::vector<std::string_view> kWords = {
      "the", "a", "of", "and", "to", "in", "is", "it", "that", "was", "for", "on",
      "with", "as", "this", "at", "by", "from", "but", "not", "we", "they", "some",
      "more", "about", "after", "when", "there", "have", "had", "were", "one", "all",
      "new", "first", "many", "time", "way", "work", "part"};
  return kWords;
}

inline const std::vector<std::string_view>& human_cues() {
  static const std::vector<std::string_view> kWords = {
      "honestly", "kinda", "lol", "gonna", "teh", "recieve", "definately",
      "pretty", "stuff", "yeah", "anyway", "dunno", "tbh", "wanna"};
  return kWords;
}

inline const std::vector<std::string_view>& ai_cues() {
  static const std::vector<std::string_view> kWords = {
      "furthermore", "moreover", "delve", "crucial", "pivotal", "tapestry", "landscape",
      "comprehensive", "notably", "foster", "additionally", "overall", "seamless", "robust"};
  return kWords;
}

// Casual marker -> polished replacement. An empty replacement drops the word.
inline const std::map<std::string_view, std::string_view>& polish_map() {
  static const std::map<std::string_view, std::string_view> kMap = {
      {"honestly", "frankly"}, {"kinda", "somewhat"},   {"lol", ""},
      {"gonna", "will"},       {"teh", "the"},          {"recieve", "receive"},
      {"definately", "definitely"}, {"pretty", "quite"}, {"stuff", "material"},
      {"yeah", "indeed"},      {"anyway", "nevertheless"}, {"dunno", "unsure"},
      {"tbh", "candidly"},     {"wanna", "desire"}};
  return kMap;
}

inline const std::vector<std::string_view>& polish_cues() {
  static const std::vector<std::string_view> kWords = {
      "frankly", "somewhat", "definitely", "receive", "quite", "material",
      "indeed", "nevertheless", "unsure", "candidly", "desire"};
  return kWords;
}

enum class Cue { kNone, kHuman, kAI, kPolish };

inline Cue classify_cue(std::string_view word) {
  auto in = [&](const std::vector<std::string_view>& v) {
    return std::find(v.begin(), v.end(), word) != v.end();
  };
  if (in(human_cues())) return Cue::kHuman;
  if (in(ai_cues())) return Cue::kAI;
  if (in(polish_cues())) return Cue::kPolish;
  return Cue::kNone;
}

// Distinct cue words of one kind, in order of first appearance.
inline std::vector<std::string> find_cues(std::string_view text, Cue kind) {
  std::vector<std::string> out;
  for (const auto& tok : tokenize(text)) {
    std::string lower;
    for (unsigned char c : tok) lower += static_cast<char>(std::tolower(c));
    if (classify_cue(lower) == kind && std::find(out.begin(), out.end(), lower) == out.end())
      out.push_back(lower);
  }
  return out;
}

namespace detail {

template <typename T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

struct SentenceStyle {
  double topic_rate = 0.3;
  double human_rate = 0.0;
  double ai_rate = 0.0;
  int min_len = 6;
  int max_len = 14;
  bool varied_punctuation = false;
};

inline std::string sentence(const std::vector<std::string_view>& topic, const SentenceStyle& st,
                            Rng& rng, std::size_t max_words) {
  const int len = std::uniform_int_distribution<int>(st.min_len, st.max_len)(rng);
  const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(len), max_words);
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = uniform01(rng);
    std::string_view w;
    if (u < st.ai_rate) {
      w = pick(ai_cues(), rng);
    } else if (u < st.ai_rate + st.human_rate) {
      w = pick(human_cues(), rng);
    } else if (u < st.ai_rate + st.human_rate + st.topic_rate) {
      w = pick(topic, rng);
    } else {
      w = pick(neutral_words(), rng);
    }
    if (i) out += ' ';
    out += w;
  }
  return out;
}

// Appends sentences until the text holds `target` tokens (each sentence
// contributes its words plus one punctuation token).
inline std::string compose(const std::vector<std::string_view>& topic, const SentenceStyle& st,
                           std::size_t target, Rng& rng, int paragraphs = 1) {
  std::string out;
  std::size_t tokens = 0;
  const std::size_t per_paragraph = std::max<std::size_t>(1, target / std::max(1, paragraphs));
  std::size_t in_paragraph = 0;
  while (tokens + 2 <= target) {
    const std::size_t room = target - tokens - 1;
    std::string s = sentence(topic, st, rng, room);
    if (s.empty()) break;
    std::string_view punct = ".";
    if (st.varied_punctuation) {
      const double u = uniform01(rng);
      punct = u < 0.1 ? "!" : (u < 0.18 ? "?" : ".");
    }
    const std::size_t words = count_tokens(s);
    if (!out.empty()) out += (in_paragraph >= per_paragraph && paragraphs > 1) ? "\n\n" : " ";
    if (in_paragraph >= per_paragraph) in_paragraph = 0;
    out += s;
    out += punct;
    tokens += words + 1;
    in_paragraph += words + 1;
  }
  return out;
}

}  // namespace detail

// One synthetic human source record {id, domain, text, date}.
inline Json make_human_source(std::size_t index, std::uint64_t seed) {
  Rng rng(derive_seed(seed, index));
  const auto domain = static_cast<std::size_t>(index % kDomainNames.size());
  detail::SentenceStyle st;
  // Some writers barely use casual markers, which makes their text hard to
  // tell apart from a polished rewrite.
  st.human_rate = uniform01(rng) < 0.2 ? 0.02 : 0.06 + 0.08 * uniform01(rng);
  st.min_len = 3;
  st.max_len = 18;
  st.varied_punctuation = true;
  const std::size_t target = 40 + static_cast<std::size_t>(uniform01(rng) * 60);
  const int paragraphs = 1 + static_cast<int>(uniform01(rng) * 3);
  std::vector<std::string_view> topic = topic_words()[domain];
  Json j;
  j["id"] = "h" + std::to_string(index);
  j["domain"] = std::string(kDomainNames[domain]);
  j["text"] = detail::compose(topic, st, target, rng, paragraphs);
  const int year = 2005 + static_cast<int>(uniform01(rng) * 17);  // 2005..2021
  const int month = 1 + static_cast<int>(uniform01(rng) * 12);
  const int day = 1 + static_cast<int>(uniform01(rng) * 28);
  char date[16];
  std::snprintf(date, sizeof date, "%04d-%02d-%02d", year % 10000, month % 100, day % 100);
  j["date"] = date;
  return j;
}

// Per-generator style knobs, derived from the generator name so that two
// mock generators differ measurably but reproducibly.
struct GeneratorStyle {
  double ai_rate = 0.12;
  double polish_rate = 0.85;
  double connective_rate = 0.15;
};

inline GeneratorStyle style_for(std::string_view generator) {
  Rng rng(fnv1a(generator));
  GeneratorStyle s;
  s.ai_rate = 0.08 + 0.08 * uniform01(rng);
  s.polish_rate = 0.7 + 0.25 * uniform01(rng);
  s.connective_rate = 0.05 + 0.15 * uniform01(rng);
  return s;
}

// AI-Native text of exactly `target` tokens (or target-1 when the last
// sentence cannot fit) about the given topic words.
inline std::string native_text(const std::vector<std::string>& topic, std::size_t target,
                               bool humanize, const GeneratorStyle& gs, Rng& rng) {
  std::vector<std::string_view> words(topic.begin(), topic.end());
  if (words.empty()) words = {"topic"};
  detail::SentenceStyle st;
  st.topic_rate = 0.3;
  if (humanize) {
    st.ai_rate = gs.ai_rate * 0.35;
    st.human_rate = 0.04;
    st.min_len = 4;
    st.max_len = 16;
    st.varied_punctuation = true;
  } else {
    st.ai_rate = gs.ai_rate;
    st.min_len = 10;
    st.max_len = 13;
  }
  return detail::compose(words, st, target, rng, 1);
}

// Rewrites casual markers into formal ones, keeping every separator of the
// input intact; sentence starts sometimes gain a formal connective.
inline std::string polish_text(std::string_view text, const GeneratorStyle& gs, Rng& rng) {
  const auto spans = token_spans(text);
  std::string out;
  std::size_t cursor = 0;
  bool sentence_start = true;
  for (const auto& s : spans) {
    std::string sep(text.substr(cursor, s.begin - cursor));
    std::string tok(text.substr(s.begin, s.end - s.begin));
    cursor = s.end;
    const bool word = reveal::detail::is_word_byte(static_cast<unsigned char>(tok[0]));
    if (word && sentence_start && uniform01(rng) < gs.connective_rate) {
      out += sep;
      out += uniform01(rng) < 0.5 ? "additionally" : "notably";
      sep = " ";
    }
    if (word) sentence_start = false;
    if (tok == "." || tok == "!" || tok == "?") sentence_start = true;
    auto it = polish_map().find(tok);
    if (it != polish_map().end() && uniform01(rng) < gs.polish_rate) {
      if (it->second.empty()) {
        // Drop the word; keep the separator only when text follows.
        out += sep.find('\n') != std::string::npos ? sep : std::string();
        continue;
      }
      tok = std::string(it->second);
    }
    // Polished prose drops the exclamation and question marks.
    if (tok == "!" || tok == "?") tok = ".";
    out += sep;
    out += tok;
  }
  out += std::string(text.substr(cursor));
  // Dropped words can leave a leading space.
  const auto first = out.find_first_not_of(' ');
  return first == std::string::npos ? std::string() : out.substr(first);
}

// Filler continuation of roughly `tokens` tokens.
inline std::string continuation_text(std::size_t tokens, Rng& rng) {
  detail::SentenceStyle st;
  st.topic_rate = 0.0;
  std::vector<std::string_view> none = {"it"};
  return detail::compose(none, st, tokens, rng, 1);
}

}  // namespace reveal::synthetic
