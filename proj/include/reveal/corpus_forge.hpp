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

// Parallel three-way corpus construction: meta-attribute extraction,
// length-aligned AI-Native generation, AI-Polish rewriting and Table-style
// corpus statistics.

#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "reveal/client.hpp"
#include "reveal/document.hpp"
#include "reveal/errors.hpp"
#include "reveal/prompts.hpp"
#include "reveal/tokenizer.hpp"
#include "reveal/util.hpp"

namespace reveal {

struct MetaAttributes {
  std::string ref_id;
  Domain domain = Domain::kAcademic;
  std::string topic_summary;
  std::vector<std::string> key_points;
  std::optional<std::string> style_profile;
  std::size_t target_token_count = 0;
};

namespace detail {

// The outermost {...} of a reply, tolerating chatter or code fences.
inline std::optional<Json> parse_embedded_object(const std::string& reply) {
  const auto open = reply.find('{');
  const auto close = reply.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close < open) return std::nullopt;
  try {
    auto j = Json::parse(reply.substr(open, close - open + 1));
    if (!j.is_object()) return std::nullopt;
    return j;
  } catch (const Json::parse_error&) {
    return std::nullopt;
  }
}

}  // namespace detail

inline MetaAttributes extract_meta(const Document& human_doc, GeneratorClient& client) {
  if (human_doc.label != Label::kHuman)
    throw std::invalid_argument("extract_meta: " + human_doc.id + " is not a human document");
  if (count_tokens(human_doc.text) == 0)
    throw std::invalid_argument("extract_meta: " + human_doc.id + " has no text");
  const std::string reply = client.complete(prompts::extract_meta(human_doc.text), 512, 0.0);
  auto parsed = detail::parse_embedded_object(reply);
  if (!parsed) throw EmptyExtraction(human_doc.id + ": no JSON object in extraction reply");
  const Json& j = *parsed;
  MetaAttributes meta;
  meta.ref_id = human_doc.id;
  meta.domain = human_doc.domain;
  meta.target_token_count = human_doc.token_count;
  if (!j.contains("topic_summary") || !j["topic_summary"].is_string() ||
      j["topic_summary"].get<std::string>().empty())
    throw EmptyExtraction(human_doc.id + ": extraction reply lacks topic_summary");
  meta.topic_summary = j["topic_summary"].get<std::string>();
  if (j.contains("key_points") && j["key_points"].is_array()) {
    for (const auto& k : j["key_points"]) {
      if (k.is_string()) meta.key_points.push_back(k.get<std::string>());
    }
  }
  if (j.contains("style_profile") && j["style_profile"].is_string() &&
      !j["style_profile"].get<std::string>().empty())
    meta.style_profile = j["style_profile"].get<std::string>();
  return meta;
}

struct NativeOptions {
  bool humanize = false;
  double length_tolerance = 0.2;
  int attempts = 3;  // regenerations, then up to as many continuation rounds
  double temperature = 0.7;
};

namespace detail {

inline bool within_tolerance(std::size_t count, std::size_t target, double tol) {
  const double diff = std::abs(static_cast<double>(count) - static_cast<double>(target));
  return diff <= tol * static_cast<double>(target);
}

inline std::string truncate_to_tokens(const std::string& text, std::size_t n) {
  const auto spans = token_spans(text);
  if (spans.size() <= n) return text;
  return text.substr(0, spans[n - 1].end);
}

}  // namespace detail

inline Document generate_ai_native(const MetaAttributes& meta, GeneratorClient& client,
                                   const NativeOptions& opts) {
  if (!(opts.length_tolerance > 0.0 && opts.length_tolerance < 1.0))
    throw std::invalid_argument("length_tolerance must lie in (0, 1)");
  if (meta.target_token_count == 0) throw std::invalid_argument("meta has no target length");
  const std::size_t target = meta.target_token_count;
  const std::string prompt = prompts::ai_native(
      domain_name(meta.domain), meta.topic_summary, meta.key_points,
      meta.style_profile.value_or(""), target, opts.length_tolerance, opts.humanize);
  const int max_tokens = static_cast<int>(std::ceil(target * (1.0 + opts.length_tolerance))) + 16;

  std::string best;
  std::size_t best_diff = static_cast<std::size_t>(-1);
  for (int attempt = 0; attempt < opts.attempts; ++attempt) {
    std::string text = client.complete(prompt, max_tokens, opts.temperature);
    const std::size_t n = count_tokens(text);
    const std::size_t diff = n > target ? n - target : target - n;
    if (diff < best_diff) {
      best_diff = diff;
      best = std::move(text);
    }
    if (detail::within_tolerance(n, target, opts.length_tolerance)) break;
  }

  std::size_t n = count_tokens(best);
  if (!detail::within_tolerance(n, target, opts.length_tolerance)) {
    if (n > target) {
      best = detail::truncate_to_tokens(best, target);
    } else {
      for (int round = 0; round < opts.attempts && n < target; ++round) {
        std::string more = client.complete(prompts::continuation(best, target - n),
                                           static_cast<int>(target - n) + 16, opts.temperature);
        if (count_tokens(more) == 0) continue;
        best += " " + more;
        n = count_tokens(best);
        if (n > target) best = detail::truncate_to_tokens(best, target);
        n = count_tokens(best);
        if (detail::within_tolerance(n, target, opts.length_tolerance)) break;
      }
    }
  }
  n = count_tokens(best);
  if (!detail::within_tolerance(n, target, opts.length_tolerance)) {
    throw LengthUnsatisfiable(meta.ref_id + ": got " + std::to_string(n) + " tokens for target " +
                              std::to_string(target));
  }

  Document d;
  d.id = meta.ref_id + "-native-" + client.name();
  d.domain = meta.domain;
  d.label = Label::kAINative;
  d.text = std::move(best);
  d.token_count = n;
  d.source_model = client.name();
  d.human_ref_id = meta.ref_id;
  d.published_before_cutoff = false;
  d.humanize_intervention = opts.humanize;
  return d;
}

inline Document generate_ai_polish(const Document& human_doc, GeneratorClient& client,
                                   double temperature = 0.7) {
  if (human_doc.label != Label::kHuman)
    throw std::invalid_argument("generate_ai_polish: " + human_doc.id + " is not human");
  const int max_tokens = static_cast<int>(human_doc.token_count * 2 + 16);
  Document d;
  d.text = client.complete(prompts::polish(human_doc.text), max_tokens, temperature);
  d.id = human_doc.id + "-polish-" + client.name();
  d.domain = human_doc.domain;
  d.label = Label::kAIPolish;
  d.token_count = count_tokens(d.text);
  d.source_model = client.name();
  d.human_ref_id = human_doc.id;
  return d;
}

// ---------------------------------------------------------------------------
// Batch construction

struct CorpusOptions {
  double intervention_rate = 0.2;
  double length_tolerance = 0.2;
  int attempts = 3;
  double temperature = 0.7;
  std::uint64_t seed = 0;
  std::size_t parallelism = 1;
  bool native = true;
  bool polish = true;
};

struct GenerationFailure {
  std::string human_id;
  std::string generator;
  std::string kind;  // "native" or "polish"
  std::string error;
};

struct CorpusBuild {
  std::vector<Document> corpus;
  std::vector<GenerationFailure> failures;
};

// The humanize flag of one (human, generator) pair: an independent
// Bernoulli(rate) draw from a seed derived from the pair, so it does not
// depend on scheduling or on which other pairs exist.
inline bool draw_intervention(std::uint64_t seed, std::string_view human_id,
                              std::string_view generator, double rate) {
  Rng rng(derive_seed(derive_seed(seed, human_id), generator));
  return uniform01(rng) < rate;
}

// Humans first, then generated documents; everything sorted by id.
inline CorpusBuild build_corpus(const std::vector<Document>& humans,
                                const std::vector<ClientPtr>& generators,
                                const CorpusOptions& opts) {
  struct Job {
    const Document* human;
    ClientPtr client;
  };
  std::vector<Job> jobs;
  for (const auto& h : humans)
    for (const auto& g : generators) jobs.push_back({&h, g});

  struct JobResult {
    std::vector<Document> docs;
    std::vector<GenerationFailure> failures;
  };
  auto results = parallel_map<JobResult>(jobs.size(), opts.parallelism, [&](std::size_t i) {
    JobResult r;
    const Job& job = jobs[i];
    if (opts.native) {
      try {
        const MetaAttributes meta = extract_meta(*job.human, *job.client);
        NativeOptions no;
        no.humanize = draw_intervention(opts.seed, job.human->id, job.client->name(),
                                        opts.intervention_rate);
        no.length_tolerance = opts.length_tolerance;
        no.attempts = opts.attempts;
        no.temperature = opts.temperature;
        r.docs.push_back(generate_ai_native(meta, *job.client, no));
      } catch (const Error& e) {
        r.failures.push_back({job.human->id, job.client->name(), "native", e.what()});
      }
    }
    if (opts.polish) {
      try {
        Document d = generate_ai_polish(*job.human, *job.client, opts.temperature);
        if (d.token_count == 0) throw EmptyExtraction("empty polish output");
        r.docs.push_back(std::move(d));
      } catch (const Error& e) {
        r.failures.push_back({job.human->id, job.client->name(), "polish", e.what()});
      }
    }
    return r;
  });

  CorpusBuild out;
  out.corpus = humans;
  for (auto& r : results) {
    for (auto& d : r.docs) out.corpus.push_back(std::move(d));
    for (auto& f : r.failures) {
      log::warn("generation failed", {{"human_id", f.human_id}, {"generator", f.generator},
                                      {"kind", f.kind}, {"error", f.error}});
      out.failures.push_back(std::move(f));
    }
  }
  std::sort(out.corpus.begin(), out.corpus.end(),
            [](const Document& a, const Document& b) { return a.id < b.id; });
  return out;
}

// ---------------------------------------------------------------------------
// Statistics

struct LabelStats {
  std::size_t samples = 0;
  std::size_t total_tokens = 0;
  std::size_t distinct_generators = 0;
};

struct CorpusStats {
  std::map<Label, LabelStats> rows;

  const LabelStats& at(Label l) const { return rows.at(l); }
};

inline CorpusStats corpus_stats(const std::vector<Document>& corpus) {
  CorpusStats stats;
  std::map<Label, std::set<std::string>> generators;
  for (Label l : {Label::kHuman, Label::kAINative, Label::kAIPolish}) stats.rows[l] = {};
  for (const auto& d : corpus) {
    auto& row = stats.rows[d.label];
    ++row.samples;
    row.total_tokens += d.token_count;
    if (d.source_model) generators[d.label].insert(*d.source_model);
  }
  for (auto& [label, row] : stats.rows) {
    row.distinct_generators = label == Label::kHuman ? 0 : generators[label].size();
  }
  return stats;
}

inline std::string with_thousands(std::size_t v) {
  std::string digits = std::to_string(v);
  std::string out;
  const std::size_t lead = digits.size() % 3;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (i + 3 - lead) % 3 == 0) out += ',';
    out += digits[i];
  }
  return out;
}

// Human row reports its generator count as "-".
inline std::string format_stats(const CorpusStats& stats) {
  std::ostringstream os;
  os << std::left << std::setw(10) << "" << std::right << std::setw(12) << "Samples"
     << std::setw(16) << "Total Tokens" << std::setw(8) << "#.LLMs" << '\n';
  const std::pair<Label, const char*> rows[] = {
      {Label::kHuman, "Human"}, {Label::kAINative, "AI-Native"}, {Label::kAIPolish, "AI-Polish"}};
  for (const auto& [label, title] : rows) {
    const auto it = stats.rows.find(label);
    const LabelStats row = it == stats.rows.end() ? LabelStats{} : it->second;
    os << std::left << std::setw(10) << title << std::right << std::setw(12)
       << with_thousands(row.samples) << std::setw(16) << with_thousands(row.total_tokens)
       << std::setw(8)
       << (label == Label::kHuman ? std::string("-") : std::to_string(row.distinct_generators))
       << '\n';
  }
  return os.str();
}

}  // namespace reveal
