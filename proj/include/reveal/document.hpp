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

// The corpus record, its JSONL encoding and human-source ingestion.

#pragma once

#include <array>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "reveal/errors.hpp"
#include "reveal/taxonomy.hpp"
#include "reveal/tokenizer.hpp"
#include "reveal/util.hpp"

namespace reveal {

enum class Domain {
  kAcademic, kBlog, kEncyclopedic, kEssay, kLiterature,
  kNews, kQa, kReviews, kSocial, kSpeeches,
};

inline constexpr std::array<std::string_view, 10> kDomainNames = {
    "academic", "blog", "encyclopedic", "essay", "literature",
    "news", "qa", "reviews", "social", "speeches"};

inline std::string_view domain_name(Domain d) { return kDomainNames[static_cast<std::size_t>(d)]; }

inline Domain parse_domain(std::string_view s) {
  for (std::size_t i = 0; i < kDomainNames.size(); ++i) {
    if (kDomainNames[i] == s) return static_cast<Domain>(i);
  }
  throw FormatError("unknown domain: '" + std::string(s) + "'");
}

struct Document {
  std::string id;
  Domain domain = Domain::kAcademic;
  Label label = Label::kHuman;
  std::string text;
  std::size_t token_count = 0;
  std::optional<std::string> source_model;
  std::optional<std::string> human_ref_id;
  bool published_before_cutoff = false;
  bool humanize_intervention = false;

  bool operator==(const Document&) const = default;
};

inline OrderedJson to_json(const Document& d) {
  OrderedJson j;
  j["id"] = d.id;
  j["domain"] = std::string(domain_name(d.domain));
  j["label"] = std::string(label_name(d.label));
  j["text"] = d.text;
  j["token_count"] = d.token_count;
  j["source_model"] = d.source_model ? OrderedJson(*d.source_model) : OrderedJson(nullptr);
  j["human_ref_id"] = d.human_ref_id ? OrderedJson(*d.human_ref_id) : OrderedJson(nullptr);
  j["published_before_cutoff"] = d.published_before_cutoff;
  j["humanize_intervention"] = d.humanize_intervention;
  return j;
}

inline Document document_from_json(const Json& j) {
  try {
    Document d;
    d.id = j.at("id").get<std::string>();
    d.domain = parse_domain(j.at("domain").get<std::string>());
    d.label = parse_label(j.at("label").get<std::string>());
    d.text = j.at("text").get<std::string>();
    d.token_count = j.at("token_count").get<std::size_t>();
    if (j.contains("source_model") && !j["source_model"].is_null())
      d.source_model = j["source_model"].get<std::string>();
    if (j.contains("human_ref_id") && !j["human_ref_id"].is_null())
      d.human_ref_id = j["human_ref_id"].get<std::string>();
    d.published_before_cutoff = j.value("published_before_cutoff", false);
    d.humanize_intervention = j.value("humanize_intervention", false);
    return d;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed document record: ") + e.what());
  }
}

// Validates the per-record invariants plus referential integrity across the
// collection. Throws FormatError naming the first offending id.
inline void validate_corpus(const std::vector<Document>& corpus) {
  std::map<std::string, const Document*> by_id;
  for (const auto& d : corpus) {
    if (!by_id.emplace(d.id, &d).second) throw FormatError("duplicate document id: " + d.id);
  }
  for (const auto& d : corpus) {
    if (d.token_count != count_tokens(d.text))
      throw FormatError(d.id + ": token_count does not match tokenizer count");
    if (d.label == Label::kHuman) {
      if (d.source_model || d.human_ref_id)
        throw FormatError(d.id + ": human document carries generator fields");
      if (!d.published_before_cutoff)
        throw FormatError(d.id + ": human document is not before the cutoff");
      if (d.humanize_intervention)
        throw FormatError(d.id + ": intervention flag on a human document");
      continue;
    }
    if (!d.human_ref_id) throw FormatError(d.id + ": missing human_ref_id");
    auto it = by_id.find(*d.human_ref_id);
    if (it == by_id.end() || it->second->label != Label::kHuman)
      throw FormatError(d.id + ": human_ref_id does not resolve to a human document");
    if (d.label == Label::kAIPolish && d.humanize_intervention)
      throw FormatError(d.id + ": intervention flag on an AI-Polish document");
  }
}

// ---------------------------------------------------------------------------
// JSONL

inline std::vector<Json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::vector<Json> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const Json::parse_error& e) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

// Append-only writer; writes from concurrent producers are serialized.
class JsonlWriter {
 public:
  explicit JsonlWriter(const std::string& path, bool append = false)
      : out_(path, append ? std::ios::app : std::ios::trunc) {
    if (!out_) throw Error("cannot open " + path + " for writing");
  }

  template <typename J>
  void write(const J& record) {
    std::lock_guard lock(mutex_);
    out_ << record.dump() << '\n';
  }

  void flush() {
    std::lock_guard lock(mutex_);
    out_.flush();
  }

 private:
  std::ofstream out_;
  std::mutex mutex_;
};

inline std::vector<Document> read_corpus(const std::string& path) {
  std::vector<Document> out;
  for (const auto& j : read_jsonl(path)) out.push_back(document_from_json(j));
  return out;
}

inline void write_corpus(const std::string& path, const std::vector<Document>& corpus) {
  JsonlWriter w(path);
  for (const auto& d : corpus) w.write(to_json(d));
}

// ---------------------------------------------------------------------------
// Human-source ingestion

// Release date of ChatGPT; human documents must be strictly earlier.
inline constexpr std::string_view kHumanCutoffDate = "2022-11-30";

struct RejectedSource {
  std::string id;
  std::string reason;
};

struct IngestResult {
  std::vector<Document> accepted;
  std::vector<RejectedSource> rejected;
};

namespace detail {

inline bool is_iso_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
    if (std::isdigit(static_cast<unsigned char>(s[i])) == 0) return false;
  }
  const int month = std::stoi(std::string(s.substr(5, 2)));
  const int day = std::stoi(std::string(s.substr(8, 2)));
  return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

}  // namespace detail

// Source records: {id, domain, text, date: "YYYY-MM-DD"}. Records without a
// parseable date, or dated on/after the cutoff, are rejected.
inline IngestResult ingest_human_sources(const std::vector<Json>& records) {
  IngestResult result;
  std::set<std::string> seen;
  for (const auto& r : records) {
    const std::string id = r.value("id", std::string());
    auto reject = [&](std::string reason) { result.rejected.push_back({id, std::move(reason)}); };
    if (id.empty()) { reject("missing id"); continue; }
    if (!seen.insert(id).second) { reject("duplicate id"); continue; }
    if (!r.contains("date") || !r["date"].is_string()) { reject("missing date"); continue; }
    const std::string date = r["date"].get<std::string>();
    // ISO dates compare correctly as strings.
    if (!detail::is_iso_date(date)) { reject("unparseable date: " + date); continue; }
    if (date >= kHumanCutoffDate) { reject("published on/after cutoff: " + date); continue; }
    const std::string text = r.value("text", std::string());
    if (count_tokens(text) == 0) { reject("empty text"); continue; }
    Document d;
    d.id = id;
    try {
      d.domain = parse_domain(r.value("domain", std::string()));
    } catch (const FormatError& e) {
      reject(e.what());
      continue;
    }
    d.label = Label::kHuman;
    d.text = text;
    d.token_count = count_tokens(text);
    d.published_before_cutoff = true;
    result.accepted.push_back(std::move(d));
  }
  return result;
}

}  // namespace reveal
