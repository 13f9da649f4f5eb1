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

// Accuracy, macro-F1, confusion matrices and score calibration.

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "reveal/detector.hpp"
#include "reveal/document.hpp"
#include "reveal/errors.hpp"
#include "reveal/taxonomy.hpp"
#include "reveal/util.hpp"

namespace reveal {

inline constexpr std::string_view kUnparseable = "Unparseable";

struct Prediction {
  std::string gold;
  std::optional<std::string> pred;  // nullopt = unparseable output
};

struct EvalResult {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::size_t n = 0;
  // Taxonomy labels followed by "Unparseable"; confusion is square over them,
  // rows = gold, columns = predicted.
  std::vector<std::string> classes;
  std::vector<std::vector<std::size_t>> confusion;
  std::vector<double> per_class_f1;
};

// Predictions outside the taxonomy fall into the Unparseable column, which
// counts as a false negative for the gold class and a false positive for no
// class. A class absent from golds and predictions has F1 = 0.
inline EvalResult evaluate(const std::vector<Prediction>& preds, const Taxonomy& taxonomy,
                           bool unify_binary = false) {
  if (preds.empty()) throw EmptyInput("evaluate: no predictions");
  const Taxonomy tax = unify_binary ? Taxonomy::binary() : taxonomy;
  const std::size_t k = tax.size();
  EvalResult r;
  r.n = preds.size();
  r.classes = tax.labels;
  r.classes.emplace_back(kUnparseable);
  r.confusion.assign(k + 1, std::vector<std::size_t>(k + 1, 0));
  for (const auto& p : preds) {
    const std::string gold = unify_binary ? unify_to_binary(p.gold) : p.gold;
    const std::size_t g = tax.index_of(gold);
    std::size_t col = k;
    if (p.pred) {
      const std::string pred = unify_binary ? unify_to_binary(*p.pred) : *p.pred;
      if (auto idx = tax.find(pred)) col = *idx;
    }
    ++r.confusion[g][col];
  }
  std::size_t correct = 0;
  double f1_sum = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t tp = r.confusion[c][c];
    std::size_t fp = 0, fn = 0;
    for (std::size_t o = 0; o <= k; ++o) {
      if (o == c) continue;
      fn += r.confusion[c][o];
      if (o < k) fp += r.confusion[o][c];
    }
    correct += tp;
    const std::size_t denom = 2 * tp + fp + fn;
    const double f1 = denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
    if (denom == 0) log::info("class absent from golds and predictions; F1 set to 0", {{"class", tax.labels[c]}});
    r.per_class_f1.push_back(f1);
    f1_sum += f1;
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(r.n);
  r.macro_f1 = f1_sum / static_cast<double>(k);
  return r;
}

inline OrderedJson to_json(const EvalResult& r) {
  OrderedJson j;
  j["accuracy"] = r.accuracy;
  j["macro_f1"] = r.macro_f1;
  j["n"] = r.n;
  j["classes"] = r.classes;
  j["confusion"] = r.confusion;
  j["per_class_f1"] = r.per_class_f1;
  return j;
}

inline OrderedJson to_json(const std::string& id, const Prediction& p) {
  OrderedJson j;
  j["id"] = id;
  j["gold"] = p.gold;
  j["pred"] = p.pred ? OrderedJson(*p.pred) : OrderedJson(nullptr);
  return j;
}

inline std::vector<Prediction> read_predictions(const std::string& path) {
  std::vector<Prediction> out;
  for (const auto& j : read_jsonl(path)) {
    if (!j.contains("gold") || !j["gold"].is_string())
      throw FormatError(path + ": prediction record without a string 'gold'");
    Prediction p{j["gold"].get<std::string>(), std::nullopt};
    if (j.contains("pred") && j["pred"].is_string()) p.pred = j["pred"].get<std::string>();
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Calibration

struct ScoredSample {
  AigcScore score;
  std::string gold;  // three-class label
};

struct CalibrationBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  std::size_t correct = 0;
  std::optional<double> accuracy;         // undefined for empty bins
  std::optional<double> mean_confidence;  // mean max-class probability
};

struct CalibrationTable {
  std::vector<CalibrationBin> bins;
  std::size_t n = 0;
};

inline constexpr std::size_t kCalibrationBins = 10;

// [0,0.1), ..., [0.8,0.9), [0.9,1.0].
inline std::size_t calibration_bin(double score) {
  if (!(score >= 0.0 && score <= 1.0)) throw std::invalid_argument("score outside [0, 1]");
  const auto b = static_cast<std::size_t>(std::floor(score * static_cast<double>(kCalibrationBins)));
  return std::min(b, kCalibrationBins - 1);
}

inline CalibrationTable calibration_table(const std::vector<ScoredSample>& samples,
                                          const Taxonomy& tax = Taxonomy::three()) {
  if (samples.empty()) throw EmptyInput("calibration_table: no samples");
  if (tax.size() != 3) throw InvalidLabel("calibration needs the three-class taxonomy");
  CalibrationTable t;
  t.n = samples.size();
  std::vector<double> conf_sum(kCalibrationBins, 0.0);
  for (std::size_t b = 0; b < kCalibrationBins; ++b) {
    CalibrationBin bin;
    bin.lo = static_cast<double>(b) / kCalibrationBins;
    bin.hi = static_cast<double>(b + 1) / kCalibrationBins;
    t.bins.push_back(bin);
  }
  for (const auto& s : samples) {
    auto& bin = t.bins[calibration_bin(s.score.score)];
    ++bin.count;
    if (s.score.argmax() == tax.index_of(s.gold)) ++bin.correct;
    conf_sum[calibration_bin(s.score.score)] += s.score.confidence();
  }
  for (std::size_t b = 0; b < kCalibrationBins; ++b) {
    auto& bin = t.bins[b];
    if (bin.count == 0) continue;
    bin.accuracy = static_cast<double>(bin.correct) / static_cast<double>(bin.count);
    bin.mean_confidence = conf_sum[b] / static_cast<double>(bin.count);
  }
  return t;
}

inline OrderedJson to_json(const CalibrationTable& t) {
  OrderedJson bins = OrderedJson::array();
  for (const auto& b : t.bins) {
    OrderedJson j;
    j["lo"] = b.lo;
    j["hi"] = b.hi;
    j["closed_right"] = b.hi >= 1.0;
    j["count"] = b.count;
    j["correct"] = b.correct;
    j["accuracy"] = b.accuracy ? OrderedJson(*b.accuracy) : OrderedJson(nullptr);
    j["mean_confidence"] = b.mean_confidence ? OrderedJson(*b.mean_confidence) : OrderedJson(nullptr);
    bins.push_back(std::move(j));
  }
  return {{"n", t.n}, {"bins", bins}};
}

inline OrderedJson to_json(const ScoredSample& s) {
  OrderedJson j = to_json(s.score);
  j["gold"] = s.gold;
  return j;
}

inline std::vector<ScoredSample> read_scored(const std::string& path) {
  std::vector<ScoredSample> out;
  for (const auto& j : read_jsonl(path)) {
    try {
      out.push_back({aigc_from_probs(j.at("p_human").get<double>(), j.at("p_polish").get<double>(),
                                     j.at("p_native").get<double>()),
                     j.at("gold").get<std::string>()});
    } catch (const Json::exception& e) {
      throw FormatError(path + ": bad scored record: " + e.what());
    } catch (const std::invalid_argument& e) {
      throw FormatError(path + ": bad scored record: " + e.what());
    }
  }
  return out;
}

}  // namespace reveal
