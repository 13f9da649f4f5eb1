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

// Composite reward R = R_acc + R_fmt + R_cons.
//
//   R_acc  in {0, 1}    1 iff the trace is well formed and its answer is gold
//   R_fmt  in {-1, 0}   -1 iff the Think-then-Answer structure is violated
//   R_cons in [0, 1]    judge verdict: alignment * (groundedness + specificity) / 2
//
// A malformed trace is never sent to the judge and earns R_cons = 0.

#pragma once

#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reveal/client.hpp"
#include "reveal/prompts.hpp"
#include "reveal/reasoning.hpp"
#include "reveal/util.hpp"

namespace reveal {

struct RewardBreakdown {
  double acc = 0.0;
  double fmt = 0.0;
  double cons = 0.0;
  double total = 0.0;
};

struct JudgeVerdict {
  double alignment = 0.0;
  double groundedness = 0.0;
  double specificity = 0.0;
};

inline double accuracy_reward(const ReasoningTrace& trace, std::string_view gold) {
  return trace.format_valid && trace.answer_label && *trace.answer_label == gold ? 1.0 : 0.0;
}

inline double format_reward(const ReasoningTrace& trace) { return trace.format_valid ? 0.0 : -1.0; }

// Parses "[a, g, s]" (Python-style float list, surrounding whitespace
// allowed). Rejects out-of-range values and non-binary alignment.
inline std::optional<JudgeVerdict> parse_verdict(std::string_view reply) {
  const auto open = reply.find('[');
  const auto close = reply.find(']', open == std::string_view::npos ? 0 : open);
  if (open == std::string_view::npos || close == std::string_view::npos) return std::nullopt;
  // Nothing but whitespace may surround the list.
  for (std::size_t i = 0; i < reply.size(); ++i) {
    if (i >= open && i <= close) continue;
    if (std::isspace(static_cast<unsigned char>(reply[i])) == 0) return std::nullopt;
  }
  std::vector<double> values;
  std::string_view body = reply.substr(open + 1, close - open - 1);
  while (!body.empty()) {
    const auto comma = body.find(',');
    std::string_view item = detail::trim(body.substr(0, comma));
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size() || item.empty()) return std::nullopt;
    values.push_back(v);
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  if (values.size() != 3) return std::nullopt;
  for (double v : values)
    if (!(v >= 0.0 && v <= 1.0)) return std::nullopt;
  if (values[0] != 0.0 && values[0] != 1.0) return std::nullopt;
  return JudgeVerdict{values[0], values[1], values[2]};
}

// Misaligned reasoning earns nothing regardless of its quality.
inline double combine_verdict(const JudgeVerdict& v) {
  return v.alignment * (v.groundedness + v.specificity) / 2.0;
}

struct JudgeOptions {
  int retries = 2;
  int max_tokens = 32;
};

// Unparseable replies are retried; client failures and exhausted retries
// score 0 rather than interrupting training.
inline double consistency_reward(std::string_view doc_text, const ReasoningTrace& trace,
                                 GeneratorClient& judge, const JudgeOptions& opts = {}) {
  const std::string prompt = prompts::judge(doc_text, trace.raw);
  for (int attempt = 0; attempt <= opts.retries; ++attempt) {
    try {
      const std::string reply = judge.complete(prompt, opts.max_tokens, 0.0);
      if (auto v = parse_verdict(reply)) return combine_verdict(*v);
      log::debug("unparseable judge reply", {{"reply", reply}, {"attempt", attempt + 1}});
    } catch (const ClientError& e) {
      log::warn("judge call failed", {{"error", e.what()}, {"attempt", attempt + 1}});
    }
  }
  return 0.0;
}

inline RewardBreakdown total_reward(std::string_view doc_text, const ReasoningTrace& trace,
                                    std::string_view gold, GeneratorClient& judge,
                                    const JudgeOptions& opts = {}) {
  RewardBreakdown r;
  r.acc = accuracy_reward(trace, gold);
  r.fmt = format_reward(trace);
  r.cons = r.fmt < 0.0 ? 0.0 : consistency_reward(doc_text, trace, judge, opts);
  r.total = r.acc + r.fmt + r.cons;
  return r;
}

}  // namespace reveal
