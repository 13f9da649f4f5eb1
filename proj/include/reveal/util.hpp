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

// Small utilities: stable hashing, seed splitting, bounded parallel map and
// line-delimited JSON logging.

#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <iostream>
#include <mutex>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

namespace reveal {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;
using Rng = std::mt19937_64;

// FNV-1a, 64 bit. Stable across platforms and runs, unlike std::hash.
inline std::uint64_t fnv1a(std::string_view data,
                           std::uint64_t seed = 0xcbf29ce484222325ULL) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[v & 0xF];
    v >>= 4;
  }
  return out;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed splitting rule: child = splitmix64(parent XOR fnv1a(tag)). Every stage
// and every per-item RNG derives its seed this way so that any unit of work
// can be replayed independently of scheduling order.
inline std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag) {
  return splitmix64(parent ^ fnv1a(tag));
}

inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  return splitmix64(parent ^ splitmix64(index + 0x51ed27ULL));
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

// Runs fn(i) for i in [0, n) on at most `workers` threads. Results are
// written by index, so output order never depends on scheduling. The first
// exception thrown by any task is rethrown after all workers join.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  if (n == 0) return;
  if (workers <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  workers = std::min(workers, n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          next.store(n);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, std::size_t workers, Fn&& fn) {
  std::vector<T> out(n);
  parallel_for(n, workers, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

namespace log {

enum class Level { kDebug = 0, kInfo = 1, kWarn = 2, kError = 3, kOff = 4 };

inline std::atomic<Level>& threshold() {
  static std::atomic<Level> level{Level::kInfo};
  return level;
}

inline void set_level(Level level) { threshold().store(level); }

inline const char* level_name(Level level) {
  switch (level) {
    case Level::kDebug: return "debug";
    case Level::kInfo: return "info";
    case Level::kWarn: return "warn";
    case Level::kError: return "error";
    case Level::kOff: return "off";
  }
  return "info";
}

// One JSON object per line on stderr.
inline void event(Level level, std::string_view message, Json fields = Json::object()) {
  if (level < threshold().load()) return;
  static std::mutex mutex;
  OrderedJson line;
  line["level"] = level_name(level);
  line["msg"] = std::string(message);
  for (auto& [k, v] : fields.items()) line[k] = v;
  std::lock_guard lock(mutex);
  std::cerr << line.dump() << '\n';
}

inline void info(std::string_view m, Json f = Json::object()) { event(Level::kInfo, m, std::move(f)); }
inline void warn(std::string_view m, Json f = Json::object()) { event(Level::kWarn, m, std::move(f)); }
inline void debug(std::string_view m, Json f = Json::object()) { event(Level::kDebug, m, std::move(f)); }

}  // namespace log

}  // namespace reveal
