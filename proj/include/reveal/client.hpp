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

// Text-completion backends: the client interface plus retry and
// prompt-hash caching decorators.

#pragma once

#include <chrono>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>

#include "reveal/errors.hpp"
#include "reveal/util.hpp"

namespace reveal {

class GeneratorClient {
 public:
  virtual ~GeneratorClient() = default;
  virtual std::string name() const = 0;
  // Throws ClientError on backend failure.
  virtual std::string complete(const std::string& prompt, int max_tokens, double temperature) = 0;
};

using ClientPtr = std::shared_ptr<GeneratorClient>;

// Adapts a callable; handy for tests and one-off backends.
class FunctionClient final : public GeneratorClient {
 public:
  using Fn = std::function<std::string(const std::string&, int, double)>;
  FunctionClient(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}
  std::string name() const override { return name_; }
  std::string complete(const std::string& prompt, int max_tokens, double temperature) override {
    return fn_(prompt, max_tokens, temperature);
  }

 private:
  std::string name_;
  Fn fn_;
};

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds base_delay{200};
};

// Retries ClientError with exponential backoff (base, 2*base, 4*base, ...).
class RetryingClient final : public GeneratorClient {
 public:
  RetryingClient(ClientPtr inner, RetryPolicy policy) : inner_(std::move(inner)), policy_(policy) {}
  std::string name() const override { return inner_->name(); }

  std::string complete(const std::string& prompt, int max_tokens, double temperature) override {
    std::string last_error;
    for (int attempt = 0; attempt < std::max(1, policy_.attempts); ++attempt) {
      if (attempt > 0 && policy_.base_delay.count() > 0)
        std::this_thread::sleep_for(policy_.base_delay * (1 << (attempt - 1)));
      try {
        return inner_->complete(prompt, max_tokens, temperature);
      } catch (const ClientError& e) {
        last_error = e.what();
        log::warn("client call failed", {{"client", name()}, {"attempt", attempt + 1},
                                         {"error", last_error}});
      }
    }
    throw ClientError(name() + ": giving up after " + std::to_string(policy_.attempts) +
                      " attempts: " + last_error);
  }

 private:
  ClientPtr inner_;
  RetryPolicy policy_;
};

// Reply store keyed by a hash of (client, prompt, max_tokens, temperature,
// ordinal). The ordinal counts repeated identical requests within a run, so
// a replayed run sees the same sequence of replies, including retries.
// Backed by an append-only JSONL file when a path is given.
class PromptCache {
 public:
  PromptCache() = default;
  explicit PromptCache(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        auto j = Json::parse(line);
        entries_[j.at("key").get<std::string>()] = j.at("reply").get<std::string>();
      } catch (const Json::exception&) {
        // A torn trailing line from an interrupted run; ignore it.
      }
    }
  }

  std::optional<std::string> get(const std::string& key) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  void put(const std::string& key, const std::string& reply) {
    std::lock_guard lock(mutex_);
    if (!entries_.emplace(key, reply).second) return;
    if (!path_.empty()) {
      std::ofstream out(path_, std::ios::app);
      out << OrderedJson{{"key", key}, {"reply", reply}}.dump() << '\n';
    }
  }

  std::size_t next_ordinal(const std::string& request_key) {
    std::lock_guard lock(mutex_);
    return ordinals_[request_key]++;
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
  }

 private:
  std::string path_;
  mutable std::mutex mutex_;
  std::map<std::string, std::string> entries_;
  std::map<std::string, std::size_t> ordinals_;
};

class CachingClient final : public GeneratorClient {
 public:
  CachingClient(ClientPtr inner, std::shared_ptr<PromptCache> cache)
      : inner_(std::move(inner)), cache_(std::move(cache)) {}
  std::string name() const override { return inner_->name(); }

  std::string complete(const std::string& prompt, int max_tokens, double temperature) override {
    std::string request = inner_->name();
    request += '\0';
    request += prompt;
    request += '\0' + std::to_string(max_tokens) + '\0' + std::to_string(temperature);
    const std::string request_key = hex64(fnv1a(request));
    const std::string key = request_key + "-" + std::to_string(cache_->next_ordinal(request_key));
    if (auto hit = cache_->get(key)) return *hit;
    std::string reply = inner_->complete(prompt, max_tokens, temperature);
    cache_->put(key, reply);
    return reply;
  }

 private:
  ClientPtr inner_;
  std::shared_ptr<PromptCache> cache_;
};

}  // namespace reveal
