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

// OpenAI-compatible chat-completions backend.
//
//   REVEAL_API_BASE  scheme://host[:port][/prefix], default https://api.openai.com
//   REVEAL_API_KEY   bearer token (optional for local servers)
//
// https needs the build to define CPPHTTPLIB_OPENSSL_SUPPORT.

#pragma once

#include <chrono>
#include <cstdlib>
#include <string>

#include <httplib.h>

#include "reveal/client.hpp"
#include "reveal/errors.hpp"
#include "reveal/util.hpp"

namespace reveal {

struct HttpOptions {
  std::string base_url = "https://api.openai.com";
  std::string api_key;
  std::chrono::seconds timeout{60};

  static HttpOptions from_env() {
    HttpOptions o;
    if (const char* b = std::getenv("REVEAL_API_BASE"); b && *b) o.base_url = b;
    if (const char* k = std::getenv("REVEAL_API_KEY"); k && *k) o.api_key = k;
    return o;
  }
};

class HttpChatClient final : public GeneratorClient {
 public:
  HttpChatClient(std::string model, HttpOptions opts) : model_(std::move(model)), opts_(std::move(opts)) {
    // Split "scheme://host:port/prefix" into the host part and a path prefix.
    const auto scheme = opts_.base_url.find("://");
    const auto path_pos =
        opts_.base_url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    host_ = opts_.base_url.substr(0, path_pos);
    prefix_ = path_pos == std::string::npos ? "" : opts_.base_url.substr(path_pos);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
    if (prefix_.empty()) prefix_ = "/v1";
  }

  std::string name() const override { return "http:" + model_; }

  std::string complete(const std::string& prompt, int max_tokens, double temperature) override {
    httplib::Client cli(host_);
    cli.set_connection_timeout(opts_.timeout);
    cli.set_read_timeout(opts_.timeout);
    httplib::Headers headers;
    if (!opts_.api_key.empty()) headers.emplace("Authorization", "Bearer " + opts_.api_key);
    Json body = {{"model", model_},
                 {"messages", Json::array({{{"role", "user"}, {"content", prompt}}})},
                 {"max_tokens", max_tokens},
                 {"temperature", temperature}};
    auto res = cli.Post(prefix_ + "/chat/completions", headers, body.dump(), "application/json");
    if (!res) throw ClientError(name() + ": request failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
      throw ClientError(name() + ": HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
    const Json reply = Json::parse(res->body, nullptr, false);
    try {
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const Json::exception&) {
      throw ClientError(name() + ": malformed completion response");
    }
  }

 private:
  std::string model_;
  HttpOptions opts_;
  std::string host_;
  std::string prefix_;
};

}  // namespace reveal
