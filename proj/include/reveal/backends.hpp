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

// Backend registry.
//
//   clients:  mock:teacher  mock:judge  mock:identity  mock:<name> (generator)
//             http:<model>
//   scorers:  toy:<checkpoint path>  mock:rigged  http:<model>

#pragma once

#include <memory>
#include <string>

#include "reveal/client.hpp"
#include "reveal/detector.hpp"
#include "reveal/errors.hpp"
#include "reveal/http_client.hpp"
#include "reveal/mock_backends.hpp"
#include "reveal/policy.hpp"

namespace reveal {

struct BackendOptions {
  std::shared_ptr<PromptCache> cache;  // null = no caching
  RetryPolicy retry;
};

inline ClientPtr make_client(const std::string& spec, const BackendOptions& opts = {}) {
  ClientPtr client;
  if (spec == "mock:teacher") {
    client = std::make_shared<mock::MockTeacher>();
  } else if (spec == "mock:judge") {
    client = std::make_shared<mock::MockJudge>();
  } else if (spec == "mock:identity") {
    client = std::make_shared<mock::IdentityClient>();
  } else if (spec.rfind("mock:", 0) == 0 && spec.size() > 5) {
    client = std::make_shared<mock::MockGenerator>(spec);
  } else if (spec.rfind("http:", 0) == 0 && spec.size() > 5) {
    client = std::make_shared<RetryingClient>(
        std::make_shared<HttpChatClient>(spec.substr(5), HttpOptions::from_env()), opts.retry);
  } else {
    throw BackendError("unknown backend '" + spec + "'");
  }
  if (opts.cache) client = std::make_shared<CachingClient>(client, opts.cache);
  return client;
}

inline ScorerPtr make_scorer(const std::string& spec, const BackendOptions& opts = {}) {
  if (spec == "mock:rigged") return make_cue_scorer();
  if (spec.rfind("toy:", 0) == 0 && spec.size() > 4)
    return std::make_shared<ToyScorer>(load_checkpoint(spec.substr(4)), spec);
  if (spec.rfind("http:", 0) == 0) return std::make_shared<ClientScorer>(make_client(spec, opts));
  throw BackendError("unknown scorer backend '" + spec + "'");
}

}  // namespace reveal
