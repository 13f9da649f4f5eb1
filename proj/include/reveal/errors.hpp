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

// Error types shared by every stage of the pipeline.

#pragma once

#include <stdexcept>
#include <string>

namespace reveal {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Backend failure after the bounded retry budget was spent.
class ClientError : public Error {
 public:
  using Error::Error;
};

class EmptyExtraction : public Error {
 public:
  using Error::Error;
};

class LengthUnsatisfiable : public Error {
 public:
  using Error::Error;
};

class UnknownToken : public Error {
 public:
  explicit UnknownToken(const std::string& token)
      : Error("unknown token: '" + token + "'"), token_(token) {}
  const std::string& token() const noexcept { return token_; }

 private:
  std::string token_;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : Error("config error: " + field + ": " + message), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class BackendError : public Error {
 public:
  using Error::Error;
};

class InvalidLabel : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace reveal
