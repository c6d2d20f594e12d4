// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef KFSEL_ERROR_HPP_
#define KFSEL_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace kfsel {

/// Base class for every error the library throws.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Bad argument: dimension mismatch, out-of-range index, empty input.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. The message always carries "<path>:<line>" context.
class ParseError : public Error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& msg)
      : Error(path + ":" + std::to_string(line) + ": " + msg),
        path_(path),
        line_(line) {}

  const std::string& path() const { return path_; }
  std::size_t line() const { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

/// Missing or inconsistent run configuration (e.g. incomplete lambda table).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// External ranker client failure. The kind drives the caller's fallback.
class RankClientError : public Error {
 public:
  enum class Kind { kNetwork, kTimeout, kProtocol, kValidation, kRefusal };

  RankClientError(Kind kind, const std::string& msg)
      : Error(msg), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace kfsel

#endif  // KFSEL_ERROR_HPP_
