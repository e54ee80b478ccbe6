// Copyright (c) 2026 The SBF Authors
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

#ifndef SBF_ERRORS_HPP_
#define SBF_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sbf {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input document. `offset` is the byte position reported by the
// JSON parser, or the line number for line-oriented formats.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

// A tabular/JSONL input lacks a required field.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& column, std::size_t line)
      : Error("missing required column '" + column + "' at line " +
              std::to_string(line)),
        column_(column),
        line_(line) {}
  const std::string& column() const { return column_; }
  std::size_t line() const { return line_; }

 private:
  std::string column_;
  std::size_t line_;
};

class EmptyCaptionError : public Error {
 public:
  EmptyCaptionError() : Error("caption is empty or whitespace-only") {}
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
 public:
  DimensionMismatchError(std::size_t a, std::size_t b)
      : Error("embedding dimension mismatch: " + std::to_string(a) + " vs " +
              std::to_string(b)) {}
};

class DegenerateVectorError : public Error {
 public:
  DegenerateVectorError() : Error("zero-norm embedding vector") {}
};

// Remote embedding service could not be reached or answered with an error.
class TransportError : public Error {
 public:
  TransportError(const std::string& endpoint, const std::string& detail)
      : Error("embedding service at " + endpoint + ": " + detail),
        endpoint_(endpoint) {}
  const std::string& endpoint() const { return endpoint_; }

 private:
  std::string endpoint_;
};

// A backend returned something that violates the embedding contract
// (wrong row count, ragged dimensions, non-finite values).
class BackendContractError : public Error {
 public:
  using Error::Error;
};

class MissingFixtureError : public Error {
 public:
  explicit MissingFixtureError(const std::string& text)
      : Error("fixture has no embedding for text \"" + text + "\""),
        text_(text) {}
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

class ModelLoadError : public Error {
 public:
  using Error::Error;
};

}  // namespace sbf

#endif  // SBF_ERRORS_HPP_
