// Copyright 2026 The matchprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace matchprobe {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A dataset line could not be parsed. line() is 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IngestError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

// Zero vectors, empty archives, constant rank vectors.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Remote provider could not be reached. Retrying may succeed.
class TransportError : public Error {
 public:
  using Error::Error;
};

// Remote provider answered with something that violates the wire contract.
class ContractError : public Error {
 public:
  using Error::Error;
};

class CacheIntegrityError : public Error {
 public:
  using Error::Error;
};

class BudgetError : public Error {
 public:
  using Error::Error;
};

// Fewer eligible evaluation pairs than requested.
class SamplingError : public Error {
 public:
  SamplingError(const std::string& what, std::size_t eligible) : Error(what), eligible_(eligible) {}
  std::size_t eligible() const { return eligible_; }

 private:
  std::size_t eligible_;
};

}  // namespace matchprobe
