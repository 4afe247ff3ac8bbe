// error.h

// Copyright 2026  The ngramkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABILITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef NGRAM_ERROR_H_
#define NGRAM_ERROR_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ngram {

// Base class of every error raised by the library.  The command-line tool
// maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (ARPA documents, corpora).  line() is 1-based, 0 when
// the location is unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string &message, int64_t line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message
                       : message),
        line_(line) {}
  int64_t line() const { return line_; }

 private:
  int64_t line_;
};

// A word was given no probability at all by the model (absent unigram and no
// unknown-word token).  Distinct from numeric underflow.
class ZeroProbabilityError : public Error {
 public:
  using Error::Error;
};

// A history whose backed-off mass has nowhere to go (denominator <= 0).
class DegenerateBackoffError : public Error {
 public:
  DegenerateBackoffError(const std::string &message, std::string history)
      : Error(message + " [history: " + history + "]"),
        history_(std::move(history)) {}
  const std::string &history() const { return history_; }

 private:
  std::string history_;
};

class NegativeBackoffMassError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace ngram

#endif  // NGRAM_ERROR_H_
