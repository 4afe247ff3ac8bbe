// vocabulary.h

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

#ifndef NGRAM_VOCABULARY_H_
#define NGRAM_VOCABULARY_H_

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ngram/ngram_key.h"

namespace ngram {

inline constexpr std::string_view kBeginToken = "<s>";
inline constexpr std::string_view kEndToken = "</s>";
inline constexpr std::string_view kUnkToken = "<unk>";

// Bidirectional word <-> id map.  Ids are dense and assigned in order of
// first insertion.  The reserved tokens are recognised by spelling.
class Vocabulary {
 public:
  // Returns the id of `word`, inserting it if necessary.
  WordId add(std::string_view word);
  std::optional<WordId> find(std::string_view word) const;
  // Requires contains(id).
  const std::string &word(WordId id) const { return words_[id]; }
  bool contains(WordId id) const {
    return id >= 0 && static_cast<size_t>(id) < words_.size();
  }
  size_t size() const { return words_.size(); }
  const std::vector<std::string> &words() const { return words_; }

  std::optional<WordId> begin_token() const { return begin_; }
  std::optional<WordId> end_token() const { return end_; }
  std::optional<WordId> unk_token() const { return unk_; }

  // Space-separated spelling of a word sequence, for messages and output.
  std::string to_string(std::span<const WordId> ids) const;

  friend bool operator==(const Vocabulary &a, const Vocabulary &b) {
    return a.words_ == b.words_;
  }

 private:
  struct Hash {
    using is_transparent = void;
    size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId, Hash, std::equal_to<>> index_;
  std::optional<WordId> begin_, end_, unk_;
};

}  // namespace ngram

#endif  // NGRAM_VOCABULARY_H_
