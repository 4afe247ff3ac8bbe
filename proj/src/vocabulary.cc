// vocabulary.cc

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

#include "ngram/vocabulary.h"

namespace ngram {

WordId Vocabulary::add(std::string_view word) {
  if (auto it = index_.find(word); it != index_.end()) return it->second;
  WordId id = static_cast<WordId>(words_.size());
  words_.emplace_back(word);
  index_.emplace(words_.back(), id);
  if (word == kBeginToken) begin_ = id;
  else if (word == kEndToken) end_ = id;
  else if (word == kUnkToken) unk_ = id;
  return id;
}

std::optional<WordId> Vocabulary::find(std::string_view word) const {
  if (auto it = index_.find(word); it != index_.end()) return it->second;
  return std::nullopt;
}

std::string Vocabulary::to_string(std::span<const WordId> ids) const {
  std::string out;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) out += ' ';
    out += contains(ids[i]) ? words_[ids[i]] : "<#" + std::to_string(ids[i]) + ">";
  }
  return out;
}

}  // namespace ngram
