// ngram_key.h

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

#ifndef NGRAM_NGRAM_KEY_H_
#define NGRAM_NGRAM_KEY_H_

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>

#include "ngram/error.h"

namespace ngram {

using WordId = int32_t;

// Highest N-gram order the toolkit supports.  Keys are stored inline, so this
// bounds the size of every table entry.
inline constexpr int kMaxOrder = 9;

// A word sequence of length 0..kMaxOrder.  For an N-gram the last element is
// the predicted word and the preceding ones are the history, oldest first.
// Length 0 is the empty history.
class NgramKey {
 public:
  NgramKey() = default;
  explicit NgramKey(std::span<const WordId> words) {
    if (words.size() > static_cast<size_t>(kMaxOrder))
      throw InvalidArgument("N-gram longer than the supported maximum order");
    std::copy(words.begin(), words.end(), ids_.begin());
    size_ = static_cast<uint8_t>(words.size());
  }
  NgramKey(std::initializer_list<WordId> words)
      : NgramKey(std::span<const WordId>(words.begin(), words.size())) {}

  int size() const { return size_; }
  bool empty() const { return size_ == 0; }
  WordId operator[](int i) const { return ids_[i]; }
  std::span<const WordId> words() const { return {ids_.data(), size_}; }

  // Predicted word; requires size() >= 1.
  WordId word() const { return ids_[size_ - 1]; }
  // All but the last word.
  std::span<const WordId> history() const {
    return {ids_.data(), size_ == 0 ? 0u : size_ - 1u};
  }
  // All but the first (most distant) word.
  std::span<const WordId> truncated() const {
    return size_ == 0 ? std::span<const WordId>()
                      : std::span<const WordId>(ids_.data() + 1, size_ - 1u);
  }
  // The history with its first word dropped: h' for the N-gram (h, w).
  std::span<const WordId> truncated_history() const {
    return size_ < 2 ? std::span<const WordId>()
                     : std::span<const WordId>(ids_.data() + 1, size_ - 2u);
  }

  NgramKey extended(WordId word) const {
    if (size_ >= kMaxOrder)
      throw InvalidArgument("N-gram longer than the supported maximum order");
    NgramKey out = *this;
    out.ids_[out.size_++] = word;
    return out;
  }

  friend bool operator==(const NgramKey &a, const NgramKey &b) {
    return std::ranges::equal(a.words(), b.words());
  }
  // Lexicographic on word ids; a proper prefix sorts first.
  friend std::strong_ordering operator<=>(const NgramKey &a,
                                          const NgramKey &b) {
    return std::lexicographical_compare_three_way(
        a.ids_.begin(), a.ids_.begin() + a.size_, b.ids_.begin(),
        b.ids_.begin() + b.size_);
  }

 private:
  std::array<WordId, kMaxOrder> ids_{};
  uint8_t size_ = 0;
};

struct NgramKeyHash {
  size_t operator()(const NgramKey &key) const {
    uint64_t h = 1469598103934665603ull ^ static_cast<uint64_t>(key.size());
    for (WordId w : key.words()) {
      h ^= static_cast<uint32_t>(w);
      h *= 1099511628211ull;
      h ^= h >> 29;
    }
    return static_cast<size_t>(h);
  }
};

}  // namespace ngram

#endif  // NGRAM_NGRAM_KEY_H_
