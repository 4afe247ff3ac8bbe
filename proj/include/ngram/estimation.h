// estimation.h

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

#ifndef NGRAM_ESTIMATION_H_
#define NGRAM_ESTIMATION_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "ngram/backoff_model.h"

namespace ngram {

enum class VocabPolicy {
  kClosed,  // vocabulary is exactly the training words
  kUnk,     // additionally reserve <unk>, which receives unseen-word mass
};

struct CountOptions {
  int order = 3;
  VocabPolicy vocab_policy = VocabPolicy::kClosed;
  // Lines with more tokens than this are rejected.
  int64_t max_line_tokens = 100000;
};

// Raw N-gram counts of a sentence-padded corpus.
class CountTable {
 public:
  using Counts = std::unordered_map<NgramKey, int64_t, NgramKeyHash>;

  CountTable(int order, Vocabulary vocab);

  int order() const { return order_; }
  const Vocabulary &vocab() const { return vocab_; }
  const Counts &counts(int n) const { return counts_.at(n - 1); }
  // 0 for unseen N-grams.
  int64_t count(const NgramKey &key) const;
  void add(const NgramKey &key, int64_t count);

  int64_t sentence_count() const { return sentence_count_; }
  // Predicted tokens: words plus end tokens.
  int64_t token_count() const { return token_count_; }

  // Adds another table's counts, mapping words by spelling.
  void merge(const CountTable &other);

 private:
  friend CountTable count_ngrams(std::istream &, const CountOptions &);

  int order_;
  Vocabulary vocab_;
  std::vector<Counts> counts_;
  int64_t sentence_count_ = 0;
  int64_t token_count_ = 0;
};

// Every sentence (one per line) is padded with <s> and </s>; all N-grams of
// orders 1..N inside the padded sentence are counted, except that <s> is
// never a predicted unigram.  Throws Error("empty corpus") on input without
// lines and ParseError for over-long lines.
CountTable count_ngrams(std::istream &corpus, const CountOptions &options);

// n_r for r in [1, max_r] over the order-n counts (absent r means 0).
std::map<int64_t, int64_t> count_of_counts(const CountTable &counts, int n,
                                           int64_t max_r);

// Per-count discount ratios d_r; counts above the cutoff are undiscounted.
struct DiscountTable {
  std::vector<double> ratios;  // index r in [1, cutoff]; ratios[0] unused
  bool disabled = true;
  std::string warning;

  double ratio(int64_t r) const {
    return disabled || r >= static_cast<int64_t>(ratios.size()) ? 1.0
                                                                : ratios[r];
  }
};

// Katz coefficients d_r = (r*/r - A) / (1 - A) with r* = (r+1) n_{r+1} / n_r
// and A = (k+1) n_{k+1} / n_1, with no range checks.  Entries are NaN or
// infinite where the formula divides by zero.
std::vector<double> katz_coefficients(
    const std::map<int64_t, int64_t> &count_of_counts, int cutoff);

// Katz discounts with fallback: if a required n_r is zero or any d_r falls
// outside (0, 1], discounting is disabled and a warning is attached.
// Throws InvalidArgument for cutoff < 1.
DiscountTable good_turing_discounts(
    const std::map<int64_t, int64_t> &count_of_counts, int cutoff);

// Discount tables for every order of `counts` (index n-1).
std::vector<DiscountTable> compute_discounts(const CountTable &counts,
                                             int cutoff, bool enabled);

// d_c * c for an N-gram with count c.  Throws InvalidArgument if the N-gram
// was never counted.
double discounted_count(const CountTable &counts,
                        const std::vector<DiscountTable> &discounts,
                        const NgramKey &key);

struct EstimateOptions {
  int cutoff = 7;
  bool discount = true;
  // Minimum count per order (index n-1); missing orders default to 1.
  // Unigrams are always kept, so min_counts[0] must be 1.
  std::vector<int64_t> min_counts;
};

// Katz backoff model: p(w|h) = d_c c(h,w) / c(h), backoff weights from the
// leftover mass.  Histories required by longer retained N-grams but absent
// themselves are inserted with their backed-off probability.  Warnings (for
// example disabled discounting) are appended to `warnings` when given.
BackoffModel estimate_model(const CountTable &counts,
                            const EstimateOptions &options,
                            std::vector<std::string> *warnings = nullptr);

}  // namespace ngram

#endif  // NGRAM_ESTIMATION_H_
