// evaluation.h

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

#ifndef NGRAM_EVALUATION_H_
#define NGRAM_EVALUATION_H_

#include <cstdint>
#include <iosfwd>

#include "ngram/backoff_model.h"

namespace ngram {

enum class OovPolicy {
  kSkip,   // drop OOV and zero-probability tokens, count them in oov_count
  kUnk,    // map unknown words to <unk>
  kError,  // throw on the first OOV or zero-probability token
};

// Perplexity over predicted tokens: words and end tokens, not begin tokens,
// not skipped OOVs.
struct PerplexityReport {
  double log_prob_total = 0.0;  // nats
  int64_t token_count = 0;
  int64_t oov_count = 0;
  int64_t sentence_count = 0;
  double perplexity = 0.0;
};

struct PerplexityOptions {
  OovPolicy oov = OovPolicy::kSkip;
};

// Sentence-padded evaluation of a corpus in training format, one sentence
// per line.  After a skipped token the history restarts empty.
PerplexityReport perplexity(const BackoffModel &model, std::istream &corpus,
                            const PerplexityOptions &options = {});

inline constexpr int64_t kDefaultEnumerationLimit = 2000000;

struct CrossPerplexity {
  long double cross_entropy = 0.0L;  // -sum p(h,w) log p'(w|h), nats
  double perplexity = 0.0;
};

// Exact PP' = exp(-sum_{h,w} p(h,w) log p'(w|h)) with p(h,w) from
// `reference` (history marginal times conditional) over every history of
// length N-1 and every word.  Both models must share one vocabulary.
// Throws InvalidArgument if |V|^N exceeds `cell_limit`.
CrossPerplexity cross_perplexity_exact(
    const BackoffModel &reference, const BackoffModel &evaluated,
    int64_t cell_limit = kDefaultEnumerationLimit);

}  // namespace ngram

#endif  // NGRAM_EVALUATION_H_
