// pruning.h

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

#ifndef NGRAM_PRUNING_H_
#define NGRAM_PRUNING_H_

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "ngram/backoff_model.h"
#include "ngram/estimation.h"

namespace ngram {

enum class Criterion {
  kRelativeEntropy,   // exact D(p || p') of removing one N-gram
  kSeymoreRosenfeld,  // weight * [log p(w|h) - log p'(w|h)]
};

const char *criterion_name(Criterion c);

// A scored explicit N-gram of order >= 2.
struct PruneCandidate {
  NgramKey key;
  double delta_entropy = 0.0;     // nats
  double rel_ppl_increase = 0.0;  // expm1(delta_entropy)
  double sr_score = 0.0;
  // History of a retained longer N-gram.  Set by the pruning functions.
  bool is_protected = false;
  // False when removal would leave the history with no lower-order mass to
  // back off to; such candidates are always retained.
  bool prunable = true;

  double score(Criterion c) const {
    return c == Criterion::kRelativeEntropy ? delta_entropy : sr_score;
  }
};

// Count-based weights N(w,h) = d_c c(w,h) for the SR criterion.  Words are
// matched between model and count table by spelling.
class CountWeights {
 public:
  CountWeights(const CountTable &counts, std::vector<DiscountTable> discounts,
               const Vocabulary &model_vocab);
  // Throws InvalidArgument when the N-gram was never counted.
  double weight(const NgramKey &model_key) const;

 private:
  const CountTable &counts_;
  std::vector<DiscountTable> discounts_;
  std::vector<WordId> to_counts_;  // model id -> count-table id, -1 if none
};

// Scores candidates of one model.  p(h) and the backoff mass of each history
// are computed once and shared by all N-grams with that history.
class CandidateScorer {
 public:
  explicit CandidateScorer(const BackoffModel &model,
                           const CountWeights *weights = nullptr);
  // Requires an explicit N-gram of order >= 2.
  PruneCandidate score(const NgramKey &key);

 private:
  struct HistoryStats {
    double log_marginal;
    BackoffMass mass;
    double log_bow;
    long double backoff_mass;  // sum over backed-off words of p(w|h)
  };
  const HistoryStats &stats(const NgramKey &history);

  const BackoffModel &model_;
  const CountWeights *weights_;
  std::unordered_map<NgramKey, HistoryStats, NgramKeyHash> cache_;
  DistributionTotals totals_;
};

// Relative entropy from the factored closed form; O(1) per N-gram once the
// history statistics are known.
PruneCandidate re_score(const BackoffModel &model, const NgramKey &key);

// Seymore-Rosenfeld score; weight from `weights` if given, else p(h)p(w|h).
double sr_score(const BackoffModel &model, const NgramKey &key,
                const CountWeights *weights = nullptr);

// Relative entropy by building the pruned model and summing over the whole
// vocabulary.  Throws DegenerateBackoffError when the pruned history would
// be degenerate.
double re_score_bruteforce(const BackoffModel &model, const NgramKey &key);

// Brute-force scorer reusing one scratch copy of the model across calls.
class BruteForceScorer {
 public:
  explicit BruteForceScorer(const BackoffModel &model);
  double delta_entropy(const NgramKey &key);

 private:
  const BackoffModel &model_;
  BackoffModel scratch_;
};

inline double perplexity_increase_from_entropy(double delta_entropy) {
  return std::expm1(delta_entropy);
}

// Scores every explicit N-gram of the given orders (empty: all orders >= 2),
// sorted by key.
std::vector<PruneCandidate> score_candidates(
    const BackoffModel &model, const std::vector<int> &orders,
    const CountWeights *weights = nullptr);

// Candidates sorted by descending score; ties by ascending key.
std::vector<PruneCandidate> rank_candidates(
    std::vector<PruneCandidate> candidates, Criterion criterion);

struct OrderSummary {
  int order = 0;
  size_t original = 0;
  size_t retained = 0;
  size_t removed = 0;
  // Retained only because of context protection or degeneracy (top-K).
  size_t protected_extra = 0;
};

struct PruneReport {
  enum class Mode { kThreshold, kTopK };
  Criterion criterion = Criterion::kRelativeEntropy;
  Mode mode = Mode::kThreshold;
  double threshold = 0.0;
  bool threshold_on_entropy = false;
  size_t k = 0;
  std::vector<OrderSummary> orders;  // one per model order 1..N
  double removed_delta_entropy = 0.0;
  double duration_seconds = 0.0;
};

struct PruneResult {
  BackoffModel model;
  PruneReport report;
  // All scored candidates with final protection flags, sorted by key.
  std::vector<PruneCandidate> candidates;
  // Top-K mode: the K selected N-grams, best first.
  std::vector<NgramKey> selected;
};

struct PruneOptions {
  std::vector<int> orders;  // empty: all orders >= 2
  // Threshold applies to delta_entropy instead of expm1(delta_entropy).
  bool threshold_on_entropy = false;
  const CountWeights *weights = nullptr;
};

// Removes, in one pass over scores of the original model, every prunable
// unprotected N-gram whose perplexity increase is below `theta`, then
// recomputes all backoff weights.  theta <= 0 removes nothing.
PruneResult prune_by_threshold(const BackoffModel &model, double theta,
                               const PruneOptions &options = {});
// Same with precomputed candidates (as returned by score_candidates).
PruneResult apply_threshold(const BackoffModel &model,
                            std::vector<PruneCandidate> candidates,
                            double theta, const PruneOptions &options = {});

// Keeps the k best candidates of the selected orders under `criterion`,
// plus whatever context protection requires.
PruneResult prune_top_k(const BackoffModel &model, Criterion criterion,
                        size_t k, const PruneOptions &options = {});
PruneResult apply_top_k(const BackoffModel &model,
                        std::vector<PruneCandidate> candidates,
                        Criterion criterion, size_t k,
                        const PruneOptions &options = {});

struct Overlap {
  size_t count = 0;
  double fraction = 0.0;  // count / max(|a|, |b|); 1 for two empty sets
};
Overlap selection_overlap(const std::vector<NgramKey> &a,
                          const std::vector<NgramKey> &b);

// TSV dump: order, words, delta_entropy, rel_ppl_increase, sr_score,
// protected; sorted by the criterion's score, descending.
void write_candidates_tsv(const BackoffModel &model,
                          const std::vector<PruneCandidate> &candidates,
                          Criterion criterion, std::ostream &out);

}  // namespace ngram

#endif  // NGRAM_PRUNING_H_
