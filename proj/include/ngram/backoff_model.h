// backoff_model.h

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

#ifndef NGRAM_BACKOFF_MODEL_H_
#define NGRAM_BACKOFF_MODEL_H_

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ngram/ngram_key.h"
#include "ngram/vocabulary.h"

namespace ngram {

// One explicit N-gram.  Values are natural logs.  A missing log_bow means a
// backoff weight of 1.
struct NgramEntry {
  double log_prob = 0.0;
  std::optional<double> log_bow;
  // Set for entries that exist to keep the model closed rather than being
  // estimated: the begin-token unigram and inserted context N-grams.
  bool placeholder = false;
};

// A backoff N-gram model: one table per order plus, for every history, the
// list of words that have an explicit continuation.  Mutation is meant for
// the build phase only; afterwards the model is read-only and may be shared
// across threads.
class BackoffModel {
 public:
  using Table = std::unordered_map<NgramKey, NgramEntry, NgramKeyHash>;

  BackoffModel(int order, Vocabulary vocab);

  int order() const { return order_; }
  const Vocabulary &vocab() const { return vocab_; }

  // Table of N-grams of order n, 1 <= n <= order().
  const Table &table(int n) const { return tables_.at(n - 1); }
  size_t size(int n) const { return table(n).size(); }
  size_t total_size() const;

  const NgramEntry *find(std::span<const WordId> ngram) const;
  const NgramEntry *find(const NgramKey &key) const;
  bool contains(const NgramKey &key) const { return find(key) != nullptr; }

  // Words w for which history+w is explicit, in insertion order.  The empty
  // history lists the unigrams.  History length must be < order().
  std::span<const WordId> continuations(std::span<const WordId> history) const;

  // Inserts a new entry.  Throws InvalidArgument on duplicates, bad orders
  // or unknown word ids.
  void insert(const NgramKey &key, const NgramEntry &entry);
  bool erase(const NgramKey &key);
  // Requires the entry to exist.
  void set_log_bow(const NgramKey &key, std::optional<double> log_bow);
  void set_log_prob(const NgramKey &key, double log_prob);

  // Marginal probability of the begin token used as the first factor of a
  // history marginal (linear scale).
  std::optional<double> begin_marginal() const { return begin_marginal_; }
  void set_begin_marginal(std::optional<double> p) { begin_marginal_ = p; }

  // Keys of order n sorted lexicographically by word id.
  std::vector<NgramKey> sorted_keys(int n) const;

 private:
  NgramEntry &mutable_entry(const NgramKey &key);

  int order_;
  Vocabulary vocab_;
  std::vector<Table> tables_;
  // Indexed by history length.
  std::vector<std::unordered_map<NgramKey, std::vector<WordId>, NgramKeyHash>>
      children_;
  std::optional<double> begin_marginal_;
};

// log p(w | history) by the recursive backoff rule.  Histories longer than
// order()-1 are truncated to their most recent words.  Throws
// InvalidArgument for an out-of-range word and ZeroProbabilityError when the
// word has no unigram and the model has no unknown-word token.
double conditional_prob(const BackoffModel &model,
                        std::span<const WordId> history, WordId word);

// Numerator and denominator of the backoff weight of a history:
//   numerator   = 1 - sum_{w explicit after h} p(w | h)
//   denominator = 1 - sum_{same w} p(w | h')
// For the empty history the denominator is 1.
struct BackoffMass {
  double numerator = 1.0;
  double denominator = 1.0;
};

// Tolerance below which a backoff mass counts as zero.
inline constexpr double kMassTolerance = 1e-12;
// Floor applied to a vanishing numerator so that the weight stays finite.
inline constexpr double kBackoffMassFloor = 1e-10;

// Total sum_w p(w|h) of the distribution at each history, memoized.  This
// is 1 except at and above histories whose numerator was floored, which
// carry the floor mass; the backoff denominator subtracts from this total
// rather than from 1 so that such histories do not leak mass upward.  The
// unigram distribution counts as 1.  Values are computed from the model as
// it is when first asked for; call reset() after changing a cached history.
class DistributionTotals {
 public:
  explicit DistributionTotals(const BackoffModel &model) : model_(model) {}
  long double total(std::span<const WordId> history);
  void reset() { cache_.clear(); }

 private:
  const BackoffModel &model_;
  std::unordered_map<NgramKey, long double, NgramKeyHash> cache_;
};

// Single pass over the explicit continuations of `history`:
//   numerator   = 1 - sum p(w|h)
//   denominator = S(h') - sum p(w|h')
// with S(h') the total of the lower-order distribution (1 on any model
// without floored histories).  Throws DegenerateBackoffError when mass is
// left to back off (numerator above tolerance) but the denominator is not
// positive.
BackoffMass backoff_mass(const BackoffModel &model,
                         std::span<const WordId> history);

// Same sums without the degeneracy check.  `totals` supplies S(h') and may
// be shared across calls on an unchanging model.
BackoffMass backoff_mass_unchecked(const BackoffModel &model,
                                   std::span<const WordId> history);
BackoffMass backoff_mass_unchecked(const BackoffModel &model,
                                   std::span<const WordId> history,
                                   DistributionTotals &totals);

// ln(numerator / denominator).
double recompute_backoff_weight(double numerator, double denominator);

// Weight actually stored for a history with the given mass: 0 when nothing
// can back off (denominator within tolerance of 0), otherwise the quotient
// with the numerator floored at kBackoffMassFloor.
double backoff_weight_for_mass(const BackoffMass &mass);

// Recomputes every stored backoff weight from the explicit probabilities,
// lowest order first.  Entries without continuations lose their weight.
void recompute_backoff_weights(BackoffModel &model);

// log p(h) as the chain p(h1) p(h2|h1) ...  When h1 is the begin token its
// factor is model.begin_marginal(), or p(</s>) if that is not set.
double history_marginal(const BackoffModel &model,
                        std::span<const WordId> history);

struct ValidationViolation {
  enum class Kind { kMissingHistory, kNormalization };
  Kind kind;
  NgramKey key;   // missing history, or the history that fails to normalize
  double defect;  // sum_w p(w|h) - 1 for normalization violations
};

struct ValidationReport {
  std::vector<ValidationViolation> violations;
  size_t histories_checked = 0;
  bool ok() const { return violations.empty(); }
};

// Checks closure and, for every explicit history (and the empty one), that
// the conditional distribution sums to 1 within `tolerance`.  Sums are
// computed from the backoff structure without enumerating the vocabulary.
ValidationReport validate_model(const BackoffModel &model,
                                double tolerance = 1e-9);

}  // namespace ngram

#endif  // NGRAM_BACKOFF_MODEL_H_
