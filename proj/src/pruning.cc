// pruning.cc

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

#include "ngram/pruning.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <ostream>
#include <unordered_set>

#include "ngram/arpa_io.h"
#include "ngram/error.h"

namespace ngram {

const char *criterion_name(Criterion c) {
  return c == Criterion::kRelativeEntropy ? "re" : "sr";
}

CountWeights::CountWeights(const CountTable &counts,
                           std::vector<DiscountTable> discounts,
                           const Vocabulary &model_vocab)
    : counts_(counts), discounts_(std::move(discounts)) {
  discounts_.resize(counts.order());
  to_counts_.resize(model_vocab.size(), -1);
  for (size_t i = 0; i < model_vocab.size(); ++i) {
    if (auto id = counts.vocab().find(model_vocab.word(static_cast<WordId>(i))))
      to_counts_[i] = *id;
  }
}

double CountWeights::weight(const NgramKey &model_key) const {
  std::vector<WordId> ids;
  for (WordId w : model_key.words()) {
    WordId mapped = w >= 0 && static_cast<size_t>(w) < to_counts_.size()
                        ? to_counts_[w]
                        : -1;
    if (mapped < 0)
      throw InvalidArgument("N-gram word absent from the count table");
    ids.push_back(mapped);
  }
  if (model_key.size() > counts_.order())
    throw InvalidArgument("N-gram longer than the count table order");
  return discounted_count(counts_, discounts_, NgramKey(ids));
}

CandidateScorer::CandidateScorer(const BackoffModel &model,
                                 const CountWeights *weights)
    : model_(model), weights_(weights), totals_(model) {}

const CandidateScorer::HistoryStats &CandidateScorer::stats(
    const NgramKey &history) {
  auto it = cache_.find(history);
  if (it != cache_.end()) return it->second;
  HistoryStats s;
  s.log_marginal = history_marginal(model_, history.words());
  s.mass = backoff_mass_unchecked(model_, history.words(), totals_);
  const NgramEntry *entry = model_.find(history);
  s.log_bow = entry && entry->log_bow ? *entry->log_bow : 0.0;
  // Probability actually given to backed-off words; equals the numerator on
  // a consistent model and stays exact where the numerator was floored.
  s.backoff_mass = std::exp(static_cast<long double>(s.log_bow)) *
                   std::max(0.0L, static_cast<long double>(s.mass.denominator));
  return cache_.emplace(history, s).first->second;
}

PruneCandidate CandidateScorer::score(const NgramKey &key) {
  if (key.size() < 2) throw InvalidArgument("unigrams are not prune candidates");
  const NgramEntry *entry = model_.find(key);
  if (!entry)
    throw InvalidArgument("not an explicit N-gram: " +
                          model_.vocab().to_string(key.words()));
  const HistoryStats &h = stats(NgramKey(key.history()));

  PruneCandidate c;
  c.key = key;
  const long double log_p = entry->log_prob;
  const long double log_lower =
      conditional_prob(model_, key.truncated_history(), key.word());
  const long double p = std::exp(log_p);
  const long double p_lower = std::exp(log_lower);

  // Removing (h, w) returns p(w|h) to the numerator and p(w|h') to the
  // denominator of the backoff weight.
  BackoffMass pruned{static_cast<double>(h.mass.numerator + p),
                     static_cast<double>(h.mass.denominator + p_lower)};
  if (pruned.denominator <= kMassTolerance) {
    c.prunable = false;
    return c;
  }
  // A history left without continuations loses its weight.
  const long double new_log_bow =
      model_.continuations(key.history()).size() == 1
          ? 0.0L
          : static_cast<long double>(backoff_weight_for_mass(pruned));
  const long double p_h = std::exp(static_cast<long double>(h.log_marginal));

  // D(p||p') = -p(h) { p(w|h) [log p(w|h') + log a'(h) - log p(w|h)]
  //                    + [log a'(h) - log a(h)] sum_{BO} p(w_i|h) }
  const long double change_w = log_lower + new_log_bow - log_p;
  const long double d = -p_h * (p * change_w +
                                (new_log_bow - h.log_bow) * h.backoff_mass);
  c.delta_entropy = static_cast<double>(d);
  c.rel_ppl_increase = static_cast<double>(std::expm1(d));

  const long double weight =
      weights_ ? static_cast<long double>(weights_->weight(key)) : p_h * p;
  c.sr_score = static_cast<double>(weight * -change_w);
  return c;
}

PruneCandidate re_score(const BackoffModel &model, const NgramKey &key) {
  return CandidateScorer(model).score(key);
}

double sr_score(const BackoffModel &model, const NgramKey &key,
                const CountWeights *weights) {
  return CandidateScorer(model, weights).score(key).sr_score;
}

BruteForceScorer::BruteForceScorer(const BackoffModel &model)
    : model_(model), scratch_(model) {}

double BruteForceScorer::delta_entropy(const NgramKey &key) {
  if (key.size() < 2) throw InvalidArgument("unigrams are not prune candidates");
  const NgramEntry *found = model_.find(key);
  if (!found)
    throw InvalidArgument("not an explicit N-gram: " +
                          model_.vocab().to_string(key.words()));
  const NgramEntry removed = *found;
  const NgramKey history(key.history());
  const std::optional<double> old_bow = model_.find(history)->log_bow;

  scratch_.erase(key);
  struct Restore {
    BruteForceScorer *self;
    const NgramKey &key, &history;
    const NgramEntry &entry;
    std::optional<double> bow;
    ~Restore() {
      self->scratch_.insert(key, entry);
      self->scratch_.set_log_bow(history, bow);
    }
  } restore{this, key, history, removed, old_bow};

  if (scratch_.continuations(history.words()).empty()) {
    scratch_.set_log_bow(history, std::nullopt);
  } else {
    scratch_.set_log_bow(history, backoff_weight_for_mass(
                                      backoff_mass(scratch_, history.words())));
  }

  long double sum = 0.0L;
  for (WordId w = 0; w < static_cast<WordId>(model_.vocab().size()); ++w) {
    long double log_p, log_q;
    try {
      log_p = conditional_prob(model_, history.words(), w);
    } catch (const ZeroProbabilityError &) {
      continue;
    }
    log_q = conditional_prob(scratch_, history.words(), w);
    sum += std::exp(log_p) * (log_p - log_q);
  }
  return static_cast<double>(
      std::exp(static_cast<long double>(history_marginal(model_, history.words()))) *
      sum);
}

double re_score_bruteforce(const BackoffModel &model, const NgramKey &key) {
  return BruteForceScorer(model).delta_entropy(key);
}

namespace {

std::vector<int> resolve_orders(const BackoffModel &model,
                                const std::vector<int> &orders) {
  std::vector<int> out;
  if (orders.empty()) {
    for (int n = 2; n <= model.order(); ++n) out.push_back(n);
    return out;
  }
  for (int n : orders) {
    if (n < 2 || n > model.order())
      throw InvalidArgument("prune order " + std::to_string(n) +
                            " outside [2, " + std::to_string(model.order()) +
                            "]");
    if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Builds the pruned model from the surviving N-grams and fills the
// per-order summary.  `removed` holds the keys to drop.  Backoff weights are
// recomputed for every history whose distribution can change: those that
// lost a continuation and those whose backoff chain passes through one.
BackoffModel rebuild(const BackoffModel &model,
                     const std::unordered_set<NgramKey, NgramKeyHash> &removed,
                     PruneReport *report) {
  BackoffModel out(model.order(), model.vocab());
  out.set_begin_marginal(model.begin_marginal());
  report->orders.clear();
  for (int n = 1; n <= model.order(); ++n) {
    OrderSummary s;
    s.order = n;
    s.original = model.size(n);
    for (const NgramKey &key : model.sorted_keys(n)) {
      if (removed.count(key)) {
        ++s.removed;
        continue;
      }
      out.insert(key, *model.find(key));
      ++s.retained;
    }
    report->orders.push_back(s);
  }

  std::unordered_set<NgramKey, NgramKeyHash> touched;
  for (const NgramKey &key : removed) touched.insert(NgramKey(key.history()));
  DistributionTotals totals(out);
  for (int n = 1; n < out.order(); ++n) {
    for (const NgramKey &key : out.sorted_keys(n)) {
      bool affected = false;
      for (std::span<const WordId> s = key.words(); !s.empty() && !affected;
           s = s.subspan(1))
        affected = touched.count(NgramKey(s)) > 0;
      if (!affected) continue;
      if (out.continuations(key.words()).empty()) {
        out.set_log_bow(key, std::nullopt);
      } else {
        out.set_log_bow(key, backoff_weight_for_mass(
                                 backoff_mass_unchecked(out, key.words(), totals)));
      }
    }
  }
  return out;
}

// Top-down pass: decides removals order by order so that an N-gram is
// protected exactly when it is the history of a retained longer N-gram.
// `wants_removal` says whether an unprotected prunable candidate goes.
template <typename Pred>
std::unordered_set<NgramKey, NgramKeyHash> decide_removals(
    const BackoffModel &model, std::vector<PruneCandidate> &candidates,
    const std::vector<int> &orders, Pred wants_removal) {
  std::unordered_set<NgramKey, NgramKeyHash> removed;
  std::vector<std::vector<PruneCandidate *>> by_order(model.order() + 1);
  for (PruneCandidate &c : candidates) by_order[c.key.size()].push_back(&c);
  for (int n = model.order(); n >= 2; --n) {
    const bool selected = std::find(orders.begin(), orders.end(), n) != orders.end();
    for (PruneCandidate *c : by_order[n]) {
      c->is_protected = false;
      if (n < model.order()) {
        for (WordId w : model.continuations(c->key.words())) {
          if (!removed.count(c->key.extended(w))) {
            c->is_protected = true;
            break;
          }
        }
      }
      if (selected && c->prunable && !c->is_protected && wants_removal(*c))
        removed.insert(c->key);
    }
  }
  return removed;
}

double removed_entropy(const std::vector<PruneCandidate> &candidates,
                       const std::unordered_set<NgramKey, NgramKeyHash> &removed) {
  long double total = 0.0L;
  for (const PruneCandidate &c : candidates)
    if (removed.count(c.key)) total += c.delta_entropy;
  return static_cast<double>(total);
}

}  // namespace

std::vector<PruneCandidate> score_candidates(const BackoffModel &model,
                                             const std::vector<int> &orders,
                                             const CountWeights *weights) {
  std::vector<PruneCandidate> out;
  CandidateScorer scorer(model, weights);
  for (int n : resolve_orders(model, orders))
    for (const NgramKey &key : model.sorted_keys(n))
      out.push_back(scorer.score(key));
  std::sort(out.begin(), out.end(),
            [](const PruneCandidate &a, const PruneCandidate &b) {
              return a.key < b.key;
            });
  return out;
}

std::vector<PruneCandidate> rank_candidates(
    std::vector<PruneCandidate> candidates, Criterion criterion) {
  std::stable_sort(candidates.begin(), candidates.end(),
                   [criterion](const PruneCandidate &a, const PruneCandidate &b) {
                     double sa = a.score(criterion), sb = b.score(criterion);
                     if (sa != sb) return sa > sb;
                     return a.key < b.key;
                   });
  return candidates;
}

PruneResult apply_threshold(const BackoffModel &model,
                            std::vector<PruneCandidate> candidates,
                            double theta, const PruneOptions &options) {
  const auto start = std::chrono::steady_clock::now();
  if (std::isnan(theta) || theta < 0)
    throw InvalidArgument("pruning threshold must be >= 0");
  const std::vector<int> orders = resolve_orders(model, options.orders);
  auto removed = decide_removals(
      model, candidates, orders, [&](const PruneCandidate &c) {
        double value = options.threshold_on_entropy ? c.delta_entropy
                                                    : c.rel_ppl_increase;
        return theta > 0 && value < theta;
      });
  PruneReport report;
  report.criterion = Criterion::kRelativeEntropy;
  report.mode = PruneReport::Mode::kThreshold;
  report.threshold = theta;
  report.threshold_on_entropy = options.threshold_on_entropy;
  BackoffModel pruned = rebuild(model, removed, &report);
  report.removed_delta_entropy = removed_entropy(candidates, removed);
  report.duration_seconds = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - start)
                                .count();
  return {std::move(pruned), report, std::move(candidates), {}};
}

PruneResult prune_by_threshold(const BackoffModel &model, double theta,
                               const PruneOptions &options) {
  const auto start = std::chrono::steady_clock::now();
  PruneResult r = apply_threshold(
      model, score_candidates(model, options.orders, options.weights), theta,
      options);
  r.report.duration_seconds = std::chrono::duration<double>(
                                  std::chrono::steady_clock::now() - start)
                                  .count();
  return r;
}

PruneResult apply_top_k(const BackoffModel &model,
                        std::vector<PruneCandidate> candidates,
                        Criterion criterion, size_t k,
                        const PruneOptions &options) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<int> orders = resolve_orders(model, options.orders);
  std::vector<PruneCandidate> eligible;
  for (const PruneCandidate &c : candidates)
    if (c.prunable &&
        std::find(orders.begin(), orders.end(), c.key.size()) != orders.end())
      eligible.push_back(c);
  std::vector<PruneCandidate> ranked = rank_candidates(std::move(eligible), criterion);
  std::vector<NgramKey> selected;
  std::unordered_set<NgramKey, NgramKeyHash> keep;
  for (size_t i = 0; i < ranked.size() && i < k; ++i) {
    selected.push_back(ranked[i].key);
    keep.insert(ranked[i].key);
  }
  auto removed = decide_removals(model, candidates, orders,
                                 [&](const PruneCandidate &c) {
                                   return !keep.count(c.key);
                                 });
  PruneReport report;
  report.criterion = criterion;
  report.mode = PruneReport::Mode::kTopK;
  report.k = k;
  BackoffModel pruned = rebuild(model, removed, &report);
  for (OrderSummary &s : report.orders) {
    if (std::find(orders.begin(), orders.end(), s.order) == orders.end())
      continue;
    size_t chosen = 0;
    for (const NgramKey &key : selected)
      if (key.size() == s.order) ++chosen;
    s.protected_extra = s.retained - chosen;
  }
  report.removed_delta_entropy = removed_entropy(candidates, removed);
  report.duration_seconds = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - start)
                                .count();
  return {std::move(pruned), report, std::move(candidates), std::move(selected)};
}

PruneResult prune_top_k(const BackoffModel &model, Criterion criterion,
                        size_t k, const PruneOptions &options) {
  const auto start = std::chrono::steady_clock::now();
  PruneResult r = apply_top_k(
      model, score_candidates(model, options.orders, options.weights),
      criterion, k, options);
  r.report.duration_seconds = std::chrono::duration<double>(
                                  std::chrono::steady_clock::now() - start)
                                  .count();
  return r;
}

Overlap selection_overlap(const std::vector<NgramKey> &a,
                          const std::vector<NgramKey> &b) {
  Overlap out;
  if (a.empty() && b.empty()) {
    out.fraction = 1.0;
    return out;
  }
  std::unordered_set<NgramKey, NgramKeyHash> in_a(a.begin(), a.end());
  std::unordered_set<NgramKey, NgramKeyHash> in_b(b.begin(), b.end());
  for (const NgramKey &key : in_a)
    if (in_b.count(key)) ++out.count;
  out.fraction = static_cast<double>(out.count) /
                 static_cast<double>(std::max(in_a.size(), in_b.size()));
  return out;
}

void write_candidates_tsv(const BackoffModel &model,
                          const std::vector<PruneCandidate> &candidates,
                          Criterion criterion, std::ostream &out) {
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return std::string(buf);
  };
  for (const PruneCandidate &c : rank_candidates(candidates, criterion)) {
    out << c.key.size() << '\t' << model.vocab().to_string(c.key.words())
        << '\t' << num(c.delta_entropy) << '\t' << num(c.rel_ppl_increase)
        << '\t' << num(c.sr_score) << '\t' << (c.is_protected ? 1 : 0) << '\n';
  }
}

}  // namespace ngram
