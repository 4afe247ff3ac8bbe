// backoff_model.cc

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

#include "ngram/backoff_model.h"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "ngram/error.h"

namespace ngram {

BackoffModel::BackoffModel(int order, Vocabulary vocab)
    : order_(order), vocab_(std::move(vocab)) {
  if (order < 1 || order > kMaxOrder)
    throw InvalidArgument("model order must be in [1, " +
                          std::to_string(kMaxOrder) + "]");
  tables_.resize(order);
  children_.resize(order);
}

size_t BackoffModel::total_size() const {
  size_t total = 0;
  for (const Table &t : tables_) total += t.size();
  return total;
}

const NgramEntry *BackoffModel::find(std::span<const WordId> ngram) const {
  if (ngram.empty() || ngram.size() > static_cast<size_t>(order_))
    return nullptr;
  return find(NgramKey(ngram));
}

const NgramEntry *BackoffModel::find(const NgramKey &key) const {
  if (key.size() < 1 || key.size() > order_) return nullptr;
  const Table &t = tables_[key.size() - 1];
  auto it = t.find(key);
  return it == t.end() ? nullptr : &it->second;
}

std::span<const WordId> BackoffModel::continuations(
    std::span<const WordId> history) const {
  if (history.size() >= static_cast<size_t>(order_)) return {};
  const auto &index = children_[history.size()];
  auto it = index.find(NgramKey(history));
  if (it == index.end()) return {};
  return it->second;
}

void BackoffModel::insert(const NgramKey &key, const NgramEntry &entry) {
  if (key.size() < 1 || key.size() > order_)
    throw InvalidArgument("N-gram of order " + std::to_string(key.size()) +
                          " in a model of order " + std::to_string(order_));
  for (WordId w : key.words())
    if (!vocab_.contains(w))
      throw InvalidArgument("word id " + std::to_string(w) +
                            " outside the vocabulary");
  if (entry.log_bow && !std::isfinite(*entry.log_bow))
    throw InvalidArgument("non-finite backoff weight for " +
                          vocab_.to_string(key.words()));
  auto [it, inserted] = tables_[key.size() - 1].emplace(key, entry);
  if (!inserted)
    throw InvalidArgument("duplicate N-gram " + vocab_.to_string(key.words()));
  children_[key.size() - 1][NgramKey(key.history())].push_back(key.word());
}

bool BackoffModel::erase(const NgramKey &key) {
  if (key.size() < 1 || key.size() > order_) return false;
  if (tables_[key.size() - 1].erase(key) == 0) return false;
  auto &index = children_[key.size() - 1];
  auto it = index.find(NgramKey(key.history()));
  auto &words = it->second;
  words.erase(std::find(words.begin(), words.end(), key.word()));
  if (words.empty()) index.erase(it);
  return true;
}

NgramEntry &BackoffModel::mutable_entry(const NgramKey &key) {
  if (key.size() < 1 || key.size() > order_)
    throw InvalidArgument("no such N-gram");
  auto it = tables_[key.size() - 1].find(key);
  if (it == tables_[key.size() - 1].end())
    throw InvalidArgument("no such N-gram: " + vocab_.to_string(key.words()));
  return it->second;
}

void BackoffModel::set_log_bow(const NgramKey &key,
                               std::optional<double> log_bow) {
  if (log_bow && !std::isfinite(*log_bow))
    throw InvalidArgument("non-finite backoff weight for " +
                          vocab_.to_string(key.words()));
  mutable_entry(key).log_bow = log_bow;
}

void BackoffModel::set_log_prob(const NgramKey &key, double log_prob) {
  mutable_entry(key).log_prob = log_prob;
}

std::vector<NgramKey> BackoffModel::sorted_keys(int n) const {
  std::vector<NgramKey> keys;
  keys.reserve(size(n));
  for (const auto &[key, entry] : table(n)) keys.push_back(key);
  std::sort(keys.begin(), keys.end());
  return keys;
}

double conditional_prob(const BackoffModel &model,
                        std::span<const WordId> history, WordId word) {
  if (!model.vocab().contains(word))
    throw InvalidArgument("word id " + std::to_string(word) +
                          " outside the vocabulary");
  size_t len = std::min(history.size(), static_cast<size_t>(model.order() - 1));
  std::span<const WordId> context = history.last(len);
  double log_bow_sum = 0.0;
  while (true) {
    NgramKey key = NgramKey(context).extended(word);
    if (const NgramEntry *e = model.find(key)) return log_bow_sum + e->log_prob;
    if (context.empty()) break;
    if (const NgramEntry *h = model.find(context); h && h->log_bow)
      log_bow_sum += *h->log_bow;
    context = context.subspan(1);
  }
  std::optional<WordId> unk = model.vocab().unk_token();
  if (unk && *unk != word && model.find(NgramKey{*unk}))
    return conditional_prob(model, history, *unk);
  throw ZeroProbabilityError("zero probability for word '" +
                             model.vocab().word(word) + "'");
}

long double DistributionTotals::total(std::span<const WordId> history) {
  if (history.empty()) return 1.0L;
  std::span<const WordId> next = model_.continuations(history);
  const NgramEntry *entry = model_.find(history);
  if (next.empty() && !(entry && entry->log_bow))
    return total(history.subspan(1));
  NgramKey key(history);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  long double explicit_mass = 0.0L, lower_mass = 0.0L;
  for (WordId w : next) {
    explicit_mass +=
        std::exp(static_cast<long double>(model_.find(key.extended(w))->log_prob));
    lower_mass += std::exp(static_cast<long double>(
        conditional_prob(model_, key.truncated(), w)));
  }
  const long double alpha = std::exp(
      static_cast<long double>(entry && entry->log_bow ? *entry->log_bow : 0.0));
  const long double s =
      explicit_mass + alpha * (total(history.subspan(1)) - lower_mass);
  cache_.emplace(key, s);
  return s;
}

namespace {

// Probability the distribution under `history` gives to words outside
// `seen`, summed level by level down the backoff chain so that rounding
// error is scaled by the weights rather than left at the scale of 1.
// `seen` is extended in place.
long double mass_outside(const BackoffModel &model,
                         std::span<const WordId> history,
                         std::unordered_set<WordId> &seen) {
  long double mass = 0.0L, scale = 1.0L;
  for (;; history = history.subspan(1)) {
    if (history.empty()) {
      long double inside = 0.0L;
      for (WordId w : seen)
        inside += std::exp(static_cast<long double>(
            conditional_prob(model, std::span<const WordId>(), w)));
      return mass + scale * (1.0L - inside);
    }
    NgramKey key(history);
    for (WordId w : model.continuations(history))
      if (seen.insert(w).second)
        mass += scale * std::exp(static_cast<long double>(
                            model.find(key.extended(w))->log_prob));
    if (const NgramEntry *e = model.find(history); e && e->log_bow)
      scale *= std::exp(static_cast<long double>(*e->log_bow));
  }
}

}  // namespace

BackoffMass backoff_mass_unchecked(const BackoffModel &model,
                                   std::span<const WordId> history,
                                   DistributionTotals &totals) {
  long double numerator = 1.0L, denominator = 1.0L;
  NgramKey base(history);
  if (!history.empty()) denominator = totals.total(base.truncated());
  for (WordId w : model.continuations(history)) {
    numerator -= std::exp(static_cast<long double>(
        model.find(base.extended(w))->log_prob));
    if (!history.empty())
      denominator -= std::exp(static_cast<long double>(
          conditional_prob(model, base.truncated(), w)));
  }
  // Near-complete coverage leaves the difference to cancellation.
  if (!history.empty() && denominator < 1e-3L) {
    std::span<const WordId> next = model.continuations(history);
    std::unordered_set<WordId> seen(next.begin(), next.end());
    denominator = mass_outside(model, base.truncated(), seen);
  }
  return {static_cast<double>(numerator), static_cast<double>(denominator)};
}

BackoffMass backoff_mass_unchecked(const BackoffModel &model,
                                   std::span<const WordId> history) {
  DistributionTotals totals(model);
  return backoff_mass_unchecked(model, history, totals);
}

BackoffMass backoff_mass(const BackoffModel &model,
                         std::span<const WordId> history) {
  BackoffMass mass = backoff_mass_unchecked(model, history);
  if (mass.denominator <= kMassTolerance && mass.numerator > kMassTolerance)
    throw DegenerateBackoffError("backoff degenerate: no lower-order mass "
                                 "left to receive backed-off probability",
                                 model.vocab().to_string(history));
  return mass;
}

double recompute_backoff_weight(double numerator, double denominator) {
  if (!(denominator > 0.0))
    throw DegenerateBackoffError("backoff degenerate: denominator " +
                                     std::to_string(denominator),
                                 "");
  if (!(numerator > 0.0))
    throw NegativeBackoffMassError("negative backoff mass: numerator " +
                                   std::to_string(numerator));
  return std::log(numerator / denominator);
}

double backoff_weight_for_mass(const BackoffMass &mass) {
  if (mass.denominator <= kMassTolerance) return 0.0;
  return recompute_backoff_weight(std::max(mass.numerator, kBackoffMassFloor),
                                  mass.denominator);
}

void recompute_backoff_weights(BackoffModel &model) {
  DistributionTotals totals(model);
  for (int n = 1; n < model.order(); ++n) {
    for (const NgramKey &key : model.sorted_keys(n)) {
      if (model.continuations(key.words()).empty()) {
        model.set_log_bow(key, std::nullopt);
      } else {
        model.set_log_bow(key, backoff_weight_for_mass(backoff_mass_unchecked(
                                   model, key.words(), totals)));
      }
    }
  }
}

double history_marginal(const BackoffModel &model,
                        std::span<const WordId> history) {
  double total = 0.0;
  for (size_t k = 0; k < history.size(); ++k) {
    if (k == 0 && history[0] == model.vocab().begin_token()) {
      std::optional<double> p = model.begin_marginal();
      std::optional<WordId> end = model.vocab().end_token();
      if (p) {
        total += std::log(*p);
        continue;
      }
      if (end && model.find(NgramKey{*end})) {
        total += model.find(NgramKey{*end})->log_prob;
        continue;
      }
    }
    total += conditional_prob(model, history.first(k), history[k]);
  }
  return total;
}

ValidationReport validate_model(const BackoffModel &model, double tolerance) {
  using Kind = ValidationViolation::Kind;
  ValidationReport report;
  for (int n = 2; n <= model.order(); ++n) {
    for (const NgramKey &key : model.sorted_keys(n)) {
      if (!model.find(key.history()))
        report.violations.push_back(
            {Kind::kMissingHistory, NgramKey(key.history()), 0.0});
    }
  }

  // Total probability under each explicit history:
  //   S(h) = E(h) + alpha(h) * (S(h') - E'(h))
  // where E sums the explicit continuations and E' the same words under h'.
  std::unordered_map<NgramKey, long double, NgramKeyHash> totals;
  long double unigram_total = 0.0L;
  for (const auto &[key, entry] : model.table(1))
    unigram_total += std::exp(static_cast<long double>(entry.log_prob));
  ++report.histories_checked;
  if (std::fabs(static_cast<double>(unigram_total - 1.0L)) > tolerance)
    report.violations.push_back({Kind::kNormalization, NgramKey(),
                                 static_cast<double>(unigram_total - 1.0L)});

  auto lower_total = [&](std::span<const WordId> h) -> long double {
    while (!h.empty()) {
      if (auto it = totals.find(NgramKey(h)); it != totals.end())
        return it->second;
      h = h.subspan(1);
    }
    return unigram_total;
  };

  for (int n = 1; n < model.order(); ++n) {
    for (const NgramKey &key : model.sorted_keys(n)) {
      const NgramEntry &entry = *model.find(key);
      long double explicit_mass = 0.0L, lower_mass = 0.0L;
      for (WordId w : model.continuations(key.words())) {
        explicit_mass += std::exp(static_cast<long double>(
            model.find(key.extended(w))->log_prob));
        lower_mass += std::exp(static_cast<long double>(
            conditional_prob(model, key.truncated(), w)));
      }
      long double alpha =
          std::exp(static_cast<long double>(entry.log_bow.value_or(0.0)));
      long double total =
          explicit_mass + alpha * (lower_total(key.truncated()) - lower_mass);
      totals.emplace(key, total);
      ++report.histories_checked;
      double defect = static_cast<double>(total - 1.0L);
      if (std::fabs(defect) > tolerance)
        report.violations.push_back({Kind::kNormalization, key, defect});
    }
  }
  return report;
}

}  // namespace ngram
