// estimation.cc

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

#include "ngram/estimation.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <sstream>
#include <unordered_set>

#include "ngram/error.h"

namespace ngram {

CountTable::CountTable(int order, Vocabulary vocab)
    : order_(order), vocab_(std::move(vocab)) {
  if (order < 1 || order > kMaxOrder)
    throw InvalidArgument("order must be in [1, " + std::to_string(kMaxOrder) +
                          "]");
  counts_.resize(order);
}

int64_t CountTable::count(const NgramKey &key) const {
  if (key.size() < 1 || key.size() > order_) return 0;
  const Counts &c = counts_[key.size() - 1];
  auto it = c.find(key);
  return it == c.end() ? 0 : it->second;
}

void CountTable::add(const NgramKey &key, int64_t count) {
  if (key.size() < 1 || key.size() > order_)
    throw InvalidArgument("N-gram order outside the count table");
  for (WordId w : key.words())
    if (!vocab_.contains(w)) throw InvalidArgument("unknown word id");
  counts_[key.size() - 1][key] += count;
  if (key.size() == 1) token_count_ += count;
}

void CountTable::merge(const CountTable &other) {
  if (other.order_ != order_)
    throw InvalidArgument("cannot merge count tables of different orders");
  std::vector<WordId> map(other.vocab_.size());
  for (size_t i = 0; i < map.size(); ++i)
    map[i] = vocab_.add(other.vocab_.word(static_cast<WordId>(i)));
  std::vector<WordId> ids;
  for (int n = 1; n <= order_; ++n) {
    for (const auto &[key, c] : other.counts_[n - 1]) {
      ids.clear();
      for (WordId w : key.words()) ids.push_back(map[w]);
      counts_[n - 1][NgramKey(ids)] += c;
    }
  }
  sentence_count_ += other.sentence_count_;
  token_count_ += other.token_count_;
}

CountTable count_ngrams(std::istream &corpus, const CountOptions &options) {
  Vocabulary vocab;
  const WordId begin = vocab.add(kBeginToken);
  const WordId end = vocab.add(kEndToken);
  if (options.vocab_policy == VocabPolicy::kUnk) vocab.add(kUnkToken);
  CountTable table(options.order, std::move(vocab));

  std::string line;
  std::vector<WordId> padded;
  int64_t line_number = 0;
  while (std::getline(corpus, line)) {
    ++line_number;
    padded.assign(1, begin);
    std::istringstream words(line);
    std::string word;
    std::vector<std::string> tokens;
    while (words >> word) tokens.push_back(word);
    if (static_cast<int64_t>(tokens.size()) > options.max_line_tokens)
      throw ParseError("sentence has " + std::to_string(tokens.size()) +
                           " tokens, limit is " +
                           std::to_string(options.max_line_tokens),
                       line_number);
    // Explicit boundary markers at the line ends are accepted and dropped.
    size_t first = 0, last = tokens.size();
    if (first < last && tokens[first] == kBeginToken) ++first;
    if (first < last && tokens[last - 1] == kEndToken) --last;
    for (size_t i = first; i < last; ++i) {
      if (tokens[i] == kBeginToken || tokens[i] == kEndToken)
        throw ParseError("sentence boundary token inside a sentence",
                         line_number);
      padded.push_back(table.vocab_.add(tokens[i]));
    }
    padded.push_back(end);

    std::span<const WordId> sentence(padded);
    for (size_t i = 1; i < sentence.size(); ++i) {
      for (int n = 1; n <= options.order && static_cast<size_t>(n) <= i + 1;
           ++n) {
        NgramKey key(sentence.subspan(i + 1 - n, n));
        ++table.counts_[n - 1][key];
      }
    }
    table.token_count_ += static_cast<int64_t>(sentence.size()) - 1;
    ++table.sentence_count_;
  }
  if (line_number == 0) throw Error("empty corpus");
  return table;
}

std::map<int64_t, int64_t> count_of_counts(const CountTable &counts, int n,
                                           int64_t max_r) {
  std::map<int64_t, int64_t> out;
  for (const auto &[key, c] : counts.counts(n))
    if (c >= 1 && c <= max_r) ++out[c];
  return out;
}

namespace {

int64_t lookup(const std::map<int64_t, int64_t> &coc, int64_t r) {
  auto it = coc.find(r);
  return it == coc.end() ? 0 : it->second;
}

}  // namespace

std::vector<double> katz_coefficients(
    const std::map<int64_t, int64_t> &coc, int cutoff) {
  if (cutoff < 1) throw InvalidArgument("Good-Turing cutoff must be >= 1");
  const double n1 = static_cast<double>(lookup(coc, 1));
  const double a = (cutoff + 1) * static_cast<double>(lookup(coc, cutoff + 1)) / n1;
  std::vector<double> d(cutoff + 1, 1.0);
  for (int r = 1; r <= cutoff; ++r) {
    const double nr = static_cast<double>(lookup(coc, r));
    const double r_star = (r + 1) * static_cast<double>(lookup(coc, r + 1)) / nr;
    d[r] = (r_star / r - a) / (1.0 - a);
  }
  return d;
}

DiscountTable good_turing_discounts(const std::map<int64_t, int64_t> &coc,
                                    int cutoff) {
  if (cutoff < 1) throw InvalidArgument("Good-Turing cutoff must be >= 1");
  DiscountTable table;
  for (int r = 1; r <= cutoff + 1; ++r) {
    if (lookup(coc, r) == 0) {
      table.warning = "count-of-counts n_" + std::to_string(r) +
                      " is zero; Good-Turing discounting disabled";
      return table;
    }
  }
  std::vector<double> d = katz_coefficients(coc, cutoff);
  for (int r = 1; r <= cutoff; ++r) {
    if (!(d[r] > 0.0 && d[r] <= 1.0)) {
      table.warning = "discount coefficient d_" + std::to_string(r) + " = " +
                      std::to_string(d[r]) +
                      " out of range; Good-Turing discounting disabled";
      return table;
    }
  }
  table.ratios = std::move(d);
  table.disabled = false;
  return table;
}

std::vector<DiscountTable> compute_discounts(const CountTable &counts,
                                             int cutoff, bool enabled) {
  std::vector<DiscountTable> out(counts.order());
  if (!enabled) return out;
  for (int n = 1; n <= counts.order(); ++n) {
    out[n - 1] = good_turing_discounts(count_of_counts(counts, n, cutoff + 1),
                                       cutoff);
    if (!out[n - 1].warning.empty())
      out[n - 1].warning = "order " + std::to_string(n) + ": " +
                           out[n - 1].warning;
  }
  return out;
}

double discounted_count(const CountTable &counts,
                        const std::vector<DiscountTable> &discounts,
                        const NgramKey &key) {
  int64_t c = counts.count(key);
  if (c <= 0)
    throw InvalidArgument("N-gram '" + counts.vocab().to_string(key.words()) +
                          "' absent from the count table");
  return discounts.at(key.size() - 1).ratio(c) * static_cast<double>(c);
}

BackoffModel estimate_model(const CountTable &counts,
                            const EstimateOptions &options,
                            std::vector<std::string> *warnings) {
  const int order = counts.order();
  const Vocabulary &vocab = counts.vocab();
  if (counts.token_count() == 0) throw Error("empty count table");
  if (!options.min_counts.empty() && options.min_counts[0] != 1)
    throw InvalidArgument("unigram minimum count must be 1");
  auto min_count = [&](int n) -> int64_t {
    return static_cast<size_t>(n) <= options.min_counts.size()
               ? std::max<int64_t>(1, options.min_counts[n - 1])
               : 1;
  };

  std::vector<DiscountTable> discounts =
      compute_discounts(counts, options.cutoff, options.discount);
  if (warnings)
    for (const DiscountTable &d : discounts)
      if (!d.warning.empty()) warnings->push_back(d.warning);

  BackoffModel model(order, vocab);
  const std::optional<WordId> begin = vocab.begin_token();

  // Unigrams.  Leftover mass goes to unseen vocabulary words, or is spread
  // over all seen words when there are none.  Unseen words get at least the
  // mass floor each, taken proportionally from the seen words.
  {
    const long double total = static_cast<long double>(counts.token_count());
    std::vector<std::pair<WordId, long double>> probs;
    std::vector<WordId> unseen;
    long double mass = 0.0L;
    for (WordId w = 0; w < static_cast<WordId>(vocab.size()); ++w) {
      if (w == begin) continue;
      int64_t c = counts.count(NgramKey{w});
      if (c == 0) {
        unseen.push_back(w);
        continue;
      }
      long double p = discounts[0].ratio(c) * static_cast<long double>(c) / total;
      probs.emplace_back(w, p);
      mass += p;
    }
    long double leftover = 1.0L - mass;
    const long double reserve =
        kBackoffMassFloor * static_cast<long double>(unseen.size());
    if (!unseen.empty() && leftover < reserve) {
      const long double scale = (1.0L - reserve) / mass;
      for (auto &[w, p] : probs) p *= scale;
      leftover = reserve;
    }
    if (leftover > kMassTolerance) {
      if (!unseen.empty()) {
        for (WordId w : unseen)
          probs.emplace_back(w, leftover / static_cast<long double>(unseen.size()));
      } else {
        for (auto &[w, p] : probs)
          p += leftover / static_cast<long double>(probs.size());
      }
    }
    std::sort(probs.begin(), probs.end());
    for (const auto &[w, p] : probs)
      model.insert(NgramKey{w}, {static_cast<double>(std::log(p)), {}, false});
    if (begin) {
      model.insert(NgramKey{*begin}, {-99.0 * std::numbers::ln10, {}, true});
      model.set_begin_marginal(static_cast<double>(counts.sentence_count()) /
                               static_cast<double>(counts.token_count()));
    }
  }

  // Retained N-grams per order, then the contexts that must be inserted to
  // keep every retained N-gram's history present.
  std::vector<std::vector<NgramKey>> retained(order + 1);
  for (int n = 2; n <= order; ++n) {
    for (const auto &[key, c] : counts.counts(n))
      if (c >= min_count(n)) retained[n].push_back(key);
    std::sort(retained[n].begin(), retained[n].end());
  }
  std::vector<std::vector<NgramKey>> inserted(order + 1);
  for (int n = order; n >= 3; --n) {
    std::unordered_set<NgramKey, NgramKeyHash> present(retained[n - 1].begin(),
                                                       retained[n - 1].end());
    std::unordered_set<NgramKey, NgramKeyHash> needed;
    auto require = [&](const std::vector<NgramKey> &keys) {
      for (const NgramKey &key : keys) {
        NgramKey h(key.history());
        if (!present.count(h)) needed.insert(h);
      }
    };
    require(retained[n]);
    require(inserted[n]);
    inserted[n - 1].assign(needed.begin(), needed.end());
    std::sort(inserted[n - 1].begin(), inserted[n - 1].end());
  }

  // Lower-order totals are only ever queried once their weights are final.
  DistributionTotals totals(model);
  for (int n = 2; n <= order; ++n) {
    std::unordered_map<NgramKey, int64_t, NgramKeyHash> history_totals;
    for (const auto &[key, c] : counts.counts(n))
      history_totals[NgramKey(key.history())] += c;
    for (const NgramKey &key : retained[n]) {
      int64_t c = counts.count(key);
      double p = discounts[n - 1].ratio(c) * static_cast<double>(c) /
                 static_cast<double>(history_totals.at(NgramKey(key.history())));
      model.insert(key, {std::log(p), {}, false});
    }

    for (const NgramKey &h : model.sorted_keys(n - 1)) {
      std::span<const WordId> next = model.continuations(h.words());
      if (next.empty()) continue;
      BackoffMass mass = backoff_mass_unchecked(model, h.words(), totals);
      if (mass.denominator <= kMassTolerance &&
          mass.numerator > kMassTolerance) {
        // Every possible word is explicit: spread the leftover over them.
        const double share = mass.numerator / static_cast<double>(next.size());
        std::vector<WordId> words(next.begin(), next.end());
        for (WordId w : words) {
          NgramKey key = h.extended(w);
          model.set_log_prob(key, std::log(std::exp(model.find(key)->log_prob) +
                                           share));
        }
        model.set_log_bow(h, 0.0);
      } else {
        model.set_log_bow(h, backoff_weight_for_mass(mass));
      }
    }

    for (const NgramKey &key : inserted[n]) {
      const NgramEntry *h = model.find(key.history());
      double log_p = (h && h->log_bow ? *h->log_bow : 0.0) +
                     conditional_prob(model, key.truncated_history(), key.word());
      model.insert(key, {log_p, {}, true});
    }
    if (!inserted[n].empty()) {
      for (const NgramKey &h : model.sorted_keys(n - 1)) {
        if (model.continuations(h.words()).empty()) continue;
        model.set_log_bow(h, backoff_weight_for_mass(
                                 backoff_mass_unchecked(model, h.words(), totals)));
      }
    }
  }
  return model;
}

}  // namespace ngram
