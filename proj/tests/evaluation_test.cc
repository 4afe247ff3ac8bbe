// evaluation_test.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "ngram/arpa_io.h"
#include "ngram/backoff_model.h"
#include "ngram/error.h"
#include "ngram/estimation.h"
#include "ngram/evaluation.h"
#include "ngram/pruning.h"
#include "random_models.h"

using namespace ngram;

namespace {

const std::string kData = NGRAM_TEST_DATA;

std::string slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PerplexityReport ppl(const BackoffModel &m, const std::string &text,
                     OovPolicy oov = OovPolicy::kSkip) {
  std::istringstream in(text);
  return perplexity(m, in, {oov});
}

BackoffModel train(const std::string &text, int order, bool discount) {
  std::istringstream in(text);
  CountOptions opts;
  opts.order = order;
  EstimateOptions est;
  est.discount = discount;
  return estimate_model(count_ngrams(in, opts), est);
}

BackoffModel half_half_unigram() {
  Vocabulary v;
  v.add("a");
  v.add("</s>");
  BackoffModel m(1, v);
  m.insert(NgramKey{0}, {std::log(0.5), {}, false});
  m.insert(NgramKey{1}, {std::log(0.5), {}, false});
  return m;
}

// vocab {a, b}, p(a) = p(b) = 0.5, alpha(a) = 0.8, p(b|a) = 0.6.
BackoffModel two_word_model() {
  return read_arpa_file(kData + "/two_word.arpa");
}

}  // namespace

TEST_CASE("unigram perplexity of two") {
  PerplexityReport r = ppl(half_half_unigram(), "a\n");
  CHECK(r.log_prob_total == doctest::Approx(2 * std::log(0.5)));
  CHECK(r.token_count == 2);
  CHECK(r.sentence_count == 1);
  CHECK(r.oov_count == 0);
  CHECK(r.perplexity == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("certain events give perplexity one") {
  BackoffModel m = train("a\n", 2, false);
  PerplexityReport r = ppl(m, "a\na\n");
  CHECK(r.token_count == 4);
  CHECK(r.log_prob_total == 0.0);
  CHECK(r.perplexity == 1.0);
}

TEST_CASE("micro corpus hand value") {
  // ML bigram on its own training text: the product of the twelve predicted
  // token probabilities is 1/1728, so PP = 1728^(1/12) = 12^(1/4).
  const std::string micro = slurp(kData + "/micro.txt");
  BackoffModel m = train(micro, 2, false);
  PerplexityReport r = ppl(m, micro);
  CHECK(r.token_count == 12);
  CHECK(r.sentence_count == 3);
  CHECK(std::abs(r.perplexity / 1.8612097182041991 - 1) <= 1e-9);
  CHECK(std::abs(r.perplexity / std::pow(12.0, 0.25) - 1) <= 1e-9);
}

TEST_CASE("oov policies") {
  BackoffModel m = half_half_unigram();
  PerplexityReport skip = ppl(m, "a zzz a\n");
  CHECK(skip.oov_count == 1);
  CHECK(skip.token_count == 3);
  CHECK(skip.perplexity == doctest::Approx(2.0));
  CHECK_THROWS_AS(ppl(m, "a zzz a\n", OovPolicy::kError),
                  ZeroProbabilityError);
  CHECK_THROWS_AS(ppl(m, "a\n", OovPolicy::kUnk), InvalidArgument);
  // The sentence end is still scored.
  PerplexityReport only_oov = ppl(m, "zzz\n", OovPolicy::kSkip);
  CHECK(only_oov.oov_count == 1);
  CHECK(only_oov.token_count == 1);
  CHECK_THROWS_AS(ppl(m, ""), Error);

  Vocabulary v;
  v.add("a");
  v.add("</s>");
  v.add("<unk>");
  BackoffModel u(1, v);
  u.insert(NgramKey{0}, {std::log(0.5), {}, false});
  u.insert(NgramKey{1}, {std::log(0.25), {}, false});
  u.insert(NgramKey{2}, {std::log(0.25), {}, false});
  PerplexityReport mapped = ppl(u, "zzz\n", OovPolicy::kUnk);
  CHECK(mapped.oov_count == 0);
  CHECK(mapped.token_count == 2);
  CHECK(mapped.log_prob_total == doctest::Approx(2 * std::log(0.25)));
}

TEST_CASE("skipped tokens restart the history") {
  // After the skip, "b" is scored with the empty history: p(b) = 0.5 rather
  // than p(b|a) = 0.6.
  Vocabulary v;
  WordId a = v.add("a"), b = v.add("b"), e = v.add("</s>");
  BackoffModel m(2, v);
  m.insert(NgramKey{a}, {std::log(0.25), {}, false});
  m.insert(NgramKey{b}, {std::log(0.5), {}, false});
  m.insert(NgramKey{e}, {std::log(0.25), {}, false});
  m.insert(NgramKey{a, b}, {std::log(0.6), {}, false});
  m.set_log_bow(NgramKey{a}, backoff_weight_for_mass(
                                 backoff_mass(m, NgramKey{a}.words())));
  PerplexityReport r = ppl(m, "a zzz b\n");
  CHECK(r.token_count == 3);
  CHECK(r.log_prob_total ==
        doctest::Approx(std::log(0.25) + std::log(0.5) +
                        conditional_prob(m, NgramKey{b}.words(), e)));
}

TEST_CASE("perplexity ignores sentence order") {
  BackoffModel m = read_arpa_file(kData + "/fixture100.o3k3.arpa");
  std::istringstream in(slurp(kData + "/desk/heldout.txt"));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line) && lines.size() < 300) lines.push_back(line);
  std::string forward, backward;
  for (const auto &l : lines) forward += l + "\n";
  std::mt19937_64 rng(1);
  std::shuffle(lines.begin(), lines.end(), rng);
  for (const auto &l : lines) backward += l + "\n";
  PerplexityReport a = ppl(m, forward), b = ppl(m, backward);
  CHECK(a.token_count == b.token_count);
  CHECK(a.oov_count == b.oov_count);
  CHECK(a.perplexity == doctest::Approx(b.perplexity).epsilon(1e-12));
}

TEST_CASE("perplexity of a union lies between its parts") {
  BackoffModel m = read_arpa_file(kData + "/fixture100.o3k3.arpa");
  const std::string train = slurp(kData + "/fixture100.txt");
  std::string held;
  std::istringstream in(slurp(kData + "/desk/heldout.txt"));
  std::string line;
  for (int i = 0; i < 200 && std::getline(in, line); ++i) held += line + "\n";
  double p1 = ppl(m, train).perplexity, p2 = ppl(m, held).perplexity;
  double both = ppl(m, train + held).perplexity;
  CHECK(both >= std::min(p1, p2));
  CHECK(both <= std::max(p1, p2));
  CHECK(p1 >= 1.0);
}

TEST_CASE("cross perplexity against the model itself") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    BackoffModel m = testing::random_model(rng);
    CrossPerplexity self = cross_perplexity_exact(m, m);
    // Direct definition.
    long double h = 0;
    for (const auto &hist : testing::all_histories(m)) {
      if (static_cast<int>(hist.size()) != m.order() - 1) continue;
      double lm = history_marginal(m, hist);
      for (WordId w = 0; w < static_cast<WordId>(m.vocab().size()); ++w) {
        double lp = conditional_prob(m, hist, w);
        h -= std::exp(static_cast<long double>(lm + lp)) * lp;
      }
    }
    CHECK(static_cast<double>(self.cross_entropy) ==
          doctest::Approx(static_cast<double>(h)).epsilon(1e-12));
    CHECK(self.perplexity == doctest::Approx(std::exp(static_cast<double>(h))));
  }
}

TEST_CASE("halving one cell scales perplexity by 2^m") {
  BackoffModel ref = two_word_model();
  BackoffModel eval = ref;
  NgramKey ab{0, 1};
  eval.set_log_prob(ab, ref.find(ab)->log_prob - std::log(2.0));
  const double m = std::exp(history_marginal(ref, ab.history()) +
                            ref.find(ab)->log_prob);
  CHECK(m == doctest::Approx(0.3).epsilon(1e-6));
  double ratio = cross_perplexity_exact(ref, eval).perplexity /
                 cross_perplexity_exact(ref, ref).perplexity;
  CHECK(ratio == doctest::Approx(std::exp(m * std::log(2.0))).epsilon(1e-13));
}

TEST_CASE("single prune changes perplexity by expm1 of its entropy") {
  BackoffModel m = two_word_model();
  PruneCandidate c = re_score(m, NgramKey{0, 1});
  BackoffModel pruned = m;
  pruned.erase(NgramKey{0, 1});
  pruned.set_log_bow(NgramKey{0}, std::nullopt);
  double pp = cross_perplexity_exact(m, m).perplexity;
  double pp2 = cross_perplexity_exact(m, pruned).perplexity;
  CHECK((pp2 - pp) / pp == doctest::Approx(c.rel_ppl_increase).epsilon(1e-9));
}

TEST_CASE("cross perplexity guards") {
  BackoffModel m = read_arpa_file(kData + "/fixture100.o3k3.arpa");
  CHECK_THROWS_AS(cross_perplexity_exact(m, m), InvalidArgument);
  BackoffModel t = two_word_model();
  CHECK_THROWS_AS(cross_perplexity_exact(t, t, 3), InvalidArgument);
  CHECK_NOTHROW(cross_perplexity_exact(t, t, 4));
  CHECK_THROWS_AS(cross_perplexity_exact(t, half_half_unigram()),
                  InvalidArgument);
}
