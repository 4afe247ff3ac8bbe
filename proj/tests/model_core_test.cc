// model_core_test.cc

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

#include <cmath>
#include <random>

#include "ngram/backoff_model.h"
#include "ngram/error.h"
#include "random_models.h"

using namespace ngram;

namespace {

// vocab {a, b}, p(a) = p(b) = 0.5, alpha(a) = 0.8, p(b|a) = 0.6.
BackoffModel two_word_model() {
  Vocabulary v;
  WordId a = v.add("a"), b = v.add("b");
  BackoffModel m(2, v);
  m.insert(NgramKey{a}, {std::log(0.5), std::log(0.8), false});
  m.insert(NgramKey{b}, {std::log(0.5), {}, false});
  m.insert(NgramKey{a, b}, {std::log(0.6), {}, false});
  return m;
}

double vocab_sum(const BackoffModel &m, std::span<const WordId> h) {
  long double s = 0;
  for (WordId w = 0; w < static_cast<WordId>(m.vocab().size()); ++w)
    s += std::exp(static_cast<long double>(conditional_prob(m, h, w)));
  return static_cast<double>(s);
}

}  // namespace

TEST_CASE("vocabulary ids follow first occurrence") {
  Vocabulary v;
  CHECK(v.add("x") == 0);
  CHECK(v.add("y") == 1);
  CHECK(v.add("x") == 0);
  CHECK(v.find("y") == 1);
  CHECK(!v.find("z"));
  CHECK(!v.begin_token());
  v.add("<s>");
  CHECK(v.begin_token() == 2);
  const WordId ids[] = {0, 1};
  CHECK(v.to_string(ids) == "x y");
}

TEST_CASE("ngram key views") {
  NgramKey k{3, 4, 5};
  CHECK(k.size() == 3);
  CHECK(k.word() == 5);
  CHECK(NgramKey(k.history()) == NgramKey{3, 4});
  CHECK(NgramKey(k.truncated()) == NgramKey{4, 5});
  CHECK(NgramKey(k.truncated_history()) == NgramKey{4});
  CHECK(NgramKey{3}.truncated_history().empty());
  CHECK(NgramKey{3, 4} < NgramKey{3, 5});
  CHECK(NgramKey{3} < NgramKey{3, 0});
  CHECK(NgramKey{}.extended(7) == NgramKey{7});
}

TEST_CASE("conditional_prob on explicit, absent and backed-off entries") {
  BackoffModel m = two_word_model();
  const WordId a = 0, b = 1;
  const WordId ha[] = {a}, hb[] = {b};
  CHECK(conditional_prob(m, ha, b) == m.find(NgramKey{a, b})->log_prob);
  CHECK(conditional_prob(m, ha, b) == doctest::Approx(-0.5108).epsilon(1e-4));
  CHECK(conditional_prob(m, hb, b) == doctest::Approx(std::log(0.5)));
  CHECK(conditional_prob(m, ha, a) == doctest::Approx(std::log(0.4)));

  Vocabulary v;
  v.add("a");
  v.add("b");
  BackoffModel m2(2, v);
  m2.insert(NgramKey{0}, {std::log(0.7), {}, false});
  m2.insert(NgramKey{1}, {std::log(0.3), {}, false});
  m2.insert(NgramKey{0, 0}, {std::log(0.5), {}, false});
  CHECK(conditional_prob(m2, hb, a) == doctest::Approx(std::log(0.7)));

  // Longer-than-needed histories are truncated.
  const WordId hab[] = {b, a};
  CHECK(conditional_prob(m, hab, a) == conditional_prob(m, ha, a));
}

TEST_CASE("conditional_prob errors") {
  BackoffModel m = two_word_model();
  CHECK_THROWS_AS(conditional_prob(m, {}, 2), InvalidArgument);
  CHECK_THROWS_AS(conditional_prob(m, {}, -1), InvalidArgument);

  Vocabulary v;
  v.add("a");
  v.add("b");
  BackoffModel m2(1, v);
  m2.insert(NgramKey{0}, {0.0, {}, false});
  CHECK_THROWS_AS(conditional_prob(m2, {}, 1), ZeroProbabilityError);

  v.add("<unk>");
  BackoffModel m3(1, v);
  m3.insert(NgramKey{0}, {std::log(0.9), {}, false});
  m3.insert(NgramKey{2}, {std::log(0.1), {}, false});
  CHECK(conditional_prob(m3, {}, 1) == doctest::Approx(std::log(0.1)));
}

TEST_CASE("backoff_mass") {
  Vocabulary v;
  WordId a = v.add("a"), b = v.add("b");
  BackoffModel m(2, v);
  m.insert(NgramKey{a}, {std::log(0.6), {}, false});
  m.insert(NgramKey{b}, {std::log(0.4), {}, false});
  m.insert(NgramKey{a, b}, {std::log(0.5), {}, false});
  const WordId ha[] = {a}, hb[] = {b};
  BackoffMass mass = backoff_mass(m, ha);
  CHECK(mass.numerator == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mass.denominator == doctest::Approx(0.6).epsilon(1e-15));

  BackoffMass none = backoff_mass(m, hb);
  CHECK(none.numerator == 1.0);
  CHECK(none.denominator == 1.0);

  m.insert(NgramKey{a, a}, {std::log(0.5), {}, false});
  CHECK(std::abs(backoff_mass(m, ha).numerator) < 1e-12);

  // Whole vocabulary explicit but only 0.9 of the mass: nothing to back
  // off onto.
  m.set_log_prob(NgramKey{a, a}, std::log(0.4));
  try {
    backoff_mass(m, ha);
    FAIL("expected a degenerate-backoff error");
  } catch (const DegenerateBackoffError &e) {
    CHECK(e.history() == "a");
  }
}

TEST_CASE("recompute_backoff_weight") {
  CHECK(recompute_backoff_weight(0.5, 0.6) ==
        doctest::Approx(std::log(0.5 / 0.6)));
  CHECK(recompute_backoff_weight(0.37, 0.37) == 0.0);
  CHECK(recompute_backoff_weight(0.5 + 0.5, 0.6 + 0.4) == 0.0);
  CHECK_THROWS_AS(recompute_backoff_weight(0.0, 0.5),
                  NegativeBackoffMassError);
  CHECK_THROWS_AS(recompute_backoff_weight(-0.1, 0.5),
                  NegativeBackoffMassError);
  CHECK_THROWS_AS(recompute_backoff_weight(0.5, 0.0), DegenerateBackoffError);
  // Floored numerator for exhausted histories.
  CHECK(backoff_weight_for_mass({0.0, 0.5}) ==
        doctest::Approx(std::log(kBackoffMassFloor / 0.5)));
}

TEST_CASE("history_marginal") {
  BackoffModel m = two_word_model();
  CHECK(history_marginal(m, {}) == 0.0);
  const WordId hab[] = {0, 1};
  CHECK(history_marginal(m, hab) ==
        std::log(0.5) + conditional_prob(m, std::span(hab, 1), 1));

  Vocabulary v;
  v.add("a");
  v.add("b");
  BackoffModel q(1, v);
  q.insert(NgramKey{0}, {std::log(0.25), {}, false});
  q.insert(NgramKey{1}, {std::log(0.75), {}, false});
  const WordId ha[] = {0};
  CHECK(history_marginal(q, ha) == doctest::Approx(std::log(0.25)));
}

TEST_CASE("history_marginal substitutes the begin-token frequency") {
  Vocabulary v;
  WordId s = v.add("<s>"), e = v.add("</s>"), a = v.add("a");
  BackoffModel m(2, v);
  m.insert(NgramKey{s}, {-99.0 * std::log(10.0), {}, true});
  m.insert(NgramKey{e}, {std::log(0.25), {}, false});
  m.insert(NgramKey{a}, {std::log(0.75), {}, false});
  const WordId hs[] = {s};
  CHECK(history_marginal(m, hs) == doctest::Approx(std::log(0.25)));
  m.set_begin_marginal(0.2);
  CHECK(history_marginal(m, hs) == doctest::Approx(std::log(0.2)));
  const WordId hsa[] = {s, a};
  CHECK(history_marginal(m, hsa) ==
        history_marginal(m, hs) + conditional_prob(m, hs, a));
}

TEST_CASE("validate_model reports constructed violations") {
  BackoffModel m = two_word_model();
  CHECK(validate_model(m).ok());

  // p(b|a) doubled: the history a now sums to 1 + 0.6.
  m.set_log_prob(NgramKey{0, 1}, std::log(1.2));
  ValidationReport r = validate_model(m);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].kind == ValidationViolation::Kind::kNormalization);
  CHECK(r.violations[0].key == NgramKey{0});
  CHECK(r.violations[0].defect == doctest::Approx(0.6));

  Vocabulary v;
  v.add("a");
  v.add("b");
  BackoffModel open(3, v);
  open.insert(NgramKey{0}, {std::log(0.5), {}, false});
  open.insert(NgramKey{1}, {std::log(0.5), {}, false});
  open.insert(NgramKey{0, 1, 1}, {std::log(0.5), {}, false});
  ValidationReport r2 = validate_model(open);
  REQUIRE(!r2.ok());
  CHECK(r2.violations[0].kind == ValidationViolation::Kind::kMissingHistory);
  CHECK(r2.violations[0].key == NgramKey{0, 1});
}

TEST_CASE("model table maintenance") {
  BackoffModel m = two_word_model();
  CHECK(m.total_size() == 3);
  const WordId ha[] = {0};
  CHECK(m.continuations(ha).size() == 1);
  CHECK(m.erase(NgramKey{0, 1}));
  CHECK(!m.erase(NgramKey{0, 1}));
  CHECK(m.continuations(ha).empty());
  CHECK_THROWS(m.insert(NgramKey{0, 1, 1}, {0.0, {}, false}));
}

TEST_CASE("random models: normalization, weights and exact lookups") {
  std::mt19937_64 rng(17);
  testing::RandomModelOptions opts;
  int floored = 0;
  for (int trial = 0; trial < 300; ++trial) {
    BackoffModel m = testing::random_model(rng, opts);
    REQUIRE(validate_model(m).ok());
    for (const auto &h : testing::all_histories(m))
      CHECK(vocab_sum(m, h) == doctest::Approx(1.0).epsilon(1e-9));

    for (int n = 1; n < m.order(); ++n) {
      for (const NgramKey &h : m.sorted_keys(n)) {
        const NgramEntry *e = m.find(h);
        if (!e->log_bow) continue;
        BackoffMass mass = backoff_mass_unchecked(m, h.words());
        if (mass.numerator <= kMassTolerance) {
          ++floored;
          continue;
        }
        CHECK(std::abs(std::exp(*e->log_bow) * mass.denominator -
                       mass.numerator) <= 1e-12);
      }
    }
    for (int n = 1; n <= m.order(); ++n) {
      for (const NgramKey &k : m.sorted_keys(n)) {
        CHECK(conditional_prob(m, k.history(), k.word()) ==
              m.find(k)->log_prob);
        if (n < m.order())
          CHECK(history_marginal(m, k.words()) ==
                history_marginal(m, k.history()) +
                    (n == 1 && k.word() == m.vocab().begin_token()
                         ? std::log(*m.begin_marginal())
                         : conditional_prob(m, k.history(), k.word())));
      }
    }
  }
  CHECK(floored > 0);
}
