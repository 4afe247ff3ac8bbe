// arpa_io_test.cc

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
#include <fstream>
#include <random>
#include <sstream>

#include "ngram/arpa_io.h"
#include "ngram/backoff_model.h"
#include "ngram/error.h"
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

BackoffModel parse(const std::string &text) {
  std::istringstream in(text);
  return read_arpa(in);
}

std::string dump(const BackoffModel &m) {
  std::ostringstream out;
  write_arpa(m, out);
  return out.str();
}

int64_t parse_error_line(const std::string &text) {
  try {
    parse(text);
  } catch (const ParseError &e) {
    return e.line();
  }
  return -1;
}

void check_close(const BackoffModel &a, const BackoffModel &b, double tol) {
  REQUIRE(a.order() == b.order());
  // Ids may be assigned in a different order; match words by spelling.
  REQUIRE(a.vocab().size() == b.vocab().size());
  std::vector<WordId> to_b(a.vocab().size());
  for (size_t id = 0; id < to_b.size(); ++id) {
    std::optional<WordId> w = b.vocab().find(a.vocab().word(WordId(id)));
    REQUIRE(w);
    to_b[id] = *w;
  }
  const double ln10 = std::log(10.0);
  for (int n = 1; n <= a.order(); ++n) {
    REQUIRE(a.size(n) == b.size(n));
    for (const NgramKey &k : a.sorted_keys(n)) {
      std::vector<WordId> words;
      for (WordId w : k.words()) words.push_back(to_b[w]);
      const NgramEntry *x = a.find(k);
      const NgramEntry *y = b.find(NgramKey(std::span<const WordId>(words)));
      REQUIRE(y != nullptr);
      CHECK(x->placeholder == y->placeholder);
      if (!x->placeholder)
        CHECK(std::abs(x->log_prob - y->log_prob) / ln10 <= tol);
      CHECK(x->log_bow.has_value() == y->log_bow.has_value());
      if (x->log_bow && y->log_bow)
        CHECK(std::abs(*x->log_bow - *y->log_bow) / ln10 <= tol);
    }
  }
}

const char *kSmall =
    "\\data\\\n"
    "ngram 1=2\n"
    "ngram 2=2\n"
    "\n"
    "\\1-grams:\n"
    "-0.3010300 a -0.0969100\n"
    "-0.3010300 b\n"
    "\n"
    "\\2-grams:\n"
    "-0.2218487 a b\n"
    "-0.3979400 a a\n"
    "\n"
    "\\end\\\n";

}  // namespace

TEST_CASE("golden two-word fixture matches its hand table") {
  BackoffModel m = read_arpa_file(kData + "/two_word.arpa");
  REQUIRE(m.order() == 2);
  WordId a = *m.vocab().find("a"), b = *m.vocab().find("b");
  const WordId ha[] = {a}, hb[] = {b};
  const double tol = 1e-7;  // 7-decimal log10 fixture
  CHECK(std::exp(conditional_prob(m, {}, a)) == doctest::Approx(0.5).epsilon(tol));
  CHECK(std::exp(conditional_prob(m, {}, b)) == doctest::Approx(0.5).epsilon(tol));
  CHECK(std::exp(conditional_prob(m, ha, a)) == doctest::Approx(0.4).epsilon(tol));
  CHECK(std::exp(conditional_prob(m, ha, b)) == doctest::Approx(0.6).epsilon(tol));
  CHECK(std::exp(conditional_prob(m, hb, a)) == doctest::Approx(0.5).epsilon(tol));
  CHECK(std::exp(conditional_prob(m, hb, b)) == doctest::Approx(0.5).epsilon(tol));
}

TEST_CASE("golden fixture round trip is textually identical") {
  const std::string text = slurp(kData + "/two_word.arpa");
  CHECK(dump(parse(text)) == text);
  const std::string golden = slurp(kData + "/fixture100.o3k3.arpa");
  CHECK(dump(parse(golden)) == golden);
}

TEST_CASE("count mismatch names the line ending the section") {
  std::string text = kSmall;
  text.replace(text.find("ngram 2=2"), 9, "ngram 2=3");
  // Line 13 is the \end\ marker closing the bigram section.
  CHECK(parse_error_line(text) == 13);
}

TEST_CASE("malformed documents") {
  auto with = [](std::string from, std::string to) {
    std::string text = kSmall;
    text.replace(text.find(from), from.size(), to);
    return text;
  };
  CHECK(parse_error_line(with("-0.2218487 a b", "-0.2x18487 a b")) == 10);
  CHECK(parse_error_line(with("-0.3010300 a -0.0969100",
                              "-0.3010300 a -0.09z")) == 6);
  CHECK(parse_error_line(with("-0.3979400 a a", "-0.3979400 a b")) == 11);
  CHECK(parse_error_line(with("-0.3979400 a a", "-0.3979400 a c")) == 11);
  CHECK(parse_error_line(with("-0.3979400 a a", "-0.3979400 a a -0.1")) == 11);
  CHECK(parse_error_line(with("\\2-grams:", "\\3-grams:")) == 9);
  CHECK(parse_error_line(with("\\1-grams:", "\\2-grams:")) == 5);
  CHECK(parse_error_line(with("ngram 2=2\n", "")) > 0);
  CHECK(parse_error_line(with("\\end\\\n", "")) > 0);
  CHECK(parse_error_line("no header here\n") > 0);

  // Sections out of order.
  const char *swapped =
      "\\data\\\nngram 1=1\nngram 2=1\n\n"
      "\\2-grams:\n0 a a\n\n\\1-grams:\n0 a\n\n\\end\\\n";
  CHECK(parse_error_line(swapped) == 5);
}

TEST_CASE("separators, CRLF and leading text are tolerated") {
  std::string text = kSmall;
  std::string crlf;
  for (char c : text) {
    if (c == '\n') crlf += '\r';
    crlf += c;
  }
  std::string spaced = "comment line\n" + text;
  size_t p = spaced.find("-0.2218487 a b");
  spaced.replace(p, 14, "-0.2218487 \t a   b  ");
  BackoffModel a = parse(text);
  check_close(a, parse(crlf), 0.0);
  check_close(a, parse(spaced), 0.0);
}

TEST_CASE("unnormalized documents are rejected") {
  std::string text = kSmall;
  text.replace(text.find("-0.3979400 a a"), 14, "-0.1000000 a a");
  CHECK_THROWS_AS(parse(text), ParseError);
}

TEST_CASE("writer format") {
  Vocabulary v;
  v.add("a");
  BackoffModel m(1, v);
  m.insert(NgramKey{0}, {0.0, {}, false});
  CHECK(dump(m) ==
        "\\data\\\nngram 1=1\n\n\\1-grams:\n0.0000000\ta\n\n\\end\\\n");

  BackoffModel three = read_arpa_file(kData + "/fixture100.o3k3.arpa");
  std::string text = dump(three);
  size_t sections = 0;
  for (size_t pos = 0; (pos = text.find("-grams:\n", pos)) != std::string::npos;
       ++pos)
    ++sections;
  CHECK(sections == 3);
  CHECK(text.find("\\1-grams:") < text.find("\\2-grams:"));
  CHECK(text.find("\\2-grams:") < text.find("\\3-grams:"));
  CHECK(text.find("\\4-grams:") == std::string::npos);
  CHECK(text.find("-99\t<s>\t") != std::string::npos);
}

TEST_CASE("within a section records are sorted by word strings") {
  Vocabulary v;
  v.add("zeta");
  v.add("alpha");
  v.add("mid");
  BackoffModel m(1, v);
  m.insert(NgramKey{0}, {std::log(0.5), {}, false});
  m.insert(NgramKey{1}, {std::log(0.25), {}, false});
  m.insert(NgramKey{2}, {std::log(0.25), {}, false});
  std::string text = dump(m);
  CHECK(text.find("alpha") < text.find("mid"));
  CHECK(text.find("mid") < text.find("zeta"));
}

TEST_CASE("begin token placeholder") {
  BackoffModel m = read_arpa_file(kData + "/fixture100.o3k3.arpa");
  const NgramEntry *s = m.find(NgramKey{*m.vocab().begin_token()});
  REQUIRE(s);
  CHECK(s->placeholder);
  CHECK(!m.find(NgramKey{*m.vocab().end_token()})->placeholder);
}

TEST_CASE("random models round trip within print precision") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    BackoffModel m = testing::random_model(rng);
    std::string once = dump(m);
    BackoffModel back = parse(once);
    check_close(m, back, 1e-4);
    CHECK(dump(back) == once);
  }
}
