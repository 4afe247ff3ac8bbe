// arpa_io.cc

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

#include "ngram/arpa_io.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <string_view>
#include <vector>

#include "ngram/error.h"

namespace ngram {

namespace {

std::string_view trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

void split_fields(std::string_view line, std::vector<std::string_view> *out) {
  out->clear();
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out->push_back(line.substr(i, j - i));
    i = j;
  }
}

bool parse_double(std::string_view s, double *value) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *value);
  return ec == std::errc() && ptr == s.data() + s.size() &&
         std::isfinite(*value);
}

bool parse_int(std::string_view s, int64_t *value) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *value);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// Parses "\N-grams:" into N; returns 0 if the line is not a section header.
int section_order(std::string_view line) {
  if (line.size() < 9 || line.front() != '\\' || !line.ends_with("-grams:"))
    return 0;
  int64_t n = 0;
  if (!parse_int(line.substr(1, line.size() - 8), &n) || n < 1) return 0;
  return static_cast<int>(n);
}

class ArpaReader {
 public:
  explicit ArpaReader(std::istream &in) : in_(in) {}

  BackoffModel read(const ArpaReadOptions &options);

 private:
  bool next_line() {
    if (!std::getline(in_, line_)) return false;
    ++line_number_;
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    return true;
  }
  [[noreturn]] void fail(const std::string &message) const {
    throw ParseError(message, line_number_);
  }

  std::istream &in_;
  std::string line_;
  int64_t line_number_ = 0;
};

BackoffModel ArpaReader::read(const ArpaReadOptions &options) {
  bool found_data = false;
  while (next_line()) {
    if (trim(line_) == "\\data\\") {
      found_data = true;
      break;
    }
  }
  if (!found_data) throw ParseError("missing \\data\\ header", line_number_);

  std::vector<int64_t> declared;
  bool have_line = false;
  while (next_line()) {
    std::string_view s = trim(line_);
    if (s.empty()) continue;
    if (s.front() == '\\') {
      have_line = true;
      break;
    }
    if (!s.starts_with("ngram ")) fail("expected 'ngram N=count'");
    std::string_view spec = trim(s.substr(6));
    size_t eq = spec.find('=');
    int64_t n = 0, count = 0;
    if (eq == std::string_view::npos || !parse_int(trim(spec.substr(0, eq)), &n) ||
        !parse_int(trim(spec.substr(eq + 1)), &count) || count < 0)
      fail("malformed count line '" + std::string(s) + "'");
    if (n != static_cast<int64_t>(declared.size()) + 1)
      fail("N-gram orders in header are not contiguous from 1");
    declared.push_back(count);
  }
  if (declared.empty()) fail("header declares no N-gram counts");
  if (declared.size() > static_cast<size_t>(kMaxOrder))
    fail("model order exceeds the supported maximum");
  if (!have_line) fail("unexpected end of input after header");

  const int order = static_cast<int>(declared.size());
  Vocabulary vocab;
  // The vocabulary is only complete after the unigram section, so records
  // are buffered per order as (words, log10 prob, log10 bow).
  struct Record {
    NgramKey key;
    double log_prob;
    std::optional<double> log_bow;
    int64_t line;
  };
  std::vector<std::vector<Record>> records(order);
  std::vector<std::string_view> fields;
  std::vector<WordId> ids;

  int expected = 1;
  bool ended = false;
  while (!ended) {
    std::string_view s = trim(line_);
    if (s == "\\end\\") {
      if (expected != order + 1)
        fail("\\end\\ before all declared sections were read");
      ended = true;
      break;
    }
    int n = section_order(s);
    if (n == 0) fail("expected a section header, got '" + std::string(s) + "'");
    if (n > order)
      fail("section of order " + std::to_string(n) +
           " exceeds declared maximum order " + std::to_string(order));
    if (n != expected) fail("section \\" + std::to_string(n) +
                            "-grams: out of order");
    int64_t count = 0;
    bool header_next = false;
    while (next_line()) {
      std::string_view r = trim(line_);
      if (r.empty()) continue;
      if (r.front() == '\\') {
        header_next = true;
        break;
      }
      split_fields(r, &fields);
      if (fields.size() != static_cast<size_t>(n) + 1 &&
          fields.size() != static_cast<size_t>(n) + 2)
        fail("expected " + std::to_string(n) + " words in " +
             std::to_string(n) + "-gram record");
      double log10_prob = 0.0;
      if (!parse_double(fields[0], &log10_prob))
        fail("non-numeric probability '" + std::string(fields[0]) + "'");
      std::optional<double> log10_bow;
      if (fields.size() == static_cast<size_t>(n) + 2) {
        double bow = 0.0;
        if (!parse_double(fields.back(), &bow))
          fail("non-numeric backoff weight '" + std::string(fields.back()) +
               "'");
        if (n == order) fail("backoff weight on a highest-order N-gram");
        log10_bow = bow;
      }
      ids.clear();
      for (int i = 1; i <= n; ++i) {
        if (n == 1) {
          if (vocab.find(fields[i])) fail("duplicate N-gram '" +
                                          std::string(fields[i]) + "'");
          ids.push_back(vocab.add(fields[i]));
        } else {
          std::optional<WordId> id = vocab.find(fields[i]);
          if (!id)
            fail("word '" + std::string(fields[i]) +
                 "' missing from the unigram section");
          ids.push_back(*id);
        }
      }
      records[n - 1].push_back({NgramKey(ids), log10_prob, log10_bow,
                                line_number_});
      ++count;
    }
    if (!header_next) fail("unexpected end of input, missing \\end\\");
    if (count != declared[n - 1])
      fail("section \\" + std::to_string(n) + "-grams: has " +
           std::to_string(count) + " records but the header declares " +
           std::to_string(declared[n - 1]));
    ++expected;
  }

  const double ln10 = std::numbers::ln10;
  BackoffModel model(order, std::move(vocab));
  const std::optional<WordId> begin = model.vocab().begin_token();
  for (int n = 1; n <= order; ++n) {
    for (const Record &rec : records[n - 1]) {
      NgramEntry entry;
      entry.log_prob = rec.log_prob * ln10;
      if (rec.log_bow) entry.log_bow = *rec.log_bow * ln10;
      entry.placeholder = n == 1 && rec.key.word() == begin &&
                          rec.log_prob <= kArpaPlaceholderThreshold;
      try {
        model.insert(rec.key, entry);
      } catch (const InvalidArgument &e) {
        throw ParseError(e.what(), rec.line);
      }
    }
    records[n - 1].clear();
    records[n - 1].shrink_to_fit();
  }

  ValidationReport report =
      validate_model(model, options.normalization_tolerance < 0
                                ? std::numeric_limits<double>::infinity()
                                : options.normalization_tolerance);
  for (const ValidationViolation &v : report.violations) {
    if (v.kind == ValidationViolation::Kind::kMissingHistory)
      throw ParseError("history '" + model.vocab().to_string(v.key.words()) +
                           "' of a longer N-gram is missing",
                       0);
    throw ParseError("distribution after '" +
                         model.vocab().to_string(v.key.words()) +
                         "' sums to 1" + (v.defect >= 0 ? "+" : "") +
                         std::to_string(v.defect),
                     0);
  }
  return model;
}

}  // namespace

BackoffModel read_arpa(std::istream &in, const ArpaReadOptions &options) {
  return ArpaReader(in).read(options);
}

BackoffModel read_arpa_file(const std::string &path,
                            const ArpaReadOptions &options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  return read_arpa(in, options);
}

std::string format_log10(double natural_log) {
  char buf[64];
  double value = natural_log / std::numbers::ln10;
  auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, 7);
  std::string out(buf, ptr);
  if (out == "-0.0000000") out = "0.0000000";
  return out;
}

void write_arpa(const BackoffModel &model, std::ostream &out) {
  const Vocabulary &vocab = model.vocab();
  out << "\\data\\\n";
  for (int n = 1; n <= model.order(); ++n)
    out << "ngram " << n << '=' << model.size(n) << '\n';
  for (int n = 1; n <= model.order(); ++n) {
    out << "\n\\" << n << "-grams:\n";
    std::vector<NgramKey> keys = model.sorted_keys(n);
    std::sort(keys.begin(), keys.end(),
              [&](const NgramKey &a, const NgramKey &b) {
                return std::lexicographical_compare(
                    a.words().begin(), a.words().end(), b.words().begin(),
                    b.words().end(), [&](WordId x, WordId y) {
                      return vocab.word(x) < vocab.word(y);
                    });
              });
    for (const NgramKey &key : keys) {
      const NgramEntry &entry = *model.find(key);
      if (n == 1 && entry.placeholder)
        out << "-99";
      else
        out << format_log10(entry.log_prob);
      out << '\t' << vocab.to_string(key.words());
      if (entry.log_bow) out << '\t' << format_log10(*entry.log_bow);
      out << '\n';
    }
  }
  out << "\n\\end\\\n";
}

void write_arpa_file(const BackoffModel &model, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_arpa(model, out);
  out.flush();
  if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace ngram
