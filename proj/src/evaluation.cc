// evaluation.cc

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

#include "ngram/evaluation.h"

#include <cmath>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "ngram/error.h"

namespace ngram {

PerplexityReport perplexity(const BackoffModel &model, std::istream &corpus,
                            const PerplexityOptions &options) {
  const Vocabulary &vocab = model.vocab();
  const std::optional<WordId> begin = vocab.begin_token();
  const std::optional<WordId> end = vocab.end_token();
  if (!end) throw InvalidArgument("model has no end-of-sentence token");
  std::optional<WordId> unk;
  if (options.oov == OovPolicy::kUnk) {
    unk = vocab.unk_token();
    if (!unk) throw InvalidArgument("model has no <unk> token");
  }

  PerplexityReport report;
  long double total = 0.0L;
  std::string line, token;
  std::vector<WordId> history;
  int64_t line_number = 0;
  while (std::getline(corpus, line)) {
    ++line_number;
    std::istringstream words(line);
    std::vector<std::string> tokens;
    while (words >> token) tokens.push_back(token);
    if (!tokens.empty() && tokens.front() == kBeginToken) tokens.erase(tokens.begin());
    if (!tokens.empty() && tokens.back() == kEndToken) tokens.pop_back();
    tokens.emplace_back(kEndToken);

    history.clear();
    if (begin) history.push_back(*begin);
    for (size_t i = 0; i < tokens.size(); ++i) {
      const bool is_end = i + 1 == tokens.size();
      std::optional<WordId> id = is_end ? end : vocab.find(tokens[i]);
      if (!id && unk) id = unk;
      auto position = [&] {
        return "'" + tokens[i] + "' at line " + std::to_string(line_number) +
               ", token " + std::to_string(i + 1);
      };
      double log_p = 0.0;
      bool scored = false;
      if (id && *id != begin) {
        try {
          log_p = conditional_prob(model, history, *id);
          scored = true;
        } catch (const ZeroProbabilityError &) {
          if (options.oov == OovPolicy::kError)
            throw ZeroProbabilityError("zero probability for " + position());
        }
      } else if (options.oov == OovPolicy::kError) {
        throw ZeroProbabilityError("out-of-vocabulary word " + position());
      }
      if (!scored) {
        ++report.oov_count;
        history.clear();
        continue;
      }
      total += log_p;
      ++report.token_count;
      history.push_back(*id);
      if (history.size() >= static_cast<size_t>(model.order()))
        history.erase(history.begin());
    }
    ++report.sentence_count;
  }
  report.log_prob_total = static_cast<double>(total);
  if (report.token_count == 0) throw Error("no scored tokens in corpus");
  report.perplexity = static_cast<double>(
      std::exp(-total / static_cast<long double>(report.token_count)));
  return report;
}

CrossPerplexity cross_perplexity_exact(const BackoffModel &reference,
                                       const BackoffModel &evaluated,
                                       int64_t cell_limit) {
  if (!(reference.vocab() == evaluated.vocab()))
    throw InvalidArgument("models do not share a vocabulary");
  const int64_t v = static_cast<int64_t>(reference.vocab().size());
  const int hist_len = reference.order() - 1;
  long double cells = static_cast<long double>(v);
  for (int i = 0; i < hist_len; ++i) cells *= static_cast<long double>(v);
  if (cells > static_cast<long double>(cell_limit))
    throw InvalidArgument(
        "exact cross-perplexity needs " + std::to_string(static_cast<double>(cells)) +
        " (h,w) cells, above the limit of " + std::to_string(cell_limit) +
        "; use a sampled estimate for models of this size");

  // Odometer over all histories of length N-1.
  std::vector<WordId> history(hist_len, 0);
  long double total = 0.0L, compensation = 0.0L;
  while (true) {
    const long double p_h =
        std::exp(static_cast<long double>(history_marginal(reference, history)));
    for (WordId w = 0; w < static_cast<WordId>(v); ++w) {
      double log_p;
      try {
        log_p = conditional_prob(reference, history, w);
      } catch (const ZeroProbabilityError &) {
        continue;
      }
      const long double term = p_h * std::exp(static_cast<long double>(log_p)) *
                               conditional_prob(evaluated, history, w);
      // Neumaier summation.
      const long double t = total + term;
      compensation += std::fabs(total) >= std::fabs(term) ? (total - t) + term
                                                         : (term - t) + total;
      total = t;
    }
    int i = hist_len - 1;
    while (i >= 0 && ++history[i] == static_cast<WordId>(v)) history[i--] = 0;
    if (i < 0) break;
  }
  CrossPerplexity out;
  out.cross_entropy = -(total + compensation);
  out.perplexity = static_cast<double>(std::exp(out.cross_entropy));
  return out;
}

}  // namespace ngram
