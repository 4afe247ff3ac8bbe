// commands.h

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

#ifndef NGRAM_TOOLS_COMMANDS_H_
#define NGRAM_TOOLS_COMMANDS_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ngram/backoff_model.h"
#include "ngram/evaluation.h"
#include "ngram/pruning.h"

namespace ngram::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Entry point of the ngramkit tool.  Reports go to `out`, diagnostics to
// `err`; models and manifests go to the files named on the command line.
int run(int argc, const char *const *argv, std::ostream &out,
        std::ostream &err);

struct CompareRow {
  size_t k = 0;
  double pp_re = 0.0;
  double pp_sr = 0.0;
  Overlap overlap;
};

// Retains the top k N-grams of `orders` under each criterion and measures
// the perplexity of both pruned models on `text` (one sentence per line)
// together with the overlap of the two selections.  Candidates are scored
// once for all rows.
std::vector<CompareRow> compare_criteria(const BackoffModel &model,
                                         const std::string &text,
                                         const std::vector<size_t> &ks,
                                         const std::vector<int> &orders);

nlohmann::ordered_json to_json(const PruneReport &report);
nlohmann::ordered_json to_json(const PerplexityReport &report);

// Lowercase hex SHA-256 of a file's contents.
std::string file_sha256(const std::string &path);

}  // namespace ngram::cli

#endif  // NGRAM_TOOLS_COMMANDS_H_
