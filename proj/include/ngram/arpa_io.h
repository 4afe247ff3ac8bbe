// arpa_io.h

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

#ifndef NGRAM_ARPA_IO_H_
#define NGRAM_ARPA_IO_H_

#include <iosfwd>
#include <string>

#include "ngram/backoff_model.h"

namespace ngram {

// Values at or below this log10 probability on the begin-token unigram mark
// it as a placeholder.
inline constexpr double kArpaPlaceholderThreshold = -90.0;

struct ArpaReadOptions {
  // Largest tolerated |sum_w p(w|h) - 1| after parsing.  The default absorbs
  // the 7-decimal print precision of written models.  Negative disables the
  // normalization check; closure is always checked.
  double normalization_tolerance = 1e-4;
};

// Parses an ARPA backoff model.  Log10 values are converted to natural logs.
// Throws ParseError (with the offending line) on malformed input.
BackoffModel read_arpa(std::istream &in, const ArpaReadOptions &options = {});
BackoffModel read_arpa_file(const std::string &path,
                            const ArpaReadOptions &options = {});

// Writes sections 1..N, records sorted by word strings, values as log10 with
// 7 decimals, fields separated by single tabs, the begin-token placeholder as
// -99.  Output is a pure function of the model contents.
void write_arpa(const BackoffModel &model, std::ostream &out);
void write_arpa_file(const BackoffModel &model, const std::string &path);

// Fixed 7-decimal rendering of a natural-log value in log10, as written.
std::string format_log10(double natural_log);

}  // namespace ngram

#endif  // NGRAM_ARPA_IO_H_
