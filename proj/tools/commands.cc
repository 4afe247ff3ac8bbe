// commands.cc

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

#include "commands.h"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "CLI11.hpp"
#include "ngram/arpa_io.h"
#include "ngram/error.h"
#include "ngram/estimation.h"

namespace ngram::cli {

namespace {

constexpr const char *kToolVersion = "1.0.0";

using Json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

Json file_record(const std::string &role, const std::string &path) {
  return Json{{"role", role}, {"path", path}, {"sha256", file_sha256(path)}};
}

void write_manifest(const std::string &path, const std::string &command,
                    const Json &flags, const Json &inputs, const Json &outputs) {
  Json manifest;
  manifest["tool"] = "ngramkit";
  manifest["version"] = kToolVersion;
  manifest["command"] = command;
  manifest["flags"] = flags;
  manifest["inputs"] = inputs;
  manifest["outputs"] = outputs;
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << manifest.dump(2) << '\n';
}

void print_report(std::ostream &out, const Json &report, bool json) {
  if (json) {
    out << report.dump(2) << '\n';
    return;
  }
  for (const auto &[key, value] : report.items()) {
    if (value.is_array()) {
      for (const Json &row : value) {
        if (!row.is_object()) {
          out << key << ": "
              << (row.is_string() ? row.get<std::string>() : row.dump()) << '\n';
          continue;
        }
        out << key << ':';
        for (const auto &[k, v] : row.items())
          out << ' ' << k << '=' << (v.is_string() ? v.get<std::string>() : v.dump());
        out << '\n';
      }
    } else {
      out << key << ": "
          << (value.is_string() ? value.get<std::string>() : value.dump())
          << '\n';
    }
  }
}

Criterion parse_criterion(const std::string &s) {
  if (s == "re") return Criterion::kRelativeEntropy;
  if (s == "sr") return Criterion::kSeymoreRosenfeld;
  throw UsageError("unknown criterion '" + s + "' (expected re or sr)");
}

OovPolicy parse_oov(const std::string &s) {
  if (s == "skip") return OovPolicy::kSkip;
  if (s == "unk") return OovPolicy::kUnk;
  if (s == "error") return OovPolicy::kError;
  throw UsageError("unknown OOV policy '" + s + "' (expected skip, unk or error)");
}

struct TrainFlags {
  std::string corpus, output;
  int order = 3;
  int cutoff = 7;
  bool no_discount = false;
  std::vector<int64_t> min_counts;
  bool unk = false;
  int64_t max_line_tokens = 100000;
  bool json = false;
};

int cmd_train(const TrainFlags &f, std::ostream &out, std::ostream &err) {
  CountOptions count_options;
  count_options.order = f.order;
  count_options.vocab_policy = f.unk ? VocabPolicy::kUnk : VocabPolicy::kClosed;
  count_options.max_line_tokens = f.max_line_tokens;
  std::ifstream corpus(f.corpus);
  if (!corpus) throw Error("cannot open '" + f.corpus + "' for reading");
  CountTable counts = count_ngrams(corpus, count_options);

  EstimateOptions estimate_options;
  estimate_options.cutoff = f.cutoff;
  estimate_options.discount = !f.no_discount;
  estimate_options.min_counts = f.min_counts;
  std::vector<std::string> warnings;
  BackoffModel model = estimate_model(counts, estimate_options, &warnings);
  write_arpa_file(model, f.output);
  for (const std::string &w : warnings) err << "warning: " << w << '\n';

  Json report;
  report["order"] = model.order();
  report["sentences"] = counts.sentence_count();
  report["tokens"] = counts.token_count();
  report["vocabulary"] = model.vocab().size();
  Json sizes = Json::array();
  for (int n = 1; n <= model.order(); ++n)
    sizes.push_back(Json{{"order", n}, {"count", model.size(n)}});
  report["ngrams"] = sizes;
  report["warnings"] = warnings;
  print_report(out, report, f.json);

  Json flags{{"corpus", f.corpus},           {"output", f.output},
             {"order", f.order},             {"cutoff", f.cutoff},
             {"no_discount", f.no_discount}, {"min_counts", f.min_counts},
             {"unk", f.unk},                 {"max_line_tokens", f.max_line_tokens}};
  write_manifest(f.output + ".manifest.json", "train", flags,
                 Json::array({file_record("corpus", f.corpus)}),
                 Json::array({file_record("model", f.output)}));
  return kExitOk;
}

struct PruneFlags {
  std::string model, output;
  std::optional<double> theta;
  std::optional<size_t> top_k;
  std::vector<double> sweep;
  std::string criterion = "re";
  std::vector<int> orders;
  bool theta_on_entropy = false;
  std::string sr_counts;
  int cutoff = 7;
  bool no_discount = false;
  std::string dump_candidates;
  std::string text;
  bool json = false;
};

std::string sweep_path(const std::string &prefix, double theta) {
  return prefix + ".theta_" + format_double(theta) + ".arpa";
}

int cmd_prune(const PruneFlags &f, std::ostream &out, std::ostream &err) {
  const int modes = (f.theta ? 1 : 0) + (f.top_k ? 1 : 0) + (f.sweep.empty() ? 0 : 1);
  if (modes != 1)
    throw UsageError("exactly one of --theta, --top-k or --sweep is required");
  const Criterion criterion = parse_criterion(f.criterion);
  if (!f.top_k && criterion != Criterion::kRelativeEntropy)
    throw UsageError("threshold pruning uses the relative-entropy criterion; "
                     "--criterion sr requires --top-k");
  if (f.theta && (std::isnan(*f.theta) || *f.theta < 0))
    throw UsageError("--theta must be >= 0");
  for (double t : f.sweep)
    if (std::isnan(t) || t < 0) throw UsageError("--sweep values must be >= 0");
  if (!f.text.empty() && f.sweep.empty())
    throw UsageError("--text is only used with --sweep");

  BackoffModel model = read_arpa_file(f.model);
  std::optional<CountTable> counts;
  std::optional<CountWeights> weights;
  if (!f.sr_counts.empty()) {
    std::ifstream corpus(f.sr_counts);
    if (!corpus) throw Error("cannot open '" + f.sr_counts + "' for reading");
    CountOptions co;
    co.order = model.order();
    counts.emplace(count_ngrams(corpus, co));
    weights.emplace(*counts, compute_discounts(*counts, f.cutoff, !f.no_discount),
                    model.vocab());
  }
  PruneOptions options;
  options.orders = f.orders;
  options.threshold_on_entropy = f.theta_on_entropy;
  options.weights = weights ? &*weights : nullptr;

  Json flags{{"model", f.model},
             {"output", f.output},
             {"theta", f.theta ? Json(*f.theta) : Json()},
             {"top_k", f.top_k ? Json(*f.top_k) : Json()},
             {"sweep", f.sweep},
             {"criterion", f.criterion},
             {"orders", f.orders},
             {"theta_on_entropy", f.theta_on_entropy},
             {"sr_counts", f.sr_counts},
             {"cutoff", f.cutoff},
             {"no_discount", f.no_discount},
             {"dump_candidates", f.dump_candidates},
             {"text", f.text}};
  Json inputs = Json::array({file_record("model", f.model)});
  if (!f.sr_counts.empty()) inputs.push_back(file_record("sr_counts", f.sr_counts));
  if (!f.text.empty()) inputs.push_back(file_record("text", f.text));
  Json outputs = Json::array();

  std::vector<PruneCandidate> candidates =
      score_candidates(model, f.orders, options.weights);

  if (!f.sweep.empty()) {
    std::string text = f.text.empty() ? std::string() : read_file(f.text);
    Json rows = Json::array();
    for (double theta : f.sweep) {
      PruneResult r = apply_threshold(model, candidates, theta, options);
      std::string path = sweep_path(f.output, theta);
      write_arpa_file(r.model, path);
      outputs.push_back(file_record("model", path));
      Json row{{"theta", theta}};
      for (const OrderSummary &s : r.report.orders)
        row["ngrams_" + std::to_string(s.order)] = s.retained;
      row["removed_delta_entropy"] = r.report.removed_delta_entropy;
      if (!text.empty()) {
        std::istringstream in(text);
        row["perplexity"] = perplexity(r.model, in).perplexity;
      }
      rows.push_back(row);
    }
    print_report(out, Json{{"criterion", "re"}, {"sweep", rows}}, f.json);
    write_manifest(f.output + ".manifest.json", "prune", flags, inputs, outputs);
    return kExitOk;
  }

  PruneResult result =
      f.top_k ? apply_top_k(model, std::move(candidates), criterion, *f.top_k, options)
              : apply_threshold(model, std::move(candidates), *f.theta, options);
  write_arpa_file(result.model, f.output);
  outputs.push_back(file_record("model", f.output));
  if (!f.dump_candidates.empty()) {
    std::ofstream dump(f.dump_candidates);
    if (!dump) throw Error("cannot open '" + f.dump_candidates + "' for writing");
    write_candidates_tsv(model, result.candidates, criterion, dump);
    dump.close();
    outputs.push_back(file_record("candidates", f.dump_candidates));
  }
  ValidationReport validation = validate_model(result.model, 1e-4);
  if (!validation.ok())
    err << "warning: pruned model has " << validation.violations.size()
        << " normalization violations\n";
  print_report(out, to_json(result.report), f.json);
  write_manifest(f.output + ".manifest.json", "prune", flags, inputs, outputs);
  return kExitOk;
}

struct PplFlags {
  std::string model, corpus, oov = "skip", manifest;
  bool json = false;
};

int cmd_ppl(const PplFlags &f, std::ostream &out) {
  PerplexityOptions options;
  options.oov = parse_oov(f.oov);
  BackoffModel model = read_arpa_file(f.model);
  std::ifstream corpus(f.corpus);
  if (!corpus) throw Error("cannot open '" + f.corpus + "' for reading");
  PerplexityReport report = perplexity(model, corpus, options);
  print_report(out, to_json(report), f.json);
  if (!f.manifest.empty())
    write_manifest(f.manifest, "ppl",
                   Json{{"model", f.model}, {"corpus", f.corpus}, {"oov", f.oov}},
                   Json::array({file_record("model", f.model),
                                file_record("corpus", f.corpus)}),
                   Json::array());
  return kExitOk;
}

struct CompareFlags {
  std::string model, text, manifest;
  std::vector<size_t> ks;
  std::vector<int> orders;
  bool json = false;
};

int cmd_compare(const CompareFlags &f, std::ostream &out) {
  if (f.ks.empty()) throw UsageError("--k needs at least one value");
  BackoffModel model = read_arpa_file(f.model);
  std::vector<CompareRow> rows =
      compare_criteria(model, read_file(f.text), f.ks, f.orders);
  Json table = Json::array();
  for (const CompareRow &r : rows)
    table.push_back(Json{{"k", r.k},
                         {"pp_re", r.pp_re},
                         {"pp_sr", r.pp_sr},
                         {"overlap", r.overlap.count},
                         {"overlap_fraction", r.overlap.fraction}});
  if (f.json) {
    out << Json{{"rows", table}}.dump(2) << '\n';
  } else {
    out << "k\tPP_RE\tPP_SR\toverlap\toverlap_fraction\n";
    for (const CompareRow &r : rows)
      out << r.k << '\t' << format_double(r.pp_re) << '\t'
          << format_double(r.pp_sr) << '\t' << r.overlap.count << '\t'
          << format_double(r.overlap.fraction) << '\n';
  }
  if (!f.manifest.empty())
    write_manifest(f.manifest, "compare",
                   Json{{"model", f.model}, {"text", f.text}, {"k", f.ks},
                        {"orders", f.orders}},
                   Json::array({file_record("model", f.model),
                                file_record("text", f.text)}),
                   Json::array());
  return kExitOk;
}

}  // namespace

std::string file_sha256(const std::string &path) {
  std::string data = read_file(path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(),
                 nullptr) != 1)
    throw Error("SHA-256 computation failed");
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i)
    hex << std::hex << std::setw(2) << std::setfill('0')
        << static_cast<int>(digest[i]);
  return hex.str();
}

nlohmann::ordered_json to_json(const PruneReport &report) {
  Json j;
  j["criterion"] = criterion_name(report.criterion);
  if (report.mode == PruneReport::Mode::kThreshold) {
    j["mode"] = "threshold";
    j["theta"] = report.threshold;
    j["theta_on"] = report.threshold_on_entropy ? "delta_entropy" : "rel_ppl_increase";
  } else {
    j["mode"] = "top_k";
    j["k"] = report.k;
  }
  Json orders = Json::array();
  for (const OrderSummary &s : report.orders)
    orders.push_back(Json{{"order", s.order},
                          {"original", s.original},
                          {"retained", s.retained},
                          {"removed", s.removed},
                          {"protected_extra", s.protected_extra}});
  j["orders"] = orders;
  j["removed_delta_entropy"] = report.removed_delta_entropy;
  j["estimated_rel_ppl_increase"] = std::expm1(report.removed_delta_entropy);
  j["duration_seconds"] = report.duration_seconds;
  return j;
}

nlohmann::ordered_json to_json(const PerplexityReport &report) {
  Json j;
  j["log_prob_total"] = report.log_prob_total;
  j["token_count"] = report.token_count;
  j["oov_count"] = report.oov_count;
  j["sentence_count"] = report.sentence_count;
  j["perplexity"] = report.perplexity;
  j["normalization"] = "words + </s>, excluding <s> and skipped tokens";
  return j;
}

std::vector<CompareRow> compare_criteria(const BackoffModel &model,
                                         const std::string &text,
                                         const std::vector<size_t> &ks,
                                         const std::vector<int> &orders) {
  PruneOptions options;
  options.orders = orders;
  const std::vector<PruneCandidate> candidates = score_candidates(model, orders);
  auto pp = [&](const BackoffModel &m) {
    std::istringstream in(text);
    return perplexity(m, in).perplexity;
  };
  std::vector<CompareRow> rows;
  for (size_t k : ks) {
    PruneResult re = apply_top_k(model, candidates, Criterion::kRelativeEntropy, k, options);
    PruneResult sr = apply_top_k(model, candidates, Criterion::kSeymoreRosenfeld, k, options);
    CompareRow row;
    row.k = k;
    row.pp_re = pp(re.model);
    row.pp_sr = pp(sr.model);
    row.overlap = selection_overlap(re.selected, sr.selected);
    rows.push_back(row);
  }
  return rows;
}

int run(int argc, const char *const *argv, std::ostream &out,
        std::ostream &err) {
  CLI::App app{"ngramkit: backoff N-gram training, entropy-based pruning and "
               "evaluation"};
  app.require_subcommand(1);

  TrainFlags train;
  CLI::App *train_cmd = app.add_subcommand("train", "Estimate a Katz backoff model");
  train_cmd->add_option("corpus", train.corpus, "Training text, one sentence per line")
      ->required();
  train_cmd->add_option("-o,--output", train.output, "Output ARPA file")->required();
  train_cmd->add_option("--order", train.order, "N-gram order")
      ->check(CLI::Range(1, kMaxOrder))->capture_default_str();
  train_cmd->add_option("--cutoff", train.cutoff, "Good-Turing cutoff k")
      ->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_flag("--no-discount", train.no_discount,
                      "Maximum-likelihood estimates (no discounting)");
  train_cmd->add_option("--min-counts", train.min_counts,
                        "Minimum count per order, comma separated (default 1)")
      ->delimiter(',');
  train_cmd->add_flag("--unk", train.unk, "Reserve <unk> for unseen words");
  train_cmd->add_option("--max-line-tokens", train.max_line_tokens,
                        "Reject sentences longer than this")
      ->capture_default_str();
  train_cmd->add_flag("--json", train.json, "JSON report");

  PruneFlags prune;
  CLI::App *prune_cmd = app.add_subcommand(
      "prune",
      "Prune a model.  --theta bounds the relative training-set perplexity "
      "increase exp(D)-1 of each removed N-gram (--theta-on-entropy: D itself)");
  prune_cmd->add_option("model", prune.model, "Input ARPA model")->required();
  prune_cmd->add_option("-o,--output", prune.output,
                        "Output ARPA file (file prefix with --sweep)")
      ->required();
  prune_cmd->add_option("--theta", prune.theta, "Relative perplexity threshold");
  prune_cmd->add_option("--top-k", prune.top_k, "Retain the K best N-grams");
  prune_cmd->add_option("--sweep", prune.sweep,
                        "Comma-separated thresholds; writes one model per value")
      ->delimiter(',');
  prune_cmd->add_option("--criterion", prune.criterion, "re or sr")
      ->capture_default_str();
  prune_cmd->add_option("--orders", prune.orders,
                        "Orders to prune, comma separated (default all >= 2)")
      ->delimiter(',');
  prune_cmd->add_flag("--theta-on-entropy", prune.theta_on_entropy,
                      "Compare theta with D instead of exp(D)-1");
  prune_cmd->add_option("--sr-counts", prune.sr_counts,
                        "Corpus whose discounted counts weight the SR criterion "
                        "(default: model probability p(w,h))");
  prune_cmd->add_option("--cutoff", prune.cutoff, "Good-Turing cutoff for --sr-counts")
      ->check(CLI::PositiveNumber)->capture_default_str();
  prune_cmd->add_flag("--no-discount", prune.no_discount,
                      "Raw counts for --sr-counts");
  prune_cmd->add_option("--dump-candidates", prune.dump_candidates,
                        "Write scored candidates as TSV");
  prune_cmd->add_option("--text", prune.text,
                        "With --sweep: report perplexity of each model on this text");
  prune_cmd->add_flag("--json", prune.json, "JSON report");

  PplFlags ppl;
  CLI::App *ppl_cmd = app.add_subcommand("ppl", "Test-set perplexity");
  ppl_cmd->add_option("model", ppl.model, "ARPA model")->required();
  ppl_cmd->add_option("corpus", ppl.corpus, "Text, one sentence per line")->required();
  ppl_cmd->add_option("--oov", ppl.oov, "skip, unk or error")->capture_default_str();
  ppl_cmd->add_option("--manifest", ppl.manifest, "Write a manifest here");
  ppl_cmd->add_flag("--json", ppl.json, "JSON report");

  CompareFlags compare;
  CLI::App *compare_cmd = app.add_subcommand(
      "compare", "Top-K retention under RE and SR: perplexities and overlap");
  compare_cmd->add_option("model", compare.model, "ARPA model")->required();
  compare_cmd->add_option("--text", compare.text, "Evaluation text")->required();
  compare_cmd->add_option("--k", compare.ks, "Comma-separated retention sizes")
      ->delimiter(',')->required();
  compare_cmd->add_option("--orders", compare.orders,
                          "Orders to prune, comma separated (default all >= 2)")
      ->delimiter(',');
  compare_cmd->add_option("--manifest", compare.manifest, "Write a manifest here");
  compare_cmd->add_flag("--json", compare.json, "JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*train_cmd) return cmd_train(train, out, err);
    if (*prune_cmd) return cmd_prune(prune, out, err);
    if (*ppl_cmd) return cmd_ppl(ppl, out);
    if (*compare_cmd) return cmd_compare(compare, out);
  } catch (const UsageError &e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace ngram::cli
