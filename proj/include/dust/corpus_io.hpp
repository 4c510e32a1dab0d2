/*
 * Copyright 2026 The dustkit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "dust/calibration.hpp"
#include "dust/error.hpp"
#include "dust/uncertainty.hpp"

namespace dust {

// Bundle wire format, one JSON object per line (LF separated, UTF-8):
//   {"id": "utt1", "ref": "...", "samples": ["...", ...], "truth": "..."}
// `truth` is optional (absent or null). Unknown keys are ignored.

enum class ParseMode { kStrict, kLenient };

struct ParseIssue {
  std::size_t line = 0;
  std::string message;
};

struct ReadResult {
  std::vector<HypothesisBundle> bundles;
  // Lenient mode only; strict mode throws on the first issue.
  std::vector<ParseIssue> issues;
};

namespace internal {

inline std::optional<std::string> ParseBundleLine(std::string_view line,
                                                  HypothesisBundle& out) {
  using nlohmann::json;
  const json j = json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded()) return "malformed JSON";
  if (!j.is_object()) return "record is not a JSON object";
  const auto field = [&](const char* name) -> const json* {
    const auto it = j.find(name);
    return it == j.end() ? nullptr : &*it;
  };
  const json* id = field("id");
  if (id == nullptr) return "missing field 'id'";
  if (!id->is_string() || id->get_ref<const std::string&>().empty()) {
    return "field 'id' must be a nonempty string";
  }
  const json* ref = field("ref");
  if (ref == nullptr) return "missing field 'ref'";
  if (!ref->is_string()) return "field 'ref' must be a string";
  const json* samples = field("samples");
  if (samples == nullptr) return "missing field 'samples'";
  if (!samples->is_array() || samples->empty()) {
    return "field 'samples' must be a nonempty array";
  }
  out.samples.clear();
  out.samples.reserve(samples->size());
  for (const auto& s : *samples) {
    if (!s.is_string()) return "field 'samples' must hold only strings";
    out.samples.push_back(s.get<std::string>());
  }
  out.truth.reset();
  if (const json* truth = field("truth"); truth != nullptr && !truth->is_null()) {
    if (!truth->is_string()) return "field 'truth' must be a string or null";
    out.truth = truth->get<std::string>();
  }
  out.id = id->get<std::string>();
  out.ref = ref->get<std::string>();
  return std::nullopt;
}

inline bool IsBlank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

}  // namespace internal

// Order-preserving. Blank lines are skipped. Throws kParse when the input
// holds no valid bundle, or (strict mode) on the first bad line.
inline ReadResult ReadBundles(std::istream& in,
                              ParseMode mode = ParseMode::kStrict) {
  ReadResult result;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (internal::IsBlank(line)) continue;
    HypothesisBundle bundle;
    std::optional<std::string> problem = internal::ParseBundleLine(line, bundle);
    if (!problem && !ids.insert(bundle.id).second) {
      problem = "duplicate id '" + bundle.id + "'";
    }
    if (problem) {
      if (mode == ParseMode::kStrict) {
        throw Error(ErrorCode::kParse,
                    "line " + std::to_string(line_no) + ": " + *problem);
      }
      result.issues.push_back({line_no, *problem});
      continue;
    }
    result.bundles.push_back(std::move(bundle));
  }
  if (in.bad()) throw Error(ErrorCode::kIo, "read failure");
  if (result.bundles.empty()) {
    throw Error(ErrorCode::kParse,
                line_no == 0 ? "empty input" : "no valid bundle records");
  }
  return result;
}

inline void WriteBundles(std::span<const HypothesisBundle> bundles,
                         std::ostream& out) {
  using nlohmann::ordered_json;
  for (const auto& b : bundles) {
    ordered_json j;
    j["id"] = b.id;
    j["ref"] = b.ref;
    j["samples"] = b.samples;
    if (b.truth) j["truth"] = *b.truth;
    out << j.dump(-1, ' ', false, ordered_json::error_handler_t::replace)
        << '\n';
  }
}

// One transcript per line; trailing CR stripped, blank lines skipped.
inline std::vector<std::string> ReadTruths(std::istream& in) {
  std::vector<std::string> truths;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (internal::IsBlank(line)) continue;
    truths.push_back(line);
  }
  if (in.bad()) throw Error(ErrorCode::kIo, "read failure");
  return truths;
}

// Report cells: 6 fractional digits, "nan" when undefined, "inf" for the
// accept-all-finite sweep endpoint and MaxUncertain scores.
inline std::string FormatDecimal(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

inline std::string CsvQuote(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline constexpr std::string_view kSweepHeader =
    "tau_or_fraction,mode,accepted_count,accepted_fraction,wer_aggregate,"
    "wer_mean,cer_aggregate,cer_mean";

inline void WriteSweep(std::span<const SweepPoint> points, std::ostream& out) {
  constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
  out << kSweepHeader << '\n';
  for (const auto& p : points) {
    out << (p.cutoff ? FormatDecimal(p.cutoff->ToDouble()) : "inf") << ','
        << SweepKindName(p.kind) << ',' << p.accepted_count << ','
        << FormatDecimal(p.accepted_fraction) << ','
        << FormatDecimal(p.wer ? p.wer->rate : kNan) << ','
        << FormatDecimal(p.wer ? p.wer->per_utterance_mean : kNan) << ','
        << FormatDecimal(p.cer ? p.cer->rate : kNan) << ','
        << FormatDecimal(p.cer ? p.cer->per_utterance_mean : kNan) << '\n';
  }
}

inline constexpr std::string_view kCalibrationSummaryHeader =
    "M,n,ece,mce,rce,cnf,acc";
inline constexpr std::string_view kCalibrationBinHeader =
    "index,lo,hi,count,mass,mean_conf,mean_acc";

// Summary header + row, then bin header + one row per bin (all M bins, in
// ascending confidence). Empty bins carry "nan" means.
inline void WriteCalibration(const CalibrationReport& report,
                             std::ostream& out) {
  constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
  out << kCalibrationSummaryHeader << '\n'
      << report.num_bins << ',' << report.n << ',' << FormatDecimal(report.ece)
      << ',' << FormatDecimal(report.mce) << ',' << FormatDecimal(report.rce)
      << ',' << FormatDecimal(report.mean_confidence) << ','
      << FormatDecimal(report.mean_accuracy) << '\n';
  out << kCalibrationBinHeader << '\n';
  for (const auto& b : report.bins) {
    const bool empty = b.count == 0;
    out << b.index << ',' << FormatDecimal(b.lo) << ',' << FormatDecimal(b.hi)
        << ',' << b.count << ',' << FormatDecimal(b.mass) << ','
        << FormatDecimal(empty ? kNan : b.mean_confidence) << ','
        << FormatDecimal(empty ? kNan : b.mean_accuracy) << '\n';
  }
}

// JSONL {"id", "pl"} for accepted utterances, in (pred_uncert, id) order.
inline void WriteAcceptedManifest(const FilterResult& result,
                                  std::span<const HypothesisBundle> bundles,
                                  std::ostream& out) {
  using nlohmann::ordered_json;
  std::unordered_map<std::string_view, const HypothesisBundle*> by_id;
  by_id.reserve(bundles.size());
  for (const auto& b : bundles) by_id.emplace(b.id, &b);
  for (const auto& id : result.accepted) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "accepted id '" + id + "' not in corpus");
    }
    ordered_json j;
    j["id"] = id;
    j["pl"] = it->second->ref;
    out << j.dump(-1, ' ', false, ordered_json::error_handler_t::replace)
        << '\n';
  }
}

inline constexpr std::string_view kScoresHeader =
    "id,num_samples,raw_edits,ref_len,pred_uncert,confidence,accepted";

// Per-utterance uncertainty in corpus order.
inline void WriteScores(const FilterResult& result, const Rational& tau,
                        std::ostream& out) {
  out << kScoresHeader << '\n';
  for (const auto& r : result.records) {
    out << CsvQuote(r.id) << ',' << r.num_samples << ','
        << r.pred_uncert.raw_edits << ',' << r.pred_uncert.ref_len << ','
        << FormatDecimal(r.pred_uncert.Value()) << ','
        << FormatDecimal(r.confidence) << ','
        << (Decide(r, tau).accepted ? 1 : 0) << '\n';
  }
}

// Minimal CSV reader for the report tables above (RFC 4180 quoting).
inline std::vector<std::vector<std::string>> ReadCsv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          cell.push_back(c);
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        row.push_back(std::move(cell));
        cell.clear();
      } else {
        cell.push_back(c);
      }
    }
    row.push_back(std::move(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace dust
