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

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "dust/edit_distance.hpp"
#include "dust/error.hpp"
#include "dust/parallel.hpp"
#include "dust/rational.hpp"
#include "dust/tokenize.hpp"

namespace dust {

// One unlabeled utterance: the no-dropout reference decode, T dropout-sampled
// decodes, and optionally the true transcript. Filtering never reads `truth`.
struct HypothesisBundle {
  std::string id;
  std::string ref;
  std::vector<std::string> samples;
  std::optional<std::string> truth;

  friend bool operator==(const HypothesisBundle&,
                         const HypothesisBundle&) = default;
};

struct UncertaintyRecord {
  std::string id;
  std::size_t num_samples = 0;
  TokenUnit unit = TokenUnit::kWord;
  std::vector<EditScore> per_sample_eds;
  // Largest per-sample score.
  EditScore pred_uncert;
  // max(0, 1 - pred_uncert); zero for MaxUncertain.
  double confidence = 0.0;
};

struct FilterDecision {
  std::string id;
  Rational tau;
  bool accepted = false;
};

struct ScoringOptions {
  TokenUnit unit = TokenUnit::kWord;
  NormalizationOptions norm;
  // 0 picks hardware concurrency. Results never depend on it.
  unsigned threads = 1;
};

inline double ConfidenceOf(const EditScore& pred_uncert) {
  if (pred_uncert.IsMaxUncertain()) return 0.0;
  return std::max(0.0, 1.0 - pred_uncert.Value());
}

inline UncertaintyRecord PredictiveUncertainty(
    const HypothesisBundle& bundle, TokenUnit unit,
    const NormalizationOptions& opts = {}) {
  if (bundle.samples.empty()) {
    throw Error(ErrorCode::kValidation,
                "bundle '" + bundle.id + "' has no sampled hypotheses");
  }
  UncertaintyRecord rec;
  rec.id = bundle.id;
  rec.num_samples = bundle.samples.size();
  rec.unit = unit;
  const TokenSequence ref = Tokenize(bundle.ref, unit, opts);
  rec.per_sample_eds.reserve(bundle.samples.size());
  for (const auto& sample : bundle.samples) {
    rec.per_sample_eds.push_back(NormalizedEds(ref, Tokenize(sample, unit, opts)));
  }
  rec.pred_uncert =
      *std::max_element(rec.per_sample_eds.begin(), rec.per_sample_eds.end());
  rec.confidence = ConfidenceOf(rec.pred_uncert);
  return rec;
}

// Accepted iff pred_uncert <= tau; ties at the threshold are accepted.
inline FilterDecision Decide(const UncertaintyRecord& record,
                             const Rational& tau) {
  if (tau < Rational(0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "negative threshold " + tau.ToString());
  }
  return FilterDecision{record.id, tau, record.pred_uncert <= tau};
}

// Nonempty corpus, nonempty unique ids, T >= 1 everywhere.
inline void ValidateCorpus(std::span<const HypothesisBundle> corpus) {
  if (corpus.empty()) {
    throw Error(ErrorCode::kValidation, "empty corpus");
  }
  std::unordered_set<std::string_view> seen;
  seen.reserve(corpus.size());
  for (const auto& b : corpus) {
    if (b.id.empty()) throw Error(ErrorCode::kValidation, "bundle with empty id");
    if (!seen.insert(b.id).second) {
      throw Error(ErrorCode::kValidation, "duplicate id '" + b.id + "'");
    }
    if (b.samples.empty()) {
      throw Error(ErrorCode::kValidation,
                  "bundle '" + b.id + "' has no sampled hypotheses");
    }
  }
}

inline std::vector<UncertaintyRecord> ScoreCorpus(
    std::span<const HypothesisBundle> corpus, const ScoringOptions& opts) {
  ValidateCorpus(corpus);
  std::vector<UncertaintyRecord> records(corpus.size());
  ParallelFor(corpus.size(), opts.threads, [&](std::size_t i) {
    records[i] = PredictiveUncertainty(corpus[i], opts.unit, opts.norm);
  });
  return records;
}

// Indices ordered by (pred_uncert ascending, id ascending).
inline std::vector<std::size_t> RankByUncertainty(
    std::span<const UncertaintyRecord> records) {
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto c = records[a].pred_uncert <=> records[b].pred_uncert;
    if (c != 0) return c < 0;
    return records[a].id < records[b].id;
  });
  return order;
}

struct FilterResult {
  // Ordered by (pred_uncert, id).
  std::vector<std::string> accepted;
  // Corpus order.
  std::vector<std::string> rejected;
  // Corpus order.
  std::vector<UncertaintyRecord> records;
};

inline FilterResult FilterRecords(std::vector<UncertaintyRecord> records,
                                  const Rational& tau) {
  FilterResult out;
  for (std::size_t i : RankByUncertainty(records)) {
    if (Decide(records[i], tau).accepted) out.accepted.push_back(records[i].id);
  }
  for (const auto& r : records) {
    if (!(r.pred_uncert <= tau)) out.rejected.push_back(r.id);
  }
  out.records = std::move(records);
  return out;
}

inline FilterResult FilterCorpus(std::span<const HypothesisBundle> corpus,
                                 const Rational& tau,
                                 const ScoringOptions& opts) {
  if (tau < Rational(0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "negative threshold " + tau.ToString());
  }
  return FilterRecords(ScoreCorpus(corpus, opts), tau);
}

// Uncertainty records plus each reference decode's error against the truth
// in both units. Built once, shared by both sweep kinds.
struct EvaluatedCorpus {
  std::vector<UncertaintyRecord> records;
  std::vector<EditScore> word_errors;
  std::vector<EditScore> char_errors;
  std::vector<std::size_t> order;
};

inline void RequireTruth(std::span<const HypothesisBundle> corpus) {
  for (const auto& b : corpus) {
    if (!b.truth) {
      throw Error(ErrorCode::kEvaluationUnavailable,
                  "bundle '" + b.id + "' has no truth transcript");
    }
  }
}

inline EvaluatedCorpus EvaluateCorpus(std::span<const HypothesisBundle> corpus,
                                      const ScoringOptions& opts) {
  ValidateCorpus(corpus);
  RequireTruth(corpus);
  EvaluatedCorpus out;
  out.records.resize(corpus.size());
  out.word_errors.resize(corpus.size());
  out.char_errors.resize(corpus.size());
  ParallelFor(corpus.size(), opts.threads, [&](std::size_t i) {
    const auto& b = corpus[i];
    out.records[i] = PredictiveUncertainty(b, opts.unit, opts.norm);
    for (TokenUnit u : {TokenUnit::kWord, TokenUnit::kChar}) {
      const EditScore err = UtteranceErrorRate(Tokenize(*b.truth, u, opts.norm),
                                               Tokenize(b.ref, u, opts.norm));
      (u == TokenUnit::kWord ? out.word_errors : out.char_errors)[i] = err;
    }
  });
  out.order = RankByUncertainty(out.records);
  return out;
}

enum class SweepKind { kThreshold, kPercentage };

inline const char* SweepKindName(SweepKind kind) {
  return kind == SweepKind::kThreshold ? "tau" : "fraction";
}

struct SweepPoint {
  SweepKind kind = SweepKind::kThreshold;
  // tau or prefix fraction; nullopt marks the accept-all-finite endpoint.
  std::optional<Rational> cutoff;
  std::size_t accepted_count = 0;
  double accepted_fraction = 0.0;
  // nullopt when the accepted set has no scorable truth.
  std::optional<CorpusErrorRate> wer;
  std::optional<CorpusErrorRate> cer;
};

namespace internal {

// Walks the ranked corpus, emitting a point each time the prefix reaches the
// next requested length.
struct PrefixEvaluator {
  const EvaluatedCorpus& eval;
  ErrorRateAccumulator wer;
  ErrorRateAccumulator cer;
  std::size_t taken = 0;

  void Extend(std::size_t prefix) {
    for (; taken < prefix; ++taken) {
      const std::size_t i = eval.order[taken];
      wer.Add(eval.word_errors[i]);
      cer.Add(eval.char_errors[i]);
    }
  }

  SweepPoint Point(SweepKind kind, std::optional<Rational> cutoff) const {
    SweepPoint p;
    p.kind = kind;
    p.cutoff = cutoff;
    p.accepted_count = taken;
    p.accepted_fraction =
        static_cast<double>(taken) / static_cast<double>(eval.order.size());
    if (wer.Defined()) p.wer = wer.Finish();
    if (cer.Defined()) p.cer = cer.Finish();
    return p;
  }
};

inline void RequireAscending(std::span<const Rational> grid, const Rational& lo,
                             bool lo_inclusive, const char* what) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const bool low_ok = lo_inclusive ? grid[i] >= lo : grid[i] > lo;
    if (!low_ok || grid[i] > Rational(1)) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(what) + " value out of range: " +
                      grid[i].ToString());
    }
    if (i > 0 && !(grid[i - 1] < grid[i])) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(what) + " grid not strictly ascending at " +
                      grid[i].ToString());
    }
  }
}

}  // namespace internal

// One point per tau, accepted sets nested. With `terminal` a final point
// accepts every utterance whose uncertainty is finite.
inline std::vector<SweepPoint> ThresholdSweep(const EvaluatedCorpus& eval,
                                              std::span<const Rational> taus,
                                              bool terminal = true) {
  internal::RequireAscending(taus, Rational(0), true, "tau");
  internal::PrefixEvaluator walk{eval, {}, {}, 0};
  std::vector<SweepPoint> points;
  const std::size_t n = eval.order.size();
  std::size_t prefix = 0;
  for (const Rational& tau : taus) {
    while (prefix < n && eval.records[eval.order[prefix]].pred_uncert <= tau) {
      ++prefix;
    }
    walk.Extend(prefix);
    points.push_back(walk.Point(SweepKind::kThreshold, tau));
  }
  if (terminal) {
    while (prefix < n &&
           !eval.records[eval.order[prefix]].pred_uncert.IsMaxUncertain()) {
      ++prefix;
    }
    walk.Extend(prefix);
    points.push_back(walk.Point(SweepKind::kThreshold, std::nullopt));
  }
  return points;
}

// Lowest-uncertainty prefix of ceil(fraction * n) utterances per fraction.
inline std::vector<SweepPoint> PercentageSweep(
    const EvaluatedCorpus& eval, std::span<const Rational> fractions) {
  internal::RequireAscending(fractions, Rational(0), false, "fraction");
  internal::PrefixEvaluator walk{eval, {}, {}, 0};
  std::vector<SweepPoint> points;
  const auto n = static_cast<std::int64_t>(eval.order.size());
  for (const Rational& f : fractions) {
    const __int128 scaled = static_cast<__int128>(f.num()) * n;
    const auto prefix =
        static_cast<std::size_t>((scaled + f.den() - 1) / f.den());
    walk.Extend(prefix);
    points.push_back(walk.Point(SweepKind::kPercentage, f));
  }
  return points;
}

inline std::vector<SweepPoint> ThresholdSweep(
    std::span<const HypothesisBundle> corpus, std::span<const Rational> taus,
    const ScoringOptions& opts, bool terminal = true) {
  internal::RequireAscending(taus, Rational(0), true, "tau");
  return ThresholdSweep(EvaluateCorpus(corpus, opts), taus, terminal);
}

inline std::vector<SweepPoint> PercentageSweep(
    std::span<const HypothesisBundle> corpus,
    std::span<const Rational> fractions, const ScoringOptions& opts) {
  internal::RequireAscending(fractions, Rational(0), false, "fraction");
  return PercentageSweep(EvaluateCorpus(corpus, opts), fractions);
}

// 0, 1/20, ..., 1.
inline std::vector<Rational> DefaultTauGrid() {
  std::vector<Rational> grid;
  for (int k = 0; k <= 20; ++k) grid.emplace_back(k, 20);
  return grid;
}

}  // namespace dust
