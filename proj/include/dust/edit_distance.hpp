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
#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dust/error.hpp"
#include "dust/rational.hpp"
#include "dust/tokenize.hpp"

namespace dust {

// Unit-cost Levenshtein distance over any two random-access sequences whose
// elements compare with ==. Two-row DP, O(min(|a|,|b|)) memory.
template <typename T>
std::size_t Levenshtein(std::span<const T> a, std::span<const T> b) {
  if (a.size() < b.size()) std::swap(a, b);
  // b is now the shorter side and indexes the row.
  const std::size_t n = b.size();
  if (n == 0) return a.size();
  std::vector<std::size_t> row(n + 1);
  for (std::size_t j = 0; j <= n; ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    const T& ai = a[i - 1];
    for (std::size_t j = 1; j <= n; ++j) {
      const std::size_t up = row[j];
      const std::size_t sub = diag + (ai == b[j - 1] ? 0 : 1);
      row[j] = std::min({up + 1, row[j - 1] + 1, sub});
      diag = up;
    }
  }
  return row[n];
}

inline std::size_t EditDistance(const TokenSequence& a, const TokenSequence& b) {
  if (a.unit() != b.unit()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("token unit mismatch: ") + TokenUnitName(a.unit()) +
                    " vs " + TokenUnitName(b.unit()));
  }
  return Levenshtein(std::span<const std::string>(a.tokens()),
                     std::span<const std::string>(b.tokens()));
}

// raw_edits / ref_len, kept as two integers. A nonzero edit count against an
// empty reference is the MaxUncertain sentinel and orders above every finite
// score.
struct EditScore {
  std::uint64_t raw_edits = 0;
  std::uint64_t ref_len = 0;

  bool IsMaxUncertain() const { return ref_len == 0 && raw_edits > 0; }

  // nullopt for MaxUncertain.
  std::optional<Rational> AsRational() const {
    if (IsMaxUncertain()) return std::nullopt;
    if (ref_len == 0) return Rational(0);
    return Rational(static_cast<std::int64_t>(raw_edits),
                    static_cast<std::int64_t>(ref_len));
  }

  // +inf for MaxUncertain.
  double Value() const {
    if (IsMaxUncertain()) return std::numeric_limits<double>::infinity();
    if (ref_len == 0) return 0.0;
    return static_cast<double>(raw_edits) / static_cast<double>(ref_len);
  }

  // Compares normalized values, not the (edits, len) pairs: 3/5 == 6/10.
  friend std::strong_ordering operator<=>(const EditScore& a,
                                          const EditScore& b) {
    const bool a_max = a.IsMaxUncertain();
    const bool b_max = b.IsMaxUncertain();
    if (a_max || b_max) return a_max <=> b_max;
    const std::uint64_t a_den = a.ref_len == 0 ? 1 : a.ref_len;
    const std::uint64_t b_den = b.ref_len == 0 ? 1 : b.ref_len;
    const unsigned __int128 lhs =
        static_cast<unsigned __int128>(a.raw_edits) * b_den;
    const unsigned __int128 rhs =
        static_cast<unsigned __int128>(b.raw_edits) * a_den;
    return lhs <=> rhs;
  }
  friend bool operator==(const EditScore& a, const EditScore& b) {
    return (a <=> b) == 0;
  }

  friend std::strong_ordering operator<=>(const EditScore& s,
                                          const Rational& r) {
    if (s.IsMaxUncertain()) return std::strong_ordering::greater;
    if (r.num() < 0) return std::strong_ordering::greater;
    const std::uint64_t den = s.ref_len == 0 ? 1 : s.ref_len;
    const unsigned __int128 lhs =
        static_cast<unsigned __int128>(s.raw_edits) *
        static_cast<std::uint64_t>(r.den());
    const unsigned __int128 rhs =
        static_cast<unsigned __int128>(static_cast<std::uint64_t>(r.num())) * den;
    return lhs <=> rhs;
  }
  friend bool operator==(const EditScore& s, const Rational& r) {
    return (s <=> r) == 0;
  }
};

inline EditScore NormalizedEds(const TokenSequence& ref,
                               const TokenSequence& hyp) {
  return EditScore{EditDistance(ref, hyp), ref.size()};
}

// Same formula with the ground truth as denominator owner.
inline EditScore UtteranceErrorRate(const TokenSequence& truth,
                                    const TokenSequence& hyp) {
  return NormalizedEds(truth, hyp);
}

struct CorpusErrorRate {
  std::uint64_t total_edits = 0;
  std::uint64_t total_ref_tokens = 0;
  std::size_t utterances = 0;
  // Pairs skipped because the truth was empty.
  std::size_t excluded_empty_truths = 0;
  // total_edits / total_ref_tokens; the headline number.
  double rate = 0.0;
  double per_utterance_mean = 0.0;

  Rational ExactRate() const {
    return Rational(static_cast<std::int64_t>(total_edits),
                    static_cast<std::int64_t>(total_ref_tokens));
  }
};

// Streaming form of CorpusErrorRateOf, shared with the sweeps.
class ErrorRateAccumulator {
 public:
  void Add(const EditScore& score) {
    if (score.ref_len == 0) {
      ++excluded_;
      return;
    }
    edits_ += score.raw_edits;
    ref_tokens_ += score.ref_len;
    normalized_sum_ += score.Value();
    ++count_;
  }

  bool Defined() const { return count_ > 0; }

  CorpusErrorRate Finish() const {
    if (count_ == 0) {
      throw Error(ErrorCode::kUndefinedRate,
                  "corpus error rate over zero scorable utterances");
    }
    CorpusErrorRate out;
    out.total_edits = edits_;
    out.total_ref_tokens = ref_tokens_;
    out.utterances = count_;
    out.excluded_empty_truths = excluded_;
    out.rate = static_cast<double>(edits_) / static_cast<double>(ref_tokens_);
    out.per_utterance_mean = normalized_sum_ / static_cast<double>(count_);
    return out;
  }

 private:
  std::uint64_t edits_ = 0;
  std::uint64_t ref_tokens_ = 0;
  double normalized_sum_ = 0.0;
  std::size_t count_ = 0;
  std::size_t excluded_ = 0;
};

// pairs are (truth, hyp). Throws kUndefinedRate when no pair has a nonempty
// truth, kInvalidArgument when units are mixed.
inline CorpusErrorRate CorpusErrorRateOf(
    std::span<const std::pair<TokenSequence, TokenSequence>> pairs) {
  ErrorRateAccumulator acc;
  for (const auto& [truth, hyp] : pairs) {
    if (truth.unit() != pairs.front().first.unit()) {
      throw Error(ErrorCode::kInvalidArgument, "pairs mix token units");
    }
    acc.Add(UtteranceErrorRate(truth, hyp));
  }
  return acc.Finish();
}

}  // namespace dust
