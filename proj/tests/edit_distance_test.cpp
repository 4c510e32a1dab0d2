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

#include "dust/edit_distance.hpp"

#include <algorithm>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gtest/gtest.h"
#include "oracles.hpp"

namespace dust {
namespace {

constexpr char kTruth[] = "signs of ankylosing spondylitis detected";
constexpr char kRef[] = "signs of ankylosin spondylitis detected";
constexpr char kSample1[] = "sgns o ankylosin spondylitis detectd";
constexpr char kSample2[] = "sgns of avkclozin sondilietis detected";

TokenSequence W(const std::string& s) { return Tokenize(s, TokenUnit::kWord); }
TokenSequence C(const std::string& s) { return Tokenize(s, TokenUnit::kChar); }

std::vector<std::string> Letters(const std::string& s) {
  std::vector<std::string> out;
  for (char c : s) out.emplace_back(1, c);
  return out;
}

TEST(EditDistance, KittenSitting) {
  ASSERT_EQ(oracle::RecursiveEditDistance(Letters("kitten"), Letters("sitting")),
            3u);
  EXPECT_EQ(EditDistance(C("kitten"), C("sitting")), 3u);
}

TEST(EditDistance, Identity) {
  EXPECT_EQ(EditDistance(W(kRef), W(kRef)), 0u);
  EXPECT_EQ(EditDistance(C(""), C("")), 0u);
}

TEST(EditDistance, WorkedExampleWords) {
  EXPECT_EQ(EditDistance(W(kRef), W(kSample1)), 3u);
  EXPECT_EQ(EditDistance(W(kRef), W(kSample2)), 3u);
}

TEST(EditDistance, UnitMismatchIsInvalidArgument) {
  try {
    EditDistance(W("a b"), C("a b"));
    FAIL() << "expected an exception";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(NormalizedEds, WorkedExample) {
  const EditScore w1 = NormalizedEds(W(kRef), W(kSample1));
  const EditScore w2 = NormalizedEds(W(kRef), W(kSample2));
  EXPECT_EQ(*w1.AsRational(), Rational(3, 5));
  EXPECT_EQ(*w2.AsRational(), Rational(3, 5));
  const EditScore c1 = NormalizedEds(C(kRef), C(kSample1));
  const EditScore c2 = NormalizedEds(C(kRef), C(kSample2));
  EXPECT_EQ(c1.raw_edits, 3u);
  EXPECT_EQ(c1.ref_len, 35u);
  EXPECT_EQ(*c2.AsRational(), Rational(1, 5));
  EXPECT_EQ(c2.raw_edits, 7u);
}

TEST(NormalizedEds, EmptyReferencePolicy) {
  const EditScore both_empty = NormalizedEds(W(""), W(""));
  EXPECT_FALSE(both_empty.IsMaxUncertain());
  EXPECT_EQ(*both_empty.AsRational(), Rational(0));
  const EditScore sentinel = NormalizedEds(W(""), W("hello there"));
  EXPECT_TRUE(sentinel.IsMaxUncertain());
  EXPECT_FALSE(sentinel.AsRational().has_value());
  EXPECT_GT(sentinel, (EditScore{1000000, 1}));
  EXPECT_GT(sentinel, Rational(1000000));
}

TEST(NormalizedEds, CanExceedOne) {
  const EditScore s = NormalizedEds(W("a"), W("b c d"));
  EXPECT_EQ(*s.AsRational(), Rational(3));
}

TEST(EditScore, ComparesByValue) {
  EXPECT_EQ((EditScore{3, 5}), (EditScore{6, 10}));
  EXPECT_LT((EditScore{1, 3}), (EditScore{1, 2}));
  EXPECT_TRUE((EditScore{3, 5}) <= Rational(3, 5));
  EXPECT_FALSE((EditScore{3, 5}) <= Rational(59, 100));
}

TEST(UtteranceErrorRate, Examples) {
  EXPECT_EQ(*UtteranceErrorRate(W(kTruth), W(kTruth)).AsRational(), Rational(0));
  // One deleted 'g' over 36 characters; one substituted word over 5.
  ASSERT_EQ(oracle::RecursiveEditDistance(Letters("ankylosing"),
                                          Letters("ankylosin")),
            1u);
  const EditScore cer = UtteranceErrorRate(C(kTruth), C(kRef));
  EXPECT_EQ(cer.ref_len, 36u);
  EXPECT_EQ(*cer.AsRational(), Rational(1, 36));
  EXPECT_EQ(*UtteranceErrorRate(W(kTruth), W(kRef)).AsRational(), Rational(1, 5));
}

TEST(CorpusErrorRate, EditSumOverLengthSum) {
  // Edits {1, 2} over truth lengths {4, 6}.
  std::vector<std::pair<TokenSequence, TokenSequence>> pairs = {
      {W("a b c d"), W("a b c x")},
      {W("a b c d e f"), W("a b c d")},
  };
  const CorpusErrorRate r = CorpusErrorRateOf(pairs);
  EXPECT_EQ(r.total_edits, 3u);
  EXPECT_EQ(r.total_ref_tokens, 10u);
  EXPECT_EQ(r.ExactRate(), Rational(3, 10));
  EXPECT_DOUBLE_EQ(r.rate, 0.3);
  EXPECT_DOUBLE_EQ(r.per_utterance_mean, (0.25 + 2.0 / 6.0) / 2);
}

TEST(CorpusErrorRate, DegenerateCases) {
  std::vector<std::pair<TokenSequence, TokenSequence>> same = {
      {W("a b"), W("a b")}, {W("c"), W("c")}};
  EXPECT_EQ(CorpusErrorRateOf(same).rate, 0.0);

  std::vector<std::pair<TokenSequence, TokenSequence>> single = {
      {W("a b c"), W("a")}};
  EXPECT_DOUBLE_EQ(CorpusErrorRateOf(single).rate, 2.0 / 3.0);

  std::vector<std::pair<TokenSequence, TokenSequence>> none;
  try {
    CorpusErrorRateOf(none);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUndefinedRate);
  }
}

TEST(CorpusErrorRate, EmptyTruthsExcludedAndCounted) {
  std::vector<std::pair<TokenSequence, TokenSequence>> pairs = {
      {W(""), W("noise")}, {W("a b"), W("a c")}};
  const CorpusErrorRate r = CorpusErrorRateOf(pairs);
  EXPECT_EQ(r.excluded_empty_truths, 1u);
  EXPECT_EQ(r.utterances, 1u);
  EXPECT_DOUBLE_EQ(r.rate, 0.5);
}

std::vector<std::string> RandomSymbols(std::mt19937_64& rng, std::size_t max_len,
                                       std::size_t alphabet) {
  std::vector<std::string> out(rng() % (max_len + 1));
  for (auto& s : out) s = std::string(1, static_cast<char>('a' + rng() % alphabet));
  return out;
}

TEST(EditDistanceProperty, MatchesExhaustiveOracle) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = RandomSymbols(rng, 8, 4);
    const auto b = RandomSymbols(rng, 8, 4);
    ASSERT_EQ(EditDistance(TokenSequence(TokenUnit::kChar, a),
                           TokenSequence(TokenUnit::kChar, b)),
              oracle::RecursiveEditDistance(a, b));
  }
}

TEST(EditDistanceProperty, MetricAxioms) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const TokenSequence a(TokenUnit::kWord, RandomSymbols(rng, 12, 5));
    const TokenSequence b(TokenUnit::kWord, RandomSymbols(rng, 12, 5));
    const TokenSequence c(TokenUnit::kWord, RandomSymbols(rng, 12, 5));
    const std::size_t ab = EditDistance(a, b);
    EXPECT_EQ(ab, EditDistance(b, a));
    EXPECT_EQ(ab == 0, a == b);
    EXPECT_LE(EditDistance(a, c), ab + EditDistance(b, c));
    if (!a.empty()) {
      const EditScore s = NormalizedEds(a, b);
      EXPECT_LE(s.Value(), static_cast<double>(std::max(a.size(), b.size())) /
                               static_cast<double>(a.size()));
    }
  }
}

TEST(CorpusErrorRateProperty, PermutationInvariantRate) {
  std::mt19937_64 rng(99);
  std::vector<std::pair<TokenSequence, TokenSequence>> pairs;
  for (int i = 0; i < 60; ++i) {
    pairs.emplace_back(TokenSequence(TokenUnit::kWord, RandomSymbols(rng, 10, 3)),
                       TokenSequence(TokenUnit::kWord, RandomSymbols(rng, 10, 3)));
  }
  const CorpusErrorRate base = CorpusErrorRateOf(pairs);
  for (int k = 0; k < 20; ++k) {
    std::shuffle(pairs.begin(), pairs.end(), rng);
    const CorpusErrorRate r = CorpusErrorRateOf(pairs);
    EXPECT_EQ(r.total_edits, base.total_edits);
    EXPECT_EQ(r.total_ref_tokens, base.total_ref_tokens);
    EXPECT_EQ(r.rate, base.rate);
  }
}

TEST(Rational, ParseAndOrder) {
  EXPECT_EQ(Rational::Parse("0.05"), Rational(1, 20));
  EXPECT_EQ(Rational::Parse(".5"), Rational(1, 2));
  EXPECT_EQ(Rational::Parse("3/35"), Rational(3, 35));
  EXPECT_EQ(Rational::Parse("2"), Rational(2));
  EXPECT_LT(Rational(3, 35), Rational(1, 10));
  EXPECT_THROW(Rational::Parse("1e-3"), Error);
  EXPECT_THROW(Rational::Parse(""), Error);
  EXPECT_THROW(Rational::Parse("1/0"), Error);
  EXPECT_THROW(Rational::Parse("0.1.2"), Error);
}

}  // namespace
}  // namespace dust
