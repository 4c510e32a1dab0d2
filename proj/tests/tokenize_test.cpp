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

#include "dust/tokenize.hpp"

#include <random>
#include <string>

#include "gtest/gtest.h"

namespace dust {
namespace {

constexpr char kRef[] = "signs of ankylosin spondylitis detected";

TEST(Tokenize, WordsOfWorkedExample) {
  const TokenSequence words = Tokenize(kRef, TokenUnit::kWord);
  EXPECT_EQ(words.unit(), TokenUnit::kWord);
  ASSERT_EQ(words.size(), 5u);
  EXPECT_EQ(words[2], "ankylosin");
}

TEST(Tokenize, CharsExcludeSpacesByDefault) {
  // 5 + 2 + 9 + 11 + 8
  const TokenSequence chars = Tokenize(kRef, TokenUnit::kChar);
  EXPECT_EQ(chars.unit(), TokenUnit::kChar);
  EXPECT_EQ(chars.size(), 35u);
  EXPECT_EQ(chars[0], "s");
  EXPECT_EQ(chars[5], "o");
}

TEST(Tokenize, EmptyAndBlankInputs) {
  EXPECT_TRUE(Tokenize("", TokenUnit::kWord).empty());
  EXPECT_TRUE(Tokenize("", TokenUnit::kChar).empty());
  EXPECT_TRUE(Tokenize(" \t\n ", TokenUnit::kWord).empty());
  EXPECT_TRUE(Tokenize(" \t\n ", TokenUnit::kChar).empty());
}

TEST(Tokenize, WordSplitsOnAnyWhitespaceRun) {
  const TokenSequence w =
      Tokenize("  a\t\tb  c　d\n", TokenUnit::kWord);
  EXPECT_EQ(w.tokens(), (std::vector<std::string>{"a", "b", "c", "d"}));
}

TEST(Tokenize, CharsAreUnicodeScalars) {
  const TokenSequence c = Tokenize("naïve 日本", TokenUnit::kChar);
  EXPECT_EQ(c.tokens(),
            (std::vector<std::string>{"n", "a", "ï", "v", "e", "日", "本"}));
}

TEST(Tokenize, IncludeSpacesWithAndWithoutCollapse) {
  NormalizationOptions opts;
  opts.include_spaces_in_chars = true;
  EXPECT_EQ(Tokenize(" a  b ", TokenUnit::kChar, opts).size(), 6u);
  opts.collapse_whitespace = true;
  EXPECT_EQ(Tokenize(" a  b ", TokenUnit::kChar, opts).tokens(),
            (std::vector<std::string>{"a", " ", "b"}));
  // 35 letters + 4 separators.
  EXPECT_EQ(Tokenize(kRef, TokenUnit::kChar, opts).size(), 39u);
}

TEST(Tokenize, LowercaseAndPunctuation) {
  NormalizationOptions opts;
  opts.lowercase = true;
  opts.strip_punctuation = true;
  EXPECT_EQ(Tokenize("Don't STOP, É-clair!", TokenUnit::kWord, opts).tokens(),
            (std::vector<std::string>{"don't", "stop", "éclair"}));
  // Defaults leave text verbatim.
  EXPECT_EQ(Tokenize("Don't STOP,", TokenUnit::kWord).tokens(),
            (std::vector<std::string>{"Don't", "STOP,"}));
}

TEST(Tokenize, MalformedUtf8BecomesReplacementChar) {
  const std::string bad = std::string("a") + '\xff' + "b" + '\xc3';
  const TokenSequence c = Tokenize(bad, TokenUnit::kChar);
  EXPECT_EQ(c.tokens(),
            (std::vector<std::string>{"a", "�", "b", "�"}));
}

TEST(TokenSequence, RejectsInvalidTokens) {
  EXPECT_THROW(TokenSequence(TokenUnit::kWord, {"ok", ""}), Error);
  EXPECT_THROW(TokenSequence(TokenUnit::kWord, {"two words"}), Error);
  EXPECT_NO_THROW(TokenSequence(TokenUnit::kChar, {" "}));
}

// Random text over a small alphabet that includes whitespace and punctuation.
std::string RandomText(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces = {
      "a", "b", "Z", " ", "  ", "\t", ",", "'", "é", "日", "\n", "x"};
  std::string s;
  const std::size_t len = rng() % 20;
  for (std::size_t i = 0; i < len; ++i) s += pieces[rng() % pieces.size()];
  return s;
}

TEST(TokenizeProperty, WordIdempotenceAndUnitTag) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::string text = RandomText(rng);
    NormalizationOptions opts;
    opts.lowercase = rng() % 2;
    opts.strip_punctuation = rng() % 2;
    const TokenSequence once = Tokenize(text, TokenUnit::kWord, opts);
    EXPECT_EQ(once.unit(), TokenUnit::kWord);
    EXPECT_EQ(Tokenize(once.Join(), TokenUnit::kWord, opts), once) << text;
    EXPECT_EQ(Tokenize(text, TokenUnit::kChar, opts).unit(), TokenUnit::kChar);
    for (const auto& t : once.tokens()) EXPECT_FALSE(t.empty());
  }
}

TEST(TokenizeProperty, CharCountIsLengthMinusWhitespace) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::string text = RandomText(rng);
    const std::u32string scalars = utf8::Decode(text);
    std::size_t spaces = 0;
    for (char32_t cp : scalars) spaces += IsSpace(cp) ? 1 : 0;
    const TokenSequence chars = Tokenize(text, TokenUnit::kChar);
    EXPECT_EQ(chars.size(), scalars.size() - spaces) << text;
    for (const auto& t : chars.tokens()) {
      EXPECT_FALSE(IsSpace(utf8::Decode(t).front()));
    }
  }
}

TEST(TokenizeProperty, Deterministic) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const std::string text = RandomText(rng);
    EXPECT_EQ(Tokenize(text, TokenUnit::kChar), Tokenize(text, TokenUnit::kChar));
  }
}

}  // namespace
}  // namespace dust
