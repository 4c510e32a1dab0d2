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

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dust/error.hpp"

namespace dust {

// Which tokens the edit distance runs over: words for DUST, characters for
// C-DUST.
enum class TokenUnit { kWord, kChar };

inline const char* TokenUnitName(TokenUnit unit) {
  return unit == TokenUnit::kWord ? "word" : "char";
}

struct NormalizationOptions {
  // ASCII and Latin-1 letters only.
  bool lowercase = false;
  // Removes ASCII punctuation other than the apostrophe.
  bool strip_punctuation = false;
  // Char unit only; the Word unit always splits on whitespace runs.
  bool collapse_whitespace = false;
  bool include_spaces_in_chars = false;

  friend bool operator==(const NormalizationOptions&,
                         const NormalizationOptions&) = default;
};

namespace utf8 {

inline constexpr char32_t kReplacement = 0xFFFD;

// Decodes UTF-8 into scalars. Malformed bytes, surrogates and overlong forms
// each decode to U+FFFD, so decoding never fails.
inline std::u32string Decode(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  const auto* s = reinterpret_cast<const unsigned char*>(text.data());
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    const unsigned char b0 = s[i];
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    }
    std::size_t len = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if ((b0 & 0xE0) == 0xC0) {
      len = 2, cp = b0 & 0x1F, min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3, cp = b0 & 0x0F, min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4, cp = b0 & 0x07, min = 0x10000;
    } else {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    bool ok = i + len <= n;
    for (std::size_t k = 1; ok && k < len; ++k) {
      const unsigned char b = s[i + k];
      if ((b & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (b & 0x3F);
      }
    }
    if (!ok || cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

inline void Append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::string Encode(std::u32string_view scalars) {
  std::string out;
  out.reserve(scalars.size());
  for (char32_t cp : scalars) Append(out, cp);
  return out;
}

}  // namespace utf8

// Unicode White_Space property.
inline bool IsSpace(char32_t cp) {
  return (cp >= 0x09 && cp <= 0x0D) || cp == 0x20 || cp == 0x85 ||
         cp == 0xA0 || cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200A) ||
         cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F ||
         cp == 0x3000;
}

inline bool IsStrippablePunct(char32_t cp) {
  if (cp == U'\'') return false;
  return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
         (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
}

inline char32_t ToLower(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  return cp;
}

class TokenSequence;
inline TokenSequence Tokenize(std::string_view text, TokenUnit unit,
                              const NormalizationOptions& opts = {});

// Ordered tokens plus the unit that produced them. `size()` is the |y|
// denominator of the normalized edit distance.
class TokenSequence {
 public:
  explicit TokenSequence(TokenUnit unit = TokenUnit::kWord) : unit_(unit) {}

  // Throws kInvalidArgument on an empty token or a Word token containing
  // whitespace.
  TokenSequence(TokenUnit unit, std::vector<std::string> tokens)
      : unit_(unit), tokens_(std::move(tokens)) {
    for (const auto& t : tokens_) {
      if (t.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "empty token");
      }
      if (unit_ == TokenUnit::kWord) {
        for (char32_t cp : utf8::Decode(t)) {
          if (IsSpace(cp)) {
            throw Error(ErrorCode::kInvalidArgument,
                        "word token contains whitespace: '" + t + "'");
          }
        }
      }
    }
  }

  TokenUnit unit() const { return unit_; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  const std::string& operator[](std::size_t i) const { return tokens_[i]; }

  // Words joined by one space; characters concatenated.
  std::string Join() const {
    std::string out;
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (i > 0 && unit_ == TokenUnit::kWord) out.push_back(' ');
      out += tokens_[i];
    }
    return out;
  }

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;

 private:
  friend TokenSequence Tokenize(std::string_view, TokenUnit,
                                const NormalizationOptions&);

  static TokenSequence Trusted(TokenUnit unit, std::vector<std::string> tokens) {
    TokenSequence seq(unit);
    seq.tokens_ = std::move(tokens);
    return seq;
  }

  TokenUnit unit_;
  std::vector<std::string> tokens_;
};

// Applies lowercase / punctuation stripping, leaving whitespace untouched.
inline std::u32string NormalizeScalars(std::string_view text,
                                       const NormalizationOptions& opts) {
  std::u32string scalars = utf8::Decode(text);
  if (!opts.lowercase && !opts.strip_punctuation) return scalars;
  std::u32string out;
  out.reserve(scalars.size());
  for (char32_t cp : scalars) {
    if (opts.strip_punctuation && IsStrippablePunct(cp)) continue;
    out.push_back(opts.lowercase ? ToLower(cp) : cp);
  }
  return out;
}

inline TokenSequence Tokenize(std::string_view text, TokenUnit unit,
                              const NormalizationOptions& opts) {
  const std::u32string scalars = NormalizeScalars(text, opts);
  std::vector<std::string> tokens;
  if (unit == TokenUnit::kWord) {
    std::string word;
    for (char32_t cp : scalars) {
      if (IsSpace(cp)) {
        if (!word.empty()) tokens.push_back(std::move(word));
        word.clear();
      } else {
        utf8::Append(word, cp);
      }
    }
    if (!word.empty()) tokens.push_back(std::move(word));
  } else {
    tokens.reserve(scalars.size());
    if (!opts.include_spaces_in_chars) {
      for (char32_t cp : scalars) {
        if (IsSpace(cp)) continue;
        tokens.emplace_back();
        utf8::Append(tokens.back(), cp);
      }
    } else if (!opts.collapse_whitespace) {
      for (char32_t cp : scalars) {
        tokens.emplace_back();
        utf8::Append(tokens.back(), cp);
      }
    } else {
      // Runs of whitespace become one " " token; leading/trailing runs drop.
      bool pending_space = false;
      for (char32_t cp : scalars) {
        if (IsSpace(cp)) {
          pending_space = !tokens.empty();
          continue;
        }
        if (pending_space) tokens.emplace_back(" ");
        pending_space = false;
        tokens.emplace_back();
        utf8::Append(tokens.back(), cp);
      }
    }
  }
  return TokenSequence::Trusted(unit, std::move(tokens));
}

}  // namespace dust
