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

#include <charconv>
#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>

#include "dust/error.hpp"

namespace dust {

// Exact nonnegative-or-negative fraction with a positive denominator, kept in
// lowest terms. Thresholds and prefix fractions are carried as rationals so
// that `pred_uncert <= tau` and `ceil(fraction * n)` never suffer rounding.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t num) : num_(num), den_(1) {}  // NOLINT
  Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den == 0) {
      throw Error(ErrorCode::kInvalidArgument, "rational with zero denominator");
    }
    Normalize();
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double ToDouble() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  // Parses "3", "0.05", ".5", "1/20". Scientific notation is not accepted.
  static Rational Parse(std::string_view text) {
    const auto fail = [&]() -> Rational {
      throw Error(ErrorCode::kInvalidArgument,
                  "not a decimal or fraction: '" + std::string(text) + "'");
    };
    if (text.empty()) return fail();
    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
      std::int64_t n = 0;
      std::int64_t d = 0;
      if (!ParseInt(text.substr(0, slash), n) ||
          !ParseInt(text.substr(slash + 1), d) || d == 0) {
        return fail();
      }
      return Rational(n, d);
    }
    bool negative = false;
    if (text.front() == '-' || text.front() == '+') {
      negative = text.front() == '-';
      text.remove_prefix(1);
    }
    std::int64_t num = 0;
    std::int64_t den = 1;
    bool seen_dot = false;
    bool seen_digit = false;
    for (char c : text) {
      if (c == '.') {
        if (seen_dot) return fail();
        seen_dot = true;
        continue;
      }
      if (c < '0' || c > '9') return fail();
      seen_digit = true;
      if (num > (INT64_MAX - 9) / 10 || (seen_dot && den > INT64_MAX / 10)) {
        return fail();
      }
      num = num * 10 + (c - '0');
      if (seen_dot) den *= 10;
    }
    if (!seen_digit) return fail();
    return Rational(negative ? -num : num, den);
  }

  std::string ToString() const {
    return den_ == 1 ? std::to_string(num_)
                     : std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    return lhs <=> rhs;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.ToString();
  }

 private:
  static bool ParseInt(std::string_view s, std::int64_t& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return !s.empty() && ec == std::errc() && ptr == end;
  }

  void Normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const std::int64_t g = std::gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace dust
