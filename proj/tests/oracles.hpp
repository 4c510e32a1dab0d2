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

// Reference implementations used only by tests. They share no code with the
// library paths they check.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace dust::oracle {

// Exhaustive search over edit scripts: at each step either both heads match
// and are consumed for free, or one of delete / insert / substitute is paid.
// Exponential; intended for sequences of length <= 8.
template <typename T>
std::size_t RecursiveEditDistance(const std::vector<T>& a, std::size_t i,
                                  const std::vector<T>& b, std::size_t j) {
  if (i == a.size()) return b.size() - j;
  if (j == b.size()) return a.size() - i;
  std::size_t best = 1 + RecursiveEditDistance(a, i + 1, b, j);       // delete
  best = std::min(best, 1 + RecursiveEditDistance(a, i, b, j + 1));   // insert
  best = std::min(best, (a[i] == b[j] ? 0 : 1) +
                            RecursiveEditDistance(a, i + 1, b, j + 1));
  return best;
}

template <typename T>
std::size_t RecursiveEditDistance(const std::vector<T>& a,
                                  const std::vector<T>& b) {
  return RecursiveEditDistance(a, 0, b, 0);
}

struct CalibrationMetrics {
  double ece = 0.0;
  double mce = 0.0;
  double rce = 0.0;
};

// Direct summation: for each bin scan every sample, test membership against
// the half-open interval (last bin closed), average, and accumulate.
inline CalibrationMetrics DirectCalibration(
    const std::vector<std::pair<double, double>>& conf_acc, std::size_t bins) {
  CalibrationMetrics out;
  const double n = static_cast<double>(conf_acc.size());
  double sq = 0.0;
  for (std::size_t m = 0; m < bins; ++m) {
    const double lo = static_cast<double>(m) / static_cast<double>(bins);
    const double hi = static_cast<double>(m + 1) / static_cast<double>(bins);
    const bool last = m + 1 == bins;
    double conf = 0.0;
    double acc = 0.0;
    double count = 0.0;
    for (const auto& [c, a] : conf_acc) {
      if (c >= lo && (c < hi || (last && c <= 1.0))) {
        conf += c;
        acc += a;
        count += 1.0;
      }
    }
    if (count == 0.0) continue;
    const double gap = std::fabs(acc / count - conf / count);
    out.ece += count / n * gap;
    sq += count / n * gap * gap;
    out.mce = std::max(out.mce, gap);
  }
  out.rce = std::sqrt(sq);
  return out;
}

}  // namespace dust::oracle
