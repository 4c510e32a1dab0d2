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
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dust/edit_distance.hpp"
#include "dust/error.hpp"
#include "dust/parallel.hpp"
#include "dust/tokenize.hpp"
#include "dust/uncertainty.hpp"

namespace dust {

struct CalibrationSample {
  std::string id;
  double confidence = 0.0;
  double accuracy = 0.0;
};

// Equal-width bin [lo, hi); the last bin is closed on the right.
struct CalibrationBin {
  std::size_t index = 0;  // 1-based
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  // Means are 0 for an empty bin; check `count`.
  double mean_confidence = 0.0;
  double mean_accuracy = 0.0;
  double mass = 0.0;

  double Gap() const { return std::abs(mean_accuracy - mean_confidence); }
};

struct CalibrationReport {
  std::size_t num_bins = 0;
  std::size_t n = 0;
  std::vector<CalibrationBin> bins;
  double ece = 0.0;
  double mce = 0.0;
  double rce = 0.0;
  double mean_confidence = 0.0;
  double mean_accuracy = 0.0;
};

inline constexpr std::size_t kDefaultBins = 15;

inline double ClampUnit(double x) { return std::clamp(x, 0.0, 1.0); }

// Confidence from the filtering unit; accuracy is 1 - err(truth, ref), both
// clamped to [0, 1]. err is measured in `accuracy_unit`, which defaults to the
// filtering unit.
inline std::vector<CalibrationSample> CalibrationSamples(
    std::span<const HypothesisBundle> corpus, const ScoringOptions& opts,
    std::optional<TokenUnit> accuracy_unit = std::nullopt) {
  ValidateCorpus(corpus);
  RequireTruth(corpus);
  const TokenUnit acc_unit = accuracy_unit.value_or(opts.unit);
  std::vector<CalibrationSample> samples(corpus.size());
  ParallelFor(corpus.size(), opts.threads, [&](std::size_t i) {
    const auto& b = corpus[i];
    const UncertaintyRecord rec = PredictiveUncertainty(b, opts.unit, opts.norm);
    const EditScore err =
        UtteranceErrorRate(Tokenize(*b.truth, acc_unit, opts.norm),
                           Tokenize(b.ref, acc_unit, opts.norm));
    const double accuracy =
        err.IsMaxUncertain() ? 0.0 : ClampUnit(1.0 - err.Value());
    samples[i] = CalibrationSample{b.id, rec.confidence, accuracy};
  });
  return samples;
}

// Bin m (0-based) covers [m/M, (m+1)/M).
inline std::size_t BinIndex(double confidence, std::size_t num_bins) {
  const double m = static_cast<double>(num_bins);
  auto idx = static_cast<std::size_t>(
      std::clamp(std::floor(confidence * m), 0.0, m - 1));
  // floor(c * M) can land one off near a boundary; settle against the same
  // lo values the bins report.
  while (idx + 1 < num_bins &&
         confidence >= static_cast<double>(idx + 1) / m) {
    ++idx;
  }
  while (idx > 0 && confidence < static_cast<double>(idx) / m) --idx;
  return idx;
}

inline std::vector<CalibrationBin> ReliabilityBins(
    std::span<const CalibrationSample> samples, std::size_t num_bins) {
  if (num_bins == 0) {
    throw Error(ErrorCode::kInvalidArgument, "bin count must be at least 1");
  }
  if (samples.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no calibration samples");
  }
  // Folding over sorted values makes the sums independent of input order.
  std::vector<std::pair<double, double>> sorted;
  sorted.reserve(samples.size());
  for (const auto& s : samples) {
    if (!(s.confidence >= 0.0 && s.confidence <= 1.0) ||
        !(s.accuracy >= 0.0 && s.accuracy <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "sample '" + s.id + "' outside [0, 1]");
    }
    sorted.emplace_back(s.confidence, s.accuracy);
  }
  std::sort(sorted.begin(), sorted.end());

  std::vector<CalibrationBin> bins(num_bins);
  std::vector<double> conf_sum(num_bins, 0.0);
  std::vector<double> acc_sum(num_bins, 0.0);
  const double m = static_cast<double>(num_bins);
  for (std::size_t k = 0; k < num_bins; ++k) {
    bins[k].index = k + 1;
    bins[k].lo = static_cast<double>(k) / m;
    bins[k].hi = static_cast<double>(k + 1) / m;
  }
  for (const auto& [conf, acc] : sorted) {
    const std::size_t k = BinIndex(conf, num_bins);
    ++bins[k].count;
    conf_sum[k] += conf;
    acc_sum[k] += acc;
  }
  const double n = static_cast<double>(samples.size());
  for (std::size_t k = 0; k < num_bins; ++k) {
    auto& bin = bins[k];
    if (bin.count == 0) continue;
    const double c = static_cast<double>(bin.count);
    bin.mean_confidence = conf_sum[k] / c;
    bin.mean_accuracy = acc_sum[k] / c;
    bin.mass = c / n;
  }
  return bins;
}

namespace internal {
inline void RequirePositive(std::size_t n) {
  if (n == 0) {
    throw Error(ErrorCode::kInvalidArgument, "calibration over zero samples");
  }
}
}  // namespace internal

// Sum over bins of (|B_m| / n) * |acc(B_m) - conf(B_m)|.
inline double Ece(std::span<const CalibrationBin> bins, std::size_t n) {
  internal::RequirePositive(n);
  double sum = 0.0;
  for (const auto& b : bins) {
    if (b.count == 0) continue;
    sum += static_cast<double>(b.count) / static_cast<double>(n) * b.Gap();
  }
  return sum;
}

// Worst gap over nonempty bins.
inline double Mce(std::span<const CalibrationBin> bins) {
  double worst = 0.0;
  for (const auto& b : bins) {
    if (b.count > 0) worst = std::max(worst, b.Gap());
  }
  return worst;
}

// Root of the mass-weighted squared gaps.
inline double Rce(std::span<const CalibrationBin> bins, std::size_t n) {
  internal::RequirePositive(n);
  double sum = 0.0;
  for (const auto& b : bins) {
    if (b.count == 0) continue;
    const double gap = b.mean_accuracy - b.mean_confidence;
    sum += static_cast<double>(b.count) / static_cast<double>(n) * gap * gap;
  }
  return std::sqrt(sum);
}

inline CalibrationReport MakeCalibrationReport(
    std::span<const CalibrationSample> samples,
    std::size_t num_bins = kDefaultBins) {
  CalibrationReport report;
  report.num_bins = num_bins;
  report.n = samples.size();
  report.bins = ReliabilityBins(samples, num_bins);
  report.ece = Ece(report.bins, report.n);
  report.mce = Mce(report.bins);
  report.rce = Rce(report.bins, report.n);
  std::vector<double> conf;
  std::vector<double> acc;
  conf.reserve(samples.size());
  acc.reserve(samples.size());
  for (const auto& s : samples) {
    conf.push_back(s.confidence);
    acc.push_back(s.accuracy);
  }
  std::sort(conf.begin(), conf.end());
  std::sort(acc.begin(), acc.end());
  double conf_sum = 0.0;
  double acc_sum = 0.0;
  for (double c : conf) conf_sum += c;
  for (double a : acc) acc_sum += a;
  report.mean_confidence = conf_sum / static_cast<double>(report.n);
  report.mean_accuracy = acc_sum / static_cast<double>(report.n);
  return report;
}

inline CalibrationReport CalibrationReportOf(
    std::span<const HypothesisBundle> corpus, std::size_t num_bins,
    const ScoringOptions& opts,
    std::optional<TokenUnit> accuracy_unit = std::nullopt) {
  if (num_bins == 0) {
    throw Error(ErrorCode::kInvalidArgument, "bin count must be at least 1");
  }
  const auto samples = CalibrationSamples(corpus, opts, accuracy_unit);
  return MakeCalibrationReport(samples, num_bins);
}

}  // namespace dust
