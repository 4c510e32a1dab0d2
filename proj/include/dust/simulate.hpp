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
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dust/error.hpp"
#include "dust/parallel.hpp"
#include "dust/tokenize.hpp"
#include "dust/uncertainty.hpp"

namespace dust {

// A teacher simulated as a two-stage noise channel. Each truth token is
// corrupted with probability p_base to give the shared "decoded base", which
// becomes the reference hypothesis. Each of the T dropout samples then
// perturbs the base independently with probability p_samp per token.
// p_base stands for how wrong the teacher is; p_samp for how much dropout
// makes it disagree with itself.
struct OpMix {
  double substitute = 0.5;
  double remove = 0.25;
  double insert = 0.25;

  OpMix Normalized() const {
    if (substitute < 0 || remove < 0 || insert < 0 ||
        !std::isfinite(substitute + remove + insert) ||
        substitute + remove + insert <= 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "op mix needs nonnegative weights with a positive sum");
    }
    const double total = substitute + remove + insert;
    return OpMix{substitute / total, remove / total, insert / total};
  }
};

struct NoiseChannel {
  double p_base = 0.0;
  double p_samp = 0.0;
  OpMix op_mix;
  std::size_t num_samples = 3;
  std::uint64_t seed = 0;
  // Share of substitutions that mutate one character of the token instead of
  // swapping in another vocabulary word.
  double char_mutation_share = 0.5;

  void Validate() const {
    const auto unit_interval = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!unit_interval(p_base) || !unit_interval(p_samp) ||
        !unit_interval(char_mutation_share)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "channel rates must lie in [0, 1]");
    }
    if (num_samples == 0) {
      throw Error(ErrorCode::kInvalidArgument, "T must be at least 1");
    }
    (void)op_mix.Normalized();
  }
};

// One arm of a per-utterance severity mixture; overrides the channel rates.
struct MixtureComponent {
  double weight = 1.0;
  double p_base = 0.0;
  double p_samp = 0.0;
};

struct SimCorpusSpec {
  std::vector<std::string> truths;
  NoiseChannel channel;
  // Empty means every utterance uses channel.p_base / channel.p_samp.
  std::vector<MixtureComponent> mixture;
};

// splitmix64 finalizer.
inline std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t a,
                                std::uint64_t b = 0) {
  return Mix64(Mix64(Mix64(seed) ^ a) ^ (b * 0xD1B54A32D192ED03ULL));
}

// mt19937_64 output is fixed by the standard; the conversions below are done
// by hand because <random> distributions are implementation-defined and the
// corpus must be bit-identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool Bernoulli(double p) { return Uniform() < p; }

  // Uniform integer in [0, n); n > 0.
  std::uint64_t Below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
};

namespace internal {

inline std::string MutateOneChar(std::string_view token, Rng& rng) {
  std::u32string scalars = utf8::Decode(token);
  if (scalars.empty()) return "a";
  const std::size_t pos = rng.Below(scalars.size());
  const char32_t current = scalars[pos];
  const bool is_lower = current >= U'a' && current <= U'z';
  char32_t letter = U'a' + static_cast<char32_t>(rng.Below(is_lower ? 25 : 26));
  if (is_lower && letter >= current) ++letter;
  scalars[pos] = letter;
  return utf8::Encode(scalars);
}

inline std::string RandomWord(std::span<const std::string> vocab, Rng& rng) {
  if (vocab.empty()) {
    std::string w;
    const std::size_t len = 2 + rng.Below(4);
    for (std::size_t i = 0; i < len; ++i) {
      w.push_back(static_cast<char>('a' + rng.Below(26)));
    }
    return w;
  }
  return vocab[rng.Below(vocab.size())];
}

inline std::string Substitute(const std::string& token,
                              std::span<const std::string> vocab,
                              double char_share, Rng& rng) {
  if (rng.Bernoulli(char_share)) return MutateOneChar(token, rng);
  // A handful of redraws; a vocabulary with no alternative falls back to a
  // character mutation so the substitution always changes the token.
  for (int attempt = 0; attempt < 8 && vocab.size() > 1; ++attempt) {
    const std::string& w = vocab[rng.Below(vocab.size())];
    if (w != token) return w;
  }
  return MutateOneChar(token, rng);
}

}  // namespace internal

// Each position is hit independently with probability `rate`. A hit draws one
// op from `mix`: substitute (always changes the token), delete, or insert
// (keep the token and follow it with a vocabulary word).
inline TokenSequence Corrupt(const TokenSequence& tokens, double rate,
                             const OpMix& mix,
                             std::span<const std::string> vocab, Rng& rng,
                             double char_mutation_share = 0.5) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "corruption rate outside [0, 1]");
  }
  const OpMix p = mix.Normalized();
  std::vector<std::string> out;
  out.reserve(tokens.size() + tokens.size() / 4 + 1);
  for (const auto& tok : tokens.tokens()) {
    if (!rng.Bernoulli(rate)) {
      out.push_back(tok);
      continue;
    }
    const double u = rng.Uniform();
    if (u < p.substitute) {
      out.push_back(internal::Substitute(tok, vocab, char_mutation_share, rng));
    } else if (u < p.substitute + p.remove) {
      // dropped
    } else {
      out.push_back(tok);
      out.push_back(internal::RandomWord(vocab, rng));
    }
  }
  return TokenSequence(tokens.unit(), std::move(out));
}

// Sorted distinct words of the truths.
inline std::vector<std::string> BuildVocabulary(
    std::span<const std::string> truths) {
  std::set<std::string> words;
  for (const auto& t : truths) {
    const TokenSequence seq = Tokenize(t, TokenUnit::kWord);
    words.insert(seq.tokens().begin(), seq.tokens().end());
  }
  return {words.begin(), words.end()};
}

// Sample k (0-based) draws from sub-stream k + 1 of `stream_seed`, so the
// first T samples are the same whatever T is.
inline HypothesisBundle SimulateBundle(std::string id, std::string_view truth,
                                       const NoiseChannel& channel,
                                       std::span<const std::string> vocab,
                                       std::uint64_t stream_seed) {
  channel.Validate();
  const TokenSequence truth_words = Tokenize(truth, TokenUnit::kWord);
  Rng base_rng(DeriveSeed(stream_seed, 0));
  const TokenSequence base =
      Corrupt(truth_words, channel.p_base, channel.op_mix, vocab, base_rng,
              channel.char_mutation_share);
  HypothesisBundle bundle;
  bundle.id = std::move(id);
  bundle.ref = base.Join();
  bundle.truth = std::string(truth);
  bundle.samples.reserve(channel.num_samples);
  for (std::size_t k = 0; k < channel.num_samples; ++k) {
    Rng sample_rng(DeriveSeed(stream_seed, k + 1));
    bundle.samples.push_back(Corrupt(base, channel.p_samp, channel.op_mix,
                                     vocab, sample_rng,
                                     channel.char_mutation_share)
                                 .Join());
  }
  return bundle;
}

inline std::string UtteranceId(std::size_t index, std::size_t total) {
  std::size_t width = 6;
  for (std::size_t t = total; t >= 1000000; t /= 10) ++width;
  std::string digits = std::to_string(index);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return "utt" + digits;
}

inline constexpr std::uint64_t kMixtureStream = 0x6D6978ULL;

// Index of the mixture arm used by utterance `index`.
inline std::size_t PickComponent(const SimCorpusSpec& spec, std::size_t index) {
  double total = 0.0;
  for (const auto& c : spec.mixture) {
    if (!(c.weight >= 0.0) || !(c.p_base >= 0.0 && c.p_base <= 1.0) ||
        !(c.p_samp >= 0.0 && c.p_samp <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "invalid mixture component");
    }
    total += c.weight;
  }
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "mixture weights sum to zero");
  }
  Rng rng(DeriveSeed(spec.channel.seed, index, kMixtureStream));
  double u = rng.Uniform() * total;
  for (std::size_t k = 0; k < spec.mixture.size(); ++k) {
    if (u < spec.mixture[k].weight) return k;
    u -= spec.mixture[k].weight;
  }
  return spec.mixture.size() - 1;
}

// Pure function of the spec; per-utterance streams depend only on
// (seed, index), so any worker count gives the same corpus.
inline std::vector<HypothesisBundle> SimulateCorpus(const SimCorpusSpec& spec,
                                                    unsigned threads = 1) {
  if (spec.truths.empty()) {
    throw Error(ErrorCode::kValidation, "no truth transcripts to simulate from");
  }
  spec.channel.Validate();
  for (std::size_t i = 0; i < spec.truths.size(); ++i) {
    if (Tokenize(spec.truths[i], TokenUnit::kWord).empty()) {
      throw Error(ErrorCode::kValidation,
                  "truth " + std::to_string(i) + " is empty");
    }
  }
  if (!spec.mixture.empty()) (void)PickComponent(spec, 0);
  const std::vector<std::string> vocab = BuildVocabulary(spec.truths);
  std::vector<HypothesisBundle> corpus(spec.truths.size());
  ParallelFor(corpus.size(), threads, [&](std::size_t i) {
    NoiseChannel channel = spec.channel;
    if (!spec.mixture.empty()) {
      const auto& arm = spec.mixture[PickComponent(spec, i)];
      channel.p_base = arm.p_base;
      channel.p_samp = arm.p_samp;
    }
    corpus[i] = SimulateBundle(UtteranceId(i, corpus.size()), spec.truths[i],
                               channel, vocab, DeriveSeed(spec.channel.seed, i));
  });
  return corpus;
}

namespace internal {

inline constexpr std::array<std::string_view, 240> kBuiltinWords = {
    "the",      "of",       "and",      "to",       "in",       "is",
    "that",     "it",       "was",      "for",      "on",       "are",
    "with",     "as",       "they",     "be",       "at",       "one",
    "have",     "this",     "from",     "by",       "hot",      "word",
    "but",      "what",     "some",     "we",       "can",      "out",
    "other",    "were",     "all",      "there",    "when",     "up",
    "use",      "your",     "how",      "said",     "an",       "each",
    "she",      "which",    "do",       "their",    "time",     "if",
    "will",     "way",      "about",    "many",     "then",     "them",
    "write",    "would",    "like",     "so",       "these",    "her",
    "long",     "make",     "thing",    "see",      "him",      "two",
    "has",      "look",     "more",     "day",      "could",    "go",
    "come",     "did",      "number",   "sound",    "no",       "most",
    "people",   "my",       "over",     "know",     "water",    "than",
    "call",     "first",    "who",      "may",      "down",     "side",
    "been",     "now",      "find",     "any",      "new",      "work",
    "part",     "take",     "get",      "place",    "made",     "live",
    "where",    "after",    "back",     "little",   "only",     "round",
    "man",      "year",     "came",     "show",     "every",    "good",
    "me",       "give",     "our",      "under",    "name",     "very",
    "through",  "just",     "form",     "sentence", "great",    "think",
    "say",      "help",     "low",      "line",     "differ",   "turn",
    "cause",    "much",     "mean",     "before",   "move",     "right",
    "boy",      "old",      "too",      "same",     "tell",     "does",
    "set",      "three",    "want",     "air",      "well",     "also",
    "play",     "small",    "end",      "put",      "home",     "read",
    "hand",     "port",     "large",    "spell",    "add",      "even",
    "land",     "here",     "must",     "big",      "high",     "such",
    "follow",   "act",      "why",      "ask",      "men",      "change",
    "went",     "light",    "kind",     "off",      "need",     "house",
    "picture",  "try",      "us",       "again",    "animal",   "point",
    "mother",   "world",    "near",     "build",    "self",     "earth",
    "father",   "head",     "stand",    "own",      "page",     "should",
    "country",  "found",    "answer",   "school",   "grow",     "study",
    "still",    "learn",    "plant",    "cover",    "food",     "sun",
    "four",     "between",  "state",    "keep",     "eye",      "never",
    "last",     "let",      "thought",  "city",     "tree",     "cross",
    "farm",     "hard",     "start",    "might",    "story",    "saw",
    "far",      "sea",      "draw",     "left",     "late",     "run",
    "signs",    "detected", "medical",  "video",    "speech",   "model",
};

}  // namespace internal

// Synthetic transcripts of min_words..max_words words (uniform), drawn from a
// fixed English word list.
inline std::vector<std::string> BuiltinTranscripts(std::size_t count,
                                                   std::uint64_t seed,
                                                   std::size_t min_words = 5,
                                                   std::size_t max_words = 25) {
  if (min_words == 0 || max_words < min_words) {
    throw Error(ErrorCode::kInvalidArgument, "bad transcript length range");
  }
  std::vector<std::string> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(DeriveSeed(seed, i, 0x747275ULL));
    const std::size_t len = min_words + rng.Below(max_words - min_words + 1);
    std::string line;
    for (std::size_t w = 0; w < len; ++w) {
      if (w > 0) line.push_back(' ');
      line += internal::kBuiltinWords[rng.Below(internal::kBuiltinWords.size())];
    }
    out[i] = std::move(line);
  }
  return out;
}

}  // namespace dust
