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

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>

#include "dust/dust.hpp"

namespace dust::cli {

// Options shared by every subcommand.
struct CommonOptions {
  unsigned threads = 0;
  bool lowercase = false;
  bool strip_punct = false;
  bool include_spaces = false;
  bool collapse_whitespace = false;
  bool lenient = false;
  std::string config;

  NormalizationOptions Norm() const {
    NormalizationOptions n;
    n.lowercase = lowercase;
    n.strip_punctuation = strip_punct;
    n.include_spaces_in_chars = include_spaces;
    n.collapse_whitespace = collapse_whitespace;
    return n;
  }
};

struct RunConfig {
  CommonOptions common;
  // simulate
  std::string truths_path;
  std::size_t builtin = 0;
  double p_base = 0.1;
  double p_samp = 0.1;
  std::vector<double> op_mix{0.5, 0.25, 0.25};
  std::size_t samples = 3;
  std::uint64_t seed = 0;
  std::vector<std::string> mixture;
  double char_share = 0.5;
  // filter / sweep / calibrate
  std::string in_path;
  std::string out_path = "-";
  std::string scores_path;
  std::string mode = "dust";
  std::string tau;
  std::vector<std::string> taus;
  std::vector<std::string> fractions;
  bool no_terminal = false;
  std::size_t bins = kDefaultBins;
  std::string acc_unit;
};

namespace internal {

inline TokenUnit UnitFromMode(const std::string& mode) {
  return mode == "cdust" ? TokenUnit::kChar : TokenUnit::kWord;
}

// key=value lines, '#' comments, blank lines ignored. Each entry becomes a
// "--key=value" argument placed before the command-line arguments, which
// therefore take precedence.
inline std::vector<std::string> ConfigArgs(const std::string& path,
                                           std::string& command) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config '" + path + "'");
  std::vector<std::string> args;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kParse, "config line " + std::to_string(line_no) +
                                         ": expected key=value");
    }
    const auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (key == "command") {
      command = value;
      continue;
    }
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

inline std::istream& OpenInput(const std::string& path,
                               std::unique_ptr<std::ifstream>& holder) {
  if (path == "-") return std::cin;
  holder = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*holder) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  return *holder;
}

inline std::ostream& OpenOutput(const std::string& path, std::ostream& stdout_,
                                std::unique_ptr<std::ofstream>& holder) {
  if (path == "-") return stdout_;
  holder = std::make_unique<std::ofstream>(path, std::ios::binary);
  if (!*holder) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  return *holder;
}

inline void Flush(std::ostream& out, const std::string& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

inline std::vector<Rational> ParseGrid(const std::vector<std::string>& items) {
  std::vector<Rational> grid;
  grid.reserve(items.size());
  for (const auto& s : items) grid.push_back(Rational::Parse(s));
  return grid;
}

// "weight:p_base:p_samp"
inline MixtureComponent ParseComponent(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) parts.clear(), parts.resize(4);
    } catch (const std::exception&) {
      parts.resize(4);
    }
  }
  if (parts.size() != 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "mixture component '" + text + "' is not weight:p_base:p_samp");
  }
  return MixtureComponent{parts[0], parts[1], parts[2]};
}

inline std::vector<HypothesisBundle> LoadCorpus(const RunConfig& cfg,
                                                std::ostream& err) {
  std::unique_ptr<std::ifstream> holder;
  std::istream& in = OpenInput(cfg.in_path, holder);
  ReadResult result = ReadBundles(
      in, cfg.common.lenient ? ParseMode::kLenient : ParseMode::kStrict);
  for (const auto& issue : result.issues) {
    err << "warning: line " << issue.line << ": " << issue.message << '\n';
  }
  if (!result.issues.empty()) {
    err << "warning: skipped " << result.issues.size() << " malformed line(s)\n";
  }
  return std::move(result.bundles);
}

inline ScoringOptions Scoring(const RunConfig& cfg) {
  return ScoringOptions{UnitFromMode(cfg.mode), cfg.common.Norm(),
                        cfg.common.threads};
}

inline void RunSimulate(const RunConfig& cfg, std::ostream& out) {
  SimCorpusSpec spec;
  if (!cfg.truths_path.empty()) {
    std::unique_ptr<std::ifstream> holder;
    spec.truths = ReadTruths(OpenInput(cfg.truths_path, holder));
  } else {
    spec.truths = BuiltinTranscripts(cfg.builtin, cfg.seed);
  }
  spec.channel.p_base = cfg.p_base;
  spec.channel.p_samp = cfg.p_samp;
  if (cfg.op_mix.size() != 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "--op-mix takes three weights: substitute,delete,insert");
  }
  spec.channel.op_mix = OpMix{cfg.op_mix[0], cfg.op_mix[1], cfg.op_mix[2]};
  spec.channel.num_samples = cfg.samples;
  spec.channel.seed = cfg.seed;
  spec.channel.char_mutation_share = cfg.char_share;
  for (const auto& m : cfg.mixture) spec.mixture.push_back(ParseComponent(m));
  const auto corpus = SimulateCorpus(spec, cfg.common.threads);
  std::unique_ptr<std::ofstream> holder;
  std::ostream& sink = OpenOutput(cfg.out_path, out, holder);
  WriteBundles(corpus, sink);
  Flush(sink, cfg.out_path);
}

inline void RunFilter(const RunConfig& cfg, std::ostream& out,
                      std::ostream& err) {
  const Rational tau = Rational::Parse(cfg.tau);
  const auto corpus = LoadCorpus(cfg, err);
  const FilterResult result = FilterCorpus(corpus, tau, Scoring(cfg));
  std::unique_ptr<std::ofstream> holder;
  std::ostream& sink = OpenOutput(cfg.out_path, out, holder);
  WriteAcceptedManifest(result, corpus, sink);
  Flush(sink, cfg.out_path);
  if (!cfg.scores_path.empty()) {
    std::unique_ptr<std::ofstream> scores_holder;
    std::ostream& scores = OpenOutput(cfg.scores_path, out, scores_holder);
    WriteScores(result, tau, scores);
    Flush(scores, cfg.scores_path);
  }
  err << "accepted " << result.accepted.size() << " of "
      << result.records.size() << " utterances at tau=" << cfg.tau << '\n';
}

inline void RunSweep(const RunConfig& cfg, std::ostream& out,
                     std::ostream& err) {
  const auto corpus = LoadCorpus(cfg, err);
  std::vector<SweepPoint> points;
  if (!cfg.fractions.empty()) {
    const auto fractions = ParseGrid(cfg.fractions);
    points = PercentageSweep(corpus, fractions, Scoring(cfg));
  } else {
    const auto taus = cfg.taus.empty() ? DefaultTauGrid() : ParseGrid(cfg.taus);
    points = ThresholdSweep(corpus, taus, Scoring(cfg), !cfg.no_terminal);
  }
  std::unique_ptr<std::ofstream> holder;
  std::ostream& sink = OpenOutput(cfg.out_path, out, holder);
  WriteSweep(points, sink);
  Flush(sink, cfg.out_path);
}

inline void RunCalibrate(const RunConfig& cfg, std::ostream& out,
                         std::ostream& err) {
  const auto corpus = LoadCorpus(cfg, err);
  std::optional<TokenUnit> acc_unit;
  if (!cfg.acc_unit.empty()) {
    acc_unit = cfg.acc_unit == "char" ? TokenUnit::kChar : TokenUnit::kWord;
  }
  const CalibrationReport report =
      CalibrationReportOf(corpus, cfg.bins, Scoring(cfg), acc_unit);
  std::unique_ptr<std::ofstream> holder;
  std::ostream& sink = OpenOutput(cfg.out_path, out, holder);
  WriteCalibration(report, sink);
  Flush(sink, cfg.out_path);
}

inline void AddCommon(CLI::App& sub, CommonOptions& c) {
  sub.add_option("--threads", c.threads, "Worker threads (0 = all cores)")
      ->capture_default_str();
  sub.add_flag("--lowercase", c.lowercase, "Lowercase before tokenizing");
  sub.add_flag("--strip-punct", c.strip_punct,
               "Drop ASCII punctuation except apostrophes");
  sub.add_flag("--include-spaces", c.include_spaces,
               "Count whitespace as characters in cdust mode");
  sub.add_flag("--collapse-whitespace", c.collapse_whitespace,
               "Collapse whitespace runs to one space (with --include-spaces)");
  sub.add_flag("--lenient", c.lenient,
               "Skip malformed input lines instead of failing");
  sub.add_option("--config", c.config, "key=value file of default options");
}

inline void AddMode(CLI::App& sub, RunConfig& cfg) {
  sub.add_option("--mode", cfg.mode, "dust (word tokens) or cdust (characters)")
      ->check(CLI::IsMember({"dust", "cdust"}))
      ->capture_default_str();
}

}  // namespace internal

// Entry point shared by the binary and the tests. Returns the exit status:
// 0 ok, 1 runtime failure, 2 usage error.
inline int Run(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Dropout-uncertainty pseudo-label filtering and calibration"};
  app.name("dust");
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand(
      "simulate", "Generate a hypothesis-bundle corpus from a noise channel");
  auto* truths = simulate->add_option("--truths", cfg.truths_path,
                                      "Transcript file, one per line");
  auto* builtin = simulate->add_option(
      "--builtin", cfg.builtin, "Use N generated transcripts instead");
  truths->excludes(builtin);
  simulate->add_option("--p-base", cfg.p_base, "Shared decode corruption rate")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  simulate->add_option("--p-samp", cfg.p_samp, "Per-sample perturbation rate")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  simulate->add_option("--op-mix", cfg.op_mix, "substitute,delete,insert weights")
      ->delimiter(',')
      ->expected(3)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
      ->capture_default_str();
  simulate->add_option("-T,--samples", cfg.samples, "Dropout samples per utterance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
  simulate->add_option("--mixture", cfg.mixture,
                       "Per-utterance severity arms weight:p_base:p_samp")
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  simulate->add_option("--char-share", cfg.char_share,
                       "Share of substitutions that mutate one character")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  simulate->add_option("-o,--out", cfg.out_path, "Bundle JSONL output")
      ->capture_default_str();
  internal::AddCommon(*simulate, cfg.common);

  auto* filter = app.add_subcommand("filter", "Write the accepted-PL manifest");
  filter->add_option("-i,--in", cfg.in_path, "Bundle JSONL input")->required();
  internal::AddMode(*filter, cfg);
  filter->add_option("--tau", cfg.tau, "Accept when pred_uncert <= tau")
      ->required();
  filter->add_option("-o,--out", cfg.out_path, "Manifest JSONL output")
      ->capture_default_str();
  filter->add_option("--scores", cfg.scores_path,
                     "Also write per-utterance uncertainty CSV");
  internal::AddCommon(*filter, cfg.common);

  auto* sweep = app.add_subcommand(
      "sweep", "Error rates of accepted sets over thresholds or fractions");
  sweep->add_option("-i,--in", cfg.in_path, "Bundle JSONL input")->required();
  internal::AddMode(*sweep, cfg);
  auto* taus = sweep->add_option("--taus", cfg.taus,
                                 "Ascending thresholds (default 0..1 step 0.05)")
                   ->delimiter(',')
                   ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  auto* fractions =
      sweep->add_option("--fractions", cfg.fractions,
                        "Ascending accepted fractions in (0, 1]")
          ->delimiter(',')
          ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  taus->excludes(fractions);
  sweep->add_flag("--no-terminal", cfg.no_terminal,
                  "Omit the accept-all-finite endpoint");
  sweep->add_option("-o,--out", cfg.out_path, "Sweep CSV output")
      ->capture_default_str();
  internal::AddCommon(*sweep, cfg.common);

  auto* calibrate =
      app.add_subcommand("calibrate", "ECE / MCE / RCE and reliability bins");
  calibrate->add_option("-i,--in", cfg.in_path, "Bundle JSONL input")
      ->required();
  internal::AddMode(*calibrate, cfg);
  calibrate->add_option("--bins", cfg.bins, "Equal-width confidence bins")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  calibrate->add_option("--acc-unit", cfg.acc_unit,
                        "Unit of the accuracy error (default: follows mode)")
      ->check(CLI::IsMember({"word", "char"}));
  calibrate->add_option("-o,--out", cfg.out_path, "Calibration CSV output")
      ->capture_default_str();
  internal::AddCommon(*calibrate, cfg.common);

  // Splice config-file entries in front of the command-line options.
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    for (std::size_t i = 0; i < args.size(); ++i) {
      std::string path;
      if (args[i] == "--config" && i + 1 < args.size()) {
        path = args[i + 1];
      } else if (args[i].rfind("--config=", 0) == 0) {
        path = args[i].substr(9);
      }
      if (path.empty()) continue;
      std::string command;
      std::vector<std::string> extra;
      // Keys given on the command line win over the file.
      std::set<std::string> given;
      for (const auto& a : args) {
        if (a == "-o") given.insert("out");
        if (a == "-i") given.insert("in");
        if (a == "-T") given.insert("samples");
        if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') - 2));
      }
      for (auto& e : internal::ConfigArgs(path, command)) {
        if (!given.contains(e.substr(2, e.find('=') - 2))) extra.push_back(e);
      }
      const bool has_command =
          !args.empty() && app.get_subcommand_no_throw(args[0]) != nullptr;
      const std::size_t insert_at = has_command ? 1 : 0;
      args.insert(args.begin() + static_cast<std::ptrdiff_t>(insert_at),
                  extra.begin(), extra.end());
      if (!has_command && !command.empty()) args.insert(args.begin(), command);
      break;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  CLI::App* chosen = app.get_subcommands().front();
  if (chosen == simulate && cfg.truths_path.empty() && cfg.builtin == 0) {
    err << "error: simulate needs --truths FILE or --builtin N\n";
    return 2;
  }
  err << "# dust " << chosen->get_name() << " resolved config\n";
  std::istringstream resolved(chosen->config_to_str(true, false));
  for (std::string line; std::getline(resolved, line);) {
    err << "#   " << line << '\n';
  }

  try {
    if (chosen == simulate) {
      internal::RunSimulate(cfg, out);
    } else if (chosen == filter) {
      internal::RunFilter(cfg, out, err);
    } else if (chosen == sweep) {
      internal::RunSweep(cfg, out, err);
    } else {
      internal::RunCalibrate(cfg, out, err);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace dust::cli
