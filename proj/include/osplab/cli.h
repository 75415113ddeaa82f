// Copyright 2026 The OSPLab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line harness: `check`, `direct`, `pubproj`, `expmech` and
// `fixtures`. Exit codes: 0 success, 1 verdict or bound failure, 2 usage or
// input error.

#ifndef OSPLAB_CLI_H_
#define OSPLAB_CLI_H_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace osplab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct ExperimentConfig {
  std::string subcommand;
  uint64_t seed = 1;
  uint64_t trials = 0;
  unsigned threads = 1;
  std::string out;
  bool json = false;

  // check
  std::string mechanism, valuations, signalling;
  std::string notion = "osp";
  double epsilon = 0.0;
  bool counterexamples = false;

  // direct
  std::string construction = "t1";
  double gamma = 2.0;
  int n = 2;
  std::string choice, fines, probs, emit_curve, emit_surface;
  bool cross_check = false;

  // pubproj
  int c = -1;
  std::string c_rule;
  double delta = 0.0;
  std::string rule = "uniform";
  double bayes_g = 0.0;
  bool compare = false;

  // expmech
  std::string f_table, d = "auto", reactions;
  bool imposing = false;
  bool shuffle = false;

  // fixtures
  std::string dir = "fixtures";
};

// Tabular result: header plus rows of already formatted cells.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// RFC 4180: fields with commas, quotes or line breaks are quoted.
std::string ToCsv(const Table& table);
// Array of objects keyed by the header; numeric-looking cells stay numbers.
std::string ToJson(const Table& table);

// Runs one configured experiment. CSV (or JSON) goes to config.out, or to
// `out` when no path is set; the human-readable report then goes to `err`,
// otherwise to `out`.
int Run(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

// Parses arguments (OSPLAB_SEED is the seed fallback) and runs.
int Main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace osplab

#endif  // OSPLAB_CLI_H_
