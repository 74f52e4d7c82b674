// Copyright 2026 The Meaning Games Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// mgame: command-line front end for meaning-game analyses.
//
// Exit codes: 0 success, 1 input or validation error, 2 usage error,
// 3 ambiguous prediction, 4 size cap exceeded, 5 analysis not applicable.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "meaning/beliefs.h"
#include "meaning/centering.h"
#include "meaning/compound.h"
#include "meaning/equilibrium.h"
#include "meaning/game.h"
#include "meaning/scenario_io.h"

namespace {

using namespace meaning;

constexpr int kExitInput = 1;
constexpr int kExitUsage = 2;
constexpr int kExitAmbiguous = 3;
constexpr int kExitSize = 4;
constexpr int kExitNotApplicable = 5;

struct Options {
  std::string game_path;
  std::string receiver_game_path;
  std::string discourse_path;
  std::string off_path;
  std::string format = "table";
  std::string out_path;
  uint64_t seed = 1;
  std::optional<uint64_t> cap;
  int depth = 4;
  int random_size = 0;
  std::optional<double> parallelism_bonus;
  bool timing = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Complete n x n game with strictly ordered priors and message costs.
MeaningGame RandomGame(int n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  std::vector<double> prior, cost;
  for (int i = 0; i < n; ++i) {
    prior.push_back(unit(rng));
    cost.push_back(unit(rng) * 0.5);
  }
  std::sort(prior.rbegin(), prior.rend());
  std::sort(cost.begin(), cost.end());
  double total = 0.0;
  for (double p : prior) total += p;
  for (double& p : prior) p /= total;
  GameBuilder b;
  for (int i = 0; i < n; ++i) {
    b.AddContent("c" + std::to_string(i + 1));
    b.AddMessage("m" + std::to_string(i + 1));
  }
  b.SetPrior(prior);
  b.SetSuccessBonus(1.0);
  for (int i = 0; i < n; ++i) b.SetMessageCost("m" + std::to_string(i + 1), cost[i]);
  return b.Build();
}

struct Input {
  MeaningGame game;
  std::string bytes;
  std::vector<std::string> warnings;
  std::optional<OffPathRule> rule;
  std::optional<uint64_t> cap;
};

Input ReadGameInput(const Options& o) {
  Input in;
  if (o.random_size > 0) {
    if (!o.game_path.empty()) throw UsageError("--random and --game are exclusive");
    if (o.random_size > 6) throw UsageError("--random: size must be at most 6");
    in.game = RandomGame(o.random_size, o.seed);
    in.bytes = SerializeGame(in.game);
    return in;
  }
  if (o.game_path.empty()) throw UsageError("--game <path> is required");
  in.bytes = ReadFile(o.game_path);
  GameFile f = ParseGame(in.bytes, o.game_path);
  in.game = std::move(f.game);
  in.warnings = std::move(f.warnings);
  in.rule = f.off_path;
  in.cap = f.cap;
  return in;
}

EnumerationOptions Enumeration(const Options& o, std::optional<OffPathRule> file_rule,
                               std::optional<uint64_t> file_cap) {
  EnumerationOptions e;
  if (const char* env = std::getenv("MGAME_CAP")) {
    try {
      e.cap = std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("MGAME_CAP: not an integer: '") + env + "'");
    }
  }
  if (file_cap) e.cap = *file_cap;
  if (o.cap) e.cap = *o.cap;
  if (file_rule) e.rule = *file_rule;
  if (!o.off_path.empty()) {
    auto rule = ParseOffPathRule(o.off_path);
    if (!rule) throw UsageError("--off-path: expected 'prior' or 'uniform'");
    e.rule = *rule;
  }
  return e;
}

DiscourseFile ReadDiscourseInput(const Options& o, std::string& bytes) {
  if (o.discourse_path.empty()) throw UsageError("--discourse <path> is required");
  bytes = ReadFile(o.discourse_path);
  DiscourseFile f = ParseDiscourse(bytes, o.discourse_path);
  ResolveConfig& c = f.discourse.config;
  c.enumeration = Enumeration(o, c.enumeration.rule, std::nullopt);
  if (o.parallelism_bonus) {
    if (*o.parallelism_bonus < 0.0) {
      throw UsageError("--parallelism-bonus must be nonnegative");
    }
    c.parallelism_bonus = *o.parallelism_bonus;
  }
  return f;
}

struct Outcome {
  Json body;
  int code = 0;
  std::vector<std::string> warnings;
  std::string bytes;
};

Outcome Run(const std::string& command, const Options& o) {
  Outcome out;
  if (command == "validate") {
    Input in = ReadGameInput(o);
    out.bytes = in.bytes;
    out.body = ValidateReport(in.game, in.warnings);
  } else if (command == "solve") {
    Input in = ReadGameInput(o);
    out.bytes = in.bytes;
    out.warnings = in.warnings;
    const auto e = Enumeration(o, in.rule, in.cap);
    out.body = SolveReport(in.game, EnumeratePureEquilibria(in.game, e), e);
  } else if (command == "pareto" || command == "predict") {
    Input in = ReadGameInput(o);
    out.bytes = in.bytes;
    out.warnings = in.warnings;
    const auto e = Enumeration(o, in.rule, in.cap);
    const Prediction p = Predict(in.game, e);
    out.body = PredictReport(in.game, p, e, command == "pareto");
    if (command == "predict" && p.ambiguous) out.code = kExitAmbiguous;
  } else if (command == "resolve" || command == "compound") {
    DiscourseFile f = ReadDiscourseInput(o, out.bytes);
    out.warnings = f.warnings;
    const ResolveResult r = Resolve(f.discourse);
    out.body = command == "resolve" ? ResolveReport(f.discourse, r)
                                    : CompoundReport(r);
    if (r.ambiguous()) out.code = kExitAmbiguous;
  } else if (command == "levelk") {
    Input in = ReadGameInput(o);
    out.bytes = in.bytes;
    out.warnings = in.warnings;
    MeaningGame g_r = in.game;
    if (!o.receiver_game_path.empty()) {
      const std::string rb = ReadFile(o.receiver_game_path);
      GameFile rf = ParseGame(rb, o.receiver_game_path);
      g_r = std::move(rf.game);
      out.bytes += rb;
      for (auto& w : rf.warnings) out.warnings.push_back(std::move(w));
    }
    const auto e = Enumeration(o, in.rule, in.cap);
    LevelKConfig cfg;
    cfg.depth = o.depth;
    cfg.rule = e.rule;
    out.body = LevelKReport(in.game, g_r, LevelKStrategies(in.game, g_r, cfg), e.rule);
  } else if (command == "explain") {
    Input in = ReadGameInput(o);
    out.bytes = in.bytes;
    out.warnings = in.warnings;
    out.body = ExplainReport(in.game);
  }
  return out;
}

void AddCommon(CLI::App* sub, Options& o, bool game, bool discourse) {
  if (game) {
    sub->add_option("--game", o.game_path, "Game file (JSON)");
    sub->add_option("--random", o.random_size,
                    "Use a random complete n x n game with strict orderings")
        ->check(CLI::Range(1, 6));
    sub->add_option("--seed", o.seed, "Seed for --random");
  }
  if (discourse) {
    sub->add_option("--discourse", o.discourse_path, "Discourse file (JSON)");
    sub->add_option("--parallelism-bonus", o.parallelism_bonus,
                    "Override the configured parallelism bonus");
  }
  sub->add_option("--off-path", o.off_path, "Off-path belief rule")
      ->check(CLI::IsMember({"prior", "uniform"}));
  sub->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"table", "machine"}));
  sub->add_option("--out", o.out_path, "Write the report to this file");
  sub->add_option("--cap", o.cap, "Maximum number of pure profiles");
  sub->add_flag("--timing", o.timing, "Include elapsed time in machine output");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Meaning-game solver: equilibria, Pareto prediction, "
               "anaphora resolution"};
  app.require_subcommand(1);
  Options o;
  struct Sub {
    const char* name;
    const char* help;
    bool game;
    bool discourse;
  };
  const Sub subs[] = {
      {"validate", "Check a game file against the game invariants", true, false},
      {"solve", "List every pure equilibrium", true, false},
      {"pareto", "List the Pareto-optimal pure equilibria", true, false},
      {"predict", "Predicted play with ambiguity flag", true, false},
      {"resolve", "Resolve the references of a discourse", false, true},
      {"compound", "Compound-game solutions with constituent verdicts", false, true},
      {"levelk", "Level-k iterated best responses", true, false},
      {"explain", "Symbolic E1/E2 decomposition of a 2x2 game", true, false},
  };
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    AddCommon(sub, o, s.game, s.discourse);
    if (std::string(s.name) == "levelk") {
      sub->add_option("--depth", o.depth, "Number of levels above 0")
          ->check(CLI::Range(0, kMaxLevelDepth));
      sub->add_option("--receiver-game", o.receiver_game_path,
                      "Receiver's estimate of the game (defaults to --game)");
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  std::string echo = "mgame";
  for (int i = 1; i < argc; ++i) echo += std::string(" ") + argv[i];

  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    outcome = Run(command, o);
  } catch (const UsageError& e) {
    std::cerr << "mgame " << command << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "mgame " << command << ": " << e.what() << "\n";
    return kExitInput;
  } catch (const SizeError& e) {
    std::cerr << "mgame " << command << ": " << e.what()
              << "; --cap or MGAME_CAP raises the limit\n";
    return kExitSize;
  } catch (const NotApplicableError& e) {
    std::cerr << "mgame " << command << ": " << e.what() << "\n";
    return kExitNotApplicable;
  } catch (const std::invalid_argument& e) {
    const std::string where =
        !o.discourse_path.empty() ? o.discourse_path : o.game_path;
    std::cerr << "mgame " << command << ": " << where << ": " << e.what()
              << "\n";
    return kExitInput;
  }
  const double elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                start)
          .count();

  for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << "\n";
  Json report;
  report["command"] = echo;
  report["config_hash"] = ConfigHash(outcome.bytes + '\0' + echo);
  for (auto& [key, value] : outcome.body.items()) report[key] = value;
  const bool machine = o.format == "machine";
  if (!machine || o.timing) report["elapsed_ms"] = std::round(elapsed_ms * 1000.0) / 1000.0;
  const std::string text = machine ? RenderMachine(report) : RenderTable(report);
  if (o.out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream file(o.out_path, std::ios::binary);
    if (!file || !(file << text)) {
      std::cerr << "mgame " << command << ": --out " << o.out_path
                << ": cannot write\n";
      return kExitInput;
    }
  }
  return outcome.code;
}
