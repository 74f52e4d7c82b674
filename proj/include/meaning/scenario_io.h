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

// Game and discourse files (JSON syntax), and run reports rendered either as
// aligned tables or as machine-readable JSON.

#ifndef MEANING_SCENARIO_IO_H_
#define MEANING_SCENARIO_IO_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "meaning/beliefs.h"
#include "meaning/centering.h"
#include "meaning/compound.h"
#include "meaning/equilibrium.h"
#include "meaning/game.h"

namespace meaning {

using Json = nlohmann::ordered_json;

// `where` is "line L, column C" for syntax errors and a JSON pointer such as
// "/messages/1/cost" for field errors.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string source, std::string where, const std::string& what);
  const std::string& source() const { return source_; }
  const std::string& where() const { return where_; }

 private:
  std::string source_;
  std::string where_;
};

struct GameFile {
  MeaningGame game;
  std::optional<OffPathRule> off_path;
  std::optional<uint64_t> cap;
  std::vector<std::string> warnings;
};

// Throws ParseError for malformed input and for games failing validation.
GameFile ParseGame(std::string_view text, const std::string& source = "<input>");
GameFile LoadGame(const std::string& path);

// Canonical form: explicit pair entries, per-player tables when they differ.
Json GameToJson(const MeaningGame& game);
std::string SerializeGame(const MeaningGame& game);

std::optional<OffPathRule> ParseOffPathRule(std::string_view name);

struct DiscourseFile {
  Discourse discourse;
  std::vector<std::string> warnings;
};

DiscourseFile ParseDiscourse(std::string_view text,
                             const std::string& source = "<input>");
DiscourseFile LoadDiscourse(const std::string& path);

struct UnresolvedSlot {
  size_t utterance = 0;
  std::string slot;
};

std::vector<UnresolvedSlot> UnresolvedSlots(const Discourse& discourse);

// State after ingesting the utterances before the first unresolved slot.
struct LoadedDiscourse {
  DiscourseState state;
  std::vector<UnresolvedSlot> unresolved;
};
LoadedDiscourse InitialState(const Discourse& discourse);

std::string ReadFile(const std::string& path);

// 64-bit FNV-1a, printed as 16 hex digits.
std::string ConfigHash(std::string_view bytes);

// Reports are JSON objects with "command", "config_hash", optional
// "summary" (flat key/value object) and "tables" (each with "title",
// "columns" and "rows"). The table rendering prints exactly that data.
std::string RenderMachine(const Json& report);
std::string RenderTable(const Json& report);

std::string PureMapText(const MeaningGame& game, const PureProfile& pure,
                        bool sender);

Json EquilibriaTable(const MeaningGame& game,
                     const std::vector<EquilibriumReport>& reports,
                     const std::string& title);

Json ValidateReport(const MeaningGame& game, const std::vector<std::string>&
                                                 load_warnings);
Json SolveReport(const MeaningGame& game,
                 const std::vector<EquilibriumReport>& reports,
                 const EnumerationOptions& options);
Json PredictReport(const MeaningGame& game, const Prediction& prediction,
                   const EnumerationOptions& options, bool pareto_only);
Json ResolveReport(const Discourse& discourse, const ResolveResult& result);
Json CompoundReport(const ResolveResult& result);
Json LevelKReport(const MeaningGame& g_s, const MeaningGame& g_r,
                  const LevelKResult& result, OffPathRule rule);

// Symbolic E1/E2 decomposition for complete 2x2 games. NotApplicableError
// for other shapes.
Json ExplainReport(const MeaningGame& game);

}  // namespace meaning

#endif  // MEANING_SCENARIO_IO_H_
