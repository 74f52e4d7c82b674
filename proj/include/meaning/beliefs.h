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

// Bounded nested-belief reasoning: level-k iterated best response between
// possibly different game estimates, belief trees checked against an
// observed message, and message-centred pruning of a game.

#ifndef MEANING_BELIEFS_H_
#define MEANING_BELIEFS_H_

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "meaning/equilibrium.h"
#include "meaning/game.h"

namespace meaning {

enum class Level0Sender { kCheapestGrammatical };
enum class Level0Receiver { kPriorMaximum };

inline constexpr int kMaxLevelDepth = 256;

struct LevelKConfig {
  int depth = 4;
  Level0Sender level0_sender = Level0Sender::kCheapestGrammatical;
  Level0Receiver level0_receiver = Level0Receiver::kPriorMaximum;
  OffPathRule rule = OffPathRule::kPriorRestricted;
  int max_depth = kMaxLevelDepth;
};

struct LevelKResult {
  // levels[k] for k = 0..depth.
  std::vector<PureProfile> levels;
  // First k with levels[k] == levels[k + 1].
  std::optional<int> fixed_at;
  // Set when a profile recurs without being fixed: levels[cycle_start] ==
  // levels[cycle_start + cycle_length].
  std::optional<int> cycle_start;
  int cycle_length = 0;

  bool converged() const { return fixed_at.has_value(); }
  bool oscillating() const { return cycle_start.has_value(); }
};

// Cheapest grammatical message per content under the sender's model of
// `game`, ties by message id.
std::vector<int> Level0SenderMap(const MeaningGame& game);
// Prior-maximal grammatical content per message, ties by content id; -1 for
// messages without contents.
std::vector<int> Level0ReceiverMap(const MeaningGame& game);

// Best responses with ties broken by the lexicographically smallest id.
std::vector<int> SenderBestResponse(const MeaningGame& game,
                                    const std::vector<int>& receiver);
std::vector<int> ReceiverBestResponse(const MeaningGame& game,
                                      const std::vector<int>& sender,
                                      OffPathRule rule);

// Level k + 1 sender answers the level-k receiver under g_S; level k + 1
// receiver answers the level-k sender under g_R. invalid_argument when the
// two games differ in contents, messages or edges, or the depth is outside
// [0, max_depth].
LevelKResult LevelKStrategies(const MeaningGame& g_s, const MeaningGame& g_r,
                              const LevelKConfig& config = {});

enum class Viewpoint {
  kSender,    // S intending content `focus`
  kReceiver,  // R interpreting message `focus`
};

struct BeliefNode {
  Viewpoint viewpoint = Viewpoint::kSender;
  size_t focus = 0;
  std::string label;
  MeaningGame game_estimate;
  // Estimates of the other player's viewpoints.
  std::vector<BeliefNode> children;
};

// Empty when viewpoints alternate along every path, foci are in range and
// all estimates share contents, messages and edges.
std::vector<std::string> ValidateBeliefTree(const BeliefNode& root);

// Strategies a node attributes to both players. Leaves play level 0 under
// their own estimate. An inner node assembles the other player's rows from
// its children (level 0 for rows no child covers) and best-responds to them
// under its own estimate.
PureProfile ImpliedProfile(const BeliefNode& node,
                           OffPathRule rule = OffPathRule::kPriorRestricted);

// Path of child indices from the root.
using NodePath = std::vector<size_t>;

// Nodes whose implied sender strategy never sends `observed`. Preorder.
std::vector<NodePath> ConsistencyCheck(
    const BeliefNode& root, const std::string& observed,
    OffPathRule rule = OffPathRule::kPriorRestricted);

// The shared game when every estimate in the tree equals the root's within
// kTolerance.
std::optional<MeaningGame> CollapseCommonKnowledge(const BeliefNode& root);

bool ApproxEqual(const MeaningGame& a, const MeaningGame& b,
                 double tolerance = kTolerance);

// Restriction of `game` to the given contents and messages (sorted indices);
// the prior is renormalized.
MeaningGame Subgame(const MeaningGame& game, const std::vector<size_t>& contents,
                    const std::vector<size_t>& messages);

// Keeps the contents and messages within `threshold` of `observed` in the
// edge graph weighted by the larger of the two players' round-trip pair
// costs, then the connected component of `observed`. invalid_argument when
// nothing with positive prior survives.
MeaningGame PruneByMessage(const MeaningGame& game, const std::string& observed,
                           double threshold =
                               std::numeric_limits<double>::infinity());

}  // namespace meaning

#endif  // MEANING_BELIEFS_H_
