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

// Pure-strategy complete Bayesian equilibria of meaning games: belief
// computation, profile verification, enumeration, Pareto selection.

#ifndef MEANING_EQUILIBRIUM_H_
#define MEANING_EQUILIBRIUM_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "meaning/game.h"

namespace meaning {

// Belief at messages nobody sends with positive probability.
enum class OffPathRule {
  kPriorRestricted,    // prior restricted to contents grammatical for m
  kUniformRestricted,  // uniform over contents grammatical for m
};

std::string_view OffPathRuleName(OffPathRule rule);

// Deterministic profile: sender[c] is the message sent for content c,
// receiver[m] the content chosen for message m (-1 for messages without any
// grammatical content).
struct PureProfile {
  std::vector<int> sender;
  std::vector<int> receiver;

  auto operator<=>(const PureProfile&) const = default;
};

struct Profile {
  SenderStrategy sender;
  ReceiverStrategy receiver;
  bool deterministic = false;
};

Profile ToProfile(const MeaningGame& game, const PureProfile& pure);
// Present iff every row of the profile is a point distribution.
std::optional<PureProfile> ToPure(const Profile& profile);

struct BeliefSystem {
  // posterior[m] is empty for messages without grammatical contents.
  std::vector<std::vector<double>> posterior;
  std::vector<bool> on_path;
  OffPathRule off_path_rule = OffPathRule::kPriorRestricted;
};

BeliefSystem PosteriorBeliefs(const MeaningGame& game,
                              const SenderStrategy& sender, OffPathRule rule);

// Profitable unilateral deviation. For the sender, `at` is the content and
// `from`/`to` are messages; for the receiver, `at` is the message and
// `from`/`to` are contents.
struct Deviation {
  Player player = Player::kSender;
  size_t at = 0;
  size_t from = 0;
  size_t to = 0;
  double gain = 0.0;
};

struct EquilibriumCheck {
  bool is_equilibrium = false;
  std::optional<Deviation> witness;
  explicit operator bool() const { return is_equilibrium; }
};

// Throws invalid_argument when the profile is not a valid strategy pair for
// the game.
EquilibriumCheck IsEquilibrium(const MeaningGame& game, const Profile& profile,
                               OffPathRule rule = OffPathRule::kPriorRestricted);

// Same check specialized to deterministic profiles.
EquilibriumCheck IsPureEquilibrium(
    const MeaningGame& game, const PureProfile& profile,
    OffPathRule rule = OffPathRule::kPriorRestricted);

enum class EquilibriumKind { kSeparating, kPooling, kPartial };

std::string_view EquilibriumKindName(EquilibriumKind kind);

struct EquilibriumReport {
  PureProfile pure;
  Profile profile;
  BeliefSystem beliefs;
  double success = 0.0;
  double eu_sender = 0.0;
  double eu_receiver = 0.0;
  EquilibriumKind kind = EquilibriumKind::kPartial;
};

EquilibriumReport MakeReport(const MeaningGame& game, const PureProfile& pure,
                             OffPathRule rule);

class SizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotApplicableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr uint64_t kDefaultProfileCap = 10'000'000;

struct EnumerationOptions {
  OffPathRule rule = OffPathRule::kPriorRestricted;
  uint64_t cap = kDefaultProfileCap;
};

// Number of deterministic profiles of the game, saturating at UINT64_MAX.
uint64_t CountPureProfiles(const MeaningGame& game);

// All deterministic equilibria, ordered lexicographically by
// (sender map, receiver map). Prunes receiver maps to best-response sets and
// splits sender maps across OpenMP threads; the output does not depend on the
// thread count.
std::vector<EquilibriumReport> EnumeratePureEquilibria(
    const MeaningGame& game, const EnumerationOptions& options = {});

// Reference implementation: checks every deterministic profile in sequence.
std::vector<EquilibriumReport> EnumeratePureEquilibriaSerial(
    const MeaningGame& game, const EnumerationOptions& options = {});

// Removes reports Pareto-dominated by another report; order preserved.
std::vector<EquilibriumReport> ParetoFilter(
    const std::vector<EquilibriumReport>& reports);

// On-path behaviour of a deterministic profile: for each content in the
// prior's support, the message sent and the content it is read as.
struct InterpretationEntry {
  size_t content;
  size_t message;
  int interpreted;
  auto operator<=>(const InterpretationEntry&) const = default;
};
std::vector<InterpretationEntry> InterpretationMap(const MeaningGame& game,
                                                   const PureProfile& profile);

struct Prediction {
  std::vector<EquilibriumReport> equilibria;
  // More than one prediction with distinct interpretation maps.
  bool ambiguous = false;
};

Prediction Predict(const MeaningGame& game,
                   const EnumerationOptions& options = {});

// Pairs the i-th most probable content with the i-th cheapest message.
// Requires a complete game with |C| = |M|, strictly ordered priors and
// strictly ordered message-only costs; otherwise NotApplicableError.
PureProfile AssortativeSolution(const MeaningGame& game);

}  // namespace meaning

#endif  // MEANING_EQUILIBRIUM_H_
