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

// Compound games: constituent meaning games played in parallel over slots
// (a sentence and its noun phrases), coupled by joint feasibility of message
// and content assignments. Solved by flattening into one meaning game whose
// contents and messages are the feasible joint assignments.

#ifndef MEANING_COMPOUND_H_
#define MEANING_COMPOUND_H_

#include <string>
#include <vector>

#include "meaning/equilibrium.h"
#include "meaning/game.h"

namespace meaning {

struct Slot {
  std::string id;
  std::string description;
};

struct ConstituentGame {
  Slot slot;
  MeaningGame game;
  double weight = 1.0;
};

// One index per constituent, into that constituent's contents or messages.
using JointAssignment = std::vector<size_t>;

struct CompoundGame {
  std::vector<ConstituentGame> constituents;
  // Joint message assignments declared mutually realizable.
  std::vector<JointAssignment> feasible_messages;
  // Joint content assignments declared consistent.
  std::vector<JointAssignment> feasible_contents;
};

// Every combination of indices for the given sizes, lexicographic.
std::vector<JointAssignment> FullProduct(const std::vector<size_t>& sizes);

// Compound whose feasibility relations are the full products, i.e. with no
// cross-constraints.
CompoundGame Unconstrained(std::vector<ConstituentGame> constituents);

std::vector<std::string> ValidateCompound(const CompoundGame& compound);

inline constexpr uint64_t kDefaultFlattenCap = 1'000'000;

// Composite game: prior is the product of constituent priors renormalized
// over feasible joint contents; each utility is the weighted sum of the
// constituent utilities evaluated componentwise. Constituent successes on a
// mismatched joint turn become partial credit. Throws SizeError when
// |feasible contents| * |feasible messages| exceeds `cap`, and
// invalid_argument for malformed compounds.
MeaningGame Flatten(const CompoundGame& compound,
                    uint64_t cap = kDefaultFlattenCap);

// Drops (content, message) pairs of `game` whose round-trip cost
// (sender-side plus receiver-side, either player) exceeds `threshold`.
MeaningGame NeglectCostlyPairs(const MeaningGame& game, double threshold);

struct ConstituentVerdict {
  std::string slot;
  // Global on-path interpretations agree with a Pareto-optimal equilibrium of
  // the constituent played alone.
  bool optimal = false;
  // (message, content) pairs of this constituent read on the global path.
  std::vector<std::pair<size_t, size_t>> readings;
};

struct CompoundSolution {
  EquilibriumReport report;  // in the flattened game
  std::vector<ConstituentVerdict> verdicts;
  double optimal_weight = 0.0;
};

struct CompoundPrediction {
  MeaningGame flat;
  // Pareto-optimal equilibria of the flattened game, with verdicts.
  std::vector<CompoundSolution> pareto;
  // Survivors of the refinement: when the Pareto set is ambiguous, those
  // with the largest total weight of constituent-optimal constituents.
  std::vector<CompoundSolution> solutions;
  std::vector<Prediction> constituent_predictions;
  bool refined = false;
  bool ambiguous = false;
};

CompoundPrediction PredictCompound(const CompoundGame& compound,
                                   const EnumerationOptions& options = {},
                                   uint64_t flatten_cap = kDefaultFlattenCap);

}  // namespace meaning

#endif  // MEANING_COMPOUND_H_
