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

// Discourse model with centering structures (Cf, Cp, Cb, Rule 1), salience
// dynamics, and construction of the noun-phrase and sentence games used to
// resolve anaphoric references.

#ifndef MEANING_CENTERING_H_
#define MEANING_CENTERING_H_

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "meaning/compound.h"
#include "meaning/equilibrium.h"
#include "meaning/game.h"

namespace meaning {

// Ranked subject > direct object > indirect object > other complements >
// adjuncts.
enum class GrammaticalFunction {
  kSubject,
  kDirectObject,
  kIndirectObject,
  kOtherComplement,
  kAdjunct,
};

// 1 (subject) .. 5 (adjunct).
int FunctionRank(GrammaticalFunction function);
std::string_view FunctionName(GrammaticalFunction function);
std::optional<GrammaticalFunction> ParseFunction(std::string_view name);

enum class FormTag { kPronoun, kDefiniteNp, kProperName };

std::string_view FormName(FormTag form);
std::optional<FormTag> ParseForm(std::string_view name);

struct ExpressionForm {
  FormTag tag = FormTag::kProperName;
  double lightness_cost = 0.0;
};

// Lightness costs per form; pronoun < definite_np <= proper_name.
struct FormCosts {
  double pronoun = 0.0;
  double definite_np = 0.5;
  double proper_name = 0.5;

  double Cost(FormTag tag) const;
  ExpressionForm Form(FormTag tag) const { return {tag, Cost(tag)}; }
  std::vector<std::string> Validate() const;
};

using Features = std::map<std::string, std::string>;

struct Entity {
  std::string id;
  std::string label;
  Features features;
};

// A referring-expression option such as 'he' or 'the man'.
struct Expression {
  std::string id;
  std::string label;
  FormTag form = FormTag::kPronoun;
  Features features;
};

// Every feature the expression requires is carried with the same value by
// the entity.
bool Compatible(const Entity& entity, const Expression& expression);

using CompatibilityPredicate =
    std::function<bool(const Entity&, const Expression&)>;

struct Realization {
  std::string entity;      // empty while unresolved
  std::string slot;        // set for references that are resolved by a game
  std::string expression;  // expression option used in the slot
  GrammaticalFunction function = GrammaticalFunction::kAdjunct;
  ExpressionForm form;
  std::string surface;

  bool resolved() const { return !entity.empty(); }
};

// Realizations are listed in surface order.
struct Utterance {
  size_t index = 0;
  std::string text;
  std::vector<Realization> realizations;
};

// Entities of u ordered by function rank, ties by surface order; an entity
// realized more than once keeps its best rank. Unresolved realizations are
// skipped.
std::vector<std::string> Cf(const Utterance& u);
std::optional<std::string> Cp(const Utterance& u);
// Highest-ranked element of Cf(previous) realized in current.
std::optional<std::string> Cb(const Utterance& previous,
                              const Utterance& current);
// Cb of history[i]; absent for i == 0.
std::optional<std::string> Cb(std::span<const Utterance> history, size_t i);

bool RealizedByPronoun(const Utterance& u, const std::string& entity);

struct RuleOneViolation {
  size_t utterance = 0;  // position in the discourse
  std::string cb;
  // Elements of Cf(u_{i-1}) realized by a pronoun in u_i.
  std::vector<std::string> pronominalized;
};

// Throws invalid_argument if any realization is unresolved.
std::vector<RuleOneViolation> RuleOneCheck(std::span<const Utterance> discourse);

struct SalienceParams {
  double initial = 1.0;
  // An entity realized at function rank k gains rank_weight^k.
  double rank_weight = 0.5;
  // Added to the salience of the prospective Cb when building NP games.
  double cb_bonus = 0.0;
};

// Multiplicative salience boosts after a committed reference; lighter forms
// boost more: pronoun >= definite_np >= proper_name >= 1.
struct AccommodationParams {
  double pronoun = 1.5;
  double definite_np = 1.1;
  double proper_name = 1.0;

  double Boost(FormTag tag) const;
  std::vector<std::string> Validate() const;
};

class DiscourseState {
 public:
  DiscourseState() = default;
  DiscourseState(const std::vector<std::string>& entities,
                 SalienceParams params = {});

  const std::vector<Utterance>& history() const { return history_; }
  const std::map<std::string, double>& salience() const { return salience_; }
  const std::vector<std::vector<std::string>>& cf_cache() const {
    return cf_cache_;
  }
  const SalienceParams& params() const { return params_; }

  double Salience(const std::string& entity) const;

  // Appends u and adds the rank contributions of its realized entities.
  DiscourseState Ingest(const Utterance& u) const;
  DiscourseState WithSalience(const std::string& entity, double score) const;

 private:
  std::vector<Utterance> history_;
  std::map<std::string, double> salience_;
  std::vector<std::vector<std::string>> cf_cache_;
  SalienceParams params_;
};

// Salience scores of the candidates, normalized. invalid_argument for an
// empty candidate list or unknown entities.
std::vector<double> SaliencePriors(const DiscourseState& state,
                                   std::span<const std::string> candidates);

DiscourseState Accommodate(const DiscourseState& state,
                           const std::string& entity, FormTag form,
                           const AccommodationParams& params);

struct Lexicon {
  std::vector<Entity> entities;
  std::vector<Expression> expressions;

  const Entity& entity(std::string_view id) const;
  const Expression& expression(std::string_view id) const;
};

struct NpSlot {
  std::string id;
  std::vector<std::string> candidates;
  std::vector<std::string> options;  // expression ids
  // Extralinguistic prior replacing salience, by entity.
  std::map<std::string, double> prior_override;
};

struct NpGameConfig {
  FormCosts form_costs;
  double success_bonus = 1.0;
};

// Contents are the candidates, messages the expression options. Prior from
// salience (the prospective Cb gets cb_bonus first) unless overridden; both
// players pay the option's lightness cost on the sender side. Incompatible
// pairs are absent edges. Throws invalid_argument when a candidate has no
// compatible option.
MeaningGame BuildNpGame(const DiscourseState& state, const NpSlot& slot,
                        const Lexicon& lexicon, const NpGameConfig& config,
                        const CompatibilityPredicate& compatible = Compatible);

// Sentence-level proposition: which entity fills each NP slot.
struct Proposition {
  std::string id;
  std::string label;
  std::map<std::string, std::string> roles;  // slot -> entity
  std::optional<double> prior;
};

// Sentence-level message: which expression fills each NP slot.
struct SentenceForm {
  std::string id;
  std::string label;
  std::map<std::string, std::string> realizes;  // slot -> expression
};

struct PairCost {
  std::string content;
  std::string message;
  double cost = 0.0;
};

struct CompoundSpec {
  std::string slot = "sentence";
  std::string description;
  std::vector<Proposition> propositions;
  std::vector<SentenceForm> sentences;
  std::string observed;  // sentence actually uttered
  std::vector<PairCost> extra_costs;
  double weight = 1.0;
  double np_weight = 1.0;
  std::optional<double> neglect_threshold;
};

struct ResolveConfig {
  SalienceParams salience;
  AccommodationParams accommodation;
  FormCosts form_costs;
  double success_bonus = 1.0;
  // Cost charged to sentence-level pairs whose slot assignment breaks the
  // grammatical-function order of the previous utterance.
  double parallelism_bonus = 0.0;
  EnumerationOptions enumeration;
};

struct DiscourseUtterance {
  Utterance utterance;
  std::map<std::string, NpSlot> slots;
  std::optional<CompoundSpec> compound;
};

struct Discourse {
  Lexicon lexicon;
  std::vector<DiscourseUtterance> utterances;
  ResolveConfig config;
};

// Sentence game for a compound utterance. parallel[i] tells whether
// proposition i keeps the relative Cf order of the previous utterance; the
// others pay parallelism_bonus on both sides of every pair. Pairs whose slot
// fillers are incompatible with the sentence's expressions are absent, and
// pairs costlier than the neglect threshold are dropped.
struct SentenceGame {
  MeaningGame game;
  std::vector<bool> parallel;
};

SentenceGame BuildSentenceGame(const DiscourseState& state,
                               const DiscourseUtterance& du,
                               const Lexicon& lexicon,
                               const ResolveConfig& config);

// Constituents: the sentence game, then one NP game per slot in the order the
// slots appear in the utterance.
CompoundGame BuildCompoundGame(const DiscourseState& state,
                               const DiscourseUtterance& du,
                               const Lexicon& lexicon,
                               const ResolveConfig& config);

struct SlotResolution {
  size_t utterance = 0;
  std::string slot;
  std::string expression;
  std::optional<std::string> entity;
  std::vector<std::string> alternatives;  // when ambiguous
  bool via_compound = false;
  std::optional<MeaningGame> game;  // NP game, for slots solved alone
  std::optional<Prediction> prediction;
};

struct CompoundResolution {
  size_t utterance = 0;
  CompoundGame game;
  CompoundPrediction prediction;
  std::vector<bool> parallel;
  std::optional<std::string> proposition;
  std::vector<std::string> alternatives;
};

struct ResolveResult {
  std::vector<Utterance> resolved;
  std::vector<SlotResolution> slots;
  std::vector<CompoundResolution> compounds;
  // Absent while any reference is unresolved.
  std::optional<std::vector<RuleOneViolation>> rule1;
  // One entry per violation; names the cause when it is known.
  std::vector<std::string> rule1_attribution;
  DiscourseState final_state;

  bool ambiguous() const;
};

ResolveResult Resolve(const Discourse& discourse);

}  // namespace meaning

#endif  // MEANING_CENTERING_H_
