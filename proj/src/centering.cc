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

#include "meaning/centering.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace meaning {

namespace {

constexpr std::array<std::string_view, 5> kFunctionNames = {
    "subject", "direct_object", "indirect_object", "other_complement",
    "adjunct"};

constexpr std::array<std::string_view, 3> kFormNames = {
    "pronoun", "definite_np", "proper_name"};

}  // namespace

int FunctionRank(GrammaticalFunction function) {
  return static_cast<int>(function) + 1;
}

std::string_view FunctionName(GrammaticalFunction function) {
  return kFunctionNames[static_cast<size_t>(function)];
}

std::optional<GrammaticalFunction> ParseFunction(std::string_view name) {
  for (size_t i = 0; i < kFunctionNames.size(); ++i) {
    if (kFunctionNames[i] == name) return static_cast<GrammaticalFunction>(i);
  }
  return std::nullopt;
}

std::string_view FormName(FormTag form) {
  return kFormNames[static_cast<size_t>(form)];
}

std::optional<FormTag> ParseForm(std::string_view name) {
  for (size_t i = 0; i < kFormNames.size(); ++i) {
    if (kFormNames[i] == name) return static_cast<FormTag>(i);
  }
  return std::nullopt;
}

double FormCosts::Cost(FormTag tag) const {
  switch (tag) {
    case FormTag::kPronoun:
      return pronoun;
    case FormTag::kDefiniteNp:
      return definite_np;
    case FormTag::kProperName:
      return proper_name;
  }
  return proper_name;
}

std::vector<std::string> FormCosts::Validate() const {
  std::vector<std::string> out;
  if (pronoun < 0.0 || definite_np < 0.0 || proper_name < 0.0) {
    out.push_back("lightness costs must be nonnegative");
  }
  if (!(pronoun < definite_np)) {
    out.push_back("pronoun cost must be below definite_np cost");
  }
  if (!(definite_np <= proper_name)) {
    out.push_back("definite_np cost must not exceed proper_name cost");
  }
  return out;
}

bool Compatible(const Entity& entity, const Expression& expression) {
  for (const auto& [key, value] : expression.features) {
    auto it = entity.features.find(key);
    if (it == entity.features.end() || it->second != value) return false;
  }
  return true;
}

std::vector<std::string> Cf(const Utterance& u) {
  struct Item {
    int rank;
    size_t position;
    std::string entity;
  };
  std::vector<Item> items;
  for (size_t i = 0; i < u.realizations.size(); ++i) {
    const Realization& r = u.realizations[i];
    if (!r.resolved()) continue;
    const int rank = FunctionRank(r.function);
    auto it = std::find_if(items.begin(), items.end(),
                           [&](const Item& x) { return x.entity == r.entity; });
    if (it == items.end()) {
      items.push_back({rank, i, r.entity});
    } else if (rank < it->rank) {
      it->rank = rank;
      it->position = i;
    }
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    return std::tie(a.rank, a.position) < std::tie(b.rank, b.position);
  });
  std::vector<std::string> out;
  for (auto& item : items) out.push_back(std::move(item.entity));
  return out;
}

std::optional<std::string> Cp(const Utterance& u) {
  auto cf = Cf(u);
  if (cf.empty()) return std::nullopt;
  return cf.front();
}

std::optional<std::string> Cb(const Utterance& previous,
                              const Utterance& current) {
  const auto now = Cf(current);
  for (const auto& e : Cf(previous)) {
    if (std::find(now.begin(), now.end(), e) != now.end()) return e;
  }
  return std::nullopt;
}

std::optional<std::string> Cb(std::span<const Utterance> history, size_t i) {
  if (i == 0 || i >= history.size()) return std::nullopt;
  return Cb(history[i - 1], history[i]);
}

bool RealizedByPronoun(const Utterance& u, const std::string& entity) {
  return std::any_of(u.realizations.begin(), u.realizations.end(),
                     [&](const Realization& r) {
                       return r.entity == entity &&
                              r.form.tag == FormTag::kPronoun;
                     });
}

std::vector<RuleOneViolation> RuleOneCheck(
    std::span<const Utterance> discourse) {
  for (size_t i = 0; i < discourse.size(); ++i) {
    for (const auto& r : discourse[i].realizations) {
      if (!r.resolved()) {
        throw std::invalid_argument(
            "utterance " + std::to_string(i + 1) +
            " has an unresolved reference '" + r.surface + "'");
      }
    }
  }
  std::vector<RuleOneViolation> out;
  for (size_t i = 1; i < discourse.size(); ++i) {
    const auto cb = Cb(discourse, i);
    if (!cb) continue;
    RuleOneViolation v;
    v.utterance = i;
    v.cb = *cb;
    for (const auto& e : Cf(discourse[i - 1])) {
      if (RealizedByPronoun(discourse[i], e)) v.pronominalized.push_back(e);
    }
    if (!v.pronominalized.empty() && !RealizedByPronoun(discourse[i], *cb)) {
      out.push_back(std::move(v));
    }
  }
  return out;
}

double AccommodationParams::Boost(FormTag tag) const {
  switch (tag) {
    case FormTag::kPronoun:
      return pronoun;
    case FormTag::kDefiniteNp:
      return definite_np;
    case FormTag::kProperName:
      return proper_name;
  }
  return 1.0;
}

std::vector<std::string> AccommodationParams::Validate() const {
  std::vector<std::string> out;
  if (!(proper_name >= 1.0)) {
    out.push_back("accommodation boosts must be at least 1");
  }
  if (!(pronoun >= definite_np && definite_np >= proper_name)) {
    out.push_back(
        "accommodation boosts must satisfy pronoun >= definite_np >= "
        "proper_name");
  }
  return out;
}

DiscourseState::DiscourseState(const std::vector<std::string>& entities,
                               SalienceParams params)
    : params_(params) {
  if (!(params.initial > 0.0)) {
    throw std::invalid_argument("initial salience must be positive");
  }
  if (params.rank_weight < 0.0 || params.cb_bonus < 0.0) {
    throw std::invalid_argument("salience parameters must be nonnegative");
  }
  for (const auto& e : entities) {
    if (!salience_.emplace(e, params.initial).second) {
      throw std::invalid_argument("duplicate entity '" + e + "'");
    }
  }
}

double DiscourseState::Salience(const std::string& entity) const {
  auto it = salience_.find(entity);
  if (it == salience_.end()) {
    throw std::invalid_argument("unknown entity '" + entity + "'");
  }
  return it->second;
}

DiscourseState DiscourseState::Ingest(const Utterance& u) const {
  DiscourseState next = *this;
  std::map<std::string, int> best;
  for (const auto& r : u.realizations) {
    if (!r.resolved()) continue;
    Salience(r.entity);
    const int rank = FunctionRank(r.function);
    auto [it, fresh] = best.emplace(r.entity, rank);
    if (!fresh) it->second = std::min(it->second, rank);
  }
  for (const auto& [entity, rank] : best) {
    next.salience_[entity] += std::pow(params_.rank_weight, rank);
  }
  next.history_.push_back(u);
  next.cf_cache_.push_back(Cf(u));
  return next;
}

DiscourseState DiscourseState::WithSalience(const std::string& entity,
                                            double score) const {
  Salience(entity);
  if (!(score > 0.0) || !std::isfinite(score)) {
    throw std::invalid_argument("salience must be positive and finite");
  }
  DiscourseState next = *this;
  next.salience_[entity] = score;
  return next;
}

std::vector<double> SaliencePriors(const DiscourseState& state,
                                   std::span<const std::string> candidates) {
  if (candidates.empty()) {
    throw std::invalid_argument("salience_priors needs at least one candidate");
  }
  std::vector<double> out;
  double total = 0.0;
  for (const auto& c : candidates) {
    out.push_back(state.Salience(c));
    total += out.back();
  }
  for (double& p : out) p /= total;
  return out;
}

DiscourseState Accommodate(const DiscourseState& state,
                           const std::string& entity, FormTag form,
                           const AccommodationParams& params) {
  const double boost = params.Boost(form);
  if (!(boost > 0.0)) {
    throw std::invalid_argument("accommodation boost must be positive");
  }
  return state.WithSalience(entity, state.Salience(entity) * boost);
}

const Entity& Lexicon::entity(std::string_view id) const {
  for (const auto& e : entities) {
    if (e.id == id) return e;
  }
  throw std::invalid_argument("unknown entity '" + std::string(id) + "'");
}

const Expression& Lexicon::expression(std::string_view id) const {
  for (const auto& e : expressions) {
    if (e.id == id) return e;
  }
  throw std::invalid_argument("unknown expression '" + std::string(id) + "'");
}

MeaningGame BuildNpGame(const DiscourseState& state, const NpSlot& slot,
                        const Lexicon& lexicon, const NpGameConfig& config,
                        const CompatibilityPredicate& compatible) {
  if (slot.candidates.empty()) {
    throw std::invalid_argument("slot '" + slot.id + "' has no candidates");
  }
  if (slot.options.empty()) {
    throw std::invalid_argument("slot '" + slot.id +
                                "' has no expression options");
  }
  if (auto problems = config.form_costs.Validate(); !problems.empty()) {
    throw std::invalid_argument(problems.front());
  }

  std::vector<double> prior;
  if (!slot.prior_override.empty()) {
    double total = 0.0;
    for (const auto& c : slot.candidates) {
      auto it = slot.prior_override.find(c);
      if (it == slot.prior_override.end() || it->second < 0.0) {
        throw std::invalid_argument("prior override of slot '" + slot.id +
                                    "' lacks a weight for '" + c + "'");
      }
      prior.push_back(it->second);
      total += it->second;
    }
    if (!(total > 0.0)) {
      throw std::invalid_argument("prior override of slot '" + slot.id +
                                  "' sums to zero");
    }
    for (double& p : prior) p /= total;
  } else {
    DiscourseState scored = state;
    if (state.params().cb_bonus > 0.0 && !state.cf_cache().empty()) {
      for (const auto& e : state.cf_cache().back()) {
        if (std::find(slot.candidates.begin(), slot.candidates.end(), e) !=
            slot.candidates.end()) {
          scored = state.WithSalience(
              e, state.Salience(e) + state.params().cb_bonus);
          break;
        }
      }
    }
    prior = SaliencePriors(scored, slot.candidates);
  }

  GameBuilder b;
  for (const auto& c : slot.candidates) b.AddContent(c, lexicon.entity(c).label);
  for (const auto& o : slot.options) {
    const Expression& x = lexicon.expression(o);
    b.AddMessage(x.id, x.label.empty() ? x.id : x.label);
  }
  b.SetPrior(prior);
  b.SetSuccessBonus(config.success_bonus);
  for (const auto& c : slot.candidates) {
    const Entity& e = lexicon.entity(c);
    bool any = false;
    for (const auto& o : slot.options) {
      const Expression& x = lexicon.expression(o);
      if (!compatible(e, x)) continue;
      b.SetPairCost(c, o, config.form_costs.Cost(x.form), 0.0);
      any = true;
    }
    if (!any) {
      throw std::invalid_argument("candidate '" + c + "' of slot '" + slot.id +
                                  "' has no compatible expression");
    }
  }
  return b.Build();
}

namespace {

// NP slots of the utterance, in surface order.
std::vector<const Realization*> SlotRealizations(const DiscourseUtterance& du) {
  std::vector<const Realization*> out;
  for (const auto& r : du.utterance.realizations) {
    if (!r.slot.empty() && du.slots.count(r.slot)) out.push_back(&r);
  }
  return out;
}

bool KeepsOrder(const std::vector<std::string>& before,
                const std::vector<std::string>& after) {
  std::vector<std::string> common;
  for (const auto& e : before) {
    if (std::find(after.begin(), after.end(), e) != after.end()) {
      common.push_back(e);
    }
  }
  std::vector<std::string> seen;
  for (const auto& e : after) {
    if (std::find(common.begin(), common.end(), e) != common.end()) {
      seen.push_back(e);
    }
  }
  return seen == common;
}

const std::string& Lookup(const std::map<std::string, std::string>& m,
                          const std::string& key, const std::string& owner) {
  auto it = m.find(key);
  if (it == m.end()) {
    throw std::invalid_argument("'" + owner + "' does not fill slot '" + key +
                                "'");
  }
  return it->second;
}

}  // namespace

SentenceGame BuildSentenceGame(const DiscourseState& state,
                               const DiscourseUtterance& du,
                               const Lexicon& lexicon,
                               const ResolveConfig& config) {
  if (!du.compound) {
    throw std::invalid_argument("utterance has no compound section");
  }
  const CompoundSpec& spec = *du.compound;
  if (spec.propositions.empty() || spec.sentences.empty()) {
    throw std::invalid_argument(
        "compound needs at least one proposition and one sentence");
  }
  if (config.parallelism_bonus < 0.0) {
    throw std::invalid_argument("parallelism_bonus must be nonnegative");
  }
  const auto slots = SlotRealizations(du);
  const std::vector<std::string> previous =
      state.cf_cache().empty() ? std::vector<std::string>{}
                               : state.cf_cache().back();

  SentenceGame out;
  for (const auto& p : spec.propositions) {
    Utterance hypothetical = du.utterance;
    for (auto& r : hypothetical.realizations) {
      if (!r.slot.empty() && du.slots.count(r.slot)) {
        r.entity = Lookup(p.roles, r.slot, p.id);
      }
    }
    out.parallel.push_back(KeepsOrder(previous, Cf(hypothetical)));
  }

  GameBuilder b;
  size_t with_prior = 0;
  for (const auto& p : spec.propositions) {
    b.AddContent(p.id, p.label.empty() ? p.id : p.label);
    if (p.prior) ++with_prior;
  }
  for (const auto& s : spec.sentences) {
    b.AddMessage(s.id, s.label.empty() ? s.id : s.label);
  }
  if (with_prior != 0 && with_prior != spec.propositions.size()) {
    throw std::invalid_argument(
        "either every proposition or none must carry a prior");
  }
  if (with_prior) {
    std::vector<double> prior;
    double total = 0.0;
    for (const auto& p : spec.propositions) {
      if (*p.prior < 0.0) {
        throw std::invalid_argument("negative prior for '" + p.id + "'");
      }
      prior.push_back(*p.prior);
      total += *p.prior;
    }
    if (!(total > 0.0)) {
      throw std::invalid_argument("proposition priors sum to zero");
    }
    for (double& x : prior) x /= total;
    b.SetPrior(std::move(prior));
  }
  b.SetSuccessBonus(config.success_bonus);

  for (size_t i = 0; i < spec.propositions.size(); ++i) {
    const Proposition& p = spec.propositions[i];
    for (const auto& s : spec.sentences) {
      bool fits = true;
      for (const Realization* r : slots) {
        const Entity& e = lexicon.entity(Lookup(p.roles, r->slot, p.id));
        const Expression& x =
            lexicon.expression(Lookup(s.realizes, r->slot, s.id));
        fits = fits && Compatible(e, x);
      }
      if (!fits) continue;
      double cost = out.parallel[i] ? 0.0 : config.parallelism_bonus;
      for (const auto& extra : spec.extra_costs) {
        if (extra.content == p.id && extra.message == s.id) cost += extra.cost;
      }
      b.SetPairCost(p.id, s.id, cost, cost);
    }
  }
  out.game = b.Build();
  if (spec.neglect_threshold) {
    out.game = NeglectCostlyPairs(out.game, *spec.neglect_threshold);
  }
  return out;
}

CompoundGame BuildCompoundGame(const DiscourseState& state,
                               const DiscourseUtterance& du,
                               const Lexicon& lexicon,
                               const ResolveConfig& config) {
  const CompoundSpec& spec = *du.compound;
  SentenceGame sentence = BuildSentenceGame(state, du, lexicon, config);
  CompoundGame cg;
  cg.constituents.push_back(
      {{spec.slot, spec.description}, sentence.game, spec.weight});
  const auto slots = SlotRealizations(du);
  NpGameConfig np{config.form_costs, config.success_bonus};
  for (const Realization* r : slots) {
    const NpSlot& slot = du.slots.at(r->slot);
    cg.constituents.push_back(
        {{slot.id, std::string(FunctionName(r->function))},
         BuildNpGame(state, slot, lexicon, np),
         spec.np_weight});
  }
  for (size_t i = 0; i < spec.propositions.size(); ++i) {
    const Proposition& p = spec.propositions[i];
    JointAssignment a{i};
    for (size_t k = 0; k < slots.size(); ++k) {
      const MeaningGame& g = cg.constituents[k + 1].game;
      auto idx = g.FindContent(Lookup(p.roles, slots[k]->slot, p.id));
      if (!idx) {
        throw std::invalid_argument("proposition '" + p.id +
                                    "' assigns a non-candidate to slot '" +
                                    slots[k]->slot + "'");
      }
      a.push_back(*idx);
    }
    cg.feasible_contents.push_back(std::move(a));
  }
  for (size_t j = 0; j < spec.sentences.size(); ++j) {
    const SentenceForm& s = spec.sentences[j];
    JointAssignment a{j};
    for (size_t k = 0; k < slots.size(); ++k) {
      const MeaningGame& g = cg.constituents[k + 1].game;
      auto idx = g.FindMessage(Lookup(s.realizes, slots[k]->slot, s.id));
      if (!idx) {
        throw std::invalid_argument("sentence '" + s.id +
                                    "' uses an expression not offered in "
                                    "slot '" +
                                    slots[k]->slot + "'");
      }
      a.push_back(*idx);
    }
    cg.feasible_messages.push_back(std::move(a));
  }
  return cg;
}

bool ResolveResult::ambiguous() const {
  return std::any_of(slots.begin(), slots.end(),
                     [](const SlotResolution& s) { return !s.entity; });
}

namespace {

std::set<int> Readings(const std::vector<EquilibriumReport>& reports,
                       size_t message) {
  std::set<int> out;
  for (const auto& r : reports) out.insert(r.pure.receiver[message]);
  return out;
}

std::set<int> Readings(const std::vector<CompoundSolution>& solutions,
                       size_t message) {
  std::set<int> out;
  for (const auto& s : solutions) out.insert(s.report.pure.receiver[message]);
  return out;
}

}  // namespace

ResolveResult Resolve(const Discourse& discourse) {
  const ResolveConfig& config = discourse.config;
  const Lexicon& lexicon = discourse.lexicon;
  if (auto p = config.accommodation.Validate(); !p.empty()) {
    throw std::invalid_argument(p.front());
  }
  if (auto p = config.form_costs.Validate(); !p.empty()) {
    throw std::invalid_argument(p.front());
  }
  std::vector<std::string> ids;
  for (const auto& e : lexicon.entities) ids.push_back(e.id);
  DiscourseState state(ids, config.salience);
  ResolveResult out;
  bool complete = true;
  const NpGameConfig np{config.form_costs, config.success_bonus};

  for (size_t i = 0; i < discourse.utterances.size(); ++i) {
    const DiscourseUtterance& du = discourse.utterances[i];
    Utterance u = du.utterance;
    u.index = i;
    for (auto& r : u.realizations) {
      if (r.expression.empty()) continue;
      const Expression& x = lexicon.expression(r.expression);
      r.form = config.form_costs.Form(x.form);
      if (r.surface.empty()) r.surface = x.label.empty() ? x.id : x.label;
    }
    std::vector<std::pair<std::string, FormTag>> committed;

    if (du.compound) {
      CompoundResolution cr;
      cr.utterance = i;
      cr.parallel = BuildSentenceGame(state, du, lexicon, config).parallel;
      cr.game = BuildCompoundGame(state, du, lexicon, config);
      cr.prediction = PredictCompound(cr.game, config.enumeration);
      const size_t observed =
          cr.game.constituents.front().game.MessageIndex(du.compound->observed);
      const auto readings = Readings(cr.prediction.solutions, observed);
      const auto& props = du.compound->propositions;
      if (readings.size() == 1 && *readings.begin() >= 0) {
        cr.proposition = props[cr.game.feasible_contents[*readings.begin()][0]].id;
      } else {
        for (int c : readings) {
          if (c >= 0) {
            cr.alternatives.push_back(
                props[cr.game.feasible_contents[c][0]].id);
          }
        }
      }
      for (auto& r : u.realizations) {
        if (r.slot.empty() || !du.slots.count(r.slot)) continue;
        SlotResolution sr;
        sr.utterance = i;
        sr.slot = r.slot;
        sr.expression = r.expression;
        sr.via_compound = true;
        if (cr.proposition) {
          for (const auto& p : props) {
            if (p.id == *cr.proposition) sr.entity = p.roles.at(r.slot);
          }
          r.entity = *sr.entity;
          committed.emplace_back(r.entity, r.form.tag);
        } else {
          std::set<std::string> alts;
          for (const auto& a : cr.alternatives) {
            for (const auto& p : props) {
              if (p.id == a) alts.insert(p.roles.at(r.slot));
            }
          }
          sr.alternatives.assign(alts.begin(), alts.end());
          complete = false;
        }
        out.slots.push_back(std::move(sr));
      }
      out.compounds.push_back(std::move(cr));
    } else {
      for (auto& r : u.realizations) {
        if (r.slot.empty()) {
          if (!r.resolved()) complete = false;
          continue;
        }
        auto it = du.slots.find(r.slot);
        if (it == du.slots.end()) {
          throw std::invalid_argument("utterance " + std::to_string(i + 1) +
                                      " references undeclared slot '" +
                                      r.slot + "'");
        }
        SlotResolution sr;
        sr.utterance = i;
        sr.slot = r.slot;
        sr.expression = r.expression;
        sr.game = BuildNpGame(state, it->second, lexicon, np);
        sr.prediction = Predict(*sr.game, config.enumeration);
        const auto readings =
            Readings(sr.prediction->equilibria, sr.game->MessageIndex(r.expression));
        if (readings.size() == 1 && *readings.begin() >= 0) {
          sr.entity = sr.game->content(*readings.begin()).id;
          r.entity = *sr.entity;
          committed.emplace_back(r.entity, r.form.tag);
        } else {
          for (int c : readings) {
            if (c >= 0) sr.alternatives.push_back(sr.game->content(c).id);
          }
          complete = false;
        }
        out.slots.push_back(std::move(sr));
      }
    }

    state = state.Ingest(u);
    for (const auto& [entity, form] : committed) {
      state = Accommodate(state, entity, form, config.accommodation);
    }
    out.resolved.push_back(std::move(u));
  }

  if (complete) {
    out.rule1 = RuleOneCheck(out.resolved);
    for (const auto& v : *out.rule1) {
      std::string why;
      for (const auto& cr : out.compounds) {
        if (cr.utterance != v.utterance || !cr.proposition) continue;
        if (config.parallelism_bonus <= 0.0) continue;
        const auto& sol = cr.prediction.solutions.front();
        bool np_suboptimal = false;
        for (size_t k = 1; k < sol.verdicts.size(); ++k) {
          np_suboptimal = np_suboptimal || !sol.verdicts[k].optimal;
        }
        if (np_suboptimal) {
          why = "parallelism bonus: the sentence-level reading keeps the "
                "grammatical functions of the previous utterance and "
                "overrides the NP-level optimum";
        }
      }
      out.rule1_attribution.push_back(std::move(why));
    }
  }
  out.final_state = std::move(state);
  return out;
}

}  // namespace meaning
