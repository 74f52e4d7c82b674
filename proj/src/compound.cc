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

#include "meaning/compound.h"

#include <algorithm>
#include <set>

namespace meaning {

namespace {

constexpr const char* kJoin = " | ";

std::string JoinIds(const CompoundGame& cg, const JointAssignment& a,
                    bool contents, bool labels) {
  std::string out;
  for (size_t k = 0; k < a.size(); ++k) {
    if (k) out += kJoin;
    const MeaningGame& g = cg.constituents[k].game;
    if (contents) {
      out += labels ? g.content(a[k]).label : g.content(a[k]).id;
    } else {
      out += labels ? g.message(a[k]).label : g.message(a[k]).id;
    }
  }
  return out;
}

}  // namespace

std::vector<JointAssignment> FullProduct(const std::vector<size_t>& sizes) {
  std::vector<JointAssignment> out;
  for (size_t s : sizes) {
    if (s == 0) return out;
  }
  JointAssignment cur(sizes.size(), 0);
  while (true) {
    out.push_back(cur);
    size_t i = sizes.size();
    while (i > 0) {
      --i;
      if (++cur[i] < sizes[i]) break;
      cur[i] = 0;
      if (i == 0) return out;
    }
    if (sizes.empty()) return out;
  }
}

CompoundGame Unconstrained(std::vector<ConstituentGame> constituents) {
  CompoundGame cg;
  std::vector<size_t> ncontents, nmessages;
  for (const auto& c : constituents) {
    ncontents.push_back(c.game.num_contents());
    nmessages.push_back(c.game.num_messages());
  }
  cg.constituents = std::move(constituents);
  cg.feasible_contents = FullProduct(ncontents);
  cg.feasible_messages = FullProduct(nmessages);
  return cg;
}

std::vector<std::string> ValidateCompound(const CompoundGame& cg) {
  std::vector<std::string> out;
  const size_t arity = cg.constituents.size();
  if (arity == 0) out.push_back("compound game has no constituents");
  std::set<std::string> slots;
  for (const auto& c : cg.constituents) {
    if (!slots.insert(c.slot.id).second) {
      out.push_back("duplicate slot id '" + c.slot.id + "'");
    }
    if (!(c.weight > 0.0)) {
      out.push_back("constituent '" + c.slot.id + "' has nonpositive weight");
    }
    for (const auto& v : ValidateGame(c.game).violations) {
      out.push_back("constituent '" + c.slot.id + "': " + v);
    }
  }
  auto check = [&](const std::vector<JointAssignment>& rel, bool contents) {
    const char* what = contents ? "content" : "message";
    if (rel.empty()) {
      out.push_back(std::string("no feasible joint ") + what + " assignment");
    }
    std::set<JointAssignment> seen;
    for (const auto& a : rel) {
      if (a.size() != arity) {
        out.push_back(std::string("joint ") + what +
                      " assignment has wrong arity");
        continue;
      }
      for (size_t k = 0; k < arity; ++k) {
        const MeaningGame& g = cg.constituents[k].game;
        const size_t limit = contents ? g.num_contents() : g.num_messages();
        if (a[k] >= limit) {
          out.push_back(std::string("joint ") + what +
                        " assignment references an undeclared " + what +
                        " of slot '" + cg.constituents[k].slot.id + "'");
        }
      }
      if (!seen.insert(a).second) {
        out.push_back(std::string("duplicate joint ") + what + " assignment");
      }
    }
  };
  check(cg.feasible_contents, true);
  check(cg.feasible_messages, false);
  return out;
}

MeaningGame Flatten(const CompoundGame& cg, uint64_t cap) {
  if (auto problems = ValidateCompound(cg); !problems.empty()) {
    throw std::invalid_argument(problems.front());
  }
  const auto& jc = cg.feasible_contents;
  const auto& jm = cg.feasible_messages;
  const uint64_t size = static_cast<uint64_t>(jc.size()) * jm.size();
  if (size > cap) {
    throw SizeError("compound has " + std::to_string(jc.size()) +
                    " joint contents and " + std::to_string(jm.size()) +
                    " joint messages, above the cap of " +
                    std::to_string(cap));
  }
  const size_t arity = cg.constituents.size();
  const size_t n = jc.size();
  const size_t k = jm.size();

  std::vector<Content> contents;
  for (const auto& a : jc) {
    contents.push_back({JoinIds(cg, a, true, false), JoinIds(cg, a, true, true)});
  }
  std::vector<Message> messages;
  for (const auto& a : jm) {
    messages.push_back(
        {JoinIds(cg, a, false, false), JoinIds(cg, a, false, true)});
  }

  std::vector<double> prior(n, 1.0);
  double total = 0.0;
  for (size_t j = 0; j < n; ++j) {
    for (size_t c = 0; c < arity; ++c) {
      prior[j] *= cg.constituents[c].game.prior()[jc[j][c]];
    }
    total += prior[j];
  }
  if (!(total > 0.0)) {
    throw std::invalid_argument(
        "every feasible joint content has zero prior probability");
  }
  for (double& p : prior) p /= total;

  UtilityModel model;
  model.shared = true;
  for (size_t p = 0; p < 2; ++p) {
    const Player player = static_cast<Player>(p);
    PlayerUtility& u = model.players[p];
    u.sender_cost = PairTable(n, k);
    u.receiver_cost = PairTable(k, n);
    u.success_bonus = 0.0;
    for (const auto& c : cg.constituents) {
      u.success_bonus += c.weight * c.game.utility().For(player).success_bonus;
    }
    for (size_t j = 0; j < n; ++j) {
      for (size_t s = 0; s < k; ++s) {
        bool edge = true;
        double sc = 0.0, rc = 0.0;
        for (size_t c = 0; c < arity && edge; ++c) {
          const auto& con = cg.constituents[c];
          const size_t ci = jc[j][c];
          const size_t mi = jm[s][c];
          if (!con.game.HasEdge(ci, mi)) {
            edge = false;
            break;
          }
          const PlayerUtility& cu = con.game.utility().For(player);
          sc += con.weight * cu.sender_cost.ValueOr0(ci, mi);
          rc += con.weight * cu.receiver_cost.ValueOr0(mi, ci);
        }
        if (edge) {
          u.sender_cost.Set(j, s, sc);
          u.receiver_cost.Set(s, j, rc);
        }
      }
    }
    Matrix partial(n, n);
    bool any = false;
    for (size_t a = 0; a < n; ++a) {
      for (size_t b = 0; b < n; ++b) {
        if (a == b) continue;
        double credit = 0.0;
        for (size_t c = 0; c < arity; ++c) {
          const auto& con = cg.constituents[c];
          const PlayerUtility& cu = con.game.utility().For(player);
          if (jc[a][c] == jc[b][c]) {
            credit += con.weight * cu.success_bonus;
          } else if (!cu.partial_credit.empty()) {
            credit += con.weight * cu.partial_credit(jc[a][c], jc[b][c]);
          }
        }
        partial(a, b) = credit;
        any = any || credit != 0.0;
      }
    }
    if (any) u.partial_credit = std::move(partial);
  }
  model.shared = model.players[0] == model.players[1];
  return MeaningGame(std::move(contents), std::move(messages),
                     std::move(prior), std::move(model));
}

MeaningGame NeglectCostlyPairs(const MeaningGame& game, double threshold) {
  UtilityModel model = game.utility();
  for (size_t c = 0; c < game.num_contents(); ++c) {
    for (size_t m : game.MessagesFor(c)) {
      bool drop = false;
      for (Player player : {Player::kSender, Player::kReceiver}) {
        const PlayerUtility& u = game.utility().For(player);
        drop = drop || u.sender_cost.ValueOr0(c, m) +
                               u.receiver_cost.ValueOr0(m, c) >
                           threshold;
      }
      if (!drop) continue;
      for (PlayerUtility& u : model.players) {
        u.sender_cost.Erase(c, m);
        u.receiver_cost.Erase(m, c);
      }
    }
  }
  return MeaningGame(game.contents(), game.messages(), game.prior(),
                     std::move(model));
}

namespace {

ConstituentVerdict Judge(const CompoundGame& cg, size_t k,
                         const MeaningGame& flat,
                         const EquilibriumReport& report,
                         const Prediction& alone) {
  ConstituentVerdict v;
  v.slot = cg.constituents[k].slot.id;
  std::set<std::pair<size_t, size_t>> readings;
  for (const auto& entry : InterpretationMap(flat, report.pure)) {
    if (entry.interpreted < 0) continue;
    readings.insert({cg.feasible_messages[entry.message][k],
                     cg.feasible_contents[entry.interpreted][k]});
  }
  v.readings.assign(readings.begin(), readings.end());
  for (const auto& eq : alone.equilibria) {
    bool agrees = true;
    for (auto [m, c] : v.readings) {
      agrees = agrees && eq.pure.receiver[m] == static_cast<int>(c);
    }
    if (agrees) {
      v.optimal = true;
      break;
    }
  }
  return v;
}

}  // namespace

CompoundPrediction PredictCompound(const CompoundGame& cg,
                                   const EnumerationOptions& options,
                                   uint64_t flatten_cap) {
  CompoundPrediction out;
  out.flat = Flatten(cg, flatten_cap);
  for (const auto& c : cg.constituents) {
    out.constituent_predictions.push_back(Predict(c.game, options));
  }
  const Prediction global = Predict(out.flat, options);
  for (const auto& r : global.equilibria) {
    CompoundSolution s;
    s.report = r;
    for (size_t k = 0; k < cg.constituents.size(); ++k) {
      s.verdicts.push_back(
          Judge(cg, k, out.flat, r, out.constituent_predictions[k]));
      if (s.verdicts.back().optimal) {
        s.optimal_weight += cg.constituents[k].weight;
      }
    }
    out.pareto.push_back(std::move(s));
  }

  out.solutions = out.pareto;
  if (global.ambiguous) {
    double best = 0.0;
    for (const auto& s : out.pareto) best = std::max(best, s.optimal_weight);
    std::vector<CompoundSolution> kept;
    for (const auto& s : out.pareto) {
      if (s.optimal_weight >= best - kTolerance) kept.push_back(s);
    }
    out.refined = kept.size() < out.pareto.size();
    out.solutions = std::move(kept);
  }
  std::set<std::vector<InterpretationEntry>> maps;
  for (const auto& s : out.solutions) {
    maps.insert(InterpretationMap(out.flat, s.report.pure));
  }
  out.ambiguous = maps.size() > 1;
  return out;
}

}  // namespace meaning
