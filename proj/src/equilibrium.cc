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

#include "meaning/equilibrium.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace meaning {

std::string_view OffPathRuleName(OffPathRule rule) {
  return rule == OffPathRule::kPriorRestricted ? "prior" : "uniform";
}

std::string_view EquilibriumKindName(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::kSeparating:
      return "separating";
    case EquilibriumKind::kPooling:
      return "pooling";
    case EquilibriumKind::kPartial:
      return "partial";
  }
  return "partial";
}

Profile ToProfile(const MeaningGame& game, const PureProfile& pure) {
  const size_t n = game.num_contents();
  const size_t k = game.num_messages();
  if (pure.sender.size() != n || pure.receiver.size() != k) {
    throw std::invalid_argument("pure profile dimensions do not match game");
  }
  Profile p;
  p.sender.rows = Matrix(n, k);
  p.receiver.rows = Matrix(k, n);
  for (size_t c = 0; c < n; ++c) {
    if (pure.sender[c] < 0 || static_cast<size_t>(pure.sender[c]) >= k) {
      throw std::invalid_argument("pure sender choice out of range");
    }
    p.sender.rows(c, pure.sender[c]) = 1.0;
  }
  for (size_t m = 0; m < k; ++m) {
    if (pure.receiver[m] < 0) continue;
    if (static_cast<size_t>(pure.receiver[m]) >= n) {
      throw std::invalid_argument("pure receiver choice out of range");
    }
    p.receiver.rows(m, pure.receiver[m]) = 1.0;
  }
  p.deterministic = true;
  return p;
}

namespace {

// Index of the single unit entry of a row, -1 for an all-zero row, nullopt
// for anything else.
std::optional<int> PointOf(std::span<const double> row) {
  int at = -1;
  for (size_t i = 0; i < row.size(); ++i) {
    if (row[i] == 0.0) continue;
    if (row[i] != 1.0 || at >= 0) return std::nullopt;
    at = static_cast<int>(i);
  }
  return at;
}

}  // namespace

std::optional<PureProfile> ToPure(const Profile& profile) {
  PureProfile pure;
  const Matrix& s = profile.sender.rows;
  const Matrix& r = profile.receiver.rows;
  for (size_t c = 0; c < s.rows(); ++c) {
    auto at = PointOf(s.row(c));
    if (!at || *at < 0) return std::nullopt;
    pure.sender.push_back(*at);
  }
  for (size_t m = 0; m < r.rows(); ++m) {
    auto at = PointOf(r.row(m));
    if (!at) return std::nullopt;
    pure.receiver.push_back(*at);
  }
  return pure;
}

namespace {

// Off-path belief at message m.
void OffPathBelief(const MeaningGame& game, size_t m, OffPathRule rule,
                   std::vector<double>& out) {
  const auto& support = game.ContentsFor(m);
  std::fill(out.begin(), out.end(), 0.0);
  if (support.empty()) return;
  double total = 0.0;
  if (rule == OffPathRule::kPriorRestricted) {
    for (size_t c : support) total += game.prior()[c];
  }
  if (rule == OffPathRule::kPriorRestricted && total > 0.0) {
    for (size_t c : support) out[c] = game.prior()[c] / total;
  } else {
    const double u = 1.0 / static_cast<double>(support.size());
    for (size_t c : support) out[c] = u;
  }
}

}  // namespace

BeliefSystem PosteriorBeliefs(const MeaningGame& game,
                              const SenderStrategy& sender, OffPathRule rule) {
  if (auto problems = ValidateStrategy(game, sender); !problems.empty()) {
    throw std::invalid_argument(problems.front());
  }
  const size_t n = game.num_contents();
  const size_t k = game.num_messages();
  BeliefSystem beliefs;
  beliefs.off_path_rule = rule;
  beliefs.posterior.assign(k, {});
  beliefs.on_path.assign(k, false);
  for (size_t m = 0; m < k; ++m) {
    if (game.ContentsFor(m).empty()) continue;
    std::vector<double> post(n, 0.0);
    double total = 0.0;
    for (size_t c : game.ContentsFor(m)) {
      post[c] = game.prior()[c] * sender.rows(c, m);
      total += post[c];
    }
    if (total > 0.0) {
      for (double& p : post) p /= total;
      beliefs.on_path[m] = true;
    } else {
      OffPathBelief(game, m, rule, post);
    }
    beliefs.posterior[m] = std::move(post);
  }
  return beliefs;
}

namespace {

// Expected receiver utility of reading message m as content `as` under
// belief `mu` (which is supported on contents grammatical for m).
double ReceiverValue(const MeaningGame& game, size_t m, size_t as,
                     std::span<const double> mu) {
  double v = 0.0;
  for (size_t c : game.ContentsFor(m)) {
    if (mu[c] == 0.0) continue;
    v += mu[c] * game.UtilityOf(Player::kReceiver, c, m, as);
  }
  return v;
}

double SenderValue(const MeaningGame& game, size_t c, size_t m,
                   const ReceiverStrategy& receiver) {
  double v = 0.0;
  for (size_t cr : game.ContentsFor(m)) {
    const double p = receiver.rows(m, cr);
    if (p == 0.0) continue;
    v += p * game.UtilityOf(Player::kSender, c, m, cr);
  }
  return v;
}

}  // namespace

EquilibriumCheck IsEquilibrium(const MeaningGame& game, const Profile& profile,
                               OffPathRule rule) {
  {
    auto problems = ValidateStrategy(game, profile.sender);
    auto more = ValidateStrategy(game, profile.receiver);
    problems.insert(problems.end(), more.begin(), more.end());
    if (!problems.empty()) throw std::invalid_argument(problems.front());
  }
  EquilibriumCheck result;
  const size_t n = game.num_contents();
  const size_t k = game.num_messages();

  std::vector<double> values(k);
  for (size_t c = 0; c < n; ++c) {
    double best = -std::numeric_limits<double>::infinity();
    size_t best_m = 0;
    for (size_t m : game.MessagesFor(c)) {
      values[m] = SenderValue(game, c, m, profile.receiver);
      if (values[m] > best) {
        best = values[m];
        best_m = m;
      }
    }
    for (size_t m : game.MessagesFor(c)) {
      if (profile.sender.rows(c, m) > 0.0 && values[m] < best - kTolerance) {
        result.witness =
            Deviation{Player::kSender, c, m, best_m, best - values[m]};
        return result;
      }
    }
  }

  const BeliefSystem beliefs = PosteriorBeliefs(game, profile.sender, rule);
  std::vector<double> rvalues(n);
  for (size_t m = 0; m < k; ++m) {
    if (game.ContentsFor(m).empty()) continue;
    double best = -std::numeric_limits<double>::infinity();
    size_t best_c = 0;
    for (size_t c : game.ContentsFor(m)) {
      rvalues[c] = ReceiverValue(game, m, c, beliefs.posterior[m]);
      if (rvalues[c] > best) {
        best = rvalues[c];
        best_c = c;
      }
    }
    for (size_t c : game.ContentsFor(m)) {
      if (profile.receiver.rows(m, c) > 0.0 &&
          rvalues[c] < best - kTolerance) {
        result.witness =
            Deviation{Player::kReceiver, m, c, best_c, best - rvalues[c]};
        return result;
      }
    }
  }
  result.is_equilibrium = true;
  return result;
}

namespace {

// Posterior at message m induced by a deterministic sender map.
void PureBelief(const MeaningGame& game, const std::vector<int>& sender,
                size_t m, OffPathRule rule, std::vector<double>& out) {
  std::fill(out.begin(), out.end(), 0.0);
  double total = 0.0;
  for (size_t c : game.ContentsFor(m)) {
    if (sender[c] == static_cast<int>(m)) {
      out[c] = game.prior()[c];
      total += out[c];
    }
  }
  if (total > 0.0) {
    for (double& p : out) p /= total;
  } else {
    OffPathBelief(game, m, rule, out);
  }
}

void CheckPureShape(const MeaningGame& game, const PureProfile& p) {
  if (p.sender.size() != game.num_contents() ||
      p.receiver.size() != game.num_messages()) {
    throw std::invalid_argument("pure profile dimensions do not match game");
  }
  for (size_t c = 0; c < p.sender.size(); ++c) {
    if (p.sender[c] < 0 ||
        static_cast<size_t>(p.sender[c]) >= game.num_messages() ||
        !game.HasEdge(c, p.sender[c])) {
      throw std::invalid_argument("sender choice for content '" +
                                  game.content(c).id + "' is ungrammatical");
    }
  }
  for (size_t m = 0; m < p.receiver.size(); ++m) {
    const bool isolated = game.ContentsFor(m).empty();
    if (isolated ? p.receiver[m] != -1
                 : (p.receiver[m] < 0 ||
                    static_cast<size_t>(p.receiver[m]) >=
                        game.num_contents() ||
                    !game.HasEdge(p.receiver[m], m))) {
      throw std::invalid_argument("receiver choice for message '" +
                                  game.message(m).id + "' is ungrammatical");
    }
  }
}

// Sender half of the pure equilibrium condition.
std::optional<Deviation> PureSenderDeviation(const MeaningGame& game,
                                             const PureProfile& p) {
  for (size_t c = 0; c < game.num_contents(); ++c) {
    const size_t cur = p.sender[c];
    const double current =
        game.UtilityOf(Player::kSender, c, cur, p.receiver[cur]);
    for (size_t m : game.MessagesFor(c)) {
      const double v = game.UtilityOf(Player::kSender, c, m, p.receiver[m]);
      if (v > current + kTolerance) {
        return Deviation{Player::kSender, c, cur, m, v - current};
      }
    }
  }
  return std::nullopt;
}

}  // namespace

EquilibriumCheck IsPureEquilibrium(const MeaningGame& game,
                                   const PureProfile& profile,
                                   OffPathRule rule) {
  CheckPureShape(game, profile);
  EquilibriumCheck result;
  if (auto d = PureSenderDeviation(game, profile)) {
    result.witness = d;
    return result;
  }
  std::vector<double> mu(game.num_contents());
  for (size_t m = 0; m < game.num_messages(); ++m) {
    if (game.ContentsFor(m).empty()) continue;
    PureBelief(game, profile.sender, m, rule, mu);
    const size_t cur = profile.receiver[m];
    const double current = ReceiverValue(game, m, cur, mu);
    for (size_t c : game.ContentsFor(m)) {
      const double v = ReceiverValue(game, m, c, mu);
      if (v > current + kTolerance) {
        result.witness = Deviation{Player::kReceiver, m, cur, c, v - current};
        return result;
      }
    }
  }
  result.is_equilibrium = true;
  return result;
}

EquilibriumReport MakeReport(const MeaningGame& game, const PureProfile& pure,
                             OffPathRule rule) {
  EquilibriumReport r;
  r.pure = pure;
  r.profile = ToProfile(game, pure);
  r.beliefs = PosteriorBeliefs(game, r.profile.sender, rule);
  r.success = SuccessProbability(game, r.profile.sender, r.profile.receiver);
  r.eu_sender = ExpectedUtility(game, r.profile.sender, r.profile.receiver,
                                Player::kSender);
  r.eu_receiver = ExpectedUtility(game, r.profile.sender, r.profile.receiver,
                                  Player::kReceiver);

  std::vector<int> used;
  for (size_t c = 0; c < game.num_contents(); ++c) {
    if (game.prior()[c] > 0.0) used.push_back(pure.sender[c]);
  }
  std::set<int> distinct(used.begin(), used.end());
  if (distinct.size() == used.size()) {
    r.kind = EquilibriumKind::kSeparating;
  } else if (distinct.size() == 1) {
    r.kind = EquilibriumKind::kPooling;
  } else {
    r.kind = EquilibriumKind::kPartial;
  }
  return r;
}

uint64_t CountPureProfiles(const MeaningGame& game) {
  constexpr uint64_t kMax = std::numeric_limits<uint64_t>::max();
  uint64_t count = 1;
  auto mul = [&](size_t d) {
    if (d == 0) return;
    if (count > kMax / d) {
      count = kMax;
    } else {
      count *= d;
    }
  };
  for (size_t c = 0; c < game.num_contents(); ++c) {
    mul(game.MessagesFor(c).size());
  }
  for (size_t m = 0; m < game.num_messages(); ++m) {
    mul(game.ContentsFor(m).size());
  }
  return count;
}

namespace {

void CheckEnumerable(const MeaningGame& game, const EnumerationOptions& opt) {
  for (size_t c = 0; c < game.num_contents(); ++c) {
    if (game.MessagesFor(c).empty()) {
      throw std::invalid_argument("content '" + game.content(c).id +
                                  "' has no grammatical message");
    }
  }
  const uint64_t count = CountPureProfiles(game);
  if (count > opt.cap) {
    throw SizeError("game has " + std::to_string(count) +
                    " pure profiles, above the cap of " +
                    std::to_string(opt.cap) +
                    "; prune unlikely pairs or split the compound game");
  }
}

// Advances a mixed-radix counter whose digit i ranges over [0, radix[i]).
// The last digit is least significant. Returns false on wrap-around.
bool Advance(std::vector<size_t>& digits, const std::vector<size_t>& radix) {
  for (size_t i = digits.size(); i-- > 0;) {
    if (radix[i] == 0) continue;
    if (++digits[i] < radix[i]) return true;
    digits[i] = 0;
  }
  return false;
}

}  // namespace

std::vector<EquilibriumReport> EnumeratePureEquilibriaSerial(
    const MeaningGame& game, const EnumerationOptions& options) {
  CheckEnumerable(game, options);
  const size_t n = game.num_contents();
  const size_t k = game.num_messages();
  std::vector<size_t> radix;
  for (size_t c = 0; c < n; ++c) radix.push_back(game.MessagesFor(c).size());
  for (size_t m = 0; m < k; ++m) radix.push_back(game.ContentsFor(m).size());

  std::vector<EquilibriumReport> out;
  std::vector<size_t> digits(radix.size(), 0);
  PureProfile p;
  p.sender.resize(n);
  p.receiver.resize(k);
  do {
    for (size_t c = 0; c < n; ++c) {
      p.sender[c] = static_cast<int>(game.MessagesFor(c)[digits[c]]);
    }
    for (size_t m = 0; m < k; ++m) {
      const auto& cs = game.ContentsFor(m);
      p.receiver[m] = cs.empty() ? -1 : static_cast<int>(cs[digits[n + m]]);
    }
    if (IsPureEquilibrium(game, p, options.rule)) {
      out.push_back(MakeReport(game, p, options.rule));
    }
  } while (Advance(digits, radix));
  return out;
}

std::vector<EquilibriumReport> EnumeratePureEquilibria(
    const MeaningGame& game, const EnumerationOptions& options) {
  CheckEnumerable(game, options);
  const size_t n = game.num_contents();
  const size_t k = game.num_messages();

  std::vector<size_t> sender_radix(n);
  uint64_t sender_maps = 1;
  for (size_t c = 0; c < n; ++c) {
    sender_radix[c] = game.MessagesFor(c).size();
    sender_maps *= sender_radix[c];
  }

  // found[i] holds the equilibria whose sender map has rank i.
  std::vector<std::vector<PureProfile>> found(sender_maps);

#pragma omp parallel for schedule(dynamic, 16)
  for (int64_t rank = 0; rank < static_cast<int64_t>(sender_maps); ++rank) {
    PureProfile p;
    p.sender.resize(n);
    p.receiver.assign(k, -1);
    uint64_t rest = static_cast<uint64_t>(rank);
    for (size_t c = n; c-- > 0;) {
      p.sender[c] =
          static_cast<int>(game.MessagesFor(c)[rest % sender_radix[c]]);
      rest /= sender_radix[c];
    }

    // Receiver best-response sets, ascending by content index.
    std::vector<std::vector<int>> best(k);
    std::vector<double> mu(n);
    bool empty_set = false;
    for (size_t m = 0; m < k && !empty_set; ++m) {
      const auto& cs = game.ContentsFor(m);
      if (cs.empty()) {
        best[m].push_back(-1);
        continue;
      }
      PureBelief(game, p.sender, m, options.rule, mu);
      double top = -std::numeric_limits<double>::infinity();
      std::vector<double> vals(cs.size());
      for (size_t i = 0; i < cs.size(); ++i) {
        vals[i] = ReceiverValue(game, m, cs[i], mu);
        top = std::max(top, vals[i]);
      }
      for (size_t i = 0; i < cs.size(); ++i) {
        if (vals[i] >= top - kTolerance) {
          best[m].push_back(static_cast<int>(cs[i]));
        }
      }
      empty_set = best[m].empty();
    }
    if (empty_set) continue;

    std::vector<size_t> radix(k), digits(k, 0);
    for (size_t m = 0; m < k; ++m) radix[m] = best[m].size();
    do {
      for (size_t m = 0; m < k; ++m) p.receiver[m] = best[m][digits[m]];
      if (!PureSenderDeviation(game, p)) found[rank].push_back(p);
    } while (Advance(digits, radix));
  }

  std::vector<PureProfile> flat;
  for (auto& bucket : found) {
    for (auto& p : bucket) flat.push_back(std::move(p));
  }
  std::vector<EquilibriumReport> out(flat.size());
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < static_cast<int64_t>(flat.size()); ++i) {
    out[i] = MakeReport(game, flat[i], options.rule);
  }
  return out;
}

std::vector<EquilibriumReport> ParetoFilter(
    const std::vector<EquilibriumReport>& reports) {
  std::vector<EquilibriumReport> out;
  for (size_t i = 0; i < reports.size(); ++i) {
    const auto& a = reports[i];
    bool dominated = false;
    for (size_t j = 0; j < reports.size() && !dominated; ++j) {
      if (i == j) continue;
      const auto& b = reports[j];
      const bool weakly = b.eu_sender >= a.eu_sender - kTolerance &&
                          b.eu_receiver >= a.eu_receiver - kTolerance;
      const bool strictly = b.eu_sender > a.eu_sender + kTolerance ||
                            b.eu_receiver > a.eu_receiver + kTolerance;
      dominated = weakly && strictly;
    }
    if (!dominated) out.push_back(a);
  }
  return out;
}

std::vector<InterpretationEntry> InterpretationMap(const MeaningGame& game,
                                                   const PureProfile& profile) {
  std::vector<InterpretationEntry> out;
  for (size_t c = 0; c < game.num_contents(); ++c) {
    if (game.prior()[c] <= 0.0) continue;
    const size_t m = profile.sender[c];
    out.push_back({c, m, profile.receiver[m]});
  }
  return out;
}

Prediction Predict(const MeaningGame& game,
                   const EnumerationOptions& options) {
  Prediction p;
  p.equilibria = ParetoFilter(EnumeratePureEquilibria(game, options));
  std::set<std::vector<InterpretationEntry>> maps;
  for (const auto& r : p.equilibria) {
    maps.insert(InterpretationMap(game, r.pure));
  }
  p.ambiguous = maps.size() > 1;
  return p;
}

PureProfile AssortativeSolution(const MeaningGame& game) {
  const size_t n = game.num_contents();
  if (n == 0 || n != game.num_messages()) {
    throw NotApplicableError(
        "assortative solution needs as many messages as contents");
  }
  if (game.num_edges() != n * n) {
    throw NotApplicableError("assortative solution needs a complete game");
  }
  // Message-only round-trip cost, identical for every content and player
  // ordering.
  std::vector<double> cost(n);
  for (size_t m = 0; m < n; ++m) {
    for (Player player : {Player::kSender, Player::kReceiver}) {
      const PlayerUtility& u = game.utility().For(player);
      for (size_t c = 0; c < n; ++c) {
        const double v = u.sender_cost.ValueOr0(c, m) +
                         u.receiver_cost.ValueOr0(m, c);
        if (player == Player::kSender && c == 0) {
          cost[m] = v;
        } else if (std::abs(v - cost[m]) > kTolerance) {
          throw NotApplicableError(
              "assortative solution needs costs that depend on the message "
              "only");
        }
      }
      if (!u.partial_credit.empty()) {
        throw NotApplicableError(
            "assortative solution does not apply to compound games");
      }
    }
  }
  std::vector<size_t> by_prior(n), by_cost(n);
  std::iota(by_prior.begin(), by_prior.end(), 0);
  std::iota(by_cost.begin(), by_cost.end(), 0);
  std::sort(by_prior.begin(), by_prior.end(), [&](size_t a, size_t b) {
    return game.prior()[a] > game.prior()[b];
  });
  std::sort(by_cost.begin(), by_cost.end(),
            [&](size_t a, size_t b) { return cost[a] < cost[b]; });
  for (size_t i = 0; i + 1 < n; ++i) {
    if (game.prior()[by_prior[i]] - game.prior()[by_prior[i + 1]] <=
        kTolerance) {
      throw NotApplicableError("assortative solution needs strictly ordered "
                               "prior weights");
    }
    if (cost[by_cost[i + 1]] - cost[by_cost[i]] <= kTolerance) {
      throw NotApplicableError("assortative solution needs strictly ordered "
                               "message costs");
    }
  }
  PureProfile p;
  p.sender.assign(n, 0);
  p.receiver.assign(n, 0);
  for (size_t i = 0; i < n; ++i) {
    p.sender[by_prior[i]] = static_cast<int>(by_cost[i]);
    p.receiver[by_cost[i]] = static_cast<int>(by_prior[i]);
  }
  return p;
}

}  // namespace meaning
