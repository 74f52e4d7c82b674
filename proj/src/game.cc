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

#include "meaning/game.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace meaning {

namespace {

std::string Fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void CheckTable(const PairTable& table, size_t rows, size_t cols,
                const char* what) {
  if (table.rows() != rows || table.cols() != cols) {
    throw std::invalid_argument(std::string("utility table '") + what +
                                "' has wrong dimensions");
  }
}

}  // namespace

std::string_view PlayerName(Player player) {
  return player == Player::kSender ? "sender" : "receiver";
}

MeaningGame::MeaningGame(std::vector<Content> contents,
                         std::vector<Message> messages,
                         std::vector<double> prior, UtilityModel utility)
    : contents_(std::move(contents)),
      messages_(std::move(messages)),
      prior_(std::move(prior)),
      utility_(std::move(utility)) {
  const size_t n = contents_.size();
  const size_t k = messages_.size();
  if (prior_.size() != n) {
    throw std::invalid_argument("prior has " + std::to_string(prior_.size()) +
                                " weights for " + std::to_string(n) +
                                " contents");
  }
  if (utility_.shared) utility_.players[1] = utility_.players[0];
  for (const PlayerUtility& p : utility_.players) {
    CheckTable(p.sender_cost, n, k, "sender_cost");
    CheckTable(p.receiver_cost, k, n, "receiver_cost");
    if (!p.partial_credit.empty() &&
        (p.partial_credit.rows() != n || p.partial_credit.cols() != n)) {
      throw std::invalid_argument("partial credit matrix has wrong dimensions");
    }
  }
  const PlayerUtility& grammar = utility_.players[0];
  edges_.assign(n * k, 0);
  messages_for_.assign(n, {});
  contents_for_.assign(k, {});
  for (size_t c = 0; c < n; ++c) {
    for (size_t m = 0; m < k; ++m) {
      if (grammar.sender_cost.Has(c, m) && grammar.receiver_cost.Has(m, c)) {
        edges_[c * k + m] = 1;
        messages_for_[c].push_back(m);
        contents_for_[m].push_back(c);
      }
    }
  }
}

std::optional<size_t> MeaningGame::FindContent(std::string_view id) const {
  for (size_t i = 0; i < contents_.size(); ++i) {
    if (contents_[i].id == id) return i;
  }
  return std::nullopt;
}

std::optional<size_t> MeaningGame::FindMessage(std::string_view id) const {
  for (size_t i = 0; i < messages_.size(); ++i) {
    if (messages_[i].id == id) return i;
  }
  return std::nullopt;
}

size_t MeaningGame::ContentIndex(std::string_view id) const {
  if (auto i = FindContent(id)) return *i;
  throw std::invalid_argument("unknown content '" + std::string(id) + "'");
}

size_t MeaningGame::MessageIndex(std::string_view id) const {
  if (auto i = FindMessage(id)) return *i;
  throw std::invalid_argument("unknown message '" + std::string(id) + "'");
}

size_t MeaningGame::num_edges() const {
  return static_cast<size_t>(std::count(edges_.begin(), edges_.end(), 1));
}

double MeaningGame::UtilityOf(Player player, size_t intended, size_t sent,
                              size_t interpreted) const {
  const PlayerUtility& u = utility_.For(player);
  double value = -u.sender_cost.ValueOr0(intended, sent) -
                 u.receiver_cost.ValueOr0(sent, interpreted);
  if (intended == interpreted) {
    value += u.success_bonus;
  } else if (!u.partial_credit.empty()) {
    value += u.partial_credit(intended, interpreted);
  }
  return value;
}

bool MeaningGame::operator==(const MeaningGame& other) const {
  if (contents_.size() != other.contents_.size() ||
      messages_.size() != other.messages_.size()) {
    return false;
  }
  for (size_t i = 0; i < contents_.size(); ++i) {
    if (contents_[i].id != other.contents_[i].id ||
        contents_[i].label != other.contents_[i].label) {
      return false;
    }
  }
  for (size_t i = 0; i < messages_.size(); ++i) {
    if (messages_[i].id != other.messages_[i].id ||
        messages_[i].label != other.messages_[i].label) {
      return false;
    }
  }
  return prior_ == other.prior_ && utility_ == other.utility_;
}

// ---------------------------------------------------------------------------
// GameBuilder

GameBuilder& GameBuilder::AddContent(std::string id, std::string label) {
  if (label.empty()) label = id;
  contents_.push_back({std::move(id), std::move(label)});
  prior_.emplace_back();
  return *this;
}

GameBuilder& GameBuilder::AddMessage(std::string id, std::string label) {
  if (label.empty()) label = id;
  messages_.push_back({std::move(id), std::move(label)});
  message_cost_.emplace_back();
  return *this;
}

GameBuilder& GameBuilder::SetPrior(std::string_view content, double weight) {
  prior_[ContentIdx(content)] = weight;
  return *this;
}

GameBuilder& GameBuilder::SetPrior(std::vector<double> weights) {
  if (weights.size() != contents_.size()) {
    throw std::invalid_argument("prior size does not match contents");
  }
  for (size_t i = 0; i < weights.size(); ++i) prior_[i] = weights[i];
  return *this;
}

GameBuilder& GameBuilder::SetSuccessBonus(double bonus) {
  bonus_ = {bonus, bonus};
  return *this;
}

GameBuilder& GameBuilder::SetSuccessBonus(Player player, double bonus) {
  bonus_[static_cast<size_t>(player)] = bonus;
  split_bonus_ = bonus_[0] != bonus_[1];
  return *this;
}

GameBuilder& GameBuilder::SetMessageCost(std::string_view message,
                                         double cost) {
  message_cost_[MessageIdx(message)] = cost;
  return *this;
}

GameBuilder& GameBuilder::SetPairCost(std::string_view content,
                                      std::string_view message,
                                      double sender_cost, double receiver_cost,
                                      std::optional<Player> player) {
  pairs_.push_back({ContentIdx(content), MessageIdx(message), sender_cost,
                    receiver_cost, player});
  return *this;
}

GameBuilder& GameBuilder::Exclude(std::string_view content,
                                  std::string_view message) {
  excluded_.emplace_back(ContentIdx(content), MessageIdx(message));
  return *this;
}

size_t GameBuilder::ContentIdx(std::string_view id) const {
  for (size_t i = 0; i < contents_.size(); ++i) {
    if (contents_[i].id == id) return i;
  }
  throw std::invalid_argument("unknown content '" + std::string(id) + "'");
}

size_t GameBuilder::MessageIdx(std::string_view id) const {
  for (size_t i = 0; i < messages_.size(); ++i) {
    if (messages_[i].id == id) return i;
  }
  throw std::invalid_argument("unknown message '" + std::string(id) + "'");
}

MeaningGame GameBuilder::Build() const {
  const size_t n = contents_.size();
  const size_t k = messages_.size();
  UtilityModel model;
  for (PlayerUtility& p : model.players) {
    p.sender_cost = PairTable(n, k);
    p.receiver_cost = PairTable(k, n);
  }
  model.players[0].success_bonus = bonus_[0];
  model.players[1].success_bonus = bonus_[1];

  for (size_t m = 0; m < k; ++m) {
    if (!message_cost_[m]) continue;
    for (size_t c = 0; c < n; ++c) {
      for (PlayerUtility& p : model.players) {
        p.sender_cost.Set(c, m, *message_cost_[m]);
        p.receiver_cost.Set(m, c, 0.0);
      }
    }
  }
  bool split = split_bonus_;
  for (const PairEntry& e : pairs_) {
    for (size_t p = 0; p < 2; ++p) {
      if (e.player && static_cast<size_t>(*e.player) != p) continue;
      model.players[p].sender_cost.Set(e.content, e.message, e.sender_cost);
      model.players[p].receiver_cost.Set(e.message, e.content,
                                         e.receiver_cost);
    }
    if (e.player) split = true;
  }
  for (auto [c, m] : excluded_) {
    for (PlayerUtility& p : model.players) {
      p.sender_cost.Erase(c, m);
      p.receiver_cost.Erase(m, c);
    }
  }
  model.shared = !split;

  std::vector<double> prior(n, 0.0);
  bool any = false;
  for (size_t i = 0; i < n; ++i) {
    if (prior_[i]) {
      prior[i] = *prior_[i];
      any = true;
    }
  }
  if (!any && n > 0) prior.assign(n, 1.0 / static_cast<double>(n));
  return MeaningGame(contents_, messages_, std::move(prior), std::move(model));
}

// ---------------------------------------------------------------------------
// Validation

ValidationReport ValidateGame(const MeaningGame& game) {
  ValidationReport report;
  auto& out = report.violations;
  const size_t n = game.num_contents();
  const size_t k = game.num_messages();

  if (n == 0) out.push_back("game has no contents");
  if (k == 0) out.push_back("game has no messages");

  std::set<std::string> seen;
  for (const Content& c : game.contents()) {
    if (c.id.empty()) out.push_back("content with empty id");
    if (!seen.insert(c.id).second) {
      out.push_back("duplicate content id '" + c.id + "'");
    }
  }
  seen.clear();
  for (const Message& m : game.messages()) {
    if (m.id.empty()) out.push_back("message with empty id");
    if (!seen.insert(m.id).second) {
      out.push_back("duplicate message id '" + m.id + "'");
    }
  }

  double total = 0.0;
  for (size_t c = 0; c < n; ++c) {
    const double w = game.prior()[c];
    if (!std::isfinite(w) || w < 0.0) {
      out.push_back("prior: weight of '" + game.content(c).id +
                    "' is not a nonnegative number (" + Fmt(w) + ")");
    }
    total += w;
  }
  if (n > 0 && std::abs(total - 1.0) > kTolerance) {
    out.push_back("prior: weights sum to " + Fmt(total) + ", expected 1");
  }

  const UtilityModel& model = game.utility();
  for (Player player : {Player::kSender, Player::kReceiver}) {
    const PlayerUtility& u = model.For(player);
    const std::string who(PlayerName(player));
    if (!std::isfinite(u.success_bonus) || u.success_bonus < 0.0) {
      out.push_back(who + " success bonus must be a nonnegative number");
    } else if (u.success_bonus == 0.0) {
      report.warnings.push_back(who + " success bonus is zero");
    }
    for (size_t c = 0; c < n; ++c) {
      for (size_t m = 0; m < k; ++m) {
        auto sc = u.sender_cost.Get(c, m);
        auto rc = u.receiver_cost.Get(m, c);
        const std::string pair =
            "<" + game.content(c).id + ", " + game.message(m).id + ">";
        if (sc && (!std::isfinite(*sc) || *sc < 0.0)) {
          out.push_back(who + " sender cost of " + pair +
                        " must be nonnegative");
        }
        if (rc && (!std::isfinite(*rc) || *rc < 0.0)) {
          out.push_back(who + " receiver cost of " + pair +
                        " must be nonnegative");
        }
        if (player == Player::kSender && sc.has_value() != rc.has_value()) {
          report.warnings.push_back("pair " + pair +
                                    " has only one cost entry and is treated "
                                    "as ungrammatical");
        }
        if (player == Player::kReceiver) {
          const PlayerUtility& s = model.For(Player::kSender);
          if (s.sender_cost.Has(c, m) != u.sender_cost.Has(c, m) ||
              s.receiver_cost.Has(m, c) != u.receiver_cost.Has(m, c)) {
            out.push_back("players disagree on the grammaticality of " + pair);
          }
        }
      }
    }
    if (!u.partial_credit.empty()) {
      for (size_t a = 0; a < n; ++a) {
        for (size_t b = 0; b < n; ++b) {
          const double v = u.partial_credit(a, b);
          if (a == b && v != 0.0) {
            out.push_back(who + " partial credit has a nonzero diagonal");
          } else if (v < 0.0 || !std::isfinite(v)) {
            out.push_back(who + " partial credit must be nonnegative");
          }
        }
      }
    }
    // Positive utility only for c_S == c_R, apart from declared constituent
    // credit.
    for (size_t cs = 0; cs < n; ++cs) {
      for (size_t m : game.MessagesFor(cs)) {
        for (size_t cr : game.ContentsFor(m)) {
          if (cs == cr) continue;
          double v = game.UtilityOf(player, cs, m, cr);
          if (!u.partial_credit.empty()) v -= u.partial_credit(cs, cr);
          if (v > kTolerance) {
            out.push_back(who + " utility of mismatched turn <" +
                          game.content(cs).id + ", " + game.message(m).id +
                          ", " + game.content(cr).id + "> is positive");
          }
        }
      }
    }
  }
  if (model.shared && !(model.players[0] == model.players[1])) {
    out.push_back("utility marked shared but players' tables differ");
  }

  for (size_t c = 0; c < n; ++c) {
    if (game.MessagesFor(c).empty()) {
      out.push_back("content '" + game.content(c).id +
                    "' has no grammatical message");
    }
  }

  if (report.ok()) {
    const double spread = MaxCostSpread(game);
    for (Player player : {Player::kSender, Player::kReceiver}) {
      const double bonus = model.For(player).success_bonus;
      if (bonus > 0.0 && bonus <= spread) {
        report.warnings.push_back(
            std::string(PlayerName(player)) + " success bonus " + Fmt(bonus) +
            " does not exceed the cost spread " + Fmt(spread) +
            "; full-success equilibria may not exist");
      }
    }
  }
  return report;
}

double MaxCostSpread(const MeaningGame& game) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Player player : {Player::kSender, Player::kReceiver}) {
    const PlayerUtility& u = game.utility().For(player);
    for (size_t c = 0; c < game.num_contents(); ++c) {
      for (size_t m : game.MessagesFor(c)) {
        const double cost =
            u.sender_cost.ValueOr0(c, m) + u.receiver_cost.ValueOr0(m, c);
        lo = std::min(lo, cost);
        hi = std::max(hi, cost);
      }
    }
  }
  return hi >= lo ? hi - lo : 0.0;
}

// ---------------------------------------------------------------------------
// Strategies

namespace {

template <typename Pred>
std::vector<std::string> ValidateRows(const Matrix& rows, size_t expect_rows,
                                      size_t expect_cols, const char* kind,
                                      Pred allowed,
                                      const std::vector<bool>& may_be_empty) {
  std::vector<std::string> out;
  if (rows.rows() != expect_rows || rows.cols() != expect_cols) {
    out.push_back(std::string(kind) + " strategy has dimensions " +
                  std::to_string(rows.rows()) + "x" +
                  std::to_string(rows.cols()) + ", expected " +
                  std::to_string(expect_rows) + "x" +
                  std::to_string(expect_cols));
    return out;
  }
  for (size_t r = 0; r < expect_rows; ++r) {
    double sum = 0.0;
    for (size_t c = 0; c < expect_cols; ++c) {
      const double p = rows(r, c);
      if (!std::isfinite(p) || p < -kTolerance || p > 1.0 + kTolerance) {
        out.push_back(std::string(kind) + " row " + std::to_string(r) +
                      " has an entry outside [0,1]");
      }
      if (p > 0.0 && !allowed(r, c)) {
        out.push_back(std::string(kind) + " row " + std::to_string(r) +
                      " puts mass on an ungrammatical pair");
      }
      sum += p;
    }
    if (may_be_empty[r] && sum == 0.0) continue;
    if (std::abs(sum - 1.0) > kTolerance) {
      out.push_back(std::string(kind) + " row " + std::to_string(r) +
                    " sums to " + Fmt(sum));
    }
  }
  return out;
}

void RequireDims(const MeaningGame& game, const SenderStrategy& s,
                 const ReceiverStrategy& r) {
  if (s.rows.rows() != game.num_contents() ||
      s.rows.cols() != game.num_messages() ||
      r.rows.rows() != game.num_messages() ||
      r.rows.cols() != game.num_contents()) {
    throw std::invalid_argument(
        "strategy dimensions do not match the game's contents and messages");
  }
}

}  // namespace

std::vector<std::string> ValidateStrategy(const MeaningGame& game,
                                          const SenderStrategy& sender) {
  std::vector<bool> never_empty(game.num_contents(), false);
  return ValidateRows(
      sender.rows, game.num_contents(), game.num_messages(), "sender",
      [&](size_t c, size_t m) { return game.HasEdge(c, m); }, never_empty);
}

std::vector<std::string> ValidateStrategy(const MeaningGame& game,
                                          const ReceiverStrategy& receiver) {
  std::vector<bool> isolated(game.num_messages());
  for (size_t m = 0; m < game.num_messages(); ++m) {
    isolated[m] = game.ContentsFor(m).empty();
  }
  return ValidateRows(
      receiver.rows, game.num_messages(), game.num_contents(), "receiver",
      [&](size_t m, size_t c) { return game.HasEdge(c, m); }, isolated);
}

double Utility(const MeaningGame& game, const Turn& turn, Player player) {
  if (turn.intended >= game.num_contents() ||
      turn.interpreted >= game.num_contents() ||
      turn.sent >= game.num_messages()) {
    throw std::invalid_argument("turn references an unknown content or message");
  }
  if (!game.HasEdge(turn.intended, turn.sent) ||
      !game.HasEdge(turn.interpreted, turn.sent)) {
    throw std::invalid_argument("turn uses an ungrammatical pair");
  }
  return game.UtilityOf(player, turn.intended, turn.sent, turn.interpreted);
}

double ExpectedUtility(const MeaningGame& game, const SenderStrategy& sender,
                       const ReceiverStrategy& receiver, Player player) {
  RequireDims(game, sender, receiver);
  double total = 0.0;
  for (size_t c = 0; c < game.num_contents(); ++c) {
    const double pc = game.prior()[c];
    if (pc == 0.0) continue;
    for (size_t m : game.MessagesFor(c)) {
      const double ps = sender.rows(c, m);
      if (ps == 0.0) continue;
      for (size_t cr : game.ContentsFor(m)) {
        const double pr = receiver.rows(m, cr);
        if (pr == 0.0) continue;
        total += pc * ps * pr * game.UtilityOf(player, c, m, cr);
      }
    }
  }
  return total;
}

double SuccessProbability(const MeaningGame& game,
                          const SenderStrategy& sender,
                          const ReceiverStrategy& receiver) {
  RequireDims(game, sender, receiver);
  double total = 0.0;
  for (size_t c = 0; c < game.num_contents(); ++c) {
    double inner = 0.0;
    for (size_t m : game.MessagesFor(c)) {
      inner += sender.rows(c, m) * receiver.rows(m, c);
    }
    total += game.prior()[c] * inner;
  }
  return total;
}

MeaningGame EqualizeUtilities(const MeaningGame& game) {
  const size_t n = game.num_contents();
  const size_t k = game.num_messages();
  const PlayerUtility& s = game.utility().For(Player::kSender);
  const PlayerUtility& r = game.utility().For(Player::kReceiver);
  PlayerUtility mean;
  mean.success_bonus = 0.5 * (s.success_bonus + r.success_bonus);
  mean.sender_cost = PairTable(n, k);
  mean.receiver_cost = PairTable(k, n);
  for (size_t c = 0; c < n; ++c) {
    for (size_t m = 0; m < k; ++m) {
      auto a = s.sender_cost.Get(c, m);
      auto b = r.sender_cost.Get(c, m);
      if (a && b) mean.sender_cost.Set(c, m, 0.5 * (*a + *b));
      auto x = s.receiver_cost.Get(m, c);
      auto y = r.receiver_cost.Get(m, c);
      if (x && y) mean.receiver_cost.Set(m, c, 0.5 * (*x + *y));
    }
  }
  if (!s.partial_credit.empty() || !r.partial_credit.empty()) {
    mean.partial_credit = Matrix(n, n);
    for (size_t a = 0; a < n; ++a) {
      for (size_t b = 0; b < n; ++b) {
        const double ps = s.partial_credit.empty() ? 0.0 : s.partial_credit(a, b);
        const double pr = r.partial_credit.empty() ? 0.0 : r.partial_credit(a, b);
        mean.partial_credit(a, b) = 0.5 * (ps + pr);
      }
    }
  }
  UtilityModel model;
  model.players = {mean, mean};
  model.shared = true;
  return MeaningGame(game.contents(), game.messages(), game.prior(),
                     std::move(model));
}

bool IsCheapTalk(const MeaningGame& game) {
  const size_t n = game.num_contents();
  for (Player player : {Player::kSender, Player::kReceiver}) {
    for (size_t cs = 0; cs < n; ++cs) {
      for (size_t cr = 0; cr < n; ++cr) {
        std::optional<double> first;
        for (size_t m : game.MessagesFor(cs)) {
          if (!game.HasEdge(cr, m)) continue;
          const double u = game.UtilityOf(player, cs, m, cr);
          if (!first) {
            first = u;
          } else if (std::abs(u - *first) > kTolerance) {
            return false;
          }
        }
      }
    }
  }
  return true;
}

MeaningGame WithoutSuccessBonus(const MeaningGame& game) {
  UtilityModel model = game.utility();
  for (PlayerUtility& p : model.players) {
    p.success_bonus = 0.0;
    p.partial_credit = Matrix();
  }
  return MeaningGame(game.contents(), game.messages(), game.prior(),
                     std::move(model));
}

}  // namespace meaning
