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

// Core representation of meaning games: discrete signaling games whose sender
// types and receiver actions are both semantic contents. A turn
// <intended, sent, interpreted> is successful iff intended == interpreted.
//
// Utilities decompose additively:
//
//   U_X(c_S, m, c_R) = bonus_X * [c_S == c_R] + partial_X(c_S, c_R)
//                      - sender_cost_X(c_S, m) - receiver_cost_X(m, c_R)
//
// where partial_X is empty for ordinary games and only carries
// constituent-level success credit in games produced by compound flattening.
// A (content, message) pair is grammatical (an edge) iff it has both a sender
// cost and a receiver cost entry.

#ifndef MEANING_GAME_H_
#define MEANING_GAME_H_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace meaning {

// Absolute tolerance for probability sums and best-response comparisons.
inline constexpr double kTolerance = 1e-9;

enum class Player { kSender = 0, kReceiver = 1 };

std::string_view PlayerName(Player player);

struct Content {
  std::string id;
  std::string label;
};

struct Message {
  std::string id;
  std::string label;
};

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(size_t rows, size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(size_t r, size_t c) { return data_[r * cols_ + c]; }
  double operator()(size_t r, size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(size_t r) { return {data_.data() + r * cols_, cols_}; }

  bool operator==(const Matrix&) const = default;

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<double> data_;
};

// Partial map from (row, col) to a nonnegative cost. Absent entries mark
// ungrammatical pairs.
class PairTable {
 public:
  PairTable() = default;
  PairTable(size_t rows, size_t cols)
      : rows_(rows), cols_(cols), values_(rows * cols, 0.0),
        present_(rows * cols, 0) {}

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }

  std::optional<double> Get(size_t r, size_t c) const {
    if (!present_[r * cols_ + c]) return std::nullopt;
    return values_[r * cols_ + c];
  }
  bool Has(size_t r, size_t c) const { return present_[r * cols_ + c] != 0; }
  // Value at a present entry; 0 for absent ones.
  double ValueOr0(size_t r, size_t c) const { return values_[r * cols_ + c]; }

  void Set(size_t r, size_t c, double value) {
    values_[r * cols_ + c] = value;
    present_[r * cols_ + c] = 1;
  }
  void Erase(size_t r, size_t c) {
    values_[r * cols_ + c] = 0.0;
    present_[r * cols_ + c] = 0;
  }

  bool operator==(const PairTable&) const = default;

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<double> values_;
  std::vector<char> present_;
};

// One player's utility parameters.
struct PlayerUtility {
  double success_bonus = 1.0;
  PairTable sender_cost;    // contents x messages: cost of <c_S, m>
  PairTable receiver_cost;  // messages x contents: cost of <m, c_R>
  // contents x contents with zero diagonal, or empty.
  Matrix partial_credit;

  bool operator==(const PlayerUtility&) const = default;
};

struct UtilityModel {
  std::array<PlayerUtility, 2> players;
  // When set, both players evaluate every turn identically.
  bool shared = false;

  const PlayerUtility& For(Player p) const {
    return players[static_cast<size_t>(p)];
  }
  PlayerUtility& For(Player p) { return players[static_cast<size_t>(p)]; }

  bool operator==(const UtilityModel&) const = default;
};

// Turn of communication <intended, sent, interpreted>, by index.
struct Turn {
  size_t intended = 0;
  size_t sent = 0;
  size_t interpreted = 0;
};

// Immutable after construction. The constructor checks only dimensions;
// ValidateGame reports every invariant violation.
class MeaningGame {
 public:
  MeaningGame() = default;
  MeaningGame(std::vector<Content> contents, std::vector<Message> messages,
              std::vector<double> prior, UtilityModel utility);

  size_t num_contents() const { return contents_.size(); }
  size_t num_messages() const { return messages_.size(); }
  const std::vector<Content>& contents() const { return contents_; }
  const std::vector<Message>& messages() const { return messages_; }
  const Content& content(size_t i) const { return contents_[i]; }
  const Message& message(size_t i) const { return messages_[i]; }
  const std::vector<double>& prior() const { return prior_; }
  const UtilityModel& utility() const { return utility_; }

  std::optional<size_t> FindContent(std::string_view id) const;
  std::optional<size_t> FindMessage(std::string_view id) const;
  size_t ContentIndex(std::string_view id) const;  // throws if unknown
  size_t MessageIndex(std::string_view id) const;  // throws if unknown

  bool HasEdge(size_t content, size_t message) const {
    return edges_[content * messages_.size() + message] != 0;
  }
  // Grammatical messages for a content / contents for a message, ascending.
  const std::vector<size_t>& MessagesFor(size_t content) const {
    return messages_for_[content];
  }
  const std::vector<size_t>& ContentsFor(size_t message) const {
    return contents_for_[message];
  }
  size_t num_edges() const;

  // Unchecked utility of a turn whose pairs are both edges.
  double UtilityOf(Player player, size_t intended, size_t sent,
                   size_t interpreted) const;

  bool operator==(const MeaningGame& other) const;

 private:
  std::vector<Content> contents_;
  std::vector<Message> messages_;
  std::vector<double> prior_;
  UtilityModel utility_;
  std::vector<char> edges_;
  std::vector<std::vector<size_t>> messages_for_;
  std::vector<std::vector<size_t>> contents_for_;
};

// Incremental construction helper. Contents and messages are referenced by
// id; costs given through SetMessageCost apply to every content unless the
// pair is excluded or overridden by SetPairCost.
class GameBuilder {
 public:
  GameBuilder& AddContent(std::string id, std::string label = "");
  GameBuilder& AddMessage(std::string id, std::string label = "");
  GameBuilder& SetPrior(std::string_view content, double weight);
  GameBuilder& SetPrior(std::vector<double> weights);
  GameBuilder& SetSuccessBonus(double bonus);
  GameBuilder& SetSuccessBonus(Player player, double bonus);
  // Sender-side cost for all pairs of the message.
  GameBuilder& SetMessageCost(std::string_view message, double cost);
  // Explicit pair entry for both players (or one, when `player` is set).
  GameBuilder& SetPairCost(std::string_view content, std::string_view message,
                           double sender_cost, double receiver_cost = 0.0,
                           std::optional<Player> player = std::nullopt);
  GameBuilder& Exclude(std::string_view content, std::string_view message);

  // Both players share one utility table unless a player-specific entry or
  // bonus was given.
  MeaningGame Build() const;

 private:
  struct PairEntry {
    size_t content;
    size_t message;
    double sender_cost;
    double receiver_cost;
    std::optional<Player> player;
  };
  size_t ContentIdx(std::string_view id) const;
  size_t MessageIdx(std::string_view id) const;

  std::vector<Content> contents_;
  std::vector<Message> messages_;
  std::vector<std::optional<double>> prior_;
  std::array<double, 2> bonus_ = {1.0, 1.0};
  bool split_bonus_ = false;
  std::vector<std::optional<double>> message_cost_;
  std::vector<PairEntry> pairs_;
  std::vector<std::pair<size_t, size_t>> excluded_;
};

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;
  bool ok() const { return violations.empty(); }
};

ValidationReport ValidateGame(const MeaningGame& game);

// Sender strategy sigma_S(m | c): contents x messages.
struct SenderStrategy {
  Matrix rows;
  bool operator==(const SenderStrategy&) const = default;
};

// Receiver strategy sigma_R(c | m): messages x contents. Rows of messages
// without any edge are all zero.
struct ReceiverStrategy {
  Matrix rows;
  bool operator==(const ReceiverStrategy&) const = default;
};

std::vector<std::string> ValidateStrategy(const MeaningGame& game,
                                          const SenderStrategy& sender);
std::vector<std::string> ValidateStrategy(const MeaningGame& game,
                                          const ReceiverStrategy& receiver);

// Utility of a turn for `player`; invalid_argument on unknown indices or
// ungrammatical pairs.
double Utility(const MeaningGame& game, const Turn& turn, Player player);

// sum_{c,m,c'} P(c) sigma_S(m|c) sigma_R(c'|m) U_X(c,m,c').
double ExpectedUtility(const MeaningGame& game, const SenderStrategy& sender,
                       const ReceiverStrategy& receiver, Player player);

// sum_c P(c) sum_m sigma_S(m|c) sigma_R(c|m).
double SuccessProbability(const MeaningGame& game,
                          const SenderStrategy& sender,
                          const ReceiverStrategy& receiver);

// Both players' utilities replaced by the pointwise mean of the two.
MeaningGame EqualizeUtilities(const MeaningGame& game);

// True iff every player's utility for each (c_S, c_R) is constant across all
// messages grammatical for both.
bool IsCheapTalk(const MeaningGame& game);

// Same game with both success bonuses set to zero.
MeaningGame WithoutSuccessBonus(const MeaningGame& game);

// Largest spread (max - min) of the round-trip pair costs
// sender_cost + receiver_cost over all edges, across both players.
double MaxCostSpread(const MeaningGame& game);

}  // namespace meaning

#endif  // MEANING_GAME_H_
