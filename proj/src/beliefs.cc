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

#include "meaning/beliefs.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <stdexcept>

namespace meaning {

namespace {

// Index with the largest value; near-ties go to the smallest id.
template <typename Id>
int ArgMaxById(const std::vector<size_t>& options,
               const std::vector<double>& values, Id id) {
  double best = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < options.size(); ++i) best = std::max(best, values[i]);
  int pick = -1;
  for (size_t i = 0; i < options.size(); ++i) {
    if (values[i] < best - kTolerance) continue;
    if (pick < 0 || id(options[i]) < id(static_cast<size_t>(pick))) {
      pick = static_cast<int>(options[i]);
    }
  }
  return pick;
}

SenderStrategy PureSender(const MeaningGame& game,
                          const std::vector<int>& sender) {
  SenderStrategy s{Matrix(game.num_contents(), game.num_messages())};
  for (size_t c = 0; c < sender.size(); ++c) s.rows(c, sender[c]) = 1.0;
  return s;
}

bool SameShape(const MeaningGame& a, const MeaningGame& b) {
  if (a.num_contents() != b.num_contents() ||
      a.num_messages() != b.num_messages()) {
    return false;
  }
  for (size_t c = 0; c < a.num_contents(); ++c) {
    if (a.content(c).id != b.content(c).id) return false;
    for (size_t m = 0; m < a.num_messages(); ++m) {
      if (a.HasEdge(c, m) != b.HasEdge(c, m)) return false;
    }
  }
  for (size_t m = 0; m < a.num_messages(); ++m) {
    if (a.message(m).id != b.message(m).id) return false;
  }
  return true;
}

}  // namespace

std::vector<int> Level0SenderMap(const MeaningGame& game) {
  const PlayerUtility& u = game.utility().For(Player::kSender);
  std::vector<int> out(game.num_contents(), -1);
  for (size_t c = 0; c < game.num_contents(); ++c) {
    const auto& options = game.MessagesFor(c);
    std::vector<double> values;
    for (size_t m : options) values.push_back(-u.sender_cost.ValueOr0(c, m));
    out[c] = ArgMaxById(options, values,
                        [&](size_t m) { return game.message(m).id; });
  }
  return out;
}

std::vector<int> Level0ReceiverMap(const MeaningGame& game) {
  std::vector<int> out(game.num_messages(), -1);
  for (size_t m = 0; m < game.num_messages(); ++m) {
    const auto& options = game.ContentsFor(m);
    std::vector<double> values;
    for (size_t c : options) values.push_back(game.prior()[c]);
    out[m] = ArgMaxById(options, values,
                        [&](size_t c) { return game.content(c).id; });
  }
  return out;
}

std::vector<int> SenderBestResponse(const MeaningGame& game,
                                    const std::vector<int>& receiver) {
  std::vector<int> out(game.num_contents(), -1);
  for (size_t c = 0; c < game.num_contents(); ++c) {
    const auto& options = game.MessagesFor(c);
    std::vector<double> values;
    for (size_t m : options) {
      values.push_back(
          game.UtilityOf(Player::kSender, c, m, receiver[m]));
    }
    out[c] = ArgMaxById(options, values,
                        [&](size_t m) { return game.message(m).id; });
  }
  return out;
}

std::vector<int> ReceiverBestResponse(const MeaningGame& game,
                                      const std::vector<int>& sender,
                                      OffPathRule rule) {
  const BeliefSystem beliefs =
      PosteriorBeliefs(game, PureSender(game, sender), rule);
  std::vector<int> out(game.num_messages(), -1);
  for (size_t m = 0; m < game.num_messages(); ++m) {
    const auto& options = game.ContentsFor(m);
    if (options.empty()) continue;
    std::vector<double> values;
    for (size_t as : options) {
      double v = 0.0;
      for (size_t c : options) {
        const double mu = beliefs.posterior[m][c];
        if (mu != 0.0) v += mu * game.UtilityOf(Player::kReceiver, c, m, as);
      }
      values.push_back(v);
    }
    out[m] = ArgMaxById(options, values,
                        [&](size_t c) { return game.content(c).id; });
  }
  return out;
}

LevelKResult LevelKStrategies(const MeaningGame& g_s, const MeaningGame& g_r,
                              const LevelKConfig& config) {
  if (!SameShape(g_s, g_r)) {
    throw std::invalid_argument(
        "level-k games must share contents, messages and edges");
  }
  if (config.depth < 0 || config.depth > config.max_depth) {
    throw std::invalid_argument("level-k depth " +
                                std::to_string(config.depth) +
                                " outside [0, " +
                                std::to_string(config.max_depth) + "]");
  }
  LevelKResult out;
  out.levels.push_back({Level0SenderMap(g_s), Level0ReceiverMap(g_r)});
  for (int k = 0; k < config.depth; ++k) {
    const PureProfile& prev = out.levels.back();
    PureProfile next{SenderBestResponse(g_s, prev.receiver),
                     ReceiverBestResponse(g_r, prev.sender, config.rule)};
    out.levels.push_back(std::move(next));
  }
  for (size_t k = 0; k + 1 < out.levels.size(); ++k) {
    if (out.levels[k] == out.levels[k + 1]) {
      out.fixed_at = static_cast<int>(k);
      return out;
    }
  }
  for (size_t j = 2; j < out.levels.size(); ++j) {
    for (size_t k = 0; k + 1 < j; ++k) {
      if (out.levels[k] == out.levels[j]) {
        out.cycle_start = static_cast<int>(k);
        out.cycle_length = static_cast<int>(j - k);
        return out;
      }
    }
  }
  return out;
}

std::vector<std::string> ValidateBeliefTree(const BeliefNode& root) {
  std::vector<std::string> out;
  std::function<void(const BeliefNode&, const std::string&)> visit =
      [&](const BeliefNode& node, const std::string& where) {
        const MeaningGame& g = node.game_estimate;
        const size_t limit = node.viewpoint == Viewpoint::kSender
                                 ? g.num_contents()
                                 : g.num_messages();
        if (node.focus >= limit) out.push_back(where + ": focus out of range");
        if (!SameShape(g, root.game_estimate)) {
          out.push_back(where + ": estimate differs in contents, messages or "
                                "edges");
        }
        for (const auto& v : ValidateGame(g).violations) {
          out.push_back(where + ": " + v);
        }
        for (size_t i = 0; i < node.children.size(); ++i) {
          const BeliefNode& child = node.children[i];
          const std::string at = where + "/" + std::to_string(i);
          if (child.viewpoint == node.viewpoint) {
            out.push_back(at + ": viewpoint does not alternate");
          }
          visit(child, at);
        }
      };
  visit(root, "root");
  return out;
}

PureProfile ImpliedProfile(const BeliefNode& node, OffPathRule rule) {
  const MeaningGame& g = node.game_estimate;
  if (node.children.empty()) {
    return {Level0SenderMap(g), Level0ReceiverMap(g)};
  }
  if (node.viewpoint == Viewpoint::kSender) {
    std::vector<int> receiver = Level0ReceiverMap(g);
    for (const auto& child : node.children) {
      receiver[child.focus] = ImpliedProfile(child, rule).receiver[child.focus];
    }
    return {SenderBestResponse(g, receiver), receiver};
  }
  std::vector<int> sender = Level0SenderMap(g);
  for (const auto& child : node.children) {
    sender[child.focus] = ImpliedProfile(child, rule).sender[child.focus];
  }
  return {sender, ReceiverBestResponse(g, sender, rule)};
}

std::vector<NodePath> ConsistencyCheck(const BeliefNode& root,
                                       const std::string& observed,
                                       OffPathRule rule) {
  if (auto problems = ValidateBeliefTree(root); !problems.empty()) {
    throw std::invalid_argument(problems.front());
  }
  auto m = root.game_estimate.FindMessage(observed);
  if (!m) {
    throw std::invalid_argument("observed message '" + observed +
                                "' is not in the game");
  }
  std::vector<NodePath> out;
  NodePath path;
  std::function<void(const BeliefNode&)> visit = [&](const BeliefNode& node) {
    const auto sender = ImpliedProfile(node, rule).sender;
    if (std::find(sender.begin(), sender.end(), static_cast<int>(*m)) ==
        sender.end()) {
      out.push_back(path);
    }
    for (size_t i = 0; i < node.children.size(); ++i) {
      path.push_back(i);
      visit(node.children[i]);
      path.pop_back();
    }
  };
  visit(root);
  return out;
}

bool ApproxEqual(const MeaningGame& a, const MeaningGame& b, double tolerance) {
  if (!SameShape(a, b)) return false;
  auto close = [&](double x, double y) { return std::abs(x - y) <= tolerance; };
  for (size_t c = 0; c < a.num_contents(); ++c) {
    if (!close(a.prior()[c], b.prior()[c])) return false;
  }
  for (Player p : {Player::kSender, Player::kReceiver}) {
    const PlayerUtility& x = a.utility().For(p);
    const PlayerUtility& y = b.utility().For(p);
    if (!close(x.success_bonus, y.success_bonus)) return false;
    for (size_t c = 0; c < a.num_contents(); ++c) {
      for (size_t m : a.MessagesFor(c)) {
        if (!close(x.sender_cost.ValueOr0(c, m), y.sender_cost.ValueOr0(c, m)) ||
            !close(x.receiver_cost.ValueOr0(m, c),
                   y.receiver_cost.ValueOr0(m, c))) {
          return false;
        }
      }
      for (size_t d = 0; d < a.num_contents(); ++d) {
        const double px = x.partial_credit.empty() ? 0.0 : x.partial_credit(c, d);
        const double py = y.partial_credit.empty() ? 0.0 : y.partial_credit(c, d);
        if (!close(px, py)) return false;
      }
    }
  }
  return true;
}

std::optional<MeaningGame> CollapseCommonKnowledge(const BeliefNode& root) {
  bool agree = true;
  std::function<void(const BeliefNode&)> visit = [&](const BeliefNode& node) {
    agree = agree && ApproxEqual(node.game_estimate, root.game_estimate);
    for (const auto& child : node.children) visit(child);
  };
  visit(root);
  if (!agree) return std::nullopt;
  return root.game_estimate;
}

MeaningGame Subgame(const MeaningGame& game, const std::vector<size_t>& contents,
                    const std::vector<size_t>& messages) {
  std::vector<Content> cs;
  std::vector<Message> ms;
  std::vector<double> prior;
  double total = 0.0;
  for (size_t c : contents) {
    cs.push_back(game.content(c));
    prior.push_back(game.prior()[c]);
    total += prior.back();
  }
  if (!(total > 0.0)) {
    throw std::invalid_argument("subgame keeps no prior mass");
  }
  for (double& p : prior) p /= total;
  for (size_t m : messages) ms.push_back(game.message(m));

  UtilityModel model = game.utility();
  for (size_t p = 0; p < 2; ++p) {
    const PlayerUtility& from = game.utility().players[p];
    PlayerUtility& to = model.players[p];
    to.sender_cost = PairTable(cs.size(), ms.size());
    to.receiver_cost = PairTable(ms.size(), cs.size());
    for (size_t i = 0; i < contents.size(); ++i) {
      for (size_t j = 0; j < messages.size(); ++j) {
        if (auto v = from.sender_cost.Get(contents[i], messages[j])) {
          to.sender_cost.Set(i, j, *v);
        }
        if (auto v = from.receiver_cost.Get(messages[j], contents[i])) {
          to.receiver_cost.Set(j, i, *v);
        }
      }
    }
    if (!from.partial_credit.empty()) {
      Matrix pc(cs.size(), cs.size());
      for (size_t i = 0; i < contents.size(); ++i) {
        for (size_t j = 0; j < contents.size(); ++j) {
          pc(i, j) = from.partial_credit(contents[i], contents[j]);
        }
      }
      to.partial_credit = std::move(pc);
    }
  }
  return MeaningGame(std::move(cs), std::move(ms), std::move(prior),
                     std::move(model));
}

MeaningGame PruneByMessage(const MeaningGame& game, const std::string& observed,
                           double threshold) {
  const auto start = game.FindMessage(observed);
  if (!start) {
    throw std::invalid_argument("observed message '" + observed +
                                "' is not in the game");
  }
  const size_t n = game.num_contents();
  const size_t k = game.num_messages();
  auto weight = [&](size_t c, size_t m) {
    double w = 0.0;
    for (Player p : {Player::kSender, Player::kReceiver}) {
      const PlayerUtility& u = game.utility().For(p);
      w = std::max(w, u.sender_cost.ValueOr0(c, m) +
                          u.receiver_cost.ValueOr0(m, c));
    }
    return w;
  };
  // Nodes 0..n-1 are contents, n..n+k-1 messages.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n + k, inf);
  using Item = std::pair<double, size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[n + *start] = 0.0;
  queue.push({0.0, n + *start});
  while (!queue.empty()) {
    auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[v]) continue;
    if (v < n) {
      for (size_t m : game.MessagesFor(v)) {
        const double nd = d + weight(v, m);
        if (nd < dist[n + m]) {
          dist[n + m] = nd;
          queue.push({nd, n + m});
        }
      }
    } else {
      for (size_t c : game.ContentsFor(v - n)) {
        const double nd = d + weight(c, v - n);
        if (nd < dist[c]) {
          dist[c] = nd;
          queue.push({nd, c});
        }
      }
    }
  }
  // Every node reached within the threshold lies on a path of nodes that are
  // also within it, so the survivors already form one connected component.
  std::vector<size_t> contents, messages;
  for (size_t c = 0; c < n; ++c) {
    if (std::isfinite(dist[c]) && dist[c] <= threshold) {
      contents.push_back(c);
    }
  }
  for (size_t m = 0; m < k; ++m) {
    if (std::isfinite(dist[n + m]) && dist[n + m] <= threshold) {
      messages.push_back(m);
    }
  }
  if (contents.empty()) {
    throw std::invalid_argument("pruning around '" + observed +
                                "' removes every content");
  }
  return Subgame(game, contents, messages);
}

}  // namespace meaning
