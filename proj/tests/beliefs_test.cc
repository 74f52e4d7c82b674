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

#include "doctest.h"
#include "generators.h"
#include "meaning/beliefs.h"
#include "meaning/scenario_io.h"
#include "oracle.h"

using namespace meaning;

namespace {

std::string Data(const std::string& name) {
  return std::string(MEANING_DATA_DIR) + "/" + name;
}

BeliefNode Node(Viewpoint v, size_t focus, const MeaningGame& g,
                std::vector<BeliefNode> children = {}) {
  return {v, focus, "", g, std::move(children)};
}

// S intending Fred, who models R reading 'he', who models both sender
// types. The Max leaf uses `max_leaf` as its estimate.
BeliefNode DepthTwoTree(const MeaningGame& g, const MeaningGame& max_leaf) {
  return Node(Viewpoint::kSender, 0, g,
              {Node(Viewpoint::kReceiver, 0, g,
                    {Node(Viewpoint::kSender, 0, g),
                     Node(Viewpoint::kSender, 1, max_leaf)})});
}

}  // namespace

TEST_CASE("level zero heuristics") {
  const auto g = gen::Fig2(0.6, 0.0, 0.5, 1.0);
  CHECK(Level0SenderMap(g) == std::vector<int>{0, 0});
  CHECK(Level0ReceiverMap(g) == std::vector<int>{0, 0});
  const auto r = LevelKStrategies(g, g, {.depth = 0});
  REQUIRE(r.levels.size() == 1);
  CHECK(r.levels[0].sender == Level0SenderMap(g));
  CHECK(r.levels[0].receiver == Level0ReceiverMap(g));
}

TEST_CASE("shared fig2 estimate reaches an equilibrium within depth 4") {
  const auto g = gen::Fig2(0.6, 0.0, 0.5, 1.0);
  const auto r = LevelKStrategies(g, g, {.depth = 4});
  REQUIRE(r.converged());
  CHECK(*r.fixed_at <= 4);
  CHECK(IsPureEquilibrium(g, r.levels[*r.fixed_at]).is_equilibrium);
  CHECK(oracle::IsEquilibrium(g, {r.levels[*r.fixed_at].sender,
                                  r.levels[*r.fixed_at].receiver}));
}

TEST_CASE("fixed profiles of shared estimates are equilibria") {
  gen::Rng rng(12);
  int fixed = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = gen::RandomGame(rng);
    const auto r = LevelKStrategies(g, g, {.depth = 8});
    if (!r.converged()) continue;
    ++fixed;
    const auto& p = r.levels[*r.fixed_at];
    CHECK(IsPureEquilibrium(g, p).is_equilibrium);
    CHECK(SenderBestResponse(g, p.receiver) == p.sender);
  }
  CHECK(fixed > 0);
}

TEST_CASE("opposite cost orderings oscillate") {
  const auto gs = LoadGame(Data("levelk_sender.game")).game;
  const auto gr = LoadGame(Data("levelk_receiver.game")).game;
  const auto r = LevelKStrategies(gs, gr, {.depth = 6});
  CHECK_FALSE(r.converged());
  REQUIRE(r.oscillating());
  CHECK(r.cycle_length == 2);
  const int s = *r.cycle_start;
  CHECK(r.levels[s] == r.levels[s + 2]);
  CHECK_FALSE(r.levels[s] == r.levels[s + 1]);
}

TEST_CASE("level-k argument errors") {
  const auto g = gen::Fig2(0.6, 0.0, 0.5, 1.0);
  const auto other = GameBuilder()
                         .AddContent("Fred")
                         .AddMessage("he")
                         .SetMessageCost("he", 0.0)
                         .Build();
  CHECK_THROWS_AS(LevelKStrategies(g, other), std::invalid_argument);
  CHECK_THROWS_AS(LevelKStrategies(g, g, {.depth = -1}), std::invalid_argument);
  CHECK_THROWS_AS(LevelKStrategies(g, g, {.depth = kMaxLevelDepth + 1}),
                  std::invalid_argument);
}

TEST_CASE("best responses break ties by id") {
  const auto g = gen::Fig2(0.5, 0.2, 0.2, 1.0);
  CHECK(SenderBestResponse(g, {0, 0}) == std::vector<int>{0, 0});
  CHECK(ReceiverBestResponse(g, {0, 0}, OffPathRule::kPriorRestricted) ==
        std::vector<int>{0, 0});
}

TEST_CASE("consistency check refutes exactly the planted node") {
  const auto g = gen::Fig2(0.6, 0.0, 0.5, 1.0);
  const auto wrong = gen::Fig2(0.6, 0.5, 0.0, 1.0);
  const auto planted = DepthTwoTree(g, wrong);
  CHECK(ValidateBeliefTree(planted).empty());
  const auto refuted = ConsistencyCheck(planted, "he");
  REQUIRE(refuted.size() == 1);
  CHECK(refuted[0] == NodePath{0, 1});

  const auto correct = DepthTwoTree(g, g);
  CHECK(ConsistencyCheck(correct, "he").empty());
}

TEST_CASE("prohibitively costly message refutes its believer") {
  const auto g = gen::Fig2(0.6, 0.0, 0.5, 1.0);
  const auto leaf = Node(Viewpoint::kSender, 0, gen::Fig2(0.6, 0.0, 1e6, 1.0));
  const auto refuted = ConsistencyCheck(leaf, "the_man");
  REQUIRE(refuted.size() == 1);
  CHECK(refuted[0].empty());
  CHECK_THROWS_AS(ConsistencyCheck(leaf, "she"), std::invalid_argument);
}

TEST_CASE("belief tree validation") {
  const auto g = gen::Fig2(0.6, 0.0, 0.5, 1.0);
  auto bad = Node(Viewpoint::kSender, 0, g, {Node(Viewpoint::kSender, 0, g)});
  CHECK_FALSE(ValidateBeliefTree(bad).empty());
  CHECK_THROWS_AS(ConsistencyCheck(bad, "he"), std::invalid_argument);
  auto range = Node(Viewpoint::kSender, 7, g);
  CHECK_FALSE(ValidateBeliefTree(range).empty());
}

TEST_CASE("common knowledge collapse") {
  const auto g = gen::Fig2(0.6, 0.0, 0.5, 1.0);
  const auto same = DepthTwoTree(g, gen::Fig2(0.6 + 1e-12, 0.0, 0.5, 1.0));
  const auto collapsed = CollapseCommonKnowledge(same);
  REQUIRE(collapsed);
  CHECK(ApproxEqual(*collapsed, g));
  CHECK_FALSE(CollapseCommonKnowledge(
      DepthTwoTree(g, gen::Fig2(0.6, 0.5, 0.0, 1.0))));
}

TEST_CASE("subgame renormalizes the prior") {
  const auto g = GameBuilder()
                     .AddContent("a")
                     .AddContent("b")
                     .AddContent("c")
                     .AddMessage("x")
                     .AddMessage("y")
                     .SetPrior({0.5, 0.3, 0.2})
                     .SetMessageCost("x", 0.0)
                     .SetMessageCost("y", 0.1)
                     .Build();
  const auto s = Subgame(g, {0, 2}, {1});
  CHECK(s.num_contents() == 2);
  CHECK(s.prior()[0] == doctest::Approx(0.5 / 0.7));
  CHECK(s.num_messages() == 1);
}

TEST_CASE("prune by message") {
  const auto g = gen::Fig2(0.6, 0.0, 0.5, 1.0);
  CHECK(PruneByMessage(g, "he") == g);

  const auto extra = GameBuilder()
                         .AddContent("Fred")
                         .AddContent("Max")
                         .AddContent("Bob")
                         .AddMessage("he")
                         .AddMessage("the_man")
                         .SetPrior({0.5, 0.3, 0.2})
                         .SetMessageCost("he", 0.0)
                         .SetMessageCost("the_man", 0.5)
                         .SetPairCost("Bob", "he", 100.0)
                         .SetPairCost("Bob", "the_man", 100.0)
                         .Build();
  const auto pruned = PruneByMessage(extra, "he", 1.0);
  CHECK(pruned.num_contents() == 2);
  CHECK_FALSE(pruned.FindContent("Bob"));
  CHECK(pruned.num_messages() == 2);

  const auto split = GameBuilder()
                         .AddContent("a")
                         .AddContent("b")
                         .AddMessage("x")
                         .AddMessage("y")
                         .SetPrior({0.5, 0.5})
                         .SetPairCost("a", "x", 0.0)
                         .SetPairCost("b", "y", 0.0)
                         .Build();
  const auto component = PruneByMessage(split, "y");
  CHECK(component.num_contents() == 1);
  CHECK(component.content(0).id == "b");
  CHECK(component.prior()[0] == doctest::Approx(1.0));

  CHECK_THROWS_AS(PruneByMessage(g, "she"), std::invalid_argument);
  const auto zero = GameBuilder()
                        .AddContent("a")
                        .AddContent("b")
                        .AddMessage("x")
                        .AddMessage("y")
                        .SetPrior({1.0, 0.0})
                        .SetPairCost("a", "x", 0.0)
                        .SetPairCost("b", "y", 0.0)
                        .Build();
  CHECK_THROWS_AS(PruneByMessage(zero, "y"), std::invalid_argument);
}
