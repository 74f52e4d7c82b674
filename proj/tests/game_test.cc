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

#include <cmath>

#include "doctest.h"
#include "generators.h"
#include "meaning/equilibrium.h"
#include "meaning/game.h"
#include "oracle.h"

using namespace meaning;

namespace {

Profile Deterministic(const MeaningGame& g, std::vector<int> s,
                      std::vector<int> r) {
  return ToProfile(g, PureProfile{std::move(s), std::move(r)});
}

bool HasViolationMentioning(const ValidationReport& r, const std::string& s) {
  for (const auto& v : r.violations) {
    if (v.find(s) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("fig2 game validates cleanly") {
  const auto g = gen::Fig2(0.6, 0.0, 0.5, 1.0);
  const auto report = ValidateGame(g);
  CHECK(report.ok());
  CHECK(report.warnings.empty());
  CHECK(g.num_edges() == 4);
}

TEST_CASE("prior summing to 0.9 is reported") {
  const auto g = GameBuilder()
                     .AddContent("Fred")
                     .AddContent("Max")
                     .AddMessage("he")
                     .SetPrior({0.5, 0.4})
                     .SetMessageCost("he", 0.0)
                     .Build();
  const auto report = ValidateGame(g);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].find("prior") != std::string::npos);
}

TEST_CASE("content without edges is reported by name") {
  const auto g = GameBuilder()
                     .AddContent("Fred")
                     .AddContent("Max")
                     .AddMessage("he")
                     .SetPrior({0.5, 0.5})
                     .SetMessageCost("he", 0.0)
                     .Exclude("Max", "he")
                     .Build();
  const auto report = ValidateGame(g);
  REQUIRE(report.violations.size() == 1);
  CHECK(HasViolationMentioning(report, "Max"));
}

TEST_CASE("bonus not dominating the cost spread warns") {
  const auto g = gen::Fig2(0.6, 0.0, 2.0, 1.0);
  const auto report = ValidateGame(g);
  CHECK(report.ok());
  CHECK_FALSE(report.warnings.empty());
}

TEST_CASE("utility of single turns") {
  const auto g = gen::Fig2(0.6, 0.0, 0.5, 1.0);
  const size_t fred = g.ContentIndex("Fred");
  const size_t max = g.ContentIndex("Max");
  const size_t he = g.MessageIndex("he");
  const size_t man = g.MessageIndex("the_man");
  CHECK(Utility(g, {fred, he, fred}, Player::kSender) == doctest::Approx(1.0));
  CHECK(Utility(g, {fred, man, fred}, Player::kReceiver) ==
        doctest::Approx(0.5));
  CHECK(Utility(g, {fred, he, max}, Player::kSender) <= 0.0);
  CHECK(Utility(g, {max, man, fred}, Player::kReceiver) <= 0.0);
  CHECK_THROWS_AS(Utility(g, {5, he, fred}, Player::kSender),
                  std::invalid_argument);
}

TEST_CASE("zero costs give exactly the bonus on a match") {
  const auto g = gen::Fig2(0.5, 0.0, 0.0, 1.75);
  CHECK(Utility(g, {1, 1, 1}, Player::kSender) == 1.75);
}

TEST_CASE("utility is positive only on matching turns") {
  gen::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = gen::RandomGame(rng, {.player_specific = true});
    for (size_t cs = 0; cs < g.num_contents(); ++cs) {
      for (size_t m : g.MessagesFor(cs)) {
        for (size_t cr : g.ContentsFor(m)) {
          for (Player p : {Player::kSender, Player::kReceiver}) {
            const double u = Utility(g, {cs, m, cr}, p);
            CHECK(u == doctest::Approx(oracle::U(g, p, cs, m, cr)));
            if (cs != cr) CHECK(u <= 0.0);
          }
        }
      }
    }
  }
}

TEST_CASE("expected utility of the two fig3 profiles") {
  const double p1 = 0.6, u1 = 1.0, u2 = 0.5;
  // Utilities U1, U2 encoded as negative costs, bonus set aside.
  const auto g = gen::Fig2(p1, -u1, -u2, 0.0);
  const auto left = Deterministic(g, {0, 1}, {0, 1});
  const auto right = Deterministic(g, {1, 0}, {1, 0});
  CHECK(ExpectedUtility(g, left.sender, left.receiver, Player::kSender) ==
        doctest::Approx(p1 * u1 + (1 - p1) * u2));
  CHECK(ExpectedUtility(g, left.sender, left.receiver, Player::kSender) ==
        doctest::Approx(0.8));
  CHECK(ExpectedUtility(g, right.sender, right.receiver, Player::kReceiver) ==
        doctest::Approx(0.7));
  CHECK(SuccessProbability(g, left.sender, left.receiver) == 1.0);
  CHECK(SuccessProbability(g, right.sender, right.receiver) == 1.0);
}

TEST_CASE("matched play with zero costs yields the bonus") {
  const auto g = gen::Fig2(0.3, 0.0, 0.0, 1.0);
  const auto p = Deterministic(g, {0, 1}, {0, 1});
  CHECK(ExpectedUtility(g, p.sender, p.receiver, Player::kSender) ==
        doctest::Approx(1.0));
}

TEST_CASE("uniform receiver succeeds half the time") {
  const auto g = gen::Fig2(0.8, 0.0, 0.5, 1.0);
  auto p = Deterministic(g, {0, 0}, {0, 0});
  for (size_t m = 0; m < 2; ++m) {
    p.receiver.rows(m, 0) = 0.5;
    p.receiver.rows(m, 1) = 0.5;
  }
  CHECK(SuccessProbability(g, p.sender, p.receiver) == doctest::Approx(0.5));
}

TEST_CASE("single content single message") {
  const auto g = GameBuilder()
                     .AddContent("x")
                     .AddMessage("y")
                     .SetMessageCost("y", 0.2)
                     .Build();
  const auto p = Deterministic(g, {0}, {0});
  CHECK(SuccessProbability(g, p.sender, p.receiver) == 1.0);
}

TEST_CASE("dimension mismatch throws") {
  const auto g = gen::Fig2(0.6, 0.0, 0.5, 1.0);
  SenderStrategy s{Matrix(3, 2)};
  ReceiverStrategy r{Matrix(2, 2)};
  CHECK_THROWS_AS(ExpectedUtility(g, s, r, Player::kSender),
                  std::invalid_argument);
}

TEST_CASE("expected utility is affine in each strategy row") {
  gen::Rng rng(5);
  auto random_row = [&](Matrix& mat, size_t r, const std::vector<size_t>& on) {
    double total = 0.0;
    for (size_t j = 0; j < mat.cols(); ++j) mat(r, j) = 0.0;
    for (size_t j : on) total += (mat(r, j) = gen::Uniform(rng, 0.1, 1.0));
    for (size_t j : on) mat(r, j) /= total;
  };
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = gen::RandomGame(rng, {.player_specific = true});
    const size_t n = g.num_contents(), k = g.num_messages();
    SenderStrategy s{Matrix(n, k)};
    ReceiverStrategy r{Matrix(k, n)};
    for (size_t c = 0; c < n; ++c) random_row(s.rows, c, g.MessagesFor(c));
    for (size_t m = 0; m < k; ++m) random_row(r.rows, m, g.ContentsFor(m));
    const bool sender_row = trial % 2 == 0;
    const size_t row = sender_row ? rng() % n : rng() % k;
    if (!sender_row && g.ContentsFor(row).empty()) continue;
    Matrix& mat = sender_row ? s.rows : r.rows;
    const auto& on = sender_row ? g.MessagesFor(row) : g.ContentsFor(row);
    random_row(mat, row, on);
    const std::vector<double> a(mat.row(row).begin(), mat.row(row).end());
    random_row(mat, row, on);
    const std::vector<double> b(mat.row(row).begin(), mat.row(row).end());
    auto at = [&](double t, Player p) {
      for (size_t j = 0; j < mat.cols(); ++j) {
        mat(row, j) = (1 - t) * a[j] + t * b[j];
      }
      return ExpectedUtility(g, s, r, p);
    };
    for (Player p : {Player::kSender, Player::kReceiver}) {
      const double e0 = at(0.0, p), e1 = at(1.0, p), et = at(0.3, p);
      CHECK(et == doctest::Approx(0.7 * e0 + 0.3 * e1).epsilon(1e-12));
    }
  }
}

TEST_CASE("success probability is one exactly for routed matches") {
  gen::Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = gen::RandomGame(rng);
    oracle::ForEachPure(g, [&](const oracle::Pure& pure) {
      const auto p = ToProfile(g, {pure.sender, pure.receiver});
      const double sp = SuccessProbability(g, p.sender, p.receiver);
      CHECK(sp >= 0.0);
      CHECK(sp <= 1.0 + 1e-12);
      bool routed = true;
      for (size_t c = 0; c < g.num_contents(); ++c) {
        if (g.prior()[c] > 0 &&
            pure.receiver[pure.sender[c]] != static_cast<int>(c)) {
          routed = false;
        }
      }
      CHECK((std::abs(sp - 1.0) < 1e-12) == routed);
    });
  }
}

TEST_CASE("equalize utilities averages the two models") {
  const auto g = GameBuilder()
                     .AddContent("Fred")
                     .AddContent("Max")
                     .AddMessage("he")
                     .SetPrior({0.6, 0.4})
                     .SetPairCost("Fred", "he", 0.2, 0.0, Player::kSender)
                     .SetPairCost("Fred", "he", 0.4, 0.0, Player::kReceiver)
                     .SetPairCost("Max", "he", 0.1, 0.3, Player::kSender)
                     .SetPairCost("Max", "he", 0.1, 0.1, Player::kReceiver)
                     .Build();
  CHECK_FALSE(g.utility().shared);
  const auto e = EqualizeUtilities(g);
  CHECK(e.utility().shared);
  for (Player p : {Player::kSender, Player::kReceiver}) {
    const auto& u = e.utility().For(p);
    CHECK(*u.sender_cost.Get(0, 0) == doctest::Approx(0.3));
    CHECK(*u.receiver_cost.Get(0, 1) == doctest::Approx(0.2));
  }
  CHECK(e.utility().For(Player::kSender) == e.utility().For(Player::kReceiver));
  CHECK(EqualizeUtilities(e) == e);
}

TEST_CASE("equalize leaves a shared game unchanged") {
  const auto g = gen::Fig2(0.6, 0.0, 0.5, 1.0);
  const auto e = EqualizeUtilities(g);
  for (size_t cs = 0; cs < 2; ++cs) {
    for (size_t m = 0; m < 2; ++m) {
      for (size_t cr = 0; cr < 2; ++cr) {
        for (Player p : {Player::kSender, Player::kReceiver}) {
          CHECK(Utility(e, {cs, m, cr}, p) == Utility(g, {cs, m, cr}, p));
        }
      }
    }
  }
}

TEST_CASE("cheap talk detection") {
  CHECK(IsCheapTalk(gen::Fig2(0.6, 0.0, 0.0, 1.0)));
  CHECK_FALSE(IsCheapTalk(gen::Fig2(0.6, 0.0, 0.5, 1.0)));
  const auto per_pair = GameBuilder()
                            .AddContent("a")
                            .AddContent("b")
                            .AddMessage("x")
                            .AddMessage("y")
                            .SetPairCost("a", "x", 0.3, 0.1)
                            .SetPairCost("a", "y", 0.3, 0.1)
                            .SetPairCost("b", "x", 0.2)
                            .SetPairCost("b", "y", 0.2)
                            .Build();
  CHECK(IsCheapTalk(per_pair));
}

TEST_CASE("fig3 identity on the complete 2x2 game") {
  gen::Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    double p1 = gen::Uniform(rng, 0.5, 1.0);
    double u1 = gen::Uniform(rng, -1.0, 1.0), u2 = gen::Uniform(rng, -1.0, 1.0);
    const auto g = gen::Fig2(p1, -u1, -u2, 0.0);
    const oracle::Pure left{{0, 1}, {0, 1}}, right{{1, 0}, {1, 0}};
    const auto l = ToProfile(g, {left.sender, left.receiver});
    const auto r = ToProfile(g, {right.sender, right.receiver});
    const double e1 = ExpectedUtility(g, l.sender, l.receiver, Player::kSender);
    const double e2 = ExpectedUtility(g, r.sender, r.receiver, Player::kSender);
    CHECK(std::abs((e1 - e2) - (2 * p1 - 1) * (u1 - u2)) < 1e-9);
  }
}

TEST_CASE("without success bonus zeroes the bonus only") {
  const auto g = gen::Fig2(0.6, 0.1, 0.5, 1.0);
  const auto z = WithoutSuccessBonus(g);
  CHECK(Utility(z, {0, 0, 0}, Player::kSender) == doctest::Approx(-0.1));
  CHECK(MaxCostSpread(g) == doctest::Approx(0.4));
}
