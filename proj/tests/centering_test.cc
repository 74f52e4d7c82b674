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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "discourse_gen.h"
#include "doctest.h"
#include "meaning/centering.h"
#include "meaning/scenario_io.h"

using namespace meaning;
using gen::InSlot;
using gen::MakeUtterance;
using gen::Named;
using GF = GrammaticalFunction;

namespace {

std::string Data(const std::string& name) {
  return std::string(MEANING_DATA_DIR) + "/" + name;
}

const Utterance kU1 = MakeUtterance(
    {Named("Fred", GF::kSubject), Named("Max", GF::kDirectObject)},
    "Fred scolded Max.");

Utterance U2(const std::string& subj, FormTag subj_form, const std::string& obj,
             FormTag obj_form) {
  return MakeUtterance({Named(subj, GF::kSubject, subj_form),
                        Named(obj, GF::kOtherComplement, obj_form)});
}

Lexicon HeManLexicon() {
  Features male{{"gender", "male"}};
  Lexicon lex;
  lex.entities = {{"Fred", "", male}, {"Max", "", male},
                  {"Ann", "", {{"gender", "female"}}}};
  lex.expressions = {{"he", "", FormTag::kPronoun, male},
                     {"the man", "", FormTag::kDefiniteNp, male},
                     {"Ann", "", FormTag::kProperName, {}}};
  return lex;
}

}  // namespace

TEST_CASE("forward-looking centers") {
  CHECK(Cf(kU1) == std::vector<std::string>{"Fred", "Max"});
  CHECK(Cf(MakeUtterance({Named("Max", GF::kAdjunct)})) ==
        std::vector<std::string>{"Max"});
  const auto u = MakeUtterance({Named("A", GF::kSubject),
                                Named("C", GF::kAdjunct),
                                Named("B", GF::kDirectObject)});
  CHECK(Cf(u) == std::vector<std::string>{"A", "B", "C"});
  CHECK(Cf(MakeUtterance({})).empty());
  const auto dup = MakeUtterance({Named("A", GF::kAdjunct),
                                  Named("B", GF::kDirectObject),
                                  Named("A", GF::kSubject)});
  CHECK(Cf(dup) == std::vector<std::string>{"A", "B"});
  const auto tie = MakeUtterance(
      {Named("B", GF::kAdjunct), Named("A", GF::kAdjunct)});
  CHECK(Cf(tie) == std::vector<std::string>{"B", "A"});
}

TEST_CASE("preferred center") {
  CHECK(*Cp(kU1) == "Fred");
  CHECK(*Cp(MakeUtterance({Named("Max", GF::kAdjunct)})) == "Max");
  const auto inverted = MakeUtterance(
      {Named("Max", GF::kDirectObject), Named("Fred", GF::kSubject)});
  CHECK(*Cp(inverted) == "Fred");
  CHECK_FALSE(Cp(MakeUtterance({})).has_value());
}

TEST_CASE("backward-looking center") {
  CHECK(*Cb(kU1, U2("Fred", FormTag::kPronoun, "Max", FormTag::kDefiniteNp)) ==
        "Fred");
  CHECK_FALSE(Cb(kU1, MakeUtterance({Named("Ann", GF::kSubject)})));
  CHECK(*Cb(kU1, MakeUtterance({Named("Max", GF::kSubject)})) == "Max");
  const std::vector<Utterance> history = {kU1, kU1};
  CHECK_FALSE(Cb(history, 0));
  CHECK(*Cb(history, 1) == "Fred");
}

TEST_CASE("rule 1") {
  const std::vector<Utterance> good = {
      kU1, U2("Fred", FormTag::kPronoun, "Max", FormTag::kDefiniteNp)};
  CHECK(RuleOneCheck(good).empty());

  const std::vector<Utterance> bad = {
      kU1, U2("Max", FormTag::kPronoun, "Fred", FormTag::kDefiniteNp)};
  const auto v = RuleOneCheck(bad);
  REQUIRE(v.size() == 1);
  CHECK(v[0].utterance == 1);
  CHECK(v[0].cb == "Fred");
  CHECK(v[0].pronominalized == std::vector<std::string>{"Max"});

  const std::vector<Utterance> none = {
      kU1, U2("Max", FormTag::kProperName, "Fred", FormTag::kDefiniteNp)};
  CHECK(RuleOneCheck(none).empty());

  std::vector<Utterance> open = good;
  open[1].realizations[0].entity.clear();
  CHECK_THROWS_AS(RuleOneCheck(open), std::invalid_argument);
}

TEST_CASE("salience priors") {
  DiscourseState s({"Fred", "Max"});
  s = s.Ingest(kU1);
  const std::vector<std::string> both = {"Fred", "Max"};
  auto p = SaliencePriors(s, both);
  CHECK(p[0] > p[1]);
  CHECK(p[0] + p[1] == doctest::Approx(1.0));

  const std::vector<std::string> one = {"Max"};
  CHECK(SaliencePriors(s, one) == std::vector<double>{1.0});

  DiscourseState t({"a", "b", "c"});
  t = t.WithSalience("a", 2.0);
  const std::vector<std::string> abc = {"a", "b", "c"};
  p = SaliencePriors(t, abc);
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.25));
  CHECK(p[2] == doctest::Approx(0.25));

  const std::vector<std::string> empty;
  CHECK_THROWS_AS(SaliencePriors(t, empty), std::invalid_argument);
}

TEST_CASE("salience priors are scale invariant") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  const std::vector<std::string> ids = {"a", "b", "c", "d"};
  for (int trial = 0; trial < 100; ++trial) {
    DiscourseState s(ids), scaled(ids);
    const double lambda = u(rng);
    for (const auto& e : ids) {
      const double v = u(rng);
      s = s.WithSalience(e, v);
      scaled = scaled.WithSalience(e, lambda * v);
    }
    const auto p = SaliencePriors(s, ids);
    const auto q = SaliencePriors(scaled, ids);
    for (size_t i = 0; i < ids.size(); ++i) {
      CHECK(std::abs(p[i] - q[i]) < 1e-12);
    }
  }
}

TEST_CASE("cf is unchanged by permuting realizations without ties") {
  std::mt19937_64 rng(2);
  std::vector<Realization> rs = {
      Named("a", GF::kSubject), Named("b", GF::kDirectObject),
      Named("c", GF::kIndirectObject), Named("d", GF::kAdjunct)};
  const auto expected = Cf(MakeUtterance(rs));
  for (int i = 0; i < 20; ++i) {
    std::shuffle(rs.begin(), rs.end(), rng);
    CHECK(Cf(MakeUtterance(rs)) == expected);
  }
}

TEST_CASE("accommodation") {
  DiscourseState s({"Fred", "Max"});
  s = s.Ingest(kU1);
  const AccommodationParams beta;
  const auto a = Accommodate(s, "Fred", FormTag::kPronoun, beta);
  CHECK(a.Salience("Fred") == doctest::Approx(1.5 * s.Salience("Fred")));
  CHECK(a.Salience("Max") == s.Salience("Max"));

  const AccommodationParams unit{1.0, 1.0, 1.0};
  const auto same = Accommodate(s, "Fred", FormTag::kPronoun, unit);
  CHECK(same.salience() == s.salience());

  const AccommodationParams strong{4.0, 1.0, 1.0};
  const auto flipped = Accommodate(s, "Max", FormTag::kPronoun, strong);
  const std::vector<std::string> both = {"Fred", "Max"};
  const auto p = SaliencePriors(flipped, both);
  CHECK(p[1] > p[0]);

  CHECK_FALSE(AccommodationParams{1.0, 1.2, 1.0}.Validate().empty());
  CHECK_FALSE(AccommodationParams{1.5, 1.1, 0.5}.Validate().empty());

  auto repeated = s;
  for (int i = 0; i < 200; ++i) {
    repeated = Accommodate(repeated, i % 2 ? "Fred" : "Max",
                           FormTag::kPronoun, beta);
  }
  const auto q = SaliencePriors(repeated, both);
  CHECK(q[0] > 0.0);
  CHECK(q[1] > 0.0);
  CHECK(std::isfinite(q[0]));
  CHECK(std::abs(q[0] + q[1] - 1.0) < 1e-12);
}

TEST_CASE("noun phrase game for the subject of u2") {
  const auto lex = HeManLexicon();
  DiscourseState s({"Fred", "Max", "Ann"});
  s = s.Ingest(kU1);
  const NpSlot slot{"subj", {"Fred", "Max"}, {"he", "the man"}, {}};
  const auto g = BuildNpGame(s, slot, lex, {});
  CHECK(g.num_edges() == 4);
  CHECK(g.prior()[0] > g.prior()[1]);
  const auto& u = g.utility().For(Player::kSender);
  CHECK(*u.sender_cost.Get(0, 0) < *u.sender_cost.Get(0, 1));
  CHECK(ValidateGame(g).ok());
  const auto pred = Predict(g);
  REQUIRE(pred.equilibria.size() == 1);
  CHECK(pred.equilibria[0].pure.receiver == std::vector<int>{0, 1});
}

TEST_CASE("noun phrase game excludes incompatible pairs") {
  const auto lex = HeManLexicon();
  DiscourseState s({"Fred", "Max", "Ann"});
  s = s.Ingest(kU1);
  const NpSlot slot{"subj", {"Fred", "Max", "Ann"}, {"he", "Ann"}, {}};
  const auto g = BuildNpGame(s, slot, lex, {});
  CHECK(g.num_contents() == 3);
  CHECK_FALSE(g.HasEdge(2, 0));
  double total = 0.0;
  for (double p : g.prior()) total += p;
  CHECK(total == doctest::Approx(1.0));

  const NpSlot hopeless{"subj", {"Ann"}, {"he"}, {}};
  CHECK_THROWS_AS(BuildNpGame(s, hopeless, lex, {}), std::invalid_argument);
}

TEST_CASE("prior override replaces salience") {
  const auto lex = HeManLexicon();
  DiscourseState s({"Fred", "Max", "Ann"});
  const NpSlot slot{"subj", {"Fred", "Max"}, {"he"}, {{"Fred", 1}, {"Max", 3}}};
  const auto g = BuildNpGame(s, slot, lex, {});
  CHECK(g.prior()[1] == doctest::Approx(0.75));
}

TEST_CASE("resolve the he and the man discourse") {
  const auto file = LoadDiscourse(Data("he_man.disc"));
  const auto r = Resolve(file.discourse);
  CHECK_FALSE(r.ambiguous());
  REQUIRE(r.slots.size() == 2);
  CHECK(*r.slots[0].entity == "Fred");
  CHECK(*r.slots[1].entity == "Max");
  REQUIRE(r.rule1);
  CHECK(r.rule1->empty());
  CHECK(*Cb(r.resolved, 1) == "Fred");
}

TEST_CASE("single candidate slot resolves regardless of form") {
  std::mt19937_64 rng(1);
  auto d = gen::StrictDiscourse(rng);
  d.utterances[1].slots.begin()->second.candidates = {"e1"};
  const auto r = Resolve(d);
  CHECK(*r.slots[0].entity == "e1");
}

TEST_CASE("symmetric salience and costs are ambiguous") {
  Discourse d;
  d.lexicon.entities = {{"a", "", {}}, {"b", "", {}}};
  d.lexicon.expressions = {{"x", "", FormTag::kDefiniteNp, {}},
                           {"y", "", FormTag::kDefiniteNp, {}}};
  DiscourseUtterance u;
  u.slots["s"] = NpSlot{"s", {"a", "b"}, {"x", "y"}, {}};
  u.utterance = MakeUtterance({InSlot("s", "x", GF::kSubject)});
  d.utterances = {u};
  const auto r = Resolve(d);
  CHECK(r.ambiguous());
  CHECK_FALSE(r.rule1);
  CHECK(r.slots[0].alternatives.size() == 2);
}

TEST_CASE("resolved strict discourses satisfy rule 1") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = gen::StrictDiscourse(rng);
    const auto r = Resolve(d);
    REQUIRE(r.rule1);
    CHECK(r.rule1->empty());
  }
}

TEST_CASE("man and him with and without parallelism") {
  const auto file = LoadDiscourse(Data("man_him.disc"));
  auto r = Resolve(file.discourse);
  CHECK_FALSE(r.ambiguous());
  REQUIRE(r.slots.size() == 2);
  CHECK(*r.slots[0].entity == "Fred");
  CHECK(*r.slots[1].entity == "Max");
  REQUIRE(r.rule1);
  CHECK(r.rule1->size() == 1);
  REQUIRE(r.rule1_attribution.size() == 1);
  CHECK(r.rule1_attribution[0].find("parallelism") != std::string::npos);
  const auto& verdicts = r.compounds[0].prediction.solutions[0].verdicts;
  REQUIRE(verdicts.size() == 3);
  CHECK(verdicts[0].optimal);
  CHECK_FALSE(verdicts[1].optimal);
  CHECK_FALSE(verdicts[2].optimal);

  auto d = file.discourse;
  d.config.parallelism_bonus = 0.0;
  r = Resolve(d);
  CHECK_FALSE(r.ambiguous());
  CHECK(*r.slots[0].entity == "Max");
  CHECK(*r.slots[1].entity == "Fred");
  CHECK(r.rule1->empty());
}

TEST_CASE("sentence game marks parallel propositions") {
  const auto file = LoadDiscourse(Data("man_him.disc"));
  const auto& d = file.discourse;
  DiscourseState s = InitialState(d).state;
  const auto sg = BuildSentenceGame(s, d.utterances[1], d.lexicon, d.config);
  REQUIRE(sg.parallel.size() == 2);
  CHECK(sg.parallel[0] != sg.parallel[1]);
  const auto cg = BuildCompoundGame(s, d.utterances[1], d.lexicon, d.config);
  CHECK(cg.constituents.size() == 3);
  const auto flat = Flatten(cg);
  CHECK(flat.num_contents() == 2);
  CHECK(ValidateGame(flat).ok());
}
