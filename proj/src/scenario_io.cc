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

#include "meaning/scenario_io.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace meaning {

ParseError::ParseError(std::string source, std::string where,
                       const std::string& what)
    : std::runtime_error(source + (where.empty() ? "" : ": " + where) + ": " +
                         what),
      source_(std::move(source)),
      where_(std::move(where)) {}

namespace {

// Field access with JSON-pointer diagnostics.
class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void Fail(const std::string& at, const std::string& what) const {
    throw ParseError(source_, at.empty() ? "/" : at, what);
  }

  const Json& Object(const Json& j, const std::string& at) const {
    if (!j.is_object()) Fail(at, "expected an object");
    return j;
  }
  const Json& Array(const Json& j, const std::string& at) const {
    if (!j.is_array()) Fail(at, "expected an array");
    return j;
  }
  std::string String(const Json& j, const std::string& at) const {
    if (!j.is_string()) Fail(at, "expected a string");
    return j.get<std::string>();
  }
  double Number(const Json& j, const std::string& at) const {
    if (!j.is_number()) Fail(at, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) Fail(at, "expected a finite number");
    return v;
  }
  bool Bool(const Json& j, const std::string& at) const {
    if (!j.is_boolean()) Fail(at, "expected true or false");
    return j.get<bool>();
  }
  uint64_t Count(const Json& j, const std::string& at) const {
    if (!j.is_number_unsigned()) Fail(at, "expected a nonnegative integer");
    return j.get<uint64_t>();
  }

  const Json* Find(const Json& obj, const char* key) const {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
  }
  const Json& Require(const Json& obj, const char* key,
                      const std::string& at) const {
    const Json* v = Find(obj, key);
    if (!v) Fail(at, std::string("missing field '") + key + "'");
    return *v;
  }
  double NumberOr(const Json& obj, const char* key, const std::string& at,
                  double fallback) const {
    const Json* v = Find(obj, key);
    return v ? Number(*v, at + "/" + key) : fallback;
  }

  void WarnUnknown(const Json& obj, const std::string& at,
                   std::initializer_list<const char*> known,
                   std::vector<std::string>& warnings) const {
    for (const auto& [key, value] : obj.items()) {
      bool ok = std::any_of(known.begin(), known.end(),
                            [&](const char* k) { return key == k; });
      if (!ok) {
        warnings.push_back(source_ + ": " + (at.empty() ? "" : at) + "/" + key +
                           ": unknown field ignored");
      }
    }
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

Json ParseJson(std::string_view text, const std::string& source) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw ParseError(source, "line 1, column 1", "empty input");
  }
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    size_t line = 1, column = 1;
    const size_t limit = std::min<size_t>(e.byte ? e.byte - 1 : 0, text.size());
    for (size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string what = e.what();
    if (auto pos = what.find("parse error"); pos != std::string::npos) {
      what = what.substr(pos);
    }
    throw ParseError(source,
                     "line " + std::to_string(line) + ", column " +
                         std::to_string(column),
                     what);
  }
}

std::string Pointer(const std::string& base, size_t i) {
  return base + "/" + std::to_string(i);
}

double Round12(double x) {
  if (x == 0.0 || !std::isfinite(x)) return x == 0.0 ? 0.0 : x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::stod(buf);
}

std::string Format(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace

std::optional<OffPathRule> ParseOffPathRule(std::string_view name) {
  if (name == "prior" || name == "prior_restricted") {
    return OffPathRule::kPriorRestricted;
  }
  if (name == "uniform" || name == "uniform_restricted") {
    return OffPathRule::kUniformRestricted;
  }
  return std::nullopt;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, "", "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Games

GameFile ParseGame(std::string_view text, const std::string& source) {
  const Reader r(source);
  const Json j = ParseJson(text, source);
  r.Object(j, "");
  GameFile out;
  r.WarnUnknown(j, "",
                {"contents", "messages", "prior", "success_bonus", "costs",
                 "exclude", "partial_credit", "shared", "off_path", "cap",
                 "description"},
                out.warnings);

  std::vector<Content> contents;
  std::vector<Message> messages;
  std::map<std::string, size_t> cindex, mindex;
  std::vector<std::optional<double>> message_cost;

  const Json& jc = r.Array(r.Require(j, "contents", ""), "/contents");
  if (jc.empty()) r.Fail("/contents", "at least one content is required");
  for (size_t i = 0; i < jc.size(); ++i) {
    const std::string at = Pointer("/contents", i);
    Content c;
    if (jc[i].is_string()) {
      c.id = jc[i].get<std::string>();
    } else {
      r.Object(jc[i], at);
      c.id = r.String(r.Require(jc[i], "id", at), at + "/id");
      if (const Json* l = r.Find(jc[i], "label")) c.label = r.String(*l, at + "/label");
    }
    if (c.id.empty()) r.Fail(at, "empty content id");
    if (c.label.empty()) c.label = c.id;
    if (!cindex.emplace(c.id, i).second) {
      r.Fail(at, "duplicate content id '" + c.id + "'");
    }
    contents.push_back(std::move(c));
  }

  const Json& jm = r.Array(r.Require(j, "messages", ""), "/messages");
  if (jm.empty()) r.Fail("/messages", "at least one message is required");
  for (size_t i = 0; i < jm.size(); ++i) {
    const std::string at = Pointer("/messages", i);
    Message m;
    std::optional<double> cost;
    if (jm[i].is_string()) {
      m.id = jm[i].get<std::string>();
    } else {
      r.Object(jm[i], at);
      m.id = r.String(r.Require(jm[i], "id", at), at + "/id");
      if (const Json* l = r.Find(jm[i], "label")) m.label = r.String(*l, at + "/label");
      if (const Json* c = r.Find(jm[i], "cost")) cost = r.Number(*c, at + "/cost");
    }
    if (m.id.empty()) r.Fail(at, "empty message id");
    if (m.label.empty()) m.label = m.id;
    if (!mindex.emplace(m.id, i).second) {
      r.Fail(at, "duplicate message id '" + m.id + "'");
    }
    messages.push_back(std::move(m));
    message_cost.push_back(cost);
  }
  const size_t n = contents.size();
  const size_t k = messages.size();
  auto content_at = [&](const Json& v, const std::string& at) {
    const std::string id = r.String(v, at);
    auto it = cindex.find(id);
    if (it == cindex.end()) r.Fail(at, "unknown content '" + id + "'");
    return it->second;
  };
  auto message_at = [&](const Json& v, const std::string& at) {
    const std::string id = r.String(v, at);
    auto it = mindex.find(id);
    if (it == mindex.end()) r.Fail(at, "unknown message '" + id + "'");
    return it->second;
  };
  auto players_at = [&](const Json& obj, const std::string& at) {
    std::vector<size_t> ps = {0, 1};
    if (const Json* p = r.Find(obj, "player")) {
      const std::string name = r.String(*p, at + "/player");
      if (name == "sender" || name == "S") {
        ps = {0};
      } else if (name == "receiver" || name == "R") {
        ps = {1};
      } else {
        r.Fail(at + "/player", "expected 'sender' or 'receiver'");
      }
    }
    return ps;
  };

  std::vector<double> prior(n, 1.0 / static_cast<double>(n));
  if (const Json* jp = r.Find(j, "prior")) {
    if (jp->is_array()) {
      if (jp->size() != n) {
        r.Fail("/prior", "expected " + std::to_string(n) + " weights, got " +
                             std::to_string(jp->size()));
      }
      for (size_t i = 0; i < n; ++i) prior[i] = r.Number((*jp)[i], Pointer("/prior", i));
    } else {
      r.Object(*jp, "/prior");
      std::fill(prior.begin(), prior.end(), 0.0);
      for (const auto& [id, w] : jp->items()) {
        auto it = cindex.find(id);
        if (it == cindex.end()) r.Fail("/prior/" + id, "unknown content '" + id + "'");
        prior[it->second] = r.Number(w, "/prior/" + id);
      }
    }
    double total = 0.0;
    bool negative = false;
    for (double p : prior) {
      total += p;
      negative = negative || p < 0.0;
    }
    if (!negative && total > 0.0 && std::abs(total - 1.0) > kTolerance) {
      for (double& p : prior) p /= total;
      out.warnings.push_back(source + ": /prior: weights sum to " +
                             Format(total) + "; normalized");
    }
  }

  UtilityModel model;
  for (PlayerUtility& u : model.players) {
    u.sender_cost = PairTable(n, k);
    u.receiver_cost = PairTable(k, n);
  }
  if (const Json* jb = r.Find(j, "success_bonus")) {
    if (jb->is_object()) {
      model.players[0].success_bonus =
          r.NumberOr(*jb, "sender", "/success_bonus", 1.0);
      model.players[1].success_bonus =
          r.NumberOr(*jb, "receiver", "/success_bonus", 1.0);
    } else {
      const double b = r.Number(*jb, "/success_bonus");
      model.players[0].success_bonus = model.players[1].success_bonus = b;
    }
  }
  for (size_t m = 0; m < k; ++m) {
    if (!message_cost[m]) continue;
    for (PlayerUtility& u : model.players) {
      for (size_t c = 0; c < n; ++c) {
        u.sender_cost.Set(c, m, *message_cost[m]);
        u.receiver_cost.Set(m, c, 0.0);
      }
    }
  }
  if (const Json* jcost = r.Find(j, "costs")) {
    r.Array(*jcost, "/costs");
    for (size_t i = 0; i < jcost->size(); ++i) {
      const std::string at = Pointer("/costs", i);
      const Json& e = r.Object((*jcost)[i], at);
      const size_t c = content_at(r.Require(e, "content", at), at + "/content");
      const size_t m = message_at(r.Require(e, "message", at), at + "/message");
      auto side = [&](const char* key, const char* alias) -> std::optional<double> {
        const Json* v = r.Find(e, key);
        if (!v && alias) v = r.Find(e, alias);
        if (!v) return 0.0;
        if (v->is_null()) return std::nullopt;
        return r.Number(*v, at + "/" + key);
      };
      const auto sc = side("sender_side", "cost");
      const auto rc = side("receiver_side", nullptr);
      for (size_t p : players_at(e, at)) {
        PlayerUtility& u = model.players[p];
        if (sc) u.sender_cost.Set(c, m, *sc); else u.sender_cost.Erase(c, m);
        if (rc) u.receiver_cost.Set(m, c, *rc); else u.receiver_cost.Erase(m, c);
      }
    }
  }
  if (const Json* jx = r.Find(j, "exclude")) {
    r.Array(*jx, "/exclude");
    for (size_t i = 0; i < jx->size(); ++i) {
      const std::string at = Pointer("/exclude", i);
      const Json& e = r.Object((*jx)[i], at);
      const size_t c = content_at(r.Require(e, "content", at), at + "/content");
      const size_t m = message_at(r.Require(e, "message", at), at + "/message");
      for (PlayerUtility& u : model.players) {
        u.sender_cost.Erase(c, m);
        u.receiver_cost.Erase(m, c);
      }
    }
  }
  if (const Json* jpc = r.Find(j, "partial_credit")) {
    r.Array(*jpc, "/partial_credit");
    for (size_t i = 0; i < jpc->size(); ++i) {
      const std::string at = Pointer("/partial_credit", i);
      const Json& e = r.Object((*jpc)[i], at);
      const size_t a = content_at(r.Require(e, "intended", at), at + "/intended");
      const size_t b =
          content_at(r.Require(e, "interpreted", at), at + "/interpreted");
      const double v = r.Number(r.Require(e, "value", at), at + "/value");
      for (size_t p : players_at(e, at)) {
        Matrix& pc = model.players[p].partial_credit;
        if (pc.empty()) pc = Matrix(n, n);
        pc(a, b) = v;
      }
    }
  }
  model.shared = model.players[0] == model.players[1];
  if (const Json* js = r.Find(j, "shared")) {
    const bool shared = r.Bool(*js, "/shared");
    if (shared && !model.shared) {
      r.Fail("/shared", "players' utility tables differ");
    }
    model.shared = shared;
  }

  if (const Json* jo = r.Find(j, "off_path")) {
    out.off_path = ParseOffPathRule(r.String(*jo, "/off_path"));
    if (!out.off_path) r.Fail("/off_path", "expected 'prior' or 'uniform'");
  }
  if (const Json* jcap = r.Find(j, "cap")) out.cap = r.Count(*jcap, "/cap");

  out.game = MeaningGame(std::move(contents), std::move(messages),
                         std::move(prior), std::move(model));
  const ValidationReport report = ValidateGame(out.game);
  if (!report.ok()) {
    std::string all;
    for (const auto& v : report.violations) {
      if (!all.empty()) all += "; ";
      all += v;
    }
    throw ParseError(source, "validation", all);
  }
  for (const auto& w : report.warnings) out.warnings.push_back(source + ": " + w);
  return out;
}

GameFile LoadGame(const std::string& path) {
  return ParseGame(ReadFile(path), path);
}

Json GameToJson(const MeaningGame& game) {
  Json j;
  j["contents"] = Json::array();
  for (const auto& c : game.contents()) {
    j["contents"].push_back({{"id", c.id}, {"label", c.label}});
  }
  j["messages"] = Json::array();
  for (const auto& m : game.messages()) {
    j["messages"].push_back({{"id", m.id}, {"label", m.label}});
  }
  j["prior"] = game.prior();
  const UtilityModel& u = game.utility();
  if (u.players[0].success_bonus == u.players[1].success_bonus) {
    j["success_bonus"] = u.players[0].success_bonus;
  } else {
    j["success_bonus"] = {{"sender", u.players[0].success_bonus},
                          {"receiver", u.players[1].success_bonus}};
  }
  j["shared"] = u.shared;
  j["costs"] = Json::array();
  auto side = [](std::optional<double> v) { return v ? Json(*v) : Json(nullptr); };
  for (size_t c = 0; c < game.num_contents(); ++c) {
    for (size_t m = 0; m < game.num_messages(); ++m) {
      Json entry[2];
      bool present = false;
      for (size_t p = 0; p < 2; ++p) {
        const auto sc = u.players[p].sender_cost.Get(c, m);
        const auto rc = u.players[p].receiver_cost.Get(m, c);
        present = present || sc || rc;
        entry[p] = {{"content", game.content(c).id},
                    {"message", game.message(m).id},
                    {"sender_side", side(sc)},
                    {"receiver_side", side(rc)}};
      }
      if (!present) continue;
      if (entry[0] == entry[1]) {
        j["costs"].push_back(entry[0]);
      } else {
        entry[0]["player"] = "sender";
        entry[1]["player"] = "receiver";
        j["costs"].push_back(entry[0]);
        j["costs"].push_back(entry[1]);
      }
    }
  }
  Json credit = Json::array();
  for (size_t p = 0; p < 2; ++p) {
    const Matrix& pc = u.players[p].partial_credit;
    if (pc.empty()) continue;
    for (size_t a = 0; a < pc.rows(); ++a) {
      for (size_t b = 0; b < pc.cols(); ++b) {
        if (pc(a, b) == 0.0) continue;
        credit.push_back({{"player", p == 0 ? "sender" : "receiver"},
                          {"intended", game.content(a).id},
                          {"interpreted", game.content(b).id},
                          {"value", pc(a, b)}});
      }
    }
  }
  if (!credit.empty()) j["partial_credit"] = std::move(credit);
  return j;
}

std::string SerializeGame(const MeaningGame& game) {
  return GameToJson(game).dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Discourses

namespace {

Features ParseFeatures(const Reader& r, const Json& obj, const std::string& at) {
  Features f;
  if (const Json* jf = r.Find(obj, "features")) {
    r.Object(*jf, at + "/features");
    for (const auto& [key, value] : jf->items()) {
      f[key] = r.String(value, at + "/features/" + key);
    }
  }
  return f;
}

std::vector<std::string> StringList(const Reader& r, const Json& v,
                                    const std::string& at) {
  std::vector<std::string> out;
  r.Array(v, at);
  for (size_t i = 0; i < v.size(); ++i) out.push_back(r.String(v[i], Pointer(at, i)));
  return out;
}

void ParseConfig(const Reader& r, const Json& j, ResolveConfig& config,
                 std::vector<std::string>& warnings) {
  r.Object(j, "/config");
  r.WarnUnknown(j, "/config",
                {"salience", "accommodation", "form_costs", "success_bonus",
                 "parallelism_bonus", "off_path", "cap"},
                warnings);
  if (const Json* s = r.Find(j, "salience")) {
    const std::string at = "/config/salience";
    r.Object(*s, at);
    config.salience.initial = r.NumberOr(*s, "initial", at, config.salience.initial);
    config.salience.rank_weight =
        r.NumberOr(*s, "rank_weight", at, config.salience.rank_weight);
    config.salience.cb_bonus = r.NumberOr(*s, "cb_bonus", at, config.salience.cb_bonus);
    if (!(config.salience.initial > 0.0)) r.Fail(at + "/initial", "must be positive");
    if (config.salience.rank_weight < 0.0) r.Fail(at + "/rank_weight", "must be nonnegative");
    if (config.salience.cb_bonus < 0.0) r.Fail(at + "/cb_bonus", "must be nonnegative");
  }
  if (const Json* a = r.Find(j, "accommodation")) {
    const std::string at = "/config/accommodation";
    r.Object(*a, at);
    auto& acc = config.accommodation;
    acc.pronoun = r.NumberOr(*a, "pronoun", at, acc.pronoun);
    acc.definite_np = r.NumberOr(*a, "definite_np", at, acc.definite_np);
    acc.proper_name = r.NumberOr(*a, "proper_name", at, acc.proper_name);
    if (auto p = acc.Validate(); !p.empty()) r.Fail(at, p.front());
  }
  if (const Json* f = r.Find(j, "form_costs")) {
    const std::string at = "/config/form_costs";
    r.Object(*f, at);
    auto& fc = config.form_costs;
    fc.pronoun = r.NumberOr(*f, "pronoun", at, fc.pronoun);
    fc.definite_np = r.NumberOr(*f, "definite_np", at, fc.definite_np);
    fc.proper_name = r.NumberOr(*f, "proper_name", at, fc.proper_name);
    if (auto p = fc.Validate(); !p.empty()) r.Fail(at, p.front());
  }
  config.success_bonus =
      r.NumberOr(j, "success_bonus", "/config", config.success_bonus);
  if (config.success_bonus < 0.0) r.Fail("/config/success_bonus", "must be nonnegative");
  config.parallelism_bonus =
      r.NumberOr(j, "parallelism_bonus", "/config", config.parallelism_bonus);
  if (config.parallelism_bonus < 0.0) {
    r.Fail("/config/parallelism_bonus", "must be nonnegative");
  }
  if (const Json* o = r.Find(j, "off_path")) {
    auto rule = ParseOffPathRule(r.String(*o, "/config/off_path"));
    if (!rule) r.Fail("/config/off_path", "expected 'prior' or 'uniform'");
    config.enumeration.rule = *rule;
  }
  if (const Json* c = r.Find(j, "cap")) config.enumeration.cap = r.Count(*c, "/config/cap");
}

CompoundSpec ParseCompound(const Reader& r, const Json& j, const std::string& at,
                           std::vector<std::string>& warnings) {
  r.Object(j, at);
  r.WarnUnknown(j, at,
                {"slot", "description", "propositions", "sentences", "observed",
                 "extra_costs", "weight", "np_weight", "neglect_threshold"},
                warnings);
  CompoundSpec spec;
  if (const Json* s = r.Find(j, "slot")) spec.slot = r.String(*s, at + "/slot");
  if (const Json* d = r.Find(j, "description")) {
    spec.description = r.String(*d, at + "/description");
  }
  spec.weight = r.NumberOr(j, "weight", at, 1.0);
  spec.np_weight = r.NumberOr(j, "np_weight", at, 1.0);
  if (!(spec.weight > 0.0)) r.Fail(at + "/weight", "must be positive");
  if (!(spec.np_weight > 0.0)) r.Fail(at + "/np_weight", "must be positive");
  if (const Json* t = r.Find(j, "neglect_threshold"); t && !t->is_null()) {
    spec.neglect_threshold = r.Number(*t, at + "/neglect_threshold");
  }
  auto role_map = [&](const Json& obj, const char* key, const std::string& where) {
    std::map<std::string, std::string> out;
    const Json& m = r.Object(r.Require(obj, key, where), where + "/" + key);
    for (const auto& [slot, value] : m.items()) {
      out[slot] = r.String(value, where + "/" + key + "/" + slot);
    }
    return out;
  };
  const Json& props = r.Array(r.Require(j, "propositions", at), at + "/propositions");
  for (size_t i = 0; i < props.size(); ++i) {
    const std::string pat = Pointer(at + "/propositions", i);
    r.Object(props[i], pat);
    Proposition p;
    p.id = r.String(r.Require(props[i], "id", pat), pat + "/id");
    if (const Json* l = r.Find(props[i], "label")) p.label = r.String(*l, pat + "/label");
    p.roles = role_map(props[i], "roles", pat);
    if (const Json* w = r.Find(props[i], "prior")) p.prior = r.Number(*w, pat + "/prior");
    spec.propositions.push_back(std::move(p));
  }
  const Json& sents = r.Array(r.Require(j, "sentences", at), at + "/sentences");
  for (size_t i = 0; i < sents.size(); ++i) {
    const std::string sat = Pointer(at + "/sentences", i);
    r.Object(sents[i], sat);
    SentenceForm s;
    s.id = r.String(r.Require(sents[i], "id", sat), sat + "/id");
    if (const Json* l = r.Find(sents[i], "label")) s.label = r.String(*l, sat + "/label");
    s.realizes = role_map(sents[i], "realizes", sat);
    spec.sentences.push_back(std::move(s));
  }
  spec.observed = r.String(r.Require(j, "observed", at), at + "/observed");
  if (std::none_of(spec.sentences.begin(), spec.sentences.end(),
                   [&](const SentenceForm& s) { return s.id == spec.observed; })) {
    r.Fail(at + "/observed", "'" + spec.observed + "' is not a listed sentence");
  }
  if (const Json* x = r.Find(j, "extra_costs")) {
    r.Array(*x, at + "/extra_costs");
    for (size_t i = 0; i < x->size(); ++i) {
      const std::string xat = Pointer(at + "/extra_costs", i);
      r.Object((*x)[i], xat);
      PairCost pc;
      pc.content = r.String(r.Require((*x)[i], "content", xat), xat + "/content");
      pc.message = r.String(r.Require((*x)[i], "message", xat), xat + "/message");
      pc.cost = r.Number(r.Require((*x)[i], "cost", xat), xat + "/cost");
      if (pc.cost < 0.0) r.Fail(xat + "/cost", "must be nonnegative");
      spec.extra_costs.push_back(std::move(pc));
    }
  }
  return spec;
}

}  // namespace

DiscourseFile ParseDiscourse(std::string_view text, const std::string& source) {
  const Reader r(source);
  const Json j = ParseJson(text, source);
  r.Object(j, "");
  DiscourseFile out;
  Discourse& d = out.discourse;
  r.WarnUnknown(j, "", {"entities", "expressions", "config", "utterances",
                        "description"},
                out.warnings);

  const Json& je = r.Array(r.Require(j, "entities", ""), "/entities");
  std::set<std::string> entity_ids, expression_ids;
  for (size_t i = 0; i < je.size(); ++i) {
    const std::string at = Pointer("/entities", i);
    r.Object(je[i], at);
    Entity e;
    e.id = r.String(r.Require(je[i], "id", at), at + "/id");
    if (e.id.empty()) r.Fail(at + "/id", "empty entity id");
    if (const Json* l = r.Find(je[i], "label")) e.label = r.String(*l, at + "/label");
    if (e.label.empty()) e.label = e.id;
    e.features = ParseFeatures(r, je[i], at);
    if (!entity_ids.insert(e.id).second) r.Fail(at, "duplicate entity '" + e.id + "'");
    d.lexicon.entities.push_back(std::move(e));
  }
  if (const Json* jx = r.Find(j, "expressions")) {
    r.Array(*jx, "/expressions");
    for (size_t i = 0; i < jx->size(); ++i) {
      const std::string at = Pointer("/expressions", i);
      r.Object((*jx)[i], at);
      Expression x;
      x.id = r.String(r.Require((*jx)[i], "id", at), at + "/id");
      if (const Json* l = r.Find((*jx)[i], "label")) x.label = r.String(*l, at + "/label");
      if (x.label.empty()) x.label = x.id;
      const std::string form = r.String(r.Require((*jx)[i], "form", at), at + "/form");
      auto tag = ParseForm(form);
      if (!tag) r.Fail(at + "/form", "unknown form '" + form + "'");
      x.form = *tag;
      x.features = ParseFeatures(r, (*jx)[i], at);
      if (!expression_ids.insert(x.id).second) {
        r.Fail(at, "duplicate expression '" + x.id + "'");
      }
      d.lexicon.expressions.push_back(std::move(x));
    }
  }
  if (const Json* jc = r.Find(j, "config")) ParseConfig(r, *jc, d.config, out.warnings);

  const Json& ju = r.Array(r.Require(j, "utterances", ""), "/utterances");
  for (size_t i = 0; i < ju.size(); ++i) {
    const std::string at = Pointer("/utterances", i);
    r.Object(ju[i], at);
    r.WarnUnknown(ju[i], at, {"text", "realizations", "slots", "compound"},
                  out.warnings);
    DiscourseUtterance du;
    du.utterance.index = i;
    if (const Json* t = r.Find(ju[i], "text")) du.utterance.text = r.String(*t, at + "/text");

    if (const Json* js = r.Find(ju[i], "slots")) {
      r.Object(*js, at + "/slots");
      for (const auto& [id, spec] : js->items()) {
        const std::string sat = at + "/slots/" + id;
        r.Object(spec, sat);
        NpSlot slot;
        slot.id = id;
        slot.candidates = StringList(r, r.Require(spec, "candidates", sat), sat + "/candidates");
        slot.options = StringList(r, r.Require(spec, "options", sat), sat + "/options");
        if (slot.candidates.empty()) r.Fail(sat + "/candidates", "slot '" + id + "' has no candidates");
        if (slot.options.empty()) r.Fail(sat + "/options", "slot '" + id + "' has no expression options");
        for (const auto& c : slot.candidates) {
          if (!entity_ids.count(c)) r.Fail(sat + "/candidates", "unknown entity '" + c + "'");
        }
        for (const auto& o : slot.options) {
          if (!expression_ids.count(o)) r.Fail(sat + "/options", "unknown expression '" + o + "'");
        }
        if (const Json* po = r.Find(spec, "prior_override")) {
          r.Object(*po, sat + "/prior_override");
          for (const auto& [e, w] : po->items()) {
            if (!entity_ids.count(e)) r.Fail(sat + "/prior_override/" + e, "unknown entity '" + e + "'");
            slot.prior_override[e] = r.Number(w, sat + "/prior_override/" + e);
          }
        }
        for (const auto& c : slot.candidates) {
          const Entity& e = d.lexicon.entity(c);
          bool any = false;
          for (const auto& o : slot.options) any = any || Compatible(e, d.lexicon.expression(o));
          if (!any) {
            r.Fail(sat, "slot '" + id + "': candidate '" + c +
                            "' is compatible with no expression option");
          }
        }
        du.slots.emplace(id, std::move(slot));
      }
    }

    const Json& jr = r.Array(r.Require(ju[i], "realizations", at), at + "/realizations");
    std::set<GrammaticalFunction> taken;
    std::set<std::string> used_slots;
    for (size_t q = 0; q < jr.size(); ++q) {
      const std::string rat = Pointer(at + "/realizations", q);
      r.Object(jr[q], rat);
      Realization real;
      const std::string fn = r.String(r.Require(jr[q], "function", rat), rat + "/function");
      auto function = ParseFunction(fn);
      if (!function) r.Fail(rat + "/function", "unknown grammatical function '" + fn + "'");
      real.function = *function;
      if (*function == GrammaticalFunction::kSubject ||
          *function == GrammaticalFunction::kDirectObject ||
          *function == GrammaticalFunction::kIndirectObject) {
        if (!taken.insert(*function).second) {
          r.Fail(rat + "/function", "second " + fn + " in one utterance");
        }
      }
      if (const Json* s = r.Find(jr[q], "surface")) real.surface = r.String(*s, rat + "/surface");
      if (const Json* s = r.Find(jr[q], "slot")) {
        real.slot = r.String(*s, rat + "/slot");
        if (!du.slots.count(real.slot)) {
          r.Fail(rat + "/slot", "undeclared slot '" + real.slot + "'");
        }
        if (!used_slots.insert(real.slot).second) {
          r.Fail(rat + "/slot", "slot '" + real.slot + "' realized twice");
        }
        real.expression = r.String(r.Require(jr[q], "expression", rat), rat + "/expression");
        const auto& options = du.slots.at(real.slot).options;
        if (std::find(options.begin(), options.end(), real.expression) == options.end()) {
          r.Fail(rat + "/expression", "'" + real.expression +
                                          "' is not an option of slot '" + real.slot + "'");
        }
        const Expression& x = d.lexicon.expression(real.expression);
        real.form = d.config.form_costs.Form(x.form);
        if (real.surface.empty()) real.surface = x.label;
      } else {
        real.entity = r.String(r.Require(jr[q], "entity", rat), rat + "/entity");
        if (!entity_ids.count(real.entity)) {
          r.Fail(rat + "/entity", "unknown entity '" + real.entity + "'");
        }
        std::string form = "proper_name";
        if (const Json* f = r.Find(jr[q], "form")) form = r.String(*f, rat + "/form");
        auto tag = ParseForm(form);
        if (!tag) r.Fail(rat + "/form", "unknown form '" + form + "'");
        real.form = d.config.form_costs.Form(*tag);
        if (real.surface.empty()) real.surface = d.lexicon.entity(real.entity).label;
      }
      du.utterance.realizations.push_back(std::move(real));
    }
    for (const auto& [id, slot] : du.slots) {
      if (!used_slots.count(id)) {
        out.warnings.push_back(source + ": " + at + "/slots/" + id +
                               ": slot is never realized");
      }
    }
    if (const Json* jc = r.Find(ju[i], "compound")) {
      du.compound = ParseCompound(r, *jc, at + "/compound", out.warnings);
      for (const auto& p : du.compound->propositions) {
        for (const auto& [slot, entity] : p.roles) {
          if (!du.slots.count(slot)) r.Fail(at + "/compound", "proposition '" + p.id + "' fills undeclared slot '" + slot + "'");
          if (!entity_ids.count(entity)) r.Fail(at + "/compound", "unknown entity '" + entity + "'");
        }
      }
      for (const auto& s : du.compound->sentences) {
        for (const auto& [slot, x] : s.realizes) {
          if (!du.slots.count(slot)) r.Fail(at + "/compound", "sentence '" + s.id + "' fills undeclared slot '" + slot + "'");
          if (!expression_ids.count(x)) r.Fail(at + "/compound", "unknown expression '" + x + "'");
        }
      }
    }
    d.utterances.push_back(std::move(du));
  }
  return out;
}

DiscourseFile LoadDiscourse(const std::string& path) {
  return ParseDiscourse(ReadFile(path), path);
}

std::vector<UnresolvedSlot> UnresolvedSlots(const Discourse& discourse) {
  std::vector<UnresolvedSlot> out;
  for (size_t i = 0; i < discourse.utterances.size(); ++i) {
    for (const auto& r : discourse.utterances[i].utterance.realizations) {
      if (!r.resolved()) out.push_back({i, r.slot});
    }
  }
  return out;
}

LoadedDiscourse InitialState(const Discourse& discourse) {
  std::vector<std::string> ids;
  for (const auto& e : discourse.lexicon.entities) ids.push_back(e.id);
  LoadedDiscourse out{DiscourseState(ids, discourse.config.salience),
                      UnresolvedSlots(discourse)};
  const size_t stop = out.unresolved.empty() ? discourse.utterances.size()
                                             : out.unresolved.front().utterance;
  for (size_t i = 0; i < stop; ++i) {
    out.state = out.state.Ingest(discourse.utterances[i].utterance);
  }
  return out;
}

std::string ConfigHash(std::string_view bytes) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Reports

std::string RenderMachine(const Json& report) { return report.dump(2) + "\n"; }

namespace {

std::string Cell(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "-";
  return v.dump();
}

}  // namespace

std::string RenderTable(const Json& report) {
  std::ostringstream out;
  for (const auto& [key, value] : report.items()) {
    if (key == "summary" || key == "tables") continue;
    out << key << ": " << Cell(value) << "\n";
  }
  if (auto s = report.find("summary"); s != report.end()) {
    for (const auto& [key, value] : s->items()) {
      out << key << ": " << Cell(value) << "\n";
    }
  }
  if (auto t = report.find("tables"); t != report.end()) {
    for (const auto& table : *t) {
      out << "\n== " << table.at("title").get<std::string>() << " ==\n";
      const Json& columns = table.at("columns");
      std::vector<size_t> width;
      for (const auto& c : columns) width.push_back(Cell(c).size());
      for (const auto& row : table.at("rows")) {
        for (size_t i = 0; i < row.size() && i < width.size(); ++i) {
          width[i] = std::max(width[i], Cell(row[i]).size());
        }
      }
      auto line = [&](const Json& cells) {
        std::string text;
        for (size_t i = 0; i < cells.size(); ++i) {
          std::string cell = Cell(cells[i]);
          if (i + 1 < cells.size()) cell.resize(width[i], ' ');
          text += (i ? "  " : "") + cell;
        }
        out << text << "\n";
      };
      line(columns);
      if (table.at("rows").empty()) out << "(none)\n";
      for (const auto& row : table.at("rows")) line(row);
    }
  }
  return out.str();
}

std::string PureMapText(const MeaningGame& game, const PureProfile& pure,
                        bool sender) {
  std::string out;
  if (sender) {
    for (size_t c = 0; c < pure.sender.size(); ++c) {
      if (c) out += ", ";
      out += game.content(c).id + "->" + game.message(pure.sender[c]).id;
    }
  } else {
    for (size_t m = 0; m < pure.receiver.size(); ++m) {
      if (m) out += ", ";
      const int c = pure.receiver[m];
      out += game.message(m).id + "->" + (c < 0 ? "-" : game.content(c).id);
    }
  }
  return out;
}

Json EquilibriaTable(const MeaningGame& game,
                     const std::vector<EquilibriumReport>& reports,
                     const std::string& title) {
  Json t;
  t["title"] = title;
  t["columns"] = {"#", "kind", "sender", "receiver", "success", "eu_sender",
                  "eu_receiver"};
  t["rows"] = Json::array();
  for (size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    t["rows"].push_back({i + 1, std::string(EquilibriumKindName(r.kind)),
                         PureMapText(game, r.pure, true),
                         PureMapText(game, r.pure, false), Round12(r.success),
                         Round12(r.eu_sender), Round12(r.eu_receiver)});
  }
  return t;
}

namespace {

Json GameSummary(const MeaningGame& game) {
  return {{"contents", game.num_contents()},
          {"messages", game.num_messages()},
          {"edges", game.num_edges()}};
}

}  // namespace

Json ValidateReport(const MeaningGame& game,
                    const std::vector<std::string>& load_warnings) {
  const ValidationReport v = ValidateGame(game);
  Json j;
  j["summary"] = GameSummary(game);
  j["summary"]["valid"] = v.ok();
  j["summary"]["cheap_talk"] = IsCheapTalk(game);
  j["summary"]["max_cost_spread"] = Round12(MaxCostSpread(game));
  Json rows = Json::array();
  for (const auto& x : v.violations) rows.push_back({"violation", x});
  for (const auto& x : load_warnings) rows.push_back({"warning", x});
  for (const auto& x : v.warnings) rows.push_back({"warning", x});
  j["tables"] = Json::array();
  j["tables"].push_back({{"title", "Diagnostics"},
                         {"columns", {"severity", "message"}},
                         {"rows", rows}});
  return j;
}

Json SolveReport(const MeaningGame& game,
                 const std::vector<EquilibriumReport>& reports,
                 const EnumerationOptions& options) {
  Json j;
  j["summary"] = GameSummary(game);
  j["summary"]["off_path"] = std::string(OffPathRuleName(options.rule));
  j["summary"]["profiles"] = CountPureProfiles(game);
  j["summary"]["equilibria"] = reports.size();
  j["tables"] = Json::array();
  j["tables"].push_back(EquilibriaTable(game, reports, "Pure equilibria"));
  return j;
}

Json PredictReport(const MeaningGame& game, const Prediction& prediction,
                   const EnumerationOptions& options, bool pareto_only) {
  Json j;
  j["summary"] = GameSummary(game);
  j["summary"]["off_path"] = std::string(OffPathRuleName(options.rule));
  j["summary"]["predictions"] = prediction.equilibria.size();
  j["summary"]["ambiguous"] = prediction.ambiguous;
  j["tables"] = Json::array();
  j["tables"].push_back(EquilibriaTable(
      game, prediction.equilibria,
      pareto_only ? "Pareto-optimal equilibria" : "Predicted play"));
  Json rows = Json::array();
  for (size_t i = 0; i < prediction.equilibria.size(); ++i) {
    for (const auto& e : InterpretationMap(game, prediction.equilibria[i].pure)) {
      rows.push_back({i + 1, game.content(e.content).id,
                      game.message(e.message).id,
                      e.interpreted < 0 ? std::string("-")
                                        : game.content(e.interpreted).id});
    }
  }
  j["tables"].push_back({{"title", "Interpretation maps"},
                         {"columns", {"#", "intended", "message", "interpreted"}},
                         {"rows", rows}});
  return j;
}

Json ResolveReport(const Discourse& discourse, const ResolveResult& result) {
  Json j;
  j["summary"] = {{"utterances", result.resolved.size()},
                  {"slots", result.slots.size()},
                  {"ambiguous", result.ambiguous()},
                  {"parallelism_bonus", discourse.config.parallelism_bonus},
                  {"cb_bonus", discourse.config.salience.cb_bonus}};
  if (result.rule1) {
    j["summary"]["rule1_violations"] = result.rule1->size();
  } else {
    j["summary"]["rule1_violations"] = "not checked (unresolved references)";
  }
  j["tables"] = Json::array();

  Json refs = Json::array();
  for (const auto& s : result.slots) {
    std::string alts;
    for (const auto& a : s.alternatives) alts += (alts.empty() ? "" : "|") + a;
    refs.push_back({s.utterance + 1, s.slot, s.expression,
                    s.entity ? *s.entity : std::string("unresolved"),
                    alts.empty() ? std::string("-") : alts,
                    s.via_compound ? "compound" : "np game"});
  }
  j["tables"].push_back(
      {{"title", "References"},
       {"columns", {"u", "slot", "expression", "entity", "alternatives", "via"}},
       {"rows", refs}});

  Json centers = Json::array();
  for (size_t i = 0; i < result.resolved.size(); ++i) {
    std::string cf;
    for (const auto& e : Cf(result.resolved[i])) cf += (cf.empty() ? "" : ", ") + e;
    const auto cp = Cp(result.resolved[i]);
    const auto cb = Cb(result.resolved, i);
    centers.push_back({i + 1, result.resolved[i].text, "[" + cf + "]",
                       cp ? *cp : std::string("-"), cb ? *cb : std::string("-")});
  }
  j["tables"].push_back({{"title", "Centers"},
                         {"columns", {"u", "text", "Cf", "Cp", "Cb"}},
                         {"rows", centers}});

  Json rule = Json::array();
  if (result.rule1) {
    for (size_t i = 0; i < result.rule1->size(); ++i) {
      const auto& v = (*result.rule1)[i];
      std::string pro;
      for (const auto& e : v.pronominalized) pro += (pro.empty() ? "" : ", ") + e;
      const std::string& why = result.rule1_attribution[i];
      rule.push_back({v.utterance + 1, v.cb, pro, why.empty() ? "-" : why});
    }
  }
  j["tables"].push_back(
      {{"title", "Rule 1 violations"},
       {"columns", {"u", "Cb", "pronominalized", "attribution"}},
       {"rows", rule}});

  Json sal = Json::array();
  for (const auto& [e, s] : result.final_state.salience()) sal.push_back({e, Round12(s)});
  j["tables"].push_back({{"title", "Final salience"},
                         {"columns", {"entity", "score"}},
                         {"rows", sal}});
  return j;
}

Json CompoundReport(const ResolveResult& result) {
  Json j;
  j["summary"] = {{"compounds", result.compounds.size()}};
  j["tables"] = Json::array();
  for (const auto& cr : result.compounds) {
    const auto& pred = cr.prediction;
    const std::string u = "u" + std::to_string(cr.utterance + 1);
    Json info = Json::array();
    info.push_back({"joint contents", pred.flat.num_contents()});
    info.push_back({"joint messages", pred.flat.num_messages()});
    info.push_back({"pareto solutions", pred.pareto.size()});
    info.push_back({"after refinement", pred.solutions.size()});
    info.push_back({"refined", pred.refined});
    info.push_back({"ambiguous", pred.ambiguous});
    info.push_back({"reading", cr.proposition ? *cr.proposition : "unresolved"});
    j["tables"].push_back({{"title", u + " compound"},
                           {"columns", {"field", "value"}},
                           {"rows", info}});

    Json par = Json::array();
    const MeaningGame& sentence = cr.game.constituents.front().game;
    for (size_t i = 0; i < cr.parallel.size(); ++i) {
      par.push_back({sentence.content(i).id, cr.parallel[i]});
    }
    j["tables"].push_back({{"title", u + " parallelism"},
                           {"columns", {"proposition", "parallel"}},
                           {"rows", par}});

    Json rows = Json::array();
    for (size_t s = 0; s < pred.pareto.size(); ++s) {
      const auto& sol = pred.pareto[s];
      const bool kept = std::any_of(
          pred.solutions.begin(), pred.solutions.end(),
          [&](const CompoundSolution& x) { return x.report.pure == sol.report.pure; });
      for (const auto& v : sol.verdicts) {
        size_t k = 0;
        while (cr.game.constituents[k].slot.id != v.slot) ++k;
        const MeaningGame& g = cr.game.constituents[k].game;
        std::string readings;
        for (auto [m, c] : v.readings) {
          readings += (readings.empty() ? "" : ", ") + g.message(m).id + "->" +
                      g.content(c).id;
        }
        rows.push_back({s + 1, kept, v.slot, readings.empty() ? "-" : readings,
                        v.optimal ? "optimal" : "suboptimal",
                        Round12(sol.report.eu_sender),
                        Round12(sol.report.eu_receiver)});
      }
    }
    j["tables"].push_back(
        {{"title", u + " global solutions vs constituent optima"},
         {"columns",
          {"#", "kept", "constituent", "readings", "verdict", "eu_sender",
           "eu_receiver"}},
         {"rows", rows}});
  }
  return j;
}

Json LevelKReport(const MeaningGame& g_s, const MeaningGame& g_r,
                  const LevelKResult& result, OffPathRule rule) {
  Json j;
  std::string status = "no fixed point within depth";
  if (result.converged()) {
    status = "fixed at level " + std::to_string(*result.fixed_at);
  } else if (result.oscillating()) {
    status = "oscillating: cycle of length " +
             std::to_string(result.cycle_length) + " from level " +
             std::to_string(*result.cycle_start);
  }
  j["summary"] = {{"depth", result.levels.size() - 1},
                  {"off_path", std::string(OffPathRuleName(rule))},
                  {"status", status}};
  if (result.converged()) {
    const PureProfile& fixed = result.levels[*result.fixed_at];
    j["summary"]["fixed_is_equilibrium_g_s"] =
        IsPureEquilibrium(g_s, fixed, rule).is_equilibrium;
    j["summary"]["fixed_is_equilibrium_g_r"] =
        IsPureEquilibrium(g_r, fixed, rule).is_equilibrium;
  }
  Json rows = Json::array();
  for (size_t k = 0; k < result.levels.size(); ++k) {
    rows.push_back({k, PureMapText(g_s, result.levels[k], true),
                    PureMapText(g_s, result.levels[k], false)});
  }
  j["tables"] = Json::array();
  j["tables"].push_back({{"title", "Level-k strategies"},
                         {"columns", {"level", "sender", "receiver"}},
                         {"rows", rows}});
  return j;
}

Json ExplainReport(const MeaningGame& game) {
  if (game.num_contents() != 2 || game.num_messages() != 2 ||
      game.num_edges() != 4) {
    throw NotApplicableError("explain needs a complete 2x2 game");
  }
  // Non-bonus utility of each pair, averaged over the two players.
  auto u = [&](size_t c, size_t m) {
    double v = 0.0;
    for (Player p : {Player::kSender, Player::kReceiver}) {
      const PlayerUtility& x = game.utility().For(p);
      v -= x.sender_cost.ValueOr0(c, m) + x.receiver_cost.ValueOr0(m, c);
    }
    return v / 2.0;
  };
  const double p1 = game.prior()[0], p2 = game.prior()[1];
  const double e1 = p1 * u(0, 0) + p2 * u(1, 1);
  const double e2 = p1 * u(0, 1) + p2 * u(1, 0);
  const bool message_only = std::abs(u(0, 0) - u(1, 0)) <= kTolerance &&
                            std::abs(u(0, 1) - u(1, 1)) <= kTolerance;
  const std::string c1 = game.content(0).id, c2 = game.content(1).id;
  const std::string m1 = game.message(0).id, m2 = game.message(1).id;
  Json j;
  j["summary"] = {
      {"P1", Round12(p1)}, {"P2", Round12(p2)},
      {"left", c1 + "->" + m1 + ", " + c2 + "->" + m2},
      {"right", c1 + "->" + m2 + ", " + c2 + "->" + m1},
      {"message_only_costs", message_only}};
  Json rows = Json::array();
  if (message_only) {
    const double u1 = u(0, 0), u2 = u(0, 1);
    j["summary"]["U1"] = Round12(u1);
    j["summary"]["U2"] = Round12(u2);
    rows.push_back({"E1", "P1*U1 + P2*U2",
                    Format(p1) + "*" + Format(u1) + " + " + Format(p2) + "*" + Format(u2),
                    Round12(e1)});
    rows.push_back({"E2", "P1*U2 + P2*U1",
                    Format(p1) + "*" + Format(u2) + " + " + Format(p2) + "*" + Format(u1),
                    Round12(e2)});
    rows.push_back({"E1-E2", "(P1-P2)*(U1-U2)",
                    "(" + Format(p1 - p2) + ")*(" + Format(u1 - u2) + ")",
                    Round12((p1 - p2) * (u1 - u2))});
    j["summary"]["identity_holds"] =
        std::abs((e1 - e2) - (p1 - p2) * (u1 - u2)) <= kTolerance;
  } else {
    rows.push_back({"E1", "P1*U(c1,m1) + P2*U(c2,m2)",
                    Format(p1) + "*" + Format(u(0, 0)) + " + " + Format(p2) +
                        "*" + Format(u(1, 1)),
                    Round12(e1)});
    rows.push_back({"E2", "P1*U(c1,m2) + P2*U(c2,m1)",
                    Format(p1) + "*" + Format(u(0, 1)) + " + " + Format(p2) +
                        "*" + Format(u(1, 0)),
                    Round12(e2)});
    rows.push_back({"E1-E2", "E1-E2", "-", Round12(e1 - e2)});
  }
  j["tables"] = Json::array();
  j["tables"].push_back(
      {{"title", "Expected utility without the success bonus"},
       {"columns", {"term", "symbolic", "substituted", "value"}},
       {"rows", rows}});
  return j;
}

}  // namespace meaning
