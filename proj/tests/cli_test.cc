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

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

struct Run {
  int code = -1;
  std::string out;  // stdout and stderr
};

Run Mgame(const std::string& args) {
  const std::string cmd = std::string(MGAME_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string Data(const std::string& name) {
  return std::string(MEANING_DATA_DIR) + "/" + name;
}

std::string TempFile(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path.string();
}

bool Has(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("predict on fig2") {
  const auto r = Mgame("predict --game " + Data("fig2.game"));
  CHECK(r.code == 0);
  CHECK(Has(r.out, "Fred->he, Max->the man"));
  CHECK(Has(r.out, "predictions: 1"));
}

TEST_CASE("machine output is byte identical across runs") {
  const auto args = "solve --format machine --game " + Data("fig2.game");
  const auto a = Mgame(args), b = Mgame(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK_FALSE(Has(a.out, "elapsed_ms"));
  const auto j = nlohmann::json::parse(a.out);
  CHECK(j["summary"]["equilibria"] == 3);

  const auto rnd = "solve --format machine --random 3 --seed 7";
  CHECK(Mgame(rnd).out == Mgame(rnd).out);
  const auto disc = "resolve --format machine --discourse " +
                    Data("man_him.disc");
  CHECK(Mgame(disc).out == Mgame(disc).out);
}

TEST_CASE("table and machine formats agree") {
  const auto table = Mgame("pareto --game " + Data("fig2.game"));
  const auto machine =
      Mgame("pareto --format machine --game " + Data("fig2.game"));
  const auto j = nlohmann::json::parse(machine.out);
  for (const auto& t : j["tables"]) {
    for (const auto& row : t["rows"]) {
      for (const auto& cell : row) {
        CHECK(Has(table.out,
                  cell.is_string() ? cell.get<std::string>() : cell.dump()));
      }
    }
  }
}

TEST_CASE("ambiguous prediction has its own exit code") {
  const auto path = TempFile("mgame_symmetric.game", R"({
    "contents": ["a", "b"],
    "messages": [{"id": "x", "cost": 0}, {"id": "y", "cost": 0}]
  })");
  CHECK(Mgame("predict --game " + path).code == 3);
  CHECK(Mgame("solve --game " + path).code == 0);
}

TEST_CASE("input errors name the location") {
  const auto path = TempFile("mgame_broken.game", "{\n  \"contents\": [\n}");
  auto r = Mgame("validate --game " + path);
  CHECK(r.code == 1);
  CHECK(Has(r.out, "line 3"));

  const auto field = TempFile("mgame_field.game", R"({
    "contents": ["a"], "messages": [{"id": "x", "cost": "free"}]
  })");
  r = Mgame("validate --game " + field);
  CHECK(r.code == 1);
  CHECK(Has(r.out, "/messages/0/cost"));

  r = Mgame("validate --game /nonexistent/file.game");
  CHECK(r.code == 1);
  CHECK(Has(r.out, "/nonexistent/file.game"));
}

TEST_CASE("usage errors") {
  auto r = Mgame("solve --bogus");
  CHECK(r.code == 2);
  CHECK(Has(r.out, "--bogus"));
  CHECK(Mgame("solve").code == 2);
  CHECK(Mgame("solve --game " + Data("fig2.game") + " --off-path never").code ==
        2);
}

TEST_CASE("size cap and not applicable") {
  auto r = Mgame("solve --cap 1 --game " + Data("fig2.game"));
  CHECK(r.code == 4);
  CHECK(Has(r.out, "cap"));
  r = Mgame("explain --random 3 --seed 1");
  CHECK(r.code == 5);
}

TEST_CASE("explain substitutes the file's numbers") {
  const auto r = Mgame("explain --game " + Data("fig2.game"));
  CHECK(r.code == 0);
  CHECK(Has(r.out, "0.1"));
  CHECK(Has(r.out, "0.2"));
}

TEST_CASE("resolve reports the rule 1 violation and its cause") {
  auto r = Mgame("resolve --discourse " + Data("man_him.disc"));
  CHECK(r.code == 0);
  CHECK(Has(r.out, "parallelism"));
  const auto j = nlohmann::json::parse(
      Mgame("resolve --format machine --discourse " + Data("man_him.disc"))
          .out);
  CHECK(j["summary"]["rule1_violations"] == 1);

  const auto off = nlohmann::json::parse(
      Mgame("resolve --format machine --parallelism-bonus 0 --discourse " +
            Data("man_him.disc"))
          .out);
  CHECK(off["summary"]["rule1_violations"] == 0);

  r = Mgame("resolve --discourse " + Data("he_man.disc"));
  CHECK(r.code == 0);
  CHECK(Mgame("compound --discourse " + Data("man_him.disc")).code == 0);
}

TEST_CASE("levelk") {
  auto r = Mgame("levelk --game " + Data("fig2.game"));
  CHECK(r.code == 0);
  r = Mgame("levelk --format machine --game " + Data("levelk_sender.game") +
            " --receiver-game " + Data("levelk_receiver.game"));
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["summary"]["status"] == "oscillating: cycle of length 2 from level 0");
}
