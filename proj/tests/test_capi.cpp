// Exercises the library through the C interface only.
#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <string>

#include "cobra/cobra.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  cobra_string_free(s);
  return out;
}

struct Game {
  cobra_game* g = nullptr;
  explicit Game(const char* spec) { REQUIRE(cobra_game_generate(spec, &g) == COBRA_OK); }
  ~Game() { cobra_game_free(g); }
};

struct Strategy {
  cobra_strategy* s = nullptr;
  Strategy(const cobra_game* g, const char* name, const char* symmetry = nullptr) {
    cobra_solve_options opts{name, symmetry, 0};
    REQUIRE(cobra_solve(g, &opts, &s) == COBRA_OK);
  }
  ~Strategy() { cobra_strategy_free(s); }
};

struct Session {
  cobra_session* p = nullptr;
  explicit Session(const cobra_strategy* s) { REQUIRE(cobra_session_new(s, &p) == COBRA_OK); }
  ~Session() { cobra_session_free(p); }
  cobra_session_state state() const {
    cobra_session_state st;
    REQUIRE(cobra_session_state_get(p, &st) == COBRA_OK);
    return st;
  }
  std::string proposal() const {
    const char* e = nullptr;
    REQUIRE(cobra_session_proposal(p, &e, nullptr) == COBRA_OK);
    return e;
  }
};

}  // namespace

TEST_CASE("games load, generate and report errors") {
  Game ccp("ccp:4");
  cobra_game_info info;
  REQUIRE(cobra_game_info_get(ccp.g, &info) == COBRA_OK);
  CHECK(info.variables == 5);
  CHECK(info.parameters == 4);
  CHECK(info.attributes == 1);
  CHECK(info.experiments == 2);
  size_t codes = 0;
  REQUIRE(cobra_game_code_count(ccp.g, &codes) == COBRA_OK);
  CHECK(codes == 8);

  cobra_game* g = nullptr;
  CHECK(cobra_game_generate("mm:0:3", &g) == COBRA_ERR_INPUT);
  CHECK(cobra_game_generate("checkers", &g) == COBRA_ERR_INPUT);
  CHECK(std::string(cobra_last_error()).find("checkers") != std::string::npos);
  CHECK(cobra_game_load("/no/such/file.cobra", &g) == COBRA_ERR_INPUT);
  CHECK(cobra_game_parse("VARS x\nCONSTRAINT x &\n", "bad.cobra", &g) == COBRA_ERR_INPUT);
  CHECK(std::string(cobra_last_error()).find("bad.cobra:3:1: error: expected a formula") != std::string::npos);
  CHECK(g == nullptr);
  CHECK(cobra_game_generate(nullptr, &g) == COBRA_ERR_INPUT);

  // A serialized game parses back to the same game.
  char* text = nullptr;
  REQUIRE(cobra_game_serialize(ccp.g, &text) == COBRA_OK);
  const std::string first = take(text);
  REQUIRE(cobra_game_parse(first.c_str(), "round-trip", &g) == COBRA_OK);
  REQUIRE(cobra_game_serialize(g, &text) == COBRA_OK);
  CHECK(take(text) == first);
  cobra_game_free(g);
}

TEST_CASE("well-formedness check") {
  Game ccp("ccp:4");
  char* report = nullptr;
  CHECK(cobra_game_check(ccp.g, nullptr, &report) == COBRA_OK);
  CHECK(take(report).find("well-formed") == 0);

  cobra_game* broken = nullptr;
  REQUIRE(cobra_game_load(COBRA_GAMES_DIR "/broken.cobra", &broken) == COBRA_OK);
  CHECK(cobra_game_check(broken, "none", &report) == COBRA_ERR_DOMAIN);
  const std::string r = take(report);
  CHECK(r.find("ill-formed: t1(") == 0);
  CHECK(r.find("no true outcome") != std::string::npos);
  CHECK(cobra_game_check(broken, "sideways", &report) == COBRA_ERR_INPUT);
  cobra_game_free(broken);
}

TEST_CASE("solving reports exact costs") {
  Game ccp("ccp:4");
  Strategy ranking(ccp.g, "max-models");
  cobra_complexity c;
  REQUIRE(cobra_strategy_complexity(ranking.s, &c) == COBRA_OK);
  CHECK(c.worst == 3);
  CHECK(c.avg_num == 9);
  CHECK(c.avg_den == 4);
  CHECK(std::string(c.avg_decimal) == "2.25000");
  CHECK(std::string(c.avg_exact) == "9/4");
  size_t rounds = 0;
  REQUIRE(cobra_strategy_round_count(ranking.s, &rounds) == COBRA_OK);
  CHECK(rounds == 3);
  cobra_round r;
  REQUIRE(cobra_strategy_round(ranking.s, 0, &r) == COBRA_OK);
  CHECK(r.nodes == 1);
  CHECK(r.phase2_avg == 2.0);
  CHECK(cobra_strategy_round(ranking.s, 3, &r) == COBRA_ERR_INPUT);

  Game mm("mm:2:3");
  Strategy opt(mm.g, "optimal-avg", "syntactic");
  REQUIRE(cobra_strategy_round_count(opt.s, &rounds) == COBRA_OK);
  CHECK(rounds == 0);
  char* dot = nullptr;
  char* json = nullptr;
  REQUIRE(cobra_strategy_dot(opt.s, &dot) == COBRA_OK);
  REQUIRE(cobra_strategy_json(opt.s, &json) == COBRA_OK);
  CHECK(take(dot).rfind("digraph", 0) == 0);
  CHECK(take(json).rfind("[", 0) == 0);

  cobra_strategy* s = nullptr;
  cobra_solve_options bad{"fastest", nullptr, 0};
  CHECK(cobra_solve(mm.g, &bad, &s) == COBRA_ERR_INPUT);
  cobra_solve_options badMode{"parts", "clever", 0};
  CHECK(cobra_solve(mm.g, &badMode, &s) == COBRA_ERR_INPUT);
  CHECK(s == nullptr);
}

TEST_CASE("unsolvable games fail with stable statuses") {
  Game ccp("ccp:2");
  cobra_strategy* s = nullptr;
  cobra_solve_options ranking{"max-models", nullptr, 10};
  CHECK(cobra_solve(ccp.g, &ranking, &s) == COBRA_ERR_LIMIT);
  cobra_solve_options optimal{"optimal-worst", nullptr, 0};
  CHECK(cobra_solve(ccp.g, &optimal, &s) == COBRA_ERR_DOMAIN);
  CHECK(s == nullptr);
}

TEST_CASE("simulated plays add up to the reported cost") {
  for (const char* spec : {"ccp:5", "mm:2:3", "mm:3:2"}) {
    Game g(spec);
    for (const char* name : {"max-models", "parts", "optimal-worst", "optimal-avg"}) {
      Strategy s(g.g, name);
      cobra_complexity c;
      REQUIRE(cobra_strategy_complexity(s.s, &c) == COBRA_OK);
      size_t n = 0;
      REQUIRE(cobra_strategy_secret_count(s.s, &n) == COBRA_OK);
      std::uint64_t sum = 0;
      std::uint32_t worst = 0;
      for (size_t i = 0; i < n; ++i) {
        std::uint32_t len = 0;
        char* transcript = nullptr;
        REQUIRE(cobra_strategy_simulate(s.s, i, &transcript, &len) == COBRA_OK);
        const std::string t = take(transcript);
        CHECK(static_cast<std::uint32_t>(std::count(t.begin(), t.end(), '\n')) == len);
        sum += len;
        worst = std::max(worst, len);
      }
      CHECK(worst == c.worst);
      CHECK(sum * c.avg_den == c.avg_num * n);
    }
  }
}

TEST_CASE("secrets by name") {
  Game ccp("ccp:4");
  Strategy s(ccp.g, "max-models");
  size_t i = 0;
  REQUIRE(cobra_strategy_find_secret(s.s, "x4, y", &i) == COBRA_OK);
  char* name = nullptr;
  REQUIRE(cobra_strategy_secret_name(s.s, i, &name) == COBRA_OK);
  CHECK(take(name) == "coin 4, heavier");
  REQUIRE(cobra_strategy_find_secret(s.s, "x2", &i) == COBRA_OK);
  REQUIRE(cobra_strategy_secret_name(s.s, i, &name) == COBRA_OK);
  CHECK(take(name) == "coin 2, lighter");
  CHECK(cobra_strategy_find_secret(s.s, "x1 x2", &i) == COBRA_ERR_INPUT);
  CHECK(cobra_strategy_find_secret(s.s, "x7", &i) == COBRA_ERR_INPUT);
  CHECK(cobra_strategy_secret_name(s.s, 8, &name) == COBRA_ERR_INPUT);

  Game mm("mm:2:3");
  Strategy t(mm.g, "parts");
  REQUIRE(cobra_strategy_find_secret(t.s, "x1_B x2_C", &i) == COBRA_OK);
  REQUIRE(cobra_strategy_secret_name(t.s, i, &name) == COBRA_OK);
  CHECK(take(name) == "B C");
}

TEST_CASE("play sessions follow the strategy") {
  Game ccp("ccp:4");
  Strategy s(ccp.g, "max-models");
  Session p(s.s);
  CHECK(p.state().models == 8);
  CHECK(p.state().solved == 0);
  CHECK(p.proposal() == "t1(coin1, coin2)");
  size_t outcomes = 0;
  REQUIRE(cobra_session_proposal(p.p, nullptr, &outcomes) == COBRA_OK);
  CHECK(outcomes == 3);
  const char* name = nullptr;
  REQUIRE(cobra_session_outcome_name(p.p, 2, &name) == COBRA_OK);
  CHECK(std::string(name) == ">");

  CHECK(cobra_session_undo(p.p) == COBRA_ERR_DOMAIN);
  REQUIRE(cobra_session_answer(p.p, "=") == COBRA_OK);
  CHECK(p.state().models == 4);
  REQUIRE(cobra_session_undo(p.p) == COBRA_OK);
  CHECK(p.state().models == 8);
  CHECK(p.proposal() == "t1(coin1, coin2)");

  REQUIRE(cobra_session_answer(p.p, "1") == COBRA_OK);
  REQUIRE(cobra_session_answer(p.p, "=") == COBRA_OK);
  CHECK(p.state().models == 2);
  // Coins 1 to 3 are genuine now, so the scale cannot balance.
  CHECK(cobra_session_answer(p.p, "=") == COBRA_ERR_DOMAIN);
  CHECK(std::string(cobra_last_error()) == "inconsistent with previous answers");
  CHECK(p.state().models == 2);
  CHECK(cobra_session_answer(p.p, "heavy") == COBRA_ERR_INPUT);
  CHECK(cobra_session_answer(p.p, "3") == COBRA_ERR_INPUT);
  char* secret = nullptr;
  CHECK(cobra_session_secret(p.p, &secret) == COBRA_ERR_DOMAIN);

  REQUIRE(cobra_session_answer(p.p, ">") == COBRA_OK);
  CHECK(p.state().solved == 1);
  CHECK(p.state().answered == 3);
  REQUIRE(cobra_session_secret(p.p, &secret) == COBRA_OK);
  CHECK(take(secret) == "coin 4, lighter");
  CHECK(cobra_session_proposal(p.p, nullptr, nullptr) == COBRA_ERR_DOMAIN);
}

TEST_CASE("status names and null handles") {
  CHECK(std::string(cobra_status_name(COBRA_ERR_LIMIT)) == "limit reached");
  CHECK(std::string(cobra_version()).size() > 0);
  cobra_complexity c;
  CHECK(cobra_strategy_complexity(nullptr, &c) == COBRA_ERR_INPUT);
  CHECK(cobra_session_answer(nullptr, "=") == COBRA_ERR_INPUT);
  cobra_game_free(nullptr);
  cobra_strategy_free(nullptr);
  cobra_session_free(nullptr);
}
