// Command line front end. Talks to the library only through cobra.h.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "cobra/cobra.h"

namespace {

struct GameDeleter {
  void operator()(cobra_game* g) const { cobra_game_free(g); }
};
struct StrategyDeleter {
  void operator()(cobra_strategy* s) const { cobra_strategy_free(s); }
};
struct SessionDeleter {
  void operator()(cobra_session* p) const { cobra_session_free(p); }
};
using GamePtr = std::unique_ptr<cobra_game, GameDeleter>;
using StrategyPtr = std::unique_ptr<cobra_strategy, StrategyDeleter>;
using SessionPtr = std::unique_ptr<cobra_session, SessionDeleter>;

// Status carried up to main as the exit code.
struct Failure {
  cobra_status status;
};

std::string take(char* s) {
  std::string out = s ? s : "";
  cobra_string_free(s);
  return out;
}

void check(cobra_status s) {
  if (s == COBRA_OK) return;
  std::cerr << "error: " << cobra_last_error() << "\n";
  throw Failure{s};
}

struct Config {
  std::string file;
  std::string gen;
  std::string strategy = "max-models";
  std::string symmetry = "semantic";
  std::uint32_t depthCap = 64;
  bool exact = false;
  bool csv = false;
  std::string dot;
  std::string json;
  std::string secret;
  bool all = false;
  std::size_t sample = 0;
  std::uint64_t seed = 1;
  int verbose = 0;
};

GamePtr loadGame(const Config& cfg) {
  if (cfg.file.empty() == cfg.gen.empty()) {
    std::cerr << "error: give either a game file or --gen\n";
    throw Failure{COBRA_ERR_INPUT};
  }
  cobra_game* g = nullptr;
  check(cfg.gen.empty() ? cobra_game_load(cfg.file.c_str(), &g) : cobra_game_generate(cfg.gen.c_str(), &g));
  return GamePtr(g);
}

StrategyPtr solve(const Config& cfg, const cobra_game* g) {
  cobra_solve_options opts{cfg.strategy.c_str(), cfg.symmetry.c_str(), cfg.depthCap};
  cobra_strategy* s = nullptr;
  check(cobra_solve(g, &opts, &s));
  if (cfg.verbose) {
    std::size_t nodes = 0;
    check(cobra_strategy_tree_size(s, &nodes));
    std::cerr << cfg.strategy << ": " << nodes << " tree nodes\n";
  }
  return StrategyPtr(s);
}

void writeFile(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    throw Failure{COBRA_ERR_INPUT};
  }
}

// sum / n rounded half-up to 5 decimals.
std::string decimal(std::uint64_t sum, std::uint64_t n) {
  const std::uint64_t scaled = (sum * 200000 + n) / (2 * n);
  std::string frac = std::to_string(scaled % 100000);
  return std::to_string(scaled / 100000) + "." + std::string(5 - frac.size(), '0') + frac;
}

int cmdCheck(const Config& cfg) {
  GamePtr g = loadGame(cfg);
  char* report = nullptr;
  const cobra_status s = cobra_game_check(g.get(), cfg.symmetry.c_str(), &report);
  if (s != COBRA_OK && !report) check(s);
  std::cout << take(report) << "\n";
  return s;
}

int cmdSolve(const Config& cfg) {
  GamePtr g = loadGame(cfg);
  StrategyPtr s = solve(cfg, g.get());
  cobra_complexity c;
  check(cobra_strategy_complexity(s.get(), &c));
  std::cout << "avg " << (cfg.exact ? c.avg_exact : c.avg_decimal) << " worst " << c.worst << "\n";
  if (!cfg.dot.empty()) {
    char* text = nullptr;
    check(cobra_strategy_dot(s.get(), &text));
    writeFile(cfg.dot, take(text));
  }
  if (!cfg.json.empty()) {
    char* text = nullptr;
    check(cobra_strategy_json(s.get(), &text));
    writeFile(cfg.json, take(text));
  }
  return 0;
}

int cmdBench(const Config& cfg) {
  if (cfg.strategy.rfind("optimal", 0) == 0) {
    std::cerr << "error: bench needs a ranking strategy\n";
    return COBRA_ERR_INPUT;
  }
  GamePtr g = loadGame(cfg);
  StrategyPtr s = solve(cfg, g.get());
  std::size_t rounds = 0;
  check(cobra_strategy_round_count(s.get(), &rounds));
  std::cout << (cfg.csv ? "round,phase1_avg,phase2_avg\n" : "round  nodes  phase1_avg  phase2_avg\n");
  for (std::size_t i = 0; i < rounds; ++i) {
    cobra_round r;
    check(cobra_strategy_round(s.get(), i, &r));
    char line[128];
    if (cfg.csv)
      std::snprintf(line, sizeof line, "%zu,%.2f,%.2f\n", i + 1, r.phase1_avg, r.phase2_avg);
    else
      std::snprintf(line, sizeof line, "%5zu  %5zu  %10.2f  %10.2f\n", i + 1, r.nodes, r.phase1_avg, r.phase2_avg);
    std::cout << line;
  }
  return 0;
}

void printProposal(const cobra_session* p, std::size_t round) {
  const char* experiment = nullptr;
  std::size_t outcomes = 0;
  check(cobra_session_proposal(p, &experiment, &outcomes));
  std::cout << "experiment " << round << ": " << experiment << "\noutcomes:";
  for (std::size_t o = 0; o < outcomes; ++o) {
    const char* name = nullptr;
    check(cobra_session_outcome_name(p, o, &name));
    std::cout << "  [" << o << "] " << name;
  }
  std::cout << "\n";
}

int cmdPlay(const Config& cfg) {
  GamePtr g = loadGame(cfg);
  StrategyPtr s = solve(cfg, g.get());
  cobra_session* raw = nullptr;
  check(cobra_session_new(s.get(), &raw));
  SessionPtr p(raw);
  cobra_session_state st;
  bool prompt = true;
  for (;;) {
    check(cobra_session_state_get(p.get(), &st));
    if (st.solved) {
      std::cout << "secret code: " << take([&] {
        char* out = nullptr;
        check(cobra_session_secret(p.get(), &out));
        return out;
      }()) << " (after " << st.answered << " experiments)\n";
      return 0;
    }
    if (prompt) printProposal(p.get(), st.answered + 1);
    prompt = false;
    std::cout << "> " << std::flush;
    std::string line;
    if (!std::getline(std::cin, line)) {
      std::cout << "\n";
      return 0;
    }
    line.erase(0, line.find_first_not_of(" \t\r"));
    line.erase(line.find_last_not_of(" \t\r") + 1);
    if (line.empty()) continue;
    if (line == "quit") return 0;
    if (line == "models") {
      std::cout << st.models << " codes remain\n";
    } else if (line == "help") {
      std::cout << "enter an outcome name or index, or one of: undo, models, quit\n";
    } else if (line == "undo") {
      if (cobra_session_undo(p.get()) == COBRA_OK)
        prompt = true;
      else
        std::cout << cobra_last_error() << "\n";
    } else {
      const cobra_status r = cobra_session_answer(p.get(), line.c_str());
      if (r == COBRA_OK)
        prompt = true;
      else if (r == COBRA_ERR_DOMAIN || r == COBRA_ERR_INPUT)
        std::cout << cobra_last_error() << "\n";
      else
        check(r);
    }
  }
}

int cmdSimulate(const Config& cfg) {
  GamePtr g = loadGame(cfg);
  StrategyPtr s = solve(cfg, g.get());
  std::size_t count = 0;
  check(cobra_strategy_secret_count(s.get(), &count));
  std::vector<std::size_t> secrets;
  if (!cfg.secret.empty()) {
    std::size_t i = 0;
    check(cobra_strategy_find_secret(s.get(), cfg.secret.c_str(), &i));
    secrets.push_back(i);
  } else {
    std::vector<std::size_t> every(count);
    std::iota(every.begin(), every.end(), std::size_t{0});
    if (cfg.sample && !cfg.all) {
      std::mt19937_64 rng(cfg.seed);
      std::sample(every.begin(), every.end(), std::back_inserter(secrets), cfg.sample, rng);
    } else {
      secrets = std::move(every);
    }
  }
  const bool transcript = secrets.size() == 1;
  std::uint64_t sum = 0;
  std::uint32_t max = 0;
  for (std::size_t i : secrets) {
    char* text = nullptr;
    std::uint32_t length = 0;
    check(cobra_strategy_simulate(s.get(), i, transcript ? &text : nullptr, &length));
    char* name = nullptr;
    check(cobra_strategy_secret_name(s.get(), i, &name));
    if (transcript) std::cout << take(text);
    std::cout << "secret " << take(name) << ": " << length << " experiments\n";
    sum += length;
    max = std::max(max, length);
  }
  std::cout << "secrets " << secrets.size() << " max " << max << " mean " << decimal(sum, secrets.size()) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deductive game solver: check games, synthesize strategies, simulate and play."};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cobra_version()));
  Config cfg;

  auto addGame = [&](CLI::App* sub) {
    sub->add_option("file", cfg.file, "game file");
    sub->add_option("--gen", cfg.gen, "generated game: ccp:N or mm:P:C[:col|:pos]");
    sub->add_option("--symmetry", cfg.symmetry, "none, syntactic or semantic")->capture_default_str();
    sub->add_flag("-v,--verbose", cfg.verbose, "more output on stderr");
  };
  auto addStrategy = [&](CLI::App* sub) {
    sub->add_option("--strategy", cfg.strategy,
                    "max-models, exp-models, ent-models, parts, min-fixed, exp-fixed, optimal-worst or optimal-avg")
        ->capture_default_str();
    sub->add_option("--depth-cap", cfg.depthCap, "give up on ranking strategies past this depth")
        ->capture_default_str();
  };

  CLI::App* checkCmd = app.add_subcommand("check", "verify that every code yields exactly one outcome");
  addGame(checkCmd);
  CLI::App* solveCmd = app.add_subcommand("solve", "build a strategy and report its worst and average cost");
  addGame(solveCmd);
  addStrategy(solveCmd);
  solveCmd->add_flag("--exact", cfg.exact, "print the average as a fraction");
  solveCmd->add_option("--dot", cfg.dot, "write the tree as Graphviz DOT");
  solveCmd->add_option("--json", cfg.json, "write the tree as JSON");
  CLI::App* benchCmd = app.add_subcommand("bench", "candidate experiment counts per round");
  addGame(benchCmd);
  addStrategy(benchCmd);
  benchCmd->add_flag("--csv", cfg.csv, "comma separated output");
  CLI::App* playCmd = app.add_subcommand("play", "interactive assistant: propose experiments, read outcomes");
  addGame(playCmd);
  addStrategy(playCmd);
  CLI::App* simulateCmd = app.add_subcommand("simulate", "play the strategy against secret codes");
  addGame(simulateCmd);
  addStrategy(simulateCmd);
  simulateCmd->add_option("--secret", cfg.secret, "true variables of the secret, e.g. x4,y");
  simulateCmd->add_flag("--all", cfg.all, "every secret (the default)");
  simulateCmd->add_option("--sample", cfg.sample, "number of random secrets");
  simulateCmd->add_option("--seed", cfg.seed, "seed for --sample")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : COBRA_ERR_INPUT;
  }

  try {
    if (*checkCmd) return cmdCheck(cfg);
    if (*solveCmd) return cmdSolve(cfg);
    if (*benchCmd) return cmdBench(cfg);
    if (*playCmd) return cmdPlay(cfg);
    if (*simulateCmd) return cmdSimulate(cfg);
  } catch (const Failure& f) {
    return f.status == COBRA_ERR_INTERNAL ? COBRA_ERR_DOMAIN : f.status;
  }
  return 0;
}
