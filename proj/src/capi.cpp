#include "cobra/cobra.h"

#include <cstdio>
#include <cstring>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "cobra/dsl.hpp"
#include "cobra/errors.hpp"
#include "cobra/synth.hpp"

using namespace cobra;

namespace {

thread_local std::string lastError;

// Generated games know how to name their codes in plain words.
enum class Family { Plain, Ccp, Mastermind };

struct GameData {
  DeductiveGame game;
  std::string origin;
  Family family = Family::Plain;
};

cobra_status fail(cobra_status s, std::string msg) {
  lastError = std::move(msg);
  return s;
}

template <class Fn>
cobra_status guarded(Fn&& fn) {
  try {
    lastError.clear();
    return fn();
  } catch (const NonTerminatingStrategy& e) {
    return fail(COBRA_ERR_LIMIT, e.what());
  } catch (const ModelCapExceeded& e) {
    return fail(COBRA_ERR_LIMIT, e.what());
  } catch (const DefinitionError& e) {
    return fail(COBRA_ERR_INPUT, e.what());
  } catch (const IllFormedGameError& e) {
    return fail(COBRA_ERR_DOMAIN, std::string("ill-formed game: ") + e.what());
  } catch (const MalformedTreeError& e) {
    return fail(COBRA_ERR_INTERNAL, e.what());
  } catch (const Error& e) {
    return fail(COBRA_ERR_DOMAIN, e.what());
  } catch (const std::bad_alloc&) {
    return fail(COBRA_ERR_LIMIT, "out of memory");
  } catch (const std::exception& e) {
    return fail(COBRA_ERR_INTERNAL, e.what());
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::optional<SymmetryMode> modeOf(const char* s) {
  if (!s) return SymmetryMode::Semantic;
  return parseSymmetryMode(s);
}

std::string codeName(const GameData& d, const Valuation& v) {
  const DeductiveGame& g = d.game;
  if (d.family == Family::Ccp) {
    const VarId y = g.variables().id("y");
    for (VarId x = 0; x < g.varCount(); ++x)
      if (x != y && v[x]) return "coin " + g.variables().name(x).substr(1) + (v[y] ? ", heavier" : ", lighter");
  }
  if (d.family == Family::Mastermind) {
    std::string out;
    for (std::uint32_t f = 0; f < g.attributes().size(); ++f)
      for (std::uint32_t a = 0; a < g.params().size(); ++a)
        if (v[g.image(f, a)]) out += (out.empty() ? "" : " ") + g.params()[a];
    return out;
  }
  std::string out;
  for (VarId x = 0; x < g.varCount(); ++x)
    if (v[x]) out += (out.empty() ? "" : ", ") + g.variables().name(x);
  return out.empty() ? "all variables false" : out;
}

cobra_status adopt(ParseResult parsed, const std::string& origin, cobra_game** out);

}  // namespace

struct cobra_game {
  std::shared_ptr<const GameData> data;
};

struct cobra_strategy {
  std::shared_ptr<const GameData> data;
  std::unique_ptr<GameContext> ctx;
  DecisionTree tree;
  ComplexityReport complexity;
  std::vector<RoundStats> rounds;
};

struct cobra_session {
  struct Step {
    std::uint32_t node;
    Knowledge knowledge;
  };
  cobra_strategy* strategy;
  std::vector<Step> steps;
  std::string proposal;

  const Step& top() const { return steps.back(); }
  bool solved() const { return top().knowledge.models.count() <= 1; }
  void refresh() {
    const TreeNode& n = strategy->tree.node(top().node);
    proposal = n.leaf ? std::string() : describe(strategy->data->game, n.experiment);
  }
};

namespace {

cobra_status adopt(ParseResult parsed, const std::string& origin, cobra_game** out) {
  if (!parsed.ok()) {
    std::string msg;
    for (const Diagnostic& d : parsed.diagnostics) msg += (msg.empty() ? "" : "\n") + format(d, origin);
    return fail(COBRA_ERR_INPUT, msg);
  }
  auto data = std::make_shared<GameData>(GameData{std::move(*parsed.game), origin, Family::Plain});
  *out = new cobra_game{std::move(data)};
  return COBRA_OK;
}

}  // namespace

extern "C" {

const char* cobra_version(void) { return "0.1.0"; }

const char* cobra_status_name(cobra_status s) {
  switch (s) {
    case COBRA_OK: return "ok";
    case COBRA_ERR_DOMAIN: return "domain error";
    case COBRA_ERR_INPUT: return "input error";
    case COBRA_ERR_LIMIT: return "limit reached";
    case COBRA_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* cobra_last_error(void) { return lastError.c_str(); }

void cobra_string_free(char* s) { std::free(s); }

cobra_status cobra_game_load(const char* path, cobra_game** out) {
  if (!path || !out) return fail(COBRA_ERR_INPUT, "null argument");
  return guarded([&] {
    GameSource src;
    try {
      src = loadGameFile(path);
    } catch (const Error& e) {
      return fail(COBRA_ERR_INPUT, e.what());
    }
    return adopt(parse(src), src.origin, out);
  });
}

cobra_status cobra_game_parse(const char* text, const char* origin, cobra_game** out) {
  if (!text || !out) return fail(COBRA_ERR_INPUT, "null argument");
  return guarded([&] {
    GameSource src{text, origin ? origin : "<text>"};
    return adopt(parse(src), src.origin, out);
  });
}

cobra_status cobra_game_generate(const char* spec, cobra_game** out) {
  if (!spec || !out) return fail(COBRA_ERR_INPUT, "null argument");
  return guarded([&] {
    const std::string s = spec;
    try {
      auto data = std::make_shared<GameData>(GameData{generateFromSpec(s), s, Family::Plain});
      if (s.rfind("ccp:", 0) == 0) data->family = Family::Ccp;
      if (s.rfind("mm:", 0) == 0) data->family = Family::Mastermind;
      *out = new cobra_game{std::move(data)};
      return COBRA_OK;
    } catch (const Error& e) {
      return fail(COBRA_ERR_INPUT, "bad generator spec '" + s + "': " + e.what());
    }
  });
}

void cobra_game_free(cobra_game* g) { delete g; }

cobra_status cobra_game_info_get(const cobra_game* g, cobra_game_info* out) {
  if (!g || !out) return fail(COBRA_ERR_INPUT, "null argument");
  const DeductiveGame& game = g->data->game;
  *out = {game.varCount(), game.params().size(), game.attributes().size(), game.experiments().size()};
  return COBRA_OK;
}

cobra_status cobra_game_serialize(const cobra_game* g, char** out) {
  if (!g || !out) return fail(COBRA_ERR_INPUT, "null argument");
  return guarded([&] {
    *out = dup(serialize(g->data->game));
    return COBRA_OK;
  });
}

cobra_status cobra_game_code_count(const cobra_game* g, size_t* out) {
  if (!g || !out) return fail(COBRA_ERR_INPUT, "null argument");
  return guarded([&] {
    *out = ModelSpace(g->data->game.initial(), g->data->game.varCount()).size();
    return COBRA_OK;
  });
}

cobra_status cobra_game_check(const cobra_game* g, const char* symmetry, char** report) {
  if (!g || !report) return fail(COBRA_ERR_INPUT, "null argument");
  const auto mode = modeOf(symmetry);
  if (!mode) return fail(COBRA_ERR_INPUT, std::string("unknown symmetry mode '") + symmetry + "'");
  *report = nullptr;
  return guarded([&] {
    const GameData& d = *g->data;
    GameContext ctx(d.game, *mode);
    const auto reps = experimentsFor(ctx, ctx.initialKnowledge()).representatives;
    const WellFormedReport r = checkWellFormed(d.game, reps);
    std::ostringstream os;
    if (r.ok) {
      os << "well-formed: " << ctx.space().size() << " codes, " << reps.size() << " representative experiments";
      *report = dup(os.str());
      return COBRA_OK;
    }
    const auto& t = d.game.experiment(r.experiment->experiment);
    os << "ill-formed: " << describe(d.game, *r.experiment) << " under code " << codeName(d, *r.witness);
    if (r.trueOutcomes.empty()) {
      os << " has no true outcome";
    } else {
      os << " has true outcomes";
      for (auto o : r.trueOutcomes) os << " \"" << t.outcomeName(o) << '"';
    }
    *report = dup(os.str());
    return fail(COBRA_ERR_DOMAIN, os.str());
  });
}

cobra_status cobra_solve(const cobra_game* g, const cobra_solve_options* opts, cobra_strategy** out) {
  if (!g || !out) return fail(COBRA_ERR_INPUT, "null argument");
  const std::string name = opts && opts->strategy ? opts->strategy : "max-models";
  const auto mode = modeOf(opts ? opts->symmetry : nullptr);
  if (!mode) return fail(COBRA_ERR_INPUT, std::string("unknown symmetry mode '") + opts->symmetry + "'");
  const auto ranking = parseRankingKind(name);
  if (!ranking && name != "optimal-worst" && name != "optimal-avg")
    return fail(COBRA_ERR_INPUT, "unknown strategy '" + name + "'");
  const std::size_t cap = opts && opts->depth_cap ? opts->depth_cap : 64;
  return guarded([&] {
    auto s = std::make_unique<cobra_strategy>();
    s->data = g->data;
    s->ctx = std::make_unique<GameContext>(s->data->game, *mode);
    const auto reps = experimentsFor(*s->ctx, s->ctx->initialKnowledge()).representatives;
    if (!checkWellFormed(s->data->game, reps).ok)
      return fail(COBRA_ERR_DOMAIN, "the game is ill-formed; run check for a witness");
    if (ranking) {
      RankingResult r = buildRankingTree(*s->ctx, *ranking, cap);
      s->tree = std::move(r.tree);
      s->rounds = std::move(r.rounds);
    } else {
      s->tree = buildOptimalTree(*s->ctx, name == "optimal-worst" ? OptimalMode::Worst : OptimalMode::Average);
    }
    s->complexity = evalComplexity(s->ctx->space(), s->data->game, s->tree);
    *out = s.release();
    return COBRA_OK;
  });
}

void cobra_strategy_free(cobra_strategy* s) { delete s; }

cobra_status cobra_strategy_complexity(const cobra_strategy* s, cobra_complexity* out) {
  if (!s || !out) return fail(COBRA_ERR_INPUT, "null argument");
  const ComplexityReport& c = s->complexity;
  *out = {};
  out->worst = c.worst;
  out->avg_num = c.avg.num();
  out->avg_den = c.avg.den();
  out->avg = c.avg.toDouble();
  std::snprintf(out->avg_decimal, sizeof out->avg_decimal, "%s", c.avg.toDecimal(5).c_str());
  std::snprintf(out->avg_exact, sizeof out->avg_exact, "%s", c.avg.toString().c_str());
  return COBRA_OK;
}

cobra_status cobra_strategy_tree_size(const cobra_strategy* s, size_t* out) {
  if (!s || !out) return fail(COBRA_ERR_INPUT, "null argument");
  *out = s->tree.size();
  return COBRA_OK;
}

cobra_status cobra_strategy_round_count(const cobra_strategy* s, size_t* out) {
  if (!s || !out) return fail(COBRA_ERR_INPUT, "null argument");
  *out = s->rounds.size();
  return COBRA_OK;
}

cobra_status cobra_strategy_round(const cobra_strategy* s, size_t round, cobra_round* out) {
  if (!s || !out) return fail(COBRA_ERR_INPUT, "null argument");
  if (round >= s->rounds.size()) return fail(COBRA_ERR_INPUT, "round out of range");
  const RoundStats& r = s->rounds[round];
  *out = {r.nodes, r.phase1Avg, r.phase2Avg};
  return COBRA_OK;
}

cobra_status cobra_strategy_dot(const cobra_strategy* s, char** out) {
  if (!s || !out) return fail(COBRA_ERR_INPUT, "null argument");
  return guarded([&] {
    *out = dup(s->tree.toDot(s->data->game));
    return COBRA_OK;
  });
}

cobra_status cobra_strategy_json(const cobra_strategy* s, char** out) {
  if (!s || !out) return fail(COBRA_ERR_INPUT, "null argument");
  return guarded([&] {
    *out = dup(s->tree.toJson(s->data->game));
    return COBRA_OK;
  });
}

cobra_status cobra_strategy_secret_count(const cobra_strategy* s, size_t* out) {
  if (!s || !out) return fail(COBRA_ERR_INPUT, "null argument");
  *out = s->ctx->space().size();
  return COBRA_OK;
}

cobra_status cobra_strategy_secret_name(const cobra_strategy* s, size_t secret, char** out) {
  if (!s || !out) return fail(COBRA_ERR_INPUT, "null argument");
  if (secret >= s->ctx->space().size()) return fail(COBRA_ERR_INPUT, "secret index out of range");
  return guarded([&] {
    *out = dup(codeName(*s->data, s->ctx->space().model(secret)));
    return COBRA_OK;
  });
}

cobra_status cobra_strategy_find_secret(const cobra_strategy* s, const char* text, size_t* out) {
  if (!s || !text || !out) return fail(COBRA_ERR_INPUT, "null argument");
  return guarded([&] {
    const DeductiveGame& g = s->data->game;
    Valuation v(g.varCount());
    std::string spec = text;
    for (char& c : spec)
      if (c == ',') c = ' ';
    std::istringstream in(spec);
    for (std::string name; in >> name;) {
      const auto x = g.variables().find(name);
      if (!x) return fail(COBRA_ERR_INPUT, "unknown variable '" + name + "'");
      v.set(*x, true);
    }
    const auto i = s->ctx->space().indexOf(v);
    if (!i) return fail(COBRA_ERR_INPUT, std::string("'") + text + "' is not a code of the game");
    *out = *i;
    return COBRA_OK;
  });
}

cobra_status cobra_strategy_simulate(const cobra_strategy* s, size_t secret, char** transcript, uint32_t* length) {
  if (!s) return fail(COBRA_ERR_INPUT, "null argument");
  if (secret >= s->ctx->space().size()) return fail(COBRA_ERR_INPUT, "secret index out of range");
  return guarded([&] {
    const DeductiveGame& g = s->data->game;
    const auto play = simulatePlay(g, s->tree, s->ctx->space().model(secret));
    if (transcript) {
      std::string text;
      for (const auto& ev : play) text += describe(g, ev.instance) + " -> " + describeOutcome(g, ev) + "\n";
      *transcript = dup(text);
    }
    if (length) *length = static_cast<uint32_t>(play.size());
    return COBRA_OK;
  });
}

cobra_status cobra_session_new(const cobra_strategy* s, cobra_session** out) {
  if (!s || !out) return fail(COBRA_ERR_INPUT, "null argument");
  return guarded([&] {
    auto p = std::make_unique<cobra_session>();
    p->strategy = const_cast<cobra_strategy*>(s);
    p->steps.push_back({s->tree.root(), s->ctx->initialKnowledge()});
    p->refresh();
    *out = p.release();
    return COBRA_OK;
  });
}

void cobra_session_free(cobra_session* p) { delete p; }

cobra_status cobra_session_state_get(const cobra_session* p, cobra_session_state* out) {
  if (!p || !out) return fail(COBRA_ERR_INPUT, "null argument");
  *out = {p->solved() ? 1 : 0, p->top().knowledge.models.count(), p->steps.size() - 1};
  return COBRA_OK;
}

cobra_status cobra_session_proposal(const cobra_session* p, const char** experiment, size_t* outcomes) {
  if (!p) return fail(COBRA_ERR_INPUT, "null argument");
  if (p->solved()) return fail(COBRA_ERR_DOMAIN, "the code is already known");
  const TreeNode& n = p->strategy->tree.node(p->top().node);
  if (experiment) *experiment = p->proposal.c_str();
  if (outcomes) *outcomes = p->strategy->data->game.experiment(n.experiment.experiment).outcomes.size();
  return COBRA_OK;
}

cobra_status cobra_session_outcome_name(const cobra_session* p, size_t outcome, const char** name) {
  if (!p || !name) return fail(COBRA_ERR_INPUT, "null argument");
  if (p->solved()) return fail(COBRA_ERR_DOMAIN, "the code is already known");
  const TreeNode& n = p->strategy->tree.node(p->top().node);
  const auto& t = p->strategy->data->game.experiment(n.experiment.experiment);
  if (outcome >= t.outcomes.size()) return fail(COBRA_ERR_INPUT, "outcome out of range");
  // Unlabeled outcomes get a generated name, kept alive by a per-thread buffer.
  thread_local std::string generated;
  if (!t.outcomes[outcome].label.empty()) {
    *name = t.outcomes[outcome].label.c_str();
  } else {
    generated = t.outcomeName(outcome);
    *name = generated.c_str();
  }
  return COBRA_OK;
}

cobra_status cobra_session_answer(cobra_session* p, const char* answer) {
  if (!p || !answer) return fail(COBRA_ERR_INPUT, "null argument");
  if (p->solved()) return fail(COBRA_ERR_DOMAIN, "the code is already known");
  return guarded([&] {
    cobra_strategy& s = *p->strategy;
    const TreeNode& n = s.tree.node(p->top().node);
    const auto& t = s.data->game.experiment(n.experiment.experiment);
    const std::string text = answer;
    std::optional<std::uint32_t> outcome;
    for (std::uint32_t o = 0; o < t.outcomes.size() && !outcome; ++o)
      if (t.outcomeName(o) == text) outcome = o;
    if (!outcome && !text.empty() && text.find_first_not_of("0123456789") == std::string::npos && text.size() < 9) {
      const auto i = static_cast<std::uint32_t>(std::stoul(text));
      if (i < t.outcomes.size()) outcome = i;
    }
    if (!outcome) return fail(COBRA_ERR_INPUT, "unknown outcome '" + text + "'");
    Knowledge next = s.ctx->update(p->top().knowledge, n.experiment, *outcome);
    if (next.models.empty()) return fail(COBRA_ERR_DOMAIN, "inconsistent with previous answers");
    const auto child = s.tree.child(p->top().node, *outcome);
    if (!child) return fail(COBRA_ERR_INTERNAL, "the strategy has no branch for this outcome");
    p->steps.push_back({*child, std::move(next)});
    p->refresh();
    return COBRA_OK;
  });
}

cobra_status cobra_session_undo(cobra_session* p) {
  if (!p) return fail(COBRA_ERR_INPUT, "null argument");
  if (p->steps.size() == 1) return fail(COBRA_ERR_DOMAIN, "nothing to undo");
  p->steps.pop_back();
  p->refresh();
  return COBRA_OK;
}

cobra_status cobra_session_secret(const cobra_session* p, char** out) {
  if (!p || !out) return fail(COBRA_ERR_INPUT, "null argument");
  if (!p->solved()) return fail(COBRA_ERR_DOMAIN, "the code is not known yet");
  return guarded([&] {
    const ModelSet& m = p->top().knowledge.models;
    *out = dup(codeName(*p->strategy->data, p->strategy->ctx->space().model(m.first())));
    return COBRA_OK;
  });
}

}  // extern "C"
