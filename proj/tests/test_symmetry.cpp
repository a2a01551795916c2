#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "cobra/dsl.hpp"
#include "cobra/symmetry.hpp"
#include "oracles.hpp"

using namespace cobra;

namespace {

ExperimentInstance inst(std::uint32_t t, std::vector<std::uint32_t> p) { return {t, std::move(p)}; }

oracle::SymmetryOracle::Codes toCodes(const GameContext& ctx, const oracle::SymmetryOracle& o, const ModelSet& s) {
  oracle::SymmetryOracle::Codes out(o.codes().size(), 0);
  s.forEach([&](std::size_t i) { out[o.indexOf(ctx.space().model(i))] = 1; });
  return out;
}

oracle::SymmetryOracle::Instance toOracle(const ExperimentInstance& e) { return {e.experiment, e.params}; }

// Initial knowledge and everything reachable in up to two observations.
std::vector<Knowledge> reachable(GameContext& ctx, std::size_t depth) {
  std::vector<Knowledge> out{ctx.initialKnowledge()};
  std::vector<Knowledge> frontier = out;
  const auto all = allInstances(ctx.game());
  for (std::size_t d = 0; d < depth; ++d) {
    std::vector<Knowledge> next;
    for (const auto& k : frontier)
      for (const auto& e : all)
        for (std::uint32_t o = 0; o < ctx.game().experiment(e.experiment).outcomes.size(); ++o) {
          auto u = ctx.update(k, e, o);
          if (!u.models.empty() && u.models != k.models) next.push_back(std::move(u));
        }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

std::vector<DeductiveGame> smallGames() {
  return {genCCP(3), genCCP(4), genMastermind(2, 2), genMastermind(2, 3)};
}

}  // namespace

TEST_CASE("mode names") {
  for (auto m : {SymmetryMode::None, SymmetryMode::Syntactic, SymmetryMode::Semantic})
    CHECK((parseSymmetryMode(toString(m)) == m));
  CHECK_FALSE(parseSymmetryMode("full"));
}

TEST_CASE("base graph of CCP-4") {
  const auto g = genCCP(4);
  const auto b = buildBaseGraph(g);
  REQUIRE(b.size() == 6);
  const std::uint32_t d = 5;
  const std::uint32_t y = 4;
  CHECK(b.label(d) == "d");
  CHECK(b.label(y) == "y");
  for (std::uint32_t x = 0; x < 4; ++x) {
    CHECK(b.label(x) == "var");
    CHECK(b.hasEdge(d, x));
    CHECK_FALSE(b.hasEdge(x, y));
  }
  CHECK(b.edgeCount() == 4);
}

TEST_CASE("base graph of Mastermind 2x2 and unused variables") {
  const auto g = genMastermind(2, 2);
  const auto b = buildBaseGraph(g);
  const auto& v = g.variables();
  const std::uint32_t peg1 = 4;
  const std::uint32_t peg2 = 5;
  CHECK(b.label(peg1) == "peg1");
  for (const char* c : {"A", "B"}) {
    const auto x1 = v.id(std::string("x1_") + c);
    const auto x2 = v.id(std::string("x2_") + c);
    CHECK(b.hasEdge(peg1, x1));
    CHECK(b.hasEdge(peg2, x2));
    CHECK_FALSE(b.hasEdge(peg1, x2));
    CHECK(b.hasEdge(x1, x2));
  }
  CHECK_FALSE(b.hasEdge(v.id("x1_A"), v.id("x2_B")));

  const auto r = parse({"VARS x1 x2 z\nCONSTRAINT exactly1(x1, x2)\nPARAMS a b\nATTR d { a -> x1 b -> x2 }\n"
                        "EXPERIMENT t(1) INSTANCES all\n OUTCOME d($1)\n OUTCOME !d($1)\n",
                        "z"});
  REQUIRE(r.ok());
  CHECK(buildBaseGraph(*r.game).label(2) == "var");
}

TEST_CASE("base automorphisms restrict to game symmetries") {
  const auto g = genCCP(4);
  const auto b = buildBaseGraph(g);
  std::vector<std::uint32_t> perm(b.size());
  std::iota(perm.begin(), perm.end(), 0u);
  const auto id = baseAutomorphismToSymmetry(g, b, perm);
  REQUIRE(id);
  for (VarId x = 0; x < g.varCount(); ++x) CHECK((*id)[x] == x);

  std::swap(perm[0], perm[1]);
  const auto swap = baseAutomorphismToSymmetry(g, b, perm);
  REQUIRE(swap);
  CHECK((*swap)[0] == 1);
  CHECK((*swap)[4] == 4);

  // every automorphism of the six-vertex graph fixes y
  std::iota(perm.begin(), perm.end(), 0u);
  std::size_t automorphisms = 0;
  do {
    if (auto pi = baseAutomorphismToSymmetry(g, b, perm)) {
      ++automorphisms;
      CHECK((*pi)[4] == 4);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  CHECK(automorphisms == 24);
  CHECK(automorphisms == oracle::bruteAutomorphismCount(b));
}

TEST_CASE("symmetry model classes") {
  {
    const auto g = genCCP(6);
    const ModelSpace space(g.initial(), g.varCount());
    const auto m = computeSymmetryModel(g, &space);
    CHECK(std::all_of(m.paramClass.begin(), m.paramClass.end(), [](auto c) { return c == 0; }));
    // t2 weighs coins 1,2 against 3,4
    CHECK(m.positionBlock[1] == std::vector<std::uint32_t>{0, 0, 2, 2});
  }
  for (auto variant : {MastermindVariant::Classic, MastermindVariant::Col, MastermindVariant::Pos}) {
    const auto g = genMastermind(3, 3, variant);
    const ModelSpace space(g.initial(), g.varCount());
    const auto m = computeSymmetryModel(g, &space);
    CHECK(m.attrClass == std::vector<std::uint32_t>{0, 0, 0});
    CHECK(m.paramClass == std::vector<std::uint32_t>{0, 0, 0});
    CHECK(computeSymmetryModel(g, nullptr).attrClass == std::vector<std::uint32_t>{0, 1, 2});
  }
  {
    // b is pinned by the constraint
    const auto r = parse({"VARS x1 x2 x3\nCONSTRAINT exactly1(x1, x2, x3) & !x2\nPARAMS a b c\n"
                          "ATTR d { a -> x1 b -> x2 c -> x3 }\n"
                          "EXPERIMENT t(1) INSTANCES all\n OUTCOME d($1)\n OUTCOME !d($1)\n",
                          "pin"});
    REQUIRE(r.ok());
    const ModelSpace space(r.game->initial(), r.game->varCount());
    CHECK(computeSymmetryModel(*r.game, &space).paramClass == std::vector<std::uint32_t>{0, 1, 0});
  }
}

TEST_CASE("swap permutations commute with instantiation") {
  for (const auto& g : {genCCP(5), genMastermind(3, 3), genMastermind(2, 3, MastermindVariant::Col)}) {
    const ModelSpace space(g.initial(), g.varCount());
    const auto m = computeSymmetryModel(g, &space);
    for (std::uint32_t a = 0; a < g.params().size(); ++a)
      for (std::uint32_t b = a + 1; b < g.params().size(); ++b) {
        if (m.paramClass[a] != m.paramClass[b]) continue;
        const auto pi = paramSwap(g, a, b);
        for (const auto& e : allInstances(g)) {
          if (e.params.empty()) continue;
          auto swapped = e;
          for (auto& p : swapped.params) p = p == a ? b : p == b ? a : p;
          const auto lhs = outcomes(g, e);
          const auto rhs = outcomes(g, swapped);
          for (std::size_t o = 0; o < lhs.size(); ++o)
            CHECK(canonicalize(applyPermutation(lhs[o], pi)) == canonicalize(rhs[o]));
        }
      }
  }
}

TEST_CASE("experiment graph keys for CCP-4") {
  const auto g = genCCP(4);
  for (auto mode : {SymmetryMode::Semantic, SymmetryMode::Syntactic}) {
    GameContext ctx(g, mode);
    const auto k = ctx.initialKnowledge();
    const auto key = [&](const ExperimentInstance& e) { return canonicalKey(buildExperimentGraph(ctx, k, e)); };
    CHECK(key(inst(0, {0, 1})) == key(inst(0, {2, 3})));
    CHECK(key(inst(0, {0, 1})) == key(inst(0, {1, 0})));
    CHECK(key(inst(0, {0, 1})) != key(inst(1, {0, 1, 2, 3})));
    CHECK(canonicalKey(buildExperimentGraph(ctx, g.initial(), inst(0, {0, 1}))) ==
          canonicalKey(buildExperimentGraph(ctx, g.initial(), inst(0, {3, 2}))));
  }
}

TEST_CASE("a fully determined formula leaves the acc root and value marks") {
  const auto g = genCCP(4);
  GameContext ctx(g, SymmetryMode::Syntactic);
  const auto& v = g.variables();
  const Formula phi = g.initial() & Formula::variable(v.id("x1")) & Formula::variable(v.id("y"));
  const auto graph = buildExperimentGraph(ctx, phi, inst(0, {0, 1}));
  // acc plus one constant per tree (the knowledge and three outcomes), and a mark per variable
  CHECK(graph.size() == ctx.symmetry().base.size() + 8 + 5);
  std::size_t acc = 0, marksT = 0, marksF = 0;
  for (std::uint32_t u = 0; u < graph.size(); ++u) {
    acc += graph.label(u) == "acc";
    marksT += graph.label(u) == "fixed:T";
    marksF += graph.label(u) == "fixed:F";
  }
  CHECK(acc == 1);
  CHECK(marksT == 2);
  CHECK(marksF == 3);
}

TEST_CASE("equivalence under the initial constraint of CCP-4") {
  const auto g = genCCP(4);
  GameContext ctx(g);
  const auto k = ctx.initialKnowledge();
  const auto e = inst(1, {0, 1, 2, 3});
  std::vector<std::uint32_t> p{0, 1, 2, 3};
  do CHECK(areEquivalent(ctx, k, e, inst(1, p)));
  while (std::next_permutation(p.begin(), p.end()));
  CHECK_FALSE(areEquivalent(ctx, k, inst(0, {0, 1}), e));
  CHECK(areEquivalent(ctx, k, e, e));
}

TEST_CASE("weighing two known-genuine coins differs from weighing two suspects") {
  // With coins 1 and 2 genuine, t1(coin1, coin2) always balances while
  // t2(coin3, coin1, coin2, coin4) never does, so no symmetry relates them.
  const auto g = genCCP(4);
  const oracle::SymmetryOracle o(g);
  const auto& v = g.variables();
  const Formula phi = g.initial() & !(Formula::variable(v.id("x1")) | Formula::variable(v.id("x2")));
  const auto e1 = inst(0, {0, 1});
  const auto e2 = inst(1, {2, 0, 1, 3});
  for (auto mode : {SymmetryMode::Semantic, SymmetryMode::Syntactic}) {
    GameContext ctx(g, mode);
    const Knowledge k{ctx.space().select(phi), {}};
    CHECK_FALSE(o.equivalent(toCodes(ctx, o, k.models), toOracle(e1), toOracle(e2)));
    CHECK_FALSE(areEquivalent(ctx, k, e1, e2));
    CHECK(canonicalKey(buildExperimentGraph(ctx, phi, e1)) != canonicalKey(buildExperimentGraph(ctx, phi, e2)));
    // t1(coin3, coin4) is the equivalent weighing
    CHECK(o.equivalent(toCodes(ctx, o, k.models), toOracle(inst(0, {2, 3})), toOracle(inst(1, {2, 0, 3, 1}))));
    CHECK(areEquivalent(ctx, ctx.update(ctx.initialKnowledge(), e1, 1), inst(0, {2, 3}), inst(1, {2, 0, 3, 1})));
  }
}

TEST_CASE("dominance examples") {
  const auto g = genCCP(4);
  const auto& v = g.variables();
  for (auto mode : {SymmetryMode::Semantic, SymmetryMode::Syntactic}) {
    GameContext ctx(g, mode);
    CHECK(isDominated(ctx, ctx.initialKnowledge(), 0, {}, 0, 1));
    const Knowledge k = ctx.update(ctx.initialKnowledge(), inst(0, {0, 1}), 1);
    REQUIRE(k.models == ctx.space().select(g.initial() & !(Formula::variable(v.id("x1")) |
                                                            Formula::variable(v.id("x2")))));
    CHECK(isDominated(ctx, k, 0, {}, 0, 1));
    CHECK_FALSE(isDominated(ctx, k, 0, {}, 0, 2));
    const std::vector<std::uint32_t> prefix{2};
    CHECK(isDominated(ctx, k, 0, prefix, 1, 2));  // repeat in a distinct tuple
  }
}

TEST_CASE("first-round representatives") {
  {
    const auto g = genCCP(4);
    GameContext ctx(g);
    const auto r = experimentsFor(ctx, ctx.initialKnowledge());
    CHECK(r.representatives == std::vector<ExperimentInstance>{inst(0, {0, 1}), inst(1, {0, 1, 2, 3})});
  }
  {
    const auto g = genCCP(26);
    GameContext ctx(g);
    const auto r = experimentsFor(ctx, ctx.initialKnowledge());
    CHECK(r.phase1.size() == 13);
    CHECK(r.representatives.size() == 13);
  }
  {
    const auto g = genMastermind(4, 6);
    GameContext ctx(g);
    const auto r = experimentsFor(ctx, ctx.initialKnowledge());
    std::vector<std::string> names;
    for (const auto& e : r.representatives) names.push_back(describe(g, e));
    CHECK(names == std::vector<std::string>{"guess(A, A, A, A)", "guess(A, A, A, B)", "guess(A, A, B, B)",
                                            "guess(A, A, B, C)", "guess(A, B, C, D)"});
  }
  {
    const auto g = genCCP(4);
    GameContext ctx(g, SymmetryMode::None);
    const auto r = experimentsFor(ctx, ctx.initialKnowledge());
    CHECK(r.representatives.size() == 12 + 24);
  }
}

TEST_CASE("representatives are sound and cover every experiment") {
  for (const auto& g : smallGames()) {
    const oracle::SymmetryOracle o(g);
    for (auto mode : {SymmetryMode::Semantic, SymmetryMode::Syntactic}) {
      GameContext ctx(g, mode);
      for (const auto& k : reachable(ctx, 2)) {
        const auto codes = toCodes(ctx, o, k.models);
        const auto r = experimentsFor(ctx, k);
        CHECK(std::is_sorted(r.representatives.begin(), r.representatives.end()));
        // every dropped phase-1 instance was merged into a truly equivalent representative
        for (const auto& e : r.phase1) {
          if (std::binary_search(r.representatives.begin(), r.representatives.end(), e)) continue;
          bool merged = false;
          for (const auto& rep : r.representatives)
            if (rep < e && areEquivalent(ctx, k, e, rep)) {
              merged = true;
              CHECK(o.equivalent(codes, toOracle(e), toOracle(rep)));
            }
          CHECK(merged);
        }
        for (const auto& e : o.instances()) {
          bool covered = false;
          for (const auto& rep : r.representatives)
            if (o.equivalent(codes, e, toOracle(rep))) {
              covered = true;
              break;
            }
          INFO(describe(g, {e.first, e.second}));
          CHECK(covered);
        }
      }
    }
  }
}

TEST_CASE("dominated continuations have smaller equivalent instances") {
  for (const auto& g : smallGames()) {
    const oracle::SymmetryOracle o(g);
    GameContext ctx(g);
    const auto all = allInstances(g);
    for (const auto& k : reachable(ctx, 1)) {
      const auto codes = toCodes(ctx, o, k.models);
      for (std::uint32_t t = 0; t < g.experiments().size(); ++t) {
        const auto arity = g.experiment(t).arity;
        for (const auto& e : all) {
          if (e.experiment != t) continue;
          for (std::uint32_t m = 0; m < arity; ++m) {
            const std::span<const std::uint32_t> prefix(e.params.data(), m);
            const auto b = e.params[m];
            for (std::uint32_t a = 0; a < b; ++a) {
              std::vector<std::uint32_t> ua(prefix.begin(), prefix.end());
              ua.push_back(a);
              if (!isFeasiblePrefix(g, t, ua) || !isDominated(ctx, k, t, prefix, a, b)) continue;
              bool found = false;
              for (const auto& other : all)
                if (other < e && o.equivalent(codes, toOracle(e), toOracle(other))) {
                  found = true;
                  break;
                }
              CHECK(found);
            }
          }
        }
      }
    }
  }
}
