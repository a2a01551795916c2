#include <doctest.h>

#include <algorithm>
#include <random>

#include "cobra/satcore.hpp"
#include "oracles.hpp"

using namespace cobra;

namespace {

Formula v(VarId i) { return Formula::variable(i); }

// CCP-4: x1..x4 = 0..3, y = 4, coin i on position j is d($j) = x_i
const Formula kPhi0 = Formula::exactly(1, {v(0), v(1), v(2), v(3)});

Formula lessThan(VarId left, VarId right) { return (v(left) & !v(4)) | (v(right) & v(4)); }

}  // namespace

TEST_CASE("isSatisfiable") {
  CHECK(isSatisfiable(kPhi0, 5));
  CHECK_FALSE(isSatisfiable(v(0) & !v(0), 1));
  // t2 on all four coins: "=" says no coin differs
  const Formula eq = !v(0) & !v(1) & !v(2) & !v(3);
  CHECK_FALSE(isSatisfiable(kPhi0 & eq, 5));
}

TEST_CASE("countModels") {
  CHECK(countModels(kPhi0, 5) == 8);
  CHECK(countModels(kPhi0 & lessThan(0, 1), 5) == oracle::countByTable(kPhi0 & lessThan(0, 1), 5));
  CHECK(countModels(kPhi0 & lessThan(0, 1), 5) == 2);
  CHECK(countModels(Formula::constant(false), 3) == 0);
  CHECK(countModels(Formula::constant(true), 3) == 8);
}

TEST_CASE("countModels honours the cap") {
  CHECK_THROWS_AS(countModels(Formula::constant(true), 4, 15), ModelCapExceeded);
  CHECK_THROWS_AS(countModels(v(0) | v(1) | v(2), 3, 6), ModelCapExceeded);
  CHECK(countModels(v(0) | v(1) | v(2), 3, 7) == 7);
}

TEST_CASE("fixedVariables") {
  const Formula eq = !v(0) & !v(1);
  CHECK(fixedVariables(kPhi0 & eq, 5) == FixedSet{{0, false}, {1, false}});
  CHECK(fixedVariables(v(0) & v(1), 2) == FixedSet{{0, true}, {1, true}});
  CHECK(fixedVariables(kPhi0, 5).empty());
  CHECK(fixedVariables(v(0) & !v(0), 3).size() == 3);
}

TEST_CASE("removeFixed") {
  const Reduced r = removeFixed(v(0) & (v(0) | v(1)), 2);
  CHECK(r.residue == Formula::constant(true));
  CHECK(r.fixed == FixedSet{{0, true}});

  CHECK(removeFixed(kPhi0, 5).residue == canonicalize(kPhi0));
  CHECK(removeFixed(kPhi0, 5).fixed.empty());

  const Reduced c = removeFixed(Formula::exactly(1, {v(0), v(1)}) & !v(1), 2);
  CHECK(c.residue == Formula::constant(true));
  CHECK(c.fixed == FixedSet{{0, true}, {1, false}});
}

TEST_CASE("property: countModels agrees with truth tables") {
  std::mt19937 rng(3);
  for (int round = 0; round < 250; ++round) {
    const std::size_t n = 1 + rng() % 12;
    const Formula f = oracle::randomFormula(rng, n, 5);
    CHECK(countModels(f, n) == oracle::countByTable(f, n));
  }
}

TEST_CASE("property: fixedVariables agrees with truth tables and the flip characterisation") {
  std::mt19937 rng(5);
  for (int round = 0; round < 200; ++round) {
    const std::size_t n = 1 + rng() % 7;
    const Formula f = oracle::randomFormula(rng, n, 4);
    const FixedSet fixed = fixedVariables(f, n);
    const auto expected = oracle::fixedByTable(f, n);
    for (VarId x = 0; x < n; ++x) {
      const bool isFixed = expected[x] == 0 || expected[x] == 1;
      CHECK(static_cast<bool>(fixed.count(x)) == isFixed);
      if (isFixed && isSatisfiable(f, n)) {
        const bool b = fixed.at(x);
        CHECK(b == (expected[x] == 1));
        const Formula lit = b ? v(x) : !v(x);
        const Formula flip = b ? !v(x) : v(x);
        CHECK(isSatisfiable(f & lit, n));
        CHECK_FALSE(isSatisfiable(f & flip, n));
      }
    }
  }
}

TEST_CASE("property: removeFixed residue is in bijection with the models") {
  std::mt19937 rng(9);
  for (int round = 0; round < 200; ++round) {
    const std::size_t n = 1 + rng() % 7;
    const Formula f = oracle::randomFormula(rng, n, 4);
    if (!isSatisfiable(f, n)) continue;
    const Reduced r = removeFixed(f, n);
    const auto residueVars = variablesOf(r.residue);
    for (const auto& entry : r.fixed)
      CHECK(std::count(residueVars.begin(), residueVars.end(), entry.first) == 0);
    // each residue model over the free variables corresponds to one model of f
    const std::uint64_t residueCount = countModels(r.residue, n) >> r.fixed.size();
    CHECK(residueCount == countModels(f, n));
  }
}

TEST_CASE("ModelSpace mirrors the reference backend") {
  const ModelSpace space(kPhi0, 5);
  CHECK(space.size() == 8);
  const ModelSet lt = space.select(lessThan(0, 1));
  CHECK(lt.count() == 2);
  const ModelSet eq = space.select(!v(0) & !v(1));
  CHECK(space.fixed(eq) == fixedVariables(kPhi0 & !v(0) & !v(1), 5));
  CHECK(space.fixedCount(ModelSet(8)) == 5);
  for (std::size_t i = 0; i < space.size(); ++i) CHECK(space.indexOf(space.model(i)) == i);
}

TEST_CASE("ModelSet bit operations") {
  ModelSet a(130, true);
  CHECK(a.count() == 130);
  ModelSet b(130);
  b.set(0);
  b.set(64);
  b.set(129);
  CHECK((a & b).count() == 3);
  CHECK(b.first() == 0);
  CHECK(b.indices() == std::vector<std::uint32_t>{0, 64, 129});
  CHECK(ModelSet(10).empty());
}

TEST_CASE("bit-parallel evaluation agrees with per-model evaluation") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng() % 6;
    const auto constraint = oracle::randomFormula(rng, n, 2);
    if (!isSatisfiable(constraint, n)) continue;
    const ModelSpace space(constraint, n);
    const auto f = oracle::randomFormula(rng, n, 4);
    CHECK(space.evaluateAll(f) == space.select(f));
  }
}

TEST_CASE("model permutations") {
  std::vector<Formula> xs;
  for (VarId x = 0; x < 4; ++x) xs.push_back(Formula::variable(x));
  const ModelSpace space(Formula::exactly(1, xs), 4);
  const std::vector<VarId> swap{1, 0, 2, 3};
  const auto perm = space.modelPermutation(swap);
  REQUIRE(perm);
  const auto x0 = space.trueSet(0);
  CHECK(x0.permuted(*perm) == space.trueSet(1));
  const ModelSpace lopsided(Formula::variable(0), 2);
  const std::vector<VarId> swap2{1, 0};
  CHECK_FALSE(lopsided.modelPermutation(swap2).has_value());
  CHECK((x0 | space.trueSet(1)).count() == 2);
  CHECK(x0.complement().count() == 3);
}
