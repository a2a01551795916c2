#pragma once
// Independent reference computations used as test oracles. They only rely on
// plain evaluation, never on the solver, symmetry or search code under test.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "cobra/formula.hpp"

namespace oracle {

inline cobra::Valuation valuationFromMask(std::uint64_t mask, std::size_t n) {
  cobra::Valuation v(n);
  for (std::size_t i = 0; i < n; ++i) v.set(static_cast<cobra::VarId>(i), (mask >> i) & 1u);
  return v;
}

// Truth table of f over n variables, one bit per valuation mask.
inline std::vector<bool> truthTable(const cobra::Formula& f, std::size_t n) {
  std::vector<bool> out(std::size_t{1} << n);
  for (std::uint64_t m = 0; m < out.size(); ++m) out[m] = cobra::evaluate(f, valuationFromMask(m, n));
  return out;
}

inline std::uint64_t countByTable(const cobra::Formula& f, std::size_t n) {
  std::uint64_t c = 0;
  for (bool b : truthTable(f, n)) c += b;
  return c;
}

// Variables with the same value in all models; every variable when unsatisfiable.
inline std::vector<int> fixedByTable(const cobra::Formula& f, std::size_t n) {
  std::vector<int> state(n, -1);  // -1 unseen, 0/1 fixed value, 2 varies
  bool any = false;
  const auto table = truthTable(f, n);
  for (std::uint64_t m = 0; m < table.size(); ++m) {
    if (!table[m]) continue;
    any = true;
    for (std::size_t i = 0; i < n; ++i) {
      const int bit = (m >> i) & 1u;
      if (state[i] == -1) state[i] = bit;
      else if (state[i] != bit) state[i] = 2;
    }
  }
  if (!any) return std::vector<int>(n, 0);
  return state;
}

// Random formula over n variables with the given depth budget.
inline cobra::Formula randomFormula(std::mt19937& rng, std::size_t n, int depth) {
  using cobra::Formula;
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 7);
  const int kind = pick(rng);
  auto var = [&] { return Formula::variable(std::uniform_int_distribution<cobra::VarId>(0, n - 1)(rng)); };
  switch (kind) {
    case 0:
    case 1:
      return var();
    case 2:
      return Formula::negation(randomFormula(rng, n, depth - 1));
    case 3:
    case 4:
    case 5: {
      const int width = std::uniform_int_distribution<int>(2, 3)(rng);
      std::vector<Formula> kids;
      for (int i = 0; i < width; ++i) kids.push_back(randomFormula(rng, n, depth - 1));
      return kind == 5 ? Formula::disjunction(kids) : (kind == 4 ? Formula::conjunction(kids) : Formula::disjunction(kids));
    }
    case 6: {
      const int width = std::uniform_int_distribution<int>(1, 4)(rng);
      std::vector<Formula> kids;
      for (int i = 0; i < width; ++i) kids.push_back(randomFormula(rng, n, depth - 1));
      const auto k = std::uniform_int_distribution<std::uint32_t>(0, width)(rng);
      return Formula::exactly(k, kids);
    }
    default:
      return std::uniform_int_distribution<int>(0, 9)(rng) == 0 ? Formula::constant(rng() & 1u) : var();
  }
}

}  // namespace oracle

#include <algorithm>
#include <map>
#include <string>
#include <utility>

#include "cobra/game.hpp"

namespace oracle {

// Black and white marker counts by the standard Mastermind rule.
inline std::pair<int, int> markers(const std::vector<int>& secret, const std::vector<int>& guess) {
  int black = 0;
  std::map<int, int> s;
  std::map<int, int> g;
  for (std::size_t i = 0; i < secret.size(); ++i) {
    if (secret[i] == guess[i]) ++black;
    ++s[secret[i]];
    ++g[guess[i]];
  }
  int total = 0;
  for (auto [color, count] : s) total += std::min(count, g[color]);
  return {black, total - black};
}

// Decodes a Mastermind valuation through the variable names "x<peg>_<color>".
inline std::vector<int> decodeMastermind(const cobra::DeductiveGame& g, const cobra::Valuation& v) {
  const std::size_t pegs = g.attributes().size();
  std::vector<int> code(pegs, -1);
  for (cobra::VarId x = 0; x < v.size(); ++x) {
    if (!v[x]) continue;
    const std::string& name = g.variables().name(x);
    const auto us = name.find('_');
    const int peg = std::stoi(name.substr(1, us - 1)) - 1;
    const auto color = g.findParam(name.substr(us + 1));
    code[peg] = static_cast<int>(*color);
  }
  return code;
}

// All models of the initial constraint by truth table (small games only).
inline std::vector<cobra::Valuation> codesByTable(const cobra::DeductiveGame& g) {
  std::vector<cobra::Valuation> out;
  const std::size_t n = g.varCount();
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    auto v = valuationFromMask(m, n);
    if (cobra::evaluate(g.initial(), v)) out.push_back(std::move(v));
  }
  return out;
}

// The four faithfulness conditions checked literally over an explicit instance set.
inline bool faithfulByEnumeration(const cobra::DeductiveGame& g, std::uint32_t t) {
  const auto& exp = g.experiment(t);
  const auto inst = cobra::allInstances(g, t);
  std::vector<std::vector<std::uint32_t>> P;
  for (const auto& e : inst) P.push_back(e.params);
  auto inP = [&](const std::vector<std::uint32_t>& p) { return std::find(P.begin(), P.end(), p) != P.end(); };
  // X_t
  for (std::uint32_t i = 0; i < exp.arity; ++i)
    for (auto f : exp.positionAttributes[i])
      for (const auto& p : P)
        for (const auto& o : exp.outcomes)
          for (cobra::VarId x : cobra::variablesOf(o.formula))
            if (x == g.image(f, p[i])) return false;
  const auto k = exp.arity;
  for (const auto& p : P)
    for (std::uint32_t i = 0; i < k; ++i) {
      for (std::uint32_t j = 0; j < k; ++j) {
        if (i == j || !exp.compatible[i][j]) continue;
        if (p[i] == p[j]) return false;
        auto q = p;
        std::swap(q[i], q[j]);
        if (!inP(q)) return false;
      }
      for (std::uint32_t b = 0; b < g.params().size(); ++b) {
        bool clash = false;
        for (std::uint32_t j = 0; j < k; ++j)
          if (j != i && exp.compatible[i][j] && p[j] == b) clash = true;
        if (clash) continue;
        auto q = p;
        q[i] = b;
        if (!inP(q)) return false;
      }
    }
  return true;
}

}  // namespace oracle

#include "cobra/graph.hpp"

namespace oracle {

// Canonical form by trying every vertex permutation; graphs of at most 8 vertices.
inline std::pair<std::vector<std::string>, std::vector<std::pair<std::uint32_t, std::uint32_t>>> bruteCanonical(
    const cobra::LabeledGraph& g) {
  const auto n = static_cast<std::uint32_t>(g.size());
  std::vector<std::uint32_t> perm(n);
  for (std::uint32_t i = 0; i < n; ++i) perm[i] = i;
  std::pair<std::vector<std::string>, std::vector<std::pair<std::uint32_t, std::uint32_t>>> best;
  bool have = false;
  do {
    std::vector<std::string> labels(n);
    for (std::uint32_t v = 0; v < n; ++v) labels[perm[v]] = g.label(v);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t v = 0; v < n; ++v)
      for (auto u : g.neighbors(v))
        if (v < u) edges.emplace_back(std::min(perm[v], perm[u]), std::max(perm[v], perm[u]));
    std::sort(edges.begin(), edges.end());
    auto cand = std::make_pair(std::move(labels), std::move(edges));
    if (!have || cand < best) best = std::move(cand);
    have = true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline std::size_t bruteAutomorphismCount(const cobra::LabeledGraph& g) {
  const auto n = static_cast<std::uint32_t>(g.size());
  std::vector<std::uint32_t> perm(n);
  for (std::uint32_t i = 0; i < n; ++i) perm[i] = i;
  std::size_t count = 0;
  do count += g.isAutomorphism(perm);
  while (std::next_permutation(perm.begin(), perm.end()));
  return count;
}

}  // namespace oracle

#include <set>

namespace oracle {

// Experiment equivalence decided from the definition: the symmetry group is found
// by trying every variable permutation, outcome formulas are compared by their
// sets of codes. Only for games with a handful of variables.
class SymmetryOracle {
 public:
  using Codes = std::vector<char>;  // membership over codes()
  using Instance = std::pair<std::uint32_t, std::vector<std::uint32_t>>;

  explicit SymmetryOracle(const cobra::DeductiveGame& g) : g_(g), codes_(codesByTable(g)) {
    for (std::size_t i = 0; i < codes_.size(); ++i) index_[codes_[i]] = i;
    for (std::uint32_t t = 0; t < g.experiments().size(); ++t) enumerate(t, {});
    for (const auto& e : instances_) families_.push_back(family(e));
    const std::set<std::vector<Codes>> known(families_.begin(), families_.end());
    std::vector<cobra::VarId> perm(g.varCount());
    for (std::uint32_t i = 0; i < perm.size(); ++i) perm[i] = i;
    do {
      auto onCodes = codePermutation(perm);
      if (!onCodes) continue;
      bool ok = true;
      for (std::size_t e = 0; e < instances_.size() && ok; ++e)
        ok = known.count(mapFamily(families_[e], *onCodes)) > 0;
      if (ok) group_.push_back(*onCodes);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }

  const std::vector<cobra::Valuation>& codes() const { return codes_; }
  std::size_t indexOf(const cobra::Valuation& v) const { return index_.at(v); }
  const std::vector<Instance>& instances() const { return instances_; }
  std::size_t groupSize() const { return group_.size(); }

  bool equivalent(const Codes& k, const Instance& e1, const Instance& e2) const {
    const auto left = restrict(family(e1), k);
    const auto right = restrict(family(e2), k);
    for (const auto& pi : group_) {
      // π(φ ∧ ϱ) for ϱ ∈ Φ(e2), compared with φ ∧ ψ for ψ ∈ Φ(e1)
      if (mapFamily(right, pi) == left) return true;
    }
    return false;
  }

 private:
  void enumerate(std::uint32_t t, std::vector<std::uint32_t> prefix) {
    const auto& exp = g_.experiment(t);
    if (prefix.size() == exp.arity) {
      instances_.push_back({t, prefix});
      return;
    }
    for (std::uint32_t a = 0; a < g_.params().size(); ++a) {
      if (exp.kind == cobra::InstanceKind::DistinctTuples &&
          std::find(prefix.begin(), prefix.end(), a) != prefix.end())
        continue;
      auto next = prefix;
      next.push_back(a);
      enumerate(t, next);
    }
  }

  std::vector<Codes> family(const Instance& e) const {
    std::vector<Codes> out;
    const cobra::ExperimentInstance inst{e.first, e.second};
    for (std::uint32_t o = 0; o < g_.experiment(e.first).outcomes.size(); ++o) {
      Codes c(codes_.size(), 0);
      for (std::size_t i = 0; i < codes_.size(); ++i) c[i] = cobra::outcomeHolds(g_, inst, o, codes_[i]) ? 1 : 0;
      out.push_back(c);
    }
    return normalize(out);
  }

  static std::vector<Codes> normalize(std::vector<Codes> f) {
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
    return f;
  }

  static std::vector<Codes> restrict(std::vector<Codes> f, const Codes& k) {
    for (auto& c : f)
      for (std::size_t i = 0; i < c.size(); ++i) c[i] = c[i] && k[i];
    return normalize(f);
  }

  static std::vector<Codes> mapFamily(const std::vector<Codes>& f, const std::vector<std::size_t>& pi) {
    std::vector<Codes> out;
    for (const auto& c : f) {
      Codes m(c.size(), 0);
      for (std::size_t i = 0; i < c.size(); ++i) m[pi[i]] = c[i];
      out.push_back(m);
    }
    return normalize(out);
  }

  std::optional<std::vector<std::size_t>> codePermutation(const std::vector<cobra::VarId>& perm) const {
    std::vector<std::size_t> out(codes_.size());
    for (std::size_t i = 0; i < codes_.size(); ++i) {
      cobra::Valuation image(codes_[i].size());
      for (cobra::VarId x = 0; x < perm.size(); ++x) image.set(perm[x], codes_[i][x]);
      auto it = index_.find(image);
      if (it == index_.end()) return std::nullopt;
      out[i] = it->second;
    }
    return out;
  }

  const cobra::DeductiveGame& g_;
  std::vector<cobra::Valuation> codes_;
  std::map<cobra::Valuation, std::size_t> index_;
  std::vector<Instance> instances_;
  std::vector<std::vector<Codes>> families_;
  std::vector<std::vector<std::size_t>> group_;
};

}  // namespace oracle

namespace oracle {

// Exhaustive minimax over every instance of every experiment, without memoization
// or symmetry. Codes are indices into codesByTable(g).
class BruteForceMinimax {
 public:
  explicit BruteForceMinimax(const cobra::DeductiveGame& g) : codes_(codesByTable(g)) {
    for (std::uint32_t t = 0; t < g.experiments().size(); ++t) enumerate(g, t, {});
  }

  std::size_t codeCount() const { return codes_.size(); }

  std::uint64_t worst(const std::vector<std::size_t>& s) const {
    if (s.size() <= 1) return 0;
    std::uint64_t best = ~std::uint64_t{0};
    for (const auto& table : tables_) {
      const auto parts = split(table, s);
      if (parts.size() < 2) continue;
      std::uint64_t val = 0;
      for (const auto& p : parts) val = std::max(val, 1 + worst(p));
      best = std::min(best, val);
    }
    return best;
  }

  // Sum of play lengths over the codes in s.
  std::uint64_t total(const std::vector<std::size_t>& s) const {
    if (s.size() <= 1) return 0;
    std::uint64_t best = ~std::uint64_t{0};
    for (const auto& table : tables_) {
      const auto parts = split(table, s);
      if (parts.size() < 2) continue;
      std::uint64_t val = s.size();
      for (const auto& p : parts) val += total(p);
      best = std::min(best, val);
    }
    return best;
  }

  std::vector<std::size_t> all() const {
    std::vector<std::size_t> s(codes_.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = i;
    return s;
  }

 private:
  void enumerate(const cobra::DeductiveGame& g, std::uint32_t t, std::vector<std::uint32_t> prefix) {
    const auto& exp = g.experiment(t);
    if (prefix.size() == exp.arity) {
      // outcome of the instance for every code, by direct evaluation
      std::vector<std::uint32_t> table;
      for (const auto& v : codes_) {
        for (std::uint32_t o = 0; o < exp.outcomes.size(); ++o)
          if (cobra::outcomeHolds(g, {t, prefix}, o, v)) {
            table.push_back(o);
            break;
          }
      }
      tables_.push_back(table);
      return;
    }
    for (std::uint32_t a = 0; a < g.params().size(); ++a) {
      if (exp.kind == cobra::InstanceKind::DistinctTuples &&
          std::find(prefix.begin(), prefix.end(), a) != prefix.end())
        continue;
      auto next = prefix;
      next.push_back(a);
      enumerate(g, t, next);
    }
  }

  static std::vector<std::vector<std::size_t>> split(const std::vector<std::uint32_t>& table,
                                                     const std::vector<std::size_t>& s) {
    std::map<std::uint32_t, std::vector<std::size_t>> parts;
    for (auto i : s) parts[table[i]].push_back(i);
    std::vector<std::vector<std::size_t>> out;
    for (auto& [o, p] : parts) out.push_back(std::move(p));
    return out;
  }

  std::vector<cobra::Valuation> codes_;
  std::vector<std::vector<std::uint32_t>> tables_;
};

}  // namespace oracle
