#include "cobra/symmetry.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace cobra {

std::string toString(SymmetryMode m) {
  switch (m) {
    case SymmetryMode::None:
      return "none";
    case SymmetryMode::Syntactic:
      return "syntactic";
    case SymmetryMode::Semantic:
      return "semantic";
  }
  return "semantic";
}

std::optional<SymmetryMode> parseSymmetryMode(std::string_view s) {
  if (s == "none") return SymmetryMode::None;
  if (s == "syntactic") return SymmetryMode::Syntactic;
  if (s == "semantic") return SymmetryMode::Semantic;
  return std::nullopt;
}

std::vector<VarId> paramSwap(const DeductiveGame& g, std::uint32_t a, std::uint32_t b) {
  std::vector<VarId> perm(g.varCount());
  std::iota(perm.begin(), perm.end(), 0);
  for (const auto& f : g.attributes()) {
    perm[f.image[a]] = f.image[b];
    perm[f.image[b]] = f.image[a];
  }
  return perm;
}

namespace {

struct UnionFind {
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  // The smaller root wins so that class ids are least members.
  void join(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }
  std::vector<std::uint32_t> classes() {
    std::vector<std::uint32_t> out(parent.size());
    for (std::uint32_t i = 0; i < out.size(); ++i) out[i] = find(i);
    return out;
  }
  std::vector<std::uint32_t> parent;
};

std::vector<Formula> templateSet(const ParameterizedExperiment& t,
                                 const std::function<Formula(const Formula&)>& map) {
  std::vector<Formula> out;
  for (const auto& o : t.outcomes) out.push_back(canonicalize(map(o.formula)));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Formula> templateSet(const ParameterizedExperiment& t) {
  return templateSet(t, [](const Formula& f) { return f; });
}

bool movesRaw(const ParameterizedExperiment& t, std::span<const VarId> perm) {
  for (const auto& o : t.outcomes)
    for (VarId x : variablesOf(o.formula))
      if (perm[x] != x) return true;
  return false;
}

// Nonempty outcome model sets of (t, params), sorted; the semantic content of an instance.
using Family = std::vector<ModelSet>;

bool setLess(const ModelSet& a, const ModelSet& b) { return a.words() < b.words(); }

Family sortedFamily(Family f) {
  std::erase_if(f, [](const ModelSet& s) { return s.empty(); });
  std::sort(f.begin(), f.end(), setLess);
  return f;
}

Family familyOf(const DeductiveGame& g, const ModelSpace& space, std::uint32_t t,
                std::span<const std::uint32_t> params) {
  Family out;
  for (const auto& o : g.experiment(t).outcomes)
    out.push_back(space.evaluateAll(
        o.formula, [&](std::uint32_t f, std::uint32_t pos) { return g.image(f, params[pos - 1]); }));
  return sortedFamily(std::move(out));
}

Family permutedFamily(const Family& f, std::span<const std::uint32_t> modelPerm) {
  Family out;
  for (const auto& s : f) out.push_back(s.permuted(modelPerm));
  return sortedFamily(std::move(out));
}

bool paramTranspositionIsSymmetry(const DeductiveGame& g, const ModelSpace* space, std::uint32_t a,
                                  std::uint32_t b) {
  const auto perm = paramSwap(g, a, b);
  const Formula phi0 = canonicalize(g.initial());
  if (canonicalize(applyPermutation(phi0, perm)) != phi0 && !(space && space->modelPermutation(perm)))
    return false;
  for (const auto& t : g.experiments()) {
    if (!movesRaw(t, perm)) continue;
    const auto mapped = templateSet(t, [&](const Formula& f) { return applyPermutation(f, perm); });
    if (mapped != templateSet(t)) return false;
  }
  return true;
}

// Tuples of t up to the given parameter classes: every class is used in order of
// its least members.
std::optional<std::vector<std::vector<std::uint32_t>>> representativeTuples(
    const DeductiveGame& g, std::uint32_t t, const std::vector<std::uint32_t>& paramClass, std::size_t limit) {
  const auto& exp = g.experiment(t);
  const std::size_t np = g.params().size();
  std::map<std::uint32_t, std::vector<std::uint32_t>> members;
  for (std::uint32_t a = 0; a < np; ++a) members[paramClass[a]].push_back(a);
  std::map<std::uint32_t, std::size_t> usedCount;
  std::vector<char> used(np, 0);
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::uint32_t> tuple;
  bool overflow = false;
  std::function<void()> rec = [&]() {
    if (overflow) return;
    if (tuple.size() == exp.arity) {
      out.push_back(tuple);
      if (out.size() > limit) overflow = true;
      return;
    }
    for (std::uint32_t a = 0; a < np; ++a) {
      if (used[a]) {
        if (exp.kind == InstanceKind::DistinctTuples) continue;
        tuple.push_back(a);
        rec();
        tuple.pop_back();
        continue;
      }
      const auto c = paramClass[a];
      if (members[c][usedCount[c]] != a) continue;
      used[a] = 1;
      ++usedCount[c];
      tuple.push_back(a);
      rec();
      tuple.pop_back();
      --usedCount[c];
      used[a] = 0;
    }
  };
  rec();
  if (overflow) return std::nullopt;
  return out;
}

// Swapping attributes f and h is a game symmetry when φ0 is preserved and every
// instance maps, modulo φ0, onto an instance of an experiment of the same shape
// with permuted positions.
bool attrTranspositionIsSymmetry(const DeductiveGame& g, const ModelSpace& space,
                                 const std::vector<std::uint32_t>& paramClass, std::uint32_t f, std::uint32_t h) {
  std::vector<VarId> perm(g.varCount());
  std::iota(perm.begin(), perm.end(), 0);
  for (std::uint32_t a = 0; a < g.params().size(); ++a) {
    perm[g.image(f, a)] = g.image(h, a);
    perm[g.image(h, a)] = g.image(f, a);
  }
  const auto mp = space.modelPermutation(perm);
  if (!mp) return false;
  const auto& exps = g.experiments();
  for (std::uint32_t t = 0; t < exps.size(); ++t) {
    const auto& et = exps[t];
    if (et.arity == 0) {
      const Family mine = permutedFamily(familyOf(g, space, t, {}), *mp);
      bool found = false;
      for (std::uint32_t u = 0; u < exps.size() && !found; ++u)
        found = exps[u].arity == 0 && familyOf(g, space, u, {}) == mine;
      if (!found) return false;
      continue;
    }
    if (movesRaw(et, perm) || et.arity > 7) return false;
    const auto reps = representativeTuples(g, t, paramClass, 4096);
    if (!reps) return false;
    std::vector<Family> images;
    for (const auto& p : *reps) images.push_back(permutedFamily(familyOf(g, space, t, p), *mp));
    bool found = false;
    for (std::uint32_t u = 0; u < exps.size() && !found; ++u) {
      const auto& eu = exps[u];
      if (eu.arity != et.arity || eu.kind != et.kind) continue;
      std::vector<std::uint32_t> tau(et.arity);
      std::iota(tau.begin(), tau.end(), 0);
      do {
        bool all = true;
        std::vector<std::uint32_t> q(et.arity);
        for (std::size_t r = 0; r < reps->size() && all; ++r) {
          for (std::uint32_t i = 0; i < et.arity; ++i) q[tau[i]] = (*reps)[r][i];
          all = familyOf(g, space, u, q) == images[r];
        }
        found = all;
      } while (!found && std::next_permutation(tau.begin(), tau.end()));
    }
    if (!found) return false;
  }
  return true;
}

std::vector<std::uint32_t> positionBlocks(const ParameterizedExperiment& t) {
  UnionFind uf(t.arity);
  const auto base = templateSet(t);
  for (std::uint32_t j = 1; j < t.arity; ++j) {
    for (std::uint32_t i = 0; i < j; ++i) {
      if (uf.find(i) != i) continue;
      const auto swapped = templateSet(t, [&](const Formula& f) {
        return instantiate(f, [&](std::uint32_t attr, std::uint32_t pos) {
          const std::uint32_t p = pos - 1;
          return Formula::atom(attr, (p == i ? j : p == j ? i : p) + 1);
        });
      });
      if (swapped == base) {
        uf.join(i, j);
        break;
      }
    }
  }
  return uf.classes();
}

}  // namespace

SymmetryModel computeSymmetryModel(const DeductiveGame& g, const ModelSpace* space) {
  SymmetryModel m;
  m.varCount = g.varCount();
  m.attrCount = g.attributes().size();
  const auto np = static_cast<std::uint32_t>(g.params().size());
  const auto nf = static_cast<std::uint32_t>(m.attrCount);

  UnionFind params(np);
  for (std::uint32_t b = 1; b < np; ++b)
    for (std::uint32_t a = 0; a < b; ++a)
      if (params.find(a) == a && paramTranspositionIsSymmetry(g, space, a, b)) {
        params.join(a, b);
        break;
      }
  m.paramClass = params.classes();

  UnionFind attrs(nf);
  if (space)
    for (std::uint32_t h = 1; h < nf; ++h)
      for (std::uint32_t f = 0; f < h; ++f)
        if (attrs.find(f) == f && attrTranspositionIsSymmetry(g, *space, m.paramClass, f, h)) {
          attrs.join(f, h);
          break;
        }
  m.attrClass = attrs.classes();

  for (const auto& t : g.experiments()) m.positionBlock.push_back(positionBlocks(t));

  // Variables in attribute images get one shared label and edges to their
  // attribute and parameter; the others are pinned unless they occur nowhere.
  std::vector<char> mentioned(g.varCount(), 0);
  for (VarId x : variablesOf(g.initial())) mentioned[x] = 1;
  for (VarId x = 0; x < g.varCount(); ++x)
    if (g.rawInOutcomes()[x]) mentioned[x] = 1;
  for (VarId x = 0; x < g.varCount(); ++x) {
    if (g.owner(x))
      m.base.addVertex("x");
    else
      m.base.addVertex(mentioned[x] ? "raw:" + g.variables().name(x) : "var");
  }
  for (std::uint32_t f = 0; f < nf; ++f) m.base.addVertex("attr:" + std::to_string(m.attrClass[f]));
  for (std::uint32_t a = 0; a < np; ++a) m.base.addVertex("param:" + std::to_string(m.paramClass[a]));
  for (std::uint32_t f = 0; f < nf; ++f)
    for (std::uint32_t a = 0; a < np; ++a) {
      m.base.addEdge(g.image(f, a), m.attrVertex(f));
      m.base.addEdge(g.image(f, a), m.paramVertex(a));
    }
  return m;
}

LabeledGraph buildBaseGraph(const DeductiveGame& g) {
  LabeledGraph b;
  for (VarId x = 0; x < g.varCount(); ++x) b.addVertex(g.rawInOutcomes()[x] ? g.variables().name(x) : "var");
  const auto nf = static_cast<std::uint32_t>(g.attributes().size());
  for (std::uint32_t f = 0; f < nf; ++f) b.addVertex(g.attributeNames()[f]);
  for (std::uint32_t f = 0; f < nf; ++f)
    for (VarId x : g.attributes()[f].image) b.addEdge(static_cast<std::uint32_t>(g.varCount() + f), x);
  // x = f(a), y = h(a) are joined when f($i) and h($i) share an outcome
  for (const auto& t : g.experiments())
    for (const auto& o : t.outcomes) {
      std::map<std::uint32_t, std::set<std::uint32_t>> atPosition;
      std::function<void(const Formula&)> walk = [&](const Formula& f) {
        if (f.op() == Op::Atom) atPosition[f.position()].insert(f.attribute());
        for (const auto& c : f.children()) walk(c);
      };
      walk(o.formula);
      for (const auto& [pos, used] : atPosition)
        for (auto f : used)
          for (auto h : used)
            if (f < h)
              for (std::uint32_t a = 0; a < g.params().size(); ++a) b.addEdge(g.image(f, a), g.image(h, a));
    }
  return b;
}

std::optional<std::vector<VarId>> baseAutomorphismToSymmetry(const DeductiveGame& g, const LabeledGraph& base,
                                                            std::span<const std::uint32_t> perm) {
  if (perm.size() != base.size() || !base.isAutomorphism(perm)) return std::nullopt;
  std::vector<VarId> out(g.varCount());
  for (VarId x = 0; x < g.varCount(); ++x) {
    if (perm[x] >= g.varCount()) return std::nullopt;
    out[x] = perm[x];
  }
  return out;
}

GameContext::GameContext(const DeductiveGame& g, SymmetryMode mode, std::uint64_t cap)
    : game_(g), space_(g.initial(), g.varCount(), cap), symmetry_(computeSymmetryModel(g, &space_)), mode_(mode) {}

Knowledge GameContext::initialKnowledge() const { return {space_.all(), {}}; }

Knowledge GameContext::update(const Knowledge& k, const ExperimentInstance& e, std::uint32_t outcome) {
  Knowledge next{k.models & outcomeSets(e).at(outcome), k.history};
  next.history.push_back({e, outcome});
  return next;
}

Formula GameContext::formula(const Knowledge& k) const {
  std::vector<Formula> parts{game_.initial()};
  for (const auto& ev : k.history) parts.push_back(instantiateOutcome(game_, ev.instance, ev.outcome));
  return canonicalize(Formula::allOf(parts));
}

const std::vector<ModelSet>& GameContext::outcomeSets(const ExperimentInstance& e) {
  auto it = outcomeCache_.find(e);
  if (it != outcomeCache_.end()) return it->second;
  std::vector<ModelSet> sets;
  for (const auto& o : game_.experiment(e.experiment).outcomes)
    sets.push_back(space_.evaluateAll(
        o.formula, [&](std::uint32_t f, std::uint32_t pos) { return game_.image(f, e.params[pos - 1]); }));
  return outcomeCache_.emplace(e, std::move(sets)).first->second;
}

const std::vector<std::uint32_t>& GameContext::swapPermutation(std::uint32_t a, std::uint32_t b) {
  const auto key = std::minmax(a, b);
  auto it = swapCache_.find(key);
  if (it != swapCache_.end()) return it->second;
  auto perm = space_.modelPermutation(paramSwap(game_, a, b));
  return swapCache_.emplace(key, perm ? std::move(*perm) : std::vector<std::uint32_t>{}).first->second;
}

namespace {

// Attaches syntax trees to a graph whose first vertices are the variables.
class TreeAttacher {
 public:
  explicit TreeAttacher(LabeledGraph& g) : g_(g) {}

  void attach(const std::string& rootLabel, const Formula& f) {
    const auto root = g_.addVertex(rootLabel);
    link(root, node(f));
  }

 private:
  std::uint32_t node(const Formula& f) {
    switch (f.op()) {
      case Op::Var:
        return f.var();
      case Op::Const:
        return g_.addVertex(f.value() ? "true" : "false");
      case Op::Atom:
        throw DomainError("uninstantiated atom in an experiment graph");
      default:
        break;
    }
    std::string label = f.op() == Op::Not ? "not" : f.op() == Op::And ? "and" : f.op() == Op::Or ? "or" : "exactly";
    if (f.op() == Op::Exactly) label += ":" + std::to_string(f.k());
    const auto v = g_.addVertex(label);
    for (const auto& c : f.children()) link(v, node(c));
    return v;
  }

  // Repeated children go through a relay vertex so that multiplicity survives.
  void link(std::uint32_t parent, std::uint32_t child) {
    if (g_.hasEdge(parent, child)) {
      const auto relay = g_.addVertex("dup");
      g_.addEdge(relay, child);
      child = relay;
    }
    g_.addEdge(parent, child);
  }

  LabeledGraph& g_;
};

void attachModels(LabeledGraph& g, const ModelSpace& space, const ModelSet& models,
                  std::vector<std::uint32_t>& vertexOf) {
  vertexOf.assign(space.size(), 0);
  models.forEach([&](std::size_t i) {
    const auto v = g.addVertex("model");
    vertexOf[i] = v;
    const auto& val = space.model(i);
    for (VarId x = 0; x < space.varCount(); ++x)
      if (val[x]) g.addEdge(v, x);
  });
}

void attachSyntactic(LabeledGraph& g, const DeductiveGame& game, const FixedSet& fixed, const Formula& phi,
                     const ExperimentInstance* e) {
  // Fixed variables leave the formulas, so their values are kept as marks.
  for (const auto& [x, value] : fixed) g.addEdge(g.addVertex(value ? "fixed:T" : "fixed:F"), x);
  TreeAttacher trees(g);
  trees.attach("acc", removeFixed(phi, fixed));
  if (!e) return;
  for (const auto& o : outcomes(game, *e)) trees.attach("out", removeFixed(canonicalize(o), fixed));
}

}  // namespace

LabeledGraph buildExperimentGraph(GameContext& ctx, const Knowledge& k, const ExperimentInstance& e) {
  LabeledGraph g = ctx.symmetry().base;
  if (ctx.mode() == SymmetryMode::Syntactic) {
    attachSyntactic(g, ctx.game(), ctx.space().fixed(k.models), ctx.formula(k), &e);
    return g;
  }
  std::vector<std::uint32_t> vertexOf;
  attachModels(g, ctx.space(), k.models, vertexOf);
  bool anyEmpty = false;
  for (const auto& o : ctx.outcomeSets(e)) {
    const ModelSet inside = o & k.models;
    if (inside.empty()) {
      anyEmpty = true;
      continue;
    }
    const auto v = g.addVertex("out");
    inside.forEach([&](std::size_t i) { g.addEdge(v, vertexOf[i]); });
  }
  if (anyEmpty) g.addVertex("out-empty");
  return g;
}

LabeledGraph buildKnowledgeGraph(GameContext& ctx, const Knowledge& k) {
  LabeledGraph g = ctx.symmetry().base;
  if (ctx.mode() == SymmetryMode::Syntactic) {
    attachSyntactic(g, ctx.game(), ctx.space().fixed(k.models), ctx.formula(k), nullptr);
    return g;
  }
  std::vector<std::uint32_t> vertexOf;
  attachModels(g, ctx.space(), k.models, vertexOf);
  return g;
}

LabeledGraph buildExperimentGraph(const GameContext& ctx, const Formula& phi, const ExperimentInstance& e) {
  LabeledGraph g = ctx.symmetry().base;
  const auto fixed = fixedVariables(phi, ctx.game().varCount());
  attachSyntactic(g, ctx.game(), fixed, canonicalize(phi), &e);
  return g;
}

std::string knowledgeKey(GameContext& ctx, const Knowledge& k) {
  return canonicalKey(buildKnowledgeGraph(ctx, k));
}

namespace {

// Sorted sizes of the nonempty outcome sets plus a marker for empty ones; equal
// for equivalent experiments, so it groups candidates before canonical keys.
std::vector<std::size_t> outcomeSignature(GameContext& ctx, const Knowledge& k, const ExperimentInstance& e) {
  std::vector<std::size_t> sizes;
  bool anyEmpty = false;
  for (const auto& o : ctx.outcomeSets(e)) {
    const auto n = o.intersectionCount(k.models);
    if (n == 0)
      anyEmpty = true;
    else
      sizes.push_back(n);
  }
  std::sort(sizes.begin(), sizes.end());
  sizes.push_back(anyEmpty ? 1 : 0);
  return sizes;
}

std::string experimentKey(GameContext& ctx, const Knowledge& k, const ExperimentInstance& e) {
  return canonicalKey(buildExperimentGraph(ctx, k, e));
}

// Parameter classes whose transpositions keep the knowledge: their members are
// interchangeable in every continuation.
class KnowledgeClasses {
 public:
  KnowledgeClasses(GameContext& ctx, const Knowledge& k) : ctx_(ctx), k_(k) {
    if (ctx.mode() == SymmetryMode::Syntactic) phi_ = ctx.formula(k);
  }

  bool interchangeable(std::uint32_t a, std::uint32_t b) {
    if (a == b) return true;
    const auto& cls = ctx_.symmetry().paramClass;
    if (cls[a] != cls[b]) return false;
    if (ctx_.mode() == SymmetryMode::Syntactic)
      return canonicalize(applyPermutation(phi_, paramSwap(ctx_.game(), a, b))) == phi_;
    const auto& perm = ctx_.swapPermutation(a, b);
    if (perm.empty()) return false;
    bool stable = true;
    k_.models.forEach([&](std::size_t i) { stable = stable && k_.models.test(perm[i]); });
    return stable;
  }

  std::vector<std::uint32_t> classes() {
    const auto np = static_cast<std::uint32_t>(ctx_.game().params().size());
    UnionFind uf(np);
    if (ctx_.mode() != SymmetryMode::None)
      for (std::uint32_t b = 1; b < np; ++b)
        for (std::uint32_t a = 0; a < b; ++a)
          if (uf.find(a) == a && interchangeable(a, b)) {
            uf.join(a, b);
            break;
          }
    return uf.classes();
  }

 private:
  GameContext& ctx_;
  const Knowledge& k_;
  Formula phi_;
};

}  // namespace

bool areEquivalent(GameContext& ctx, const Knowledge& k, const ExperimentInstance& e1, const ExperimentInstance& e2) {
  if (e1 == e2) return true;
  if (ctx.mode() == SymmetryMode::None) return false;
  if (outcomeSignature(ctx, k, e1) != outcomeSignature(ctx, k, e2)) return false;
  return experimentKey(ctx, k, e1) == experimentKey(ctx, k, e2);
}

bool isDominated(GameContext& ctx, const Knowledge& k, std::uint32_t t, std::span<const std::uint32_t> prefix,
                 std::uint32_t a, std::uint32_t b) {
  std::vector<std::uint32_t> withB(prefix.begin(), prefix.end());
  withB.push_back(b);
  if (!isFeasiblePrefix(ctx.game(), t, withB)) return true;
  if (ctx.mode() == SymmetryMode::None) return false;
  // Swapping a and b maps u·b·v onto u·a·v' only when neither occurs in u.
  for (auto p : prefix)
    if (p == a || p == b) return false;
  return KnowledgeClasses(ctx, k).interchangeable(a, b);
}

ExperimentsResult experimentsFor(GameContext& ctx, const Knowledge& k) {
  const auto& g = ctx.game();
  ExperimentsResult result;
  if (ctx.mode() == SymmetryMode::None) {
    result.phase1 = allInstances(g);
    result.representatives = result.phase1;
    return result;
  }

  // Phase 1: first uses of each knowledge class in order of its members, and
  // nondecreasing entries inside each block of interchangeable positions.
  const auto cls = KnowledgeClasses(ctx, k).classes();
  const auto np = static_cast<std::uint32_t>(g.params().size());
  std::map<std::uint32_t, std::vector<std::uint32_t>> members;
  for (std::uint32_t a = 0; a < np; ++a) members[cls[a]].push_back(a);
  std::map<std::uint32_t, std::size_t> usedCount;
  std::vector<char> used(np, 0);

  for (std::uint32_t t = 0; t < g.experiments().size(); ++t) {
    const auto& exp = g.experiment(t);
    const auto& block = ctx.symmetry().positionBlock[t];
    std::vector<int> previousInBlock(exp.arity, -1);
    for (std::uint32_t i = 0; i < exp.arity; ++i)
      for (std::uint32_t j = 0; j < i; ++j)
        if (block[j] == block[i]) previousInBlock[i] = static_cast<int>(j);
    std::vector<std::uint32_t> tuple;
    std::function<void()> rec = [&]() {
      const auto pos = tuple.size();
      if (pos == exp.arity) {
        result.phase1.push_back({t, tuple});
        return;
      }
      const std::uint32_t floor = previousInBlock[pos] < 0 ? 0 : tuple[previousInBlock[pos]];
      for (std::uint32_t a = floor; a < np; ++a) {
        if (used[a]) {
          if (exp.kind == InstanceKind::DistinctTuples) continue;
          tuple.push_back(a);
          rec();
          tuple.pop_back();
          continue;
        }
        const auto c = cls[a];
        if (members[c][usedCount[c]] != a) continue;
        used[a] = 1;
        ++usedCount[c];
        tuple.push_back(a);
        rec();
        tuple.pop_back();
        --usedCount[c];
        used[a] = 0;
      }
    };
    rec();
  }

  // Phase 2: within groups of equal outcome signatures, keep the least member of
  // every isomorphism class of experiment graphs.
  std::map<std::vector<std::size_t>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < result.phase1.size(); ++i)
    groups[outcomeSignature(ctx, k, result.phase1[i])].push_back(i);
  std::vector<char> keep(result.phase1.size(), 0);
  for (const auto& [signature, indices] : groups) {
    if (indices.size() == 1) {
      keep[indices[0]] = 1;
      continue;
    }
    std::set<std::string> seen;
    for (auto i : indices)
      if (seen.insert(experimentKey(ctx, k, result.phase1[i])).second) keep[i] = 1;
  }
  for (std::size_t i = 0; i < result.phase1.size(); ++i)
    if (keep[i]) result.representatives.push_back(result.phase1[i]);
  std::sort(result.representatives.begin(), result.representatives.end());
  return result;
}

}  // namespace cobra
