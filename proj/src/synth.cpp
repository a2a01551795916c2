#include "cobra/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace cobra {

Rational::Rational(std::uint64_t num, std::uint64_t den) {
  if (den == 0) throw DomainError("zero denominator");
  const auto g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  const unsigned __int128 l = static_cast<unsigned __int128>(a.num_) * b.den_;
  const unsigned __int128 r = static_cast<unsigned __int128>(b.num_) * a.den_;
  return l <=> r;
}

std::string Rational::toString() const {
  return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

std::string Rational::toDecimal(int digits) const {
  unsigned __int128 scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  const unsigned __int128 scaled = (static_cast<unsigned __int128>(num_) * scale * 2 + den_) / (2 * den_);
  const auto whole = static_cast<std::uint64_t>(scaled / scale);
  std::string frac = std::to_string(static_cast<std::uint64_t>(scaled % scale));
  if (digits == 0) return std::to_string(whole);
  frac.insert(0, static_cast<std::size_t>(digits) - frac.size(), '0');
  return std::to_string(whole) + "." + frac;
}

std::string toString(RankingKind k) {
  switch (k) {
    case RankingKind::MaxModels:
      return "max-models";
    case RankingKind::ExpModels:
      return "exp-models";
    case RankingKind::EntModels:
      return "ent-models";
    case RankingKind::Parts:
      return "parts";
    case RankingKind::MinFixed:
      return "min-fixed";
    case RankingKind::ExpFixed:
      return "exp-fixed";
  }
  return "max-models";
}

const std::vector<RankingKind>& allRankingKinds() {
  static const std::vector<RankingKind> kinds{RankingKind::MaxModels, RankingKind::ExpModels,
                                              RankingKind::EntModels, RankingKind::Parts,
                                              RankingKind::MinFixed,  RankingKind::ExpFixed};
  return kinds;
}

std::optional<RankingKind> parseRankingKind(std::string_view s) {
  for (auto k : allRankingKinds())
    if (toString(k) == s) return k;
  return std::nullopt;
}

std::string toString(OptimalMode m) { return m == OptimalMode::Worst ? "worst" : "avg"; }

std::vector<Formula> updates(const DeductiveGame& g, const Formula& phi, const ExperimentInstance& e) {
  std::vector<Formula> out;
  for (const auto& xi : outcomes(g, e)) out.push_back(canonicalize(phi & xi));
  return out;
}

double rank(RankingKind kind, std::span<const UpdateStats> stats) {
  if (stats.empty()) throw DomainError("ranking of an empty update set");
  // sorted so that equal multisets give bit-identical sums
  std::vector<UpdateStats> s(stats.begin(), stats.end());
  std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) {
    return a.models != b.models ? a.models < b.models : a.fixed < b.fixed;
  });
  std::uint64_t total = 0;
  for (const auto& u : s) total += u.models;
  const bool weighted = kind == RankingKind::ExpModels || kind == RankingKind::EntModels ||
                        kind == RankingKind::ExpFixed;
  if (weighted && total == 0) throw UndefinedRankError(toString(kind) + " is undefined without models");
  switch (kind) {
    case RankingKind::MaxModels:
      return static_cast<double>(s.back().models);
    case RankingKind::ExpModels: {
      double sq = 0;
      for (const auto& u : s) sq += static_cast<double>(u.models) * static_cast<double>(u.models);
      return sq / static_cast<double>(total);
    }
    case RankingKind::EntModels: {
      double sum = 0;
      for (const auto& u : s) {
        if (u.models == 0) continue;
        const double p = static_cast<double>(u.models) / static_cast<double>(total);
        sum += p * std::log(p);
      }
      return sum;
    }
    case RankingKind::Parts:
      return -static_cast<double>(std::count_if(s.begin(), s.end(), [](const auto& u) { return u.models > 0; }));
    case RankingKind::MinFixed: {
      std::size_t least = s.front().fixed;
      for (const auto& u : s) least = std::min(least, u.fixed);
      return -static_cast<double>(least);
    }
    case RankingKind::ExpFixed: {
      double sum = 0;
      for (const auto& u : s) sum += static_cast<double>(u.models) * static_cast<double>(u.fixed);
      return -sum / static_cast<double>(total);
    }
  }
  return 0;
}

double rank(RankingKind kind, std::span<const Formula> psi, std::size_t varCount) {
  std::vector<UpdateStats> stats;
  for (const auto& f : psi) stats.push_back({countModels(f, varCount), fixedVariables(f, varCount).size()});
  return rank(kind, stats);
}

std::vector<UpdateStats> updateStats(GameContext& ctx, const Knowledge& k, const ExperimentInstance& e,
                                     bool withFixed) {
  std::vector<UpdateStats> out;
  for (const auto& o : ctx.outcomeSets(e)) {
    UpdateStats u;
    if (withFixed) {
      const ModelSet child = o & k.models;
      u.models = child.count();
      u.fixed = ctx.space().fixedCount(child);
    } else {
      u.models = o.intersectionCount(k.models);
    }
    out.push_back(u);
  }
  return out;
}

std::uint32_t DecisionTree::addLeaf(Valuation v) {
  TreeNode n;
  n.leaf = true;
  n.valuation = std::move(v);
  nodes_.push_back(std::move(n));
  return static_cast<std::uint32_t>(nodes_.size() - 1);
}

std::uint32_t DecisionTree::addInternal(ExperimentInstance e) {
  TreeNode n;
  n.experiment = std::move(e);
  nodes_.push_back(std::move(n));
  return static_cast<std::uint32_t>(nodes_.size() - 1);
}

void DecisionTree::addChild(std::uint32_t parent, std::uint32_t outcome, std::uint32_t child) {
  auto& kids = nodes_.at(parent).children;
  if (nodes_.at(parent).leaf) throw MalformedTreeError("a leaf cannot have children");
  auto it = std::lower_bound(kids.begin(), kids.end(), std::make_pair(outcome, std::uint32_t{0}));
  if (it != kids.end() && it->first == outcome) throw MalformedTreeError("outcome already has a child");
  kids.insert(it, {outcome, child});
}

std::optional<std::uint32_t> DecisionTree::child(std::uint32_t node, std::uint32_t outcome) const {
  for (const auto& [o, c] : nodes_.at(node).children)
    if (o == outcome) return c;
  return std::nullopt;
}

namespace {

std::string trueVariables(const Valuation& v, const Vocabulary& vocab) {
  std::string out;
  for (VarId x = 0; x < v.size(); ++x)
    if (v[x]) out += (out.empty() ? "" : ", ") + vocab.name(x);
  return out;
}

std::string dotEscape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string DecisionTree::toDot(const DeductiveGame& g) const {
  std::ostringstream os;
  os << "digraph strategy {\n";
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.leaf)
      os << "  n" << i << " [shape=box, label=\"" << dotEscape(trueVariables(n.valuation, g.variables())) << "\"];\n";
    else
      os << "  n" << i << " [label=\"" << dotEscape(describe(g, n.experiment)) << "\"];\n";
  }
  for (std::uint32_t i = 0; i < nodes_.size(); ++i)
    for (const auto& [o, c] : nodes_[i].children)
      os << "  n" << i << " -> n" << c << " [label=\""
         << dotEscape(g.experiment(nodes_[i].experiment.experiment).outcomeName(o)) << "\"];\n";
  os << "}\n";
  return os.str();
}

std::string DecisionTree::toJson(const DeductiveGame& g) const {
  nlohmann::json out = nlohmann::json::array();
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    nlohmann::json j;
    j["node_id"] = i;
    if (n.leaf) {
      j["kind"] = "leaf";
      std::vector<std::string> names;
      for (VarId x = 0; x < n.valuation.size(); ++x)
        if (n.valuation[x]) names.push_back(g.variables().name(x));
      j["valuation"] = names;
    } else {
      const auto& exp = g.experiment(n.experiment.experiment);
      j["kind"] = "experiment";
      j["experiment"] = exp.name;
      std::vector<std::string> params;
      for (auto p : n.experiment.params) params.push_back(g.params()[p]);
      j["params"] = params;
      nlohmann::json kids = nlohmann::json::object();
      for (const auto& [o, c] : n.children) kids[exp.outcomeName(o)] = c;
      j["children"] = kids;
    }
    out.push_back(j);
  }
  return out.dump(2) + "\n";
}

ComplexityReport evalComplexity(const DeductiveGame& g, const DecisionTree& tree) {
  const ModelSpace space(g.initial(), g.varCount());
  return evalComplexity(space, g, tree);
}

ComplexityReport evalComplexity(const ModelSpace& space, const DeductiveGame& g, const DecisionTree& tree) {
  if (tree.size() == 0) throw MalformedTreeError("empty tree");
  std::uint64_t total = 0;
  std::uint32_t worst = 0;
  std::vector<char> seen(tree.size(), 0);
  std::function<void(std::uint32_t, const ModelSet&, std::uint32_t)> walk = [&](std::uint32_t id,
                                                                                const ModelSet& codes,
                                                                                std::uint32_t depth) {
    if (seen[id]) throw MalformedTreeError("node " + std::to_string(id) + " is reached twice");
    seen[id] = 1;
    const auto& n = tree.node(id);
    if (n.leaf) {
      const auto idx = space.indexOf(n.valuation);
      if (codes.count() != 1 || !idx || !codes.test(*idx))
        throw MalformedTreeError("leaf " + std::to_string(id) + " does not identify a single code");
      total += depth;
      worst = std::max(worst, depth);
      return;
    }
    if (!isInstance(g, n.experiment)) throw MalformedTreeError("node " + std::to_string(id) + " is no experiment");
    const auto& exp = g.experiment(n.experiment.experiment);
    for (std::uint32_t o = 0; o < exp.outcomes.size(); ++o) {
      const ModelSet child =
          space.evaluateAll(exp.outcomes[o].formula,
                            [&](std::uint32_t f, std::uint32_t pos) { return g.image(f, n.experiment.params[pos - 1]); }) &
          codes;
      const auto next = tree.child(id, o);
      if (child.empty()) {
        if (next) throw MalformedTreeError("node " + std::to_string(id) + " has a branch for an impossible outcome");
        continue;
      }
      if (!next) throw MalformedTreeError("node " + std::to_string(id) + " misses outcome " + exp.outcomeName(o));
      walk(*next, child, depth + 1);
    }
  };
  walk(tree.root(), space.all(), 0);
  return {worst, Rational(total, space.size())};
}

std::vector<EvaluatedExperiment> simulatePlay(const DeductiveGame& g, const DecisionTree& tree,
                                              const Valuation& secret) {
  if (!evaluate(g.initial(), secret)) throw DomainError("the secret violates the initial constraint");
  std::vector<EvaluatedExperiment> play;
  std::uint32_t id = tree.root();
  while (!tree.node(id).leaf) {
    if (play.size() > tree.size()) throw MalformedTreeError("the tree has a cycle");
    const auto ev = evaluateExperiment(g, tree.node(id).experiment, secret);
    play.push_back(ev);
    const auto next = tree.child(id, ev.outcome);
    if (!next) throw MalformedTreeError("no branch for outcome " + describeOutcome(g, ev));
    id = *next;
  }
  if (tree.node(id).valuation != secret) throw MalformedTreeError("the play ends at a different code");
  return play;
}

RankingResult buildRankingTree(GameContext& ctx, RankingKind kind, std::size_t maxDepth) {
  RankingResult result;
  const bool needFixed = kind == RankingKind::MinFixed || kind == RankingKind::ExpFixed;
  std::vector<double> phase1;
  std::vector<double> phase2;
  std::function<std::uint32_t(const Knowledge&, std::size_t)> build = [&](const Knowledge& k, std::size_t depth) {
    if (k.models.count() == 1) return result.tree.addLeaf(ctx.space().model(k.models.first()));
    if (depth >= maxDepth)
      throw NonTerminatingStrategy(toString(kind) + " needs more than " + std::to_string(maxDepth) + " experiments");
    const auto candidates = experimentsFor(ctx, k);
    if (result.rounds.size() <= depth) {
      result.rounds.resize(depth + 1);
      phase1.resize(depth + 1);
      phase2.resize(depth + 1);
    }
    ++result.rounds[depth].nodes;
    phase1[depth] += static_cast<double>(candidates.phase1.size());
    phase2[depth] += static_cast<double>(candidates.representatives.size());
    const ExperimentInstance* best = nullptr;
    double bestRank = 0;
    for (const auto& e : candidates.representatives) {
      const double r = rank(kind, updateStats(ctx, k, e, needFixed));
      if (!best || r < bestRank) {
        best = &e;
        bestRank = r;
      }
    }
    if (!best) throw NonTerminatingStrategy("no experiment is available");
    const ExperimentInstance chosen = *best;
    const auto id = result.tree.addInternal(chosen);
    const auto& sets = ctx.outcomeSets(chosen);
    for (std::uint32_t o = 0; o < sets.size(); ++o) {
      const ModelSet child = sets[o] & k.models;
      if (child.empty()) continue;
      if (child == k.models) ++result.uninformative;
      const auto c = build(ctx.update(k, chosen, o), depth + 1);
      result.tree.addChild(id, o, c);
    }
    return id;
  };
  build(ctx.initialKnowledge(), 0);
  for (std::size_t r = 0; r < result.rounds.size(); ++r) {
    const auto n = static_cast<double>(result.rounds[r].nodes);
    result.rounds[r].phase1Avg = phase1[r] / n;
    result.rounds[r].phase2Avg = phase2[r] / n;
  }
  return result;
}

OptimalSolver::OptimalSolver(GameContext& ctx, OptimalMode mode)
    : ctx_(ctx), mode_(mode), out_(ctx.game().maxOutcomes()) {}

// Worst mode: ⌈log_Out n⌉. Average mode: the least total leaf depth of a tree with
// n leaves and at most Out children per node.
std::uint64_t OptimalSolver::lowerBound(std::uint64_t n) const {
  if (n <= 1) return 0;
  if (out_ < 2) return kInfinite;
  std::uint64_t d = 0;
  std::uint64_t power = 1;
  while (power < n) {
    power *= out_;
    ++d;
  }
  if (mode_ == OptimalMode::Worst) return d;
  const std::uint64_t a = power / out_;  // slots one level up
  const std::uint64_t expanded = (n - a + out_ - 2) / (out_ - 1);
  return (a - expanded) * (d - 1) + (n - a + expanded) * d;
}

std::optional<std::uint64_t> OptimalSolver::lookup(const Entry* e, std::uint64_t upper) const {
  if (!e) return std::nullopt;
  if (e->exact) return e->value < upper ? e->value : kInfinite;
  if (e->value >= upper) return kInfinite;
  return std::nullopt;
}

void OptimalSolver::remember(Entry& slot, const Entry& e) {
  if (slot.exact) return;
  if (e.exact || e.value > slot.value) slot = e;
}

std::uint64_t OptimalSolver::solve(const Knowledge& k, std::uint64_t upper, bool useCache) {
  const std::uint64_t n = k.models.count();
  if (n == 1) return 0;
  ++visited_;
  std::string key;
  if (useCache) {
    auto it = exact_.find(k.models);
    if (auto hit = lookup(it == exact_.end() ? nullptr : &it->second, upper)) {
      ++hits_;
      return *hit;
    }
    if (ctx_.mode() != SymmetryMode::None) {
      key = knowledgeKey(ctx_, k);
      auto st = symmetric_.find(key);
      if (auto hit = lookup(st == symmetric_.end() ? nullptr : &st->second, upper)) {
        ++hits_;
        return *hit;
      }
    }
  }
  const auto store = [&](const Entry& e) {
    remember(exact_[k.models], e);
    if (!key.empty()) remember(symmetric_[key], Entry{e.value, e.exact, std::nullopt});
  };
  if (lowerBound(n) >= upper) {
    store({upper, false, std::nullopt});
    return kInfinite;
  }

  std::uint64_t best = upper;
  std::optional<ExperimentInstance> choice;
  for (const auto& e : experimentsFor(ctx_, k).representatives) {
    const auto& sets = ctx_.outcomeSets(e);
    std::vector<std::pair<std::uint32_t, std::uint64_t>> children;
    bool informative = true;
    for (std::uint32_t o = 0; o < sets.size(); ++o) {
      const auto c = sets[o].intersectionCount(k.models);
      if (c == n) informative = false;
      if (c > 0) children.push_back({o, c});
    }
    if (!informative) continue;
    std::uint64_t val = 0;
    if (mode_ == OptimalMode::Worst) {
      for (const auto& [o, c] : children) {
        if (c == 1) {
          val = std::max<std::uint64_t>(val, 1);
          continue;
        }
        const auto sub = solve(ctx_.update(k, e, o), best - 1, true);
        if (sub == kInfinite) {
          val = kInfinite;
          break;
        }
        val = std::max(val, sub + 1);
      }
    } else {
      // val: n plus the children's totals, with bounds standing in for unsolved ones
      val = n;
      for (const auto& [o, c] : children) val += lowerBound(c);
      for (const auto& [o, c] : children) {
        if (val >= best) break;
        if (c == 1) continue;
        const auto lb = lowerBound(c);
        const auto sub = solve(ctx_.update(k, e, o), best - (val - lb), true);
        if (sub == kInfinite) {
          val = kInfinite;
          break;
        }
        val += sub - lb;
      }
    }
    if (val < best) {
      best = val;
      choice = e;
    }
  }
  if (!choice) {
    store({upper, false, std::nullopt});
    return kInfinite;
  }
  store({best, true, choice});
  return best;
}

OptimalResult OptimalSolver::optimal(const Knowledge& k, std::optional<Rational> upper) {
  OptimalResult r;
  const std::uint64_t n = k.models.count();
  if (n == 0) throw DomainError("optimal needs satisfiable knowledge");
  if (n == 1) {
    r.solved = true;
    r.leaf = ctx_.space().model(k.models.first());
    return r;
  }
  std::uint64_t bound = kInfinite;
  if (upper) {
    // costs are integers over a fixed denominator; cost < upper iff scaled cost < ⌈scaled upper⌉
    const unsigned __int128 scale = mode_ == OptimalMode::Worst ? 1 : n;
    const unsigned __int128 scaled = static_cast<unsigned __int128>(upper->num()) * scale;
    bound = static_cast<std::uint64_t>((scaled + upper->den() - 1) / upper->den());
  }
  const auto v = solve(k, bound, false);
  if (v == kInfinite) return r;
  r.solved = true;
  r.experiment = exact_.at(k.models).choice;
  r.cost = mode_ == OptimalMode::Worst ? Rational(v) : Rational(v, n);
  return r;
}

std::uint32_t OptimalSolver::expand(DecisionTree& tree, const Knowledge& k) {
  if (k.models.count() == 1) return tree.addLeaf(ctx_.space().model(k.models.first()));
  auto it = exact_.find(k.models);
  if (it == exact_.end() || !it->second.exact || !it->second.choice) {
    // known only up to symmetry: redo this node, its children are cached
    std::uint64_t bound = kInfinite;
    if (ctx_.mode() != SymmetryMode::None) {
      auto st = symmetric_.find(knowledgeKey(ctx_, k));
      if (st != symmetric_.end() && st->second.exact) bound = st->second.value + 1;
    }
    if (solve(k, bound, false) == kInfinite) throw DomainError("some codes cannot be told apart");
    it = exact_.find(k.models);
  }
  const ExperimentInstance e = *it->second.choice;
  const auto id = tree.addInternal(e);
  const auto& sets = ctx_.outcomeSets(e);
  for (std::uint32_t o = 0; o < sets.size(); ++o) {
    if (sets[o].intersectionCount(k.models) == 0) continue;
    const auto c = expand(tree, ctx_.update(k, e, o));
    tree.addChild(id, o, c);
  }
  return id;
}

DecisionTree OptimalSolver::buildTree() {
  DecisionTree tree;
  const auto k = ctx_.initialKnowledge();
  if (k.models.count() > 1 && solve(k, kInfinite, false) == kInfinite)
    throw DomainError("some codes cannot be told apart");
  expand(tree, k);
  return tree;
}

DecisionTree buildOptimalTree(GameContext& ctx, OptimalMode mode) { return OptimalSolver(ctx, mode).buildTree(); }

}  // namespace cobra
