#include "cobra/game.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_set>

#include "cobra/satcore.hpp"

namespace cobra {

std::string ParameterizedExperiment::outcomeName(std::size_t i) const {
  if (i < outcomes.size() && !outcomes[i].label.empty()) return outcomes[i].label;
  return "#" + std::to_string(i + 1);
}

namespace {

template <class Fn>
void visitLeaves(const Formula& f, const Fn& fn) {
  if (f.op() == Op::Var || f.op() == Op::Atom) {
    fn(f);
    return;
  }
  for (const Formula& c : f.children()) visitLeaves(c, fn);
}

}  // namespace

DeductiveGame::DeductiveGame(Vocabulary variables, Formula initial, std::vector<std::string> params,
                             std::vector<Attribute> attributes, std::vector<ParameterizedExperiment> experiments)
    : variables_(std::move(variables)),
      initial_(std::move(initial)),
      params_(std::move(params)),
      attributes_(std::move(attributes)),
      experiments_(std::move(experiments)) {
  const std::size_t nx = variables_.size();
  const std::size_t np = params_.size();

  std::unordered_set<std::string> seen;
  for (const auto& p : params_)
    if (p.empty() || !seen.insert(p).second) throw DefinitionError("duplicate or empty parameter '" + p + "'");

  owners_.assign(nx, std::nullopt);
  seen.clear();
  for (std::uint32_t f = 0; f < attributes_.size(); ++f) {
    const auto& attr = attributes_[f];
    if (attr.name.empty() || !seen.insert(attr.name).second)
      throw DefinitionError("duplicate or empty attribute '" + attr.name + "'");
    if (attr.image.size() != np)
      throw DefinitionError("attribute '" + attr.name + "' must map every parameter");
    for (std::uint32_t a = 0; a < np; ++a) {
      const VarId x = attr.image[a];
      if (x >= nx) throw DefinitionError("attribute '" + attr.name + "' maps to an unknown variable");
      if (owners_[x])
        throw DefinitionError("variable '" + variables_.name(x) + "' lies in two attribute images or twice in '" +
                              attr.name + "'");
      owners_[x] = std::make_pair(f, a);
    }
    attributeNames_.push_back(attr.name);
  }

  if (containsAtoms(initial_)) throw DefinitionError("the initial constraint cannot contain parameter atoms");
  for (VarId x : variablesOf(initial_))
    if (x >= nx) throw DefinitionError("the initial constraint mentions an unknown variable");

  rawInOutcomes_.assign(nx, 0);
  seen.clear();
  for (auto& t : experiments_) {
    if (t.name.empty() || !seen.insert(t.name).second)
      throw DefinitionError("duplicate or empty experiment '" + t.name + "'");
    if (t.outcomes.empty()) throw DefinitionError("experiment '" + t.name + "' has no outcomes");
    if (t.kind == InstanceKind::DistinctTuples && t.arity > np)
      throw DefinitionError("experiment '" + t.name + "' needs " + std::to_string(t.arity) +
                            " distinct parameters but only " + std::to_string(np) + " exist");
    if (t.arity > 0 && np == 0) throw DefinitionError("experiment '" + t.name + "' has parameters but Σ is empty");

    t.positionAttributes.assign(t.arity, {});
    std::vector<VarId> raw;
    for (const auto& o : t.outcomes) {
      visitLeaves(o.formula, [&](const Formula& leaf) {
        if (leaf.op() == Op::Var) {
          if (leaf.var() >= nx) throw DefinitionError("experiment '" + t.name + "' mentions an unknown variable");
          raw.push_back(leaf.var());
          return;
        }
        if (leaf.attribute() >= attributes_.size())
          throw DefinitionError("experiment '" + t.name + "' uses an unknown attribute");
        if (leaf.position() < 1 || leaf.position() > t.arity)
          throw DefinitionError("experiment '" + t.name + "' uses $" + std::to_string(leaf.position()) +
                                " but has arity " + std::to_string(t.arity));
        t.positionAttributes[leaf.position() - 1].push_back(leaf.attribute());
      });
    }
    for (auto& fs : t.positionAttributes) {
      std::sort(fs.begin(), fs.end());
      fs.erase(std::unique(fs.begin(), fs.end()), fs.end());
    }
    t.compatible.assign(t.arity, std::vector<char>(t.arity, 0));
    for (std::uint32_t i = 0; i < t.arity; ++i)
      for (std::uint32_t j = 0; j < t.arity; ++j) {
        if (i == j) continue;
        const auto& a = t.positionAttributes[i];
        const auto& b = t.positionAttributes[j];
        std::vector<std::uint32_t> common;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
        t.compatible[i][j] = !common.empty();
      }
    for (VarId x : raw) rawInOutcomes_[x] = 1;
  }

  if (!isSatisfiable(initial_, nx)) throw DefinitionError("the initial constraint is unsatisfiable");
}

std::optional<std::uint32_t> DeductiveGame::findParam(std::string_view name) const {
  for (std::uint32_t i = 0; i < params_.size(); ++i)
    if (params_[i] == name) return i;
  return std::nullopt;
}

std::optional<std::uint32_t> DeductiveGame::findAttribute(std::string_view name) const {
  for (std::uint32_t i = 0; i < attributes_.size(); ++i)
    if (attributes_[i].name == name) return i;
  return std::nullopt;
}

std::optional<std::uint32_t> DeductiveGame::findExperiment(std::string_view name) const {
  for (std::uint32_t i = 0; i < experiments_.size(); ++i)
    if (experiments_[i].name == name) return i;
  return std::nullopt;
}

std::optional<std::pair<std::uint32_t, std::uint32_t>> DeductiveGame::owner(VarId x) const {
  if (x >= owners_.size()) return std::nullopt;
  return owners_[x];
}

std::size_t DeductiveGame::maxOutcomes() const {
  std::size_t m = 0;
  for (const auto& t : experiments_) m = std::max(m, t.outcomes.size());
  return m;
}

// ------------------------------------------------------------------ instances

bool isFeasiblePrefix(const DeductiveGame& g, std::uint32_t t, std::span<const std::uint32_t> prefix) {
  const auto& exp = g.experiment(t);
  if (prefix.size() > exp.arity) return false;
  for (auto p : prefix)
    if (p >= g.params().size()) return false;
  if (exp.kind == InstanceKind::DistinctTuples) {
    for (std::size_t i = 0; i < prefix.size(); ++i)
      for (std::size_t j = i + 1; j < prefix.size(); ++j)
        if (prefix[i] == prefix[j]) return false;
  }
  return true;
}

bool isInstance(const DeductiveGame& g, const ExperimentInstance& e) {
  if (e.experiment >= g.experiments().size()) return false;
  return e.params.size() == g.experiment(e.experiment).arity && isFeasiblePrefix(g, e.experiment, e.params);
}

std::vector<ExperimentInstance> allInstances(const DeductiveGame& g, std::uint32_t t) {
  const auto& exp = g.experiment(t);
  const auto np = static_cast<std::uint32_t>(g.params().size());
  std::vector<ExperimentInstance> out;
  std::vector<std::uint32_t> tuple;
  auto rec = [&](auto&& self) -> void {
    if (tuple.size() == exp.arity) {
      out.push_back(ExperimentInstance{t, tuple});
      return;
    }
    for (std::uint32_t a = 0; a < np; ++a) {
      tuple.push_back(a);
      if (isFeasiblePrefix(g, t, tuple)) self(self);
      tuple.pop_back();
    }
  };
  rec(rec);
  return out;
}

std::vector<ExperimentInstance> allInstances(const DeductiveGame& g) {
  std::vector<ExperimentInstance> out;
  for (std::uint32_t t = 0; t < g.experiments().size(); ++t) {
    auto part = allInstances(g, t);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

Formula instantiateOutcome(const DeductiveGame& g, const Formula& tmpl, std::span<const std::uint32_t> params) {
  return canonicalize(instantiate(tmpl, [&](std::uint32_t f, std::uint32_t j) {
    if (f >= g.attributes().size()) throw DefinitionError("unknown attribute in template");
    if (j < 1 || j > params.size()) throw DefinitionError("parameter index $" + std::to_string(j) + " out of range");
    if (params[j - 1] >= g.params().size()) throw DefinitionError("unknown parameter");
    return Formula::variable(g.image(f, params[j - 1]));
  }));
}

Formula instantiateOutcome(const DeductiveGame& g, const ExperimentInstance& e, std::uint32_t outcome) {
  if (!isInstance(g, e)) throw DefinitionError("not an instance of its experiment: " + describe(g, e));
  return instantiateOutcome(g, g.experiment(e.experiment).outcomes.at(outcome).formula, e.params);
}

std::vector<Formula> outcomes(const DeductiveGame& g, const ExperimentInstance& e) {
  std::vector<Formula> out;
  const auto n = static_cast<std::uint32_t>(g.experiment(e.experiment).outcomes.size());
  for (std::uint32_t i = 0; i < n; ++i) out.push_back(instantiateOutcome(g, e, i));
  return out;
}

bool outcomeHolds(const DeductiveGame& g, const ExperimentInstance& e, std::uint32_t outcome, const Valuation& v) {
  const Formula& tmpl = g.experiment(e.experiment).outcomes[outcome].formula;
  return evaluateWith(
      tmpl, [&](VarId x) { return v[x]; },
      [&](std::uint32_t f, std::uint32_t j) { return v[g.image(f, e.params[j - 1])]; });
}

WellFormedReport checkWellFormed(const DeductiveGame& g, std::span<const ExperimentInstance> reps) {
  WellFormedReport report;
  for (const auto& e : reps) {
    const auto xs = outcomes(g, e);
    const Formula bad = Formula::conjunction({g.initial(), Formula::negation(Formula::exactly(1, xs))});
    auto model = findModel(bad, g.varCount());
    if (!model) continue;
    report.ok = false;
    report.experiment = e;
    for (std::uint32_t i = 0; i < xs.size(); ++i)
      if (evaluate(xs[i], *model)) report.trueOutcomes.push_back(i);
    report.witness = std::move(model);
    return report;
  }
  return report;
}

EvaluatedExperiment evaluateExperiment(const DeductiveGame& g, const ExperimentInstance& e, const Valuation& v) {
  if (!isInstance(g, e)) throw DomainError("not an instance of its experiment: " + describe(g, e));
  if (v.size() != g.varCount()) throw DomainError("valuation does not cover the game's variables");
  const auto n = static_cast<std::uint32_t>(g.experiment(e.experiment).outcomes.size());
  std::optional<std::uint32_t> hit;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!outcomeHolds(g, e, i, v)) continue;
    if (hit)
      throw IllFormedGameError("several outcomes of " + describe(g, e) + " hold for " + toString(v, g.variables()));
    hit = i;
  }
  if (!hit) throw IllFormedGameError("no outcome of " + describe(g, e) + " holds for " + toString(v, g.variables()));
  return EvaluatedExperiment{e, *hit};
}

FaithfulReport isFaithful(const DeductiveGame& g, std::uint32_t t) {
  const auto& exp = g.experiment(t);
  const std::size_t np = g.params().size();
  // X_t
  std::vector<char> inXt(g.varCount(), 0);
  for (const auto& fs : exp.positionAttributes)
    for (auto f : fs)
      for (std::uint32_t a = 0; a < np; ++a) inXt[g.image(f, a)] = 1;
  for (const auto& o : exp.outcomes)
    for (VarId x : variablesOf(o.formula))
      if (inXt[x]) return {false, "variable '" + g.variables().name(x) + "' of X_t occurs in an outcome"};

  bool anyCompatible = false;
  bool anyIncompatible = false;
  for (std::uint32_t i = 0; i < exp.arity; ++i)
    for (std::uint32_t j = 0; j < exp.arity; ++j) {
      if (i == j) continue;
      if (exp.compatible[i][j])
        anyCompatible = true;
      else
        anyIncompatible = true;
    }
  if (exp.kind == InstanceKind::AllTuples && anyCompatible && np >= 1)
    return {false, "compatible positions may carry the same parameter"};
  // Swapping positions keeps both tuple kinds closed. Replacing a position by a
  // parameter that sits at an incompatible position leaves DistinctTuples.
  if (exp.kind == InstanceKind::DistinctTuples && anyIncompatible && np >= exp.arity)
    return {false, "replacement at a position can collide with an incompatible position"};
  return {};
}

std::string describe(const DeductiveGame& g, const ExperimentInstance& e) {
  std::string out = e.experiment < g.experiments().size() ? g.experiment(e.experiment).name : "?";
  if (e.params.empty() && e.experiment < g.experiments().size() && g.experiment(e.experiment).arity == 0) return out;
  out += '(';
  for (std::size_t i = 0; i < e.params.size(); ++i) {
    if (i) out += ", ";
    out += e.params[i] < g.params().size() ? g.params()[e.params[i]] : "?";
  }
  return out + ')';
}

ExperimentInstance parseInstance(const DeductiveGame& g, std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  const auto open = text.find('(');
  const auto name = trim(text.substr(0, open));
  auto t = g.findExperiment(name);
  if (!t) throw DomainError("unknown experiment '" + std::string(name) + "'");
  ExperimentInstance e{*t, {}};
  if (open != std::string_view::npos) {
    const auto close = text.rfind(')');
    if (close == std::string_view::npos || close < open) throw DomainError("missing ')'");
    std::string_view body = text.substr(open + 1, close - open - 1);
    while (!trim(body).empty()) {
      const auto comma = body.find(',');
      const auto item = trim(body.substr(0, comma));
      auto p = g.findParam(item);
      if (!p) throw DomainError("unknown parameter '" + std::string(item) + "'");
      e.params.push_back(*p);
      if (comma == std::string_view::npos) break;
      body.remove_prefix(comma + 1);
    }
  }
  if (!isInstance(g, e)) throw DomainError("not an instance: " + std::string(text));
  return e;
}

std::string describeOutcome(const DeductiveGame& g, const EvaluatedExperiment& ev) {
  return g.experiment(ev.instance.experiment).outcomeName(ev.outcome);
}

}  // namespace cobra
