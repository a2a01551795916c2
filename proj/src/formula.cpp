#include "cobra/formula.hpp"

#include <algorithm>
#include <sstream>

namespace cobra {

// ---------------------------------------------------------------- Vocabulary

Vocabulary::Vocabulary(const std::vector<std::string>& names) {
  for (const auto& n : names) add(n);
}

VarId Vocabulary::add(const std::string& name) {
  if (name.empty()) throw DefinitionError("empty variable name");
  if (index_.count(name)) throw DefinitionError("duplicate variable '" + name + "'");
  const auto id = static_cast<VarId>(names_.size());
  names_.push_back(name);
  index_.emplace(name, id);
  return id;
}

std::optional<VarId> Vocabulary::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

VarId Vocabulary::id(std::string_view name) const {
  auto v = find(name);
  if (!v) throw DomainError("unknown variable '" + std::string(name) + "'");
  return *v;
}

const std::string& Vocabulary::name(VarId v) const {
  if (v >= names_.size()) throw DomainError("variable id " + std::to_string(v) + " out of range");
  return names_[v];
}

std::string toString(const Valuation& v, const Vocabulary& vocab) {
  std::string out = "{";
  bool first = true;
  for (VarId i = 0; i < v.size(); ++i) {
    if (!v[i]) continue;
    if (!first) out += ", ";
    out += i < vocab.size() ? vocab.name(i) : "v" + std::to_string(i);
    first = false;
  }
  return out + "}";
}

// ------------------------------------------------------------------- Formula

struct Formula::Node {
  Op op;
  std::uint32_t a = 0;  // const value, var id, attribute, or k
  std::uint32_t b = 0;  // atom position
  std::vector<Formula> children;
  std::size_t hash = 0;
  std::size_t nodes = 1;
};

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace

Formula Formula::make(Op op, std::uint32_t a, std::uint32_t b, std::vector<Formula> children) {
  auto node = std::make_shared<Node>();
  node->op = op;
  node->a = a;
  node->b = b;
  std::size_t h = mix(static_cast<std::size_t>(op) * 1000003u, a);
  h = mix(h, b);
  std::size_t count = 1;
  for (const auto& c : children) {
    h = mix(h, c.hash());
    count += c.nodeCount();
  }
  node->hash = h;
  node->nodes = count;
  node->children = std::move(children);
  return Formula(std::shared_ptr<const Node>(std::move(node)));
}

Formula::Formula() : Formula(constant(true)) {}

Formula Formula::constant(bool value) {
  static const Formula t = make(Op::Const, 1, 0, {});
  static const Formula f = make(Op::Const, 0, 0, {});
  return value ? t : f;
}

Formula Formula::variable(VarId v) { return make(Op::Var, v, 0, {}); }

Formula Formula::atom(std::uint32_t attribute, std::uint32_t position) {
  if (position == 0) throw DefinitionError("parameter positions start at 1");
  return make(Op::Atom, attribute, position, {});
}

Formula Formula::negation(Formula child) { return make(Op::Not, 0, 0, {std::move(child)}); }

Formula Formula::conjunction(std::vector<Formula> children) {
  if (children.size() < 2) throw DefinitionError("conjunction needs at least two operands");
  return make(Op::And, 0, 0, std::move(children));
}

Formula Formula::disjunction(std::vector<Formula> children) {
  if (children.size() < 2) throw DefinitionError("disjunction needs at least two operands");
  return make(Op::Or, 0, 0, std::move(children));
}

Formula Formula::exactly(std::uint32_t k, std::vector<Formula> children) {
  if (children.empty()) throw DefinitionError("exactly needs at least one operand");
  if (k > children.size())
    throw DefinitionError("exactly" + std::to_string(k) + " over " + std::to_string(children.size()) +
                          " operands");
  return make(Op::Exactly, k, 0, std::move(children));
}

Formula Formula::allOf(std::vector<Formula> children) {
  if (children.empty()) return constant(true);
  if (children.size() == 1) return children.front();
  return conjunction(std::move(children));
}

Formula Formula::anyOf(std::vector<Formula> children) {
  if (children.empty()) return constant(false);
  if (children.size() == 1) return children.front();
  return disjunction(std::move(children));
}

Formula Formula::atLeast(std::uint32_t k, const std::vector<Formula>& children) {
  const auto n = static_cast<std::uint32_t>(children.size());
  if (k == 0) return constant(true);
  if (k > n) return constant(false);
  if (k == 1) return anyOf(children);
  // Pick the shorter of "one of exactly k..n" and "none of exactly 0..k-1".
  std::vector<Formula> parts;
  if (n - k + 1 <= k) {
    for (std::uint32_t j = k; j <= n; ++j) parts.push_back(exactly(j, children));
    return anyOf(std::move(parts));
  }
  for (std::uint32_t j = 0; j < k; ++j) parts.push_back(exactly(j, children));
  return negation(anyOf(std::move(parts)));
}

Op Formula::op() const { return node_->op; }

bool Formula::value() const {
  if (node_->op != Op::Const) throw DomainError("not a constant");
  return node_->a != 0;
}

VarId Formula::var() const {
  if (node_->op != Op::Var) throw DomainError("not a variable");
  return node_->a;
}

std::uint32_t Formula::attribute() const {
  if (node_->op != Op::Atom) throw DomainError("not an atom");
  return node_->a;
}

std::uint32_t Formula::position() const {
  if (node_->op != Op::Atom) throw DomainError("not an atom");
  return node_->b;
}

std::uint32_t Formula::k() const {
  if (node_->op != Op::Exactly) throw DomainError("not an exactly node");
  return node_->a;
}

std::span<const Formula> Formula::children() const { return node_->children; }
std::size_t Formula::hash() const { return node_->hash; }
std::size_t Formula::nodeCount() const { return node_->nodes; }

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->hash != b.node_->hash) return false;
  return (a <=> b) == 0;
}

std::strong_ordering operator<=>(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (auto c = x.op <=> y.op; c != 0) return c;
  if (auto c = x.a <=> y.a; c != 0) return c;
  if (auto c = x.b <=> y.b; c != 0) return c;
  return std::lexicographical_compare_three_way(x.children.begin(), x.children.end(), y.children.begin(),
                                                y.children.end());
}

Formula operator!(const Formula& f) { return Formula::negation(f); }
Formula operator&(const Formula& a, const Formula& b) { return Formula::conjunction({a, b}); }
Formula operator|(const Formula& a, const Formula& b) { return Formula::disjunction({a, b}); }

// ----------------------------------------------------------------- Operations

bool evaluate(const Formula& f, const Valuation& v) {
  return evaluateWith(
      f,
      [&](VarId x) {
        if (x >= v.size()) throw DomainError("valuation has no value for variable " + std::to_string(x));
        return v[x];
      },
      [](std::uint32_t, std::uint32_t) -> bool {
        throw DomainError("cannot evaluate a formula with parameter atoms");
      });
}

namespace {

Formula canonicalJunction(Op op, std::span<const Formula> kids) {
  const bool isAnd = op == Op::And;
  std::vector<Formula> flat;
  flat.reserve(kids.size());
  for (const Formula& raw : kids) {
    Formula c = canonicalize(raw);
    if (c.op() == Op::Const) {
      if (c.value() == isAnd) continue;    // neutral element
      return Formula::constant(!isAnd);    // absorbing element
    }
    if (c.op() == op) {
      for (const Formula& g : c.children()) flat.push_back(g);
    } else {
      flat.push_back(std::move(c));
    }
  }
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  return isAnd ? Formula::allOf(std::move(flat)) : Formula::anyOf(std::move(flat));
}

}  // namespace

Formula canonicalize(const Formula& f) {
  switch (f.op()) {
    case Op::Const:
    case Op::Var:
    case Op::Atom:
      return f;
    case Op::Not: {
      Formula c = canonicalize(f.children()[0]);
      if (c.op() == Op::Const) return Formula::constant(!c.value());
      if (c.op() == Op::Not) return c.children()[0];
      return Formula::negation(std::move(c));
    }
    case Op::And:
    case Op::Or:
      return canonicalJunction(f.op(), f.children());
    case Op::Exactly: {
      std::int64_t k = f.k();
      std::vector<Formula> rest;
      for (const Formula& raw : f.children()) {
        Formula c = canonicalize(raw);
        if (c.op() == Op::Const) {
          if (c.value()) --k;
          continue;
        }
        rest.push_back(std::move(c));
      }
      if (k < 0 || k > static_cast<std::int64_t>(rest.size())) return Formula::constant(false);
      if (rest.empty()) return Formula::constant(true);
      if (rest.size() == 1) return k == 1 ? rest.front() : canonicalize(Formula::negation(rest.front()));
      std::sort(rest.begin(), rest.end());
      return Formula::exactly(static_cast<std::uint32_t>(k), std::move(rest));
    }
  }
  return f;
}

namespace {

template <class Fn>
Formula rebuild(const Formula& f, const Fn& leaf) {
  switch (f.op()) {
    case Op::Const:
      return f;
    case Op::Var:
    case Op::Atom:
      return leaf(f);
    case Op::Not:
      return Formula::negation(rebuild(f.children()[0], leaf));
    default: {
      std::vector<Formula> kids;
      kids.reserve(f.children().size());
      for (const Formula& c : f.children()) kids.push_back(rebuild(c, leaf));
      if (f.op() == Op::And) return Formula::conjunction(std::move(kids));
      if (f.op() == Op::Or) return Formula::disjunction(std::move(kids));
      return Formula::exactly(f.k(), std::move(kids));
    }
  }
}

}  // namespace

Formula applyPermutation(const Formula& f, std::span<const VarId> perm) {
  std::vector<char> seen(perm.size(), 0);
  for (VarId p : perm) {
    if (p >= perm.size() || seen[p]) throw DomainError("permutation is not a bijection");
    seen[p] = 1;
  }
  return rebuild(f, [&](const Formula& leaf) {
    if (leaf.op() != Op::Var) return leaf;
    if (leaf.var() >= perm.size()) throw DomainError("permutation does not cover variable");
    return Formula::variable(perm[leaf.var()]);
  });
}

Formula substitute(const Formula& f, const std::function<std::optional<bool>(VarId)>& value) {
  return rebuild(f, [&](const Formula& leaf) {
    if (leaf.op() != Op::Var) return leaf;
    auto v = value(leaf.var());
    return v ? Formula::constant(*v) : leaf;
  });
}

Formula instantiate(const Formula& f, const std::function<Formula(std::uint32_t, std::uint32_t)>& atom) {
  return rebuild(f, [&](const Formula& leaf) {
    if (leaf.op() != Op::Atom) return leaf;
    return atom(leaf.attribute(), leaf.position());
  });
}

namespace {

template <class Fn>
void visit(const Formula& f, const Fn& fn) {
  fn(f);
  for (const Formula& c : f.children()) visit(c, fn);
}

}  // namespace

std::vector<VarId> variablesOf(const Formula& f) {
  std::vector<VarId> out;
  visit(f, [&](const Formula& n) {
    if (n.op() == Op::Var) out.push_back(n.var());
  });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool containsAtoms(const Formula& f) { return maxAtomPosition(f) > 0; }

std::uint32_t maxAtomPosition(const Formula& f) {
  std::uint32_t m = 0;
  visit(f, [&](const Formula& n) {
    if (n.op() == Op::Atom) m = std::max(m, n.position());
  });
  return m;
}

namespace {

void render(std::ostringstream& os, const Formula& f, const Vocabulary& vocab,
            const std::vector<std::string>& attrs, bool nested) {
  switch (f.op()) {
    case Op::Const:
      os << (f.value() ? "true" : "false");
      return;
    case Op::Var:
      os << vocab.name(f.var());
      return;
    case Op::Atom:
      if (f.attribute() < attrs.size())
        os << attrs[f.attribute()];
      else
        os << 'a' << f.attribute();
      os << "($" << f.position() << ')';
      return;
    case Op::Not:
      os << '!';
      render(os, f.children()[0], vocab, attrs, true);
      return;
    case Op::And:
    case Op::Or: {
      if (nested) os << '(';
      const char* sep = f.op() == Op::And ? " & " : " | ";
      bool first = true;
      for (const Formula& c : f.children()) {
        if (!first) os << sep;
        render(os, c, vocab, attrs, true);
        first = false;
      }
      if (nested) os << ')';
      return;
    }
    case Op::Exactly: {
      os << "exactly" << f.k() << '(';
      bool first = true;
      for (const Formula& c : f.children()) {
        if (!first) os << ", ";
        render(os, c, vocab, attrs, false);
        first = false;
      }
      os << ')';
      return;
    }
  }
}

}  // namespace

std::string toString(const Formula& f, const Vocabulary& vocab, const std::vector<std::string>& attributeNames) {
  std::ostringstream os;
  render(os, f, vocab, attributeNames, false);
  return os.str();
}

}  // namespace cobra
