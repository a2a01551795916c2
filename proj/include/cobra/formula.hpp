#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cobra/errors.hpp"

namespace cobra {

using VarId = std::uint32_t;

// Ordered set of named propositional variables. Ids follow declaration order.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(const std::vector<std::string>& names);

  VarId add(const std::string& name);
  std::optional<VarId> find(std::string_view name) const;
  VarId id(std::string_view name) const;
  const std::string& name(VarId v) const;
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, VarId> index_;
};

// Total assignment of truth values to the variables of a vocabulary.
class Valuation {
 public:
  Valuation() = default;
  explicit Valuation(std::size_t n, bool value = false) : bits_(n, value ? 1 : 0) {}

  bool operator[](VarId v) const { return bits_[v] != 0; }
  void set(VarId v, bool value) { bits_[v] = value ? 1 : 0; }
  std::size_t size() const { return bits_.size(); }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  friend bool operator==(const Valuation&, const Valuation&) = default;
  friend auto operator<=>(const Valuation&, const Valuation&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

std::string toString(const Valuation& v, const Vocabulary& vocab);

// Node kinds in structural order. Const and Atom extend the order: constants come
// first, parameter atoms right after variables.
enum class Op : std::uint8_t { Const, Var, Atom, Not, And, Or, Exactly };

// Immutable formula tree with shared subterms. Atom(f, j) stands for f($j) inside
// outcome templates and must be instantiated before evaluation.
class Formula {
 public:
  Formula();  // the constant true

  static Formula constant(bool value);
  static Formula variable(VarId v);
  static Formula atom(std::uint32_t attribute, std::uint32_t position);
  static Formula negation(Formula child);
  // Raw constructors. And/Or need at least two children, Exactly at least one
  // child and k <= |children|.
  static Formula conjunction(std::vector<Formula> children);
  static Formula disjunction(std::vector<Formula> children);
  static Formula exactly(std::uint32_t k, std::vector<Formula> children);
  // Collapsing helpers: empty -> constant, single child -> the child.
  static Formula allOf(std::vector<Formula> children);
  static Formula anyOf(std::vector<Formula> children);
  // At least k of the children hold, expressed with Exactly nodes.
  static Formula atLeast(std::uint32_t k, const std::vector<Formula>& children);

  Op op() const;
  bool value() const;
  VarId var() const;
  std::uint32_t attribute() const;
  std::uint32_t position() const;
  std::uint32_t k() const;
  std::span<const Formula> children() const;
  std::size_t hash() const;
  std::size_t nodeCount() const;
  const void* identity() const { return node_.get(); }

  friend bool operator==(const Formula& a, const Formula& b);
  friend std::strong_ordering operator<=>(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Formula make(Op op, std::uint32_t a, std::uint32_t b, std::vector<Formula> children);

  std::shared_ptr<const Node> node_;
};

struct FormulaHash {
  std::size_t operator()(const Formula& f) const { return f.hash(); }
};

Formula operator!(const Formula& f);
Formula operator&(const Formula& a, const Formula& b);
Formula operator|(const Formula& a, const Formula& b);

// Generic evaluation: var(VarId) and atom(attribute, position) supply leaf values.
template <class VarFn, class AtomFn>
bool evaluateWith(const Formula& f, const VarFn& var, const AtomFn& atom) {
  switch (f.op()) {
    case Op::Const:
      return f.value();
    case Op::Var:
      return var(f.var());
    case Op::Atom:
      return atom(f.attribute(), f.position());
    case Op::Not:
      return !evaluateWith(f.children()[0], var, atom);
    case Op::And:
      for (const Formula& c : f.children())
        if (!evaluateWith(c, var, atom)) return false;
      return true;
    case Op::Or:
      for (const Formula& c : f.children())
        if (evaluateWith(c, var, atom)) return true;
      return false;
    case Op::Exactly: {
      std::uint32_t count = 0;
      const auto kids = f.children();
      const std::size_t n = kids.size();
      for (std::size_t i = 0; i < n; ++i) {
        if (evaluateWith(kids[i], var, atom)) {
          if (++count > f.k()) return false;
        } else if (count + (n - i - 1) < f.k()) {
          return false;
        }
      }
      return count == f.k();
    }
  }
  return false;
}

// Throws DomainError on variables outside v or on uninstantiated atoms.
bool evaluate(const Formula& f, const Valuation& v);

// Flattens nested And/Or, sorts children in structural order, removes duplicate
// And/Or children, removes double negation and folds constants.
Formula canonicalize(const Formula& f);

// perm[v] is the image of variable v; must be a bijection on [0, perm.size()).
Formula applyPermutation(const Formula& f, std::span<const VarId> perm);

// Replaces variables by constants where value(v) is set. Not canonicalized.
Formula substitute(const Formula& f, const std::function<std::optional<bool>(VarId)>& value);

// Replaces atoms by formulas (usually variables). Not canonicalized.
Formula instantiate(const Formula& f, const std::function<Formula(std::uint32_t, std::uint32_t)>& atom);

std::vector<VarId> variablesOf(const Formula& f);
bool containsAtoms(const Formula& f);
std::uint32_t maxAtomPosition(const Formula& f);  // 0 when there is no atom

// Renders in the .cobra formula syntax. attributeName may be empty, then atoms print as a<i>.
std::string toString(const Formula& f, const Vocabulary& vocab,
                     const std::vector<std::string>& attributeNames = {});

}  // namespace cobra
