#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cobra/cnf.hpp"

namespace cobra {

// Conflict-driven clause-learning solver: two watched literals, first-UIP learning,
// activity-based branching with phase saving, Luby restarts. Clauses may be added
// between calls to solve(); assumptions are retracted after each call.
class SatSolver {
 public:
  SatSolver() = default;
  explicit SatSolver(const Cnf& cnf);

  int newVariable();
  int variableCount() const { return static_cast<int>(assigns_.size()); }
  // Returns false once the clause set is known to be unsatisfiable.
  bool addClause(std::span<const Lit> clause);
  bool addClause(std::initializer_list<Lit> clause) {
    return addClause(std::span<const Lit>(clause.begin(), clause.size()));
  }

  bool solve(std::span<const Lit> assumptions = {});
  // Value of a DIMACS variable in the last model.
  bool modelValue(int var) const { return model_[var - 1] != 0; }

  std::uint64_t conflicts() const { return conflicts_; }

 private:
  using L = std::uint32_t;  // 2*v + sign
  static L fromDimacs(Lit l) { return l > 0 ? 2u * (l - 1) : 2u * (-l - 1) + 1; }
  static L neg(L l) { return l ^ 1u; }
  static std::uint32_t varOf(L l) { return l >> 1; }

  enum : std::int8_t { kFalse = 0, kTrue = 1, kUndef = 2 };

  std::int8_t value(L l) const {
    const std::int8_t a = assigns_[varOf(l)];
    if (a == kUndef) return kUndef;
    return (a == kTrue) != static_cast<bool>(l & 1u) ? kTrue : kFalse;
  }

  struct Clause {
    std::vector<L> lits;
    bool learnt = false;
  };

  void ensureVariable(std::uint32_t v);
  void assign(L l, int reason);
  int propagate();  // index of conflicting clause or -1
  void analyze(int conflict, std::vector<L>& learnt, int& backLevel);
  void backtrack(int level);
  L pickBranch();
  void bump(std::uint32_t v);
  void heapInsert(std::uint32_t v);
  void heapUp(std::size_t i);
  void heapDown(std::size_t i);
  std::uint32_t heapPop();
  int level() const { return static_cast<int>(trailLim_.size()); }
  void attach(int ci);

  std::vector<Clause> clauses_;
  std::vector<std::vector<int>> watches_;  // per literal: clauses watching its negation becoming false
  std::vector<std::int8_t> assigns_;
  std::vector<std::int8_t> phase_;
  std::vector<int> levels_;
  std::vector<int> reasons_;
  std::vector<L> trail_;
  std::vector<int> trailLim_;
  std::size_t qhead_ = 0;
  std::vector<double> activity_;
  double bumpAmount_ = 1.0;
  std::vector<std::uint32_t> heap_;
  std::vector<int> heapIndex_;
  std::vector<char> seen_;
  std::vector<std::int8_t> model_;
  bool ok_ = true;
  std::uint64_t conflicts_ = 0;
};

}  // namespace cobra
