#pragma once

#include <cstddef>
#include <vector>

#include "cobra/formula.hpp"

namespace cobra {

// Literals use DIMACS conventions: variable v of the vocabulary is v+1, negation is -.
using Lit = int;

struct Cnf {
  int originalVariables = 0;  // variables 1..originalVariables are vocabulary variables
  int variables = 0;          // total, auxiliary ones are above originalVariables
  std::vector<std::vector<Lit>> clauses;
};

// Tseitin encoder. Every auxiliary variable is defined by an equivalence, so each
// assignment of the original variables extends to exactly one model.
class CnfEncoder {
 public:
  explicit CnfEncoder(std::size_t originalVariables);

  // Literal equivalent to f. Atoms are rejected.
  Lit encode(const Formula& f);
  void assertFormula(const Formula& f);
  void addClause(std::vector<Lit> clause);
  int newVariable();

  const Cnf& cnf() const { return cnf_; }
  Cnf take() { return std::move(cnf_); }

 private:
  Lit constant(bool value);
  Lit encodeExactly(std::uint32_t k, const std::vector<Lit>& inputs);

  Cnf cnf_;
  Lit true_ = 0;
};

Cnf toCnf(const Formula& f, std::size_t originalVariables);

}  // namespace cobra
