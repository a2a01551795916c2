#include "cobra/cnf.hpp"

namespace cobra {

CnfEncoder::CnfEncoder(std::size_t originalVariables) {
  cnf_.originalVariables = static_cast<int>(originalVariables);
  cnf_.variables = static_cast<int>(originalVariables);
}

int CnfEncoder::newVariable() { return ++cnf_.variables; }

void CnfEncoder::addClause(std::vector<Lit> clause) { cnf_.clauses.push_back(std::move(clause)); }

Lit CnfEncoder::constant(bool value) {
  if (true_ == 0) {
    true_ = newVariable();
    addClause({true_});
  }
  return value ? true_ : -true_;
}

void CnfEncoder::assertFormula(const Formula& f) {
  switch (f.op()) {
    case Op::And:
      for (const Formula& c : f.children()) assertFormula(c);
      return;
    case Op::Or: {
      std::vector<Lit> clause;
      for (const Formula& c : f.children()) clause.push_back(encode(c));
      addClause(std::move(clause));
      return;
    }
    case Op::Const:
      if (!f.value()) addClause({});
      return;
    default:
      addClause({encode(f)});
  }
}

Lit CnfEncoder::encode(const Formula& f) {
  switch (f.op()) {
    case Op::Const:
      return constant(f.value());
    case Op::Var:
      if (static_cast<int>(f.var()) >= cnf_.originalVariables)
        throw DomainError("variable " + std::to_string(f.var()) + " outside the vocabulary");
      return static_cast<Lit>(f.var()) + 1;
    case Op::Atom:
      throw DomainError("cannot encode a formula with parameter atoms");
    case Op::Not:
      return -encode(f.children()[0]);
    case Op::And:
    case Op::Or: {
      std::vector<Lit> in;
      for (const Formula& c : f.children()) in.push_back(encode(c));
      const Lit o = newVariable();
      if (f.op() == Op::And) {
        std::vector<Lit> big{o};
        for (Lit l : in) {
          addClause({-o, l});
          big.push_back(-l);
        }
        addClause(std::move(big));
      } else {
        std::vector<Lit> big{-o};
        for (Lit l : in) {
          addClause({o, -l});
          big.push_back(l);
        }
        addClause(std::move(big));
      }
      return o;
    }
    case Op::Exactly: {
      std::vector<Lit> in;
      for (const Formula& c : f.children()) in.push_back(encode(c));
      return encodeExactly(f.k(), in);
    }
  }
  return constant(false);
}

// Sequential counter: s[j] after reading i inputs means "at least j of them are true",
// for j = 1..k+1. Each register is defined by an equivalence.
Lit CnfEncoder::encodeExactly(std::uint32_t k, const std::vector<Lit>& inputs) {
  const std::size_t width = k + 1;
  const Lit f = constant(false);
  const Lit t = constant(true);
  std::vector<Lit> prev(width + 1, f);  // prev[0] is "at least 0", always true
  prev[0] = t;
  for (Lit x : inputs) {
    std::vector<Lit> cur(width + 1, f);
    cur[0] = t;
    for (std::size_t j = 1; j <= width; ++j) {
      const Lit s = newVariable();
      const Lit keep = prev[j];
      const Lit step = prev[j - 1];
      // s <-> keep | (step & x)
      addClause({-s, keep, step});
      addClause({-s, keep, x});
      addClause({-keep, s});
      addClause({-step, -x, s});
      cur[j] = s;
    }
    prev = std::move(cur);
  }
  const Lit atLeastK = prev[k];
  const Lit atLeastK1 = prev[k + 1];
  const Lit o = newVariable();
  // o <-> atLeastK & !atLeastK1
  addClause({-o, atLeastK});
  addClause({-o, -atLeastK1});
  addClause({o, -atLeastK, atLeastK1});
  return o;
}

Cnf toCnf(const Formula& f, std::size_t originalVariables) {
  CnfEncoder enc(originalVariables);
  enc.assertFormula(f);
  return enc.take();
}

}  // namespace cobra
