#include <sstream>

#include "cobra/dsl.hpp"

namespace cobra {

DeductiveGame genCCP(int coins, std::vector<Diagnostic>* warnings) {
  if (coins < 1) throw DefinitionError("CCP needs at least one coin");
  if (coins < 3 && warnings)
    warnings->push_back({Diagnostic::Severity::Warning,
                         "CCP with " + std::to_string(coins) + " coins cannot be solved (needs N >= 3)", 0, 0});
  const auto n = static_cast<std::uint32_t>(coins);
  Vocabulary vars;
  std::vector<Formula> xs;
  std::vector<std::string> params;
  Attribute d{"d", {}};
  for (std::uint32_t i = 1; i <= n; ++i) {
    const VarId x = vars.add("x" + std::to_string(i));
    xs.push_back(Formula::variable(x));
    params.push_back("coin" + std::to_string(i));
    d.image.push_back(x);
  }
  const Formula y = Formula::variable(vars.add("y"));

  std::vector<ParameterizedExperiment> experiments;
  for (std::uint32_t m = 1; m <= n / 2; ++m) {
    std::vector<Formula> left;
    std::vector<Formula> right;
    std::vector<Formula> none;
    for (std::uint32_t j = 1; j <= 2 * m; ++j) {
      const Formula atom = Formula::atom(0, j);
      (j <= m ? left : right).push_back(atom);
      none.push_back(Formula::negation(atom));
    }
    const Formula l = Formula::anyOf(left);
    const Formula r = Formula::anyOf(right);
    ParameterizedExperiment t;
    t.name = "t" + std::to_string(m);
    t.arity = 2 * m;
    t.kind = InstanceKind::DistinctTuples;
    t.outcomes.push_back({"<", (l & !y) | (r & y)});
    t.outcomes.push_back({"=", Formula::allOf(none)});
    t.outcomes.push_back({">", (l & y) | (r & !y)});
    experiments.push_back(std::move(t));
  }
  return DeductiveGame(std::move(vars), Formula::exactly(1, xs), std::move(params), {std::move(d)},
                       std::move(experiments));
}

namespace {

std::string colorName(int j, int colors) {
  if (colors <= 26) return std::string(1, static_cast<char>('A' + j));
  return "c" + std::to_string(j + 1);
}

// M(i, j): the secret's peg i has the color guessed at position j.
Formula match(std::uint32_t peg, std::uint32_t position) { return Formula::atom(peg, position + 1); }

// Number of guess positions j whose color is counted by the total (black + white)
// marker rule: position j counts iff the number of earlier positions with the same
// color is below the number of secret pegs with that color.
Formula totalMarkers(std::uint32_t total, std::uint32_t n) {
  std::vector<Formula> counted;
  for (std::uint32_t j = 0; j < n; ++j) {
    std::vector<Formula> column;
    for (std::uint32_t i = 0; i < n; ++i) column.push_back(match(i, j));
    if (j == 0) {
      counted.push_back(Formula::anyOf(column));
      continue;
    }
    // same[j'] holds iff positions j' and j carry the same color that occurs in the secret
    std::vector<Formula> same;
    for (std::uint32_t jp = 0; jp < j; ++jp) {
      std::vector<Formula> both;
      for (std::uint32_t i = 0; i < n; ++i) both.push_back(match(i, jp) & match(i, j));
      same.push_back(Formula::anyOf(both));
    }
    std::vector<Formula> cases;
    for (std::uint32_t a = 0; a <= j && a < n; ++a)
      cases.push_back(Formula::exactly(a, same) & Formula::atLeast(a + 1, column));
    counted.push_back(Formula::anyOf(cases));
  }
  return Formula::exactly(total, counted);
}

}  // namespace

DeductiveGame genMastermind(int pegs, int colors, MastermindVariant variant) {
  if (pegs < 1 || colors < 1) throw DefinitionError("Mastermind needs at least one peg and one color");
  const auto n = static_cast<std::uint32_t>(pegs);
  const auto c = static_cast<std::uint32_t>(colors);
  Vocabulary vars;
  std::vector<std::string> params;
  for (std::uint32_t j = 0; j < c; ++j) params.push_back(colorName(static_cast<int>(j), colors));
  std::vector<Attribute> attrs;
  std::vector<Formula> rows;
  for (std::uint32_t i = 0; i < n; ++i) {
    Attribute peg{"peg" + std::to_string(i + 1), {}};
    std::vector<Formula> row;
    for (std::uint32_t j = 0; j < c; ++j) {
      const VarId x = vars.add("x" + std::to_string(i + 1) + "_" + params[j]);
      peg.image.push_back(x);
      row.push_back(Formula::variable(x));
    }
    rows.push_back(Formula::exactly(1, row));
    attrs.push_back(std::move(peg));
  }

  std::vector<ParameterizedExperiment> experiments;
  ParameterizedExperiment guess;
  guess.name = "guess";
  guess.arity = n;
  guess.kind = InstanceKind::AllTuples;
  std::vector<Formula> diagonal;
  for (std::uint32_t i = 0; i < n; ++i) diagonal.push_back(match(i, i));
  for (std::uint32_t b = 0; b <= n; ++b)
    for (std::uint32_t w = 0; b + w <= n; ++w) {
      if (b == n - 1 && w == 1) continue;
      const Formula blacks = Formula::exactly(b, diagonal);
      guess.outcomes.push_back(
          {std::to_string(b) + "B" + std::to_string(w) + "W", blacks & totalMarkers(b + w, n)});
    }
  experiments.push_back(std::move(guess));

  if (variant == MastermindVariant::Col) {
    ParameterizedExperiment col;
    col.name = "col";
    col.arity = 1;
    col.kind = InstanceKind::AllTuples;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      std::vector<Formula> lits;
      std::string label;
      for (std::uint32_t i = 0; i < n; ++i) {
        const Formula m = Formula::atom(i, 1);
        const bool here = (mask >> i) & 1u;
        lits.push_back(here ? m : !m);
        if (here) label += (label.empty() ? "" : ",") + std::to_string(i + 1);
      }
      col.outcomes.push_back({label.empty() ? "none" : label, Formula::allOf(lits)});
    }
    experiments.push_back(std::move(col));
  } else if (variant == MastermindVariant::Pos) {
    for (std::uint32_t i = 0; i < n; ++i) {
      ParameterizedExperiment pos;
      pos.name = "pos" + std::to_string(i + 1);
      pos.arity = 0;
      pos.kind = InstanceKind::AllTuples;
      for (std::uint32_t j = 0; j < c; ++j) pos.outcomes.push_back({params[j], Formula::variable(attrs[i].image[j])});
      experiments.push_back(std::move(pos));
    }
  }
  return DeductiveGame(std::move(vars), Formula::allOf(rows), std::move(params), std::move(attrs),
                       std::move(experiments));
}

DeductiveGame generateFromSpec(const std::string& spec, std::vector<Diagnostic>* warnings) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw DomainError("bad number '" + s + "' in generator spec '" + spec + "'");
    return v;
  };
  if (parts.size() == 2 && parts[0] == "ccp") return genCCP(number(parts[1]), warnings);
  if ((parts.size() == 3 || parts.size() == 4) && parts[0] == "mm") {
    MastermindVariant variant = MastermindVariant::Classic;
    if (parts.size() == 4) {
      if (parts[3] == "col")
        variant = MastermindVariant::Col;
      else if (parts[3] == "pos")
        variant = MastermindVariant::Pos;
      else if (parts[3] != "classic")
        throw DomainError("unknown Mastermind variant '" + parts[3] + "'");
    }
    return genMastermind(number(parts[1]), number(parts[2]), variant);
  }
  throw DomainError("unknown generator spec '" + spec + "' (expected ccp:N or mm:P:C[:col|:pos])");
}

}  // namespace cobra
