#include "cobra/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace cobra {

std::string format(const Diagnostic& d, const std::string& origin) {
  std::ostringstream os;
  os << (origin.empty() ? "<input>" : origin) << ':' << d.line << ':' << d.column << ": "
     << (d.severity == Diagnostic::Severity::Error ? "error" : "warning") << ": " << d.message;
  return os.str();
}

namespace {

enum class Tok { Ident, Int, Dollar, String, LParen, RParen, LBrace, RBrace, Comma, Bang, Amp, Pipe, Arrow,
                 Implies, Iff, Less, Greater, Bad, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

const std::set<std::string> kKeywords = {"VARS", "CONSTRAINT", "PARAMS", "ATTR", "EXPERIMENT", "INSTANCES", "OUTCOME"};

std::vector<Token> lex(const std::string& s, std::vector<Diagnostic>& diags) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < s.size(); ++k, ++i) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < s.size()) {
    const char ch = s[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      advance(1);
      continue;
    }
    if (ch == '#') {
      while (i < s.size() && s[i] != '\n') advance(1);
      continue;
    }
    const int l = line;
    const int c = col;
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '\'')) ++j;
      out.push_back({Tok::Ident, s.substr(i, j - i), l, c});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Tok::Int, s.substr(i, j - i), l, c});
      advance(j - i);
      continue;
    }
    if (ch == '"') {
      std::string text;
      std::size_t j = i + 1;
      bool closed = false;
      while (j < s.size() && s[j] != '\n') {
        if (s[j] == '\\' && j + 1 < s.size()) {
          text += s[j + 1];
          j += 2;
          continue;
        }
        if (s[j] == '"') {
          closed = true;
          break;
        }
        text += s[j++];
      }
      if (!closed) diags.push_back({Diagnostic::Severity::Error, "unterminated string", l, c});
      out.push_back({Tok::String, text, l, c});
      advance(j + (closed ? 1 : 0) - i);
      continue;
    }
    auto two = s.compare(i, 2, "->") == 0 ? Tok::Arrow : s.compare(i, 2, "=>") == 0 ? Tok::Implies : Tok::Bad;
    if (two != Tok::Bad) {
      out.push_back({two, s.substr(i, 2), l, c});
      advance(2);
      continue;
    }
    if (s.compare(i, 3, "<->") == 0 || s.compare(i, 3, "<=>") == 0) {
      out.push_back({Tok::Iff, s.substr(i, 3), l, c});
      advance(3);
      continue;
    }
    Tok k = Tok::Bad;
    switch (ch) {
      case '$': k = Tok::Dollar; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '{': k = Tok::LBrace; break;
      case '}': k = Tok::RBrace; break;
      case ',': k = Tok::Comma; break;
      case '!': k = Tok::Bang; break;
      case '&': k = Tok::Amp; break;
      case '|': k = Tok::Pipe; break;
      case '<': k = Tok::Less; break;
      case '>': k = Tok::Greater; break;
      default: break;
    }
    if (k == Tok::Bad) diags.push_back({Diagnostic::Severity::Error, std::string("unexpected character '") + ch + "'", l, c});
    out.push_back({k, std::string(1, ch), l, c});
    advance(1);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

struct ParseFailure {};

class Parser {
 public:
  Parser(std::vector<Token> toks, std::vector<Diagnostic>& diags) : toks_(std::move(toks)), diags_(diags) {}

  std::optional<DeductiveGame> run();

 private:
  const Token& peek(std::size_t off = 0) const { return toks_[std::min(pos_ + off, toks_.size() - 1)]; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool isKeyword(const Token& t) const { return t.kind == Tok::Ident && kKeywords.count(t.text); }
  bool atKeyword(const char* kw) const { return peek().kind == Tok::Ident && peek().text == kw; }
  bool atSectionStart() const {
    return peek().kind == Tok::End ||
           (isKeyword(peek()) && peek().text != "INSTANCES" && peek().text != "OUTCOME");
  }

  [[noreturn]] void fail(const Token& at, const std::string& msg) {
    error(at, msg);
    throw ParseFailure{};
  }
  void error(const Token& at, const std::string& msg) {
    diags_.push_back({Diagnostic::Severity::Error, msg, at.line, at.column});
  }
  const Token& expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(peek(), std::string("expected ") + what + describeFound());
    return next();
  }
  std::string describeFound() const {
    const Token& t = peek();
    if (t.kind == Tok::End) return " but reached end of input";
    return " but found '" + t.text + "'";
  }
  void skipToSection() {
    while (!atSectionStart()) next();
  }
  void skipToOutcomeOrSection() {
    while (!atSectionStart() && !atKeyword("OUTCOME")) next();
  }

  std::vector<Token> identList() {
    std::vector<Token> out;
    while (peek().kind == Tok::Ident && !isKeyword(peek())) {
      out.push_back(next());
      if (peek().kind == Tok::Comma) next();
    }
    return out;
  }

  // formula grammar
  Formula parseFormula(std::uint32_t arity, bool allowAtoms);
  Formula parseOr();
  Formula parseAnd();
  Formula parseUnary();
  Formula parsePrimary();

  void parseVars();
  void parseConstraint();
  void parseParams();
  void parseAttr();
  void parseExperiment();

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic>& diags_;

  Vocabulary vars_;
  std::optional<Formula> constraint_;
  std::vector<std::string> params_;
  std::map<std::string, std::uint32_t> paramIndex_;
  std::vector<Attribute> attrs_;
  std::map<std::string, std::uint32_t> attrIndex_;
  std::map<VarId, std::string> imageOwner_;
  std::vector<ParameterizedExperiment> experiments_;
  std::vector<Token> experimentTokens_;

  // formula context
  std::uint32_t arity_ = 0;
  bool allowAtoms_ = false;
};

Formula Parser::parseFormula(std::uint32_t arity, bool allowAtoms) {
  arity_ = arity;
  allowAtoms_ = allowAtoms;
  Formula f = parseOr();
  const Token& t = peek();
  if (t.kind == Tok::Arrow || t.kind == Tok::Implies || t.kind == Tok::Iff) fail(t, "implication not allowed");
  return f;
}

Formula Parser::parseOr() {
  std::vector<Formula> parts{parseAnd()};
  while (peek().kind == Tok::Pipe) {
    next();
    parts.push_back(parseAnd());
  }
  return Formula::anyOf(std::move(parts));
}

Formula Parser::parseAnd() {
  std::vector<Formula> parts{parseUnary()};
  while (peek().kind == Tok::Amp) {
    next();
    parts.push_back(parseUnary());
  }
  return Formula::allOf(std::move(parts));
}

Formula Parser::parseUnary() {
  if (peek().kind == Tok::Bang) {
    next();
    return Formula::negation(parseUnary());
  }
  return parsePrimary();
}

Formula Parser::parsePrimary() {
  const Token& t = peek();
  if (t.kind == Tok::LParen) {
    next();
    Formula f = parseOr();
    if (peek().kind == Tok::Arrow || peek().kind == Tok::Implies || peek().kind == Tok::Iff)
      fail(peek(), "implication not allowed");
    expect(Tok::RParen, "')'");
    return f;
  }
  if (t.kind != Tok::Ident || isKeyword(t)) fail(t, "expected a formula" + describeFound());
  const Token id = next();
  if (id.text == "true") return Formula::constant(true);
  if (id.text == "false") return Formula::constant(false);

  // exactly<k>(...) written as exactlyK(...) or exactly<K>(...)
  std::optional<std::uint32_t> k;
  if (id.text.rfind("exactly", 0) == 0 && peek().kind == Tok::LParen && id.text.size() > 7) {
    const std::string digits = id.text.substr(7);
    if (std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      k = static_cast<std::uint32_t>(std::stoul(digits));
  } else if (id.text == "exactly" && peek().kind == Tok::Less) {
    next();
    k = static_cast<std::uint32_t>(std::stoul(expect(Tok::Int, "a count").text));
    expect(Tok::Greater, "'>'");
  }
  if (k) {
    const Token& open = expect(Tok::LParen, "'('");
    std::vector<Formula> kids{parseOr()};
    while (peek().kind == Tok::Comma) {
      next();
      kids.push_back(parseOr());
    }
    expect(Tok::RParen, "')'");
    if (*k > kids.size())
      fail(open, "exactly" + std::to_string(*k) + " has only " + std::to_string(kids.size()) + " operands");
    return Formula::exactly(*k, std::move(kids));
  }

  if (peek().kind == Tok::LParen) {
    auto a = attrIndex_.find(id.text);
    if (a == attrIndex_.end()) fail(id, "undeclared attribute '" + id.text + "'");
    if (!allowAtoms_) fail(id, "parameter atoms are only allowed in outcomes");
    next();
    expect(Tok::Dollar, "'$'");
    const Token& num = expect(Tok::Int, "a parameter index");
    const auto j = static_cast<std::uint32_t>(std::stoul(num.text));
    if (j < 1 || j > arity_)
      fail(num, "parameter index $" + num.text + " exceeds the experiment arity " + std::to_string(arity_));
    expect(Tok::RParen, "')'");
    return Formula::atom(a->second, j);
  }
  auto v = vars_.find(id.text);
  if (!v) fail(id, "undeclared variable '" + id.text + "'");
  return Formula::variable(*v);
}

void Parser::parseVars() {
  const Token kw = next();
  const auto names = identList();
  if (names.empty()) error(kw, "VARS declares no variables");
  for (const auto& n : names) {
    if (vars_.find(n.text)) {
      error(n, "duplicate variable '" + n.text + "'");
      continue;
    }
    vars_.add(n.text);
  }
  if (!atSectionStart()) fail(peek(), "expected a variable name" + describeFound());
}

void Parser::parseConstraint() {
  next();
  constraint_ = parseFormula(0, false);
  if (!atSectionStart()) fail(peek(), "unexpected '" + peek().text + "' after the constraint");
}

void Parser::parseParams() {
  const Token kw = next();
  const auto names = identList();
  if (names.empty()) error(kw, "PARAMS declares no parameters");
  for (const auto& n : names) {
    if (paramIndex_.count(n.text)) {
      error(n, "duplicate parameter '" + n.text + "'");
      continue;
    }
    paramIndex_[n.text] = static_cast<std::uint32_t>(params_.size());
    params_.push_back(n.text);
  }
  if (!atSectionStart()) fail(peek(), "expected a parameter name" + describeFound());
}

void Parser::parseAttr() {
  next();
  const Token name = expect(Tok::Ident, "an attribute name");
  if (attrIndex_.count(name.text)) fail(name, "duplicate attribute '" + name.text + "'");
  expect(Tok::LBrace, "'{'");
  Attribute attr{name.text, std::vector<VarId>(params_.size(), 0)};
  std::vector<char> mapped(params_.size(), 0);
  while (peek().kind != Tok::RBrace) {
    const Token p = expect(Tok::Ident, "a parameter");
    expect(Tok::Arrow, "'->'");
    const Token x = expect(Tok::Ident, "a variable");
    if (peek().kind == Tok::Comma) next();
    auto pi = paramIndex_.find(p.text);
    if (pi == paramIndex_.end()) fail(p, "undeclared parameter '" + p.text + "'");
    auto xi = vars_.find(x.text);
    if (!xi) fail(x, "undeclared variable '" + x.text + "'");
    if (mapped[pi->second]) fail(p, "parameter '" + p.text + "' mapped twice in '" + name.text + "'");
    if (auto owner = imageOwner_.find(*xi); owner != imageOwner_.end())
      fail(x, "variable '" + x.text + "' already lies in the image of '" + owner->second + "'");
    imageOwner_[*xi] = name.text;
    mapped[pi->second] = 1;
    attr.image[pi->second] = *xi;
  }
  const Token close = next();
  for (std::size_t a = 0; a < params_.size(); ++a)
    if (!mapped[a]) fail(close, "attribute '" + name.text + "' does not map parameter '" + params_[a] + "'");
  attrIndex_[name.text] = static_cast<std::uint32_t>(attrs_.size());
  attrs_.push_back(std::move(attr));
}

void Parser::parseExperiment() {
  const Token kw = next();
  const Token name = expect(Tok::Ident, "an experiment name");
  for (const auto& e : experiments_)
    if (e.name == name.text) fail(name, "duplicate experiment '" + name.text + "'");
  ParameterizedExperiment t;
  t.name = name.text;
  expect(Tok::LParen, "'('");
  const Token arity = expect(Tok::Int, "an arity");
  expect(Tok::RParen, "')'");
  t.arity = static_cast<std::uint32_t>(std::stoul(arity.text));
  if (!atKeyword("INSTANCES")) fail(peek(), "expected INSTANCES" + describeFound());
  next();
  const Token kind = expect(Tok::Ident, "'distinct' or 'all'");
  if (kind.text == "distinct")
    t.kind = InstanceKind::DistinctTuples;
  else if (kind.text == "all")
    t.kind = InstanceKind::AllTuples;
  else
    fail(kind, "expected 'distinct' or 'all' but found '" + kind.text + "'");
  if (t.kind == InstanceKind::DistinctTuples && t.arity > params_.size())
    error(arity, "arity " + arity.text + " exceeds the " + std::to_string(params_.size()) + " declared parameters");
  if (!atKeyword("OUTCOME")) fail(peek(), "expected OUTCOME" + describeFound());
  bool broken = false;
  while (atKeyword("OUTCOME")) {
    next();
    OutcomeTemplate o;
    if (peek().kind == Tok::String) o.label = next().text;
    try {
      o.formula = parseFormula(t.arity, true);
      if (!atSectionStart() && !atKeyword("OUTCOME")) fail(peek(), "unexpected '" + peek().text + "' after outcome");
    } catch (const ParseFailure&) {
      broken = true;
      skipToOutcomeOrSection();
      continue;
    }
    t.outcomes.push_back(std::move(o));
  }
  if (broken) throw ParseFailure{};
  experimentTokens_.push_back(kw);
  experiments_.push_back(std::move(t));
}

std::optional<DeductiveGame> Parser::run() {
  static const std::vector<std::string> order = {"VARS", "CONSTRAINT", "PARAMS", "ATTR", "EXPERIMENT"};
  std::size_t stage = 0;  // index into order of the next expected section
  std::set<std::string> seen;
  while (peek().kind != Tok::End) {
    const Token t = peek();
    if (!isKeyword(t) || t.text == "INSTANCES" || t.text == "OUTCOME") {
      error(t, "expected a section keyword but found '" + t.text + "'");
      next();
      skipToSection();
      continue;
    }
    const auto at = static_cast<std::size_t>(std::find(order.begin(), order.end(), t.text) - order.begin());
    // Report every required section that was skipped.
    for (std::size_t s = stage; s < at; ++s)
      if (order[s] != "ATTR" && !seen.count(order[s])) {
        error(t, "missing " + order[s] + " before " + t.text);
        seen.insert(order[s]);  // report once
      }
    if (at < stage && (at < 3 || t.text == "ATTR")) error(t, t.text + " section out of order");
    if ((t.text == "VARS" || t.text == "CONSTRAINT" || t.text == "PARAMS") && seen.count(t.text))
      error(t, "duplicate " + t.text + " section");
    seen.insert(t.text);
    stage = std::max(stage, t.text == "ATTR" || t.text == "EXPERIMENT" ? at : at + 1);
    try {
      if (t.text == "VARS") parseVars();
      else if (t.text == "CONSTRAINT") parseConstraint();
      else if (t.text == "PARAMS") parseParams();
      else if (t.text == "ATTR") parseAttr();
      else parseExperiment();
    } catch (const ParseFailure&) {
      skipToSection();
    }
  }
  const Token& end = peek();
  for (const char* s : {"VARS", "CONSTRAINT", "PARAMS"})
    if (!seen.count(s)) error(end, std::string("missing ") + s + " section");
  if (experiments_.empty() && !seen.count("EXPERIMENT")) error(end, "missing EXPERIMENT section");

  for (const auto& d : diags_)
    if (d.severity == Diagnostic::Severity::Error) return std::nullopt;
  try {
    DeductiveGame g(vars_, *constraint_, params_, attrs_, experiments_);
    for (std::uint32_t t = 0; t < g.experiments().size(); ++t) {
      const auto report = isFaithful(g, t);
      if (!report.faithful && report.reason.find("X_t") != std::string::npos)
        error(experimentTokens_[t], "experiment '" + g.experiment(t).name + "': " + report.reason);
    }
    if (!diags_.empty()) return std::nullopt;
    return g;
  } catch (const DefinitionError& e) {
    const Token& at = experimentTokens_.empty() ? toks_.front() : experimentTokens_.front();
    error(at, e.what());
    return std::nullopt;
  }
}

}  // namespace

ParseResult parse(const GameSource& src) {
  ParseResult result;
  auto tokens = lex(src.text, result.diagnostics);
  Parser parser(std::move(tokens), result.diagnostics);
  auto game = parser.run();
  bool hasError = false;
  for (const auto& d : result.diagnostics) hasError |= d.severity == Diagnostic::Severity::Error;
  if (!hasError) result.game = std::move(game);
  return result;
}

GameSource loadGameFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open game file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return GameSource{os.str(), path};
}

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

void wrapList(std::ostringstream& os, const char* keyword, const std::vector<std::string>& items) {
  os << keyword;
  std::size_t width = std::string(keyword).size();
  for (const auto& s : items) {
    if (width + s.size() + 1 > 100) {
      os << "\n ";
      width = 1;
    }
    os << ' ' << s;
    width += s.size() + 1;
  }
  os << '\n';
}

}  // namespace

std::string serialize(const DeductiveGame& g) {
  std::ostringstream os;
  wrapList(os, "VARS", g.variables().names());
  os << "CONSTRAINT " << toString(g.initial(), g.variables()) << '\n';
  wrapList(os, "PARAMS", g.params());
  for (const auto& a : g.attributes()) {
    os << "ATTR " << a.name << " {";
    for (std::size_t p = 0; p < g.params().size(); ++p)
      os << (p % 8 == 0 ? "\n  " : " ") << g.params()[p] << " -> " << g.variables().name(a.image[p]);
    os << "\n}\n";
  }
  for (const auto& t : g.experiments()) {
    os << "EXPERIMENT " << t.name << '(' << t.arity << ") INSTANCES "
       << (t.kind == InstanceKind::DistinctTuples ? "distinct" : "all") << '\n';
    for (const auto& o : t.outcomes) {
      os << "  OUTCOME ";
      if (!o.label.empty()) os << quote(o.label) << ' ';
      os << toString(o.formula, g.variables(), g.attributeNames()) << '\n';
    }
  }
  return os.str();
}

}  // namespace cobra
