#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cobra/game.hpp"

namespace cobra {

struct GameSource {
  std::string text;
  std::string origin;  // file path or generator tag
};

struct Diagnostic {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  std::string message;
  int line = 0;
  int column = 0;
};

std::string format(const Diagnostic& d, const std::string& origin);

struct ParseResult {
  std::optional<DeductiveGame> game;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return game.has_value(); }
};

// Never throws on malformed input; problems come back as diagnostics.
ParseResult parse(const GameSource& src);
GameSource loadGameFile(const std::string& path);  // throws DomainError when unreadable
std::string serialize(const DeductiveGame& g);

enum class MastermindVariant { Classic, Col, Pos };

DeductiveGame genCCP(int coins, std::vector<Diagnostic>* warnings = nullptr);
DeductiveGame genMastermind(int pegs, int colors, MastermindVariant variant = MastermindVariant::Classic);

// "ccp:N" or "mm:P:C[:col|:pos]"
DeductiveGame generateFromSpec(const std::string& spec, std::vector<Diagnostic>* warnings = nullptr);

}  // namespace cobra
