#pragma once

// Sectioned text format for games, compressions, strategies, common/private
// splits and belief systems.
//
//   [players]               A B
//   [horizon]               2
//   [spaces]                state t=1 : x=-1 x=+1     (t = 1..T+1)
//                           info A : x=-1 x=+1
//                           action t=1 A : -1 +1
//                           increment t=1 A : U=-1;X=-1 ...
//                           recall t=1 A : -1 ...     (own action per increment)
//   [initial]               x | h^1 .. h^n : p
//   [kernel t=1]            x | u^1 .. u^n -> x' | z^1 .. z^n : p
//   [rewards]               bound : 2
//                           t=1 x | u^1 .. u^n : r^1 .. r^n   (absent rows are 0)
//   [compression i=A]       labels t=1 : k ...
//                           init h1 -> k
//                           t=2 k | z -> k'
//   [strategy name=s player=A]   t=1 <history> : p ...  (absent rows are uniform)
//   [split]                 t=2 A <history> -> common | private
//   [belief name=mu strategy=s]  t=2 A <history> -> x | h^1 .. h^n : p
//
// Histories are written "h1/z1/z2". Numbers are decimals or fractions p/q.
// '#' starts a comment. Labels may not contain whitespace, ':', '|', '#' or
// "->"; labels of spaces may not contain '/' either (K labels may).

#include <optional>
#include <string>
#include <vector>

#include "dyngame/equilibrium.hpp"
#include "dyngame/game.hpp"

namespace dyngame {

struct Example;

struct NamedStrategy {
  std::string name;
  int player = 0;
  Strategy strategy;
};

struct NamedBelief {
  std::string name;
  std::string strategy;
  std::vector<std::vector<std::vector<std::vector<BeliefEntry>>>> belief;  // [i][t][h]
};

struct GameDocument {
  GameSpec game;
  Histories hs;
  std::vector<std::optional<Compression>> compressions;  // [i]
  std::vector<NamedStrategy> strategies;
  std::optional<InfoSplit> split;
  std::vector<NamedBelief> beliefs;

  std::vector<std::string> strategy_names() const;
  // Players without a strategy of that name play uniformly. Throws BadParameter on an unknown name.
  Profile profile(const std::string& name) const;
  // Empty name picks the first belief system.
  Assessment assessment(const std::string& belief_name = "") const;
  // Declared compressions, identity where absent.
  std::vector<Compression> compression_profile() const;
};

double parse_number(const std::string& text);  // decimal or p/q; throws BadParameter
std::string format_number(double v);           // shortest exact decimal or small fraction

GameDocument parse_gamespec(const std::string& text);
GameDocument load_gamespec(const std::string& path);
std::string serialize_gamespec(const GameDocument& doc);

GameDocument document_from_example(const Example& ex);

// Same labels and spaces, same kernel and initial law as merged maps, rewards within tol.
bool structurally_equal(const GameSpec& a, const GameSpec& b, double tol = 1e-12, std::string* why = nullptr);
bool documents_equal(const GameDocument& a, const GameDocument& b, double tol = 1e-12, std::string* why = nullptr);

}  // namespace dyngame
