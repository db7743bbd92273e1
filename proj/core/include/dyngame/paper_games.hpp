#pragma once

// Constructors for the concrete games used throughout the library, each
// bundled with compressions, named strategies and expected results.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dyngame/equilibrium.hpp"
#include "dyngame/game.hpp"

namespace dyngame {

using Params = std::map<std::string, std::string>;

// Where an expected value comes from: the published statement, a hand
// calculation, or an independent routine.
enum class Origin { Reference, Elementary, Oracle };
const char* to_string(Origin o);

struct ExpectationResult {
  std::string name;
  Origin origin = Origin::Reference;
  bool pass = false;
  double delta = 0.0;
  double tol = 0.0;
  std::string detail;
};

struct Example;

struct Expectation {
  std::string name;
  Origin origin = Origin::Reference;
  double tol = 1e-9;
  std::function<ExpectationResult(const Example&)> run;
};

struct Example {
  std::string name;
  Params params;
  GameSpec game;
  Histories hs;
  std::vector<Compression> K;
  std::map<std::string, Profile> strategies;
  std::optional<Assessment> assessment;
  std::optional<InfoSplit> split;
  std::vector<Expectation> expectations;
};

// name in {example1, example2, example3, repeated, maskin_tirole, nayyar, ouyang}.
Example build_example(const std::string& name, const Params& params);
// "example3:c=0.2" or "ouyang:seed=3,obs=1".
Example build_example(const std::string& spec);
std::vector<std::string> fixture_names();  // default fixture set

struct FixtureReport {
  std::string name;
  std::vector<ExpectationResult> results;
  bool pass() const;
};

FixtureReport run_fixture(const Example& ex);

// ---- Direct constructors

GameSpec example1_game();
GameSpec example2_game();
GameSpec example3_game(double c);

// Stage game for repeated play: payoff[i][u1][u2], two players.
struct StageGame {
  std::vector<std::string> actions0, actions1;
  std::vector<std::vector<std::vector<double>>> payoff;
};
StageGame stage_game(const std::string& name);  // pd, mp, coord
GameSpec repeated_game(const StageGame& s, int T);

struct RandomSizes {
  int players = 2;
  int horizon = 2;
  int states = 2;   // |X| (local |X^i| for ouyang)
  int actions = 2;  // per player and stage unless per_stage_actions is set
  int signals = 2;  // |L| for nayyar, |Y| for ouyang
  std::vector<std::vector<int>> per_stage_actions;  // [t][i]
  std::uint64_t seed = 1;
  int action_count(int t, int i) const;
};

GameSpec maskin_tirole_game(const RandomSizes& s);
GameSpec nayyar_game(const RandomSizes& s);
GameSpec ouyang_game(const RandomSizes& s);

// Compressions used by the constructors above.
Compression last_action_compression(const GameSpec& g, const Histories& hs, int i);  // repeated
Compression current_state_compression(const GameSpec& g, const Histories& hs, int i);  // maskin_tirole
Compression nayyar_compression(const GameSpec& g, const Histories& hs, int i);
Compression ouyang_compression(const GameSpec& g, const Histories& hs, int i);
Compression example2_alice_compression(const GameSpec& g, const Histories& hs);

// Structural checks for the seeded constructors.
bool state_observable(const GameSpec& g);             // X_t recoverable from every player's history
bool previous_state_revealed(const GameSpec& g);      // (X_t, L_t) recoverable from every H_{t+1}^i
bool common_belief_strategy_free(const GameSpec& g, const RandomSizes& s);  // nayyar: L_t law fixed by X_t
bool local_noises_independent(const GameSpec& g, const RandomSizes& s);     // ouyang kernel factorizes

// ---- Example 3 closed forms

// Alice strategy parameters (alpha1, alpha2) and Bob's (beta1, beta2).
Profile example3_profile(const GameSpec& g, const Histories& hs, double a1, double a2, double b1, double b2);
double example3_J(double c, double a1, double a2, double b1, double b2);
double example3_J_star(double c, double a1, double a2);  // min over beta, closed form
InfoSplit example3_split(const GameSpec& g, const Histories& hs);

// ---- Example 2

Assessment example2_assessment(const GameSpec& g, const Histories& hs);

struct WpbeSearchResult {
  double resolution = 0.02;
  std::size_t alice_points = 0;   // K-based stage-2 profiles on the grid
  std::size_t rationalizable = 0; // profiles sequentially rational under some belief
  std::size_t candidates = 0;     // with a consistent Bob best response
  std::size_t confirmed = 0;      // passing check_wpbe
  double best_alice_payoff = -1e300;
  std::optional<Assessment> best;
};

WpbeSearchResult example2_kbased_wpbe_search(double resolution = 0.02);

}  // namespace dyngame
