#pragma once

// Single-player view of a game: player i's histories as MDP states when the
// other players' behavior is held fixed.

#include <vector>

#include "dyngame/game.hpp"
#include "dyngame/mdp.hpp"

namespace dyngame {

struct DecisionProblem {
  int player = 0;
  // States at stage t are the possible histories H_t^i (t = 0..T). A state
  // is active iff it has positive probability under the reference strategy
  // of player i together with the fixed strategies of the others.
  MDP mdp;
  std::vector<RewardTable> rewards;        // [j] expected stage reward of every player
  std::vector<std::vector<double>> reach;  // [t][h] probability under the reference
};

// profile[i] is ignored except as reference when use_profile_reference is set;
// otherwise player i is completed with the uniform strategy.
DecisionProblem build_decision_problem(const GameSpec& g, const Histories& hs, const Profile& profile, int i,
                                       bool use_profile_reference = false, const ForwardOptions& opt = {});

// psi of a compression as an InfoStateMap over the decision problem's states.
InfoStateMap info_state_map(const GameSpec& g, const Histories& hs, int i, const Compression& c);

}  // namespace dyngame
