#pragma once

// Finite-horizon MDPs, information-state reduction and associated
// compressed strategies.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dyngame/errors.hpp"

namespace dyngame {

using Dist = std::vector<double>;
using SparseRow = std::vector<std::pair<int, double>>;
using RewardTable = std::vector<std::vector<std::vector<double>>>;  // [t][s][a]

struct MDP {
  int horizon = 0;
  std::vector<int> states;   // [t], t = 0..T (stage T holds terminal states)
  std::vector<int> actions;  // [t], t = 0..T-1
  Dist initial;              // over stage-0 states
  std::vector<std::vector<std::vector<SparseRow>>> P;  // [t][s][a] -> (s', p)
  RewardTable r;
  // [t][s]; empty means every state is active. Inactive states are
  // unreachable rows that carry no transition requirements.
  std::vector<std::vector<char>> active;
  double reward_bound = 1.0;

  bool is_active(int t, int s) const { return active.empty() || active[t][s]; }
};

// Throws ValidationFailure (NonStochasticKernel, RewardOutOfRange).
void validate_mdp(const MDP& m, double tol = 1e-12);

struct ValueTables {
  std::vector<std::vector<double>> V;               // [t][s], t = 0..T, V[T] = 0
  std::vector<std::vector<std::vector<double>>> Q;  // [t][s][a]
  std::vector<std::vector<std::vector<int>>> greedy;  // argmax sets
};

using MarkovPolicy = std::vector<std::vector<Dist>>;  // [t][s]

struct DPResult {
  ValueTables tables;
  MarkovPolicy policy;  // greedy, lowest-index tie break
  double value = 0.0;   // sum_x nu(x) V_1(x)
};

DPResult backward_induction(const MDP& m, double tie_tol = 1e-9);

// Q and V of a fixed policy.
ValueTables evaluate_tables(const MDP& m, const MarkovPolicy& g);
double evaluate(const MDP& m, const MarkovPolicy& g);
// State distribution per stage under g, [t][s] for t = 0..T.
std::vector<std::vector<double>> occupancy(const MDP& m, const MarkovPolicy& g);

struct InfoStateMap {
  std::vector<std::vector<int>> psi;  // [t][s] -> k, t = 0..T-1
  std::vector<int> count;             // |K_t|
};

InfoStateMap identity_map(const MDP& m);

struct InfoStateCounterexample {
  int t = 0;
  int x = 0;
  int x2 = 0;
  int u = 0;
  std::string condition;  // "transition", "reward" or "reward[j]"
  double lhs = 0.0;
  double rhs = 0.0;
};

struct Reduction {
  bool valid = false;
  MDP reduced;  // over K; stage T collapses to one terminal state
  std::optional<InfoStateCounterexample> counterexample;
};

// extra: further reward tables that must also factor through psi.
Reduction reduce_by_info_state(const MDP& m, const InfoStateMap& psi, double tol = 1e-12,
                               const std::vector<RewardTable>* extra = nullptr,
                               std::vector<RewardTable>* extra_reduced = nullptr);
// Same, throwing NotAnInformationState on failure.
MDP reduce_or_throw(const MDP& m, const InfoStateMap& psi, double tol = 1e-12);

// rho_t(k) = E^g[g_t(X_t) | k]; rows with zero occupancy are uniform.
MarkovPolicy associate_strategy(const MDP& m, const InfoStateMap& psi, const MarkovPolicy& g,
                                double tol = 1e-12);
// Expands a K-indexed policy back to states.
MarkovPolicy lift(const InfoStateMap& psi, const MarkovPolicy& rho);
// Pr(K_t = k) under g, [t][k].
std::vector<std::vector<double>> compressed_occupancy(const MDP& m, const InfoStateMap& psi, const MarkovPolicy& g);

// epsilon-constrained dynamic program on an MDP.
struct BRTables {
  double eps = 0.0;
  std::vector<std::vector<std::vector<double>>> Q;  // [t][s][a]
  std::vector<std::vector<double>> V;               // [t][s], V[T] = 0
  std::vector<std::vector<std::vector<int>>> argmax;
  MarkovPolicy selection;  // lexicographically smallest vertex of the argmax face
};

// max over eta in Delta^eps of sum_a q(a) eta(a).
double eps_max(const std::vector<double>& q, double eps);
std::vector<int> argmax_set(const std::vector<double>& q, double tie_tol);
Dist eps_vertex(int actions, const std::vector<int>& argmax, double eps);
BRTables eps_backward_induction(const MDP& m, double eps, double tie_tol = 1e-9);

}  // namespace dyngame
