#pragma once

// Finite-horizon dynamic game with asymmetric information.
//
// Stages are 0-based in code: stage t here is stage t+1 in the usual
// 1-based notation. X has T+1 stage spaces (the last one is the terminal
// state space), U and Z have T.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dyngame/errors.hpp"

namespace dyngame {

using Dist = std::vector<double>;

struct InitialEntry {
  int state = 0;
  std::vector<int> info;  // H_1^i label index per player
  double p = 0.0;
};

struct Outcome {
  int next_state = 0;
  std::vector<int> z;  // increment label index per player
  double p = 0.0;
};

struct GameSpec {
  std::vector<std::string> players;
  int horizon = 0;
  std::vector<std::vector<std::string>> states;                   // [t], t = 0..T
  std::vector<std::vector<std::string>> initial_info;             // [i]
  std::vector<std::vector<std::vector<std::string>>> actions;     // [t][i]
  std::vector<std::vector<std::vector<std::string>>> increments;  // [t][i]
  std::vector<std::vector<std::vector<int>>> recall;              // [t][i][z] -> own action
  std::vector<InitialEntry> initial;
  std::vector<std::vector<std::vector<std::vector<Outcome>>>> kernel;  // [t][x][joint u]
  // Expected stage reward E[R_t^i | x, u]; [t][x][joint u][i].
  std::vector<std::vector<std::vector<std::vector<double>>>> rewards;
  double reward_bound = 1.0;

  int num_players() const { return static_cast<int>(players.size()); }
  int num_actions(int t, int i) const { return static_cast<int>(actions[t][i].size()); }
  int num_increments(int t, int i) const { return static_cast<int>(increments[t][i].size()); }
  int num_joint_actions(int t) const;
  std::vector<int> decode_joint(int t, int joint) const;
  int encode_joint(int t, const std::vector<int>& u) const;
  int player_index(const std::string& name) const;  // -1 if absent
};

struct ValidateOptions {
  double row_tol = 1e-12;
};

// Checks shapes, normalization, perfect recall and reward range.
// Throws ValidationFailure listing every problem found.
GameSpec validate_game(const GameSpec& raw, const ValidateOptions& opt = {});
std::vector<Violation> find_violations(const GameSpec& raw, const ValidateOptions& opt = {});

// Histories that have positive probability under some strategy profile,
// interned per player and stage. Ids at each stage are ordered
// lexicographically by (H_1, Z_1, ..., Z_{t-1}).
struct HistoryTree {
  std::vector<int> count;                // [t], t = 0..T
  std::vector<std::vector<int>> parent;  // [t][h], -1 at t = 0
  std::vector<std::vector<int>> last;    // [t][h]: H_1 label at t = 0, else Z_{t-1} label
  std::vector<std::vector<int>> child;   // [t][h * |Z_t| + z] -> id at t+1 or -1, t < T
};

struct Histories {
  std::vector<HistoryTree> player;
  int count(int i, int t) const { return player[i].count[t]; }
  int child(const GameSpec& g, int i, int t, int h, int z) const {
    return player[i].child[t][static_cast<std::size_t>(h) * g.num_increments(t, i) + z];
  }
  // Human-readable form "h1/z1/z2".
  std::string label(const GameSpec& g, int i, int t, int h) const;
  // Inverse of label(); -1 if not a possible history.
  int find(const GameSpec& g, int i, int t, const std::string& label) const;
  // Action taken at stage t-1 that led to h (t >= 1).
  int previous_action(const GameSpec& g, int i, int t, int h) const;
};

Histories enumerate_histories(const GameSpec& game);

// Behavioral strategy of one player: [t][h] -> distribution over U_t^i.
struct Strategy {
  std::vector<std::vector<Dist>> table;
};
using Profile = std::vector<Strategy>;

Strategy uniform_strategy(const GameSpec& g, const Histories& hs, int i);
Profile uniform_profile(const GameSpec& g, const Histories& hs);
// (1-eps) * s + eps * uniform
Strategy tremble(const Strategy& s, double eps);
Profile tremble(const Profile& p, double eps);
// Throws ValidationFailure when a row is missing or not normalized.
void check_strategy(const GameSpec& g, const Histories& hs, int i, const Strategy& s, double tol = 1e-12);

// Compression ι for one player, as lookup tables.
struct Compression {
  std::vector<std::vector<std::string>> labels;  // [t] K_t labels, t = 0..T-1
  std::vector<int> init;                         // [H_1 label] -> K_1, -1 undefined
  std::vector<std::vector<int>> update;          // [t], t >= 1: [k_{t-1} * |Z_{t-1}| + z] -> K_t
  int count(int t) const { return static_cast<int>(labels[t].size()); }
};

Compression identity_compression(const GameSpec& g, const Histories& hs, int i);

// K_t^i for every possible history, [t][h]. Throws DomainMiss on a missing lookup.
using CompressedIndex = std::vector<std::vector<int>>;
CompressedIndex compress_histories(const GameSpec& g, const Histories& hs, int i, const Compression& c);

// K trajectory (K_1, ..., K_{t}) for a raw history given as H_1 label and increments.
std::vector<int> compress_trajectory(const GameSpec& g, int i, const Compression& c, int h1,
                                     const std::vector<int>& increments);

// K-based strategy: [t][k] -> distribution.
struct KStrategy {
  std::vector<std::vector<Dist>> table;
};
Strategy lift(const KStrategy& rho, const CompressedIndex& psi);
KStrategy uniform_kstrategy(const GameSpec& g, const Compression& c, int i);

// Exact joint law of (X_t, H_t^1, ..., H_t^n).
struct JointTable {
  int width = 0;            // 1 + players
  std::vector<int> keys;    // width ints per entry: x, h^1..h^n
  std::vector<double> p;
  std::size_t size() const { return p.size(); }
  const int* key(std::size_t e) const { return keys.data() + e * width; }
};

struct JointDistribution {
  std::vector<JointTable> stage;                 // t = 0..T
  std::vector<std::vector<double>> stage_reward;  // [t][i] expected reward
  std::vector<double> payoff;                     // [i]
};

JointTable initial_joint(const GameSpec& g, const Histories& hs);

struct ForwardOptions {
  std::size_t support_cap = 10'000'000;
};

JointDistribution forward_distribution(const GameSpec& g, const Histories& hs, const Profile& profile,
                                       const ForwardOptions& opt = {});
std::vector<double> compute_payoffs(const GameSpec& g, const Histories& hs, const Profile& profile,
                                    const ForwardOptions& opt = {});

// Variables that conditional_table can target or condition on.
enum class VarKind { State, History, Compressed, Action, Increment, Reward };
struct Var {
  VarKind kind = VarKind::State;
  int player = 0;
};

struct ConditionalRow {
  std::vector<long long> condition;  // values of conditioning vars
  double probability = 0.0;          // Pr(condition)
  bool admissible = false;
  std::vector<std::pair<std::vector<long long>, double>> target;  // normalized, empty if inadmissible
};

struct ConditionalTable {
  std::vector<ConditionalRow> rows;  // sorted by condition
  const ConditionalRow* find(const std::vector<long long>& condition) const;
};

// compressions may be empty unless a Compressed variable is used.
// Reward values are encoded as round(r * 1e9).
ConditionalTable conditional_table(const GameSpec& g, const Histories& hs, const Profile& profile, int t,
                                   const std::vector<Var>& targets, const std::vector<Var>& conditions,
                                   const std::vector<Compression>& compressions = {},
                                   const ForwardOptions& opt = {});

struct MonteCarloResult {
  std::vector<double> mean;
  std::vector<double> stderr_;
  std::size_t samples = 0;
};

MonteCarloResult monte_carlo_payoff(const GameSpec& g, const Histories& hs, const Profile& profile,
                                    std::size_t samples, std::uint64_t seed);

}  // namespace dyngame
