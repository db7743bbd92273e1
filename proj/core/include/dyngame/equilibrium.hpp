#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dyngame/decision.hpp"
#include "dyngame/game.hpp"
#include "dyngame/info_state.hpp"
#include "dyngame/mdp.hpp"

namespace dyngame {

// ---------------------------------------------------------------- BNE checks

struct BestResponse {
  double value = 0.0;
  Strategy strategy;  // pure, greedy on the history MDP
  ValueTables tables;
};

// Best full-history response of player i to the others in profile.
BestResponse best_response_value(const GameSpec& g, const Histories& hs, const Profile& profile, int i);

struct BneReport {
  std::vector<double> payoffs;
  std::vector<double> best_response;
  std::vector<double> gaps;
  double tol = 1e-6;
  bool is_bne = false;
  double max_gap() const;
};

BneReport verify_bne(const GameSpec& g, const Histories& hs, const Profile& profile, double tol = 1e-6);

// epsilon-constrained best response of player i over K^i against the others
// in profile (which should be K^-i-based). Throws NotMSIWitness when the
// induced K-level tables are not well defined.
BRTables best_response_dp_eps(const GameSpec& g, const Histories& hs, int i, const Profile& profile,
                              const Compression& Ki, double eps, double tol = 1e-9);

// ---------------------------------------------------------------- solver

struct EpsSchedule {
  std::vector<double> eps;
  int max_iter = 400;       // damped iterations per point
  int averaging_iter = 2000;
  double damping = 0.5;
  double tol = 1e-9;        // residual accepted at each point

  static EpsSchedule geometric(double a, double r, int n);  // eps_k = a r^k, k = 0..n
  static EpsSchedule standard() { return geometric(0.1, 0.5, 12); }
  void validate(const GameSpec& g) const;
};

struct EpsPoint {
  double eps = 0.0;
  int iterations = 0;
  double residual = 0.0;
  std::string method;
  std::vector<KStrategy> profile;
  std::vector<BRTables> br;  // per player, at the fixed point
};

struct SolveResult {
  std::vector<KStrategy> kprofile;
  Profile profile;
  BneReport bne;
  std::vector<EpsPoint> trace;
  bool converged = false;
  double worst_residual = 0.0;
  std::string limit_method;
};

SolveResult solve_k_based_bne(const GameSpec& g, const Histories& hs, const std::vector<Compression>& K,
                              const EpsSchedule& schedule = EpsSchedule::standard(), double bne_tol = 1e-6);

// ---------------------------------------------------------------- sequential equilibrium

struct SeViolation {
  int player = 0;
  int t = 0;  // 1-based
  std::string history;
  std::string action;
  double gap = 0.0;
  double eps = 0.0;
  int n = 0;
};

struct SeReport {
  bool se = false;
  std::string verdict;  // "SE (canonical trembles)" or "inconclusive"
  std::vector<SeViolation> violations;
  std::vector<double> max_gap;                   // per schedule point
  std::vector<std::vector<std::vector<Dist>>> Q;  // [i][t][h] at the last schedule point
  double margin = 0.0;                           // kappa in gap <= kappa * eps
};

SeReport verify_se_canonical(const GameSpec& g, const Histories& hs, const Profile& profile,
                             const EpsSchedule& schedule = EpsSchedule::standard());

struct SeSolveResult {
  SolveResult solve;
  SeReport se;
  std::vector<double> containment_residual;          // per schedule point
  std::vector<std::vector<std::vector<Dist>>> Q;      // [i][t][h], limit conjecture from the last point
};

SeSolveResult solve_k_based_se(const GameSpec& g, const Histories& hs, const std::vector<Compression>& K,
                               const EpsSchedule& schedule = EpsSchedule::standard(), double bne_tol = 1e-6);

// ---------------------------------------------------------------- USI transfers

// rho(u|k) = sum_h g(u|h) F(h|k), F computed under g^i with uniform others.
KStrategy usi_replace(const GameSpec& g, const Histories& hs, int i, const Compression& Ki, const Strategy& gi);

struct TransferOptions {
  bool check_usi_first = true;
  SamplerConfig sampler;
  double tol = 1e-6;
};

struct TransferResult {
  std::vector<KStrategy> kprofile;
  Profile profile;
  std::vector<double> input_payoffs;
  BneReport bne;
  double payoff_distance = 0.0;
  bool ok = false;
};

TransferResult transfer_bne_via_usi(const GameSpec& g, const Histories& hs, const std::vector<Compression>& K,
                                    const Profile& bne, const TransferOptions& opt = {});

struct SeTransferResult {
  std::vector<KStrategy> kprofile;
  Profile profile;
  std::vector<double> input_payoffs;
  std::vector<double> payoffs;
  double payoff_distance = 0.0;
  SeReport se;
  bool ok = false;
};

SeTransferResult transfer_se_via_usi(const GameSpec& g, const Histories& hs, const std::vector<Compression>& K,
                                     const Profile& se_profile, const EpsSchedule& schedule = EpsSchedule::standard(),
                                     const TransferOptions& opt = {});

// ---------------------------------------------------------------- enumeration

struct EnumerateOptions {
  int max_parameters = 8;  // per player, sum over decision points of |U| - 1
  std::size_t max_support_pairs = 2'000'000;
  std::size_t max_vertex_subsets = 1'000'000;
  double dedup_tol = 1e-6;
};

struct EnumeratedEquilibrium {
  Profile profile;
  std::vector<double> payoffs;
  std::vector<std::vector<double>> realization;  // per player, sequence-form plan
};

struct EnumerateResult {
  std::vector<EnumeratedEquilibrium> equilibria;
  std::vector<std::vector<double>> payoff_set;
  std::size_t support_pairs = 0;
  std::vector<int> parameters;  // per player
};

EnumerateResult enumerate_bne_small(const GameSpec& g, const Histories& hs, const EnumerateOptions& opt = {});

double hausdorff(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b);

// ---------------------------------------------------------------- wPBE

// Belief of player i at history h over the joint (x_t, h_t^1..h_t^n); the
// own slot must equal h.
struct BeliefEntry {
  std::vector<int> key;
  double p = 0.0;
};

struct Assessment {
  Profile profile;
  // [i][t][h]; an empty row is filled with the Bayes posterior when h is
  // on path and reported as missing otherwise.
  std::vector<std::vector<std::vector<std::vector<BeliefEntry>>>> belief;
};

struct WpbeReport {
  bool bayes_ok = false;
  bool rational_ok = false;
  bool wpbe = false;
  std::vector<std::string> issues;
  std::vector<double> payoffs;
};

WpbeReport check_wpbe(const GameSpec& g, const Histories& hs, const Assessment& a, double tol = 1e-9);

// Posterior Pr(x, h^-i | h^i) under profile, empty rows for zero-probability h.
std::vector<std::vector<std::vector<std::vector<BeliefEntry>>>> bayes_beliefs(const GameSpec& g, const Histories& hs,
                                                                              const Profile& profile);

// ---------------------------------------------------------------- belief-based profiles

// Split of each player's history into a common and a private part,
// [i][t][h] -> label id. Common ids are shared across players.
struct InfoSplit {
  std::vector<std::vector<std::vector<int>>> common;
  std::vector<std::vector<std::vector<int>>> priv;
  std::vector<std::vector<std::string>> common_labels;  // [t]
  std::vector<std::vector<std::vector<std::string>>> private_labels;  // [i][t]
};

struct BeliefBasedReport {
  bool belief_based = true;
  int player = -1;
  int t = -1;  // 1-based
  std::string common_a, common_b, private_label;
  double action_gap = 0.0;
  // common-information beliefs Pr(x, l | h^0), [t][common id] -> (label, p)
  std::vector<std::vector<std::vector<std::pair<std::string, double>>>> beliefs;
};

BeliefBasedReport check_belief_based(const GameSpec& g, const Histories& hs, const Profile& profile,
                                     const InfoSplit& split, double tol = 1e-9);

}  // namespace dyngame
