#pragma once

// Verifiers for information-state notions: per-opponent-profile information
// states, mutually sufficient information (MSI) and unilaterally sufficient
// information (USI). Universal quantifiers over strategies are discharged by
// testing at randomly sampled fully mixed profiles.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dyngame/decision.hpp"
#include "dyngame/game.hpp"

namespace dyngame {

enum class Verdict { Holds, Fails, Inconclusive };
const char* to_string(Verdict v);

struct SamplerConfig {
  int samples = 20;         // M
  double mix_floor = 0.05;  // delta
  std::uint64_t seed = 1;
  double tol = 1e-9;
};

void check_sampler(const SamplerConfig& cfg, const GameSpec& g);

// Reproducible generator for sample m of player i.
std::mt19937_64 sample_rng(std::uint64_t seed, int stream, int player, int sample);
Dist random_dist(int m, double floor, std::mt19937_64& rng);
Strategy random_strategy(const GameSpec& g, const Histories& hs, int i, double floor, std::mt19937_64& rng);
KStrategy random_kstrategy(const GameSpec& g, const Compression& c, int i, double floor, std::mt19937_64& rng);

struct Counterexample {
  std::string test;  // transition, reward, phi, factorization, own-marginal, others-marginal
  int player = 0;
  int t = 0;  // 1-based
  std::string k;
  std::string first;   // realization label
  std::string second;  // second realization or empty
  std::string action;  // empty when not tied to an action
  double lhs = 0.0;
  double rhs = 0.0;
  int sample = -1;
  int sample2 = -1;
  std::uint64_t seed = 0;
};

struct WitnessRow {
  int t = 0;  // 0-based stage
  int k = 0;
  std::string value;  // label of the realization
  double p = 0.0;
};

struct InfoStateWitness {
  Verdict verdict = Verdict::Inconclusive;
  std::string label;
  int player = 0;
  std::vector<int> payoff_set;
  MDP reduced;                        // P^K and own/first reward
  std::vector<RewardTable> rewards;   // [j in payoff_set]
  std::vector<WitnessRow> phi;        // Phi_t(x, k^-i or h^-i | k^i)
  std::vector<WitnessRow> F;          // F_t(h^i | k^i)
  std::optional<Counterexample> counterexample;
  int samples_checked = 0;
};

// K^i an information state for player i, for the payoffs in payoff_set, under the
// other players' strategies in profile (profile[i] ignored).
InfoStateWitness check_information_state(const GameSpec& g, const Histories& hs, int i, const Profile& profile,
                                         const Compression& c, const std::vector<int>& payoff_set,
                                         double tol = 1e-9);

struct MsiResult {
  Verdict verdict = Verdict::Inconclusive;
  std::string label;
  std::vector<InfoStateWitness> players;
  std::optional<Counterexample> counterexample;
};

MsiResult check_msi(const GameSpec& g, const Histories& hs, const std::vector<Compression>& K,
                    const SamplerConfig& cfg = {});
MsiResult check_msi_lemma1(const GameSpec& g, const Histories& hs, const std::vector<Compression>& K,
                           const SamplerConfig& cfg = {});
InfoStateWitness check_usi(const GameSpec& g, const Histories& hs, int i, const Compression& c,
                           const SamplerConfig& cfg = {});

}  // namespace dyngame
