#pragma once

// Reference computations used only by tests. They walk game trees and
// enumerate pure strategies directly instead of going through the
// aggregated tables the library uses.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dyngame/game.hpp"
#include "dyngame/mdp.hpp"

namespace oracle {

using namespace dyngame;

struct RandomGameOptions {
  int players = 2;
  int horizon = 2;
  int states = 2;
  int actions = 2;
  int signals = 2;
  bool public_actions = true;  // increments carry the joint action, else only the own action
  double sparsity = 0.3;       // chance that a kernel cell is dropped
};

inline std::vector<double> random_simplex(std::mt19937_64& rng, int m, double floor = 0.0) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(m);
  double tot = 0;
  for (double& x : w) tot += (x = e(rng));
  for (double& x : w) x = floor + (1 - floor * m) * x / tot;
  return w;
}

// Hidden state, private signals, optional public actions, random rewards in [-1, 1].
inline GameSpec random_game(std::uint64_t seed, const RandomGameOptions& o = {}) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0), rew(-1.0, 1.0);
  const int n = o.players, T = o.horizon, S = o.signals;
  GameSpec g;
  for (int i = 0; i < n; ++i) g.players.push_back("P" + std::to_string(i));
  g.horizon = T;
  g.states.resize(T + 1);
  for (int t = 0; t < T; ++t)
    for (int x = 0; x < o.states; ++x) g.states[t].push_back("s" + std::to_string(x));
  g.states[T] = {"end"};
  g.initial_info.resize(n);
  for (int i = 0; i < n; ++i)
    for (int s = 0; s < S; ++s) g.initial_info[i].push_back("o" + std::to_string(s));
  g.actions.assign(T, std::vector<std::vector<std::string>>(n));
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < o.actions; ++a) g.actions[t][i].push_back("a" + std::to_string(a));
  g.increments.assign(T, std::vector<std::vector<std::string>>(n));
  g.recall.assign(T, std::vector<std::vector<int>>(n));
  for (int t = 0; t < T; ++t) {
    const int nu = g.num_joint_actions(t);
    for (int i = 0; i < n; ++i) {
      if (o.public_actions) {
        for (int ju = 0; ju < nu; ++ju)
          for (int s = 0; s < S; ++s) {
            g.increments[t][i].push_back("u" + std::to_string(ju) + ";s" + std::to_string(s));
            g.recall[t][i].push_back(g.decode_joint(t, ju)[i]);
          }
      } else {
        for (int a = 0; a < o.actions; ++a)
          for (int s = 0; s < S; ++s) {
            g.increments[t][i].push_back("a" + std::to_string(a) + ";s" + std::to_string(s));
            g.recall[t][i].push_back(a);
          }
      }
    }
  }
  int sig_joint = 1;
  for (int i = 0; i < n; ++i) sig_joint *= S;
  auto sig = [&](int code) {
    std::vector<int> s(n);
    for (int i = n - 1; i >= 0; --i) {
      s[i] = code % S;
      code /= S;
    }
    return s;
  };
  // initial law over (x, o^1..o^n)
  {
    auto w = random_simplex(rng, o.states * sig_joint);
    for (int x = 0; x < o.states; ++x)
      for (int c = 0; c < sig_joint; ++c) g.initial.push_back({x, sig(c), w[x * sig_joint + c]});
  }
  g.kernel.resize(T);
  g.rewards.resize(T);
  for (int t = 0; t < T; ++t) {
    const int nx = static_cast<int>(g.states[t].size()), nx2 = static_cast<int>(g.states[t + 1].size());
    const int nu = g.num_joint_actions(t);
    g.kernel[t].assign(nx, std::vector<std::vector<Outcome>>(nu));
    g.rewards[t].assign(nx, std::vector<std::vector<double>>(nu, std::vector<double>(n)));
    for (int x = 0; x < nx; ++x)
      for (int ju = 0; ju < nu; ++ju) {
        auto u = g.decode_joint(t, ju);
        std::vector<double> w(nx2 * sig_joint);
        std::exponential_distribution<double> e(1.0);
        double tot = 0;
        for (double& v : w) {
          v = unit(rng) < o.sparsity ? 0.0 : e(rng);
          tot += v;
        }
        if (tot == 0) {
          w[0] = 1;
          tot = 1;
        }
        for (int x2 = 0; x2 < nx2; ++x2)
          for (int c = 0; c < sig_joint; ++c) {
            double p = w[x2 * sig_joint + c] / tot;
            if (p == 0) continue;
            auto s = sig(c);
            std::vector<int> z(n);
            for (int i = 0; i < n; ++i) z[i] = (o.public_actions ? ju : u[i]) * S + s[i];
            g.kernel[t][x][ju].push_back({x2, z, p});
          }
        for (double& r : g.rewards[t][x][ju]) r = rew(rng);
      }
  }
  return validate_game(g);
}

inline Profile random_profile(const GameSpec& g, const Histories& hs, std::uint64_t seed, double floor = 0.0) {
  std::mt19937_64 rng(seed);
  Profile p(g.num_players());
  for (int i = 0; i < g.num_players(); ++i) {
    p[i].table.resize(g.horizon);
    for (int t = 0; t < g.horizon; ++t)
      for (int h = 0; h < hs.count(i, t); ++h) p[i].table[t].push_back(random_simplex(rng, g.num_actions(t, i), floor));
  }
  return p;
}

// Payoffs by walking every trajectory of the game tree.
inline std::vector<double> tree_payoffs(const GameSpec& g, const Histories& hs, const Profile& prof) {
  const int n = g.num_players();
  std::vector<double> J(n, 0.0);
  std::function<void(int, int, const std::vector<int>&, double)> walk = [&](int t, int x, const std::vector<int>& h,
                                                                            double p) {
    if (t == g.horizon) return;
    for (int ju = 0; ju < g.num_joint_actions(t); ++ju) {
      auto u = g.decode_joint(t, ju);
      double pu = p;
      for (int i = 0; i < n; ++i) pu *= prof[i].table[t][h[i]][u[i]];
      if (pu == 0) continue;
      for (int j = 0; j < n; ++j) J[j] += pu * g.rewards[t][x][ju][j];
      for (const auto& o : g.kernel[t][x][ju]) {
        if (o.p == 0) continue;
        std::vector<int> c(n);
        for (int i = 0; i < n; ++i) c[i] = hs.child(g, i, t, h[i], o.z[i]);
        walk(t + 1, o.next_state, c, pu * o.p);
      }
    }
  };
  for (const auto& e : g.initial) {
    if (e.p == 0) continue;
    std::vector<int> h(n);
    for (int i = 0; i < n; ++i) h[i] = hs.find(g, i, 0, g.initial_info[i][e.info[i]]);
    walk(0, e.state, h, e.p);
  }
  return J;
}

// Best deviation payoff of player i over all pure strategies, by enumeration.
inline double pure_best_response(const GameSpec& g, const Histories& hs, const Profile& prof, int i,
                                 std::size_t cap = 1u << 16) {
  std::vector<std::pair<int, int>> cells;  // (t, h) with a real choice
  std::size_t total = 1;
  for (int t = 0; t < g.horizon; ++t)
    for (int h = 0; h < hs.count(i, t); ++h)
      if (g.num_actions(t, i) > 1) {
        cells.push_back({t, h});
        total *= static_cast<std::size_t>(g.num_actions(t, i));
        if (total > cap) throw std::runtime_error("too many pure strategies for the oracle");
      }
  Profile p = prof;
  for (int t = 0; t < g.horizon; ++t)
    for (auto& d : p[i].table[t]) std::fill(d.begin(), d.end(), 1.0 / static_cast<double>(d.size()));
  double best = -1e300;
  std::vector<int> pick(cells.size(), 0);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      auto [t, h] = cells[k];
      const int m = g.num_actions(t, i);
      Dist d(m, 0.0);
      d[c % m] = 1.0;
      c /= m;
      p[i].table[t][h] = d;
    }
    best = std::max(best, tree_payoffs(g, hs, p)[i]);
  }
  return best;
}

// ---------------------------------------------------------------- MDPs

inline MDP random_mdp(std::uint64_t seed, int T, int S, int A) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> rew(-1.0, 1.0);
  MDP m;
  m.horizon = T;
  m.states.assign(T + 1, S);
  m.states[T] = 1;
  m.actions.assign(T, A);
  m.initial = random_simplex(rng, S);
  m.P.resize(T);
  m.r.resize(T);
  for (int t = 0; t < T; ++t) {
    m.P[t].assign(S, std::vector<SparseRow>(A));
    m.r[t].assign(S, std::vector<double>(A));
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        auto w = random_simplex(rng, m.states[t + 1]);
        for (int s2 = 0; s2 < m.states[t + 1]; ++s2) m.P[t][s][a].push_back({s2, w[s2]});
        m.r[t][s][a] = rew(rng);
      }
  }
  return m;
}

// J(g) by walking every trajectory.
inline double tree_value(const MDP& m, const MarkovPolicy& g) {
  std::function<double(int, int)> v = [&](int t, int s) -> double {
    if (t == m.horizon) return 0.0;
    double tot = 0;
    for (int a = 0; a < m.actions[t]; ++a) {
      double pa = g[t][s][a];
      if (pa == 0) continue;
      double q = m.r[t][s][a];
      for (auto [s2, p] : m.P[t][s][a]) q += p * v(t + 1, s2);
      tot += pa * q;
    }
    return tot;
  };
  double J = 0;
  for (int s = 0; s < m.states[0]; ++s) J += m.initial[s] * v(0, s);
  return J;
}

// Optimal value by enumerating deterministic Markov policies.
inline double brute_optimal_value(const MDP& m) {
  std::vector<std::pair<int, int>> cells;
  std::size_t total = 1;
  for (int t = 0; t < m.horizon; ++t)
    for (int s = 0; s < m.states[t]; ++s) {
      cells.push_back({t, s});
      total *= static_cast<std::size_t>(m.actions[t]);
    }
  double best = -1e300;
  MarkovPolicy g(m.horizon);
  for (int t = 0; t < m.horizon; ++t) g[t].assign(m.states[t], Dist(m.actions[t], 0.0));
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (auto [t, s] : cells) {
      std::fill(g[t][s].begin(), g[t][s].end(), 0.0);
      g[t][s][c % m.actions[t]] = 1.0;
      c /= m.actions[t];
    }
    best = std::max(best, tree_value(m, g));
  }
  return best;
}

// Duplicates every non-terminal state into two copies with identical rows.
// The entry mass of each state is split between its copies at random.
struct Duplicated {
  MDP m;
  InfoStateMap psi;
  MarkovPolicy g;  // acts differently on the two copies
};

inline Duplicated duplicated_mdp(std::uint64_t seed, int T = 3, int S = 3, int A = 2) {
  MDP base = random_mdp(seed, T, S, A);
  std::mt19937_64 rng(seed * 7919 + 1);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  Duplicated d;
  MDP& m = d.m;
  m.horizon = T;
  m.states.resize(T + 1);
  for (int t = 0; t < T; ++t) m.states[t] = 2 * base.states[t];
  m.states[T] = base.states[T];
  m.actions = base.actions;
  m.reward_bound = base.reward_bound;
  // split weight per (t+1, copy)
  std::vector<std::vector<double>> split(T + 1);
  for (int t = 0; t <= T; ++t)
    for (int s = 0; s < base.states[t]; ++s) split[t].push_back(unit(rng));
  for (int s = 0; s < base.states[0]; ++s) {
    m.initial.push_back(base.initial[s] * split[0][s]);
    m.initial.push_back(base.initial[s] * (1 - split[0][s]));
  }
  m.P.resize(T);
  m.r.resize(T);
  for (int t = 0; t < T; ++t) {
    m.P[t].resize(m.states[t]);
    m.r[t].resize(m.states[t]);
    for (int s = 0; s < m.states[t]; ++s) {
      const int b = s / 2;
      m.r[t][s] = base.r[t][b];
      m.P[t][s].resize(A);
      for (int a = 0; a < A; ++a)
        for (auto [s2, p] : base.P[t][b][a]) {
          if (t + 1 == T) {
            m.P[t][s][a].push_back({s2, p});
          } else {
            m.P[t][s][a].push_back({2 * s2, p * split[t + 1][s2]});
            m.P[t][s][a].push_back({2 * s2 + 1, p * (1 - split[t + 1][s2])});
          }
        }
    }
  }
  d.psi.psi.resize(T);
  d.psi.count.resize(T);
  for (int t = 0; t < T; ++t) {
    for (int s = 0; s < m.states[t]; ++s) d.psi.psi[t].push_back(s / 2);
    d.psi.count[t] = base.states[t];
  }
  d.g.resize(T);
  for (int t = 0; t < T; ++t)
    for (int s = 0; s < m.states[t]; ++s) d.g[t].push_back(random_simplex(rng, A));
  return d;
}

}  // namespace oracle
