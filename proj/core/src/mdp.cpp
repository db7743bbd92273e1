#include "dyngame/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "util.hpp"

namespace dyngame {

void validate_mdp(const MDP& m, double tol) {
  std::vector<Violation> v;
  double s0 = 0;
  for (double p : m.initial) s0 += p;
  if (std::abs(s0 - 1) > tol) v.push_back({ErrorKind::NonStochasticKernel, 1, "initial", "does not sum to 1"});
  for (int t = 0; t < m.horizon; ++t)
    for (int s = 0; s < m.states[t]; ++s) {
      if (!m.is_active(t, s)) continue;
      for (int a = 0; a < m.actions[t]; ++a) {
        double sum = 0;
        for (auto [s2, p] : m.P[t][s][a]) sum += p;
        std::string where = "(s=" + std::to_string(s) + ", a=" + std::to_string(a) + ")";
        if (std::abs(sum - 1) > tol)
          v.push_back({ErrorKind::NonStochasticKernel, t + 1, where, "row sums to " + detail::fmt_double(sum)});
        if (std::abs(m.r[t][s][a]) > m.reward_bound + 1e-12)
          v.push_back({ErrorKind::RewardOutOfRange, t + 1, where, "reward out of range"});
      }
    }
  if (!v.empty()) throw ValidationFailure(v);
}

std::vector<int> argmax_set(const std::vector<double>& q, double tie_tol) {
  double best = *std::max_element(q.begin(), q.end());
  std::vector<int> out;
  for (int a = 0; a < static_cast<int>(q.size()); ++a)
    if (q[a] >= best - tie_tol) out.push_back(a);
  return out;
}

DPResult backward_induction(const MDP& m, double tie_tol) {
  const int T = m.horizon;
  DPResult res;
  auto& tb = res.tables;
  tb.V.resize(T + 1);
  tb.Q.resize(T);
  tb.greedy.resize(T);
  res.policy.resize(T);
  tb.V[T].assign(m.states[T], 0.0);
  for (int t = T - 1; t >= 0; --t) {
    tb.V[t].assign(m.states[t], 0.0);
    tb.Q[t].assign(m.states[t], std::vector<double>(m.actions[t], 0.0));
    tb.greedy[t].resize(m.states[t]);
    res.policy[t].resize(m.states[t]);
    for (int s = 0; s < m.states[t]; ++s) {
      auto& q = tb.Q[t][s];
      if (m.is_active(t, s))
        for (int a = 0; a < m.actions[t]; ++a) {
          double v = m.r[t][s][a];
          for (auto [s2, p] : m.P[t][s][a]) v += p * tb.V[t + 1][s2];
          q[a] = v;
        }
      tb.greedy[t][s] = argmax_set(q, tie_tol);
      tb.V[t][s] = *std::max_element(q.begin(), q.end());
      Dist d(m.actions[t], 0.0);
      d[tb.greedy[t][s].front()] = 1.0;
      res.policy[t][s] = std::move(d);
    }
  }
  for (int s = 0; s < m.states[0]; ++s) res.value += m.initial[s] * tb.V[0][s];
  return res;
}

ValueTables evaluate_tables(const MDP& m, const MarkovPolicy& g) {
  const int T = m.horizon;
  ValueTables tb;
  tb.V.resize(T + 1);
  tb.Q.resize(T);
  tb.greedy.resize(T);
  tb.V[T].assign(m.states[T], 0.0);
  for (int t = T - 1; t >= 0; --t) {
    tb.V[t].assign(m.states[t], 0.0);
    tb.Q[t].assign(m.states[t], std::vector<double>(m.actions[t], 0.0));
    tb.greedy[t].resize(m.states[t]);
    for (int s = 0; s < m.states[t]; ++s) {
      if (!m.is_active(t, s)) continue;
      double v = 0;
      for (int a = 0; a < m.actions[t]; ++a) {
        double q = m.r[t][s][a];
        for (auto [s2, p] : m.P[t][s][a]) q += p * tb.V[t + 1][s2];
        tb.Q[t][s][a] = q;
        v += g[t][s][a] * q;
      }
      tb.V[t][s] = v;
    }
  }
  return tb;
}

double evaluate(const MDP& m, const MarkovPolicy& g) {
  auto tb = evaluate_tables(m, g);
  double J = 0;
  for (int s = 0; s < m.states[0]; ++s) J += m.initial[s] * tb.V[0][s];
  return J;
}

std::vector<std::vector<double>> occupancy(const MDP& m, const MarkovPolicy& g) {
  std::vector<std::vector<double>> occ(m.horizon + 1);
  occ[0] = m.initial;
  for (int t = 0; t < m.horizon; ++t) {
    occ[t + 1].assign(m.states[t + 1], 0.0);
    for (int s = 0; s < m.states[t]; ++s) {
      if (occ[t][s] == 0) continue;
      for (int a = 0; a < m.actions[t]; ++a) {
        double w = occ[t][s] * g[t][s][a];
        if (w == 0) continue;
        for (auto [s2, p] : m.P[t][s][a]) occ[t + 1][s2] += w * p;
      }
    }
  }
  return occ;
}

InfoStateMap identity_map(const MDP& m) {
  InfoStateMap id;
  for (int t = 0; t < m.horizon; ++t) {
    id.psi.emplace_back(m.states[t]);
    for (int s = 0; s < m.states[t]; ++s) id.psi[t][s] = s;
    id.count.push_back(m.states[t]);
  }
  return id;
}

namespace {

// Pushes P(.|s,a) forward through psi at stage t+1 (or to the single
// terminal state at the last stage).
std::map<int, double> pushed_row(const MDP& m, const InfoStateMap& psi, int t, int s, int a) {
  std::map<int, double> out;
  for (auto [s2, p] : m.P[t][s][a]) out[t + 1 < m.horizon ? psi.psi[t + 1][s2] : 0] += p;
  return out;
}

}  // namespace

Reduction reduce_by_info_state(const MDP& m, const InfoStateMap& psi, double tol, const std::vector<RewardTable>* extra,
                               std::vector<RewardTable>* extra_reduced) {
  const int T = m.horizon;
  Reduction res;
  MDP& k = res.reduced;
  k.horizon = T;
  k.actions = m.actions;
  k.reward_bound = m.reward_bound;
  k.states = psi.count;
  k.states.push_back(1);
  k.initial.assign(psi.count[0], 0.0);
  for (int s = 0; s < m.states[0]; ++s) k.initial[psi.psi[0][s]] += m.initial[s];
  k.P.resize(T);
  k.r.resize(T);
  k.active.resize(T + 1);
  k.active[T].assign(1, 1);
  const std::size_t ne = extra ? extra->size() : 0;
  if (extra_reduced) extra_reduced->assign(ne, RewardTable(T));
  for (int t = 0; t < T; ++t) {
    const int nk = psi.count[t];
    const int na = m.actions[t];
    k.P[t].assign(nk, std::vector<SparseRow>(na));
    k.r[t].assign(nk, std::vector<double>(na, 0.0));
    k.active[t].assign(nk, 0);
    if (extra_reduced)
      for (auto& e : *extra_reduced) e[t].assign(nk, std::vector<double>(na, 0.0));
    std::vector<int> rep(nk, -1);
    std::vector<std::vector<std::map<int, double>>> rows(nk);
    for (int s = 0; s < m.states[t]; ++s) {
      if (!m.is_active(t, s)) continue;
      const int kk = psi.psi[t][s];
      if (rep[kk] < 0) {
        rep[kk] = s;
        k.active[t][kk] = 1;
        for (int a = 0; a < na; ++a) {
          rows[kk].push_back(pushed_row(m, psi, t, s, a));
          k.r[t][kk][a] = m.r[t][s][a];
          for (std::size_t j = 0; j < ne; ++j)
            if (extra_reduced) (*extra_reduced)[j][t][kk][a] = (*extra)[j][t][s][a];
        }
        continue;
      }
      const int s0 = rep[kk];
      for (int a = 0; a < na; ++a) {
        auto fail = [&](std::string what, double l, double r) {
          res.valid = false;
          res.counterexample = InfoStateCounterexample{t, s0, s, a, std::move(what), l, r};
        };
        if (std::abs(m.r[t][s][a] - m.r[t][s0][a]) > tol) {
          fail("reward", m.r[t][s0][a], m.r[t][s][a]);
          return res;
        }
        for (std::size_t j = 0; j < ne; ++j)
          if (std::abs((*extra)[j][t][s][a] - (*extra)[j][t][s0][a]) > tol) {
            fail("reward[" + std::to_string(j) + "]", (*extra)[j][t][s0][a], (*extra)[j][t][s][a]);
            return res;
          }
        if (t + 1 < T) {
          auto row = pushed_row(m, psi, t, s, a);
          const auto& ref = rows[kk][a];
          auto check = [&](const std::map<int, double>& x, const std::map<int, double>& y) {
            for (auto [key, p] : x) {
              auto it = y.find(key);
              double q = it == y.end() ? 0.0 : it->second;
              if (std::abs(p - q) > tol) {
                fail("transition to k'=" + std::to_string(key), q, p);
                return false;
              }
            }
            return true;
          };
          if (!check(row, ref) || !check(ref, row)) return res;
        }
      }
    }
    for (int kk = 0; kk < nk; ++kk)
      for (int a = 0; a < na; ++a)
        for (auto [key, p] : rows[kk].empty() ? std::map<int, double>{} : rows[kk][a]) k.P[t][kk][a].push_back({key, p});
  }
  res.valid = true;
  return res;
}

MDP reduce_or_throw(const MDP& m, const InfoStateMap& psi, double tol) {
  auto r = reduce_by_info_state(m, psi, tol);
  if (!r.valid) {
    const auto& c = *r.counterexample;
    throw Error(ErrorKind::NotAnInformationState,
                "stage " + std::to_string(c.t + 1) + ": states " + std::to_string(c.x) + " and " +
                    std::to_string(c.x2) + " share k but differ in " + c.condition + " under action " +
                    std::to_string(c.u));
  }
  return r.reduced;
}

std::vector<std::vector<double>> compressed_occupancy(const MDP& m, const InfoStateMap& psi, const MarkovPolicy& g) {
  auto occ = occupancy(m, g);
  std::vector<std::vector<double>> out(m.horizon);
  for (int t = 0; t < m.horizon; ++t) {
    out[t].assign(psi.count[t], 0.0);
    for (int s = 0; s < m.states[t]; ++s) out[t][psi.psi[t][s]] += occ[t][s];
  }
  return out;
}

MarkovPolicy associate_strategy(const MDP& m, const InfoStateMap& psi, const MarkovPolicy& g, double tol) {
  reduce_or_throw(m, psi, tol);
  auto occ = occupancy(m, g);
  MarkovPolicy rho(m.horizon);
  for (int t = 0; t < m.horizon; ++t) {
    const int na = m.actions[t];
    rho[t].assign(psi.count[t], Dist(na, 0.0));
    std::vector<double> mass(psi.count[t], 0.0);
    for (int s = 0; s < m.states[t]; ++s) {
      const int k = psi.psi[t][s];
      mass[k] += occ[t][s];
      for (int a = 0; a < na; ++a) rho[t][k][a] += occ[t][s] * g[t][s][a];
    }
    for (int k = 0; k < psi.count[t]; ++k) {
      if (mass[k] > 0) {
        for (auto& x : rho[t][k]) x /= mass[k];
      } else {
        rho[t][k].assign(na, 1.0 / na);
      }
    }
  }
  return rho;
}

MarkovPolicy lift(const InfoStateMap& psi, const MarkovPolicy& rho) {
  MarkovPolicy g(psi.psi.size());
  for (std::size_t t = 0; t < psi.psi.size(); ++t)
    for (int k : psi.psi[t]) g[t].push_back(rho[t][k]);
  return g;
}

// ---------------------------------------------------------------- eps-DP

double eps_max(const std::vector<double>& q, double eps) {
  double sum = 0, best = q.front();
  for (double x : q) {
    sum += x;
    best = std::max(best, x);
  }
  return eps * sum + (1.0 - eps * static_cast<double>(q.size())) * best;
}

Dist eps_vertex(int actions, const std::vector<int>& argmax, double eps) {
  Dist d(actions, eps);
  // Extra mass on the last argmax action gives the lexicographically
  // smallest vertex of the face.
  d[argmax.back()] += 1.0 - eps * actions;
  return d;
}

BRTables eps_backward_induction(const MDP& m, double eps, double tie_tol) {
  const int T = m.horizon;
  for (int t = 0; t < T; ++t)
    if (eps * m.actions[t] > 1.0 + 1e-15)
      throw Error(ErrorKind::BadParameter, "eps exceeds 1/|U| at stage " + std::to_string(t + 1));
  BRTables b;
  b.eps = eps;
  b.V.resize(T + 1);
  b.Q.resize(T);
  b.argmax.resize(T);
  b.selection.resize(T);
  b.V[T].assign(m.states[T], 0.0);
  for (int t = T - 1; t >= 0; --t) {
    const int na = m.actions[t];
    b.V[t].assign(m.states[t], 0.0);
    b.Q[t].assign(m.states[t], std::vector<double>(na, 0.0));
    b.argmax[t].resize(m.states[t]);
    b.selection[t].resize(m.states[t]);
    for (int s = 0; s < m.states[t]; ++s) {
      auto& q = b.Q[t][s];
      if (m.is_active(t, s))
        for (int a = 0; a < na; ++a) {
          double v = m.r[t][s][a];
          for (auto [s2, p] : m.P[t][s][a]) v += p * b.V[t + 1][s2];
          q[a] = v;
        }
      b.V[t][s] = eps_max(q, eps);
      b.argmax[t][s] = argmax_set(q, tie_tol);
      b.selection[t][s] = eps_vertex(na, b.argmax[t][s], eps);
    }
  }
  return b;
}

}  // namespace dyngame
