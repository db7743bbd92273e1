#include <algorithm>
#include <cmath>
#include <map>

#include "dyngame/equilibrium.hpp"
#include "util.hpp"

namespace dyngame {

namespace {

using Row = std::vector<BeliefEntry>;

std::map<std::vector<int>, double> as_map(const Row& r) {
  std::map<std::vector<int>, double> m;
  for (const auto& e : r)
    if (e.p != 0) m[e.key] += e.p;
  return m;
}

bool same(const std::map<std::vector<int>, double>& a, const std::map<std::vector<int>, double>& b, double tol) {
  for (const auto& [k, p] : a) {
    auto it = b.find(k);
    if (std::abs(p - (it == b.end() ? 0.0 : it->second)) > tol) return false;
  }
  for (const auto& [k, p] : b)
    if (!a.count(k) && std::abs(p) > tol) return false;
  return true;
}

}  // namespace

std::vector<std::vector<std::vector<Row>>> bayes_beliefs(const GameSpec& g, const Histories& hs,
                                                         const Profile& profile) {
  const int n = g.num_players();
  JointDistribution jd = forward_distribution(g, hs, profile);
  std::vector<std::vector<std::vector<Row>>> out(n);
  for (int i = 0; i < n; ++i) {
    out[i].resize(g.horizon);
    for (int t = 0; t < g.horizon; ++t) {
      const JointTable& tab = jd.stage[t];
      std::vector<double> z(hs.count(i, t), 0.0);
      out[i][t].resize(hs.count(i, t));
      for (std::size_t e = 0; e < tab.size(); ++e) {
        const int* k = tab.key(e);
        z[k[i + 1]] += tab.p[e];
        out[i][t][k[i + 1]].push_back({std::vector<int>(k, k + tab.width), tab.p[e]});
      }
      for (int h = 0; h < hs.count(i, t); ++h)
        for (auto& e : out[i][t][h]) e.p /= z[h];
    }
  }
  return out;
}

WpbeReport check_wpbe(const GameSpec& g, const Histories& hs, const Assessment& a, double tol) {
  const int n = g.num_players();
  const int T = g.horizon;
  WpbeReport rep;
  rep.bayes_ok = true;
  rep.rational_ok = true;
  for (int i = 0; i < n; ++i) check_strategy(g, hs, i, a.profile[i], 1e-9);
  rep.payoffs = compute_payoffs(g, hs, a.profile);
  auto post = bayes_beliefs(g, hs, a.profile);
  JointDistribution jd = forward_distribution(g, hs, a.profile);

  // working beliefs: given rows, or the posterior where a row is absent on path
  std::vector<std::vector<std::vector<Row>>> mu(n);
  std::vector<std::vector<std::vector<char>>> usable(n);
  for (int i = 0; i < n; ++i) {
    mu[i].resize(T);
    usable[i].resize(T);
    for (int t = 0; t < T; ++t) {
      std::vector<double> reach(hs.count(i, t), 0.0);
      const JointTable& tab = jd.stage[t];
      for (std::size_t e = 0; e < tab.size(); ++e) reach[tab.key(e)[i + 1]] += tab.p[e];
      mu[i][t].resize(hs.count(i, t));
      usable[i][t].assign(hs.count(i, t), 1);
      for (int h = 0; h < hs.count(i, t); ++h) {
        const std::string where =
            "player " + g.players[i] + ", stage " + std::to_string(t + 1) + ", history " + hs.label(g, i, t, h);
        const Row* given = nullptr;
        if (i < static_cast<int>(a.belief.size()) && t < static_cast<int>(a.belief[i].size()) &&
            h < static_cast<int>(a.belief[i][t].size()) && !a.belief[i][t][h].empty())
          given = &a.belief[i][t][h];
        if (!given) {
          if (reach[h] > 0) {
            mu[i][t][h] = post[i][t][h];
          } else {
            rep.issues.push_back("missing off-path belief at " + where);
            usable[i][t][h] = 0;
            rep.rational_ok = false;
          }
          continue;
        }
        double tot = 0;
        bool shape_ok = true;
        for (const auto& e : *given) {
          tot += e.p;
          if (static_cast<int>(e.key.size()) != n + 1 || e.p < -tol || e.key[i + 1] != h || e.key[0] < 0 ||
              e.key[0] >= static_cast<int>(g.states[t].size()))
            shape_ok = false;
          else
            for (int j = 0; j < n; ++j)
              if (e.key[j + 1] < 0 || e.key[j + 1] >= hs.count(j, t)) shape_ok = false;
        }
        if (!shape_ok || std::abs(tot - 1) > 1e-9) {
          rep.issues.push_back("malformed belief at " + where);
          usable[i][t][h] = 0;
          rep.rational_ok = false;
          continue;
        }
        mu[i][t][h] = *given;
        if (reach[h] > 0 && !same(as_map(*given), as_map(post[i][t][h]), tol)) {
          rep.bayes_ok = false;
          rep.issues.push_back("belief violates Bayes rule at " + where);
        }
      }
    }
  }

  // one-shot deviation DP under mu
  for (int i = 0; i < n; ++i) {
    std::vector<double> Vn(hs.count(i, T), 0.0);
    for (int t = T - 1; t >= 0; --t) {
      const int na = g.num_actions(t, i);
      std::vector<double> V(hs.count(i, t), 0.0);
      for (int h = 0; h < hs.count(i, t); ++h) {
        if (!usable[i][t][h]) continue;
        std::vector<double> Q(na, 0.0);
        for (const auto& e : mu[i][t][h]) {
          if (e.p <= 0) continue;
          const int x = e.key[0];
          for (int ju = 0; ju < g.num_joint_actions(t); ++ju) {
            auto u = g.decode_joint(t, ju);
            double w = e.p;
            for (int j = 0; j < n && w > 0; ++j)
              if (j != i) w *= a.profile[j].table[t][e.key[j + 1]][u[j]];
            if (w <= 0) continue;
            double v = g.rewards[t][x][ju][i];
            for (const auto& o : g.kernel[t][x][ju]) {
              if (o.p <= 0) continue;
              int c = hs.child(g, i, t, h, o.z[i]);
              if (c >= 0) v += o.p * Vn[c];
            }
            Q[u[i]] += w * v;
          }
        }
        const double best = *std::max_element(Q.begin(), Q.end());
        for (int u = 0; u < na; ++u) {
          const double p = a.profile[i].table[t][h][u];
          V[h] += p * Q[u];
          if (p > tol && Q[u] < best - tol) {
            rep.rational_ok = false;
            rep.issues.push_back("player " + g.players[i] + " plays " + g.actions[t][i][u] + " at stage " +
                                 std::to_string(t + 1) + ", history " + hs.label(g, i, t, h) + " with loss " +
                                 detail::fmt_double(best - Q[u]));
          }
        }
      }
      Vn = std::move(V);
    }
  }
  rep.wpbe = rep.bayes_ok && rep.rational_ok;
  return rep;
}

// ---------------------------------------------------------------- belief-based

BeliefBasedReport check_belief_based(const GameSpec& g, const Histories& hs, const Profile& profile,
                                     const InfoSplit& split, double tol) {
  const int n = g.num_players();
  const int T = g.horizon;
  BeliefBasedReport rep;
  JointDistribution jd = forward_distribution(g, hs, profile);
  rep.beliefs.resize(T);
  for (int t = 0; t < T; ++t) {
    const JointTable& tab = jd.stage[t];
    const int nc = static_cast<int>(split.common_labels[t].size());
    std::vector<std::map<std::vector<int>, double>> pi(nc);
    std::vector<double> z(nc, 0.0);
    for (std::size_t e = 0; e < tab.size(); ++e) {
      const int* k = tab.key(e);
      const int c = split.common[0][t][k[1]];
      std::vector<int> key{k[0]};
      for (int j = 0; j < n; ++j) {
        if (split.common[j][t][k[j + 1]] != c)
          throw Error(ErrorKind::BadParameter, "players disagree on the common history at stage " + std::to_string(t + 1));
        key.push_back(split.priv[j][t][k[j + 1]]);
      }
      pi[c][key] += tab.p[e];
      z[c] += tab.p[e];
    }
    rep.beliefs[t].resize(nc);
    for (int c = 0; c < nc; ++c) {
      if (z[c] <= 0) continue;
      for (auto& [key, p] : pi[c]) {
        p /= z[c];
        std::string lab = "x=" + g.states[t][key[0]];
        for (int j = 0; j < n; ++j) lab += ", l[" + g.players[j] + "]=" + split.private_labels[j][t][key[j + 1]];
        rep.beliefs[t][c].push_back({lab, p});
      }
    }
    // profile-level check: equal belief and equal private part imply equal action
    for (int i = 0; i < n && rep.belief_based; ++i) {
      for (int h = 0; h < hs.count(i, t) && rep.belief_based; ++h)
        for (int h2 = h + 1; h2 < hs.count(i, t); ++h2) {
          const int c = split.common[i][t][h], c2 = split.common[i][t][h2];
          if (c == c2 || split.priv[i][t][h] != split.priv[i][t][h2]) continue;
          if (z[c] <= 0 || z[c2] <= 0) continue;
          if (!same(pi[c], pi[c2], tol)) continue;
          double gap = 0;
          for (int u = 0; u < g.num_actions(t, i); ++u)
            gap = std::max(gap, std::abs(profile[i].table[t][h][u] - profile[i].table[t][h2][u]));
          if (gap > tol) {
            rep.belief_based = false;
            rep.player = i;
            rep.t = t + 1;
            rep.common_a = split.common_labels[t][c];
            rep.common_b = split.common_labels[t][c2];
            rep.private_label = split.private_labels[i][t][split.priv[i][t][h]];
            rep.action_gap = gap;
            break;
          }
        }
    }
  }
  return rep;
}

}  // namespace dyngame
