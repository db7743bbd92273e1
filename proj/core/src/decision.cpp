#include "dyngame/decision.hpp"

#include "util.hpp"

namespace dyngame {

DecisionProblem build_decision_problem(const GameSpec& g, const Histories& hs, const Profile& profile, int i,
                                       bool use_profile_reference, const ForwardOptions& opt) {
  const int n = g.num_players();
  const int T = g.horizon;
  DecisionProblem dp;
  dp.player = i;
  MDP& m = dp.mdp;
  m.horizon = T;
  m.reward_bound = g.reward_bound;
  for (int t = 0; t <= T; ++t) m.states.push_back(hs.count(i, t));
  for (int t = 0; t < T; ++t) m.actions.push_back(g.num_actions(t, i));
  m.P.resize(T);
  m.r.resize(T);
  m.active.resize(T + 1);
  dp.rewards.assign(n, RewardTable(T));
  dp.reach.resize(T + 1);

  const Strategy ref = use_profile_reference ? profile[i] : uniform_strategy(g, hs, i);
  JointTable cur = initial_joint(g, hs);
  m.initial.assign(hs.count(i, 0), 0.0);
  for (std::size_t e = 0; e < cur.size(); ++e) m.initial[cur.key(e)[i + 1]] += cur.p[e];

  std::vector<int> nk(n + 1);
  for (int t = 0; t < T; ++t) {
    const int nh = hs.count(i, t);
    const int na = g.num_actions(t, i);
    const int nz = g.num_increments(t, i);
    const int nu = g.num_joint_actions(t);
    std::vector<std::vector<int>> U(nu);
    for (int ju = 0; ju < nu; ++ju) U[ju] = g.decode_joint(t, ju);
    std::vector<double> denom(nh, 0.0);
    std::vector<double> accP(static_cast<std::size_t>(nh) * na * nz, 0.0);
    for (int j = 0; j < n; ++j) dp.rewards[j][t].assign(nh, std::vector<double>(na, 0.0));
    JointTable nxt;
    nxt.width = n + 1;
    detail::KeyIndex idx(nxt.width);
    for (std::size_t e = 0; e < cur.size(); ++e) {
      const int* k = cur.key(e);
      const double p = cur.p[e];
      const int x = k[0];
      const int h = k[i + 1];
      denom[h] += p;
      for (int ju = 0; ju < nu; ++ju) {
        const int a = U[ju][i];
        double w = p;
        for (int j = 0; j < n && w > 0; ++j)
          if (j != i) w *= profile[j].table[t][k[j + 1]][U[ju][j]];
        if (w <= 0) continue;
        const auto& r = g.rewards[t][x][ju];
        for (int j = 0; j < n; ++j) dp.rewards[j][t][h][a] += w * r[j];
        const double wr = w * ref.table[t][h][a];
        for (const auto& o : g.kernel[t][x][ju]) {
          if (o.p <= 0) continue;
          accP[(static_cast<std::size_t>(h) * na + a) * nz + o.z[i]] += w * o.p;
          if (wr <= 0) continue;
          nk[0] = o.next_state;
          for (int j = 0; j < n; ++j) nk[j + 1] = hs.child(g, j, t, k[j + 1], o.z[j]);
          std::size_t s = idx.insert(nk.data());
          if (s >= nxt.p.size()) {
            if (nxt.p.size() >= opt.support_cap) throw Error(ErrorKind::SupportTooLarge, "joint support exceeds the cap");
            nxt.p.push_back(0);
          }
          nxt.p[s] += wr * o.p;
        }
      }
    }
    nxt.keys = std::move(idx.keys());
    m.P[t].assign(nh, std::vector<SparseRow>(na));
    m.r[t].assign(nh, std::vector<double>(na, 0.0));
    m.active[t].assign(nh, 0);
    dp.reach[t] = denom;
    for (int h = 0; h < nh; ++h) {
      if (denom[h] <= 0) continue;
      m.active[t][h] = 1;
      for (int a = 0; a < na; ++a) {
        for (int z = 0; z < nz; ++z) {
          double q = accP[(static_cast<std::size_t>(h) * na + a) * nz + z];
          if (q > 0) m.P[t][h][a].push_back({hs.child(g, i, t, h, z), q / denom[h]});
        }
        for (int j = 0; j < n; ++j) dp.rewards[j][t][h][a] /= denom[h];
      }
    }
    m.r[t] = dp.rewards[i][t];
    cur = std::move(nxt);
  }
  dp.reach[T].assign(hs.count(i, T), 0.0);
  for (std::size_t e = 0; e < cur.size(); ++e) dp.reach[T][cur.key(e)[i + 1]] += cur.p[e];
  m.active[T].assign(hs.count(i, T), 0);
  for (int h = 0; h < hs.count(i, T); ++h) m.active[T][h] = dp.reach[T][h] > 0;
  return dp;
}

InfoStateMap info_state_map(const GameSpec& g, const Histories& hs, int i, const Compression& c) {
  InfoStateMap m;
  m.psi = compress_histories(g, hs, i, c);
  for (int t = 0; t < g.horizon; ++t) m.count.push_back(c.count(t));
  return m;
}

}  // namespace dyngame
