#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "dyngame/game.hpp"
#include "util.hpp"

namespace dyngame {

namespace {

std::vector<std::vector<int>> decoded_actions(const GameSpec& g, int t) {
  std::vector<std::vector<int>> out(g.num_joint_actions(t));
  for (int ju = 0; ju < static_cast<int>(out.size()); ++ju) out[ju] = g.decode_joint(t, ju);
  return out;
}

}  // namespace

JointTable initial_joint(const GameSpec& g, const Histories& hs) {
  const int n = g.num_players();
  JointTable tab;
  tab.width = n + 1;
  detail::KeyIndex idx(tab.width);
  std::vector<int> key(tab.width);
  // H_1 label -> id
  std::vector<std::vector<int>> id(n);
  for (int i = 0; i < n; ++i) {
    id[i].assign(g.initial_info[i].size(), -1);
    for (int h = 0; h < hs.count(i, 0); ++h) id[i][hs.player[i].last[0][h]] = h;
  }
  for (const auto& e : g.initial) {
    if (e.p <= 0) continue;
    key[0] = e.state;
    for (int i = 0; i < n; ++i) key[i + 1] = id[i][e.info[i]];
    std::size_t s = idx.insert(key.data());
    if (s >= tab.p.size()) tab.p.push_back(0);
    tab.p[s] += e.p;
  }
  tab.keys = std::move(idx.keys());
  return tab;
}

JointDistribution forward_distribution(const GameSpec& g, const Histories& hs, const Profile& profile,
                                       const ForwardOptions& opt) {
  const int n = g.num_players();
  const int T = g.horizon;
  JointDistribution jd;
  jd.stage.reserve(T + 1);
  jd.stage.push_back(initial_joint(g, hs));
  jd.stage_reward.assign(T, std::vector<double>(n, 0.0));
  jd.payoff.assign(n, 0.0);
  std::vector<int> nk(n + 1);
  for (int t = 0; t < T; ++t) {
    const JointTable& cur = jd.stage[t];
    auto U = decoded_actions(g, t);
    JointTable nxt;
    nxt.width = n + 1;
    detail::KeyIndex idx(nxt.width);
    for (std::size_t e = 0; e < cur.size(); ++e) {
      const int* k = cur.key(e);
      const double p = cur.p[e];
      const int x = k[0];
      for (std::size_t ju = 0; ju < U.size(); ++ju) {
        double w = p;
        for (int i = 0; i < n && w > 0; ++i) w *= profile[i].table[t][k[i + 1]][U[ju][i]];
        if (w <= 0) continue;
        const auto& r = g.rewards[t][x][ju];
        for (int i = 0; i < n; ++i) jd.stage_reward[t][i] += w * r[i];
        for (const auto& o : g.kernel[t][x][ju]) {
          double q = w * o.p;
          if (q <= 0) continue;
          nk[0] = o.next_state;
          for (int i = 0; i < n; ++i) nk[i + 1] = hs.child(g, i, t, k[i + 1], o.z[i]);
          std::size_t s = idx.insert(nk.data());
          if (s >= nxt.p.size()) {
            if (nxt.p.size() >= opt.support_cap)
              throw Error(ErrorKind::SupportTooLarge,
                          "joint support at stage " + std::to_string(t + 2) + " exceeds the cap");
            nxt.p.push_back(0);
          }
          nxt.p[s] += q;
        }
      }
    }
    nxt.keys = std::move(idx.keys());
    jd.stage.push_back(std::move(nxt));
  }
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < n; ++i) jd.payoff[i] += jd.stage_reward[t][i];
  return jd;
}

std::vector<double> compute_payoffs(const GameSpec& g, const Histories& hs, const Profile& profile,
                                    const ForwardOptions& opt) {
  return forward_distribution(g, hs, profile, opt).payoff;
}

// ---------------------------------------------------------------- conditionals

const ConditionalRow* ConditionalTable::find(const std::vector<long long>& condition) const {
  auto it = std::lower_bound(rows.begin(), rows.end(), condition,
                             [](const ConditionalRow& r, const std::vector<long long>& c) { return r.condition < c; });
  if (it == rows.end() || it->condition != condition) return nullptr;
  return &*it;
}

namespace {

using Record = std::map<std::vector<long long>, std::map<std::vector<long long>, double>>;

void collect(const GameSpec& g, const Histories& hs, const Profile& profile, int t, const std::vector<Var>& targets,
             const std::vector<Var>& conds, const std::vector<CompressedIndex>& psi, const ForwardOptions& opt,
             Record& out) {
  const int n = g.num_players();
  bool needs_step = false;
  for (const auto* vs : {&targets, &conds})
    for (const auto& v : *vs)
      if (v.kind == VarKind::Action || v.kind == VarKind::Increment || v.kind == VarKind::Reward) needs_step = true;
  if (needs_step && t >= g.horizon)
    throw Error(ErrorKind::BadParameter, "actions, increments and rewards exist only for stages 1..T");
  JointDistribution jd = forward_distribution(g, hs, profile, opt);
  const JointTable& tab = jd.stage[t];
  auto value = [&](const Var& v, const int* k, const std::vector<int>* u, const Outcome* o, int ju) -> long long {
    switch (v.kind) {
      case VarKind::State: return k[0];
      case VarKind::History: return k[v.player + 1];
      case VarKind::Compressed: return psi.at(v.player).at(t).at(k[v.player + 1]);
      case VarKind::Action: return (*u)[v.player];
      case VarKind::Increment: return o->z[v.player];
      case VarKind::Reward: return std::llround(g.rewards[t][k[0]][ju][v.player] * 1e9);
    }
    return 0;
  };
  auto emit = [&](double q, const int* k, const std::vector<int>* u, const Outcome* o, int ju) {
    std::vector<long long> c, tg;
    for (const auto& v : conds) c.push_back(value(v, k, u, o, ju));
    for (const auto& v : targets) tg.push_back(value(v, k, u, o, ju));
    out[c][tg] += q;
  };
  for (std::size_t e = 0; e < tab.size(); ++e) {
    const int* k = tab.key(e);
    if (!needs_step) {
      emit(tab.p[e], k, nullptr, nullptr, 0);
      continue;
    }
    for (int ju = 0; ju < g.num_joint_actions(t); ++ju) {
      auto u = g.decode_joint(t, ju);
      double w = tab.p[e];
      for (int i = 0; i < n && w > 0; ++i) w *= profile[i].table[t][k[i + 1]][u[i]];
      if (w <= 0) continue;
      for (const auto& o : g.kernel[t][k[0]][ju])
        if (o.p > 0) emit(w * o.p, k, &u, &o, ju);
    }
  }
}

}  // namespace

ConditionalTable conditional_table(const GameSpec& g, const Histories& hs, const Profile& profile, int t,
                                   const std::vector<Var>& targets, const std::vector<Var>& conditions,
                                   const std::vector<Compression>& compressions, const ForwardOptions& opt) {
  std::vector<CompressedIndex> psi;
  for (int i = 0; i < static_cast<int>(compressions.size()); ++i)
    psi.push_back(compress_histories(g, hs, i, compressions[i]));
  Record under_g, universe;
  collect(g, hs, profile, t, targets, conditions, psi, opt, under_g);
  collect(g, hs, uniform_profile(g, hs), t, targets, conditions, psi, opt, universe);
  ConditionalTable out;
  for (const auto& [c, _] : universe) {
    ConditionalRow row;
    row.condition = c;
    auto it = under_g.find(c);
    if (it != under_g.end()) {
      double z = 0;
      for (const auto& [tg, q] : it->second) z += q;
      row.probability = z;
      row.admissible = z > 0;
      if (row.admissible)
        for (const auto& [tg, q] : it->second)
          if (q > 0) row.target.push_back({tg, q / z});
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

// ---------------------------------------------------------------- Monte Carlo

MonteCarloResult monte_carlo_payoff(const GameSpec& g, const Histories& hs, const Profile& profile,
                                    std::size_t samples, std::uint64_t seed) {
  const int n = g.num_players();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto draw = [&](auto&& weights, std::size_t m) {
    double r = unif(rng), acc = 0;
    std::size_t last = 0;
    for (std::size_t a = 0; a < m; ++a) {
      double w = weights(a);
      if (w <= 0) continue;
      last = a;
      acc += w;
      if (r < acc) return a;
    }
    return last;
  };
  std::vector<std::vector<int>> h1(n);
  for (int i = 0; i < n; ++i) {
    h1[i].assign(g.initial_info[i].size(), -1);
    for (int h = 0; h < hs.count(i, 0); ++h) h1[i][hs.player[i].last[0][h]] = h;
  }
  std::vector<double> sum(n, 0), sumsq(n, 0), total(n);
  std::vector<int> h(n), u(n);
  for (std::size_t s = 0; s < samples; ++s) {
    std::size_t e = draw([&](std::size_t a) { return g.initial[a].p; }, g.initial.size());
    int x = g.initial[e].state;
    for (int i = 0; i < n; ++i) h[i] = h1[i][g.initial[e].info[i]];
    std::fill(total.begin(), total.end(), 0.0);
    for (int t = 0; t < g.horizon; ++t) {
      for (int i = 0; i < n; ++i) {
        const Dist& d = profile[i].table[t][h[i]];
        u[i] = static_cast<int>(draw([&](std::size_t a) { return d[a]; }, d.size()));
      }
      int ju = g.encode_joint(t, u);
      for (int i = 0; i < n; ++i) total[i] += g.rewards[t][x][ju][i];
      const auto& outs = g.kernel[t][x][ju];
      const Outcome& o = outs[draw([&](std::size_t a) { return outs[a].p; }, outs.size())];
      x = o.next_state;
      for (int i = 0; i < n; ++i) h[i] = hs.child(g, i, t, h[i], o.z[i]);
    }
    for (int i = 0; i < n; ++i) {
      sum[i] += total[i];
      sumsq[i] += total[i] * total[i];
    }
  }
  MonteCarloResult r;
  r.samples = samples;
  for (int i = 0; i < n; ++i) {
    double m = sum[i] / static_cast<double>(samples);
    double var = samples > 1 ? std::max(0.0, (sumsq[i] - samples * m * m) / static_cast<double>(samples - 1)) : 0.0;
    r.mean.push_back(m);
    r.stderr_.push_back(std::sqrt(var / static_cast<double>(samples)));
  }
  return r;
}

}  // namespace dyngame
