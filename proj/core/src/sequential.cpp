#include <algorithm>
#include <cmath>

#include "dyngame/equilibrium.hpp"
#include "util.hpp"

namespace dyngame {

SeReport verify_se_canonical(const GameSpec& g, const Histories& hs, const Profile& profile, const EpsSchedule& sch) {
  sch.validate(g);
  const int n = g.num_players();
  const int T = g.horizon;
  const int N = static_cast<int>(sch.eps.size());
  SeReport rep;
  rep.margin = 4.0 * T * n * g.reward_bound;
  rep.max_gap.assign(N, 0.0);
  rep.Q.resize(n);
  // gap[n][i][t][h] = max over supported actions of (max Q - Q(u)), with the worst action
  struct Worst {
    double gap = 0;
    int u = -1;
  };
  std::vector<std::vector<std::vector<std::vector<Worst>>>> gap(N);
  for (int k = 0; k < N; ++k) {
    Profile tr = tremble(profile, sch.eps[k]);
    gap[k].resize(n);
    std::vector<std::vector<std::vector<Dist>>> Q(n);
    detail::parallel_for(n, [&](int i) {
      DecisionProblem dp = build_decision_problem(g, hs, tr, i);
      DPResult bi = backward_induction(dp.mdp);
      gap[k][i].resize(T);
      for (int t = 0; t < T; ++t) {
        gap[k][i][t].resize(hs.count(i, t));
        for (int h = 0; h < hs.count(i, t); ++h) {
          const auto& q = bi.tables.Q[t][h];
          double best = *std::max_element(q.begin(), q.end());
          Worst w;
          for (std::size_t u = 0; u < q.size(); ++u)
            if (profile[i].table[t][h][u] > 1e-12 && best - q[u] > w.gap) w = {best - q[u], static_cast<int>(u)};
          gap[k][i][t][h] = w;
        }
      }
      Q[i] = std::move(bi.tables.Q);
    });
    for (int i = 0; i < n; ++i)
      for (const auto& row : gap[k][i])
        for (const auto& w : row) rep.max_gap[k] = std::max(rep.max_gap[k], w.gap);
    if (k == N - 1) rep.Q = std::move(Q);
  }
  // The last four points (or all, if fewer) must satisfy gap <= kappa * eps.
  const int from = std::max(0, N - 4);
  for (int k = 0; k < N; ++k)
    for (int i = 0; i < n; ++i)
      for (int t = 0; t < T; ++t)
        for (int h = 0; h < hs.count(i, t); ++h) {
          const Worst& w = gap[k][i][t][h];
          if (w.u < 0 || w.gap <= rep.margin * sch.eps[k] + 1e-9) continue;
          rep.violations.push_back({i, t + 1, hs.label(g, i, t, h), g.actions[t][i][w.u], w.gap, sch.eps[k], k});
        }
  rep.se = std::none_of(rep.violations.begin(), rep.violations.end(),
                        [&](const SeViolation& v) { return v.n >= from; });
  // gaps at the tail must not grow
  if (rep.se && N - from >= 2 && rep.max_gap[N - 1] > rep.max_gap[from] + 1e-9) rep.se = false;
  rep.verdict = rep.se ? "SE (canonical trembles)" : "inconclusive";
  return rep;
}

SeSolveResult solve_k_based_se(const GameSpec& g, const Histories& hs, const std::vector<Compression>& K,
                               const EpsSchedule& sch, double bne_tol) {
  SeSolveResult out;
  out.solve = solve_k_based_bne(g, hs, K, sch, bne_tol);
  const int n = g.num_players();
  std::vector<CompressedIndex> psi;
  for (int i = 0; i < n; ++i) psi.push_back(compress_histories(g, hs, i, K[i]));
  for (const auto& pt : out.solve.trace) {
    // supp(rho) inside the eps-argmax: V - <rho, Q> vanishes exactly then
    double r = 0;
    for (int i = 0; i < n; ++i)
      for (std::size_t t = 0; t < pt.br[i].Q.size(); ++t)
        for (std::size_t k = 0; k < pt.br[i].Q[t].size(); ++k) {
          const auto& q = pt.br[i].Q[t][k];
          double v = 0;
          for (std::size_t a = 0; a < q.size(); ++a) v += pt.profile[i].table[t][k][a] * q[a];
          r = std::max(r, pt.br[i].V[t][k] - v);
        }
    out.containment_residual.push_back(r);
  }
  const auto& last = out.solve.trace.back();
  out.Q.resize(n);
  for (int i = 0; i < n; ++i) {
    out.Q[i].resize(g.horizon);
    for (int t = 0; t < g.horizon; ++t)
      for (int h = 0; h < hs.count(i, t); ++h) out.Q[i][t].push_back(last.br[i].Q[t][psi[i][t][h]]);
  }
  out.se = verify_se_canonical(g, hs, out.solve.profile, sch);
  return out;
}

}  // namespace dyngame
