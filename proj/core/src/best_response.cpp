#include <algorithm>
#include <cmath>

#include "dyngame/equilibrium.hpp"

namespace dyngame {

double BneReport::max_gap() const {
  double m = 0;
  for (double x : gaps) m = std::max(m, x);
  return m;
}

BestResponse best_response_value(const GameSpec& g, const Histories& hs, const Profile& profile, int i) {
  DecisionProblem dp = build_decision_problem(g, hs, profile, i);
  DPResult r = backward_induction(dp.mdp);
  BestResponse out;
  out.value = r.value;
  out.tables = std::move(r.tables);
  out.strategy.table = std::move(r.policy);
  // inactive rows come back empty or arbitrary; keep them uniform
  for (int t = 0; t < g.horizon; ++t)
    for (int h = 0; h < hs.count(i, t); ++h) {
      Dist& d = out.strategy.table[t][h];
      if (!dp.mdp.is_active(t, h) || d.size() != static_cast<std::size_t>(g.num_actions(t, i)))
        d.assign(g.num_actions(t, i), 1.0 / g.num_actions(t, i));
    }
  return out;
}

BneReport verify_bne(const GameSpec& g, const Histories& hs, const Profile& profile, double tol) {
  BneReport rep;
  rep.tol = tol;
  rep.payoffs = compute_payoffs(g, hs, profile);
  rep.is_bne = true;
  for (int i = 0; i < g.num_players(); ++i) {
    double br = best_response_value(g, hs, profile, i).value;
    rep.best_response.push_back(br);
    double gap = std::max(0.0, br - rep.payoffs[i]);
    rep.gaps.push_back(gap);
    if (gap > tol) rep.is_bne = false;
  }
  return rep;
}

BRTables best_response_dp_eps(const GameSpec& g, const Histories& hs, int i, const Profile& profile,
                              const Compression& Ki, double eps, double tol) {
  DecisionProblem dp = build_decision_problem(g, hs, profile, i);
  InfoStateMap psi = info_state_map(g, hs, i, Ki);
  Reduction red = reduce_by_info_state(dp.mdp, psi, tol);
  if (!red.valid) {
    const auto& c = *red.counterexample;
    throw Error(ErrorKind::NotMSIWitness,
                "K of player " + g.players[i] + " is not an information state against the given strategies: " +
                    c.condition + " differs at stage " + std::to_string(c.t + 1) + " between histories " +
                    hs.label(g, i, c.t, c.x) + " and " + hs.label(g, i, c.t, c.x2));
  }
  return eps_backward_induction(red.reduced, eps);
}

}  // namespace dyngame
