#include <algorithm>
#include <cmath>

#include "dyngame/equilibrium.hpp"

namespace dyngame {

namespace {

double linf(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

void require_usi(const GameSpec& g, const Histories& hs, const std::vector<Compression>& K, const TransferOptions& opt) {
  if (!opt.check_usi_first) return;
  for (int i = 0; i < g.num_players(); ++i) {
    InfoStateWitness w = check_usi(g, hs, i, K[i], opt.sampler);
    if (w.verdict == Verdict::Fails) {
      std::string msg = "K of player " + g.players[i] + " is not USI";
      if (w.counterexample)
        msg += " (" + w.counterexample->test + " at stage " + std::to_string(w.counterexample->t) + ")";
      throw Error(ErrorKind::NotUSIWitness, msg);
    }
  }
}

}  // namespace

KStrategy usi_replace(const GameSpec& g, const Histories& hs, int i, const Compression& Ki, const Strategy& gi) {
  CompressedIndex psi = compress_histories(g, hs, i, Ki);
  Profile ref = uniform_profile(g, hs);
  ref[i] = gi;
  JointDistribution jd = forward_distribution(g, hs, ref);
  KStrategy rho;
  rho.table.resize(g.horizon);
  for (int t = 0; t < g.horizon; ++t) {
    const int na = g.num_actions(t, i);
    std::vector<double> ph(hs.count(i, t), 0.0);
    const JointTable& tab = jd.stage[t];
    for (std::size_t e = 0; e < tab.size(); ++e) ph[tab.key(e)[i + 1]] += tab.p[e];
    std::vector<double> pk(Ki.count(t), 0.0);
    rho.table[t].assign(Ki.count(t), Dist(na, 0.0));
    for (int h = 0; h < hs.count(i, t); ++h) {
      const int k = psi[t][h];
      pk[k] += ph[h];
      for (int a = 0; a < na; ++a) rho.table[t][k][a] += ph[h] * gi.table[t][h][a];
    }
    for (int k = 0; k < Ki.count(t); ++k) {
      Dist& d = rho.table[t][k];
      if (pk[k] > 0)
        for (double& x : d) x /= pk[k];
      else
        std::fill(d.begin(), d.end(), 1.0 / na);
    }
  }
  return rho;
}

TransferResult transfer_bne_via_usi(const GameSpec& g, const Histories& hs, const std::vector<Compression>& K,
                                    const Profile& bne, const TransferOptions& opt) {
  require_usi(g, hs, K, opt);
  const int n = g.num_players();
  TransferResult out;
  out.input_payoffs = compute_payoffs(g, hs, bne);
  // Replace one player at a time; each step keeps the others' view of the
  // replaced player unchanged, so the BNE property and payoffs carry over.
  Profile cur = bne;
  out.kprofile.resize(n);
  for (int i = 0; i < n; ++i) {
    out.kprofile[i] = usi_replace(g, hs, i, K[i], cur[i]);
    cur[i] = lift(out.kprofile[i], compress_histories(g, hs, i, K[i]));
  }
  out.profile = cur;
  out.bne = verify_bne(g, hs, cur, opt.tol);
  out.payoff_distance = linf(out.input_payoffs, out.bne.payoffs);
  out.ok = out.bne.is_bne && out.payoff_distance <= opt.tol;
  return out;
}

SeTransferResult transfer_se_via_usi(const GameSpec& g, const Histories& hs, const std::vector<Compression>& K,
                                     const Profile& se_profile, const EpsSchedule& sch, const TransferOptions& opt) {
  sch.validate(g);
  require_usi(g, hs, K, opt);
  const int n = g.num_players();
  SeTransferResult out;
  out.input_payoffs = compute_payoffs(g, hs, se_profile);
  std::vector<CompressedIndex> psi;
  for (int i = 0; i < n; ++i) psi.push_back(compress_histories(g, hs, i, K[i]));
  // Replace along the trembled sequence, then take the limit.
  std::vector<std::vector<KStrategy>> seq;
  for (double eps : sch.eps) {
    Profile cur = tremble(se_profile, eps);
    std::vector<KStrategy> kp(n);
    for (int i = 0; i < n; ++i) {
      kp[i] = usi_replace(g, hs, i, K[i], cur[i]);
      cur[i] = lift(kp[i], psi[i]);
    }
    seq.push_back(std::move(kp));
  }
  out.kprofile = seq.back();
  if (seq.size() >= 2) {
    const double r = sch.eps.back() / sch.eps[sch.eps.size() - 2];
    const auto& a = seq[seq.size() - 2];
    const auto& b = seq.back();
    for (int i = 0; i < n; ++i)
      for (std::size_t t = 0; t < b[i].table.size(); ++t)
        for (std::size_t k = 0; k < b[i].table[t].size(); ++k)
          for (std::size_t u = 0; u < b[i].table[t][k].size(); ++u)
            out.kprofile[i].table[t][k][u] = (b[i].table[t][k][u] - r * a[i].table[t][k][u]) / (1 - r);
  }
  for (auto& s : out.kprofile)
    for (auto& row : s.table)
      for (auto& d : row) {
        double tot = 0;
        for (double& x : d) {
          if (x < 1e-9) x = 0;
          tot += x;
        }
        for (double& x : d) x = tot > 0 ? x / tot : 1.0 / static_cast<double>(d.size());
      }
  out.profile.resize(n);
  for (int i = 0; i < n; ++i) out.profile[i] = lift(out.kprofile[i], psi[i]);
  out.payoffs = compute_payoffs(g, hs, out.profile);
  out.payoff_distance = linf(out.input_payoffs, out.payoffs);
  out.se = verify_se_canonical(g, hs, out.profile, sch);
  out.ok = out.se.se && out.payoff_distance <= opt.tol;
  return out;
}

}  // namespace dyngame
