#include "dyngame/info_state.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "util.hpp"

namespace dyngame {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

void check_sampler(const SamplerConfig& cfg, const GameSpec& g) {
  if (cfg.samples < 2) throw Error(ErrorKind::BadParameter, "sample count M must be at least 2");
  int maxu = 1;
  for (int t = 0; t < g.horizon; ++t)
    for (int i = 0; i < g.num_players(); ++i) maxu = std::max(maxu, g.num_actions(t, i));
  if (!(cfg.mix_floor > 0) || cfg.mix_floor > 1.0 / maxu + 1e-15)
    throw Error(ErrorKind::BadParameter, "mixing floor must lie in (0, 1/max|U|]");
}

std::mt19937_64 sample_rng(std::uint64_t seed, int stream, int player, int sample) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(player),
                    static_cast<std::uint32_t>(sample)};
  return std::mt19937_64(seq);
}

Dist random_dist(int m, double floor, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Dist w(m);
  double s = 0;
  for (auto& x : w) {
    x = -std::log(1.0 - u(rng));
    s += x;
  }
  for (auto& x : w) x = floor + (1.0 - floor * m) * x / s;
  return w;
}

Strategy random_strategy(const GameSpec& g, const Histories& hs, int i, double floor, std::mt19937_64& rng) {
  Strategy s;
  s.table.resize(g.horizon);
  for (int t = 0; t < g.horizon; ++t) {
    int m = g.num_actions(t, i);
    double f = std::min(floor, 1.0 / m);
    for (int h = 0; h < hs.count(i, t); ++h) s.table[t].push_back(random_dist(m, f, rng));
  }
  return s;
}

KStrategy random_kstrategy(const GameSpec& g, const Compression& c, int i, double floor, std::mt19937_64& rng) {
  KStrategy s;
  s.table.resize(g.horizon);
  for (int t = 0; t < g.horizon; ++t) {
    int m = g.num_actions(t, i);
    double f = std::min(floor, 1.0 / m);
    for (int k = 0; k < c.count(t); ++k) s.table[t].push_back(random_dist(m, f, rng));
  }
  return s;
}

namespace {

// Streams keep the sampled families independent of each other.
enum Stream { kOwn = 1, kOthers = 2, kLemma = 3 };

// Keeps the counterexample with the smallest stage.
void keep_earliest(std::optional<Counterexample>& best, const std::optional<Counterexample>& c) {
  if (c && (!best || c->t < best->t)) best = c;
}

}  // namespace

InfoStateWitness check_information_state(const GameSpec& g, const Histories& hs, int i, const Profile& profile,
                                         const Compression& c, const std::vector<int>& payoff_set, double tol) {
  InfoStateWitness w;
  w.player = i;
  w.payoff_set = payoff_set;
  if (payoff_set.empty()) throw Error(ErrorKind::BadParameter, "payoff set must be nonempty");
  DecisionProblem dp = build_decision_problem(g, hs, profile, i);
  InfoStateMap psi = info_state_map(g, hs, i, c);
  MDP m = dp.mdp;
  m.r = dp.rewards[payoff_set.front()];
  std::vector<RewardTable> extra;
  for (std::size_t a = 1; a < payoff_set.size(); ++a) extra.push_back(dp.rewards[payoff_set[a]]);
  std::vector<RewardTable> extra_red;
  Reduction red = reduce_by_info_state(m, psi, tol, &extra, &extra_red);
  w.samples_checked = 1;
  if (!red.valid) {
    const auto& ce = *red.counterexample;
    Counterexample out;
    out.test = ce.condition.rfind("transition", 0) == 0 ? "transition" : "reward";
    out.player = i;
    out.t = ce.t + 1;
    out.k = c.labels[ce.t][psi.psi[ce.t][ce.x]];
    out.first = hs.label(g, i, ce.t, ce.x);
    out.second = hs.label(g, i, ce.t, ce.x2);
    out.action = g.actions[ce.t][i][ce.u];
    out.lhs = ce.lhs;
    out.rhs = ce.rhs;
    w.verdict = Verdict::Fails;
    w.label = "fails";
    w.counterexample = out;
    return w;
  }
  w.verdict = Verdict::Holds;
  w.label = "holds";
  w.reduced = red.reduced;
  w.rewards.push_back(red.reduced.r);
  for (auto& e : extra_red) w.rewards.push_back(std::move(e));
  return w;
}

MsiResult check_msi(const GameSpec& g, const Histories& hs, const std::vector<Compression>& K,
                    const SamplerConfig& cfg) {
  check_sampler(cfg, g);
  const int n = g.num_players();
  const int M = cfg.samples;
  std::vector<CompressedIndex> psi;
  for (int j = 0; j < n; ++j) psi.push_back(compress_histories(g, hs, j, K[j]));
  std::vector<InfoStateWitness> results(static_cast<std::size_t>(n) * M);
  detail::parallel_for(n * M, [&](int job) {
    const int i = job / M, m = job % M;
    Profile prof = uniform_profile(g, hs);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      auto rng = sample_rng(cfg.seed, kOthers, j * 1000 + i, m);
      prof[j] = lift(random_kstrategy(g, K[j], j, cfg.mix_floor, rng), psi[j]);
    }
    results[job] = check_information_state(g, hs, i, prof, K[i], {i}, cfg.tol);
    if (results[job].counterexample) {
      results[job].counterexample->sample = m;
      results[job].counterexample->seed = cfg.seed;
    }
  });
  MsiResult out;
  out.verdict = Verdict::Holds;
  for (int i = 0; i < n; ++i) {
    InfoStateWitness agg = results[static_cast<std::size_t>(i) * M];
    agg.samples_checked = M;
    std::optional<Counterexample> ce;
    for (int m = 0; m < M; ++m) keep_earliest(ce, results[static_cast<std::size_t>(i) * M + m].counterexample);
    if (ce) {
      agg.verdict = Verdict::Fails;
      agg.label = "fails";
      agg.counterexample = ce;
      out.verdict = Verdict::Fails;
      keep_earliest(out.counterexample, ce);
    } else {
      agg.verdict = Verdict::Holds;
      agg.label = "holds (sampled)";
    }
    out.players.push_back(std::move(agg));
  }
  out.label = out.verdict == Verdict::Holds ? "holds (sampled)" : "fails";
  return out;
}

MsiResult check_msi_lemma1(const GameSpec& g, const Histories& hs, const std::vector<Compression>& K,
                           const SamplerConfig& cfg) {
  check_sampler(cfg, g);
  const int n = g.num_players();
  const int M = cfg.samples;
  std::vector<CompressedIndex> psi;
  for (int j = 0; j < n; ++j) psi.push_back(compress_histories(g, hs, j, K[j]));
  std::vector<std::optional<Counterexample>> fails(static_cast<std::size_t>(n) * M);
  std::vector<std::vector<WitnessRow>> phis(n);
  detail::parallel_for(n * M, [&](int job) {
    const int i = job / M, m = job % M;
    Profile prof(n);
    for (int j = 0; j < n; ++j) {
      auto rng = sample_rng(cfg.seed, kLemma, j * 1000 + i, m);
      prof[j] = j == i ? random_strategy(g, hs, j, cfg.mix_floor, rng)
                       : lift(random_kstrategy(g, K[j], j, cfg.mix_floor, rng), psi[j]);
    }
    JointDistribution jd = forward_distribution(g, hs, prof);
    for (int t = 0; t < g.horizon; ++t) {
      const JointTable& tab = jd.stage[t];
      // h^i -> (x, k^-i) -> p
      std::map<int, std::map<std::vector<int>, double>> cond;
      std::vector<double> ph(hs.count(i, t), 0.0);
      for (std::size_t e = 0; e < tab.size(); ++e) {
        const int* key = tab.key(e);
        std::vector<int> v{key[0]};
        for (int j = 0; j < n; ++j)
          if (j != i) v.push_back(psi[j][t][key[j + 1]]);
        cond[key[i + 1]][v] += tab.p[e];
        ph[key[i + 1]] += tab.p[e];
      }
      std::map<int, int> rep;  // k -> first history
      for (auto& [h, row] : cond) {
        for (auto& [v, p] : row) p /= ph[h];
        int k = psi[i][t][h];
        auto it = rep.find(k);
        if (it == rep.end()) {
          rep[k] = h;
          if (m == 0)
            for (auto& [v, p] : row) {
              std::string lab = "x=" + g.states[t][v[0]];
              for (int j = 0, c = 1; j < n; ++j)
                if (j != i) lab += ", " + g.players[j] + ":" + K[j].labels[t][v[c++]];
              phis[i].push_back({t, k, lab, p});
            }
          continue;
        }
        const auto& ref = cond[it->second];
        auto differ = [&](const std::map<std::vector<int>, double>& a, const std::map<std::vector<int>, double>& b,
                          double& l, double& r) {
          for (auto& [v, p] : a) {
            auto jt = b.find(v);
            double q = jt == b.end() ? 0.0 : jt->second;
            if (std::abs(p - q) > cfg.tol) {
              l = p;
              r = q;
              return true;
            }
          }
          return false;
        };
        double l = 0, r = 0;
        if (differ(row, ref, l, r) || differ(ref, row, r, l)) {
          Counterexample ce;
          ce.test = "phi";
          ce.player = i;
          ce.t = t + 1;
          ce.k = K[i].labels[t][k];
          ce.first = hs.label(g, i, t, it->second);
          ce.second = hs.label(g, i, t, h);
          ce.lhs = r;
          ce.rhs = l;
          ce.sample = m;
          ce.seed = cfg.seed;
          keep_earliest(fails[job], ce);
          return;
        }
      }
    }
  });
  MsiResult out;
  out.verdict = Verdict::Holds;
  for (int i = 0; i < n; ++i) {
    InfoStateWitness w;
    w.player = i;
    w.payoff_set = {i};
    w.samples_checked = M;
    w.phi = std::move(phis[i]);
    std::optional<Counterexample> ce;
    for (int m = 0; m < M; ++m) keep_earliest(ce, fails[static_cast<std::size_t>(i) * M + m]);
    w.verdict = ce ? Verdict::Fails : Verdict::Holds;
    w.label = ce ? "fails" : "holds (sampled)";
    w.counterexample = ce;
    if (ce) {
      out.verdict = Verdict::Fails;
      keep_earliest(out.counterexample, ce);
    }
    out.players.push_back(std::move(w));
  }
  out.label = out.verdict == Verdict::Holds ? "holds (sampled)" : "fails";
  return out;
}

namespace {

struct UsiTables {
  std::vector<double> pk;                              // Pr(k)
  std::vector<double> ph;                              // Pr(h^i)
  std::map<std::pair<int, std::vector<int>>, double> po;  // (k, (x, h^-i)) -> Pr
};

UsiTables usi_tables(const GameSpec& g, const Histories& hs, int i, int t, const JointTable& tab,
                     const CompressedIndex& psi, int nk) {
  const int n = g.num_players();
  UsiTables u;
  u.pk.assign(nk, 0.0);
  u.ph.assign(hs.count(i, t), 0.0);
  for (std::size_t e = 0; e < tab.size(); ++e) {
    const int* key = tab.key(e);
    const int k = psi[t][key[i + 1]];
    u.pk[k] += tab.p[e];
    u.ph[key[i + 1]] += tab.p[e];
    std::vector<int> o{key[0]};
    for (int j = 0; j < n; ++j)
      if (j != i) o.push_back(key[j + 1]);
    u.po[{k, o}] += tab.p[e];
  }
  return u;
}

std::string others_label(const GameSpec& g, const Histories& hs, int i, int t, const std::vector<int>& o) {
  std::string s = "x=" + g.states[t][o[0]];
  for (int j = 0, c = 1; j < g.num_players(); ++j)
    if (j != i) s += ", " + g.players[j] + "=" + hs.label(g, j, t, o[c++]);
  return s;
}

}  // namespace

InfoStateWitness check_usi(const GameSpec& g, const Histories& hs, int i, const Compression& c,
                           const SamplerConfig& cfg) {
  check_sampler(cfg, g);
  const int n = g.num_players();
  const int M = cfg.samples;
  const CompressedIndex psi = compress_histories(g, hs, i, c);
  std::vector<Strategy> own(M);
  std::vector<Profile> others(M);
  for (int m = 0; m < M; ++m) {
    auto r = sample_rng(cfg.seed, kOwn, i, m);
    own[m] = random_strategy(g, hs, i, cfg.mix_floor, r);
    others[m].resize(n);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      auto rj = sample_rng(cfg.seed, kOthers, j * 1000 + i, m);
      others[m][j] = random_strategy(g, hs, j, cfg.mix_floor, rj);
    }
  }
  auto profile = [&](int a, int b) {
    Profile p = others[b];
    p[i] = own[a];
    return p;
  };
  std::vector<std::optional<Counterexample>> fails(M);
  std::vector<WitnessRow> Fw, Pw;
  detail::parallel_for(M, [&](int m) {
    const int m2 = (m + 1) % M;
    JointDistribution base = forward_distribution(g, hs, profile(m, m));
    JointDistribution vary_others = forward_distribution(g, hs, profile(m, m2));
    JointDistribution vary_own = forward_distribution(g, hs, profile(m2, m));
    auto fail = [&](const char* test, int t, int k, std::string a, std::string b, double l, double r, int s2) {
      Counterexample ce;
      ce.test = test;
      ce.player = i;
      ce.t = t + 1;
      ce.k = c.labels[t][k];
      ce.first = std::move(a);
      ce.second = std::move(b);
      ce.lhs = l;
      ce.rhs = r;
      ce.sample = m;
      ce.sample2 = s2;
      ce.seed = cfg.seed;
      keep_earliest(fails[m], ce);
    };
    for (int t = 0; t < g.horizon && !fails[m]; ++t) {
      UsiTables B = usi_tables(g, hs, i, t, base.stage[t], psi, c.count(t));
      // (a) factorization
      const JointTable& tab = base.stage[t];
      for (std::size_t e = 0; e < tab.size(); ++e) {
        const int* key = tab.key(e);
        const int h = key[i + 1];
        const int k = psi[t][h];
        std::vector<int> o{key[0]};
        for (int j = 0; j < n; ++j)
          if (j != i) o.push_back(key[j + 1]);
        double lhs = tab.p[e] / B.pk[k];
        double rhs = (B.ph[h] / B.pk[k]) * (B.po[{k, o}] / B.pk[k]);
        if (std::abs(lhs - rhs) > cfg.tol) {
          fail("factorization", t, k, hs.label(g, i, t, h), others_label(g, hs, i, t, o), lhs, rhs, -1);
          return;
        }
      }
      // (b) F does not depend on the others' strategies
      UsiTables Bo = usi_tables(g, hs, i, t, vary_others.stage[t], psi, c.count(t));
      for (int h = 0; h < hs.count(i, t); ++h) {
        const int k = psi[t][h];
        if (B.pk[k] <= 0 || Bo.pk[k] <= 0) continue;
        double l = B.ph[h] / B.pk[k], r = Bo.ph[h] / Bo.pk[k];
        if (std::abs(l - r) > cfg.tol) {
          fail("own-marginal", t, k, hs.label(g, i, t, h), "", l, r, m2);
          return;
        }
      }
      // (c) Phi does not depend on player i's strategy
      UsiTables Bi = usi_tables(g, hs, i, t, vary_own.stage[t], psi, c.count(t));
      auto cmp = [&](const UsiTables& a, const UsiTables& b, bool swap) {
        for (const auto& [ko, p] : a.po) {
          const int k = ko.first;
          if (a.pk[k] <= 0 || b.pk[k] <= 0) continue;
          auto it = b.po.find(ko);
          double l = p / a.pk[k], r = (it == b.po.end() ? 0.0 : it->second) / b.pk[k];
          if (std::abs(l - r) > cfg.tol) {
            if (swap) std::swap(l, r);
            fail("others-marginal", t, k, others_label(g, hs, i, t, ko.second), "", l, r, m2);
            return false;
          }
        }
        return true;
      };
      if (!cmp(B, Bi, false) || !cmp(Bi, B, true)) return;
      if (m == 0) {
        for (int h = 0; h < hs.count(i, t); ++h) {
          const int k = psi[t][h];
          if (B.pk[k] > 0) Fw.push_back({t, k, hs.label(g, i, t, h), B.ph[h] / B.pk[k]});
        }
        for (const auto& [ko, p] : B.po)
          Pw.push_back({t, ko.first, others_label(g, hs, i, t, ko.second), p / B.pk[ko.first]});
      }
    }
  });
  InfoStateWitness w;
  w.player = i;
  w.samples_checked = M;
  std::optional<Counterexample> ce;
  for (int m = 0; m < M; ++m) keep_earliest(ce, fails[m]);
  if (ce) {
    w.verdict = Verdict::Fails;
    w.label = "fails";
    w.counterexample = ce;
  } else {
    w.verdict = Verdict::Holds;
    w.label = "holds (sampled)";
    w.F = std::move(Fw);
    w.phi = std::move(Pw);
  }
  return w;
}

}  // namespace dyngame
