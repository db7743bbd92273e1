#include "dyngame/game.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "util.hpp"

namespace dyngame {

int GameSpec::num_joint_actions(int t) const {
  int n = 1;
  for (const auto& a : actions[t]) n *= static_cast<int>(a.size());
  return n;
}

// Player 0 is the most significant digit, so joint indices follow the
// lexicographic order of action tuples.
std::vector<int> GameSpec::decode_joint(int t, int joint) const {
  std::vector<int> u(players.size());
  for (int i = num_players() - 1; i >= 0; --i) {
    int m = num_actions(t, i);
    u[i] = joint % m;
    joint /= m;
  }
  return u;
}

int GameSpec::encode_joint(int t, const std::vector<int>& u) const {
  int j = 0;
  for (int i = 0; i < num_players(); ++i) j = j * num_actions(t, i) + u[i];
  return j;
}

int GameSpec::player_index(const std::string& name) const {
  for (int i = 0; i < num_players(); ++i)
    if (players[i] == name) return i;
  return -1;
}

namespace {

std::string cell(int t, int x, int u) {
  return "(t=" + std::to_string(t + 1) + ", x=" + std::to_string(x) + ", u=" + std::to_string(u) + ")";
}

}  // namespace

std::vector<Violation> find_violations(const GameSpec& g, const ValidateOptions& opt) {
  std::vector<Violation> out;
  auto add = [&](ErrorKind k, int t, std::string where, std::string msg) {
    out.push_back({k, t < 0 ? -1 : t + 1, std::move(where), std::move(msg)});
  };
  const int n = g.num_players();
  const int T = g.horizon;
  if (n == 0) add(ErrorKind::ValidationError, -1, "players", "no players");
  if (T <= 0) add(ErrorKind::ValidationError, -1, "horizon", "horizon must be positive");
  if (!out.empty()) return out;
  if (static_cast<int>(g.states.size()) != T + 1) {
    add(ErrorKind::ValidationError, -1, "states", "need T+1 state spaces");
    return out;
  }
  if (static_cast<int>(g.actions.size()) != T || static_cast<int>(g.increments.size()) != T ||
      static_cast<int>(g.recall.size()) != T || static_cast<int>(g.kernel.size()) != T ||
      static_cast<int>(g.rewards.size()) != T) {
    add(ErrorKind::ValidationError, -1, "tables", "per-stage tables must have T entries");
    return out;
  }
  if (static_cast<int>(g.initial_info.size()) != n) {
    add(ErrorKind::ValidationError, -1, "initial_info", "need one initial information space per player");
    return out;
  }
  for (int t = 0; t <= T; ++t)
    if (g.states[t].empty()) add(ErrorKind::ValidationError, t, "states", "empty state space");
  for (int i = 0; i < n; ++i)
    if (g.initial_info[i].empty()) add(ErrorKind::ValidationError, -1, g.players[i], "empty initial information space");
  for (int t = 0; t < T; ++t) {
    if (static_cast<int>(g.actions[t].size()) != n || static_cast<int>(g.increments[t].size()) != n ||
        static_cast<int>(g.recall[t].size()) != n) {
      add(ErrorKind::ValidationError, t, "spaces", "per-player spaces missing");
      return out;
    }
    for (int i = 0; i < n; ++i) {
      std::string who = g.players[i];
      if (g.actions[t][i].empty()) add(ErrorKind::ValidationError, t, who, "empty action space");
      if (g.increments[t][i].empty()) add(ErrorKind::ValidationError, t, who, "empty increment space");
      if (g.recall[t][i].size() != g.increments[t][i].size()) {
        add(ErrorKind::PerfectRecallViolation, t, who, "increment does not declare the action it records");
        continue;
      }
      std::vector<char> covered(g.actions[t][i].size(), 0);
      for (int a : g.recall[t][i]) {
        if (a < 0 || a >= g.num_actions(t, i)) {
          add(ErrorKind::PerfectRecallViolation, t, who, "increment projects to an unknown action");
        } else {
          covered[a] = 1;
        }
      }
      for (std::size_t a = 0; a < covered.size(); ++a)
        if (!covered[a])
          add(ErrorKind::PerfectRecallViolation, t, who,
              "action " + g.actions[t][i][a] + " cannot be recovered from any increment");
    }
  }
  if (!out.empty()) return out;

  // initial law
  double total = 0;
  for (const auto& e : g.initial) {
    bool ok = e.state >= 0 && e.state < static_cast<int>(g.states[0].size()) &&
              static_cast<int>(e.info.size()) == n && e.p >= 0 && std::isfinite(e.p);
    for (int i = 0; ok && i < n; ++i) ok = e.info[i] >= 0 && e.info[i] < static_cast<int>(g.initial_info[i].size());
    if (!ok) add(ErrorKind::ValidationError, 0, "initial", "malformed initial entry");
    total += e.p;
  }
  if (std::abs(total - 1.0) > opt.row_tol)
    add(ErrorKind::NonStochasticKernel, 0, "initial", "initial law sums to " + detail::fmt_double(total));

  for (int t = 0; t < T; ++t) {
    const int nx = static_cast<int>(g.states[t].size());
    const int nu = g.num_joint_actions(t);
    if (static_cast<int>(g.kernel[t].size()) != nx || static_cast<int>(g.rewards[t].size()) != nx) {
      add(ErrorKind::ValidationError, t, "kernel", "kernel or rewards missing state rows");
      continue;
    }
    for (int x = 0; x < nx; ++x) {
      if (static_cast<int>(g.kernel[t][x].size()) != nu || static_cast<int>(g.rewards[t][x].size()) != nu) {
        add(ErrorKind::ValidationError, t, "kernel", "missing joint-action rows for state " + g.states[t][x]);
        continue;
      }
      for (int ju = 0; ju < nu; ++ju) {
        std::vector<int> u = g.decode_joint(t, ju);
        double s = 0;
        for (const auto& o : g.kernel[t][x][ju]) {
          if (o.next_state < 0 || o.next_state >= static_cast<int>(g.states[t + 1].size()) ||
              static_cast<int>(o.z.size()) != n || !(o.p >= 0) || !std::isfinite(o.p)) {
            add(ErrorKind::ValidationError, t, cell(t, x, ju), "malformed outcome");
            continue;
          }
          s += o.p;
          if (o.p == 0) continue;
          for (int i = 0; i < n; ++i) {
            if (o.z[i] < 0 || o.z[i] >= g.num_increments(t, i)) {
              add(ErrorKind::ValidationError, t, cell(t, x, ju), "increment index out of range");
            } else if (g.recall[t][i][o.z[i]] != u[i]) {
              add(ErrorKind::PerfectRecallViolation, t, cell(t, x, ju),
                  "increment of " + g.players[i] + " does not record the action taken");
            }
          }
        }
        if (std::abs(s - 1.0) > opt.row_tol)
          add(ErrorKind::NonStochasticKernel, t, cell(t, x, ju), "row sums to " + detail::fmt_double(s));
        const auto& r = g.rewards[t][x][ju];
        if (static_cast<int>(r.size()) != n) {
          add(ErrorKind::ValidationError, t, cell(t, x, ju), "reward vector has wrong length");
          continue;
        }
        for (int i = 0; i < n; ++i)
          if (!std::isfinite(r[i]) || std::abs(r[i]) > g.reward_bound + 1e-12)
            add(ErrorKind::RewardOutOfRange, t, cell(t, x, ju),
                "reward of " + g.players[i] + " is " + detail::fmt_double(r[i]) + ", bound " +
                    detail::fmt_double(g.reward_bound));
      }
    }
  }
  return out;
}

GameSpec validate_game(const GameSpec& raw, const ValidateOptions& opt) {
  auto v = find_violations(raw, opt);
  if (!v.empty()) throw ValidationFailure(std::move(v));
  return raw;
}

// ---------------------------------------------------------------- histories

Histories enumerate_histories(const GameSpec& g) {
  const int n = g.num_players();
  const int T = g.horizon;
  const int w = n + 1;
  Histories hs;
  hs.player.resize(n);
  for (auto& tree : hs.player) {
    tree.count.assign(T + 1, 0);
    tree.parent.resize(T + 1);
    tree.last.resize(T + 1);
    tree.child.resize(T);
  }
  // Stage 0: histories are the H_1 labels with positive probability.
  std::vector<std::vector<int>> h1_id(n);
  for (int i = 0; i < n; ++i) {
    std::set<int> seen;
    for (const auto& e : g.initial)
      if (e.p > 0) seen.insert(e.info[i]);
    h1_id[i].assign(g.initial_info[i].size(), -1);
    for (int lab : seen) {
      h1_id[i][lab] = hs.player[i].count[0]++;
      hs.player[i].parent[0].push_back(-1);
      hs.player[i].last[0].push_back(lab);
    }
  }
  std::set<std::vector<int>> support;
  for (const auto& e : g.initial) {
    if (e.p <= 0) continue;
    std::vector<int> k(w);
    k[0] = e.state;
    for (int i = 0; i < n; ++i) k[i + 1] = h1_id[i][e.info[i]];
    support.insert(k);
  }
  for (int t = 0; t < T; ++t) {
    std::vector<std::set<std::pair<int, int>>> ext(n);
    const int nu = g.num_joint_actions(t);
    for (const auto& k : support)
      for (int ju = 0; ju < nu; ++ju)
        for (const auto& o : g.kernel[t][k[0]][ju])
          if (o.p > 0)
            for (int i = 0; i < n; ++i) ext[i].insert({k[i + 1], o.z[i]});
    for (int i = 0; i < n; ++i) {
      auto& tree = hs.player[i];
      const int nz = g.num_increments(t, i);
      tree.child[t].assign(static_cast<std::size_t>(tree.count[t]) * nz, -1);
      for (auto [h, z] : ext[i]) {
        tree.child[t][static_cast<std::size_t>(h) * nz + z] = tree.count[t + 1]++;
        tree.parent[t + 1].push_back(h);
        tree.last[t + 1].push_back(z);
      }
    }
    std::set<std::vector<int>> next;
    for (const auto& k : support)
      for (int ju = 0; ju < nu; ++ju)
        for (const auto& o : g.kernel[t][k[0]][ju]) {
          if (o.p <= 0) continue;
          std::vector<int> nk(w);
          nk[0] = o.next_state;
          for (int i = 0; i < n; ++i) nk[i + 1] = hs.child(g, i, t, k[i + 1], o.z[i]);
          next.insert(std::move(nk));
        }
    if (next.size() > 10'000'000) throw Error(ErrorKind::SupportTooLarge, "history support exceeds 10^7");
    support = std::move(next);
  }
  return hs;
}

std::string Histories::label(const GameSpec& g, int i, int t, int h) const {
  std::vector<std::string> parts;
  for (int s = t; s >= 0; --s) {
    int lab = player[i].last[s][h];
    parts.push_back(s == 0 ? g.initial_info[i][lab] : g.increments[s - 1][i][lab]);
    h = player[i].parent[s][h];
  }
  std::string out;
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
    if (!out.empty()) out += '/';
    out += *it;
  }
  return out;
}

int Histories::find(const GameSpec& g, int i, int t, const std::string& label) const {
  std::vector<std::string> parts;
  std::stringstream ss(label);
  std::string tok;
  while (std::getline(ss, tok, '/')) parts.push_back(tok);
  if (static_cast<int>(parts.size()) != t + 1) return -1;
  auto lookup = [](const std::vector<std::string>& v, const std::string& s) {
    auto it = std::find(v.begin(), v.end(), s);
    return it == v.end() ? -1 : static_cast<int>(it - v.begin());
  };
  int lab = lookup(g.initial_info[i], parts[0]);
  if (lab < 0) return -1;
  int h = -1;
  for (int k = 0; k < count(i, 0); ++k)
    if (player[i].last[0][k] == lab) h = k;
  for (int s = 0; s < t && h >= 0; ++s) {
    int z = lookup(g.increments[s][i], parts[s + 1]);
    if (z < 0) return -1;
    h = child(g, i, s, h, z);
  }
  return h;
}

int Histories::previous_action(const GameSpec& g, int i, int t, int h) const {
  return g.recall[t - 1][i][player[i].last[t][h]];
}

// ---------------------------------------------------------------- strategies

Strategy uniform_strategy(const GameSpec& g, const Histories& hs, int i) {
  Strategy s;
  s.table.resize(g.horizon);
  for (int t = 0; t < g.horizon; ++t) {
    int m = g.num_actions(t, i);
    s.table[t].assign(hs.count(i, t), Dist(m, 1.0 / m));
  }
  return s;
}

Profile uniform_profile(const GameSpec& g, const Histories& hs) {
  Profile p;
  for (int i = 0; i < g.num_players(); ++i) p.push_back(uniform_strategy(g, hs, i));
  return p;
}

Strategy tremble(const Strategy& s, double eps) {
  Strategy out = s;
  for (auto& stage : out.table)
    for (auto& d : stage) {
      double m = static_cast<double>(d.size());
      for (auto& x : d) x = (1 - eps) * x + eps / m;
    }
  return out;
}

Profile tremble(const Profile& p, double eps) {
  Profile out;
  for (const auto& s : p) out.push_back(tremble(s, eps));
  return out;
}

void check_strategy(const GameSpec& g, const Histories& hs, int i, const Strategy& s, double tol) {
  std::vector<Violation> v;
  if (static_cast<int>(s.table.size()) != g.horizon) {
    v.push_back({ErrorKind::ValidationError, -1, g.players[i], "strategy must cover every stage"});
    throw ValidationFailure(v);
  }
  for (int t = 0; t < g.horizon; ++t) {
    if (static_cast<int>(s.table[t].size()) != hs.count(i, t)) {
      v.push_back({ErrorKind::ValidationError, t + 1, g.players[i], "strategy must cover every history"});
      continue;
    }
    for (int h = 0; h < hs.count(i, t); ++h) {
      const auto& d = s.table[t][h];
      double sum = 0;
      bool ok = static_cast<int>(d.size()) == g.num_actions(t, i);
      for (double x : d) {
        ok = ok && x >= -tol && std::isfinite(x);
        sum += x;
      }
      if (!ok || std::abs(sum - 1) > tol)
        v.push_back({ErrorKind::ValidationError, t + 1, g.players[i] + " at " + hs.label(g, i, t, h),
                     "not a distribution over actions"});
    }
  }
  if (!v.empty()) throw ValidationFailure(v);
}

// ---------------------------------------------------------------- compression

Compression identity_compression(const GameSpec& g, const Histories& hs, int i) {
  Compression c;
  c.labels.resize(g.horizon);
  c.update.resize(g.horizon);
  c.init.assign(g.initial_info[i].size(), -1);
  for (int h = 0; h < hs.count(i, 0); ++h) {
    c.init[hs.player[i].last[0][h]] = h;
    c.labels[0].push_back(hs.label(g, i, 0, h));
  }
  for (int t = 1; t < g.horizon; ++t) {
    int nz = g.num_increments(t - 1, i);
    c.update[t].assign(static_cast<std::size_t>(hs.count(i, t - 1)) * nz, -1);
    for (int h = 0; h < hs.count(i, t); ++h) {
      int par = hs.player[i].parent[t][h];
      c.update[t][static_cast<std::size_t>(par) * nz + hs.player[i].last[t][h]] = h;
      c.labels[t].push_back(hs.label(g, i, t, h));
    }
  }
  return c;
}

CompressedIndex compress_histories(const GameSpec& g, const Histories& hs, int i, const Compression& c) {
  CompressedIndex psi(g.horizon);
  for (int t = 0; t < g.horizon; ++t) {
    psi[t].resize(hs.count(i, t));
    for (int h = 0; h < hs.count(i, t); ++h) {
      int k;
      if (t == 0) {
        int lab = hs.player[i].last[0][h];
        k = lab < static_cast<int>(c.init.size()) ? c.init[lab] : -1;
      } else {
        int prev = psi[t - 1][hs.player[i].parent[t][h]];
        int z = hs.player[i].last[t][h];
        std::size_t slot = static_cast<std::size_t>(prev) * g.num_increments(t - 1, i) + z;
        k = slot < c.update[t].size() ? c.update[t][slot] : -1;
      }
      if (k < 0 || k >= c.count(t))
        throw Error(ErrorKind::DomainMiss, "compression of " + g.players[i] + " undefined at stage " +
                                               std::to_string(t + 1) + " for history " + hs.label(g, i, t, h));
      psi[t][h] = k;
    }
  }
  return psi;
}

std::vector<int> compress_trajectory(const GameSpec& g, int i, const Compression& c, int h1,
                                     const std::vector<int>& zs) {
  std::vector<int> ks;
  if (h1 < 0 || h1 >= static_cast<int>(c.init.size()) || c.init[h1] < 0)
    throw Error(ErrorKind::DomainMiss, "no K_1 for initial information");
  ks.push_back(c.init[h1]);
  for (std::size_t s = 0; s < zs.size() && static_cast<int>(s) + 1 < g.horizon; ++s) {
    int t = static_cast<int>(s) + 1;
    std::size_t slot = static_cast<std::size_t>(ks.back()) * g.num_increments(t - 1, i) + zs[s];
    if (slot >= c.update[t].size() || c.update[t][slot] < 0)
      throw Error(ErrorKind::DomainMiss, "no K_" + std::to_string(t + 1) + " for (K, Z) pair");
    ks.push_back(c.update[t][slot]);
  }
  return ks;
}

Strategy lift(const KStrategy& rho, const CompressedIndex& psi) {
  Strategy s;
  s.table.resize(psi.size());
  for (std::size_t t = 0; t < psi.size(); ++t)
    for (int k : psi[t]) s.table[t].push_back(rho.table[t][k]);
  return s;
}

KStrategy uniform_kstrategy(const GameSpec& g, const Compression& c, int i) {
  KStrategy r;
  r.table.resize(g.horizon);
  for (int t = 0; t < g.horizon; ++t) {
    int m = g.num_actions(t, i);
    r.table[t].assign(c.count(t), Dist(m, 1.0 / m));
  }
  return r;
}

}  // namespace dyngame
